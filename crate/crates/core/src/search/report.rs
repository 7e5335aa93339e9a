use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Mode, SearchConfig};
use crate::props::ClassificationRecord;
use crate::{Error, Result};

/// Where an interrupted run picks up again. Ordered by progress.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cursor {
    /// Next `n` to classify.
    Exhaustive { next_n: u64 },
    /// Next first-prime index (into the odd-prime pool) for `k` primes.
    Dfs { k: u32, first_index: u64 },
}

/// Counters and witnesses of a scan or tuple search.
///
/// Reports over disjoint pieces of work combine with [`SearchReport::merge`];
/// [`SearchReport::default`] is the identity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Values classified (exhaustive) or complete tuples evaluated (dfs).
    pub examined: u64,
    pub pruned_ratio: u64,
    pub pruned_bound: u64,
    pub pruned_mod3: u64,
    /// Primes met by an exhaustive scan.
    pub primes: u64,
    /// Primes `p` with `S2(p) = phi(p) - 1`, i.e. multiplier 1.
    pub primes_in_d1: u64,
    /// Composite Deaconescu numbers found.
    pub witnesses: Vec<ClassificationRecord>,
    /// Composite Lehmer numbers found.
    pub lehmer_witnesses: Vec<ClassificationRecord>,
    pub elapsed_seconds: f64,
    pub cursor: Option<Cursor>,
}

impl SearchReport {
    pub fn merge(mut self, other: SearchReport) -> SearchReport {
        self.merge_in(other);
        self
    }

    pub fn merge_in(&mut self, other: SearchReport) {
        self.examined += other.examined;
        self.pruned_ratio += other.pruned_ratio;
        self.pruned_bound += other.pruned_bound;
        self.pruned_mod3 += other.pruned_mod3;
        self.primes += other.primes;
        self.primes_in_d1 += other.primes_in_d1;
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort();
        self.lehmer_witnesses.extend(other.lehmer_witnesses);
        self.lehmer_witnesses.sort();
        self.elapsed_seconds += other.elapsed_seconds;
        self.cursor = self.cursor.max(other.cursor);
    }

    pub fn has_witness(&self) -> bool {
        !self.witnesses.is_empty() || !self.lehmer_witnesses.is_empty()
    }

    /// Folds one classified value into the counters.
    pub(crate) fn tally(&mut self, record: &ClassificationRecord) {
        self.examined += 1;
        if record.is_prime {
            self.primes += 1;
            if record.s2 + 1 == record.phi {
                self.primes_in_d1 += 1;
            }
        }
        if record.is_deaconescu {
            self.witnesses.push(record.clone());
        }
        if record.is_lehmer {
            self.lehmer_witnesses.push(record.clone());
        }
    }

    /// JSON with `elapsed_seconds` zeroed; equal for equal work.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.elapsed_seconds = 0.0;
        serde_json::to_string(&copy).expect("reports always serialize")
    }
}

/// On-disk resumption state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config_hash: String,
    pub mode: Mode,
    /// The settings of the run, so it can be resumed without restating them.
    pub config: SearchConfig,
    pub cursor: Cursor,
    /// Everything accumulated up to `cursor`.
    pub partial_counters: SearchReport,
}

impl Checkpoint {
    pub const VERSION: u32 = 1;

    pub fn new(config: &SearchConfig, cursor: Cursor, partial_counters: SearchReport) -> Self {
        Checkpoint {
            version: Self::VERSION,
            config_hash: config.config_hash(),
            mode: config.mode,
            config: config.clone(),
            cursor,
            partial_counters,
        }
    }

    /// Writes to a sibling temp file, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = Path::new(&tmp);
        {
            let mut file = fs::File::create(tmp)?;
            serde_json::to_writer_pretty(&mut file, self)?;
            file.write_all(b"\n")?;
            file.sync_all()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let checkpoint: Checkpoint = serde_json::from_str(&text)?;
        let reason = if checkpoint.version != Self::VERSION {
            format!("unsupported version {}", checkpoint.version)
        } else if checkpoint.config.config_hash() != checkpoint.config_hash
            || checkpoint.config.mode != checkpoint.mode
        {
            "stored config does not match its hash".to_string()
        } else {
            return Ok(checkpoint);
        };
        Err(Error::CheckpointMismatch {
            path: path.to_owned(),
            reason,
        })
    }

    /// The stored config with the given run-time settings applied.
    pub fn resume_config(&self, path: &Path, worker_count: Option<usize>) -> SearchConfig {
        let mut config = self.config.clone();
        config.checkpoint_path = Some(path.to_owned());
        if let Some(workers) = worker_count {
            config.worker_count = workers;
        }
        config
    }

    /// Fails unless this checkpoint was produced under an equivalent config.
    pub fn ensure_compatible(&self, config: &SearchConfig, path: &Path) -> Result<()> {
        let reason = if self.mode != config.mode {
            format!("mode {} vs {}", self.mode, config.mode)
        } else if self.config_hash != config.config_hash() {
            format!(
                "config hash {} vs {}",
                self.config_hash,
                config.config_hash()
            )
        } else {
            let cursor_mode = match self.cursor {
                Cursor::Exhaustive { .. } => Mode::Exhaustive,
                Cursor::Dfs { .. } => Mode::Dfs,
            };
            if cursor_mode == config.mode {
                return Ok(());
            }
            "cursor kind does not match mode".to_string()
        };
        Err(Error::CheckpointMismatch {
            path: path.to_owned(),
            reason,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: u128) -> ClassificationRecord {
        ClassificationRecord {
            n,
            phi: 1,
            s2: 1,
            is_prime: false,
            is_lehmer: false,
            is_deaconescu: true,
            multiplier: Some(3),
        }
    }

    #[test]
    fn merge_identity_and_order() {
        let a = SearchReport {
            examined: 3,
            pruned_ratio: 1,
            witnesses: vec![record(9)],
            cursor: Some(Cursor::Exhaustive { next_n: 10 }),
            ..Default::default()
        };
        let b = SearchReport {
            examined: 4,
            pruned_mod3: 2,
            witnesses: vec![record(5)],
            cursor: Some(Cursor::Exhaustive { next_n: 20 }),
            ..Default::default()
        };
        assert_eq!(a.clone().merge(SearchReport::default()), a);
        assert_eq!(SearchReport::default().merge(a.clone()), a);
        let ab = a.clone().merge(b.clone());
        let ba = b.merge(a);
        assert_eq!(ab, ba);
        assert_eq!(ab.examined, 7);
        assert_eq!(
            ab.witnesses.iter().map(|r| r.n).collect::<Vec<_>>(),
            vec![5, 9]
        );
        assert_eq!(ab.cursor, Some(Cursor::Exhaustive { next_n: 20 }));
    }

    #[test]
    fn checkpoint_round_trip_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let config = SearchConfig::exhaustive(1000);
        let ck = Checkpoint::new(
            &config,
            Cursor::Exhaustive { next_n: 500 },
            SearchReport::default(),
        );
        ck.save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        assert_eq!(back, ck);
        assert!(back.ensure_compatible(&config, &path).is_ok());
        let other = SearchConfig::exhaustive(2000);
        assert!(matches!(
            back.ensure_compatible(&other, &path),
            Err(Error::CheckpointMismatch { .. })
        ));
        let text = std::fs::read_to_string(&path).unwrap();
        for key in [
            "version",
            "config_hash",
            "mode",
            "cursor",
            "partial_counters",
        ] {
            assert!(text.contains(&format!("\"{key}\"")), "missing {key}");
        }
        assert!(!dir.path().join("scan.ckpt.tmp").exists());
    }
}
