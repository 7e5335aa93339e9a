//! Search engine: report algebra, determinism, checkpoints and the tuple
//! search on instances where leaves exist.

use deaconescu::arith::{first_odd_primes, Factorization};
use deaconescu::props::ClassificationRecord;
use deaconescu::search::{
    self, classify_range, dfs_search_observed, sieve_scan, Checkpoint, Cursor, DfsObserver,
    MCandidates, Mode, RunOptions, SearchConfig, SearchReport,
};
use deaconescu::Error;
use proptest::prelude::*;

fn report_strategy() -> impl Strategy<Value = SearchReport> {
    (
        0u64..1000,
        0u64..1000,
        0u64..1000,
        0u64..100,
        prop::collection::vec(2u64..10_000, 0..3),
    )
        .prop_map(|(examined, ratio, bound, mod3, mut ns)| SearchReport {
            examined,
            pruned_ratio: ratio,
            pruned_bound: bound,
            pruned_mod3: mod3,
            // Reports keep witnesses sorted.
            witnesses: {
                ns.sort_unstable();
                ns
            }
            .into_iter()
            .map(|n| ClassificationRecord::for_n(n).unwrap())
            .collect(),
            cursor: Some(Cursor::Exhaustive {
                next_n: examined + 2,
            }),
            ..Default::default()
        })
}

proptest! {
    #[test]
    fn merge_is_a_commutative_monoid(a in report_strategy(), b in report_strategy(), c in report_strategy()) {
        let ab_c = a.clone().merge(b.clone()).merge(c.clone());
        let a_bc = a.clone().merge(b.clone().merge(c.clone()));
        prop_assert_eq!(ab_c.canonical_json(), a_bc.canonical_json());
        prop_assert_eq!(a.clone().merge(b.clone()).canonical_json(), b.clone().merge(a.clone()).canonical_json());
        prop_assert_eq!(a.clone().merge(SearchReport::default()).canonical_json(), a.canonical_json());
    }
}

#[test]
fn worker_count_does_not_change_the_report() {
    let mut config = SearchConfig::exhaustive(300_000);
    let reference = search::run(&config).unwrap().canonical_json();
    for workers in [2, 3, 5] {
        config.worker_count = workers;
        assert_eq!(search::run(&config).unwrap().canonical_json(), reference);
    }
    assert_eq!(sieve_scan(300_000).unwrap().canonical_json(), reference);
}

#[test]
fn classify_range_matches_per_value_records() {
    let lo = 999_000_000u64;
    let records: Vec<_> = classify_range(lo, lo + 3000).unwrap().collect();
    assert_eq!(records.len(), 3001);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(*r, ClassificationRecord::for_n(lo + i as u64).unwrap());
    }
}

#[derive(Default)]
struct Leaves(Vec<(Vec<u64>, ClassificationRecord)>);

impl DfsObserver for Leaves {
    fn leaf(&mut self, _k: u32, tuple: &[u64], record: &ClassificationRecord) {
        self.0.push((tuple.to_vec(), record.clone()));
    }
}

/// Eleven odd primes starting at 3 give phi/S2 just above 5, so with
/// `M = 5` the search reaches leaves.
#[test]
fn leaves_match_brute_force_when_reachable() {
    let mut config = SearchConfig::dfs((11, 11), MCandidates::explicit([5]), 53);
    config.n_cap = 1_000_000_000_000_000u64.into();
    let mut leaves = Leaves::default();
    let report = dfs_search_observed(&config, &mut leaves).unwrap();
    assert!(!leaves.0.is_empty());
    assert_eq!(report.examined as usize, leaves.0.len());

    let pool = first_odd_primes(15);
    assert_eq!(*pool.last().unwrap(), 53);
    let mut feasible = Vec::new();
    // Every 11-subset of the 15 pool primes: 1365 tuples.
    for mask in 0u32..1 << 15 {
        if mask.count_ones() != 11 {
            continue;
        }
        let tuple: Vec<u64> = (0..15)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pool[i])
            .collect();
        let n: u128 = tuple.iter().map(|&p| p as u128).product();
        let phi: u128 = tuple.iter().map(|&p| (p - 1) as u128).product();
        let s2: u128 = tuple.iter().map(|&p| (p - 2) as u128).product();
        if n < 1_000_000_000_000_000 && 5 * s2 < phi {
            feasible.push(tuple);
        }
    }
    feasible.sort();
    let mut visited: Vec<Vec<u64>> = leaves.0.iter().map(|(t, _)| t.clone()).collect();
    visited.sort();
    for t in &feasible {
        assert!(
            visited.binary_search(t).is_ok(),
            "feasible {t:?} was pruned"
        );
    }
    for (tuple, record) in &leaves.0 {
        let f = Factorization::from_primes(tuple).unwrap();
        assert_eq!(*record, ClassificationRecord::from_factorization(&f));
        assert!(record.n < 1_000_000_000_000_000);
    }
    assert!(report.witnesses.is_empty());
    let parallel = search::dfs_search(&SearchConfig {
        worker_count: 4,
        ..config
    })
    .unwrap();
    assert_eq!(
        parallel.canonical_json(),
        SearchReport {
            elapsed_seconds: 0.0,
            ..report
        }
        .canonical_json()
    );
}

#[test]
fn checkpoint_round_trips_and_rejects_other_configs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let mut config = SearchConfig::exhaustive(500_000);
    config.checkpoint_path = Some(path.clone());
    let options = RunOptions {
        stop_after_units: Some(2),
        ..Default::default()
    };
    search::run_with(&config, None, SearchReport::default(), options).unwrap();
    let checkpoint = Checkpoint::load(&path).unwrap();
    assert_eq!(checkpoint.mode, Mode::Exhaustive);
    assert_eq!(
        checkpoint.cursor,
        Cursor::Exhaustive {
            next_n: 2 * search::SEGMENT_LEN
        }
    );
    assert!(!path.with_extension("json.tmp").exists());

    let other = SearchConfig {
        limit: 600_000,
        ..config.clone()
    };
    assert!(matches!(
        search::resume(&checkpoint, &other),
        Err(Error::CheckpointMismatch { .. })
    ));
    let dfs = SearchConfig {
        mode: Mode::Dfs,
        ..config.clone()
    };
    assert!(matches!(
        search::resume(&checkpoint, &dfs),
        Err(Error::CheckpointMismatch { .. })
    ));

    // Worker count is not part of the identity of a run.
    let more_workers = SearchConfig {
        worker_count: 3,
        ..config.clone()
    };
    let rest = search::resume(&checkpoint, &more_workers).unwrap();
    let total = checkpoint.partial_counters.merge(rest);
    assert_eq!(
        total.canonical_json(),
        sieve_scan(500_000).unwrap().canonical_json()
    );
}

#[test]
fn dfs_checkpoint_resume_matches_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dfs.json");
    let mut config = SearchConfig::dfs((2, 6), MCandidates::All, 400);
    config.checkpoint_path = Some(path.clone());
    config.checkpoint_every = 0;
    let full = search::run(&SearchConfig {
        checkpoint_path: None,
        ..config.clone()
    })
    .unwrap();
    search::run_with(
        &config,
        None,
        SearchReport::default(),
        RunOptions {
            stop_after_units: Some(40),
            ..Default::default()
        },
    )
    .unwrap();
    let checkpoint = Checkpoint::load(&path).unwrap();
    assert!(
        checkpoint.cursor
            < Cursor::Dfs {
                k: 7,
                first_index: 0
            }
    );
    let total = checkpoint
        .partial_counters
        .clone()
        .merge(search::resume(&checkpoint, &config).unwrap());
    assert_eq!(total.canonical_json(), full.canonical_json());
}

#[test]
fn edited_checkpoint_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let mut config = SearchConfig::exhaustive(200_000);
    config.checkpoint_path = Some(path.clone());
    let options = RunOptions {
        stop_after_units: Some(1),
        ..Default::default()
    };
    search::run_with(&config, None, SearchReport::default(), options).unwrap();
    let loaded = Checkpoint::load(&path).unwrap();
    assert_eq!(loaded.resume_config(&path, None), config);

    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replace("\"limit\": 200000", "\"limit\": 300000");
    std::fs::write(&path, text).unwrap();
    assert!(matches!(
        Checkpoint::load(&path),
        Err(Error::CheckpointMismatch { .. })
    ));
}
