//! Counterexample search.
//!
//! Work is cut into units: aligned blocks of [`SEGMENT_LEN`] integers for
//! exhaustive scans, and `(K, first prime)` pairs for the tuple search.
//! Units run on `worker_count` threads in batches; their reports are merged
//! in unit order, which is the only synchronization. After each batch the
//! driver may write a [`Checkpoint`] holding the cumulative report and the
//! cursor of the next unit.

mod config;
mod dfs;
mod report;
mod scan;

use std::path::Path;
use std::time::Instant;

pub use config::{parse_nat, MCandidates, Mode, SearchConfig};
pub use dfs::{DfsObserver, PruneReason, Quiet};
pub use report::{Checkpoint, Cursor, SearchReport};
pub use scan::{classify_range, sieve_scan, sieve_scan_with_budget, ClassifyRange, SEGMENT_LEN};

use crate::props::ClassificationRecord;
use crate::{Budget, Error, Result};
use dfs::DfsPlan;

/// Receives every classified value of an exhaustive run, in order.
pub type RecordSink<'a> = &'a mut dyn FnMut(&ClassificationRecord) -> Result<()>;

/// Knobs that affect how a run executes but not what it computes.
#[derive(Default)]
pub struct RunOptions<'a> {
    pub budget: Budget,
    /// Stop after this many work units (a checkpoint is written first when
    /// a checkpoint path is configured).
    pub stop_after_units: Option<u64>,
    /// Exhaustive mode only.
    pub record_sink: Option<RecordSink<'a>>,
}

enum Plan {
    Exhaustive { limit: u64, base: Vec<u64> },
    Dfs(DfsPlan),
}

impl Plan {
    fn new(config: &SearchConfig, budget: &Budget) -> Result<Self> {
        config.validate()?;
        Ok(match config.mode {
            Mode::Exhaustive => Plan::Exhaustive {
                limit: config.limit,
                base: scan::base_primes_for(config.limit, budget)?,
            },
            Mode::Dfs => Plan::Dfs(DfsPlan::new(config, budget)?),
        })
    }

    fn first_cursor(&self) -> Cursor {
        match self {
            Plan::Exhaustive { .. } => Cursor::Exhaustive { next_n: 2 },
            Plan::Dfs(plan) => plan.first_cursor(),
        }
    }

    fn end_cursor(&self) -> Cursor {
        match self {
            Plan::Exhaustive { limit, .. } => Cursor::Exhaustive { next_n: limit + 1 },
            Plan::Dfs(plan) => plan.end_cursor(),
        }
    }

    fn next_cursor(&self, cursor: Cursor) -> Cursor {
        match (self, cursor) {
            (Plan::Exhaustive { limit, .. }, Cursor::Exhaustive { next_n }) => Cursor::Exhaustive {
                next_n: scan::unit_span(next_n, *limit).1 + 1,
            },
            (Plan::Dfs(plan), c) => plan.next_cursor(c),
            (_, c) => c,
        }
    }

    fn process(
        &self,
        cursor: Cursor,
        keep_records: bool,
    ) -> Result<(SearchReport, Vec<ClassificationRecord>)> {
        match (self, cursor) {
            (Plan::Exhaustive { limit, base }, Cursor::Exhaustive { next_n }) => {
                let (lo, hi) = scan::unit_span(next_n, *limit);
                scan::scan_segment(lo, hi, base, keep_records)
            }
            (Plan::Dfs(plan), Cursor::Dfs { k, first_index }) => {
                let start = Instant::now();
                let mut report = SearchReport::default();
                plan.explore_unit(k, first_index as usize, &mut report, &mut Quiet);
                report.cursor = Some(plan.next_cursor(cursor));
                report.elapsed_seconds = start.elapsed().as_secs_f64();
                Ok((report, Vec::new()))
            }
            _ => Err(Error::invalid("cursor kind does not match search mode")),
        }
    }
}

/// Runs a search from the beginning.
pub fn run(config: &SearchConfig) -> Result<SearchReport> {
    run_with(config, None, SearchReport::default(), RunOptions::default())
}

/// Runs the tuple search described by `config` (its mode is taken as dfs).
pub fn dfs_search(config: &SearchConfig) -> Result<SearchReport> {
    let mut config = config.clone();
    config.mode = Mode::Dfs;
    run(&config)
}

/// Single-threaded tuple search that reports every node, cut and leaf to
/// `observer`.
pub fn dfs_search_observed(
    config: &SearchConfig,
    observer: &mut impl DfsObserver,
) -> Result<SearchReport> {
    let mut config = config.clone();
    config.mode = Mode::Dfs;
    config.validate()?;
    let start = Instant::now();
    let plan = DfsPlan::new(&config, &Budget::default())?;
    let mut report = SearchReport::default();
    for k in config.k_range.0..=config.k_range.1 {
        for i in 0..plan.pool().len() {
            plan.explore_unit(k, i, &mut report, observer);
        }
    }
    report.witnesses.sort();
    report.lehmer_witnesses.sort();
    report.cursor = Some(plan.end_cursor());
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Continues from `checkpoint` and returns only the newly done work.
/// Merging it into `checkpoint.partial_counters` gives the full report.
pub fn resume(checkpoint: &Checkpoint, config: &SearchConfig) -> Result<SearchReport> {
    resume_with(checkpoint, config, RunOptions::default())
}

pub fn resume_with(
    checkpoint: &Checkpoint,
    config: &SearchConfig,
    options: RunOptions<'_>,
) -> Result<SearchReport> {
    let path = config
        .checkpoint_path
        .as_deref()
        .unwrap_or(Path::new("<in-memory checkpoint>"));
    checkpoint.ensure_compatible(config, path)?;
    run_with(
        config,
        Some(checkpoint.cursor),
        checkpoint.partial_counters.clone(),
        options,
    )
}

/// Runs from `start` (or the beginning) and returns the incremental report.
/// `base` is what earlier runs accumulated; it only feeds the checkpoints.
pub fn run_with(
    config: &SearchConfig,
    start: Option<Cursor>,
    base: SearchReport,
    mut options: RunOptions<'_>,
) -> Result<SearchReport> {
    let clock = Instant::now();
    let plan = Plan::new(config, &options.budget)?;
    let end = plan.end_cursor();
    let mut cursor = start.unwrap_or_else(|| plan.first_cursor());
    if std::mem::discriminant(&cursor) != std::mem::discriminant(&end) {
        return Err(Error::invalid("cursor kind does not match search mode"));
    }
    let keep_records = options.record_sink.is_some() && config.mode == Mode::Exhaustive;
    let workers = config.worker_count.max(1);
    let batch_len = if workers == 1 { 1 } else { workers * 8 };

    let mut done = SearchReport {
        cursor: Some(cursor.min(end)),
        ..Default::default()
    };
    let mut units = 0u64;
    let mut since_checkpoint = 0u64;

    while cursor < end {
        let mut batch = Vec::with_capacity(batch_len);
        let mut c = cursor;
        while c < end && batch.len() < batch_len {
            if options
                .stop_after_units
                .is_some_and(|cap| units + batch.len() as u64 >= cap)
            {
                break;
            }
            batch.push(c);
            c = plan.next_cursor(c);
        }
        if batch.is_empty() {
            break;
        }
        let results = process_batch(&plan, &batch, workers, keep_records)?;
        for (report, records) in results {
            since_checkpoint += report.examined;
            done.merge_in(report);
            if let Some(sink) = options.record_sink.as_mut() {
                for record in &records {
                    sink(record)?;
                }
            }
        }
        units += batch.len() as u64;
        cursor = c;
        done.cursor = Some(cursor);

        if let Some(path) = &config.checkpoint_path {
            if since_checkpoint >= config.checkpoint_every {
                write_checkpoint(config, path, cursor, &base, &done, &clock)?;
                since_checkpoint = 0;
            }
        }
        if options.stop_after_units.is_some_and(|cap| units >= cap) {
            break;
        }
    }

    done.elapsed_seconds = clock.elapsed().as_secs_f64();
    if let Some(path) = &config.checkpoint_path {
        write_checkpoint(config, path, cursor.min(end), &base, &done, &clock)?;
    }
    Ok(done)
}

fn write_checkpoint(
    config: &SearchConfig,
    path: &Path,
    cursor: Cursor,
    base: &SearchReport,
    done: &SearchReport,
    clock: &Instant,
) -> Result<()> {
    let mut cumulative = base.clone().merge(done.clone());
    cumulative.elapsed_seconds = base.elapsed_seconds + clock.elapsed().as_secs_f64();
    cumulative.cursor = Some(cursor);
    Checkpoint::new(config, cursor, cumulative).save(path)
}

type UnitResult = (SearchReport, Vec<ClassificationRecord>);

fn process_batch(
    plan: &Plan,
    batch: &[Cursor],
    workers: usize,
    keep_records: bool,
) -> Result<Vec<UnitResult>> {
    if workers == 1 || batch.len() == 1 {
        return batch
            .iter()
            .map(|&c| plan.process(c, keep_records))
            .collect();
    }
    // Worker w takes units w, w + workers, w + 2 * workers, ...
    let per_worker: Vec<Result<Vec<(usize, UnitResult)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers.min(batch.len()))
            .map(|w| {
                scope.spawn(move || {
                    batch
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, &c)| plan.process(c, keep_records).map(|r| (i, r)))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    let mut slots: Vec<Option<UnitResult>> = (0..batch.len()).map(|_| None).collect();
    for chunk in per_worker {
        for (i, result) in chunk? {
            slots[i] = Some(result);
        }
    }
    Ok(slots
        .into_iter()
        .map(|s| s.expect("every unit assigned to a worker"))
        .collect())
}
