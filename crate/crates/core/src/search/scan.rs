use std::time::Instant;

use super::report::{Cursor, SearchReport};
use crate::arith::{sieve_primes, TotientSegment, TotientTable};
use crate::props::ClassificationRecord;
use crate::{Budget, Error, Result};

/// Width of one exhaustive work unit. Units are aligned to multiples of it.
pub const SEGMENT_LEN: u64 = 1 << 16;

/// Classifies every `n` in `2..=limit` from one linear sieve pass.
pub fn sieve_scan(limit: u64) -> Result<SearchReport> {
    sieve_scan_with_budget(limit, &Budget::default())
}

pub fn sieve_scan_with_budget(limit: u64, budget: &Budget) -> Result<SearchReport> {
    if limit < 2 {
        return Err(Error::invalid("scan limit must be at least 2"));
    }
    let start = Instant::now();
    let table = TotientTable::build_with_budget(limit, budget)?;
    let mut report = SearchReport::default();
    for n in 2..=limit {
        let record = ClassificationRecord::from_values(
            n as u128,
            table.phi(n) as u128,
            table.s2(n) as u128,
            table.is_prime(n),
        );
        report.tally(&record);
    }
    report.cursor = Some(Cursor::Exhaustive { next_n: limit + 1 });
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Base primes for segments reaching up to `limit`.
pub(crate) fn base_primes_for(limit: u64, budget: &Budget) -> Result<Vec<u64>> {
    crate::arith::sieve_primes_with_budget(limit.isqrt(), budget)
}

/// From `start` to the end of its aligned unit, capped at `limit`.
pub(crate) fn unit_span(start: u64, limit: u64) -> (u64, u64) {
    let end = (start / SEGMENT_LEN + 1)
        .saturating_mul(SEGMENT_LEN)
        .saturating_sub(1)
        .min(limit);
    (start, end)
}

/// Classifies `[lo, hi]`, tallying into a fresh report. Records are
/// collected when `keep_records` is set.
pub(crate) fn scan_segment(
    lo: u64,
    hi: u64,
    base: &[u64],
    keep_records: bool,
) -> Result<(SearchReport, Vec<ClassificationRecord>)> {
    let start = Instant::now();
    let segment = TotientSegment::compute(lo, hi, base)?;
    let mut report = SearchReport::default();
    let mut records = Vec::new();
    for n in lo..=hi {
        let record = ClassificationRecord::from_values(
            n as u128,
            segment.phi(n) as u128,
            segment.s2(n) as u128,
            segment.is_prime(n),
        );
        report.tally(&record);
        if keep_records {
            records.push(record);
        }
    }
    report.cursor = Some(Cursor::Exhaustive { next_n: hi + 1 });
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok((report, records))
}

/// Records for every `n` in `[lo, hi]` in increasing order, produced one
/// segment at a time.
pub fn classify_range(lo: u64, hi: u64) -> Result<ClassifyRange> {
    if lo < 2 || lo > hi {
        return Err(Error::invalid(format!(
            "bad range [{lo}, {hi}]; need 2 <= lo <= hi"
        )));
    }
    if hi == u64::MAX {
        return Err(Error::invalid("range end must be below 2^64 - 1"));
    }
    Ok(ClassifyRange {
        next: lo,
        hi,
        base: sieve_primes(hi.isqrt())?,
        segment: None,
    })
}

pub struct ClassifyRange {
    next: u64,
    hi: u64,
    base: Vec<u64>,
    segment: Option<TotientSegment>,
}

impl Iterator for ClassifyRange {
    type Item = ClassificationRecord;

    fn next(&mut self) -> Option<ClassificationRecord> {
        if self.next > self.hi {
            return None;
        }
        let n = self.next;
        if self.segment.as_ref().is_none_or(|s| n > s.hi()) {
            let (lo, hi) = unit_span(n, self.hi);
            let segment = TotientSegment::compute(lo, hi, &self.base)
                .expect("range and base primes were validated up front");
            self.segment = Some(segment);
        }
        let segment = self.segment.as_ref().expect("segment loaded above");
        self.next += 1;
        Some(ClassificationRecord::from_values(
            n as u128,
            segment.phi(n) as u128,
            segment.s2(n) as u128,
            segment.is_prime(n),
        ))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.hi + 1).saturating_sub(self.next);
        let left = usize::try_from(left).unwrap_or(usize::MAX);
        (left, Some(left))
    }
}
