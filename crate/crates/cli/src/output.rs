//! Human, JSON-lines and CSV rendering.
//!
//! CSV headers:
//!
//! * totient: `n,phi,s2,omega,squarefree`
//! * check: `n,phi,s2,is_prime,is_lehmer,is_deaconescu,multiplier`
//! * bound: `k,high_exponent,low_exponent,value`
//! * verify: `suite,check,status,detail`
//! * scan, search, resume: `examined,pruned_ratio,pruned_bound,pruned_mod3,primes,primes_in_d1,witnesses,lehmer_witnesses,elapsed_seconds,cursor`

use std::io::{self, Stdout, Write};

use deaconescu::props::ClassificationRecord;
use deaconescu::search::{Cursor, SearchReport};
use deaconescu::verify::CheckOutcome;
use serde::Serialize;

use crate::Format;

#[derive(Serialize)]
pub struct TotientRow {
    pub n: u64,
    pub phi: u128,
    pub s2: u128,
    pub omega: usize,
    pub squarefree: bool,
}

/// Bound values can exceed every fixed-width integer, so `value` is decimal
/// text.
#[derive(Serialize)]
pub struct BoundRow {
    pub k: u32,
    pub high_exponent: u64,
    pub low_exponent: u64,
    pub value: String,
}

pub struct Emitter {
    format: Format,
    stdout: Stdout,
    csv: Option<csv::Writer<Stdout>>,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter {
            format,
            stdout: io::stdout(),
            csv: None,
        }
    }

    fn json(&mut self, value: &impl Serialize) -> io::Result<()> {
        let mut lock = self.stdout.lock();
        serde_json::to_writer(&mut lock, value)?;
        lock.write_all(b"\n")
    }

    fn human(&mut self, line: &str) -> io::Result<()> {
        writeln!(self.stdout.lock(), "{line}")
    }

    /// Writes `row`, preceded by `header` on the first call.
    fn csv_row(&mut self, header: &[&str], row: &[String]) -> Result<(), csv::Error> {
        let writer = match &mut self.csv {
            Some(w) => w,
            None => {
                let mut w = csv::Writer::from_writer(io::stdout());
                w.write_record(header)?;
                self.csv.insert(w)
            }
        };
        writer.write_record(row)?;
        writer.flush()?;
        Ok(())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        match &mut self.csv {
            Some(w) => w.flush(),
            None => self.stdout.flush(),
        }
    }

    pub fn totient(&mut self, row: &TotientRow) -> Result<(), crate::Failure> {
        match self.format {
            Format::Human => self.human(&format!(
                "phi={} s2={} omega={} squarefree={}",
                row.phi, row.s2, row.omega, row.squarefree
            ))?,
            Format::Json => self.json(row)?,
            Format::Csv => self.csv_row(
                &["n", "phi", "s2", "omega", "squarefree"],
                &[
                    row.n.to_string(),
                    row.phi.to_string(),
                    row.s2.to_string(),
                    row.omega.to_string(),
                    row.squarefree.to_string(),
                ],
            )?,
        }
        Ok(())
    }

    pub fn record(&mut self, r: &ClassificationRecord) -> Result<(), crate::Failure> {
        let multiplier = r.multiplier.map_or("null".to_string(), |m| m.to_string());
        match self.format {
            Format::Human => self.human(&format!(
                "n={} phi={} s2={} is_prime={} is_lehmer={} is_deaconescu={} multiplier={}",
                r.n, r.phi, r.s2, r.is_prime, r.is_lehmer, r.is_deaconescu, multiplier
            ))?,
            Format::Json => self.json(r)?,
            Format::Csv => self.csv_row(
                &[
                    "n",
                    "phi",
                    "s2",
                    "is_prime",
                    "is_lehmer",
                    "is_deaconescu",
                    "multiplier",
                ],
                &[
                    r.n.to_string(),
                    r.phi.to_string(),
                    r.s2.to_string(),
                    r.is_prime.to_string(),
                    r.is_lehmer.to_string(),
                    r.is_deaconescu.to_string(),
                    r.multiplier.map_or(String::new(), |m| m.to_string()),
                ],
            )?,
        }
        Ok(())
    }

    pub fn bound(&mut self, row: &BoundRow) -> Result<(), crate::Failure> {
        match self.format {
            Format::Human => self.human(&format!(
                "2^{} - 2^{} = {}",
                row.high_exponent, row.low_exponent, row.value
            ))?,
            Format::Json => self.json(row)?,
            Format::Csv => self.csv_row(
                &["k", "high_exponent", "low_exponent", "value"],
                &[
                    row.k.to_string(),
                    row.high_exponent.to_string(),
                    row.low_exponent.to_string(),
                    row.value.clone(),
                ],
            )?,
        }
        Ok(())
    }

    pub fn check(&mut self, c: &CheckOutcome) -> Result<(), crate::Failure> {
        let status = if c.passed { "PASS" } else { "FAIL" };
        match self.format {
            Format::Human => {
                self.human(&format!("{status} {}/{}: {}", c.suite, c.check, c.detail))?
            }
            Format::Json => self.json(c)?,
            Format::Csv => self.csv_row(
                &["suite", "check", "status", "detail"],
                &[
                    c.suite.to_string(),
                    c.check.to_string(),
                    status.to_string(),
                    c.detail.clone(),
                ],
            )?,
        }
        Ok(())
    }

    pub fn report(&mut self, r: &SearchReport) -> Result<(), crate::Failure> {
        let cursor = r.cursor.map_or(String::new(), cursor_text);
        match self.format {
            Format::Human => {
                self.human(&format!(
                    "examined={} pruned_ratio={} pruned_bound={} pruned_mod3={} primes={} \
                     primes_in_d1={} witnesses={} lehmer_witnesses={} elapsed_seconds={:.3} cursor={}",
                    r.examined,
                    r.pruned_ratio,
                    r.pruned_bound,
                    r.pruned_mod3,
                    r.primes,
                    r.primes_in_d1,
                    r.witnesses.len(),
                    r.lehmer_witnesses.len(),
                    r.elapsed_seconds,
                    cursor
                ))?;
                for w in r.witnesses.iter().chain(&r.lehmer_witnesses) {
                    self.human(&format!(
                        "witness n={} phi={} s2={} is_lehmer={} is_deaconescu={}",
                        w.n, w.phi, w.s2, w.is_lehmer, w.is_deaconescu
                    ))?;
                }
            }
            Format::Json => self.json(r)?,
            Format::Csv => self.csv_row(
                &[
                    "examined",
                    "pruned_ratio",
                    "pruned_bound",
                    "pruned_mod3",
                    "primes",
                    "primes_in_d1",
                    "witnesses",
                    "lehmer_witnesses",
                    "elapsed_seconds",
                    "cursor",
                ],
                &[
                    r.examined.to_string(),
                    r.pruned_ratio.to_string(),
                    r.pruned_bound.to_string(),
                    r.pruned_mod3.to_string(),
                    r.primes.to_string(),
                    r.primes_in_d1.to_string(),
                    r.witnesses.len().to_string(),
                    r.lehmer_witnesses.len().to_string(),
                    format!("{:.3}", r.elapsed_seconds),
                    cursor,
                ],
            )?,
        }
        Ok(())
    }
}

fn cursor_text(c: Cursor) -> String {
    match c {
        Cursor::Exhaustive { next_n } => format!("exhaustive:{next_n}"),
        Cursor::Dfs { k, first_index } => format!("dfs:{k}:{first_index}"),
    }
}
