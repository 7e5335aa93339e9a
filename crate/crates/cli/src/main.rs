//! `deaconescu` command-line tool.
//!
//! Exit codes: 0 clean, 1 a verify check failed, 2 usage or bad input,
//! 3 budget exceeded, 4 checkpoint mismatch, 10 composite witness found.

mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deaconescu::arith::{euler_phi, factorize, is_squarefree, omega, schemmel_s2};
use deaconescu::bounds::{deaconescu_upper_bound_with_budget, upper_bound_exponents};
use deaconescu::props::ClassificationRecord;
use deaconescu::search::{
    self, parse_nat, Checkpoint, MCandidates, Mode, RunOptions, SearchConfig, SearchReport,
};
use deaconescu::verify::{run_suite, Suite, DEFAULT_SEED};
use deaconescu::{Budget, Error};

use output::{BoundRow, Emitter, TotientRow};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_CHECKPOINT: u8 = 4;
const EXIT_WITNESS: u8 = 10;

#[derive(Parser)]
#[command(
    name = "deaconescu",
    version,
    about = "Schemmel's totient and the Deaconescu divisibility problem"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Worker threads for scan, search and resume.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// TOML file with search settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// phi(n), S2(n), omega(n) and squarefreeness.
    Totient { n: u64 },
    /// Classify n: prime, Lehmer, Deaconescu, multiplier.
    Check { n: u64 },
    /// Upper bound on a Deaconescu number with K prime factors.
    Bound { k: u32 },
    /// Run a check suite: lemma21, thm11, nielsen, oracle, thm13 or all.
    Verify {
        #[arg(value_parser = parse_suites)]
        suite: Suites,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Classify every n in [2, limit].
    Scan {
        #[arg(long)]
        limit: Option<u64>,
        /// Print every classified value as a JSON line.
        #[arg(long)]
        emit_records: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Pruned search over tuples of odd primes.
    Search {
        /// Number of prime factors (sets both --k-min and --k-max).
        #[arg(long, conflicts_with_all = ["k_min", "k_max"])]
        k: Option<u32>,
        #[arg(long)]
        k_min: Option<u32>,
        #[arg(long)]
        k_max: Option<u32>,
        /// Largest prime in the pool.
        #[arg(long)]
        pool: Option<u64>,
        /// Exclusive cap on n, e.g. 1e18 or 2^64.
        #[arg(long)]
        n_cap: Option<String>,
        /// Multipliers: "all" or a list such as 3,5,7.
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Continue a scan or search from its checkpoint and print the total.
    Resume {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        checkpoint_every: Option<u64>,
        #[arg(long)]
        stop_after_units: Option<u64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Checkpoint file; an existing compatible one is continued.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    checkpoint_every: Option<u64>,
    /// Stop after this many work units.
    #[arg(long)]
    stop_after_units: Option<u64>,
}

/// A single suite name, or `all`.
#[derive(Clone)]
struct Suites(Vec<Suite>);

fn parse_suites(text: &str) -> Result<Suites, String> {
    if text == "all" {
        return Ok(Suites(Suite::ALL.to_vec()));
    }
    text.parse::<Suite>()
        .map(|s| Suites(vec![s]))
        .map_err(|e| e.to_string())
}

enum Failure {
    Core(Error),
    Usage(String),
    Checkpoint(String),
    Output(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Output(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Output(e.into())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::InvalidInput(_)) | Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(Error::BudgetExceeded { .. } | Error::Overflow(_)) => EXIT_BUDGET,
            Failure::Core(Error::CheckpointMismatch { .. }) | Failure::Checkpoint(_) => {
                EXIT_CHECKPOINT
            }
            Failure::Core(_) | Failure::Output(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(m) | Failure::Checkpoint(m) => m.clone(),
            Failure::Output(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Output(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let mut out = Emitter::new(cli.format);
    match &cli.command {
        Command::Totient { n } => {
            let f = factorize(*n)?;
            out.totient(&TotientRow {
                n: *n,
                phi: euler_phi(&f),
                s2: schemmel_s2(&f),
                omega: omega(&f),
                squarefree: is_squarefree(&f),
            })?;
            Ok(0)
        }
        Command::Check { n } => {
            if *n < 2 {
                return Err(Failure::Usage("check needs n >= 2".into()));
            }
            let record = ClassificationRecord::for_n(*n)?;
            out.record(&record)?;
            Ok(if record.is_witness() { EXIT_WITNESS } else { 0 })
        }
        Command::Bound { k } => {
            let budget = Budget::from_env();
            let (high, low) = upper_bound_exponents(*k, &budget)?;
            let value = deaconescu_upper_bound_with_budget(*k, &budget)?;
            out.bound(&BoundRow {
                k: *k,
                high_exponent: high,
                low_exponent: low,
                value: value.to_string(),
            })?;
            Ok(0)
        }
        Command::Verify { suite, limit, seed } => {
            let mut first_failure = None;
            for &s in &suite.0 {
                for check in run_suite(s, *limit, *seed)? {
                    if !check.passed && first_failure.is_none() {
                        first_failure = Some(format!("{}/{}", check.suite, check.check));
                    }
                    out.check(&check)?;
                }
            }
            out.flush()?;
            match first_failure {
                None => Ok(0),
                Some(name) => {
                    eprintln!("first failing check: {name}");
                    Ok(EXIT_VERIFY_FAILED)
                }
            }
        }
        Command::Scan {
            limit,
            emit_records,
            run,
        } => {
            let mut config = base_config(cli)?;
            config.mode = Mode::Exhaustive;
            if let Some(limit) = limit {
                config.limit = *limit;
            }
            apply_run_args(&mut config, run);
            drive(
                &mut out,
                &config,
                run.stop_after_units,
                *emit_records,
                false,
            )
        }
        Command::Search {
            k,
            k_min,
            k_max,
            pool,
            n_cap,
            m,
            run,
        } => {
            let mut config = base_config(cli)?;
            config.mode = Mode::Dfs;
            if let Some(k) = k {
                config.k_range = (*k, *k);
            }
            if let Some(lo) = k_min {
                config.k_range.0 = *lo;
            }
            if let Some(hi) = k_max {
                config.k_range.1 = *hi;
            }
            if let Some(pool) = pool {
                config.prime_pool_limit = *pool;
            }
            if let Some(cap) = n_cap {
                config.n_cap = parse_nat(cap)?;
            }
            if let Some(m) = m {
                config.m_candidates = m.parse::<MCandidates>()?;
            }
            apply_run_args(&mut config, run);
            drive(&mut out, &config, run.stop_after_units, false, false)
        }
        Command::Resume {
            checkpoint,
            checkpoint_every,
            stop_after_units,
        } => {
            let saved = load_checkpoint(checkpoint)?;
            // The checkpoint carries its own settings; a --config file must
            // describe the same search.
            let mut config = match &cli.config {
                Some(_) => {
                    let mut c = base_config(cli)?;
                    c.mode = saved.mode;
                    c.checkpoint_path = Some(checkpoint.clone());
                    c
                }
                None => saved.resume_config(checkpoint, cli.workers),
            };
            if let Some(every) = checkpoint_every {
                config.checkpoint_every = *every;
            }
            drive(&mut out, &config, *stop_after_units, false, true)
        }
    }
}

/// Defaults, overlaid by the `--config` file and `--workers`.
fn base_config(cli: &Cli) -> Result<SearchConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str::<SearchConfig>(&text)
                .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => SearchConfig::default(),
    };
    if let Some(workers) = cli.workers {
        config.worker_count = workers;
    }
    Ok(config)
}

fn apply_run_args(config: &mut SearchConfig, run: &RunArgs) {
    if let Some(path) = &run.checkpoint {
        config.checkpoint_path = Some(path.clone());
    }
    if let Some(every) = run.checkpoint_every {
        config.checkpoint_every = every;
    }
}

fn load_checkpoint(path: &Path) -> Result<Checkpoint, Failure> {
    Checkpoint::load(path).map_err(|e| match e {
        Error::CheckpointMismatch { .. } => Failure::Core(e),
        other => Failure::Checkpoint(format!(
            "cannot load checkpoint {}: {other}",
            path.display()
        )),
    })
}

/// Runs (or continues) the configured search and prints the total report.
fn drive(
    out: &mut Emitter,
    config: &SearchConfig,
    stop_after_units: Option<u64>,
    emit_records: bool,
    must_resume: bool,
) -> Result<u8, Failure> {
    config.validate()?;
    let existing = match &config.checkpoint_path {
        Some(path) if must_resume || path.exists() => Some(load_checkpoint(path)?),
        _ => None,
    };

    let mut sink_out = std::io::stdout().lock();
    let mut sink = |record: &ClassificationRecord| -> deaconescu::Result<()> {
        serde_json::to_writer(&mut sink_out, record)?;
        sink_out.write_all(b"\n")?;
        Ok(())
    };
    let options = RunOptions {
        budget: Budget::from_env(),
        stop_after_units,
        record_sink: if emit_records { Some(&mut sink) } else { None },
    };

    let total = match existing {
        Some(checkpoint) => {
            let done = search::resume_with(&checkpoint, config, options)?;
            checkpoint.partial_counters.merge(done)
        }
        None => search::run_with(config, None, SearchReport::default(), options)?,
    };
    out.report(&total)?;
    Ok(if total.has_witness() { EXIT_WITNESS } else { 0 })
}
