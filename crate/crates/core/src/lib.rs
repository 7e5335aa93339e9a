//! Schemmel's totient `S2`, exceptional units, and a search engine for
//! composite `n` with `S2(n) | phi(n) - 1`.
//!
//! The crate is layered:
//!
//! * [`arith`]: primes, 64-bit factorization, `phi`, `S2`, `omega`, the
//!   brute-force exceptional-unit counter and whole-range totient sieves.
//! * [`props`]: Lehmer and Deaconescu predicates, the multiplier `M` with
//!   `M * S2(n) = phi(n) - 1`, and the structural necessary-condition filter.
//! * [`bounds`]: exact-rational and big-integer checks of the ratio
//!   products, the `omega = 2` and mod-3 eliminations, Nielsen's
//!   inequality, the `2^(2^K + K) - 2^(2^(K-1) + K)` upper bound and the
//!   polynomial residue used in the finiteness argument.
//! * [`search`]: exhaustive sieve scans and a pruned depth-first search over
//!   odd prime tuples, with mergeable reports and resumable checkpoints.
//! * [`verify`]: named check suites that drive the layers above.

pub mod arith;
pub mod bounds;
mod error;
pub mod props;
pub mod search;
pub mod verify;

pub use error::{Error, Result};

/// Resource caps shared by the operations that can blow up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on bytes a single sieve allocation may use.
    pub memory_bytes: u64,
    /// Largest modulus the exceptional-unit brute force will scan.
    pub brute_force_limit: u64,
    /// Largest `r` for which `2^r`-sized exponents are materialized.
    pub max_exponent_log2: u32,
}

impl Budget {
    pub const DEFAULT_MEMORY_BYTES: u64 = 1 << 30;
    pub const DEFAULT_BRUTE_FORCE_LIMIT: u64 = 1_000_000;
    pub const DEFAULT_MAX_EXPONENT_LOG2: u32 = 20;

    /// Environment variable that may override [`Budget::memory_bytes`].
    pub const MEMORY_ENV: &'static str = "DEACONESCU_MEMORY_BUDGET";

    /// Default budget with the memory cap taken from
    /// [`Budget::MEMORY_ENV`] when it is set to a valid byte count.
    pub fn from_env() -> Self {
        let mut budget = Budget::default();
        if let Some(bytes) = std::env::var(Self::MEMORY_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            budget.memory_bytes = bytes;
        }
        budget
    }

    pub(crate) fn check_memory(&self, what: &'static str, bytes: u128) -> Result<()> {
        if bytes > self.memory_bytes as u128 {
            return Err(Error::BudgetExceeded {
                what,
                requested: bytes,
                limit: self.memory_bytes as u128,
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            memory_bytes: Self::DEFAULT_MEMORY_BYTES,
            brute_force_limit: Self::DEFAULT_BRUTE_FORCE_LIMIT,
            max_exponent_log2: Self::DEFAULT_MAX_EXPONENT_LOG2,
        }
    }
}
