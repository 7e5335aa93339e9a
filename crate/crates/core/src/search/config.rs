use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_traits::{Num, One};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::bounds::BigNat;
use crate::{Budget, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every `n` in `2..=limit`.
    Exhaustive,
    /// Odd squarefree `n` built from prime tuples, with pruning.
    Dfs,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Dfs => "dfs",
        })
    }
}

/// Multipliers `M` the tuple search must not miss.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MCandidates {
    /// Every odd `M >= 3`.
    All,
    Explicit(BTreeSet<u64>),
}

impl MCandidates {
    pub fn explicit<I: IntoIterator<Item = u64>>(values: I) -> Self {
        MCandidates::Explicit(values.into_iter().collect())
    }

    /// Smallest candidate `>= at_least`, skipping `excluded`.
    pub fn first_at_least(&self, at_least: u64, excluded: Option<u64>) -> Option<u64> {
        match self {
            MCandidates::All => {
                let mut m = at_least.max(3);
                if m % 2 == 0 {
                    m += 1;
                }
                if Some(m) == excluded {
                    m += 2;
                }
                Some(m)
            }
            MCandidates::Explicit(set) => set
                .range(at_least..)
                .copied()
                .find(|&m| Some(m) != excluded),
        }
    }

    pub fn contains(&self, m: u64) -> bool {
        match self {
            MCandidates::All => m >= 3 && m % 2 == 1,
            MCandidates::Explicit(set) => set.contains(&m),
        }
    }

    fn validate(&self) -> Result<()> {
        if let MCandidates::Explicit(set) = self {
            if set.is_empty() {
                return Err(Error::invalid("m_candidates must not be empty"));
            }
            if let Some(bad) = set.iter().find(|&&m| m < 3 || m % 2 == 0) {
                return Err(Error::invalid(format!(
                    "multiplier candidates must be odd and >= 3, got {bad}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for MCandidates {
    fn default() -> Self {
        MCandidates::explicit([3, 5, 7])
    }
}

impl FromStr for MCandidates {
    type Err = Error;

    /// `all` or a comma-separated list such as `3,5,7`.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(MCandidates::All);
        }
        let set = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::invalid(format!("bad multiplier {part:?}")))
            })
            .collect::<Result<BTreeSet<u64>>>()?;
        let candidates = MCandidates::Explicit(set);
        candidates.validate()?;
        Ok(candidates)
    }
}

impl Serialize for MCandidates {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MCandidates::All => serializer.serialize_str("all"),
            MCandidates::Explicit(set) => set.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for MCandidates {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            List(BTreeSet<u64>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::List(set) => Ok(MCandidates::Explicit(set)),
        }
    }
}

/// Parses a natural number written as `123`, `1e18`, `10^18` or `2^64`.
pub fn parse_nat(text: &str) -> Result<BigNat> {
    let t = text.trim().replace('_', "");
    let bad = || Error::invalid(format!("not a natural number: {text:?}"));
    let pow = |base: &str, exp: &str| -> Result<BigNat> {
        let base = BigNat::from_str_radix(base, 10).map_err(|_| bad())?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        if exp > 1 << 16 {
            return Err(bad());
        }
        Ok(num_traits::pow(base, exp as usize))
    };
    if let Some((mantissa, exp)) = t.split_once(['e', 'E']) {
        return Ok(BigNat::from_str_radix(mantissa, 10).map_err(|_| bad())? * pow("10", exp)?);
    }
    if let Some((base, exp)) = t.split_once('^') {
        return pow(base, exp);
    }
    BigNat::from_str_radix(&t, 10).map_err(|_| bad())
}

mod nat_text {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigNat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigNat, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(BigNat::from(v)),
            Raw::Text(t) => parse_nat(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Everything a search run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub mode: Mode,
    /// Largest `n` of an exhaustive scan.
    pub limit: u64,
    /// Inclusive range of prime-factor counts for the tuple search.
    pub k_range: (u32, u32),
    pub m_candidates: MCandidates,
    /// Exclusive cap on tuple products; tightened per `K` to the
    /// theoretical upper bound.
    #[serde(with = "nat_text")]
    pub n_cap: BigNat,
    /// Largest prime the tuple search draws from.
    pub prime_pool_limit: u64,
    pub worker_count: usize,
    pub checkpoint_path: Option<PathBuf>,
    /// Minimum number of newly examined values between checkpoint writes.
    pub checkpoint_every: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::Exhaustive,
            limit: 10_000_000,
            k_range: (7, 7),
            m_candidates: MCandidates::default(),
            n_cap: BigNat::from(10u32).pow(18),
            prime_pool_limit: 100_000,
            worker_count: 1,
            checkpoint_path: None,
            checkpoint_every: 1_000_000,
        }
    }
}

impl SearchConfig {
    pub fn exhaustive(limit: u64) -> Self {
        SearchConfig {
            mode: Mode::Exhaustive,
            limit,
            ..Default::default()
        }
    }

    pub fn dfs(k_range: (u32, u32), m_candidates: MCandidates, prime_pool_limit: u64) -> Self {
        SearchConfig {
            mode: Mode::Dfs,
            k_range,
            m_candidates,
            prime_pool_limit,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.worker_count == 0 {
            return Err(Error::invalid("worker_count must be at least 1"));
        }
        match self.mode {
            Mode::Exhaustive => {
                if self.limit < 2 {
                    return Err(Error::invalid("limit must be at least 2"));
                }
                if self.limit == u64::MAX {
                    return Err(Error::invalid("limit must be below 2^64 - 1"));
                }
            }
            Mode::Dfs => {
                let (lo, hi) = self.k_range;
                if lo < 2 || lo > hi {
                    return Err(Error::invalid(format!(
                        "bad k_range ({lo}, {hi}); need 2 <= lo <= hi"
                    )));
                }
                if hi > Budget::default().max_exponent_log2 {
                    return Err(Error::BudgetExceeded {
                        what: "k_range exponent",
                        requested: hi as u128,
                        limit: Budget::default().max_exponent_log2 as u128,
                    });
                }
                self.m_candidates.validate()?;
                if self.prime_pool_limit < 3 {
                    return Err(Error::invalid("prime_pool_limit must be at least 3"));
                }
                if self.n_cap < BigNat::one() {
                    return Err(Error::invalid("n_cap must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Canonical text of the fields that determine the search result.
    /// Worker count and checkpoint settings are excluded.
    pub fn canonical(&self) -> String {
        match self.mode {
            Mode::Exhaustive => format!("mode=exhaustive;limit={}", self.limit),
            Mode::Dfs => {
                let m = match &self.m_candidates {
                    MCandidates::All => "all".to_string(),
                    MCandidates::Explicit(set) => {
                        set.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
                    }
                };
                format!(
                    "mode=dfs;k={}..{};m={};n_cap={};pool={}",
                    self.k_range.0, self.k_range.1, m, self.n_cap, self.prime_pool_limit
                )
            }
        }
    }

    /// SHA-256 of [`SearchConfig::canonical`], hex encoded.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
