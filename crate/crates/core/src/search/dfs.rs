//! Depth-first enumeration of odd prime tuples `p1 < ... < pK` with three
//! cuts, each justified by a necessary condition on a solution of
//! `M * S2(n) = phi(n) - 1`:
//!
//! * ratio: `phi(n)/S2(n) = M + 1/S2(n)` lies in `(M, M + 1]`. Each added
//!   prime multiplies the ratio by `(p - 1)/(p - 2) > 1`, a factor that
//!   shrinks as `p` grows, so the largest reachable ratio comes from the
//!   next consecutive pool primes. A prefix is dropped when no candidate
//!   `M` fits between the current ratio and that maximum.
//! * bound: the smallest completion of the prefix must stay below
//!   `min(n_cap, 2^(2^K + K) - 2^(2^(K-1) + K))`.
//! * mod 3: with `3 | n` and `M = 3` the equation reduces to
//!   `prod (p - 1) = 2 (mod 3)` over primes `p >= 5`, which never holds
//!   because each `p - 1` is `0` or `1 (mod 3)`. `M = 3` is removed from
//!   the candidates of every tuple starting with 3.
//!
//! Both the ratio and the bound cut are monotone in the next prime, so a
//! failing child also rules out all of its larger siblings.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::config::{MCandidates, SearchConfig};
use super::report::{Cursor, SearchReport};
use crate::bounds::deaconescu_upper_bound_with_budget;
use crate::props::ClassificationRecord;
use crate::{Budget, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PruneReason {
    Ratio,
    Bound,
    Mod3,
}

/// Hooks into the traversal, for tests and diagnostics.
pub trait DfsObserver {
    /// An interior tuple that survived all cuts.
    fn node(&mut self, _k: u32, _tuple: &[u64]) {}

    /// `prefix + [next]` was cut; with `siblings_too` the same holds for
    /// `prefix + [q]` for every larger pool prime `q`.
    fn pruned(
        &mut self,
        _k: u32,
        _prefix: &[u64],
        _next: u64,
        _siblings_too: bool,
        _reason: PruneReason,
    ) {
    }

    /// A complete tuple and its evaluation.
    fn leaf(&mut self, _k: u32, _tuple: &[u64], _record: &ClassificationRecord) {}
}

/// Observer that ignores everything.
pub struct Quiet;

impl DfsObserver for Quiet {}

/// Products of `t` consecutive pool primes starting at each index.
struct Extensions {
    product: Vec<Vec<Option<u128>>>,
    ratio_num: Vec<Vec<BigUint>>,
    ratio_den: Vec<Vec<BigUint>>,
}

impl Extensions {
    fn build(pool: &[u64], max_t: usize) -> Self {
        let len = pool.len();
        let mut product = vec![vec![Some(1u128); len + 1]];
        let mut ratio_num = vec![vec![BigUint::one(); len + 1]];
        let mut ratio_den = vec![vec![BigUint::one(); len + 1]];
        for t in 1..=max_t.min(len) {
            let prev = t - 1;
            let count = len + 1 - t;
            let mut prod_row = Vec::with_capacity(count);
            let mut num_row = Vec::with_capacity(count);
            let mut den_row = Vec::with_capacity(count);
            for s in 0..count {
                let p = pool[s + prev];
                prod_row.push(product[prev][s].and_then(|v| v.checked_mul(p as u128)));
                num_row.push(&ratio_num[prev][s] * (p - 1));
                den_row.push(&ratio_den[prev][s] * (p - 2));
            }
            product.push(prod_row);
            ratio_num.push(num_row);
            ratio_den.push(den_row);
        }
        Extensions {
            product,
            ratio_num,
            ratio_den,
        }
    }
}

enum Flow {
    Continue,
    /// Skip the remaining siblings.
    Break,
}

/// Everything shared by the workers of one tuple search.
pub(crate) struct DfsPlan {
    pool: Vec<u64>,
    candidates: MCandidates,
    k_range: (u32, u32),
    /// Effective exclusive product cap, indexed by `K - k_range.0`.
    caps: Vec<u128>,
    ext: Extensions,
}

impl DfsPlan {
    pub(crate) fn new(config: &SearchConfig, budget: &Budget) -> Result<Self> {
        let primes = crate::arith::sieve_primes_with_budget(config.prime_pool_limit, budget)?;
        let pool: Vec<u64> = primes.into_iter().skip(1).collect();
        let (k_lo, k_hi) = config.k_range;
        // Rough size of the extension tables: three entries of ~32 bytes each.
        budget.check_memory(
            "tuple search tables",
            pool.len() as u128 * k_hi as u128 * 96,
        )?;
        let mut caps = Vec::new();
        for k in k_lo..=k_hi {
            let cap = deaconescu_upper_bound_with_budget(k, budget)?.min(config.n_cap.clone());
            caps.push(cap.to_u128().unwrap_or(u128::MAX));
        }
        let ext = Extensions::build(&pool, k_hi as usize - 1);
        Ok(DfsPlan {
            pool,
            candidates: config.m_candidates.clone(),
            k_range: config.k_range,
            caps,
            ext,
        })
    }

    pub(crate) fn pool(&self) -> &[u64] {
        &self.pool
    }

    pub(crate) fn first_cursor(&self) -> Cursor {
        Cursor::Dfs {
            k: self.k_range.0,
            first_index: 0,
        }
    }

    pub(crate) fn end_cursor(&self) -> Cursor {
        Cursor::Dfs {
            k: self.k_range.1 + 1,
            first_index: 0,
        }
    }

    pub(crate) fn next_cursor(&self, cursor: Cursor) -> Cursor {
        match cursor {
            Cursor::Dfs { k, first_index } if first_index + 1 < self.pool.len() as u64 => {
                Cursor::Dfs {
                    k,
                    first_index: first_index + 1,
                }
            }
            Cursor::Dfs { k, .. } => Cursor::Dfs {
                k: k + 1,
                first_index: 0,
            },
            other => other,
        }
    }

    /// Searches every tuple with `K = k` whose smallest prime is
    /// `pool[first_index]`.
    pub(crate) fn explore_unit<O: DfsObserver>(
        &self,
        k: u32,
        first_index: usize,
        report: &mut SearchReport,
        observer: &mut O,
    ) {
        let mut walk = Walk {
            plan: self,
            k,
            cap: self.caps[(k - self.k_range.0) as usize],
            tuple: Vec::with_capacity(k as usize),
            report,
            observer,
        };
        walk.try_child(first_index, 1, 1, 1, false);
    }
}

struct Walk<'a, O> {
    plan: &'a DfsPlan,
    k: u32,
    cap: u128,
    tuple: Vec<u64>,
    report: &'a mut SearchReport,
    observer: &'a mut O,
}

impl<O: DfsObserver> Walk<'_, O> {
    /// Extends the current tuple by `pool[idx]`; `prod`, `phi`, `s2` are
    /// `prod p`, `prod (p - 1)`, `prod (p - 2)` over the current tuple.
    fn try_child(&mut self, idx: usize, prod: u128, phi: u128, s2: u128, has3: bool) -> Flow {
        let pool = &self.plan.pool;
        let remaining = self.k as usize - self.tuple.len() - 1;
        if idx + remaining >= pool.len() {
            // The pool cannot supply enough larger primes.
            return Flow::Break;
        }
        let p = pool[idx];

        let new_prod = prod.checked_mul(p as u128);
        let smallest_completion = new_prod
            .zip(self.plan.ext.product[remaining][idx + 1])
            .and_then(|(a, b)| a.checked_mul(b));
        if smallest_completion.is_none_or(|v| v >= self.cap) {
            self.report.pruned_bound += 1;
            self.observer
                .pruned(self.k, &self.tuple, p, true, PruneReason::Bound);
            return Flow::Break;
        }
        let new_prod = new_prod.expect("checked above");
        let phi = phi * (p as u128 - 1);
        let s2 = s2 * (p as u128 - 2);
        let has3 = has3 || p == 3;

        if let Some((reason, siblings_too)) = self.ratio_cut(phi, s2, remaining, idx + 1, has3) {
            match reason {
                PruneReason::Mod3 => self.report.pruned_mod3 += 1,
                _ => self.report.pruned_ratio += 1,
            }
            self.observer
                .pruned(self.k, &self.tuple, p, siblings_too, reason);
            return if siblings_too {
                Flow::Break
            } else {
                Flow::Continue
            };
        }

        self.tuple.push(p);
        if remaining == 0 {
            let record = ClassificationRecord::from_values(new_prod, phi, s2, false);
            self.report.tally(&record);
            self.observer.leaf(self.k, &self.tuple, &record);
        } else {
            self.observer.node(self.k, &self.tuple);
            for next in idx + 1..pool.len() {
                if let Flow::Break = self.try_child(next, new_prod, phi, s2, has3) {
                    break;
                }
            }
        }
        self.tuple.pop();
        Flow::Continue
    }

    /// `None` when some candidate `M` is still reachable.
    fn ratio_cut(
        &self,
        phi: u128,
        s2: u128,
        remaining: usize,
        ext_start: usize,
        has3: bool,
    ) -> Option<(PruneReason, bool)> {
        let candidates = &self.plan.candidates;
        let excluded = has3.then_some(3);
        // The final ratio is at most M + 1 and never below the current one.
        let threshold = u64::try_from(phi.div_ceil(s2) - 1).unwrap_or(u64::MAX);
        let below_max = |m: u64| self.below_max_ratio(m, phi, s2, remaining, ext_start);

        if candidates
            .first_at_least(threshold, excluded)
            .is_some_and(below_max)
        {
            return None;
        }
        let reason = if excluded.is_some()
            && candidates
                .first_at_least(threshold, None)
                .is_some_and(below_max)
        {
            PruneReason::Mod3
        } else {
            PruneReason::Ratio
        };
        // Larger siblings only lower the reachable maximum.
        let siblings_too = !candidates
            .first_at_least(0, excluded)
            .is_some_and(below_max);
        Some((reason, siblings_too))
    }

    /// `m < (phi / s2) * prod over the next `remaining` pool primes of (q-1)/(q-2)`.
    fn below_max_ratio(
        &self,
        m: u64,
        phi: u128,
        s2: u128,
        remaining: usize,
        ext_start: usize,
    ) -> bool {
        if remaining == 0 {
            return (m as u128).checked_mul(s2).is_some_and(|v| v < phi);
        }
        let ext = &self.plan.ext;
        let lhs = BigUint::from(m) * s2 * &ext.ratio_den[remaining][ext_start];
        let rhs = BigUint::from(phi) * &ext.ratio_num[remaining][ext_start];
        lhs < rhs
    }
}
