//! Exact integer arithmetic: primes, factorization, totients, and the
//! brute-force exceptional-unit oracle.

mod factor;
mod primes;
mod sieve;
mod totient;
mod units;

pub use factor::{factorize, Factorization, PrimePower};
pub use primes::{
    first_odd_primes, is_prime, sieve_primes, sieve_primes_with_budget, small_primes,
    TRIAL_DIVISION_BOUND,
};
pub use sieve::{TotientSegment, TotientTable};
pub use totient::{euler_phi, is_squarefree, omega, schemmel_s2};
pub use units::{
    count_exceptional, count_exceptional_with_budget, exceptional_units,
    exceptional_units_with_budget, ExceptionalUnitSet,
};
