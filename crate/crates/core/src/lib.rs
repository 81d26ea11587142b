//! Certifying connectivity of the Markoff graph modulo a prime.
//!
//! The pipeline factors `p - 1` and `p + 1`, finds the order bounds beyond
//! which coordinates are known to lie in the giant component, enumerates the
//! remaining small-order coordinates through the factor tries of `p +- 1`,
//! and counts the triples it cannot certify. Fewer than `4p` such triples
//! proves the graph connected. [`oracle`] recomputes everything by brute
//! force for small primes.

pub mod arith;
pub mod breakpoints;
pub mod decomp;
pub mod factor;
pub mod oracle;
pub mod sieve;

pub use arith::{ArithError, Field, QuadExt, Roots};
pub use breakpoints::{Breakpoints, MiddleGameConfig, Variant};
pub use decomp::{CoordinateClass, GroupBasis, GroupVector, Side};
pub use factor::{factorize, primes_between, FactorTrie, Factorization};
pub use sieve::{run_prime, Config, ConnectivityReport, PrimeContext, Strategy, Verdict};
