//! Difference-of-squares factorization toolkit.
//!
//! Everything here revolves around Fermat's identity: an odd `n` with a
//! divisor pair `a * b = n` (`a >= b`) can be written `n = x^2 - y^2` with
//! `x = (a + b) / 2` and `y = (a - b) / 2`. Probing candidate `x` values and
//! testing whether `x^2 - n` is a perfect square therefore enumerates divisor
//! pairs, ending at the trivial pair `(n, 1)` at `x = (n + 1) / 2`.
//!
//! The crate provides:
//!
//! - [`fermat`]: the classical search, starting at `ceil(sqrt(n))` and
//!   stepping `x` by 1 (by 2 once the first pair is known), with incremental
//!   residue updates.
//! - [`stepped`]: a faster variant that seeds the search from a totient
//!   bound. It starts at `x1 = (n - phi_bound + 1) / 2` and steps by an even
//!   step factor `s`; for `s <= 2` it is exhaustive, for `s > 2` it is a
//!   heuristic that may skip pairs but still terminates.
//! - [`limit`]: bounded-search primality certification. If trial division has
//!   excluded all odd primes below a prime `b_L`, a pair with `b >= b_L` can
//!   only appear within a computable number of probes `i_L`; running exactly
//!   that many probes without a hit proves primality.
//! - [`totient`]: Euler's totient from a known factorization and the pair
//!   totient `(a - 1)(b - 1)` the stepped search is built on.
//! - [`screening`]: trial division, Miller-Rabin, and a segmented sieve.
//! - [`pipeline`]: recursive factorization and algorithm comparison built
//!   from the pieces above.
//!
//! All values are arbitrary-precision ([`Natural`] is an alias for
//! [`num_bigint::BigUint`]); nothing in the result path uses floating point.
//!
//! ```
//! use stepfermat::{fermat, stepped, Natural};
//!
//! let n = Natural::from(70399u32);
//! let outcome = stepped::search(&n, &stepped::SearchConfig::first_pair(2).unwrap()).unwrap();
//! let hit = &outcome.found[0];
//! assert_eq!(hit.pair.a(), &Natural::from(623u32));
//! assert_eq!(hit.pair.b(), &Natural::from(113u32));
//! assert_eq!(hit.iteration, 52);
//!
//! // The classical search finds the same pair, twice as slowly.
//! match fermat::first_pair(&n).unwrap() {
//!     fermat::FirstPairOutcome::Pair { pair, iteration } => {
//!         assert_eq!((pair.a().clone(), pair.b().clone()), (623u32.into(), 113u32.into()));
//!         assert_eq!(iteration, 103);
//!     }
//!     fermat::FirstPairOutcome::PrimeIndication { .. } => unreachable!(),
//! }
//! ```

pub mod arith;
mod error;
pub mod fermat;
pub mod limit;
pub mod pipeline;
pub mod screening;
mod serde_decimal;
pub mod stepped;
pub mod totient;

pub use error::Error;

/// Nonnegative arbitrary-precision integer used throughout the crate.
pub type Natural = num_bigint::BigUint;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

// Keep the book's code snippets compiling and passing: each chapter is
// attached here as a doc-test-only module.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pairs-and-totients.md")]
    mod pairs_and_totients {}
    #[doc = include_str!("../../../book/src/classical-search.md")]
    mod classical_search {}
    #[doc = include_str!("../../../book/src/stepped-search.md")]
    mod stepped_search {}
    #[doc = include_str!("../../../book/src/limit-certificates.md")]
    mod limit_certificates {}
    #[doc = include_str!("../../../book/src/pipeline-and-cli.md")]
    mod pipeline_and_cli {}
}
