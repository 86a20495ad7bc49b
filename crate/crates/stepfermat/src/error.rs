use crate::Natural;

/// Errors reported by the library.
///
/// Every precondition violation maps to a dedicated variant so callers (and
/// the CLI) can distinguish bad input from structural refusals such as an
/// inadmissible certification limit.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Input string is not a canonical decimal natural number.
    #[error("invalid decimal natural `{0}`: {1}")]
    InvalidDecimal(String, &'static str),

    /// The operation requires an odd input.
    #[error("{0} is even; this search only applies to odd numbers")]
    EvenInput(Natural),

    /// The operation requires `n >= 3` (or `n >= 1` where documented).
    #[error("{0} is below the smallest supported input for this operation")]
    TooSmall(Natural),

    /// The operation is undefined on perfect squares.
    #[error("{0} is a perfect square; take the root first")]
    PerfectSquare(Natural),

    /// Step factors must be 1 or even and nonzero.
    #[error("invalid step factor {0}: must be 1 or a positive even number")]
    InvalidStep(u64),

    /// A bounded search needs a positive probe budget.
    #[error("bounded search needs a probe budget of at least 1")]
    ZeroBound,

    /// Predicted-iteration formulas need the totient bound to dominate the
    /// pair totient; otherwise the search starts beyond the pair.
    #[error("totient bound {bound} is below the pair totient {pair_phi}; the search starts past this pair")]
    BoundBelowPairPhi { bound: Natural, pair_phi: Natural },

    /// The pair is not on the probe grid for this step factor.
    #[error("step {step} skips this pair: offset {offset} is not a multiple of {grid}")]
    PairOffGrid {
        step: u64,
        offset: Natural,
        grid: Natural,
    },

    /// The two members of a pair must multiply to the number in question.
    #[error("pair ({a}, {b}) is not a divisor pair of {n}")]
    NotAPairOf { a: Natural, b: Natural, n: Natural },

    /// Factor pairs consist of odd members with `b >= 1`.
    #[error("invalid factor pair ({a}, {b}): members must be odd and at least 1")]
    InvalidPair { a: Natural, b: Natural },

    /// A claimed prime failed the primality check.
    #[error("{0} is not prime")]
    NotPrime(Natural),

    /// Prime powers need exponent >= 1.
    #[error("prime power needs exponent >= 1")]
    ZeroExponent,

    /// Factor lists for the totient must not repeat a prime.
    #[error("duplicate prime {0} in factor list")]
    DuplicatePrime(Natural),

    /// The factor list does not multiply back to the stated number.
    #[error("factors multiply to {product}, not {n}")]
    FactorProductMismatch { product: Natural, n: Natural },

    /// `sum_from_pair_phi` needs `pair_phi <= n`.
    #[error("pair totient {pair_phi} exceeds {n}")]
    PairPhiTooLarge { pair_phi: Natural, n: Natural },

    /// Limit formulas need a start probe at or above the square root.
    #[error("start probe x1 = {x1} has x1^2 < n = {n}")]
    StartBelowRoot { x1: Natural, n: Natural },

    /// The certification limit excludes no iterations for this `n`.
    #[error("b_L = {b_limit} is inadmissible for this n: largest admissible value is {max}")]
    InadmissibleBLimit { b_limit: Natural, max: Natural },

    /// The screening receipt does not cover every odd prime below `b_L`.
    #[error("trial division up to {horizon} does not cover all odd primes below b_L = {b_limit}")]
    InsufficientScreening { horizon: Natural, b_limit: Natural },

    /// The screening receipt belongs to a different number.
    #[error("screening receipt is for {receipt_n}, not {n}")]
    ReceiptMismatch { receipt_n: Natural, n: Natural },

    /// The screening receipt already contains a divisor.
    #[error("screening already found divisor {0}; nothing to certify")]
    AlreadyFactored(Natural),

    /// A probe budget is too large to execute.
    #[error("required probe budget {0} exceeds the executable range")]
    BoundTooLarge(Natural),

    /// Iteration indices are counted from 1.
    #[error("iteration index must be at least 1")]
    ZeroIteration,

    /// Sieve limits above the budget are refused.
    #[error("sieve limit {0} exceeds the supported budget")]
    SieveBudget(u64),

    /// A heuristic (s > 2) search ran out without certainty on a composite.
    #[error("step {step} search exhausted on {n} without a pair; rerun with step 1 or 2")]
    HeuristicExhausted { n: Natural, step: u64 },

    /// Internal consistency re-verification failed. Indicates a bug.
    #[error("certification self-check failed for {0}; please report")]
    CertificationCheckFailed(Natural),
}
