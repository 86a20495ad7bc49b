//! Limit iterations and primality certificates.
//!
//! A step-2 search from `x1` proves primality only at the trivial pair,
//! roughly `n / 4` probes out. But if trial division has already ruled out
//! every odd prime below some bound `b_L`, any surviving divisor pair must
//! have its small member `>= b_L`, and all such pairs have midpoints within
//! a *much* shorter prefix of the walk. The limit iteration `i_L` is the
//! length of that prefix; running it to exhaustion certifies primality.
//!
//! `i_L` has two closed forms, computed and cross-checked here:
//!
//! ```text
//! A: ((a_L + b_L) / 2 - x1) / s + 1      a_L = largest odd <= n / b_L
//! B: (n + b_L^2 - 2 b_L x1) / (2 b_L s) + 1
//! ```
//!
//! Not every `b_L` works for every `n`: the exclusion only bites when
//! `(x1 - b_L)^2 >= x1^2 - n`, i.e. when `b_L` is at most the gap between
//! `x1` and the residue root. [`admits_b_limit`] decides that exactly; for
//! `b_L = 3` it excludes precisely the odd primes up to 29, and every odd
//! non-square number from 31 up is admissible.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::screening::{self, ScreeningReceipt};
use crate::stepped::{self, SearchConfig, Terminal};
use crate::totient::FactorPair;
use crate::{Error, Natural, Result};

/// Certification always walks with this step factor: exhaustive, and twice
/// as fast as the classical step.
pub const CERT_STEP: u64 = 2;

/// Everything a certificate's formulas depend on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitParams {
    #[serde(with = "crate::serde_decimal::natural")]
    pub n: Natural,
    #[serde(with = "crate::serde_decimal::natural")]
    pub b_limit: Natural,
    /// Trial division covered every odd prime up to this bound.
    pub trial_horizon: u64,
    /// The limit iteration count `i_L`.
    #[serde(with = "crate::serde_decimal::natural")]
    pub iterations: Natural,
    /// The final probe `x_L = x1 + s (i_L - 1)`.
    #[serde(with = "crate::serde_decimal::natural")]
    pub x_limit: Natural,
    /// Largest odd number `<= n / b_limit`.
    #[serde(with = "crate::serde_decimal::natural")]
    pub a_limit: Natural,
}

/// Proof that `n` is prime: an executed, exhausted limit search plus the
/// parameters to re-derive its bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimalityCertificate {
    pub params: LimitParams,
    /// Probes actually executed; equals `params.iterations`.
    pub iterations_executed: u64,
}

/// Result of [`certify`]: either a pair (composite) or a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CertifyOutcome {
    /// The limit search hit a divisor pair before the bound.
    Composite { pair: FactorPair, iteration: u64 },
    /// The limit search exhausted: `n` is prime.
    Certificate(PrimalityCertificate),
}

fn validate_b_limit(b: &Natural) -> Result<()> {
    if b.is_even() {
        return Err(Error::EvenInput(b.clone()));
    }
    if *b < Natural::from(3u32) {
        return Err(Error::TooSmall(b.clone()));
    }
    Ok(())
}

fn validate_start(n: &Natural, x1: &Natural) -> Result<()> {
    if &(x1 * x1) < n {
        return Err(Error::StartBelowRoot {
            x1: x1.clone(),
            n: n.clone(),
        });
    }
    Ok(())
}

/// Largest odd number not exceeding `n / b`: the `a`-member of the
/// hypothetical pair at the exclusion boundary.
///
/// ```
/// use stepfermat::{limit, Natural};
/// let a = limit::largest_odd_quotient(&Natural::from(70399u32), &Natural::from(3u32));
/// assert_eq!(a.unwrap(), Natural::from(23465u32));
/// ```
pub fn largest_odd_quotient(n: &Natural, b: &Natural) -> Result<Natural> {
    validate_b_limit(b)?;
    let mut q = n / b;
    if num_traits::Zero::is_zero(&q) {
        return Err(Error::TooSmall(n.clone()));
    }
    if q.is_even() {
        q -= 1u32;
    }
    Ok(q)
}

/// Does excluding small members below `b` actually bound the search from
/// `x1`? True iff `x1 >= b` and `(x1 - b)^2 >= x1^2 - n`, evaluated exactly.
pub fn admits_b_limit(n: &Natural, x1: &Natural, b: &Natural) -> Result<bool> {
    validate_b_limit(b)?;
    validate_start(n, x1)?;
    if x1 < b {
        return Ok(false);
    }
    let gap = x1 - b;
    Ok(&gap * &gap >= x1 * x1 - n)
}

/// The largest value any admissible `b` may take for this `n` and `x1`:
/// `x1 - ceil(sqrt(x1^2 - n))`.
pub fn b_limit_floor(n: &Natural, x1: &Natural) -> Result<Natural> {
    validate_start(n, x1)?;
    let d = x1 * x1 - n;
    let root = match arith::exact_sqrt(&d) {
        Some(r) => r,
        None => arith::floor_sqrt(&d) + 1u32,
    };
    Ok(x1 - root)
}

/// Both closed forms of the limit iteration, for cross-checking.
///
/// Requires an admissible `b_limit`; under admissibility neither form
/// underflows and the two provably agree.
pub fn limit_iteration_variants(
    n: &Natural,
    b_limit: &Natural,
    x1: &Natural,
    step: u64,
) -> Result<(Natural, Natural)> {
    SearchConfig::first_pair(step)?;
    if !admits_b_limit(n, x1, b_limit)? {
        return Err(Error::InadmissibleBLimit {
            b_limit: b_limit.clone(),
            max: b_limit_floor(n, x1)?,
        });
    }
    let s = Natural::from(step);
    let a_limit = largest_odd_quotient(n, b_limit)?;
    let midpoint = (a_limit + b_limit) >> 1;
    let by_midpoint = (midpoint - x1) / &s + 1u32;
    let numerator = n + b_limit * b_limit - ((b_limit * x1) << 1u32);
    let by_residue = numerator / ((b_limit * &s) << 1u32) + 1u32;
    Ok((by_midpoint, by_residue))
}

/// The limit iteration `i_L`: probes from `x1` (inclusive, step `step`)
/// sufficient to expose every divisor pair whose small member is `>= b_limit`.
///
/// ```
/// use stepfermat::{limit, Natural};
/// let i = limit::limit_iterations(
///     &Natural::from(87281521u64),
///     &Natural::from(3u32),
///     &Natural::from(9343u32),
///     2,
/// ).unwrap();
/// assert_eq!(i, Natural::from(7268790u64));
/// ```
pub fn limit_iterations(
    n: &Natural,
    b_limit: &Natural,
    x1: &Natural,
    step: u64,
) -> Result<Natural> {
    let (by_midpoint, by_residue) = limit_iteration_variants(n, b_limit, x1, step)?;
    assert_eq!(by_midpoint, by_residue, "limit iteration forms disagree");
    Ok(by_midpoint)
}

/// The probe reached after `i_l` iterations: `x1 + step * (i_l - 1)`.
pub fn limit_x(x1: &Natural, step: u64, i_l: &Natural) -> Result<Natural> {
    SearchConfig::first_pair(step)?;
    if num_traits::Zero::is_zero(i_l) {
        return Err(Error::ZeroIteration);
    }
    Ok(x1 + Natural::from(step) * (i_l - 1u32))
}

/// Boundary predicate: is the exclusion limit for `b` exactly `i_ls`
/// completed steps past `x1`? True iff the probe `X = x1 + step * i_ls`
/// still admits `b` while the next probe does not — an `i_L` claim of
/// `i_ls + 1` can be verified by this without re-deriving the closed forms.
pub fn window_admits(
    n: &Natural,
    x1: &Natural,
    i_ls: &Natural,
    b: &Natural,
    step: u64,
) -> Result<bool> {
    SearchConfig::first_pair(step)?;
    validate_b_limit(b)?;
    validate_start(n, x1)?;
    let x = x1 + Natural::from(step) * i_ls;
    let x_next = &x + Natural::from(step);
    let right = x >= *b && {
        let gap = &x - b;
        &gap * &gap >= &x * &x - n
    };
    let left = x_next < *b || {
        let gap = &x_next - b;
        &gap * &gap < &x_next * &x_next - n
    };
    Ok(right && left)
}

/// A serviceable default bound: the smallest prime above `floor(sqrt(n))/4`,
/// falling back to 3 when that quarter is below 3. Larger bounds shrink the
/// limit search but cost more trial division; a quarter of the root keeps
/// the trial-division budget near the limit-search budget.
///
/// ```
/// use stepfermat::{limit, Natural};
/// assert_eq!(limit::recommended_b_limit(&Natural::from(87281521u64)).unwrap(),
///            Natural::from(2339u32));
/// ```
pub fn recommended_b_limit(n: &Natural) -> Result<Natural> {
    let root = arith::require_odd_nonsquare(n)?;
    let quarter = root >> 2;
    if quarter < Natural::from(3u32) {
        return Ok(Natural::from(3u32));
    }
    Ok(screening::next_prime_after(&quarter))
}

fn ensure_coverage(trial_horizon: u64, b_limit: &Natural) -> Result<()> {
    // No odd primes below 3, so b_limit = 3 needs no trial division at all.
    if *b_limit == Natural::from(3u32) {
        return Ok(());
    }
    let horizon = Natural::from(trial_horizon.max(2));
    if screening::next_prime_after(&horizon) < *b_limit {
        return Err(Error::InsufficientScreening {
            horizon: Natural::from(trial_horizon),
            b_limit: b_limit.clone(),
        });
    }
    Ok(())
}

/// Run the limit search for `n` under the divisor exclusions recorded in
/// `receipt`, producing either a divisor pair or a primality certificate.
///
/// `b_limit` must be an odd prime, the receipt must belong to `n`, report
/// no divisor, and its horizon must cover every odd prime below `b_limit`.
///
/// ```
/// use stepfermat::{limit, screening, Natural};
/// let n = Natural::from(87281521u64);
/// let receipt = screening::trial_division(&n, 1).unwrap();
/// let out = limit::certify(&n, &Natural::from(3u32), &receipt).unwrap();
/// match out {
///     limit::CertifyOutcome::Certificate(cert) => {
///         assert_eq!(cert.iterations_executed, 7268790);
///         cert.verify().unwrap();
///     }
///     limit::CertifyOutcome::Composite { .. } => unreachable!(),
/// }
/// ```
pub fn certify(
    n: &Natural,
    b_limit: &Natural,
    receipt: &ScreeningReceipt,
) -> Result<CertifyOutcome> {
    arith::require_odd_nonsquare(n)?;
    validate_b_limit(b_limit)?;
    if !screening::is_probable_prime(b_limit) {
        return Err(Error::NotPrime(b_limit.clone()));
    }
    if receipt.n != *n {
        return Err(Error::ReceiptMismatch {
            receipt_n: receipt.n.clone(),
            n: n.clone(),
        });
    }
    if let Some(hit) = &receipt.divisor {
        return Err(Error::AlreadyFactored(hit.prime.clone()));
    }
    ensure_coverage(receipt.trial_horizon, b_limit)?;

    let x1 = stepped::start_x(n, CERT_STEP)?;
    if !admits_b_limit(n, &x1, b_limit)? {
        return Err(Error::InadmissibleBLimit {
            b_limit: b_limit.clone(),
            max: b_limit_floor(n, &x1)?,
        });
    }
    let iterations = limit_iterations(n, b_limit, &x1, CERT_STEP)?;
    let budget = iterations
        .to_u64()
        .ok_or_else(|| Error::BoundTooLarge(iterations.clone()))?;

    let outcome = stepped::search(n, &SearchConfig::bounded(CERT_STEP, budget)?)?;
    match outcome.terminal {
        Terminal::FirstPairFound | Terminal::TrivialPairReached => {
            let hit = outcome.found.into_iter().next().expect("terminal implies a hit");
            // The trivial pair's midpoint (n + 1) / 2 lies strictly beyond
            // x_L for every admissible b_limit >= 3, so a hit is a real
            // divisor pair.
            if hit.pair.is_trivial() {
                return Err(Error::CertificationCheckFailed(n.clone()));
            }
            Ok(CertifyOutcome::Composite {
                pair: hit.pair,
                iteration: hit.iteration,
            })
        }
        Terminal::BoundExhausted => {
            let x_limit = limit_x(&x1, CERT_STEP, &iterations)?;
            // Boundary witness: strictness can only fail when b_limit
            // divides n, and then the search would have found the pair.
            let gap = &x_limit - b_limit;
            if x_limit < *b_limit || &gap * &gap <= &x_limit * &x_limit - n {
                return Err(Error::CertificationCheckFailed(n.clone()));
            }
            Ok(CertifyOutcome::Certificate(PrimalityCertificate {
                params: LimitParams {
                    n: n.clone(),
                    b_limit: b_limit.clone(),
                    trial_horizon: receipt.trial_horizon,
                    iterations,
                    x_limit,
                    a_limit: largest_odd_quotient(n, b_limit)?,
                },
                iterations_executed: budget,
            }))
        }
    }
}

impl PrimalityCertificate {
    /// Re-derive every field of the certificate and re-check the boundary
    /// inequalities. Catches any tampering with the parameters; trusting the
    /// certificate then reduces to trusting that `iterations_executed`
    /// probes were run without a hit.
    pub fn verify(&self) -> Result<()> {
        let p = &self.params;
        arith::require_odd_nonsquare(&p.n)?;
        validate_b_limit(&p.b_limit)?;
        if !screening::is_probable_prime(&p.b_limit) {
            return Err(Error::NotPrime(p.b_limit.clone()));
        }
        ensure_coverage(p.trial_horizon, &p.b_limit)?;
        let x1 = stepped::start_x(&p.n, CERT_STEP)?;
        let fail = || Error::CertificationCheckFailed(p.n.clone());
        let (by_midpoint, by_residue) =
            limit_iteration_variants(&p.n, &p.b_limit, &x1, CERT_STEP)?;
        if by_midpoint != p.iterations || by_residue != p.iterations {
            return Err(fail());
        }
        if Natural::from(self.iterations_executed) != p.iterations {
            return Err(fail());
        }
        if limit_x(&x1, CERT_STEP, &p.iterations)? != p.x_limit {
            return Err(fail());
        }
        if largest_odd_quotient(&p.n, &p.b_limit)? != p.a_limit {
            return Err(fail());
        }
        // Independent boundary check: i_L - 1 completed steps is exactly
        // where the exclusion window closes.
        let completed = &p.iterations - 1u32;
        if !window_admits(&p.n, &x1, &completed, &p.b_limit, CERT_STEP)? {
            return Err(fail());
        }
        // Strict inequality at the final probe; equality would mean
        // b_limit divides n.
        let gap = &p.x_limit - &p.b_limit;
        if p.x_limit < p.b_limit || &gap * &gap <= &p.x_limit * &p.x_limit - &p.n {
            return Err(fail());
        }
        Ok(())
    }
}
