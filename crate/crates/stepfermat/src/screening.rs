//! Pre-search screening: trial division, Miller-Rabin, and a segmented
//! prime sieve.
//!
//! Screening answers two questions before any square-difference search runs:
//! does `n` have a small factor (trial division), and does `n` look prime
//! (Miller-Rabin)? The answers travel in a [`ScreeningReceipt`] because the
//! certification stage in [`crate::limit`] must be able to check *which*
//! primes trial division has already excluded.

use std::ops::ControlFlow;

use num_bigint::RandBigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, small_mod};
use crate::{Error, Natural, Result};

/// Largest supported sieve / trial-division horizon.
pub const SIEVE_BUDGET: u64 = 1_000_000_000;

/// Below this bound the Miller-Rabin base ladder is deterministic: a
/// composite can never pass. Equals 3,317,044,064,679,887,385,961,981, the
/// published verified bound for the first 13 prime bases.
pub fn deterministic_threshold() -> &'static Natural {
    static THRESHOLD: std::sync::OnceLock<Natural> = std::sync::OnceLock::new();
    THRESHOLD.get_or_init(|| {
        arith::parse_natural("3317044064679887385961981").expect("constant")
    })
}

const BASES_13: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin verdict. `Composite` is definitive; `ProbablePrime` is exact
/// below [`deterministic_threshold`] and probabilistic above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MrVerdict {
    NotRun,
    ProbablePrime,
    Composite,
}

/// A divisor discovered by trial division.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorHit {
    #[serde(with = "crate::serde_decimal::natural")]
    pub prime: Natural,
    #[serde(with = "crate::serde_decimal::natural")]
    pub cofactor: Natural,
}

/// Record of what screening established about one number.
///
/// `divisor: None` asserts that no odd prime `<= trial_horizon` divides `n`;
/// that assertion is what [`crate::limit::certify`] consumes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreeningReceipt {
    #[serde(with = "crate::serde_decimal::natural")]
    pub n: Natural,
    pub trial_horizon: u64,
    pub divisor: Option<DivisorHit>,
    pub mr_rounds: u32,
    pub mr_verdict: MrVerdict,
}

/// All primes `<= limit`, ascending (2 included).
///
/// Segmented sieve of Eratosthenes, so memory stays proportional to
/// `sqrt(limit)` plus one segment regardless of `limit`.
///
/// ```
/// assert_eq!(stepfermat::screening::primes_up_to(30).unwrap(),
///            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
/// ```
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for_each_prime(limit, |p| {
        out.push(p);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Divide `n` by every odd prime up to `trial_horizon`, in ascending order,
/// stopping at the first hit (or once `p^2 > n`, beyond which no new divisor
/// can exist).
///
/// ```
/// use stepfermat::{screening, Natural};
/// let r = screening::trial_division(&Natural::from(70399u32), 5).unwrap();
/// assert!(r.divisor.is_none());
/// let r = screening::trial_division(&Natural::from(70399u32), 7).unwrap();
/// let hit = r.divisor.unwrap();
/// assert_eq!(hit.prime, Natural::from(7u32));
/// assert_eq!(hit.cofactor, Natural::from(10057u32));
/// ```
pub fn trial_division(n: &Natural, trial_horizon: u64) -> Result<ScreeningReceipt> {
    if n.is_even() {
        return Err(Error::EvenInput(n.clone()));
    }
    if *n < Natural::from(3u32) {
        return Err(Error::TooSmall(n.clone()));
    }
    let n_small = n.to_u128();
    let mut divisor = None;
    for_each_prime(trial_horizon, |p| {
        if p == 2 {
            return ControlFlow::Continue(());
        }
        // Past the square root nothing new can divide n.
        if let Some(v) = n_small {
            if (p as u128) * (p as u128) > v {
                return ControlFlow::Break(());
            }
        }
        if small_mod(n, p) == 0 {
            let prime = Natural::from(p);
            divisor = Some(DivisorHit {
                cofactor: n / &prime,
                prime,
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    Ok(ScreeningReceipt {
        n: n.clone(),
        trial_horizon,
        divisor,
        mr_rounds: 0,
        mr_verdict: MrVerdict::NotRun,
    })
}

/// Miller-Rabin primality screen for `n >= 2`.
///
/// Below [`deterministic_threshold`] the verdict uses published verified
/// base sets and is exact; `rounds` and `rng` are only consulted above it,
/// where `rounds` random bases are drawn from `rng`.
///
/// ```
/// use stepfermat::{screening::{probable_prime, MrVerdict}, Natural};
/// let mut rng = rand::thread_rng();
/// assert_eq!(probable_prime(&Natural::from(87281521u32), 16, &mut rng), MrVerdict::ProbablePrime);
/// assert_eq!(probable_prime(&Natural::from(70399u32), 16, &mut rng), MrVerdict::Composite);
/// assert_eq!(probable_prime(&Natural::from(561u32), 16, &mut rng), MrVerdict::Composite);
/// ```
pub fn probable_prime<R: Rng + ?Sized>(n: &Natural, rounds: u32, rng: &mut R) -> MrVerdict {
    let two = Natural::from(2u32);
    if *n < two {
        return MrVerdict::Composite;
    }
    if *n == two {
        return MrVerdict::ProbablePrime;
    }
    if n.is_even() {
        return MrVerdict::Composite;
    }
    if let Some(bases) = deterministic_bases(n) {
        for &b in bases {
            if is_witness(n, &Natural::from(b)) {
                return MrVerdict::Composite;
            }
        }
        return MrVerdict::ProbablePrime;
    }
    let low = two;
    let high = n - 1u32; // gen range is half-open: bases drawn from [2, n-2]
    for _ in 0..rounds.max(1) {
        let base = rng.gen_biguint_range(&low, &high);
        if is_witness(n, &base) {
            return MrVerdict::Composite;
        }
    }
    MrVerdict::ProbablePrime
}

/// Deterministic primality check: exact below [`deterministic_threshold`],
/// and above it a fixed-seed 64-round Miller-Rabin whose error probability
/// (< 4^-64) is far below any hardware fault rate.
pub fn is_probable_prime(n: &Natural) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CAFE);
    probable_prime(n, 64, &mut rng) == MrVerdict::ProbablePrime
}

/// Smallest prime strictly greater than `n`.
///
/// ```
/// use stepfermat::{screening::next_prime_after, Natural};
/// assert_eq!(next_prime_after(&Natural::from(2539u32)), Natural::from(2543u32));
/// assert_eq!(next_prime_after(&Natural::from(1u32)), Natural::from(2u32));
/// ```
pub fn next_prime_after(n: &Natural) -> Natural {
    let two = Natural::from(2u32);
    if *n < two {
        return two;
    }
    let mut candidate = n + 1u32;
    if candidate.is_even() {
        if candidate == two {
            return two;
        }
        candidate += 1u32;
    }
    while !is_probable_prime(&candidate) {
        candidate += 2u32;
    }
    candidate
}

// Verified deterministic base sets (Pomerance-Selfridge-Wagstaff / Jaeschke /
// Sorenson-Webster bounds). Returns None above the 13-base bound.
fn deterministic_bases(n: &Natural) -> Option<&'static [u64]> {
    if let Some(v) = n.to_u64() {
        if v < 3_215_031_751 {
            return Some(&BASES_13[..4]); // 2, 3, 5, 7
        }
        if v < 3_474_749_660_383 {
            return Some(&BASES_13[..6]); // .. 13
        }
        if v < 341_550_071_728_321 {
            return Some(&BASES_13[..7]); // .. 17
        }
    }
    if n < deterministic_threshold() {
        return Some(&BASES_13[..]);
    }
    None
}

// Standard Miller-Rabin witness test: true means `base` proves n composite.
fn is_witness(n: &Natural, base: &Natural) -> bool {
    let b = base % n;
    if b.is_zero() {
        return false;
    }
    let one = Natural::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n odd > 2");
    let d = &n_minus_1 >> s;
    let mut x = b.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return false;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return false;
        }
    }
    true
}

// Drive `f` over every prime <= limit in order; `f` can break early.
// Segmented: a base sieve up to sqrt(limit), then fixed-size odd segments.
fn for_each_prime(
    limit: u64,
    mut f: impl FnMut(u64) -> ControlFlow<()>,
) -> Result<()> {
    if limit > SIEVE_BUDGET {
        return Err(Error::SieveBudget(limit));
    }
    if limit < 2 {
        return Ok(());
    }
    if f(2).is_break() {
        return Ok(());
    }
    let root = limit.isqrt();
    let base = small_odd_primes(root);
    for &p in &base {
        if f(p).is_break() {
            return Ok(());
        }
    }
    // Each segment covers SEGMENT_ODDS odd numbers starting just above the
    // base range.
    const SEGMENT_ODDS: usize = 1 << 19;
    let mut lo = root.max(2) + 1;
    if lo.is_even() {
        lo += 1;
    }
    let mut flags = vec![false; SEGMENT_ODDS];
    while lo <= limit {
        let hi = limit.min(lo + 2 * (SEGMENT_ODDS as u64 - 1));
        let len = ((hi - lo) / 2 + 1) as usize;
        flags[..len].fill(false);
        for &p in &base {
            // First odd multiple of p at or above lo (and at least p^2,
            // though lo > sqrt(limit) >= p already guarantees that).
            let mut m = lo.div_ceil(p) * p;
            if m.is_even() {
                m += p;
            }
            while m <= hi {
                flags[((m - lo) / 2) as usize] = true;
                m += 2 * p;
            }
        }
        for (idx, &composite) in flags[..len].iter().enumerate() {
            if !composite && f(lo + 2 * idx as u64).is_break() {
                return Ok(());
            }
        }
        lo = hi + 2;
    }
    Ok(())
}

// Simple sieve for the base primes (odd primes <= limit, limit ~ sqrt(1e9)).
fn small_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let half = ((limit - 1) / 2) as usize; // index i <-> odd number 2i + 1
    let mut composite = vec![false; half + 1];
    let mut out = Vec::new();
    for i in 1..=half {
        if composite[i] {
            continue;
        }
        let p = 2 * i as u64 + 1;
        out.push(p);
        let mut m = p * p;
        while m <= limit {
            composite[((m - 1) / 2) as usize] = true;
            m += 2 * p;
        }
    }
    out
}
