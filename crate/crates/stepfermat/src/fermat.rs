//! The classical difference-of-squares search.
//!
//! Probe `x = ceil(sqrt(n)), ceil(sqrt(n)) + 1, ...` and test whether
//! `x^2 - n` is a perfect square `y^2`; each hit exposes the divisor pair
//! `(x + y, x - y)`. Once the first (closest) pair is known, every remaining
//! probe with a hit has `x` of the same parity, so the search switches to
//! steps of 2 and finishes at the trivial pair `(n, 1)`.
//!
//! The residue `x^2 - n` is carried incrementally: moving `x` by 1 adds
//! `2x + 1`, moving by 2 adds `4(x + 1)`. Iterations are counted from 1 at
//! the first probe.

use crate::arith;
use crate::totient::FactorPair;
use crate::{Error, Natural, Result};

/// One probe of a search: iteration index, probe `x`, residue `y_sq = x^2 - n`,
/// and, when the residue is a perfect square, its root and the exposed pair
/// (the trivial pair `(n, 1)` included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub i: u64,
    pub x: Natural,
    pub y_sq: Natural,
    pub y: Option<Natural>,
    pub pair: Option<FactorPair>,
}

/// Result of a first-pair search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirstPairOutcome {
    /// A nontrivial pair, and the 1-based iteration that exposed it.
    Pair { pair: FactorPair, iteration: u64 },
    /// The search reached the trivial pair `(n, 1)` without any nontrivial
    /// hit: `n` is prime. The step-1 walk misses nothing, so this is a
    /// proof, not a heuristic.
    PrimeIndication { iteration: u64 },
}

/// Summary of a full classical search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatTrace {
    pub n: Natural,
    /// Every pair record encountered, in discovery order; the last one is
    /// the trivial pair when the trace ran to completion.
    pub pairs: Vec<IterationRecord>,
    /// Iteration of the first nontrivial pair; `None` for primes.
    pub first_pair_iteration: Option<u64>,
    /// Total probes executed.
    pub iterations: u64,
}

/// Residue update for a step of 1: the value of `(x + 1)^2 - n` given
/// `y_sq = x^2 - n`.
///
/// ```
/// use stepfermat::{fermat, Natural};
/// // n = 70399: x = 266 has residue 357, x = 267 has residue 890.
/// assert_eq!(fermat::residue_step_one(&266u32.into(), &357u32.into()), Natural::from(890u32));
/// ```
pub fn residue_step_one(x: &Natural, y_sq: &Natural) -> Natural {
    y_sq + (x << 1u32) + 1u32
}

/// Residue update for a step of 2: the value of `(x + 2)^2 - n` given
/// `y_sq = x^2 - n`.
///
/// ```
/// use stepfermat::{fermat, Natural};
/// // n = 70399: x = 368 has residue 65025, x = 370 has residue 66501.
/// assert_eq!(fermat::residue_step_two(&368u32.into(), &65025u32.into()), Natural::from(66501u32));
/// ```
pub fn residue_step_two(x: &Natural, y_sq: &Natural) -> Natural {
    y_sq + ((x + 1u32) << 2u32)
}

/// Find the closest divisor pair of an odd non-square `n >= 3`, or prove `n`
/// prime by reaching the trivial pair first.
///
/// ```
/// use stepfermat::{fermat::{first_pair, FirstPairOutcome}, Natural};
/// match first_pair(&Natural::from(70741u32)).unwrap() {
///     FirstPairOutcome::Pair { pair, iteration } => {
///         assert_eq!(pair.a(), &Natural::from(649u32));
///         assert_eq!(pair.b(), &Natural::from(109u32));
///         assert_eq!(iteration, 114);
///     }
///     FirstPairOutcome::PrimeIndication { .. } => unreachable!(),
/// }
/// ```
pub fn first_pair(n: &Natural) -> Result<FirstPairOutcome> {
    let trace = drive(n, true, false, &mut |_| {})?;
    let last = trace.pairs.last().expect("search always ends on a pair");
    match trace.first_pair_iteration {
        Some(i) => Ok(FirstPairOutcome::Pair {
            pair: last.pair.clone().expect("pair record"),
            iteration: i,
        }),
        None => Ok(FirstPairOutcome::PrimeIndication {
            iteration: trace.iterations,
        }),
    }
}

/// Walk the full search from `ceil(sqrt(n))` to the trivial pair, collecting
/// every divisor pair of `n` on the way.
pub fn full_trace(n: &Natural) -> Result<FermatTrace> {
    drive(n, false, false, &mut |_| {})
}

/// Like [`full_trace`], but streams a record for *every* probe through
/// `sink` (pair hits and misses alike), so million-record traces need not
/// be accumulated.
pub fn full_trace_with(
    n: &Natural,
    sink: &mut dyn FnMut(&IterationRecord),
) -> Result<FermatTrace> {
    drive(n, false, true, sink)
}

/// Predicted iteration of a pair under a pure step-1 search:
/// `(a + b)/2 - ceil(sqrt(n)) + 1`. Exact for the closest (first) pair;
/// later pairs are reached sooner in practice because the walk switches to
/// steps of 2.
pub fn predicted_iteration(n: &Natural, pair: &FactorPair) -> Result<Natural> {
    arith::require_odd_nonsquare(n)?;
    if !pair.is_pair_of(n) {
        return Err(Error::NotAPairOf {
            a: pair.a().clone(),
            b: pair.b().clone(),
            n: n.clone(),
        });
    }
    // midpoint >= ceil(sqrt(n)) by AM-GM, so this cannot underflow.
    Ok(pair.midpoint() - arith::ceil_sqrt_strict(n)? + 1u32)
}

/// Probes needed to reach the trivial pair when no nontrivial pair stops the
/// phase-1 walk first: `(n + 1)/2 - floor(sqrt(n))`. For prime `n` this is
/// the prime-indication iteration.
pub fn trivial_pair_iteration(n: &Natural) -> Result<Natural> {
    let root = arith::require_odd_nonsquare(n)?;
    Ok(((n + 1u32) >> 1) - root)
}

fn drive(
    n: &Natural,
    stop_at_first: bool,
    stream_all: bool,
    sink: &mut dyn FnMut(&IterationRecord),
) -> Result<FermatTrace> {
    let root = arith::require_odd_nonsquare(n)?;
    let mut x = root + 1u32;
    let mut y_sq = &x * &x - n;
    let mut i: u64 = 1;
    let mut pairs: Vec<IterationRecord> = Vec::new();
    let mut first: Option<u64> = None;

    loop {
        let y = arith::exact_sqrt(&y_sq);
        if stream_all || y.is_some() {
            let record = IterationRecord {
                i,
                x: x.clone(),
                y_sq: y_sq.clone(),
                y: y.clone(),
                pair: y
                    .as_ref()
                    .map(|y| FactorPair::from_probe(&x, y).expect("x > y, opposite parity")),
            };
            if stream_all {
                sink(&record);
            }
            if y.is_some() {
                let pair = record.pair.clone().expect("square residue");
                let is_trivial = pair.is_trivial();
                pairs.push(record);
                if is_trivial {
                    break;
                }
                if first.is_none() {
                    first = Some(i);
                    if stop_at_first {
                        break;
                    }
                }
            }
        }

        // Advance: step 1 before the first pair, step 2 after.
        if first.is_some() {
            y_sq += (&x + 1u32) << 2u32;
            x += 2u32;
        } else {
            y_sq += (&x << 1u32) + 1u32;
            x += 1u32;
        }
        i += 1;

        // Periodic exactness re-check of the incremental residue.
        if i & 0xF_FFFF == 0 {
            debug_assert_eq!(y_sq, &x * &x - n, "incremental residue drifted");
        }
    }

    Ok(FermatTrace {
        n: n.clone(),
        pairs,
        first_pair_iteration: first,
        iterations: i,
    })
}
