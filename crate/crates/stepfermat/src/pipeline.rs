//! Recursive factorization driver and algorithm comparison.
//!
//! [`factor_completely`] reduces an arbitrary natural number to certified
//! prime powers: powers of two are stripped, perfect squares are collapsed,
//! probable primes are certified by an exhausted limit search, and
//! composites are split by the stepped pair search. Every search or
//! certification that executes probes is recorded as a [`Stage`], so the
//! total work is visible in the report.
//!
//! [`compare_algorithms`] runs the classical walk and a set of stepped
//! walks over the same number and tabulates bounds, starts, and hit
//! indices side by side.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::fermat::{self, FirstPairOutcome, IterationRecord};
use crate::limit::{self, CertifyOutcome, PrimalityCertificate};
use crate::screening::{self, MrVerdict};
use crate::stepped::{self, FoundPair, SearchConfig, Terminal};
use crate::totient::FactorPair;
use crate::{Error, Natural, Result};

/// How to choose the certification bound `b_L` (and with it the
/// trial-division horizon) for each probable prime the pipeline meets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum BLimitPolicy {
    /// `b_L = 3` (no trial division) below 10^10; the recommended bound
    /// (about a quarter of the root) above it.
    Auto,
    /// Always use this bound; trial division runs to `b_L - 2`.
    Fixed(#[serde(with = "crate::serde_decimal::natural")] Natural),
    /// Trial-divide to this horizon first — also when splitting composites
    /// — and certify with the next prime above it.
    TrialHorizon(u64),
}

/// Pipeline knobs. The defaults factor and certify with step 2 and the
/// automatic bound policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorOptions {
    /// Step factor for the pair searches. 1 and 2 are exhaustive; larger
    /// even values are faster but may end in [`Error::HeuristicExhausted`].
    pub step: u64,
    pub b_limit_policy: BLimitPolicy,
    /// Extra random witness rounds above the deterministic range.
    pub mr_rounds: u32,
    /// Seed for those rounds; `None` draws from entropy.
    pub seed: Option<u64>,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            step: 2,
            b_limit_policy: BLimitPolicy::Auto,
            mr_rounds: 24,
            seed: None,
        }
    }
}

/// Why the report believes a factor is prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PrimeEvidence {
    /// No divisor up to `horizon`, and `horizon^2` covers the factor.
    TrialDivision { horizon: u64 },
    /// An exhausted, re-derivable limit search.
    LimitCertificate(PrimalityCertificate),
    /// Witness rounds only: the number was too large to certify within
    /// the executable budget.
    ProbabilisticOnly { rounds: u32 },
}

/// One prime power of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedFactor {
    #[serde(with = "crate::serde_decimal::natural")]
    pub prime: Natural,
    pub exponent: u32,
    pub evidence: PrimeEvidence,
}

/// What a stage of the pipeline worked on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StageKind {
    /// A stepped pair search that split (or tried to split) `target`.
    Search {
        #[serde(with = "crate::serde_decimal::natural")]
        target: Natural,
        step: u64,
    },
    /// A limit search that certified `target` (or exposed a pair).
    Certification {
        #[serde(with = "crate::serde_decimal::natural")]
        target: Natural,
        #[serde(with = "crate::serde_decimal::natural")]
        b_limit: Natural,
    },
}

/// One probe-executing stage and its probe count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub kind: StageKind,
    pub iterations: u64,
}

/// Complete factorization with work accounting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationReport {
    #[serde(with = "crate::serde_decimal::natural")]
    pub n: Natural,
    /// Prime powers in ascending prime order; empty exactly for `n = 1`.
    pub factors: Vec<ReportedFactor>,
    /// Searches and certifications in execution order.
    pub stages: Vec<Stage>,
    /// Probes across all stages.
    pub total_iterations: u64,
}

fn auto_threshold() -> Natural {
    Natural::from(10_000_000_000u64)
}

/// Resolve the policy for one probable prime: `(b_limit, trial_horizon)`.
fn certification_plan(m: &Natural, policy: &BLimitPolicy) -> Result<(Natural, u64)> {
    match policy {
        BLimitPolicy::Auto => {
            if *m < auto_threshold() {
                Ok((Natural::from(3u32), 1))
            } else {
                let b = limit::recommended_b_limit(m)?;
                let horizon = (&b - 2u32).to_u64().unwrap_or(u64::MAX);
                Ok((b, horizon))
            }
        }
        BLimitPolicy::Fixed(b) => {
            let horizon = (b - 2u32).to_u64().unwrap_or(u64::MAX);
            Ok((b.clone(), horizon))
        }
        BLimitPolicy::TrialHorizon(h) => {
            Ok((screening::next_prime_after(&Natural::from(*h)), *h))
        }
    }
}

/// Trial-division horizon to try before searching a composite, if any.
fn peel_horizon(policy: &BLimitPolicy) -> Option<u64> {
    match policy {
        BLimitPolicy::Auto => None,
        BLimitPolicy::Fixed(b) => Some((b - 2u32).to_u64().unwrap_or(u64::MAX)),
        BLimitPolicy::TrialHorizon(h) => Some(*h),
    }
}

/// Factor `n` completely into certified prime powers.
///
/// ```
/// use stepfermat::pipeline::{factor_completely, FactorOptions};
/// use stepfermat::Natural;
/// let report = factor_completely(&Natural::from(70399u32), &FactorOptions::default()).unwrap();
/// let primes: Vec<u32> = report.factors.iter()
///     .map(|f| format!("{}", f.prime).parse().unwrap())
///     .collect();
/// assert_eq!(primes, vec![7, 89, 113]);
/// ```
pub fn factor_completely(n: &Natural, opts: &FactorOptions) -> Result<FactorizationReport> {
    factor_with_trace(n, opts, None)
}

/// Like [`factor_completely`], with every search probe streamed to `trace`.
/// (Certification probes are not streamed; their count is in the stages.)
pub fn factor_with_trace(
    n: &Natural,
    opts: &FactorOptions,
    mut trace: Option<&mut dyn FnMut(&IterationRecord)>,
) -> Result<FactorizationReport> {
    SearchConfig::first_pair(opts.step)?;
    if n.is_zero() {
        return Err(Error::TooSmall(n.clone()));
    }
    let mut rng = match opts.seed {
        Some(seed) => ChaCha8Rng::seed_from_u64(seed),
        None => ChaCha8Rng::from_entropy(),
    };

    // prime -> (exponent, evidence), ascending by construction.
    let mut factors: BTreeMap<Natural, (u32, PrimeEvidence)> = BTreeMap::new();
    let mut stages: Vec<Stage> = Vec::new();

    // Powers of two come off by parity before the odd machinery starts.
    let mut odd = n.clone();
    let mut twos = 0u32;
    while odd.is_even() {
        odd >>= 1;
        twos += 1;
    }
    if twos > 0 {
        factors.insert(
            Natural::from(2u32),
            (twos, PrimeEvidence::TrialDivision { horizon: 1 }),
        );
    }

    let mut work: Vec<(Natural, u32)> = Vec::new();
    if !odd.is_one() {
        work.push((odd, 1));
    }

    while let Some((m, mult)) = work.pop() {
        if let Some((exp, _)) = factors.get_mut(&m) {
            *exp += mult;
            continue;
        }
        if let Some(root) = arith::exact_sqrt(&m) {
            work.push((root, mult * 2));
            continue;
        }
        match screening::probable_prime(&m, opts.mr_rounds, &mut rng) {
            MrVerdict::ProbablePrime => {
                let (evidence, cert_stage) =
                    certify_factor(&m, &opts.b_limit_policy, &mut work, mult)?;
                if let Some(stage) = cert_stage {
                    stages.push(stage);
                }
                if let Some(evidence) = evidence {
                    factors.insert(m, (mult, evidence));
                }
            }
            MrVerdict::Composite => {
                // Cheap divisors first when the policy already pays for a
                // trial-division horizon.
                if let Some(horizon) = peel_horizon(&opts.b_limit_policy) {
                    let receipt = screening::trial_division(&m, horizon)?;
                    if let Some(hit) = receipt.divisor {
                        work.push((hit.prime, mult));
                        work.push((hit.cofactor, mult));
                        continue;
                    }
                }
                let config = SearchConfig::first_pair(opts.step)?;
                let outcome = match trace.as_mut() {
                    Some(cb) => stepped::search_with(&m, &config, &mut **cb)?,
                    None => stepped::search(&m, &config)?,
                };
                stages.push(Stage {
                    kind: StageKind::Search {
                        target: m.clone(),
                        step: opts.step,
                    },
                    iterations: outcome.iterations,
                });
                match outcome.terminal {
                    Terminal::FirstPairFound => {
                        let hit = outcome.found.into_iter().next().expect("pair present");
                        work.push((hit.pair.a().clone(), mult));
                        work.push((hit.pair.b().clone(), mult));
                    }
                    Terminal::TrivialPairReached => {
                        if config.certain() {
                            // An exhaustive walk with no nontrivial pair
                            // contradicts the composite witness.
                            unreachable!("exhaustive search found no pair in a composite");
                        }
                        return Err(Error::HeuristicExhausted {
                            n: m,
                            step: opts.step,
                        });
                    }
                    Terminal::BoundExhausted => unreachable!("search was not bounded"),
                }
            }
            MrVerdict::NotRun => unreachable!("screening always runs"),
        }
    }

    let mut product = Natural::one();
    let factors: Vec<ReportedFactor> = factors
        .into_iter()
        .map(|(prime, (exponent, evidence))| {
            product *= prime.pow(exponent);
            ReportedFactor {
                prime,
                exponent,
                evidence,
            }
        })
        .collect();
    assert_eq!(product, *n, "factor product must reproduce the input");

    let total_iterations = stages
        .iter()
        .fold(0u64, |acc, s| acc.saturating_add(s.iterations));
    Ok(FactorizationReport {
        n: n.clone(),
        factors,
        stages,
        total_iterations,
    })
}

/// Certify one probable prime `m`. Returns the evidence to record (or
/// `None` when a surprise divisor sent parts back to `work`) and a stage
/// when probes were executed.
fn certify_factor(
    m: &Natural,
    policy: &BLimitPolicy,
    work: &mut Vec<(Natural, u32)>,
    mult: u32,
) -> Result<(Option<PrimeEvidence>, Option<Stage>)> {
    let (b_limit, horizon) = certification_plan(m, policy)?;
    let receipt = match screening::trial_division(m, horizon) {
        Ok(receipt) => receipt,
        // Horizon beyond the sieve budget: certification is out of reach,
        // fall back to the witness evidence alone.
        Err(Error::SieveBudget(_)) => {
            return Ok((Some(probabilistic_evidence()), None));
        }
        Err(e) => return Err(e),
    };
    if let Some(hit) = receipt.divisor {
        // The witness rounds were wrong; recurse on the honest split.
        work.push((hit.prime, mult));
        work.push((hit.cofactor, mult));
        return Ok((None, None));
    }
    match limit::certify(m, &b_limit, &receipt) {
        Ok(CertifyOutcome::Certificate(cert)) => {
            let stage = Stage {
                kind: StageKind::Certification {
                    target: m.clone(),
                    b_limit,
                },
                iterations: cert.iterations_executed,
            };
            Ok((Some(PrimeEvidence::LimitCertificate(cert)), Some(stage)))
        }
        Ok(CertifyOutcome::Composite { pair, iteration }) => {
            let stage = Stage {
                kind: StageKind::Certification {
                    target: m.clone(),
                    b_limit,
                },
                iterations: iteration,
            };
            work.push((pair.a().clone(), mult));
            work.push((pair.b().clone(), mult));
            Ok((None, Some(stage)))
        }
        // The bound excludes nothing for this m (tiny primes): trial
        // division to the root is an unconditional proof and cheap there.
        Err(Error::InadmissibleBLimit { .. }) => {
            let root = arith::floor_sqrt(m);
            let root_horizon = root.to_u64().ok_or(Error::SieveBudget(u64::MAX))?;
            let full = screening::trial_division(m, root_horizon)?;
            match full.divisor {
                Some(hit) => {
                    work.push((hit.prime, mult));
                    work.push((hit.cofactor, mult));
                    Ok((None, None))
                }
                None => Ok((
                    Some(PrimeEvidence::TrialDivision {
                        horizon: root_horizon,
                    }),
                    None,
                )),
            }
        }
        // The limit count does not fit the executable budget.
        Err(Error::BoundTooLarge(_)) => Ok((Some(probabilistic_evidence()), None)),
        Err(e) => Err(e),
    }
}

fn probabilistic_evidence() -> PrimeEvidence {
    // Deterministic witnesses cover everything below the threshold, so a
    // number that lands here passed at least the 13 fixed bases.
    PrimeEvidence::ProbabilisticOnly { rounds: 13 }
}

/// Classical walk summary for [`CompositeComparison`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalRow {
    #[serde(with = "crate::serde_decimal::natural")]
    pub totient_bound: Natural,
    #[serde(with = "crate::serde_decimal::natural")]
    pub start_x: Natural,
    pub pair: FactorPair,
    pub iteration: u64,
}

/// One stepped walk on a composite, next to the classical result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRow {
    pub step: u64,
    #[serde(with = "crate::serde_decimal::natural")]
    pub totient_bound: Natural,
    #[serde(with = "crate::serde_decimal::natural")]
    pub start_x: Natural,
    /// First pair found, if the walk found one before the trivial pair.
    pub found: Option<FoundPair>,
    /// Did it find the same pair as the classical walk?
    pub matches_classical: bool,
    /// When the pairs match: is the hit index within rounding of the
    /// classical index divided by the step?
    pub classification_consistent: Option<bool>,
    /// Executed probes when the walk ended at the trivial pair instead.
    pub trivial_iteration: Option<u64>,
    pub certain: bool,
}

/// Comparison on a composite: executed walks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeComparison {
    #[serde(with = "crate::serde_decimal::natural")]
    pub n: Natural,
    pub classical: ClassicalRow,
    pub rows: Vec<StepRow>,
}

/// One stepped walk on a prime, predicted from the closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeStepRow {
    pub step: u64,
    #[serde(with = "crate::serde_decimal::natural")]
    pub trivial_iteration: Natural,
    pub certain: bool,
}

/// Comparison on a prime: no walk is executed, the trivial-pair indices
/// come from the closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeComparison {
    #[serde(with = "crate::serde_decimal::natural")]
    pub n: Natural,
    #[serde(with = "crate::serde_decimal::natural")]
    pub classical_trivial: Natural,
    pub rows: Vec<PrimeStepRow>,
}

/// Result of [`compare_algorithms`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgorithmComparison {
    Prime(PrimeComparison),
    Composite(CompositeComparison),
}

/// Run the classical walk and one stepped walk per entry of `steps` on the
/// same `n`, side by side. Composites execute the walks; probable primes
/// only evaluate the trivial-pair formulas (executing would finish, but in
/// time proportional to `n / step`).
///
/// ```
/// use stepfermat::pipeline::{compare_algorithms, AlgorithmComparison};
/// use stepfermat::Natural;
/// let cmp = compare_algorithms(&Natural::from(70399u32), &[2, 8]).unwrap();
/// let c = match cmp { AlgorithmComparison::Composite(c) => c, _ => unreachable!() };
/// assert_eq!(c.classical.iteration, 103);
/// assert_eq!(c.rows[0].found.as_ref().unwrap().iteration, 52);
/// assert_eq!(c.rows[1].found.as_ref().unwrap().iteration, 13);
/// ```
pub fn compare_algorithms(n: &Natural, steps: &[u64]) -> Result<AlgorithmComparison> {
    arith::require_odd_nonsquare(n)?;
    for &s in steps {
        SearchConfig::first_pair(s)?;
    }

    if screening::is_probable_prime(n) {
        let rows = steps
            .iter()
            .map(|&s| {
                Ok(PrimeStepRow {
                    step: s,
                    trivial_iteration: stepped::trivial_iteration_for_step(n, s)?,
                    certain: s <= 2,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(AlgorithmComparison::Prime(PrimeComparison {
            n: n.clone(),
            classical_trivial: fermat::trivial_pair_iteration(n)?,
            rows,
        }));
    }

    let classical = match fermat::first_pair(n)? {
        FirstPairOutcome::Pair { pair, iteration } => ClassicalRow {
            totient_bound: stepped::totient_bound(n, 1)?,
            start_x: stepped::start_x(n, 1)?,
            pair,
            iteration,
        },
        FirstPairOutcome::PrimeIndication { .. } => {
            unreachable!("composite witness implies a nontrivial pair")
        }
    };

    let rows = steps
        .iter()
        .map(|&s| {
            let outcome = stepped::search(n, &SearchConfig::first_pair(s)?)?;
            let (found, trivial_iteration) = match outcome.terminal {
                Terminal::FirstPairFound => {
                    (Some(outcome.found.into_iter().next().expect("pair present")), None)
                }
                Terminal::TrivialPairReached => (None, Some(outcome.iterations)),
                Terminal::BoundExhausted => unreachable!("search was not bounded"),
            };
            let matches_classical = found
                .as_ref()
                .map(|f| f.pair == classical.pair)
                .unwrap_or(false);
            let classification_consistent = matches_classical.then(|| {
                let f = found.as_ref().expect("matches implies found");
                let floor = classical.iteration / s;
                f.iteration == floor || f.iteration == floor + 1
            });
            Ok(StepRow {
                step: s,
                totient_bound: stepped::totient_bound(n, s)?,
                start_x: stepped::start_x(n, s)?,
                found,
                matches_classical,
                classification_consistent,
                trivial_iteration,
                certain: s <= 2,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(AlgorithmComparison::Composite(CompositeComparison {
        n: n.clone(),
        classical,
        rows,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(v: u64) -> Natural {
        Natural::from(v)
    }

    fn factor(n: u64) -> FactorizationReport {
        factor_completely(&nat(n), &FactorOptions::default()).unwrap()
    }

    fn primes_of(report: &FactorizationReport) -> Vec<(Natural, u32)> {
        report
            .factors
            .iter()
            .map(|f| (f.prime.clone(), f.exponent))
            .collect()
    }

    #[test]
    fn factors_a_three_prime_composite() {
        let report = factor(70399);
        assert_eq!(
            primes_of(&report),
            vec![(nat(7), 1), (nat(89), 1), (nat(113), 1)]
        );
        // Stage log: split 70399, certify 113, split 623, certify 89.
        // 7 is proven by root-bounded trial division, which costs no probes.
        let expected = [
            (
                StageKind::Search {
                    target: nat(70399),
                    step: 2,
                },
                52u64,
            ),
            (
                StageKind::Certification {
                    target: nat(113),
                    b_limit: nat(3),
                },
                5,
            ),
            (
                StageKind::Search {
                    target: nat(623),
                    step: 2,
                },
                12,
            ),
            (
                StageKind::Certification {
                    target: nat(89),
                    b_limit: nat(3),
                },
                3,
            ),
        ];
        assert_eq!(report.stages.len(), expected.len());
        for (stage, (kind, iters)) in report.stages.iter().zip(expected) {
            assert_eq!(stage.kind, kind);
            assert_eq!(stage.iterations, iters);
        }
        assert_eq!(report.total_iterations, 72);

        let seven = &report.factors[0];
        assert_eq!(seven.evidence, PrimeEvidence::TrialDivision { horizon: 2 });
        assert!(matches!(
            report.factors[1].evidence,
            PrimeEvidence::LimitCertificate(_)
        ));
    }

    #[test]
    fn factors_one_and_small_inputs() {
        let report = factor(1);
        assert!(report.factors.is_empty());
        assert!(report.stages.is_empty());
        assert_eq!(report.total_iterations, 0);

        assert!(matches!(
            factor_completely(&nat(0), &FactorOptions::default()),
            Err(Error::TooSmall(_))
        ));

        let report = factor(2);
        assert_eq!(primes_of(&report), vec![(nat(2), 1)]);
        let report = factor(1024);
        assert_eq!(primes_of(&report), vec![(nat(2), 10)]);
    }

    #[test]
    fn strips_twos_and_collapses_squares() {
        let report = factor(12);
        assert_eq!(primes_of(&report), vec![(nat(2), 2), (nat(3), 1)]);

        let report = factor(27);
        assert_eq!(primes_of(&report), vec![(nat(3), 3)]);
        assert_eq!(report.total_iterations, 1); // one probe splits 27 into (9, 3)

        let report = factor(44100); // (2 * 3 * 5 * 7)^2
        assert_eq!(
            primes_of(&report),
            vec![(nat(2), 2), (nat(3), 2), (nat(5), 2), (nat(7), 2)]
        );
    }

    #[test]
    fn certifies_the_large_semiprime() {
        let report = factor(3986359420010593);
        assert_eq!(
            primes_of(&report),
            vec![(nat(45672433), 1), (nat(87281521), 1)]
        );
        let expected = [
            (
                StageKind::Search {
                    target: nat(3986359420010593),
                    step: 2,
                },
                1669678u64,
            ),
            (
                StageKind::Certification {
                    target: nat(45672433),
                    b_limit: nat(3),
                },
                3802658,
            ),
            (
                StageKind::Certification {
                    target: nat(87281521),
                    b_limit: nat(3),
                },
                7268790,
            ),
        ];
        for (stage, (kind, iters)) in report.stages.iter().zip(expected) {
            assert_eq!(stage.kind, kind);
            assert_eq!(stage.iterations, iters);
        }
        assert_eq!(report.total_iterations, 12741126);
        for f in &report.factors {
            match &f.evidence {
                PrimeEvidence::LimitCertificate(cert) => cert.verify().unwrap(),
                other => panic!("expected certificates, got {other:?}"),
            }
        }
    }

    #[test]
    fn trial_horizon_policy_peels_and_proves() {
        let opts = FactorOptions {
            b_limit_policy: BLimitPolicy::TrialHorizon(7),
            ..FactorOptions::default()
        };
        let report = factor_completely(&nat(70399), &opts).unwrap();
        assert_eq!(
            primes_of(&report),
            vec![(nat(7), 1), (nat(89), 1), (nat(113), 1)]
        );
        // 7 comes off by trial division; 10057 splits at its first probe;
        // 89 and 113 reject b_L = 11 as inadmissible and fall back to
        // root-bounded trial division.
        assert_eq!(report.stages.len(), 1);
        assert_eq!(
            report.stages[0].kind,
            StageKind::Search {
                target: nat(10057),
                step: 2
            }
        );
        assert_eq!(report.total_iterations, 1);
        assert_eq!(
            report.factors[1].evidence,
            PrimeEvidence::TrialDivision { horizon: 9 }
        );
        assert_eq!(
            report.factors[2].evidence,
            PrimeEvidence::TrialDivision { horizon: 10 }
        );
    }

    #[test]
    fn heuristic_step_reports_exhaustion() {
        let opts = FactorOptions {
            step: 4,
            ..FactorOptions::default()
        };
        match factor_completely(&nat(33), &opts) {
            Err(Error::HeuristicExhausted { n, step }) => {
                assert_eq!(n, nat(33));
                assert_eq!(step, 4);
            }
            other => panic!("expected heuristic exhaustion, got {other:?}"),
        }
        // The same step factors 35 fine: its pair is on the grid.
        let report = factor_completely(&nat(35), &opts).unwrap();
        assert_eq!(primes_of(&report), vec![(nat(5), 1), (nat(7), 1)]);
    }

    #[test]
    fn oversized_primes_keep_witness_evidence() {
        // Smallest prime above 2^70: the limit budget exceeds u64 at
        // b_L = 3, and the auto bound's horizon exceeds the sieve budget.
        let p = Natural::parse_bytes(b"1180591620717411303449", 10).unwrap();
        for policy in [BLimitPolicy::Fixed(nat(3)), BLimitPolicy::Auto] {
            let opts = FactorOptions {
                b_limit_policy: policy,
                ..FactorOptions::default()
            };
            let report = factor_completely(&p, &opts).unwrap();
            assert_eq!(report.factors.len(), 1);
            assert_eq!(report.factors[0].prime, p);
            assert!(matches!(
                report.factors[0].evidence,
                PrimeEvidence::ProbabilisticOnly { .. }
            ));
            assert!(report.stages.is_empty());
        }
    }

    #[test]
    fn report_round_trips_through_json() {
        let report = factor(70399);
        let json = serde_json::to_string(&report).unwrap();
        let back: FactorizationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn traces_stream_search_probes() {
        let mut rows = Vec::new();
        let mut sink = |r: &IterationRecord| rows.push((r.i, r.pair.is_some()));
        let report = factor_with_trace(
            &nat(70399),
            &FactorOptions::default(),
            Some(&mut sink),
        )
        .unwrap();
        // Search stages execute 52 + 12 probes; certifications are not
        // streamed.
        assert_eq!(rows.len(), 64);
        assert_eq!(report.total_iterations, 72);
        assert_eq!(rows.iter().filter(|(_, hit)| *hit).count(), 2);
    }

    #[test]
    fn comparison_on_the_reference_composite() {
        let cmp = compare_algorithms(&nat(70399), &[2, 8, 6]).unwrap();
        let c = match cmp {
            AlgorithmComparison::Composite(c) => c,
            AlgorithmComparison::Prime(_) => panic!("70399 is composite"),
        };
        assert_eq!(c.classical.iteration, 103);
        assert_eq!(c.classical.start_x, nat(266));
        assert_eq!(c.classical.totient_bound, nat(69868));
        assert_eq!(c.classical.pair.a(), &nat(623));

        let s2 = &c.rows[0];
        assert_eq!(s2.found.as_ref().unwrap().iteration, 52);
        assert_eq!(s2.start_x, nat(266));
        assert!(s2.matches_classical);
        assert_eq!(s2.classification_consistent, Some(true));
        assert!(s2.certain);

        let s8 = &c.rows[1];
        assert_eq!(s8.found.as_ref().unwrap().iteration, 13);
        assert_eq!(s8.start_x, nat(272));
        assert_eq!(s8.totient_bound, nat(69856));
        assert_eq!(s8.classification_consistent, Some(true));
        assert!(!s8.certain);

        // Step 6 skips (623, 113) and lands on (10057, 7) instead.
        let s6 = &c.rows[2];
        let f = s6.found.as_ref().unwrap();
        assert_eq!(f.pair.a(), &nat(10057));
        assert_eq!(f.iteration, 795);
        assert!(!s6.matches_classical);
        assert_eq!(s6.classification_consistent, None);
    }

    #[test]
    fn comparison_on_the_balanced_semiprimes() {
        let cmp = compare_algorithms(&nat(8612553881), &[2, 6]).unwrap();
        let c = match cmp {
            AlgorithmComparison::Composite(c) => c,
            _ => panic!("composite"),
        };
        assert_eq!(c.classical.iteration, 56);
        assert_eq!(c.rows[0].found.as_ref().unwrap().iteration, 28);
        assert_eq!(c.rows[1].found.as_ref().unwrap().iteration, 10);
        assert_eq!(c.rows[1].classification_consistent, Some(true));

        let cmp = compare_algorithms(&nat(5357811983), &[2, 12]).unwrap();
        let c = match cmp {
            AlgorithmComparison::Composite(c) => c,
            _ => panic!("composite"),
        };
        assert_eq!(c.classical.iteration, 1515);
        assert_eq!(c.rows[0].found.as_ref().unwrap().iteration, 758);
        assert_eq!(c.rows[1].found.as_ref().unwrap().iteration, 127);
    }

    #[test]
    fn comparison_on_a_prime_is_formula_only() {
        let cmp = compare_algorithms(&nat(87281521), &[2, 8]).unwrap();
        let p = match cmp {
            AlgorithmComparison::Prime(p) => p,
            AlgorithmComparison::Composite(_) => panic!("87281521 is prime"),
        };
        assert_eq!(p.classical_trivial, nat(43631419));
        assert_eq!(p.rows[0].trivial_iteration, nat(21815710));
        assert!(p.rows[0].certain);
        assert_eq!(p.rows[1].trivial_iteration, nat(5453928));
        assert!(!p.rows[1].certain);
    }

    #[test]
    fn comparison_validates_input() {
        assert!(matches!(
            compare_algorithms(&nat(70400), &[2]),
            Err(Error::EvenInput(_))
        ));
        assert!(matches!(
            compare_algorithms(&nat(70399), &[3]),
            Err(Error::InvalidStep(3))
        ));
    }
}
