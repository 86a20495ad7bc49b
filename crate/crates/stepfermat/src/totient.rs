//! Euler's totient from a known factorization, and the pair totient the
//! stepped search is built on.
//!
//! For a divisor pair `a * b = n` the pair totient is `(a - 1)(b - 1)`:
//! Euler's totient as if both members were prime, whatever they really are.
//! Two identities make it useful for searching:
//!
//! - `n - pair_phi + 1 = a + b`, so knowing the pair totient locates the
//!   probe `x = (a + b) / 2` that exposes the pair;
//! - over all divisor pairs of `n`, the closest pair (largest `b`) has the
//!   largest pair totient, and the trivial pair `(n, 1)` has pair totient 0.

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::{screening, Error, Natural, Result};

/// A prime together with its exponent in a factorization.
///
/// Construction checks primality (exactly below the Miller-Rabin
/// deterministic threshold) and requires exponent >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimePower {
    prime: Natural,
    exponent: u32,
}

impl PrimePower {
    pub fn new(prime: Natural, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::ZeroExponent);
        }
        if !screening::is_probable_prime(&prime) {
            return Err(Error::NotPrime(prime));
        }
        Ok(Self { prime, exponent })
    }

    pub fn prime(&self) -> &Natural {
        &self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `p^k`.
    pub fn value(&self) -> Natural {
        self.prime.pow(self.exponent)
    }
}

/// An ordered divisor pair `(a, b)` with `a >= b >= 1`, both odd.
///
/// In the Fermat parameterization `n = x^2 - y^2` the pair corresponds to
/// `x = (a + b) / 2`, `y = (a - b) / 2`; both are integers exactly because
/// the members are odd. The constructor normalizes order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FactorPair {
    a: Natural,
    b: Natural,
}

impl FactorPair {
    pub fn new(first: Natural, second: Natural) -> Result<Self> {
        if first.is_even() || second.is_even() || first < Natural::one() || second < Natural::one()
        {
            return Err(Error::InvalidPair { a: first, b: second });
        }
        let (a, b) = if first >= second {
            (first, second)
        } else {
            (second, first)
        };
        Ok(Self { a, b })
    }

    /// Reconstruct the pair from probe coordinates: `(x + y, x - y)`.
    /// Requires `y < x` and `x`, `y` of opposite parity (so both members
    /// come out odd), which is automatic when `x^2 - y^2` is odd.
    pub fn from_probe(x: &Natural, y: &Natural) -> Result<Self> {
        if y >= x {
            return Err(Error::InvalidPair {
                a: x + y,
                b: Natural::one(),
            });
        }
        Self::new(x + y, x - y)
    }

    /// Larger member.
    pub fn a(&self) -> &Natural {
        &self.a
    }

    /// Smaller member.
    pub fn b(&self) -> &Natural {
        &self.b
    }

    /// `a * b`.
    pub fn product(&self) -> Natural {
        &self.a * &self.b
    }

    /// True when this pair is a divisor pair of `n`.
    pub fn is_pair_of(&self, n: &Natural) -> bool {
        self.product() == *n
    }

    /// True for `(n, 1)`.
    pub fn is_trivial(&self) -> bool {
        self.b.is_one()
    }

    /// `x = (a + b) / 2`, the probe at which the search exposes this pair.
    pub fn midpoint(&self) -> Natural {
        (&self.a + &self.b) >> 1
    }

    /// `y = (a - b) / 2`.
    pub fn half_gap(&self) -> Natural {
        (&self.a - &self.b) >> 1
    }
}

impl std::fmt::Display for FactorPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename = "FactorPair")]
struct PairWire {
    #[serde(with = "crate::serde_decimal::natural")]
    a: Natural,
    #[serde(with = "crate::serde_decimal::natural")]
    b: Natural,
}

impl Serialize for FactorPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairWire {
            a: self.a.clone(),
            b: self.b.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FactorPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PairWire::deserialize(d)?;
        FactorPair::new(w.a, w.b).map_err(serde::de::Error::custom)
    }
}

/// Euler's totient from a full factorization: `prod p^(k-1) * (p - 1)`.
///
/// The factor list must not repeat a prime.
///
/// ```
/// use stepfermat::{totient::{euler_phi, PrimePower}, Natural};
/// let factors = [
///     PrimePower::new(Natural::from(7u32), 1).unwrap(),
///     PrimePower::new(Natural::from(89u32), 1).unwrap(),
///     PrimePower::new(Natural::from(113u32), 1).unwrap(),
/// ];
/// assert_eq!(euler_phi(&factors).unwrap(), Natural::from(59136u32));
/// ```
pub fn euler_phi(factors: &[PrimePower]) -> Result<Natural> {
    for (idx, f) in factors.iter().enumerate() {
        if factors[..idx].iter().any(|g| g.prime() == f.prime()) {
            return Err(Error::DuplicatePrime(f.prime().clone()));
        }
    }
    let mut phi = Natural::one();
    for f in factors {
        phi *= f.prime().pow(f.exponent() - 1) * (f.prime() - 1u32);
    }
    Ok(phi)
}

/// The pair totient `(a - 1)(b - 1)`.
///
/// ```
/// use stepfermat::{totient, Natural};
/// let pair = totient::FactorPair::new(623u32.into(), 113u32.into()).unwrap();
/// assert_eq!(totient::pair_phi(&pair), Natural::from(69664u32));
/// ```
pub fn pair_phi(pair: &FactorPair) -> Natural {
    (pair.a() - 1u32) * (pair.b() - 1u32)
}

/// Recover the member sum from the pair totient: `n - pair_phi + 1 = a + b`
/// when the pair divides `n`.
pub fn sum_from_pair_phi(n: &Natural, pair_phi: &Natural) -> Result<Natural> {
    if pair_phi > n {
        return Err(Error::PairPhiTooLarge {
            pair_phi: pair_phi.clone(),
            n: n.clone(),
        });
    }
    Ok(n - pair_phi + 1u32)
}
