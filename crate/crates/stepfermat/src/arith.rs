//! Exact integer kernel: square roots, squareness tests, and strict decimal
//! parsing for [`Natural`] values.
//!
//! Everything is bit-exact at any operand size; floating point never touches
//! a result. The perfect-square test is the hot path of every search loop,
//! so it rejects non-squares through cheap residue filters before paying for
//! a full integer square root.

use num_integer::Integer;

use crate::{Error, Natural, Result};

/// Largest integer `r` with `r * r <= n`.
///
/// Backed by an exact integer Newton iteration; the result is correct for
/// operands of any size.
///
/// ```
/// use stepfermat::{arith, Natural};
/// assert_eq!(arith::floor_sqrt(&Natural::from(70399u32)), Natural::from(265u32));
/// assert_eq!(arith::floor_sqrt(&Natural::from(0u32)), Natural::from(0u32));
/// ```
pub fn floor_sqrt(n: &Natural) -> Natural {
    n.sqrt()
}

/// Smallest integer strictly above `sqrt(n)`, i.e. `floor_sqrt(n) + 1`.
///
/// Defined only for non-squares, which is where the searches need it: it is
/// the first `x` with `x^2 - n > 0`. A perfect square is an error so callers
/// are forced to handle the square case explicitly.
///
/// ```
/// use stepfermat::{arith, Natural};
/// assert_eq!(arith::ceil_sqrt_strict(&Natural::from(70399u32)).unwrap(), 266u32.into());
/// assert!(arith::ceil_sqrt_strict(&Natural::from(65025u32)).is_err());
/// ```
pub fn ceil_sqrt_strict(n: &Natural) -> Result<Natural> {
    let r = floor_sqrt(n);
    if &r * &r == *n {
        return Err(Error::PerfectSquare(n.clone()));
    }
    Ok(r + 1u32)
}

/// `Some(sqrt(n))` when `n` is a perfect square, `None` otherwise.
///
/// Non-squares are mostly rejected by residue filters modulo 64, 63, 65 and
/// 11 (about 99% of uniform inputs fail one of them); survivors fall back to
/// an exact root-and-square verification.
///
/// ```
/// use stepfermat::{arith, Natural};
/// assert_eq!(arith::exact_sqrt(&Natural::from(65025u32)), Some(Natural::from(255u32)));
/// assert_eq!(arith::exact_sqrt(&Natural::from(890u32)), None);
/// ```
pub fn exact_sqrt(n: &Natural) -> Option<Natural> {
    if !square_residue_plausible(n) {
        return None;
    }
    let r = floor_sqrt(n);
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// True when `n` is a perfect square.
pub fn is_perfect_square(n: &Natural) -> bool {
    exact_sqrt(n).is_some()
}

/// Parse a canonical decimal natural number.
///
/// Strict on purpose, since these strings cross the CLI and JSON boundary:
/// ASCII digits only, no sign, no whitespace, no leading zeros (except `"0"`
/// itself).
///
/// ```
/// use stepfermat::{arith, Natural};
/// assert_eq!(arith::parse_natural("70399").unwrap(), Natural::from(70399u32));
/// assert!(arith::parse_natural("007").is_err());
/// assert!(arith::parse_natural("+7").is_err());
/// assert!(arith::parse_natural("").is_err());
/// ```
pub fn parse_natural(s: &str) -> Result<Natural> {
    if s.is_empty() {
        return Err(Error::InvalidDecimal(s.into(), "empty string"));
    }
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidDecimal(s.into(), "contains a non-digit"));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(Error::InvalidDecimal(s.into(), "leading zero"));
    }
    // Safe after validation: the representation is plain base-10 digits.
    Ok(Natural::parse_bytes(s.as_bytes(), 10).expect("validated decimal"))
}

/// Validate the common search precondition: `n` odd, at least 3, and not a
/// perfect square. Returns `floor_sqrt(n)` so callers don't recompute it.
pub(crate) fn require_odd_nonsquare(n: &Natural) -> Result<Natural> {
    if n.is_even() {
        return Err(Error::EvenInput(n.clone()));
    }
    if *n < Natural::from(3u32) {
        return Err(Error::TooSmall(n.clone()));
    }
    let r = floor_sqrt(n);
    if &r * &r == *n {
        return Err(Error::PerfectSquare(n.clone()));
    }
    Ok(r)
}

// Bitmask of quadratic residues modulo a small modulus: bit r is set when
// some square is congruent to r.
const fn square_mask(m: u32) -> u128 {
    let mut mask = 0u128;
    let mut i = 0u64;
    while i < m as u64 {
        mask |= 1 << ((i * i) % m as u64);
        i += 1;
    }
    mask
}

const SQUARES_MOD_64: u128 = square_mask(64);
const SQUARES_MOD_63: u128 = square_mask(63);
const SQUARES_MOD_65: u128 = square_mask(65);
const SQUARES_MOD_11: u128 = square_mask(11);

// 63 * 65 * 11; pairwise coprime, and small enough that the Horner fold in
// `small_mod` cannot overflow a u64.
const FILTER_MODULUS: u64 = 45_045;

/// `n mod m` without allocating, for `m^2 + 2^32 < 2^64`.
///
/// Folds the base-2^64 digits little-endian: `n = sum d_j * (2^64)^j`, so
/// `n mod m = sum (d_j mod m) * ((2^64)^j mod m) mod m`.
pub(crate) fn small_mod(n: &Natural, m: u64) -> u64 {
    debug_assert!(m > 0 && m < (1 << 31));
    let base = (u64::MAX % m + 1) % m; // 2^64 mod m
    let mut acc = 0u64;
    let mut pw = 1u64;
    for d in n.iter_u64_digits() {
        acc = (acc + (d % m) * pw) % m;
        pw = (pw * base) % m;
    }
    acc
}

fn square_residue_plausible(n: &Natural) -> bool {
    let low = n.iter_u64_digits().next().unwrap_or(0);
    if SQUARES_MOD_64 & (1 << (low & 63)) == 0 {
        return false;
    }
    let r = small_mod(n, FILTER_MODULUS);
    SQUARES_MOD_63 & (1 << (r % 63)) != 0
        && SQUARES_MOD_65 & (1 << (r % 65)) != 0
        && SQUARES_MOD_11 & (1 << (r % 11)) != 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    // Independent oracle: classic bit-pair (digit-by-digit base-4) square
    // root. Deliberately shares nothing with the Newton-based path.
    fn bit_pair_sqrt(n: &Natural) -> Natural {
        let mut root = Natural::zero();
        let mut rem = Natural::zero();
        let bits = n.bits();
        let mut k = bits + (bits & 1); // round up to an even bit count
        while k >= 2 {
            k -= 2;
            // Shift in the next bit pair of n.
            let pair = (n.bit(k + 1) as u8) << 1 | n.bit(k) as u8;
            rem = (rem << 2u32) + Natural::from(pair);
            let candidate = (&root << 2u32) + Natural::from(1u32);
            root <<= 1u32;
            if candidate <= rem {
                rem -= candidate;
                root += 1u32;
            }
        }
        root
    }

    #[test]
    fn floor_sqrt_small_exhaustive() {
        // Every n below 4096 against the oracle, including squares.
        for n in 0u32..4096 {
            let big = Natural::from(n);
            assert_eq!(floor_sqrt(&big), bit_pair_sqrt(&big), "n = {n}");
        }
    }

    #[test]
    fn floor_sqrt_frozen_values() {
        let cases: [(&str, &str); 6] = [
            ("70399", "265"),
            ("70741", "265"),
            ("8612553881", "92803"),
            ("5357811983", "73197"),
            ("3986359420010593", "63137622"),
            ("87281521", "9342"),
        ];
        for (n, r) in cases {
            assert_eq!(
                floor_sqrt(&parse_natural(n).unwrap()),
                parse_natural(r).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn ceil_sqrt_strict_behavior() {
        assert_eq!(
            ceil_sqrt_strict(&Natural::from(70399u32)).unwrap(),
            Natural::from(266u32)
        );
        assert_eq!(
            ceil_sqrt_strict(&Natural::from(2u32)).unwrap(),
            Natural::from(2u32)
        );
        assert_eq!(
            ceil_sqrt_strict(&Natural::from(36u32)),
            Err(Error::PerfectSquare(Natural::from(36u32)))
        );
        assert_eq!(
            ceil_sqrt_strict(&Natural::from(0u32)),
            Err(Error::PerfectSquare(Natural::from(0u32)))
        );
    }

    #[test]
    fn exact_sqrt_frozen_values() {
        assert_eq!(
            exact_sqrt(&Natural::from(65025u32)),
            Some(Natural::from(255u32))
        );
        assert_eq!(
            exact_sqrt(&Natural::from(123201u32)),
            Some(Natural::from(351u32))
        );
        assert_eq!(exact_sqrt(&Natural::from(890u32)), None);
        assert_eq!(exact_sqrt(&Natural::from(357u32)), None);
        assert_eq!(exact_sqrt(&Natural::from(0u32)), Some(Natural::zero()));
        assert_eq!(exact_sqrt(&Natural::from(1u32)), Some(Natural::from(1u32)));
    }

    #[test]
    fn exact_sqrt_small_exhaustive() {
        // The residue filters must never reject a true square.
        for n in 0u64..20_000 {
            let big = Natural::from(n);
            let expected = {
                let r = bit_pair_sqrt(&big);
                if &r * &r == big { Some(r) } else { None }
            };
            assert_eq!(exact_sqrt(&big), expected, "n = {n}");
        }
    }

    #[test]
    fn parse_natural_rules() {
        assert_eq!(parse_natural("0").unwrap(), Natural::zero());
        assert_eq!(
            parse_natural("3986359420010593").unwrap(),
            Natural::from(3986359420010593u64)
        );
        for bad in ["", "007", "+7", "-7", " 7", "7 ", "7a", "1_000", "٣"] {
            assert!(parse_natural(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn small_mod_matches_bignum_rem() {
        let n = parse_natural("398635942001059339863594200105933986359420010593").unwrap();
        for m in [3u64, 45_045, 64, 12345, 2_000_000_011] {
            let expected = (&n % Natural::from(m))
                .iter_u64_digits()
                .next()
                .unwrap_or(0);
            assert_eq!(small_mod(&n, m), expected, "m = {m}");
        }
    }

    proptest! {
        #[test]
        fn sqrt_matches_oracle(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
            let n = Natural::from_bytes_le(&bytes);
            let r = floor_sqrt(&n);
            prop_assert_eq!(&r, &bit_pair_sqrt(&n));
            // Defining inequalities, checked exactly.
            prop_assert!(&r * &r <= n);
            let r1 = &r + 1u32;
            prop_assert!(&r1 * &r1 > n);
        }

        #[test]
        fn square_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 1..256)) {
            let r = Natural::from_bytes_le(&bytes);
            let sq = &r * &r;
            prop_assert_eq!(exact_sqrt(&sq), Some(r));
        }

        #[test]
        fn parse_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            let n = Natural::from_bytes_le(&bytes);
            prop_assert_eq!(parse_natural(&n.to_string()).unwrap(), n);
        }

        #[test]
        fn small_mod_agrees(bytes in proptest::collection::vec(any::<u8>(), 0..128), m in 1u64..(1 << 31)) {
            let n = Natural::from_bytes_le(&bytes);
            let expected = (&n % Natural::from(m)).iter_u64_digits().next().unwrap_or(0);
            prop_assert_eq!(small_mod(&n, m), expected);
        }
    }
}
