//! Probability values in dual representation.
//!
//! Every ground-truth probability in this crate travels as a [`Prob2`]: a
//! base-2 logarithm (always present, `-inf` allowed for an exactly-zero
//! probability) plus an optional exact rational. The log form scales to
//! events far below the smallest positive `f64`; the rational form supports
//! zero-tolerance comparisons. When both are present they must agree to
//! within `LOG2_AGREEMENT_TOL`.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Maximum allowed discrepancy between the stored `log2` field and the
/// base-2 logarithm of the stored exact rational.
pub const LOG2_AGREEMENT_TOL: f64 = 1e-9;

/// A probability carried as `log2` (exact to ~1e-13) with an optional
/// exact rational witness in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prob2 {
    log2: f64,
    exact: Option<BigRational>,
}

impl Prob2 {
    /// Probability 1.
    pub fn one() -> Self {
        Prob2 {
            log2: 0.0,
            exact: Some(BigRational::one()),
        }
    }

    /// Probability 0 (`log2 = -inf`).
    pub fn zero() -> Self {
        Prob2 {
            log2: f64::NEG_INFINITY,
            exact: Some(BigRational::zero()),
        }
    }

    /// Build from an exact rational in `[0, 1]`; the log field is derived.
    ///
    /// Panics if the rational lies outside the unit interval — callers are
    /// expected to produce genuine probabilities.
    pub fn from_exact(value: BigRational) -> Self {
        assert!(
            !value.is_negative() && value <= BigRational::one(),
            "probability outside [0, 1]"
        );
        let log2 = log2_big_ratio(&value);
        Prob2 {
            log2,
            exact: Some(value),
        }
    }

    /// Build from a base-2 logarithm in `[-inf, 0]` with no exact witness.
    ///
    /// A tiny positive argument (rounding noise from log-space summation)
    /// is clamped to 0; anything larger panics.
    pub fn from_log2(log2: f64) -> Self {
        assert!(
            log2 <= LOG2_AGREEMENT_TOL,
            "log2 probability {log2} is positive"
        );
        Prob2 {
            log2: log2.min(0.0),
            exact: None,
        }
    }

    /// Base-2 logarithm of the probability (`-inf` for zero).
    pub fn log2(&self) -> f64 {
        self.log2
    }

    /// Exact rational value, when the computation ran in rational mode.
    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    /// Probability as `f64` (underflows to 0 below ~2^-1074).
    pub fn to_f64(&self) -> f64 {
        self.log2.exp2()
    }

    /// Decimal scientific rendering that survives values far below the
    /// `f64` underflow threshold, e.g. `"2.328306e-10"` or `"9.1e-617"`.
    pub fn to_sci_string(&self) -> String {
        sci_from_log2(self.log2)
    }
}

/// Render `2^log2` in decimal scientific notation without ever forming the
/// value as an `f64` (so exponents beyond ±308 still print).
pub fn sci_from_log2(log2: f64) -> String {
    if log2 == f64::NEG_INFINITY {
        return "0".to_string();
    }
    let d = log2 * std::f64::consts::LOG10_2;
    let mut e = d.floor();
    let mut m = 10f64.powf(d - e);
    // Guard against mantissa rounding to 10.0.
    if m >= 10.0 {
        m /= 10.0;
        e += 1.0;
    }
    format!("{m:.6}e{e}")
}

/// `log2` of a positive big integer, accurate to roughly one ulp.
///
/// The top 63 bits are converted exactly to `f64`; truncating the rest
/// perturbs the logarithm by at most `2^-62 / ln 2`.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    assert!(bits > 0, "log2 of zero");
    if bits <= 63 {
        return (x.to_u64().expect("fits in u64") as f64).log2();
    }
    let shift = bits - 63;
    let top = (x >> shift).to_u64().expect("63 bits fit in u64");
    (top as f64).log2() + shift as f64
}

/// `log2` of a non-negative big rational (`-inf` for zero).
pub fn log2_big_ratio(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    assert!(!r.is_negative(), "log2 of a negative rational");
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    log2_biguint(num) - log2_biguint(den)
}

/// Log-space addition: `log2(2^a + 2^b)`.
pub fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Log-space summation of a slice (numerically stable, deterministic order).
pub fn log2_sum(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0f64;
    for &t in terms {
        acc += (t - m).exp2();
    }
    m + acc.log2()
}

/// Parse a rational given as `"a/b"` or a bare integer string.
pub fn parse_ratio64(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<i64> {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::Range(format!("`{t}` is not an integer")))
    };
    match s.split_once('/') {
        None => Ok(Rational64::from_integer(parse_int(s)?)),
        Some((a, b)) => {
            let num = parse_int(a)?;
            let den = parse_int(b)?;
            if den == 0 {
                return Err(Error::Range(format!("`{s}` has a zero denominator")));
            }
            Ok(Rational64::new(num, den))
        }
    }
}

/// Render a rational as `"a/b"` (or `"a"` when the denominator is 1).
pub fn ratio64_string(r: Rational64) -> String {
    if r.denom() == &1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Widen a machine rational to a big rational.
pub fn big_ratio(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Exact power of a big rational with a (possibly negative) machine exponent.
pub fn big_ratio_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let e = exp.unsigned_abs();
    assert!(e <= u32::MAX as u64, "exponent too large");
    let num = base.numer().pow(e as u32);
    let den = base.denom().pow(e as u32);
    let p = BigRational::new(num, den);
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

/// `2^-e` as an exact big rational (`e >= 0`).
pub fn pow2_neg(e: u64) -> BigRational {
    assert!(e <= u32::MAX as u64, "exponent too large");
    BigRational::new(BigInt::one(), BigInt::from(2u32).pow(e as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn exact_and_log_agree_on_simple_fractions() {
        for (num, den) in [(1i64, 2i64), (1, 1024), (3, 8), (26333, 65536), (1, 1)] {
            let r = BigRational::new(BigInt::from(num), BigInt::from(den));
            let p = Prob2::from_exact(r);
            let expect = (num as f64 / den as f64).log2();
            assert!(
                (p.log2() - expect).abs() < LOG2_AGREEMENT_TOL,
                "log2({num}/{den}) = {} vs {expect}",
                p.log2()
            );
        }
    }

    #[test]
    fn zero_and_one_are_exact() {
        assert_eq!(Prob2::zero().log2(), f64::NEG_INFINITY);
        assert_eq!(Prob2::one().log2(), 0.0);
        assert_eq!(Prob2::zero().to_f64(), 0.0);
        assert_eq!(Prob2::one().to_f64(), 1.0);
    }

    #[test]
    fn log2_of_huge_integers_is_accurate() {
        // 2^1000 exactly.
        let x = BigUint::from(1u32) << 1000;
        assert!((log2_biguint(&x) - 1000.0).abs() < 1e-9);
        // 3^500: compare against 500 * log2(3).
        let y = BigUint::from(3u32).pow(500);
        assert!((log2_biguint(&y) - 500.0 * 3f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn log2_sum_matches_direct_summation() {
        let terms: Vec<f64> = [0.125f64, 0.25, 0.0625, 0.03125]
            .iter()
            .map(|v| v.log2())
            .collect();
        let direct: f64 = 0.125 + 0.25 + 0.0625 + 0.03125;
        assert!((log2_sum(&terms) - direct.log2()).abs() < 1e-12);
        assert_eq!(log2_sum(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn parse_and_print_rationals() {
        assert_eq!(parse_ratio64("1/2").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_ratio64("7").unwrap(), Rational64::from_integer(7));
        assert_eq!(parse_ratio64(" 3 / 8 ").unwrap(), Rational64::new(3, 8));
        assert!(parse_ratio64("1/0").is_err());
        assert!(parse_ratio64("a/b").is_err());
        assert_eq!(ratio64_string(Rational64::new(3, 8)), "3/8");
        assert_eq!(ratio64_string(Rational64::from_integer(4)), "4");
    }

    #[test]
    fn scientific_rendering_handles_tiny_values() {
        // 2^-10 = 9.765625e-4
        let s = sci_from_log2(-10.0);
        assert!(s.starts_with("9.765625e-4"), "{s}");
        // A value far below f64 underflow still renders.
        let t = sci_from_log2(-2048.0);
        assert!(t.ends_with("e-617"), "{t}");
        assert_eq!(sci_from_log2(f64::NEG_INFINITY), "0");
    }

    #[test]
    fn pow_helpers_are_exact() {
        let half = BigRational::from_f64(0.5).unwrap();
        assert_eq!(big_ratio_pow(&half, 10), pow2_neg(10));
        assert_eq!(big_ratio_pow(&half, -3), BigRational::from_integer(8.into()));
        assert_eq!(big_ratio_pow(&half, 0), BigRational::one());
    }
}
