//! Exact rational arithmetic for all delivery-time quantities.
//!
//! Every NDT value, bound, gap ratio and cache size in this crate is a
//! [`Rational`] backed by arbitrary-precision integers. Values like 8/5,
//! 4/3 or 5/4 are carried exactly; comparison is exact cross-multiplication
//! and nothing in the bound computations ever touches floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number (reduced, denominator > 0 by construction).
pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn rint<T: Into<i64>>(n: T) -> Rational {
    Rational::from_integer(BigInt::from(n.into()))
}

/// Integer (usize) as an exact rational.
pub fn rusize(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Smaller of two rationals (exact comparison).
pub fn rmin(a: Rational, b: Rational) -> Rational {
    if a <= b { a } else { b }
}

/// Larger of two rationals (exact comparison).
pub fn rmax(a: Rational, b: Rational) -> Rational {
    if a >= b { a } else { b }
}

/// Approximate `f64` value, for human-readable echo only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// True if `r` is a nonnegative integer.
pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

/// Floor of a nonnegative rational as usize. Panics on negatives that
/// do not fit.
pub fn floor_usize(r: &Rational) -> usize {
    r.floor()
        .to_integer()
        .to_usize()
        .expect("nonnegative value expected")
}

/// Error for cache-size strings that are not exact fractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl std::fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "not an exact fraction `a/b` or integer: {}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parse `a/b` or a plain integer. Floats are rejected so exactness is
/// preserved end to end.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    let bad = || ParseRationalError(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// `num/den` string form used in all machine-readable output.
pub fn fmt_frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Least `f >= 1` such that `f * r` is an integer, i.e. the denominator
/// of the reduced form. Used for fragmentation factors.
pub fn denominator_u64(r: &Rational) -> u64 {
    r.denom()
        .to_u64()
        .expect("denominator fits u64 at these scales")
}

/// |r| as rational.
pub fn rabs(r: &Rational) -> Rational {
    r.abs()
}

/// Serde helper: rationals go out as `num/den` strings, never floats.
pub fn serde_frac<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_frac(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("4/5").unwrap(), rat(4, 5));
        assert_eq!(parse_rational("0").unwrap(), zero());
        assert_eq!(parse_rational("1").unwrap(), one());
        assert_eq!(parse_rational("-3/9").unwrap(), rat(-1, 3));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn display_is_reduced_fraction() {
        assert_eq!(rat(8, 10).to_string(), "4/5");
        assert_eq!(rat(4, 1).to_string(), "4");
        assert_eq!(fmt_frac(&rat(4, 1)), "4/1");
        assert_eq!(fmt_frac(&rat(-8, 10)), "-4/5");
    }

    proptest! {
        // Every arithmetic result is normalized: positive denominator and
        // coprime numerator/denominator.
        #[test]
        fn ops_stay_normalized(an in -200i64..200, ad in 1i64..60,
                               bn in -200i64..200, bd in 1i64..60) {
            let a = rat(an, ad);
            let b = rat(bn, bd);
            let mut outs = vec![a.clone() + b.clone(), a.clone() - b.clone(), a.clone() * b.clone()];
            if bn != 0 {
                outs.push(a.clone() / b.clone());
            }
            outs.push(rmin(a.clone(), b.clone()));
            outs.push(rmax(a, b));
            for r in outs {
                prop_assert!(r.denom() > &num_bigint::BigInt::from(0));
                let g = num_integer::Integer::gcd(r.numer(), r.denom());
                prop_assert_eq!(g, num_bigint::BigInt::from(1));
            }
        }

        // Exact comparison agrees with cross-multiplication.
        #[test]
        fn compare_is_cross_multiplication(an in -200i64..200, ad in 1i64..60,
                                           bn in -200i64..200, bd in 1i64..60) {
            let a = rat(an, ad);
            let b = rat(bn, bd);
            let lhs = a < b;
            let rhs = (an as i128 * bd as i128) < (bn as i128 * ad as i128);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
