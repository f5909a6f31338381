//! Scalar abstraction shared by every computation in the crate.
//!
//! Exact mode runs on [`BigRational`]; numeric mode runs on `f64` (or `f32`)
//! with absolute tolerances for argmax membership, simplex sums and
//! convergence. All comparisons go through the helpers here so that exact
//! mode never applies a tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True for arithmetic without rounding.
    const EXACT: bool;

    /// Actions within this distance of the maximum belong to the argmax set.
    fn argmax_tolerance() -> Self;

    /// Allowed deviation of a strategy's probability mass from 1.
    fn simplex_tolerance() -> Self;

    /// L-infinity step size under which fixed-point iteration is considered converged.
    fn convergence_tolerance() -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// Parses `p/q`, integer or decimal (optionally with exponent) text.
    fn parse_scalar(text: &str) -> Result<Self, Error>;

    /// Canonical text form: `p/q` for rationals, shortest round-trip decimal for floats.
    fn render(&self) -> String;

    fn to_f64(&self) -> f64;

    fn is_finite(&self) -> bool {
        true
    }

    fn max_of<'a>(values: impl IntoIterator<Item = &'a Self>) -> Option<Self> {
        values.into_iter().fold(None, |best: Option<Self>, v| match best {
            Some(b) if b >= *v => Some(b),
            _ => Some(v.clone()),
        })
    }
}

/// `a >= b` up to the argmax tolerance.
pub fn approx_ge<S: Scalar>(a: &S, b: &S) -> bool {
    a.clone() + S::argmax_tolerance() >= *b
}

/// `a > b` beyond the argmax tolerance.
pub fn strictly_greater<S: Scalar>(a: &S, b: &S) -> bool {
    a.clone() > b.clone() + S::argmax_tolerance()
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn argmax_tolerance() -> Self {
        Self::zero()
    }

    fn simplex_tolerance() -> Self {
        Self::zero()
    }

    fn convergence_tolerance() -> Self {
        Self::zero()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn parse_scalar(text: &str) -> Result<Self, Error> {
        parse_exact(text).ok_or_else(|| Error::MalformedRational(text.to_string()))
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn parse_exact(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], i64::from_str(&text[pos + 1..]).ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&all_digits).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(numer * power)
    } else {
        BigRational::new(numer, power)
    })
}

macro_rules! float_scalar {
    ($t:ty, $argmax:expr, $simplex:expr, $conv:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn argmax_tolerance() -> Self {
                $argmax
            }

            fn simplex_tolerance() -> Self {
                $simplex
            }

            fn convergence_tolerance() -> Self {
                $conv
            }

            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn parse_scalar(text: &str) -> Result<Self, Error> {
                let bad = || Error::MalformedRational(text.to_string());
                let value = match text.split_once('/') {
                    Some((p, q)) => {
                        let p: $t = p.trim().parse().map_err(|_| bad())?;
                        let q: $t = q.trim().parse().map_err(|_| bad())?;
                        if q == 0.0 {
                            return Err(bad());
                        }
                        p / q
                    }
                    None => text.trim().parse().map_err(|_| bad())?,
                };
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(bad())
                }
            }

            fn render(&self) -> String {
                format!("{}", self)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
        }
    };
}

float_scalar!(f64, 1e-9, 1e-12, 1e-10);
float_scalar!(f32, 1e-5, 1e-6, 1e-6);

/// Converts a float to the scalar type through its shortest decimal form, so
/// `0.1` becomes exactly `1/10` in exact mode.
pub fn from_decimal_f64<S: Scalar>(value: f64) -> Result<S, Error> {
    if !value.is_finite() {
        return Err(Error::MalformedRational(value.to_string()));
    }
    S::parse_scalar(&format!("{value}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::from_ratio(p, d)
    }

    #[test]
    fn parses_exact_forms() {
        assert_eq!(BigRational::parse_scalar("1/3").unwrap(), q(1, 3));
        assert_eq!(BigRational::parse_scalar("-2/4").unwrap(), q(-1, 2));
        assert_eq!(BigRational::parse_scalar("7").unwrap(), q(7, 1));
        assert_eq!(BigRational::parse_scalar("0.25").unwrap(), q(1, 4));
        assert_eq!(BigRational::parse_scalar("-1.5e-3").unwrap(), q(-3, 2000));
        assert_eq!(BigRational::parse_scalar("2e2").unwrap(), q(200, 1));
        assert_eq!(BigRational::parse_scalar(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1/0", "abc", "1/2/3", "1.2.3", "--1", "."] {
            assert!(BigRational::parse_scalar(bad).is_err(), "{bad}");
        }
        assert!(f64::parse_scalar("nan").is_err());
        assert!(f64::parse_scalar("1/0").is_err());
    }

    #[test]
    fn renders_as_fraction() {
        assert_eq!(q(1, 3).render(), "1/3");
        assert_eq!(q(2, 1).render(), "2/1");
        assert_eq!(q(0, 5).render(), "0/1");
        assert_eq!(0.5f64.render(), "0.5");
    }

    #[test]
    fn decimal_float_is_exact() {
        assert_eq!(from_decimal_f64::<BigRational>(0.1).unwrap(), q(1, 10));
    }

    #[test]
    fn tolerances_only_in_numeric_mode() {
        assert!(!strictly_greater(&(1.0 + 1e-12), &1.0f64));
        assert!(strictly_greater(&(q(1, 1) + q(1, 1_000_000_000_000)), &q(1, 1)));
        assert!(approx_ge(&(1.0 - 1e-12), &1.0f64));
        assert!(!approx_ge(&q(999_999, 1_000_000), &q(1, 1)));
    }
}
