//! Numeric abstraction shared by every formula and oracle.
//!
//! Two realizations exist: [`Exact`] (arbitrary-precision rationals) and
//! `f64`. Everything in this crate is written once against [`Scalar`].

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::MomentError;

/// Exact rational scalar.
pub type Exact = BigRational;

/// Which realization of [`Scalar`] produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;

    fn from_u64(v: u64) -> Self;

    fn from_biguint(v: &BigUint) -> Self;

    /// `num / den`; `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Allowed excess of `Σx` over one when validating a probability vector.
    fn simplex_slack() -> Self;

    fn to_f64(&self) -> f64;

    /// Parses `"p/q"`, an integer, or a decimal literal.
    fn parse_literal(s: &str) -> Result<Self, MomentError>;

    /// `"p/q"` (or `"p"`) in exact mode, shortest round-trip decimal in float mode.
    fn render(&self) -> String;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powu(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_biguint(v: &BigUint) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }

    fn simplex_slack() -> Self {
        1e-12
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_literal(s: &str) -> Result<Self, MomentError> {
        let s = s.trim();
        let bad = || MomentError::Parse(format!("invalid number literal {s:?}"));
        let v = match s.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| bad())?;
                let q: f64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0.0 {
                    return Err(bad());
                }
                p / q
            }
            None => s.parse().map_err(|_| bad())?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    }

    fn render(&self) -> String {
        // Display is the shortest representation that parses back to the same bits.
        format!("{self}")
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powu(&self, exp: u32) -> Self {
        self.powi(exp as i32)
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_biguint(v: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(v.clone()))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn simplex_slack() -> Self {
        Self::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_literal(s: &str) -> Result<Self, MomentError> {
        parse_exact(s.trim())
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

fn parse_exact(s: &str) -> Result<BigRational, MomentError> {
    let bad = || MomentError::Parse(format!("invalid rational literal {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    // Decimal: optional sign, digits, optional fraction, optional exponent.
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&joined).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// `m(m−1)…(m−k+1)` as a scalar; exactly zero when `k > m`.
pub fn falling_factorial<S: Scalar>(m: u64, k: u32) -> S {
    if u64::from(k) > m {
        return S::zero();
    }
    (0..u64::from(k)).fold(S::one(), |acc, i| acc * S::from_u64(m - i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Exact {
        Exact::from_ratio(p, r)
    }

    #[test]
    fn exact_literals() {
        assert_eq!(Exact::parse_literal("1/2").unwrap(), q(1, 2));
        assert_eq!(Exact::parse_literal("2/4").unwrap(), q(1, 2));
        assert_eq!(Exact::parse_literal("3").unwrap(), q(3, 1));
        assert_eq!(Exact::parse_literal("0.7").unwrap(), q(7, 10));
        assert_eq!(Exact::parse_literal("-.25").unwrap(), q(-1, 4));
        assert_eq!(Exact::parse_literal("1.5e-1").unwrap(), q(3, 20));
        assert!(Exact::parse_literal("1/0").is_err());
        assert!(Exact::parse_literal("abc").is_err());
        assert!(Exact::parse_literal(".").is_err());
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse_literal("0.7").unwrap(), 0.7);
        assert!(f64::parse_literal("nan").is_err());
        assert!(f64::parse_literal("1/0").is_err());
    }

    #[test]
    fn render_forms() {
        assert_eq!(q(-1, 4).render(), "-1/4");
        assert_eq!(q(6, 3).render(), "2");
        assert_eq!(1.5f64.render(), "1.5");
        assert_eq!((-0.25f64).render(), "-0.25");
    }

    #[test]
    fn falling_factorial_edges() {
        assert_eq!(falling_factorial::<Exact>(5, 0), q(1, 1));
        assert_eq!(falling_factorial::<Exact>(5, 3), q(60, 1));
        assert_eq!(falling_factorial::<Exact>(2, 3), q(0, 1));
        assert_eq!(falling_factorial::<f64>(4, 4), 24.0);
    }
}
