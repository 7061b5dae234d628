//! Exact rational helpers used wherever capacities, grid points and
//! certificates must compare without rounding error.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a decimal (`0.25`, `1`, `1e-2`) or fraction (`1/3`) literal exactly.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational literal: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fracpart) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fracpart.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(fracpart.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all = format!("{whole}{fracpart}");
    let num: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    let scale = exp - fracpart.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Exact conversion of a finite `f64`.
pub fn from_f64(v: f64) -> Rational {
    Rational::from_float(v).expect("finite float")
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Smallest integer `>= r`, clamped at zero.
pub fn ceil_u64(r: &Rational) -> u64 {
    if r.is_negative() {
        return 0;
    }
    r.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Largest integer `<= r`, clamped at zero.
pub fn floor_u64(r: &Rational) -> u64 {
    if r.is_negative() {
        return 0;
    }
    r.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Integer part of `a / b` for positive rationals, computed on the
/// cross-multiplied numerators.
pub fn floor_div(a: &Rational, b: &Rational) -> u64 {
    let num = a.numer() * b.denom();
    let den = a.denom() * b.numer();
    if num.is_negative() || den.is_zero() {
        return 0;
    }
    num.div_floor(&den).to_u64().unwrap_or(u64::MAX)
}

/// `base^exp` by repeated squaring.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut result = Rational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    result
}

/// Human-readable rendering; integers print without a denominator.
pub fn display(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
