use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Parses `"a/b"`, `"a"` or `"-a/b"`. The unicode minus sign is accepted.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let cleaned = s.trim().replace('\u{2212}', "-");
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match cleaned.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (cleaned.as_str(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `base^exp` for a signed exponent, exactly.
pub fn pow_signed(base: i64, exp: i64) -> Rational {
    let b = int(base);
    if exp >= 0 {
        num_traits::pow(b, exp as usize)
    } else {
        num_traits::pow(b, exp.unsigned_abs() as usize).recip()
    }
}

/// Numerator of `x` expressed over denominator `n`, reduced mod `n`.
/// Fails when the denominator of `x` does not divide `n`.
pub fn residue_over(x: &Rational, n: u64) -> Option<u64> {
    let scaled = x * Rational::from_integer(BigInt::from(n));
    if !scaled.is_integer() {
        return None;
    }
    let r = scaled.to_integer().mod_floor(&BigInt::from(n));
    r.to_u64()
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn denom_u64(x: &Rational) -> Option<u64> {
    x.denom().to_u64()
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}
