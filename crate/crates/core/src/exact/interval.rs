//! Outward-rounded fixed-point interval arithmetic.
//!
//! An [`Interval`] at precision `p` is a pair of integers `lo <= hi`
//! standing for `[lo / 2^p, hi / 2^p]`. Every operation rounds outward, so
//! the exact value of the computed expression always lies inside.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn scale(prec: u32) -> BigInt {
    BigInt::one() << prec as usize
}

fn shr_floor(x: &BigInt, bits: u32) -> BigInt {
    x.div_floor(&scale(bits))
}

fn shr_ceil(x: &BigInt, bits: u32) -> BigInt {
    x.div_ceil(&scale(bits))
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &(&s * &s) < n {
        s + 1
    } else {
        s
    }
}

impl Interval {
    pub fn zero(prec: u32) -> Self {
        Self::from_int(0, prec)
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        let x = BigInt::from(v) << prec as usize;
        Self { lo: x.clone(), hi: x, prec }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let n = q.numer() << prec as usize;
        let d = q.denom();
        Self { lo: n.div_floor(d), hi: n.div_ceil(d), prec }
    }

    pub fn from_bounds(lo: &Rational, hi: &Rational, prec: u32) -> Self {
        let a = Self::from_rational(lo, prec);
        let b = Self::from_rational(hi, prec);
        Self { lo: a.lo, hi: b.hi, prec }
    }

    /// Enclosure of an `f64` value widened by `radius`.
    pub fn from_f64_radius(x: f64, radius: f64, prec: u32) -> Self {
        let c = Rational::from_float(x).unwrap_or_else(Rational::zero);
        let r = Rational::from_float(radius.abs()).unwrap_or_else(Rational::zero);
        Self::from_bounds(&(&c - &r), &(&c + &r), prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lower(&self) -> Rational {
        Rational::new(self.lo.clone(), scale(self.prec))
    }

    pub fn upper(&self) -> Rational {
        Rational::new(self.hi.clone(), scale(self.prec))
    }

    pub fn lower_f64(&self) -> f64 {
        super::rational::to_f64(&self.lower())
    }

    pub fn upper_f64(&self) -> f64 {
        super::rational::to_f64(&self.upper())
    }

    pub fn mid_f64(&self) -> f64 {
        super::rational::to_f64(&Rational::new(&self.lo + &self.hi, scale(self.prec + 1)))
    }

    pub fn width_f64(&self) -> f64 {
        super::rational::to_f64(&Rational::new(&self.hi - &self.lo, scale(self.prec)))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        let s = q * Rational::from_integer(scale(self.prec));
        Rational::from_integer(self.lo.clone()) <= s && s <= Rational::from_integer(self.hi.clone())
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        debug_assert_eq!(self.prec, other.prec);
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Upper bound on `|x|` over the interval.
    pub fn mag(&self) -> Rational {
        let m = self.lo.abs().max(self.hi.abs());
        Rational::new(m, scale(self.prec))
    }

    pub fn neg(&self) -> Self {
        Self { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        Self { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = cands.iter().min().unwrap();
        let max = cands.iter().max().unwrap();
        Self { lo: shr_floor(min, self.prec), hi: shr_ceil(max, self.prec), prec: self.prec }
    }

    pub fn square(&self) -> Self {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let (lo, hi) = if self.contains_zero() {
            (BigInt::zero(), a.max(b))
        } else {
            (a.clone().min(b.clone()), a.max(b))
        };
        Self { lo: shr_floor(&lo, self.prec), hi: shr_ceil(&hi, self.prec), prec: self.prec }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        let a = &self.lo * &k;
        let b = &self.hi * &k;
        Self { lo: a.clone().min(b.clone()), hi: a.max(b), prec: self.prec }
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&Self::from_rational(q, self.prec))
    }

    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        if k < 0 {
            return self.neg().div_int(-k);
        }
        let k = BigInt::from(k);
        Self { lo: self.lo.div_floor(&k), hi: self.hi.div_ceil(&k), prec: self.prec }
    }

    /// `1/x`, or `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        if self.is_negative() {
            return self.neg().recip().map(|r| r.neg());
        }
        let num = scale(2 * self.prec);
        Some(Self { lo: num.div_floor(&self.hi), hi: num.div_ceil(&self.lo), prec: self.prec })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self.mul(&r))
    }

    /// Enclosure of `sqrt(q)` for a non-negative rational.
    pub fn sqrt_rational(q: &Rational, prec: u32) -> Self {
        assert!(!q.is_negative(), "sqrt of negative rational");
        let n = q.numer() << (2 * prec) as usize;
        let d = q.denom();
        let lo = n.div_floor(d).sqrt();
        let hi = ceil_sqrt(&n.div_ceil(d));
        Self { lo, hi, prec }
    }

    /// Widens the interval by `r` on both sides.
    pub fn widen(&self, r: &Rational) -> Self {
        let e = Self::from_rational(r, self.prec);
        Self { lo: &self.lo - &e.hi, hi: &self.hi + &e.hi, prec: self.prec }
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lower_f64(), self.upper_f64())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        debug_assert_eq!(re.prec, im.prec);
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Interval::zero(prec), Interval::zero(prec))
    }

    pub fn from_real(re: Interval) -> Self {
        let prec = re.prec;
        Self::new(re, Interval::zero(prec))
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Self::from_real(Interval::from_rational(q, prec))
    }

    pub fn precision(&self) -> u32 {
        self.re.prec
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Self::new(re, im)
    }

    pub fn scale(&self, r: &Interval) -> Self {
        Self::new(self.re.mul(r), self.im.mul(r))
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        Self::new(self.re.mul_rational(q), self.im.mul_rational(q))
    }

    pub fn norm_sqr(&self) -> Interval {
        self.re.square().add(&self.im.square())
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm_sqr().recip()?;
        Some(self.conj().scale(&n))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.recip().map(|r| self.mul(&r))
    }

    /// True when `0` is certainly not in the box.
    pub fn excludes_zero(&self) -> bool {
        !self.re.contains_zero() || !self.im.contains_zero()
    }

    pub fn contains(&self, re: &Rational, im: &Rational) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    pub fn mid_f64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.mid_f64(), self.im.mid_f64())
    }

    /// Largest side length of the box.
    pub fn width_f64(&self) -> f64 {
        self.re.width_f64().max(self.im.width_f64())
    }
}

impl fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

fn atan_inv(x: u64, prec: u32) -> (BigInt, u64) {
    // sum of (-1)^k / ((2k+1) x^(2k+1)) truncated, with the count of terms
    let one = scale(prec);
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let term = &one / (&power * BigInt::from(2 * k + 1));
        if term.is_zero() {
            break;
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &x2;
        k += 1;
    }
    (sum, k + 1)
}

thread_local! {
    static PI_CACHE: RefCell<HashMap<u32, Interval>> = RefCell::new(HashMap::new());
}

/// Enclosure of pi via Machin's formula.
pub fn pi(prec: u32) -> Interval {
    if let Some(v) = PI_CACHE.with(|c| c.borrow().get(&prec).cloned()) {
        return v;
    }
    let (a5, k5) = atan_inv(5, prec);
    let (a239, k239) = atan_inv(239, prec);
    let val = a5 * 16 - a239 * 4;
    let err = BigInt::from(16 * k5 + 4 * k239);
    let out = Interval { lo: &val - &err, hi: &val + &err, prec };
    PI_CACHE.with(|c| c.borrow_mut().insert(prec, out.clone()));
    out
}

/// `(cos x, sin x)` for an interval `x` inside `[0, 1]`.
fn cos_sin_small(x: &Interval) -> (Interval, Interval) {
    let prec = x.prec;
    let x2 = x.square();
    // outward rounding keeps every term at least one ulp wide, so stop a
    // few ulps above zero; the dropped tail is bounded by the first
    // omitted term since the series alternate with decreasing terms
    let tiny = Rational::new(BigInt::from(4), scale(prec));

    let mut sin = x.clone();
    let mut term = x.clone();
    let mut k: i64 = 1;
    loop {
        term = term.mul(&x2).div_int((2 * k) * (2 * k + 1)).neg();
        if term.mag() <= tiny {
            sin = sin.widen(&term.mag());
            break;
        }
        sin = sin.add(&term);
        k += 1;
    }

    let mut cos = Interval::from_int(1, prec);
    let mut term = Interval::from_int(1, prec);
    let mut k: i64 = 1;
    loop {
        term = term.mul(&x2).div_int((2 * k - 1) * (2 * k)).neg();
        if term.mag() <= tiny {
            cos = cos.widen(&term.mag());
            break;
        }
        cos = cos.add(&term);
        k += 1;
    }
    (cos, sin)
}

/// Enclosure of `e(x) = exp(2 pi i x)` for rational `x`. Multiples of `1/4`
/// are returned as exact points.
pub fn exp_2pi_i(x: &Rational, prec: u32) -> ComplexInterval {
    let f = super::rational::frac(x);
    let four = Rational::from_integer(BigInt::from(4));
    let quadrant = (&f * &four).floor();
    let r = &f - &quadrant / &four;
    let q = quadrant.to_integer().to_i64().unwrap_or(0);

    let (c, s) = if r.is_zero() {
        (Interval::from_int(1, prec), Interval::zero(prec))
    } else {
        let eighth = Rational::new(BigInt::one(), BigInt::from(8));
        let two_pi = pi(prec).mul_int(2);
        if r <= eighth {
            cos_sin_small(&two_pi.mul_rational(&r))
        } else {
            let quarter = Rational::new(BigInt::one(), BigInt::from(4));
            let (c2, s2) = cos_sin_small(&two_pi.mul_rational(&(quarter - &r)));
            (s2, c2)
        }
    };
    let (re, im) = match q {
        0 => (c, s),
        1 => (s.neg(), c),
        2 => (c.neg(), s.neg()),
        _ => (s, c.neg()),
    };
    ComplexInterval::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    #[test]
    fn pi_encloses_reference() {
        let p = pi(128);
        assert!(p.lower_f64() <= std::f64::consts::PI && std::f64::consts::PI <= p.upper_f64());
        assert!(p.width_f64() < 1e-35);
        // 355/113 is above pi
        assert!(!p.contains(&rat(355, 113)));
    }

    #[test]
    fn roots_of_unity_enclosures() {
        let z = exp_2pi_i(&rat(1, 4), 80);
        assert!(z.contains(&rat(0, 1), &rat(1, 1)));
        let z = exp_2pi_i(&rat(1, 3), 80);
        assert!(z.re.contains(&rat(-1, 2)));
        assert!((z.im.mid_f64() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let z = exp_2pi_i(&rat(7, 8), 80);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z.re.mid_f64() - h).abs() < 1e-15 && (z.im.mid_f64() + h).abs() < 1e-15);
        let z = exp_2pi_i(&rat(-5, 12), 80);
        assert!((z.mid_f64() - num_complex::Complex64::from_polar(1.0, -5.0 * std::f64::consts::PI / 6.0)).norm() < 1e-15);
    }

    #[test]
    fn reciprocal_and_sqrt() {
        let x = Interval::from_rational(&rat(3, 7), 64);
        let r = x.recip().unwrap();
        assert!(r.contains(&rat(7, 3)));
        assert!(Interval::zero(64).recip().is_none());
        let s = Interval::sqrt_rational(&rat(9, 4), 64);
        assert!(s.contains(&rat(3, 2)));
        let s = Interval::sqrt_rational(&rat(3, 1), 64);
        assert!((s.mid_f64() - 3f64.sqrt()).abs() < 1e-15);
        let z = ComplexInterval::new(Interval::from_int(3, 64), Interval::from_int(4, 64));
        let w = z.recip().unwrap();
        assert!(w.contains(&rat(3, 25), &rat(-4, 25)));
    }
}
