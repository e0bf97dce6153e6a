//! Exact arithmetic in cyclotomic fields `Q(zeta_n)`.
//!
//! Elements are stored on the power basis `1, z, ..., z^(phi(n)-1)` after
//! reduction modulo the `n`-th cyclotomic polynomial, as an integer
//! numerator vector over one positive common denominator. Equality of
//! elements of different conductors lifts both to the lcm.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{exp_2pi_i, ComplexInterval, Interval};
use super::rational::{frac, Rational};

fn poly_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (constant term first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1);
    if let Some(p) = poly_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d | n, d < n
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let q = cyclotomic_poly(d);
            p = poly_div_exact(&p, &q);
        }
    }
    let p = Arc::new(p);
    poly_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    debug_assert_eq!(den[dn], 1);
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quo = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quo[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quo
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Reduces a full-length coefficient vector modulo `Phi_n` in place and
/// truncates it to `phi(n)` entries.
fn reduce_mod_phi(v: &mut Vec<BigInt>, n: u64) {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    if v.len() < deg {
        v.resize(deg, BigInt::zero());
        return;
    }
    for i in (deg..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[i]);
        for (j, &pj) in phi.iter().enumerate().take(deg) {
            if pj != 0 {
                v[i - deg + j] -= &c * pj;
            }
        }
    }
    v.truncate(deg);
}

#[derive(Clone, Debug)]
pub struct CycloNum {
    conductor: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNum {
    fn from_parts(conductor: u64, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut out = Self { conductor, num, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(v: i64) -> Self {
        Self { conductor: 1, num: vec![BigInt::from(v)], den: BigInt::one() }
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_parts(1, vec![q.numer().clone()], q.denom().clone())
    }

    /// `zeta_n^k`.
    pub fn zeta_power(n: u64, k: i64) -> Self {
        assert!(n >= 1);
        let k = k.rem_euclid(n as i64) as usize;
        let mut v = vec![BigInt::zero(); n as usize];
        v[k] = BigInt::one();
        reduce_mod_phi(&mut v, n);
        Self::from_parts(n, v, BigInt::one())
    }

    /// `e(x) = exp(2 pi i x)`; the conductor is the reduced denominator of `x`.
    pub fn root_of_unity(x: &Rational) -> Self {
        let f = frac(x);
        let n = f.denom().to_u64().expect("conductor fits in u64");
        let k = f.numer().to_i64().expect("exponent fits in i64");
        Self::zeta_power(n, k)
    }

    /// Builds `sum_k coeffs[k] zeta_n^k` from a (not necessarily reduced)
    /// coefficient list indexed by exponents in `[0, n)`.
    pub fn from_exponent_map(n: u64, coeffs: &BTreeMap<u64, Rational>) -> Self {
        let mut den = BigInt::one();
        for c in coeffs.values() {
            den = den.lcm(c.denom());
        }
        let mut v = vec![BigInt::zero(); n as usize];
        for (&k, c) in coeffs {
            let scaled = c * Rational::from_integer(den.clone());
            v[(k % n) as usize] += scaled.to_integer();
        }
        reduce_mod_phi(&mut v, n);
        Self::from_parts(n, v, den)
    }

    /// Non-zero coefficients on the reduced power basis.
    pub fn exponent_map(&self) -> BTreeMap<u64, Rational> {
        self.num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u64, Rational::new(c.clone(), self.den.clone())))
            .collect()
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the element is rational.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Re-expresses the element in `Q(zeta_m)`; `m` must be a multiple of the conductor.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.conductor == 0, "lift target must be a multiple of the conductor");
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut v = vec![BigInt::zero(); m as usize];
        for (k, c) in self.num.iter().enumerate() {
            v[k * step] = c.clone();
        }
        reduce_mod_phi(&mut v, m);
        Self { conductor: m, num: v, den: self.den.clone() }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.conductor == b.conductor {
            return (a.clone(), b.clone());
        }
        let m = a.conductor.lcm(&b.conductor);
        (a.lift(m), b.lift(m))
    }

    fn add_ref(&self, other: &Self) -> Self {
        if self.conductor != other.conductor {
            let (a, b) = Self::common(self, other);
            return a.add_ref(&b);
        }
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(x, y)| x + y).collect();
            return Self::from_parts(self.conductor, num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(x, y)| x * &other.den + y * &self.den)
            .collect();
        Self::from_parts(self.conductor, num, &self.den * &other.den)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.conductor != other.conductor {
            let (a, b) = Self::common(self, other);
            return a.mul_ref(&b);
        }
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let n = self.conductor;
        let len = self.num.len() + other.num.len() - 1;
        let mut v = vec![BigInt::zero(); len];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.num.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        reduce_mod_phi(&mut v, n);
        Self::from_parts(n, v, &self.den * &other.den)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        Self::from_parts(self.conductor, num, &self.den * q.denom())
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        let num = self.num.iter().map(|c| c * &k).collect();
        Self::from_parts(self.conductor, num, self.den.clone())
    }

    /// Complex conjugation `zeta_n^k -> zeta_n^(n-k)`.
    pub fn conj(&self) -> Self {
        let n = self.conductor as usize;
        let mut v = vec![BigInt::zero(); n];
        for (k, c) in self.num.iter().enumerate() {
            v[(n - k) % n] += c;
        }
        reduce_mod_phi(&mut v, self.conductor);
        Self { conductor: self.conductor, num: v, den: self.den.clone() }
    }

    /// Galois automorphism `zeta_n -> zeta_n^a`, for `a` coprime to the conductor.
    pub fn galois(&self, a: i64) -> Self {
        let n = self.conductor as i64;
        assert!(a.gcd(&n) == 1, "galois exponent must be a unit");
        let mut v = vec![BigInt::zero(); n as usize];
        for (k, c) in self.num.iter().enumerate() {
            v[((k as i64) * a).rem_euclid(n) as usize] += c;
        }
        reduce_mod_phi(&mut v, self.conductor);
        Self { conductor: self.conductor, num: v, den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, by solving the multiplication-map system over Q.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.to_rational() {
            return Some(Self::from_rational(&q.recip()));
        }
        let n = self.conductor;
        let d = self.num.len();
        // columns: self * zeta^j reduced, as rational vectors over the common denominator
        let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); d + 1]; d];
        for j in 0..d {
            let col = self.mul_ref(&Self::zeta_power(n, j as i64));
            let col = col.lift(n);
            for i in 0..d {
                m[i][j] = Rational::new(col.num[i].clone(), col.den.clone());
            }
        }
        m[0][d] = Rational::one();
        let sol = solve_rational(m)?;
        let den = sol.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = sol
            .iter()
            .map(|q| (q * Rational::from_integer(den.clone())).to_integer())
            .collect();
        Some(Self::from_parts(n, num, den))
    }

    /// Verified enclosure of the complex embedding `zeta_n -> exp(2 pi i / n)`.
    /// `precision_bits` is the number of fractional bits carried; a few guard
    /// bits are added internally.
    pub fn embed_complex(&self, precision_bits: u32) -> ComplexInterval {
        let prec = precision_bits.max(53) + 16;
        let mut acc = ComplexInterval::zero(prec);
        let n = BigInt::from(self.conductor);
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = exp_2pi_i(&Rational::new(BigInt::from(k), n.clone()), prec);
            acc = acc.add(&z.scale(&Interval::from_rational(&Rational::from_integer(c.clone()), prec)));
        }
        let inv_den = Interval::from_rational(&Rational::new(BigInt::one(), self.den.clone()), prec);
        acc.scale(&inv_den)
    }

    /// Floating-point embedding, for display and quick numerics.
    pub fn to_c64(&self) -> num_complex::Complex64 {
        let n = self.conductor as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        self.num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let w = c.to_f64().unwrap_or(f64::NAN) / den;
                num_complex::Complex64::from_polar(w, 2.0 * std::f64::consts::PI * k as f64 / n)
            })
            .sum()
    }
}

fn solve_rational(mut m: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let d = m.len();
    for col in 0..d {
        let piv = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for k in col..=d {
            m[col][k] = &m[col][k] * &inv;
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in col..=d {
                    let t = &f * &m[col][k];
                    m[r][k] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[d].clone()).collect())
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = Self::common(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycloNum {}

impl<'a> Add<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        self.add_ref(&-rhs)
    }
}

impl<'a> Mul<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        self.mul_ref(rhs)
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            conductor: self.conductor,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Add for CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: CycloNum) -> CycloNum {
        self.add_ref(&rhs)
    }
}

impl Sub for CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: CycloNum) -> CycloNum {
        &self - &rhs
    }
}

impl Mul for CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: CycloNum) -> CycloNum {
        self.mul_ref(&rhs)
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.exponent_map() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = super::rational::format_rational(&c);
            match k {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})*z{}^{k}", self.conductor)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        for n in 1..40 {
            assert_eq!(cyclotomic_poly(n).len() as u64 - 1, euler_phi(n));
        }
    }

    #[test]
    fn root_of_unity_examples() {
        assert_eq!(CycloNum::root_of_unity(&int(0)), CycloNum::one());
        let i = CycloNum::root_of_unity(&rat(1, 4));
        let z = i.embed_complex(64);
        assert!(z.contains(&int(0), &int(1)));
        let sum = &CycloNum::root_of_unity(&rat(1, 3)) * &CycloNum::root_of_unity(&rat(2, 3));
        assert_eq!(sum, CycloNum::one());
        assert_eq!(CycloNum::root_of_unity(&rat(5, 4)), i);
    }

    #[test]
    fn embedding_examples() {
        let s = &CycloNum::root_of_unity(&rat(1, 3)) + &CycloNum::root_of_unity(&rat(2, 3));
        let e = s.embed_complex(53);
        assert!(e.contains(&int(-1), &int(0)));
        assert!(e.width_f64() < 1e-15);
        // 1 + 2 e(1/3) = i sqrt 3
        let w = &CycloNum::one() + &CycloNum::root_of_unity(&rat(1, 3)).scale_int(2);
        let e = w.embed_complex(64);
        assert!(e.re.contains(&int(0)));
        assert!((e.im.mid_f64() - 1.7320508075688772).abs() < 1e-15);
    }

    #[test]
    fn mixed_conductor_equality() {
        // e(1/2) = -1 regardless of the ambient field
        let m = CycloNum::root_of_unity(&rat(1, 2));
        assert_eq!(m, CycloNum::from_integer(-1));
        assert_eq!(m.lift(12), CycloNum::from_integer(-1));
        // i * i = -1 computed in Q(zeta_12)
        let i12 = CycloNum::zeta_power(12, 3);
        assert_eq!(&i12 * &i12, CycloNum::from_integer(-1));
        assert_eq!(i12, CycloNum::root_of_unity(&rat(1, 4)));
    }

    #[test]
    fn inverse_and_conjugation() {
        let g = &CycloNum::one() + &CycloNum::root_of_unity(&rat(1, 3)).scale_int(2);
        let inv = g.inv().unwrap();
        assert_eq!(&g * &inv, CycloNum::one());
        assert_eq!(&g * &g.conj(), CycloNum::from_integer(3));
        assert_eq!(g.conj().conj(), g);
        assert!(CycloNum::zero().inv().is_none());
    }

    #[test]
    fn roots_sum_to_zero() {
        for n in 2..25u64 {
            let mut acc = CycloNum::zero();
            for k in 0..n {
                acc = &acc + &CycloNum::root_of_unity(&rat(k as i64, n as i64));
            }
            assert!(acc.is_zero(), "n = {n}");
        }
    }
}
