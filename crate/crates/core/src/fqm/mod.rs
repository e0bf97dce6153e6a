//! Finite quadratic modules `(A, Q)` with `Q: A -> Q/Z`.
//!
//! A module is stored by the orders `d_1, ..., d_k` of a fixed generating
//! system together with `Q(g_i)` and `(g_i, g_j)`, all as residues over one
//! common denominator (the level). Elements are coefficient tuples reduced
//! mod `d_i`; the canonical enumeration is lexicographic with the first
//! coefficient most significant.

mod gauss;
mod structure;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{frac, residue_over, Rational};
use crate::nt;

pub use gauss::{gauss_sum, milgram_signature};
pub use structure::{
    anisotropic_by_structure, classify_anisotropic, find_isomorphism, index_set, is_anisotropic, jacobi_character,
    orthogonal_group, orthogonal_group_with_bound, p_primary_decomposition, Automorphism,
    JordanComponent, JordanKind, ANISOTROPY_SCAN_BOUND, AUT_SEARCH_BOUND,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FqmElement(pub Vec<u64>);

impl FqmElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for FqmElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fqm {
    divisors: Vec<u64>,
    level: u64,
    q: Vec<u64>,
    b: Vec<Vec<u64>>,
}

impl Fqm {
    /// Builds a module from generator orders, `Q(g_i) mod 1` and the
    /// bilinear values `(g_i, g_j) mod 1`, checking well-definedness,
    /// the polarization identity on generators and non-degeneracy.
    pub fn new(divisors: Vec<u64>, q: &[Rational], b: &[Vec<Rational>]) -> Result<Self> {
        let k = divisors.len();
        if q.len() != k || b.len() != k || b.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidModule("dimension mismatch".into()));
        }
        if divisors.iter().any(|&d| d == 0) {
            return Err(Error::InvalidModule("generator order must be positive".into()));
        }
        let mut level: u64 = 1;
        for x in q.iter().chain(b.iter().flatten()) {
            let d = crate::exact::rational::denom_u64(&frac(x))
                .ok_or_else(|| Error::InvalidModule("denominator too large".into()))?;
            level = level.lcm(&d);
        }
        let qn: Vec<u64> = q.iter().map(|x| residue_over(x, level).unwrap()).collect();
        let bn: Vec<Vec<u64>> =
            b.iter().map(|r| r.iter().map(|x| residue_over(x, level).unwrap()).collect()).collect();
        let out = Self { divisors, level, q: qn, b: bn };
        out.validate()?;
        Ok(out)
    }

    fn from_residues(divisors: Vec<u64>, level: u64, q: Vec<u64>, b: Vec<Vec<u64>>) -> Self {
        // shrink the stored denominator to the true level
        let mut g = level;
        for &x in q.iter().chain(b.iter().flatten()) {
            g = g.gcd(&x);
        }
        let (level, q, b) = if g > 1 {
            (level / g, q.iter().map(|x| x / g).collect(), b.iter().map(|r| r.iter().map(|x| x / g).collect()).collect())
        } else {
            (level, q, b)
        };
        Self { divisors, level, q, b }
    }

    fn validate(&self) -> Result<()> {
        let n = self.level as u128;
        for i in 0..self.rank() {
            let d = self.divisors[i] as u128;
            if (2 * self.q[i] as u128) % n != self.b[i][i] as u128 {
                return Err(Error::InvalidModule(format!("(g{i},g{i}) must equal 2Q(g{i})")));
            }
            if (d * d * self.q[i] as u128) % n != 0 {
                return Err(Error::InvalidModule(format!("Q is not well defined on generator {i}")));
            }
            for j in 0..self.rank() {
                if self.b[i][j] != self.b[j][i] {
                    return Err(Error::InvalidModule("bilinear form is not symmetric".into()));
                }
                if (d * self.b[i][j] as u128) % n != 0 {
                    return Err(Error::InvalidModule(format!("(g{i},g{j}) is not well defined")));
                }
            }
        }
        if self.order_checked().is_none() {
            return Err(Error::InvalidModule("order overflows u64".into()));
        }
        if self.order() <= structure::ANISOTROPY_SCAN_BOUND && !self.is_nondegenerate() {
            return Err(Error::InvalidModule("bilinear form is degenerate".into()));
        }
        Ok(())
    }

    fn order_checked(&self) -> Option<u64> {
        self.divisors.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d))
    }

    fn is_nondegenerate(&self) -> bool {
        self.elements().skip(1).all(|x| (0..self.rank()).any(|i| self.b_residue_gen(&x, i) != 0))
    }

    pub fn trivial() -> Self {
        Self { divisors: vec![], level: 1, q: vec![], b: vec![] }
    }

    /// `(Z/n, t x^2 / n)` for odd `n`, or `(Z/n, t x^2 / 2n)` for even `n`.
    pub fn cyclic(n: u64, t: i64) -> Result<Self> {
        let q = if n % 2 == 1 {
            Rational::new(BigInt::from(t), BigInt::from(n))
        } else {
            Rational::new(BigInt::from(t), BigInt::from(2 * n))
        };
        let b = &q * Rational::from_integer(BigInt::from(2));
        Self::new(vec![n], &[q], &[vec![b]])
    }

    /// `(Z/2^k)^2` with `Q = (x^2 + xy + y^2) / 2^k`.
    pub fn b_form(k: u32) -> Result<Self> {
        let n = 1u64 << k;
        let r = |a: i64| Rational::new(BigInt::from(a), BigInt::from(n));
        Self::new(vec![n, n], &[r(1), r(1)], &[vec![r(2), r(1)], vec![r(1), r(2)]])
    }

    /// `(Z/2^k)^2` with `Q = xy / 2^k`.
    pub fn c_form(k: u32) -> Result<Self> {
        let n = 1u64 << k;
        let r = |a: i64| Rational::new(BigInt::from(a), BigInt::from(n));
        Self::new(vec![n, n], &[r(0), r(0)], &[vec![r(0), r(1)], vec![r(1), r(0)]])
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let level = self.level.lcm(&other.level);
        let (s1, s2) = (level / self.level, level / other.level);
        let k = self.rank() + other.rank();
        let mut q = Vec::with_capacity(k);
        q.extend(self.q.iter().map(|x| x * s1));
        q.extend(other.q.iter().map(|x| x * s2));
        let mut b = vec![vec![0u64; k]; k];
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                b[i][j] = self.b[i][j] * s1;
            }
        }
        for i in 0..other.rank() {
            for j in 0..other.rank() {
                b[self.rank() + i][self.rank() + j] = other.b[i][j] * s2;
            }
        }
        let mut divisors = self.divisors.clone();
        divisors.extend(&other.divisors);
        Self { divisors, level, q, b }
    }

    /// The module `A^-` with the negated form.
    pub fn negated(&self) -> Self {
        let n = self.level;
        let neg = |x: &u64| (n - x % n) % n;
        Self {
            divisors: self.divisors.clone(),
            level: n,
            q: self.q.iter().map(neg).collect(),
            b: self.b.iter().map(|r| r.iter().map(neg).collect()).collect(),
        }
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn order(&self) -> u64 {
        self.divisors.iter().product()
    }

    /// Smallest `N` with `N Q(x) in Z` for all `x`.
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn q_generators(&self) -> Vec<Rational> {
        self.q.iter().map(|&x| self.residue_to_rational(x)).collect()
    }

    pub fn b_generators(&self) -> Vec<Vec<Rational>> {
        self.b.iter().map(|r| r.iter().map(|&x| self.residue_to_rational(x)).collect()).collect()
    }

    fn residue_to_rational(&self, r: u64) -> Rational {
        Rational::new(BigInt::from(r), BigInt::from(self.level))
    }

    pub fn zero(&self) -> FqmElement {
        FqmElement(vec![0; self.rank()])
    }

    pub fn generator(&self, i: usize) -> FqmElement {
        let mut v = vec![0; self.rank()];
        v[i] = 1 % self.divisors[i];
        FqmElement(v)
    }

    /// Reduces an integer coefficient tuple into canonical form.
    pub fn element(&self, coeffs: &[i64]) -> Result<FqmElement> {
        if coeffs.len() != self.rank() {
            return Err(Error::InvalidArgument(format!(
                "element has {} coefficients, module has rank {}",
                coeffs.len(),
                self.rank()
            )));
        }
        Ok(FqmElement(
            coeffs.iter().zip(&self.divisors).map(|(&c, &d)| c.rem_euclid(d as i64) as u64).collect(),
        ))
    }

    pub fn contains(&self, x: &FqmElement) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.divisors).all(|(c, d)| c < d)
    }

    pub fn index_of(&self, x: &FqmElement) -> usize {
        x.0.iter().zip(&self.divisors).fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> FqmElement {
        let mut v = vec![0u64; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.divisors[i] as usize;
            v[i] = (idx % d) as u64;
            idx /= d;
        }
        FqmElement(v)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FqmElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    pub fn add(&self, x: &FqmElement, y: &FqmElement) -> FqmElement {
        FqmElement(x.0.iter().zip(&y.0).zip(&self.divisors).map(|((a, b), d)| (a + b) % d).collect())
    }

    pub fn neg(&self, x: &FqmElement) -> FqmElement {
        FqmElement(x.0.iter().zip(&self.divisors).map(|(a, d)| (d - a % d) % d).collect())
    }

    pub fn scale(&self, k: i64, x: &FqmElement) -> FqmElement {
        FqmElement(
            x.0.iter()
                .zip(&self.divisors)
                .map(|(&a, &d)| ((a as i128 * k as i128).rem_euclid(d as i128)) as u64)
                .collect(),
        )
    }

    pub fn order_of(&self, x: &FqmElement) -> u64 {
        x.0.iter().zip(&self.divisors).fold(1u64, |acc, (&a, &d)| acc.lcm(&(d / d.gcd(&a))))
    }

    /// `level * Q(x) mod level`.
    pub fn q_residue(&self, x: &FqmElement) -> u64 {
        let n = self.level as u128;
        let mut acc: u128 = 0;
        for i in 0..self.rank() {
            let a = x.0[i] as u128;
            if a == 0 {
                continue;
            }
            acc = (acc + (a * a % n) * self.q[i] as u128) % n;
            for j in (i + 1)..self.rank() {
                let c = x.0[j] as u128;
                if c != 0 {
                    acc = (acc + (a * c % n) * self.b[i][j] as u128) % n;
                }
            }
        }
        acc as u64
    }

    pub fn q_value(&self, x: &FqmElement) -> Rational {
        self.residue_to_rational(self.q_residue(x))
    }

    fn b_residue_gen(&self, x: &FqmElement, j: usize) -> u64 {
        let n = self.level as u128;
        let mut acc: u128 = 0;
        for i in 0..self.rank() {
            acc = (acc + (x.0[i] as u128 % n) * self.b[i][j] as u128) % n;
        }
        acc as u64
    }

    /// `level * (x, y) mod level`.
    pub fn b_residue(&self, x: &FqmElement, y: &FqmElement) -> u64 {
        let n = self.level as u128;
        let mut acc: u128 = 0;
        for j in 0..self.rank() {
            if y.0[j] != 0 {
                acc = (acc + self.b_residue_gen(x, j) as u128 * y.0[j] as u128) % n;
            }
        }
        acc as u64
    }

    pub fn b_value(&self, x: &FqmElement, y: &FqmElement) -> Rational {
        self.residue_to_rational(self.b_residue(x, y))
    }

    /// `Q` residues of all elements in canonical order.
    pub fn q_table(&self) -> Vec<u64> {
        self.elements().map(|x| self.q_residue(&x)).collect()
    }

    /// The submodule generated by the given elements, re-expressed on the
    /// given generators (which must be independent with the given orders).
    pub(crate) fn sub_on_generators(&self, gens: &[FqmElement], orders: Vec<u64>) -> Self {
        let k = gens.len();
        let q = gens.iter().map(|g| self.q_residue(g)).collect();
        let mut b = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                b[i][j] = self.b_residue(&gens[i], &gens[j]);
            }
        }
        Self::from_residues(orders, self.level, q, b)
    }

    /// Drops generators of order 1.
    pub fn without_trivial_generators(&self) -> Self {
        let keep: Vec<usize> = (0..self.rank()).filter(|&i| self.divisors[i] > 1).collect();
        if keep.len() == self.rank() {
            return self.clone();
        }
        let gens: Vec<FqmElement> = keep.iter().map(|&i| self.generator(i)).collect();
        let orders = keep.iter().map(|&i| self.divisors[i]).collect();
        self.sub_on_generators(&gens, orders)
    }

    /// Primes dividing `|A|`.
    pub fn primes(&self) -> Vec<u64> {
        nt::prime_divisors(self.order())
    }
}

impl fmt::Display for Fqm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial module");
        }
        let groups: Vec<String> = self.divisors.iter().map(|d| format!("Z/{d}")).collect();
        let qs: Vec<String> = self
            .q_generators()
            .iter()
            .map(crate::exact::rational::format_rational)
            .collect();
        write!(f, "{} with Q(g) = [{}]", groups.join(" + "), qs.join(", "))
    }
}

impl Default for Fqm {
    fn default() -> Self {
        Self::trivial()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn z3_squared() -> Fqm {
        Fqm::cyclic(3, 1).unwrap().direct_sum(&Fqm::cyclic(3, 1).unwrap())
    }

    #[test]
    fn polarization_holds_on_all_pairs() {
        let a = z3_squared().direct_sum(&Fqm::cyclic(5, 2).unwrap());
        for x in a.elements() {
            for y in a.elements() {
                let lhs = frac(&(a.q_value(&a.add(&x, &y)) - a.q_value(&x) - a.q_value(&y)));
                assert_eq!(lhs, a.b_value(&x, &y));
            }
            let x3 = a.scale(3, &x);
            assert_eq!(a.q_value(&x3), frac(&(a.q_value(&x) * rat(9, 1))));
        }
    }

    #[test]
    fn rejects_inconsistent_data() {
        // Q(g) = 1/3 on Z/2 is not well defined
        let err = Fqm::new(vec![2], &[rat(1, 3)], &[vec![rat(2, 3)]]);
        assert!(err.is_err());
        // degenerate: Z/3 with zero form
        let err = Fqm::new(vec![3], &[rat(0, 1)], &[vec![rat(0, 1)]]);
        assert!(err.is_err());
    }

    #[test]
    fn element_indexing_round_trips() {
        let a = Fqm::cyclic(4, 1).unwrap().direct_sum(&Fqm::cyclic(3, 1).unwrap());
        for (i, x) in a.elements().enumerate() {
            assert_eq!(a.index_of(&x), i);
        }
        assert_eq!(a.element(&[-1, 4]).unwrap(), FqmElement(vec![3, 1]));
        assert_eq!(a.order_of(&FqmElement(vec![2, 1])), 6);
    }

    #[test]
    fn level_of_standard_forms() {
        assert_eq!(Fqm::cyclic(3, 1).unwrap().level(), 3);
        assert_eq!(Fqm::cyclic(2, 1).unwrap().level(), 4);
        assert_eq!(Fqm::c_form(1).unwrap().level(), 2);
        assert_eq!(Fqm::trivial().level(), 1);
    }
}
