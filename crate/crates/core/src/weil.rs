//! The finite Weil representation of `SL_2(Z)` on `C[A]`.
//!
//! The matrices act on column vectors in the canonical basis `(e_mu)` of
//! the group ring: `rho(M) e_mu = sum_nu rho(M)[nu][mu] e_nu`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{CycloNum, Rational};
use crate::fqm::{gauss_sum, milgram_signature, Fqm, FqmElement};
use crate::json::CycloJson;

/// Dense square matrix over the cyclotomic numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloMatrix {
    dim: usize,
    entries: Vec<CycloNum>,
}

impl CycloMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![CycloNum::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = CycloNum::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloNum {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloNum) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn to_json(&self) -> Vec<Vec<CycloJson>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| CycloJson::from(self.get(i, j))).collect()).collect()
    }

    pub fn to_c64(&self) -> Vec<Vec<num_complex::Complex64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j).to_c64()).collect()).collect()
    }
}

/// A square matrix with entries `scalar * coeff[i][j] * zeta_N^exp[i][j]`,
/// the shape shared by all of `rho(T)`, `rho(S)` and `rho(Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseMatrix {
    dim: usize,
    conductor: u64,
    scalar: CycloNum,
    coeff: Vec<i64>,
    exp: Vec<u64>,
}

impl PhaseMatrix {
    fn new(dim: usize, conductor: u64, scalar: CycloNum) -> Self {
        Self { dim, conductor, scalar, coeff: vec![0; dim * dim], exp: vec![0; dim * dim] }
    }

    pub fn identity(dim: usize, conductor: u64) -> Self {
        let mut m = Self::new(dim, conductor, CycloNum::one());
        for i in 0..dim {
            m.coeff[i * dim + i] = 1;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn scalar(&self) -> &CycloNum {
        &self.scalar
    }

    /// `(coeff, exponent)` of entry `(i, j)`.
    pub fn term(&self, i: usize, j: usize) -> (i64, u64) {
        let k = i * self.dim + j;
        (self.coeff[k], self.exp[k])
    }

    pub fn set_term(&mut self, i: usize, j: usize, coeff: i64, exp: i64) {
        let k = i * self.dim + j;
        self.coeff[k] = coeff;
        self.exp[k] = exp.rem_euclid(self.conductor as i64) as u64;
    }

    pub fn entry(&self, i: usize, j: usize) -> CycloNum {
        let (c, e) = self.term(i, j);
        if c == 0 {
            return CycloNum::zero();
        }
        (&self.scalar * &CycloNum::zeta_power(self.conductor, e as i64)).scale_int(c)
    }

    pub fn to_dense(&self) -> CycloMatrix {
        let mut cache: HashMap<(i64, u64), CycloNum> = HashMap::new();
        let mut out = CycloMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let t = self.term(i, j);
                if t.0 == 0 {
                    continue;
                }
                let v = cache.entry(t).or_insert_with(|| self.entry(i, j)).clone();
                out.set(i, j, v);
            }
        }
        out
    }

    fn lifted(&self, n: u64) -> Self {
        if n == self.conductor {
            return self.clone();
        }
        let f = n / self.conductor;
        Self { conductor: n, exp: self.exp.iter().map(|e| e * f).collect(), ..self.clone() }
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::new(n, self.conductor, self.scalar.conj());
        for i in 0..n {
            for j in 0..n {
                let (c, e) = self.term(i, j);
                out.set_term(j, i, c, -(e as i64));
            }
        }
        out
    }

    /// Inverse of a matrix with exactly one nonzero entry of coefficient
    /// `+-1` in each row and column.
    pub fn inverse_monomial(&self) -> Option<Self> {
        let n = self.dim;
        let inv_scalar = self.scalar.inv()?;
        let mut out = Self::new(n, self.conductor, inv_scalar);
        let mut seen = vec![false; n];
        for i in 0..n {
            let nz: Vec<usize> = (0..n).filter(|&j| self.term(i, j).0 != 0).collect();
            let [j] = nz[..] else { return None };
            let (c, e) = self.term(i, j);
            if c.abs() != 1 || seen[j] {
                return None;
            }
            seen[j] = true;
            out.set_term(j, i, c, -(e as i64));
        }
        Some(out)
    }

    /// The product when every entry collapses to a single phase, as happens
    /// whenever one factor is monomial; `None` otherwise.
    pub fn mul_phase(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let cond = self.conductor.lcm(&other.conductor);
        let (a, b) = (self.lifted(cond), other.lifted(cond));
        let n = self.dim;
        let mut out = Self::new(n, cond, &a.scalar * &b.scalar);
        for i in 0..n {
            for j in 0..n {
                let mut acc: Option<(i64, u64)> = None;
                for k in 0..n {
                    let (c1, e1) = a.term(i, k);
                    let (c2, e2) = b.term(k, j);
                    if c1 == 0 || c2 == 0 {
                        continue;
                    }
                    let e = (e1 + e2) % cond;
                    acc = match acc {
                        None => Some((c1 * c2, e)),
                        Some((c, e0)) if e0 == e => Some((c + c1 * c2, e)),
                        Some(_) => return None,
                    };
                }
                if let Some((c, e)) = acc {
                    out.set_term(i, j, c, e as i64);
                }
            }
        }
        Some(out)
    }

    /// Exact test of `self * other == target` in `Q(zeta)`. Entries of the
    /// product are accumulated as exponent histograms, which are reduced
    /// to cyclotomic numbers once per distinct histogram.
    pub fn product_equals(&self, other: &Self, target: &Self) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let cond = self.conductor.lcm(&other.conductor).lcm(&target.conductor);
        let (a, b, t) = (self.lifted(cond), other.lifted(cond), target.lifted(cond));
        let n = self.dim;
        let denom = &a.scalar * &b.scalar;
        let ratio = match denom.inv() {
            Some(inv) => &t.scalar * &inv,
            None => return (0..n * n).all(|k| t.coeff[k] == 0) || t.scalar.is_zero(),
        };
        let mut hist = vec![0i64; cond as usize];
        let mut touched: Vec<usize> = Vec::new();
        let mut verdicts: HashMap<(Vec<(u64, i64)>, i64, u64), bool> = HashMap::new();
        let mut rhs: HashMap<(i64, u64), CycloNum> = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (c1, e1) = a.term(i, k);
                    let (c2, e2) = b.term(k, j);
                    if c1 == 0 || c2 == 0 {
                        continue;
                    }
                    let e = ((e1 + e2) % cond) as usize;
                    if hist[e] == 0 {
                        touched.push(e);
                    }
                    hist[e] += c1 * c2;
                }
                touched.sort_unstable();
                let key: Vec<(u64, i64)> =
                    touched.iter().filter(|&&e| hist[e] != 0).map(|&e| (e as u64, hist[e])).collect();
                for &e in &touched {
                    hist[e] = 0;
                }
                touched.clear();
                let (tc, te) = t.term(i, j);
                let te = if tc == 0 { 0 } else { te };
                let entry_key = (key, tc, te);
                let ok = match verdicts.get(&entry_key) {
                    Some(&v) => v,
                    None => {
                        let lhs = histogram_value(cond, &entry_key.0);
                        let r = rhs
                            .entry((tc, te))
                            .or_insert_with(|| (&ratio * &CycloNum::zeta_power(cond, te as i64)).scale_int(tc))
                            .clone();
                        let v = lhs == r;
                        verdicts.insert(entry_key, v);
                        v
                    }
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.dim == other.dim
            && (0..self.dim).all(|i| (0..self.dim).all(|j| self.entry(i, j) == other.entry(i, j)))
    }
}

fn histogram_value(n: u64, terms: &[(u64, i64)]) -> CycloNum {
    let map = terms.iter().map(|&(e, c)| (e, Rational::from_integer(BigInt::from(c)))).collect();
    CycloNum::from_exponent_map(n, &map)
}

#[derive(Clone, Debug)]
pub struct WeilMatrices {
    pub basis: Vec<FqmElement>,
    pub level: u64,
    pub sig_mod8: u8,
    pub rho_t: PhaseMatrix,
    pub rho_s: PhaseMatrix,
    pub rho_z: PhaseMatrix,
}

/// `rho(T) e_mu = e(Q(mu)) e_mu`, `rho(S) e_mu = conj(g(A))/|A| sum_nu
/// e(-(nu, mu)) e_nu` and `rho(Z) e_mu = e(-sig/4) e_{-mu}`.
pub fn build_weil_matrices(a: &Fqm, sig_mod8: i64) -> Result<WeilMatrices> {
    let milgram = milgram_signature(a)?;
    if sig_mod8.rem_euclid(8) as u8 != milgram {
        return Err(Error::InconsistentSignature { given: sig_mod8, milgram });
    }
    let sig = milgram;
    let basis: Vec<FqmElement> = a.elements().collect();
    let n = basis.len();
    let level = a.level();

    let mut rho_t = PhaseMatrix::new(n, level, CycloNum::one());
    for (i, mu) in basis.iter().enumerate() {
        rho_t.set_term(i, i, 1, a.q_residue(mu) as i64);
    }

    let scalar_s = gauss_sum(a, 1).conj().scale(&Rational::new(BigInt::from(1), BigInt::from(a.order())));
    let mut rho_s = PhaseMatrix::new(n, level, scalar_s);
    for (j, mu) in basis.iter().enumerate() {
        for (i, nu) in basis.iter().enumerate() {
            rho_s.set_term(i, j, 1, -(a.b_residue(nu, mu) as i64));
        }
    }

    let scalar_z = CycloNum::root_of_unity(&Rational::new(BigInt::from(-(sig as i64)), BigInt::from(4)));
    let mut rho_z = PhaseMatrix::new(n, level, scalar_z);
    for (j, mu) in basis.iter().enumerate() {
        rho_z.set_term(a.index_of(&a.neg(mu)), j, 1, 0);
    }
    Ok(WeilMatrices { basis, level, sig_mod8: sig, rho_t, rho_s, rho_z })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub s_squared_is_z: bool,
    pub st_cubed_is_z: bool,
    pub z_squared_is_identity: bool,
    pub s_unitary: bool,
    pub z_commutes_with_t: bool,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.s_squared_is_z && self.st_cubed_is_z && self.z_squared_is_identity && self.s_unitary && self.z_commutes_with_t
    }
}

/// Checks the defining relations exactly.
pub fn verify_relations(w: &WeilMatrices) -> RelationReport {
    let (s, t, z) = (&w.rho_s, &w.rho_t, &w.rho_z);
    let n = s.dim();
    let id = PhaseMatrix::identity(n, s.conductor());
    let s_h = s.conj_transpose();
    let s_unitary = s.product_equals(&s_h, &id);
    let s_squared_is_z = s.product_equals(s, z);
    let z_squared_is_identity = z.product_equals(z, &id);
    let z_commutes_with_t = match z.inverse_monomial() {
        Some(z_inv) => z.mul_phase(t).and_then(|zt| zt.mul_phase(&z_inv)).is_some_and(|m| m.equals(t)),
        None => false,
    };
    let st = s.mul_phase(t);
    let t_inv = t.inverse_monomial();
    // with S unitary, (ST)^3 = Z is equivalent to (ST)^2 = Z T^-1 S^H
    let st_cubed_is_z = match (&st, &t_inv, s_unitary) {
        (Some(st), Some(t_inv), true) => z
            .mul_phase(t_inv)
            .and_then(|m| m.mul_phase(&s_h))
            .is_some_and(|rhs| st.product_equals(st, &rhs)),
        _ => {
            let st = s.to_dense().mul(&t.to_dense());
            st.mul(&st).mul(&st) == z.to_dense()
        }
    };
    RelationReport { s_squared_is_z, st_cubed_is_z, z_squared_is_identity, s_unitary, z_commutes_with_t }
}

/// Word `gamma = T^{q_1} S T^{q_2} S ... [Z] T^b` in the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    T(i64),
    S,
    Z,
}

pub fn sl2_word(gamma: [[i64; 2]; 2]) -> Result<Vec<Generator>> {
    let [[mut a, mut b], [mut c, mut d]] = gamma;
    let det = a as i128 * d as i128 - b as i128 * c as i128;
    if det != 1 {
        return Err(Error::NotInSl2(det as i64));
    }
    let mut word = Vec::new();
    while c != 0 {
        let q = Integer::div_floor(&a, &c);
        // M = T^q S M' with M' = S^-1 T^-q M
        let (a1, b1) = (a - q * c, b - q * d);
        word.push(Generator::T(q));
        word.push(Generator::S);
        (a, b, c, d) = (c, d, -a1, -b1);
    }
    if a == 1 {
        word.push(Generator::T(b));
    } else {
        // -[[1, -b], [0, 1]] = Z T^{-b}
        debug_assert_eq!(a, -1);
        word.push(Generator::Z);
        word.push(Generator::T(-b));
    }
    word.retain(|g| *g != Generator::T(0));
    Ok(word)
}

fn t_power(w: &WeilMatrices, k: i64) -> PhaseMatrix {
    let mut m = w.rho_t.clone();
    for i in 0..m.dim() {
        let (_, e) = w.rho_t.term(i, i);
        m.set_term(i, i, 1, (e as i128 * k as i128).rem_euclid(m.conductor() as i128) as i64);
    }
    m
}

/// `rho(gamma)` as an exact dense matrix.
pub fn rho_of_gamma(w: &WeilMatrices, gamma: [[i64; 2]; 2]) -> Result<CycloMatrix> {
    let word = sl2_word(gamma)?;
    let n = w.rho_s.dim();
    let s = w.rho_s.to_dense();
    let mut acc = CycloMatrix::identity(n);
    for g in &word {
        acc = match g {
            Generator::T(k) => acc.mul(&t_power(w, *k).to_dense()),
            Generator::S => acc.mul(&s),
            Generator::Z => acc.mul(&w.rho_z.to_dense()),
        };
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeilExport {
    pub basis: Vec<FqmElement>,
    pub level: u64,
    pub sig_mod8: u8,
    pub rho_t: Vec<Vec<CycloJson>>,
    pub rho_s: Vec<Vec<CycloJson>>,
    pub rho_z: Vec<Vec<CycloJson>>,
    pub relations: RelationReport,
}

impl WeilMatrices {
    pub fn export(&self) -> WeilExport {
        WeilExport {
            basis: self.basis.clone(),
            level: self.level,
            sig_mod8: self.sig_mod8,
            rho_t: self.rho_t.to_dense().to_json(),
            rho_s: self.rho_s.to_dense().to_json(),
            rho_z: self.rho_z.to_dense().to_json(),
            relations: verify_relations(self),
        }
    }
}
