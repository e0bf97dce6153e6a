//! Even lattices given by Gram matrices, and their invariants.

mod enumerate;
pub mod snf;
mod split;
mod witt;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{frac, Rational};
use crate::fqm::{Fqm, FqmElement};

pub use enumerate::{coset_vectors, for_each_coset_vector, short_vector_count};
pub use split::{find_hyperbolic_split, HyperbolicSplit};
pub use witt::{hilbert_symbol, witt_index, RationalForm};

/// Gram matrix of an even lattice: symmetric, even diagonal, non-degenerate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct GramMatrix {
    rows: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub gram: Vec<Vec<i64>>,
}

impl TryFrom<LatticeJson> for GramMatrix {
    type Error = Error;

    fn try_from(j: LatticeJson) -> Result<Self> {
        GramMatrix::new(j.gram)
    }
}

impl From<GramMatrix> for LatticeJson {
    fn from(g: GramMatrix) -> Self {
        LatticeJson { gram: g.rows }
    }
}

impl GramMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidGram("matrix is not square".into()));
        }
        for i in 0..m {
            if rows[i][i] % 2 != 0 {
                return Err(Error::InvalidGram(format!("diagonal entry {i} is odd")));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidGram("matrix is not symmetric".into()));
                }
            }
        }
        let g = Self { rows };
        if g.det().is_zero() {
            return Err(Error::DegenerateLattice);
        }
        Ok(g)
    }

    /// The empty lattice.
    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn hyperbolic_plane() -> Self {
        Self { rows: vec![vec![0, 1], vec![1, 0]] }
    }

    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let m = entries.len();
        Self::new((0..m).map(|i| (0..m).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect())
    }

    /// The root lattice `A_n`.
    pub fn a_n(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect())
            .collect();
        Self { rows }
    }

    /// The root lattice `D_n`, `n >= 3`.
    pub fn d_n(n: usize) -> Self {
        assert!(n >= 3, "D_n needs n >= 3");
        let mut edges: Vec<(usize, usize)> = (0..n - 2).map(|i| (i, i + 1)).collect();
        edges.push((n - 3, n - 1));
        Self::from_dynkin(n, &edges)
    }

    /// The root lattice `E_8` (Bourbaki labelling).
    pub fn e8() -> Self {
        Self::from_dynkin(8, &[(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)])
    }

    fn from_dynkin(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut rows = vec![vec![0i64; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(i, j) in edges {
            rows[i][j] = -1;
            rows[j][i] = -1;
        }
        Self { rows }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.rank(), other.rank());
        let mut rows = vec![vec![0i64; a + b]; a + b];
        for i in 0..a {
            rows[i][..a].copy_from_slice(&self.rows[i]);
        }
        for i in 0..b {
            rows[a + i][a..].copy_from_slice(&other.rows[i]);
        }
        Self { rows }
    }

    /// The lattice with negated form.
    pub fn negated(&self) -> Self {
        Self { rows: self.rows.iter().map(|r| r.iter().map(|x| -x).collect()).collect() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn to_bigint(&self) -> snf::IntMatrix {
        self.rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()).collect()
    }

    /// `G x` for an integer vector.
    pub fn apply(&self, x: &[i64]) -> Vec<i128> {
        self.rows.iter().map(|r| r.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum()).collect()
    }

    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> i128 {
        self.apply(x).iter().zip(y).map(|(a, &b)| a * b as i128).sum()
    }

    /// `Q(x) = (x, x) / 2`.
    pub fn q(&self, x: &[i64]) -> i128 {
        self.bilinear(x, x) / 2
    }

    pub fn bilinear_rational(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.rank() {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.rank() {
                if self.rows[i][j] != 0 {
                    acc += &x[i] * &y[j] * Rational::from_integer(BigInt::from(self.rows[i][j]));
                }
            }
        }
        acc
    }

    pub fn q_rational(&self, x: &[Rational]) -> Rational {
        self.bilinear_rational(x, x) / Rational::from_integer(BigInt::from(2))
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        let n = self.rank();
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_bigint();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = ((k + 1)..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// `G^{-1}` over the rationals.
    pub fn inverse(&self) -> Result<Vec<Vec<Rational>>> {
        let n = self.rank();
        let mut a = self.to_rational();
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::DegenerateLattice)?;
            a.swap(k, p);
            inv.swap(k, p);
            let piv = a[k][k].clone();
            for j in 0..n {
                a[k][j] = &a[k][j] / &piv;
                inv[k][j] = &inv[k][j] / &piv;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    let (x, y) = (&a[k][j] * &f, &inv[k][j] * &f);
                    a[i][j] -= x;
                    inv[i][j] -= y;
                }
            }
        }
        Ok(inv)
    }

    /// Diagonal entries of a rational congruence diagonalization.
    pub fn rational_diagonal(&self) -> Result<Vec<Rational>> {
        diagonalize(self.to_rational())
    }

    /// `(p, q)`: numbers of positive and negative squares.
    pub fn signature_pair(&self) -> Result<(usize, usize)> {
        let d = self.rational_diagonal()?;
        let p = d.iter().filter(|x| x.is_positive()).count();
        Ok((p, d.len() - p))
    }

    pub fn is_positive_definite(&self) -> bool {
        matches!(self.signature_pair(), Ok((_, 0)))
    }

    /// Smallest `N` with `N G^{-1}` integral with even diagonal.
    pub fn level(&self) -> Result<u64> {
        let inv = self.inverse()?;
        let mut n = BigInt::one();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                let x = if i == j { &inv[i][j] / Rational::from_integer(BigInt::from(2)) } else { inv[i][j].clone() };
                n = n.lcm(x.denom());
            }
        }
        n.to_u64().ok_or_else(|| Error::InvalidArgument("level exceeds u64".into()))
    }
}

/// Symmetric Gaussian elimination over the rationals.
pub(crate) fn diagonalize(mut a: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = ((k + 1)..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else {
                let j = ((k + 1)..n).find(|&j| !a[k][j].is_zero()).ok_or(Error::DegenerateLattice)?;
                // x_k += x_j makes the pivot 2 a_kj
                for i in 0..n {
                    let v = a[j][i].clone();
                    a[k][i] += v;
                }
                for i in 0..n {
                    let v = a[i][j].clone();
                    a[i][k] += v;
                }
            }
        }
        let piv = a[k][k].clone();
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
            for j in k..n {
                let v = &f * &a[j][k];
                a[j][i] -= v;
            }
        }
        out.push(piv);
    }
    Ok(out)
}

impl fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeProfile {
    pub rank: usize,
    pub p: usize,
    pub q: usize,
    pub sig: i64,
    #[serde(with = "crate::json::bigint_str")]
    pub det: BigInt,
    pub level: u64,
    pub witt_index: usize,
    pub disc_order: u64,
}

pub fn lattice_profile(g: &GramMatrix) -> Result<LatticeProfile> {
    let det = g.det();
    if det.is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let (p, q) = g.signature_pair()?;
    Ok(LatticeProfile {
        rank: g.rank(),
        p,
        q,
        sig: p as i64 - q as i64,
        disc_order: det.abs().to_u64().ok_or_else(|| Error::InvalidArgument("|det| exceeds u64".into()))?,
        det,
        level: g.level()?,
        witt_index: witt_index(g)?,
    })
}

/// `L'/L` together with the coordinates of its generators in `L'`.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    pub fqm: Fqm,
    /// Generator `i` as a rational vector in lattice coordinates.
    pub generators: Vec<Vec<Rational>>,
    /// Rows of the left SNF transform for the nontrivial divisors; the
    /// coefficients of `lambda` are `rows * (G lambda) mod d_i`.
    coeff_rows: Vec<Vec<BigInt>>,
    gram: GramMatrix,
}

impl DiscriminantForm {
    pub fn new(g: &GramMatrix) -> Result<Self> {
        if g.det().is_zero() {
            return Err(Error::DegenerateLattice);
        }
        let (u, d, v) = snf::smith_normal_form(&g.to_bigint());
        let keep: Vec<usize> = (0..d.len()).filter(|&i| d[i] > BigInt::one()).collect();
        let m = g.rank();
        let mut generators = Vec::new();
        let mut divisors = Vec::new();
        for &i in &keep {
            let di = Rational::from_integer(d[i].clone());
            generators.push((0..m).map(|r| Rational::from_integer(v[r][i].clone()) / &di).collect::<Vec<_>>());
            divisors.push(d[i].to_u64().ok_or_else(|| Error::InvalidArgument("divisor exceeds u64".into()))?);
        }
        let q: Vec<Rational> = generators.iter().map(|x| frac(&g.q_rational(x))).collect();
        let b: Vec<Vec<Rational>> = generators
            .iter()
            .map(|x| generators.iter().map(|y| frac(&g.bilinear_rational(x, y))).collect())
            .collect();
        let fqm = Fqm::new(divisors, &q, &b)?;
        let coeff_rows = keep.iter().map(|&i| u[i].clone()).collect();
        Ok(Self { fqm, generators, coeff_rows, gram: g.clone() })
    }

    /// The class of `lambda in L'` in `L'/L`.
    pub fn class_of(&self, lambda: &[Rational]) -> Result<FqmElement> {
        let m = self.gram.rank();
        let mut y = Vec::with_capacity(m);
        for i in 0..m {
            let mut acc = Rational::zero();
            for j in 0..m {
                acc += &lambda[j] * Rational::from_integer(BigInt::from(self.gram.entry(i, j)));
            }
            if !acc.is_integer() {
                return Err(Error::InvalidArgument("vector is not in the dual lattice".into()));
            }
            y.push(acc.to_integer());
        }
        let coeffs: Vec<i64> = self
            .coeff_rows
            .iter()
            .zip(self.fqm.divisors())
            .map(|(row, &d)| {
                let s: BigInt = row.iter().zip(&y).map(|(a, b)| a * b).sum();
                s.mod_floor(&BigInt::from(d)).to_i64().unwrap()
            })
            .collect();
        self.fqm.element(&coeffs)
    }

    /// A representative of `mu` in `L'`.
    pub fn representative(&self, mu: &FqmElement) -> Vec<Rational> {
        let m = self.gram.rank();
        let mut out = vec![Rational::zero(); m];
        for (c, g) in mu.0.iter().zip(&self.generators) {
            for i in 0..m {
                out[i] += &g[i] * Rational::from_integer(BigInt::from(*c));
            }
        }
        out
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }
}

/// `A = L'/L` with its discriminant form.
pub fn discriminant_group(g: &GramMatrix) -> Result<Fqm> {
    Ok(DiscriminantForm::new(g)?.fqm)
}
