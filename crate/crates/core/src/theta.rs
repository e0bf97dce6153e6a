//! Coset theta series of even lattices and a numeric check of their
//! transformation law under `T` and `S`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, to_f64};
use crate::exact::Rational;
use crate::fqm::FqmElement;
use crate::json::{rational_matrix, rational_str};
use crate::lattice::{for_each_coset_vector, short_vector_count, DiscriminantForm, GramMatrix};
use crate::weil::build_weil_matrices;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaTerm {
    #[serde(with = "rational_str")]
    pub n: Rational,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSeries {
    pub mu: FqmElement,
    pub terms: Vec<ThetaTerm>,
}

impl CosetSeries {
    pub fn coefficient(&self, n: &Rational) -> u64 {
        self.terms.iter().find(|t| &t.n == n).map_or(0, |t| t.count)
    }
}

/// Coefficients `#{lambda in mu + L : Q(lambda) = n}` for `n <= n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaBlock {
    #[serde(with = "rational_str")]
    pub n_max: Rational,
    pub cosets: Vec<CosetSeries>,
}

impl ThetaBlock {
    pub fn coset(&self, mu: &FqmElement) -> Option<&CosetSeries> {
        self.cosets.iter().find(|c| &c.mu == mu)
    }

    /// Rows `coset_index,exponent,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("coset_index,exponent,coefficient\n");
        for (i, c) in self.cosets.iter().enumerate() {
            for t in &c.terms {
                out.push_str(&format!("{i},{},{}\n", format_rational(&t.n), t.count));
            }
        }
        out
    }
}

pub fn theta_coefficients(g: &GramMatrix, n_max: &Rational) -> Result<ThetaBlock> {
    if !g.is_positive_definite() {
        return Err(Error::InvalidArgument(
            "theta coefficients of a non-definite lattice need a splitting and a coefficient bound".into(),
        ));
    }
    let d = DiscriminantForm::new(g)?;
    let mut cosets = Vec::new();
    for mu in d.fqm.elements() {
        let counts = short_vector_count(&d, &mu, n_max)?;
        let terms = counts.into_iter().map(|(n, count)| ThetaTerm { n, count }).collect();
        cosets.push(CosetSeries { mu, terms });
    }
    Ok(ThetaBlock { n_max: n_max.clone(), cosets })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitTerm {
    /// `Q` of the component orthogonal to the negative definite subspace.
    #[serde(with = "rational_str")]
    pub q_pos: Rational,
    /// `Q` of the component in the negative definite subspace.
    #[serde(with = "rational_str")]
    pub q_neg: Rational,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCosetSeries {
    pub mu: FqmElement,
    pub terms: Vec<SplitTerm>,
}

/// Theta data of an indefinite lattice at the base point given by a
/// negative definite subspace `z`, truncated to majorant `<= majorant_max`
/// and to the coefficient box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitThetaBlock {
    #[serde(with = "rational_matrix")]
    pub z_basis: Vec<Vec<Rational>>,
    #[serde(with = "rational_str")]
    pub majorant_max: Rational,
    pub bound: u32,
    pub cosets: Vec<SplitCosetSeries>,
}

/// `z_basis` holds `q` rational vectors (lattice coordinates) spanning a
/// negative definite subspace.
pub fn theta_coefficients_split(
    g: &GramMatrix,
    z_basis: &[Vec<Rational>],
    majorant_max: &Rational,
    bound: u32,
) -> Result<SplitThetaBlock> {
    let (_, q) = g.signature_pair()?;
    let m = g.rank();
    if z_basis.len() != q || z_basis.iter().any(|v| v.len() != m) {
        return Err(Error::InvalidArgument(format!("splitting needs {q} vectors of length {m}")));
    }
    // Gram of z, which must be negative definite
    let zz: Vec<Vec<Rational>> =
        z_basis.iter().map(|x| z_basis.iter().map(|y| g.bilinear_rational(x, y)).collect()).collect();
    let zz_inv = invert_negative_definite(&zz)?;
    let d = DiscriminantForm::new(g)?;
    let mut cosets = Vec::new();
    for mu in d.fqm.elements() {
        let mut counts: BTreeMap<(Rational, Rational), u64> = BTreeMap::new();
        for_each_coset_vector(&d, &mu, majorant_max, Some(bound), &mut |lambda, qv| {
            // lambda_z = sum_ij z_i (zz^-1)_ij (z_j, lambda)
            let pairings: Vec<Rational> = z_basis.iter().map(|z| g.bilinear_rational(z, lambda)).collect();
            let mut q_neg = Rational::zero();
            for i in 0..q {
                for j in 0..q {
                    q_neg += &pairings[i] * &zz_inv[i][j] * &pairings[j];
                }
            }
            q_neg /= Rational::from_integer(BigInt::from(2));
            let q_pos = qv - &q_neg;
            if &q_pos - &q_neg <= *majorant_max {
                *counts.entry((q_pos, q_neg)).or_insert(0) += 1;
            }
        })?;
        let terms = counts.into_iter().map(|((q_pos, q_neg), count)| SplitTerm { q_pos, q_neg, count }).collect();
        cosets.push(SplitCosetSeries { mu, terms });
    }
    Ok(SplitThetaBlock { z_basis: z_basis.to_vec(), majorant_max: majorant_max.clone(), bound, cosets })
}

fn invert_negative_definite(a: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }));
            r
        })
        .collect();
    // Gauss-Jordan without row exchanges; the pivots are then the LDL
    // pivots, all negative exactly when the matrix is negative definite
    for k in 0..n {
        if !m[k][k].is_negative() {
            return Err(Error::InvalidArgument("splitting subspace is not negative definite".into()));
        }
        let p = m[k][k].clone();
        for x in m[k].iter_mut() {
            *x /= &p;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                let row_k = m[k].clone();
                for (x, y) in m[i].iter_mut().zip(&row_k) {
                    *x -= &f * y;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Pivots `d_i` of `G = L D L^T`, so that `Q(x) = 1/2 sum d_i (x_i + ...)^2`.
fn ldl_pivots(g: &GramMatrix) -> Vec<Rational> {
    let n = g.rank();
    let mut a = g.to_rational();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let p = a[k][k].clone();
        for i in (k + 1)..n {
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        out.push(p);
    }
    out
}

/// Certified bound for the tail of one coset series of a positive definite
/// lattice: `sum_{Q(lambda) > N} exp(-2 pi y Q(lambda))`.
///
/// The number of coset vectors with `Q <= t` is at most
/// `prod_i (2 sqrt(2t/d_i) + 1)`, and summing by parts against
/// `exp(-2 pi y t)` gives an incomplete gamma integral.
#[derive(Clone, Debug)]
pub struct TailBound {
    rank: usize,
    /// Lower bounds for the LDL pivots.
    pivots: Vec<f64>,
}

impl TailBound {
    pub fn new(g: &GramMatrix) -> Result<Self> {
        if !g.is_positive_definite() {
            return Err(Error::InvalidArgument("tail bound needs a positive definite lattice".into()));
        }
        let pivots = ldl_pivots(g).iter().map(|d| to_f64(d) * (1.0 - 1e-12)).collect();
        Ok(Self { rank: g.rank(), pivots })
    }

    /// `None` when the incomplete gamma estimate does not apply yet.
    pub fn tail(&self, y: f64, n: f64) -> Option<f64> {
        let m = self.rank as f64;
        let x = 2.0 * std::f64::consts::PI * y * n;
        if n < 1.0 || x <= m / 2.0 {
            return None;
        }
        let c: f64 = self.pivots.iter().map(|d| 2.0 * (2.0 / d).sqrt() + 1.0 / n.sqrt()).product();
        // Gamma(s, x) <= x^{s-1} e^{-x} / (1 - (s-1)/x) with s = m/2 + 1
        let bound = c * n.powf(m / 2.0) * (-x).exp() / (1.0 - m / (2.0 * x));
        Some(bound * (1.0 + 1e-9))
    }

    /// The least integer `N` whose tail at `y` is at most `eps`.
    pub fn required_n(&self, y: f64, eps: f64) -> Result<u64> {
        for n in 1..=100_000u64 {
            if self.tail(y, n as f64).is_some_and(|t| t <= eps) {
                return Ok(n);
            }
        }
        Err(Error::InvalidArgument(format!("no truncation below 1e5 reaches {eps:e} at Im(tau) = {y}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleResidual {
    pub tau: [f64; 2],
    /// `|Theta(tau + 1) - rho(T) Theta(tau)|_max`.
    pub t_residual: f64,
    /// `|Theta(-1/tau) - tau^{m/2} rho(S) Theta(tau)|_max`, plus tail and
    /// rounding bounds.
    pub s_residual: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModularityReport {
    #[serde(with = "rational_str")]
    pub n_max: Rational,
    pub target: f64,
    pub samples: Vec<SampleResidual>,
    pub max_residual: f64,
}

/// Largest accuracy targeted by the double precision evaluation.
const MAX_EVAL_BITS: u32 = 50;

fn eval_block(block: &ThetaBlock, tau: Complex64) -> (Vec<Complex64>, Vec<f64>) {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut vals = Vec::with_capacity(block.cosets.len());
    let mut abs = Vec::with_capacity(block.cosets.len());
    for c in &block.cosets {
        let mut s = Complex64::new(0.0, 0.0);
        let mut a = 0.0;
        for t in &c.terms {
            let term = (two_pi_i * tau * to_f64(&t.n)).exp() * t.count as f64;
            a += term.norm();
            s += term;
        }
        vals.push(s);
        abs.push(a);
    }
    (vals, abs)
}

/// Checks `Theta(tau + 1) = rho(T) Theta(tau)` and
/// `Theta(-1/tau) = tau^{m/2} rho(S) Theta(tau)` at every sample. The
/// truncation point comes from the tail bound unless `n_max` is given, in
/// which case it must be large enough for `2^-precision_bits`.
pub fn verify_theta_modularity(
    g: &GramMatrix,
    tau_samples: &[Complex64],
    precision_bits: u32,
    n_max: Option<&Rational>,
) -> Result<ModularityReport> {
    if tau_samples.iter().any(|t| t.im <= 0.0) {
        return Err(Error::InvalidArgument("tau must lie in the upper half plane".into()));
    }
    let tb = TailBound::new(g)?;
    let target = 2f64.powi(-(precision_bits.min(MAX_EVAL_BITS) as i32));
    // each coset tail enters the S comparison with weight at most
    // 1 + |tau|^{m/2} sqrt|A|
    let d = DiscriminantForm::new(g)?;
    let order = d.fqm.order() as f64;
    let m = g.rank();
    let half_m = m as f64 / 2.0;
    let mut required = 1u64;
    for tau in tau_samples {
        let weight = 1.0 + tau.norm().powf(half_m) * order.sqrt();
        let s = -tau.inv();
        for y in [tau.im, s.im] {
            required = required.max(tb.required_n(y, target / (2.0 * weight))?);
        }
    }
    let n_max = match n_max {
        Some(n) => {
            let have = to_f64(n);
            if have < required as f64 {
                return Err(Error::InsufficientNMax { given: format_rational(n), required: required.to_string() });
            }
            n.clone()
        }
        None => Rational::from_integer(BigInt::from(required)),
    };
    let n_f = to_f64(&n_max);
    let block = theta_coefficients(g, &n_max)?;
    let w = build_weil_matrices(&d.fqm, m as i64)?;
    let s_mat = w.rho_s.to_dense().to_c64();
    let t_mat = w.rho_t.to_dense().to_c64();
    let k = block.cosets.len();
    let eps = f64::EPSILON;
    let mut samples = Vec::new();
    for &tau in tau_samples {
        let (th, th_abs) = eval_block(&block, tau);
        let (th1, th1_abs) = eval_block(&block, tau + 1.0);
        let s_tau = -tau.inv();
        let (ths, ths_abs) = eval_block(&block, s_tau);
        let factor = tau.powf(half_m);
        let tail_tau = tb.tail(tau.im, n_f).unwrap_or(f64::INFINITY);
        let tail_s = tb.tail(s_tau.im, n_f).unwrap_or(f64::INFINITY);
        let mut t_res: f64 = 0.0;
        let mut s_res: f64 = 0.0;
        for i in 0..k {
            let rt = t_mat[i][i] * th[i];
            let rounding_t = 64.0 * eps * (th_abs[i] + th1_abs[i]);
            t_res = t_res.max((th1[i] - rt).norm() + rounding_t);
            let mut rs = Complex64::new(0.0, 0.0);
            let mut rs_abs = 0.0;
            for j in 0..k {
                rs += s_mat[i][j] * th[j];
                rs_abs += s_mat[i][j].norm() * th_abs[j];
            }
            rs *= factor;
            rs_abs *= factor.norm();
            let rounding_s = 64.0 * eps * (ths_abs[i] + rs_abs);
            let tail = tail_s + factor.norm() * order.sqrt() * tail_tau;
            s_res = s_res.max((ths[i] - rs).norm() + rounding_s + tail);
        }
        samples.push(SampleResidual {
            tau: [tau.re, tau.im],
            t_residual: t_res,
            s_residual: s_res,
            tail_bound: tail_s + factor.norm() * order.sqrt() * tail_tau,
        });
    }
    let max_residual = samples.iter().map(|s| s.t_residual.max(s.s_residual)).fold(0.0, f64::max);
    Ok(ModularityReport { n_max, target, samples, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn i() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn a2_coefficients() {
        let block = theta_coefficients(&GramMatrix::a_n(2), &int(2)).unwrap();
        let zero = block.coset(&FqmElement(vec![0])).unwrap();
        assert_eq!(zero.coefficient(&int(0)), 1);
        assert_eq!(zero.coefficient(&int(1)), 6);
        let gen = block.coset(&FqmElement(vec![1])).unwrap();
        assert_eq!(gen.coefficient(&rat(1, 3)), 3);
        assert_eq!(gen.terms, block.coset(&FqmElement(vec![2])).unwrap().terms);
        assert!(block.to_csv().starts_with("coset_index,exponent,coefficient\n0,0,1\n"));
    }

    #[test]
    fn rank_one() {
        let block = theta_coefficients(&GramMatrix::diagonal(&[2]).unwrap(), &int(1)).unwrap();
        let zero = block.coset(&FqmElement(vec![0])).unwrap();
        assert_eq!(zero.coefficient(&int(0)), 1);
        assert_eq!(zero.coefficient(&int(1)), 2);
    }

    #[test]
    fn indefinite_needs_split() {
        let u = GramMatrix::hyperbolic_plane();
        assert!(theta_coefficients(&u, &int(2)).is_err());
        // z spanned by e1 - e2, Q(z) = -1
        let z = vec![vec![int(1), int(-1)]];
        let block = theta_coefficients_split(&u, &z, &int(1), 3).unwrap();
        let terms = &block.cosets[0].terms;
        // the majorant is (x^2 + y^2)/2, so the box |x|, |y| <= 1 survives
        assert_eq!(terms.iter().map(|t| t.count).sum::<u64>(), 9);
        let count = |qp: Rational, qn: Rational| terms.iter().find(|t| t.q_pos == qp && t.q_neg == qn).map(|t| t.count);
        assert_eq!(count(int(0), int(0)), Some(1));
        // +-(1, -1) lie on z
        assert_eq!(count(int(0), int(-1)), Some(2));
        assert_eq!(count(int(1), int(0)), Some(2));
        assert!(theta_coefficients_split(&u, &[vec![int(1), int(1)]], &int(1), 3).is_err());
    }

    #[test]
    fn a2_modularity_at_i() {
        let r = verify_theta_modularity(&GramMatrix::a_n(2), &[i()], 40, None).unwrap();
        assert!(r.max_residual < 1e-8, "{r:?}");
        assert!(r.samples[0].t_residual < 1e-12);
        let r = verify_theta_modularity(&GramMatrix::a_n(2), &[Complex64::new(0.3, 0.9)], 40, None).unwrap();
        assert!(r.max_residual < 1e-8, "{r:?}");
    }

    #[test]
    fn insufficient_n_max() {
        let err = verify_theta_modularity(&GramMatrix::a_n(2), &[i()], 40, Some(&int(1))).unwrap_err();
        assert!(matches!(err, Error::InsufficientNMax { .. }));
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        // for Z with Q = x^2 the tail is sum_{|x| > sqrt N} exp(-2 pi y x^2)
        let tb = TailBound::new(&GramMatrix::diagonal(&[2]).unwrap()).unwrap();
        for n in [2u64, 4, 9] {
            let y = 0.5;
            let true_tail: f64 = (1..100)
                .filter(|x| (x * x) as u64 > n)
                .map(|x| 2.0 * (-2.0 * std::f64::consts::PI * y * (x * x) as f64).exp())
                .sum();
            assert!(tb.tail(y, n as f64).unwrap() >= true_tail);
        }
    }
}
