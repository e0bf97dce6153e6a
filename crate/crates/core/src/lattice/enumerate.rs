//! Enumeration of vectors in a coset `mu + L` by norm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::{DiscriminantForm, GramMatrix};
use crate::error::{Error, Result};
use crate::exact::rational::frac;
use crate::exact::Rational;
use crate::fqm::FqmElement;

/// A vector `y / den` of the dual lattice, with `y` integral.
struct Scaled {
    den: i128,
    num: Vec<i128>,
}

impl Scaled {
    fn new(v: &[Rational]) -> Result<Self> {
        let mut den = BigInt::from(1);
        for x in v {
            den = den.lcm(x.denom());
        }
        let overflow = || Error::InvalidArgument("coset representative too large".into());
        let num = v
            .iter()
            .map(|x| (x * Rational::from_integer(den.clone())).to_integer().to_i128().ok_or_else(overflow))
            .collect::<Result<_>>()?;
        Ok(Self { den: den.to_i128().ok_or_else(overflow)?, num })
    }
}

fn quad(g: &GramMatrix, y: &[i128]) -> i128 {
    let m = g.rank();
    let mut acc = 0i128;
    for i in 0..m {
        if y[i] == 0 {
            continue;
        }
        let mut row = 0i128;
        for j in 0..m {
            row += g.entry(i, j) as i128 * y[j];
        }
        acc += y[i] * row;
    }
    acc
}

/// `Q(u) = sum_i q_i (u_i + sum_{j>i} mu_ij u_j)^2` for `Q = u^T G u / 2`.
fn fincke_pohst_form(g: &GramMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = g.rank();
    let a: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| g.entry(i, j) as f64 / 2.0).collect()).collect();
    let mut q = vec![0.0; m];
    let mut mu = vec![vec![0.0; m]; m];
    for i in 0..m {
        q[i] = a[i][i] - (0..i).map(|k| q[k] * mu[k][i] * mu[k][i]).sum::<f64>();
        for j in (i + 1)..m {
            mu[i][j] = (a[i][j] - (0..i).map(|k| q[k] * mu[k][i] * mu[k][j]).sum::<f64>()) / q[i];
        }
    }
    (q, mu)
}

/// Calls `f(y, 2 den^2 Q(lambda))` for every `lambda = y / den` in
/// `shift + L` with `Q(lambda) <= max_q`. Requires `g` positive definite.
fn enumerate_definite(g: &GramMatrix, shift: &Scaled, max_q: &Rational, f: &mut dyn FnMut(&[i128], i128)) {
    let m = g.rank();
    let den = shift.den;
    let limit = max_q * Rational::from_integer(BigInt::from(2 * den * den));
    if m == 0 {
        if !limit.is_negative() {
            f(&[], 0);
        }
        return;
    }
    let (q, mu) = fincke_pohst_form(g);
    let r: Vec<f64> = shift.num.iter().map(|&x| x as f64 / den as f64).collect();
    let max = crate::exact::rational::to_f64(max_q);
    let slack = 1e-7 * (1.0 + max.abs());
    let mut x = vec![0i128; m];
    let mut u = vec![0f64; m];
    let mut y = vec![0i128; m];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        rem: f64,
        slack: f64,
        g: &GramMatrix,
        q: &[f64],
        mu: &[Vec<f64>],
        r: &[f64],
        shift: &Scaled,
        limit: &Rational,
        x: &mut [i128],
        u: &mut [f64],
        y: &mut [i128],
        f: &mut dyn FnMut(&[i128], i128),
    ) {
        let m = q.len();
        let c: f64 = ((i + 1)..m).map(|j| mu[i][j] * u[j]).sum();
        let rad = ((rem.max(0.0) + slack) / q[i]).sqrt();
        let lo = (-c - r[i] - rad - 1e-9).ceil() as i128;
        let hi = (-c - r[i] + rad + 1e-9).floor() as i128;
        for xi in lo..=hi {
            x[i] = xi;
            u[i] = xi as f64 + r[i];
            let t = u[i] + c;
            let rem2 = rem - q[i] * t * t;
            if rem2 < -slack {
                continue;
            }
            if i == 0 {
                for k in 0..m {
                    y[k] = shift.num[k] + shift.den * x[k];
                }
                let v = quad(g, y);
                if Rational::from_integer(BigInt::from(v)) <= *limit {
                    f(y, v);
                }
            } else {
                rec(i - 1, rem2, slack, g, q, mu, r, shift, limit, x, u, y, f);
            }
        }
    }
    rec(m - 1, max, slack, g, &q, &mu, &r, shift, &limit, &mut x, &mut u, &mut y, f);
}

/// Box enumeration `|x_i| <= bound` around the representative.
fn enumerate_box(g: &GramMatrix, shift: &Scaled, bound: u32, f: &mut dyn FnMut(&[i128], i128)) {
    let m = g.rank();
    let b = bound as i128;
    let mut x = vec![-b; m];
    let mut y = vec![0i128; m];
    loop {
        for k in 0..m {
            y[k] = shift.num[k] + shift.den * x[k];
        }
        f(&y, quad(g, &y));
        let mut k = m;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            x[k] += 1;
            if x[k] <= b {
                break;
            }
            x[k] = -b;
        }
    }
}

/// How a coset should be searched.
enum Mode {
    Definite { negate: bool },
    Box(u32),
}

fn mode_for(g: &GramMatrix, bound: Option<u32>) -> Result<Mode> {
    let (p, q) = g.signature_pair()?;
    if q == 0 {
        Ok(Mode::Definite { negate: false })
    } else if p == 0 {
        Ok(Mode::Definite { negate: true })
    } else {
        bound.map(Mode::Box).ok_or_else(|| {
            Error::InvalidArgument("indefinite lattice needs an explicit coefficient bound".into())
        })
    }
}

/// Visits `lambda in mu + L` with `Q(lambda) <= max_q` (definite case),
/// or every vector of the coefficient box (indefinite case, `bound`
/// required). The callback gets `lambda` and `Q(lambda)`.
pub fn for_each_coset_vector(
    d: &DiscriminantForm,
    mu: &FqmElement,
    max_q: &Rational,
    bound: Option<u32>,
    f: &mut dyn FnMut(&[Rational], &Rational),
) -> Result<()> {
    let g = d.gram();
    let shift = Scaled::new(&d.representative(mu))?;
    let den = shift.den;
    let scale = Rational::from_integer(BigInt::from(2 * den * den));
    let mut emit = |y: &[i128], v: i128| {
        let lambda: Vec<Rational> =
            y.iter().map(|&c| Rational::new(BigInt::from(c), BigInt::from(den))).collect();
        f(&lambda, &(Rational::from_integer(BigInt::from(v)) / &scale));
    };
    match mode_for(g, bound)? {
        Mode::Definite { negate: false } => enumerate_definite(g, &shift, max_q, &mut |y, v| emit(y, v)),
        // Q <= max_q is unbounded below on a negative definite lattice
        Mode::Definite { negate: true } => {
            let b = bound.ok_or_else(|| {
                Error::InvalidArgument("negative definite lattice needs an explicit coefficient bound".into())
            })?;
            enumerate_box(g, &shift, b, &mut |y, v| {
                if Rational::from_integer(BigInt::from(v)) <= max_q * &scale {
                    emit(y, v)
                }
            })
        }
        Mode::Box(b) => enumerate_box(g, &shift, b, &mut |y, v| {
            if Rational::from_integer(BigInt::from(v)) <= max_q * &scale {
                emit(y, v)
            }
        }),
    }
    Ok(())
}

/// All `lambda in mu + L` with `Q(lambda) = norm`, sorted. Complete for
/// definite lattices (`bound` ignored); otherwise complete within the box
/// `|x_i| <= bound` of integer offsets from the coset representative.
pub fn coset_vectors(g: &GramMatrix, coset: &FqmElement, norm: &Rational, bound: u32) -> Result<Vec<Vec<Rational>>> {
    let d = DiscriminantForm::new(g)?;
    if !d.fqm.contains(coset) {
        return Err(Error::InvalidArgument("element does not belong to the discriminant group".into()));
    }
    if frac(norm) != d.fqm.q_value(coset) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    match mode_for(g, Some(bound))? {
        Mode::Definite { negate: true } => {
            // enumerate on -L, where the norms flip sign
            let neg = g.negated();
            let dn = DiscriminantForm::new(&neg)?;
            let rep = d.representative(coset);
            let mu_neg = dn.class_of(&rep)?;
            let target = -norm;
            if norm.is_positive() {
                return Ok(out);
            }
            for_each_coset_vector(&dn, &mu_neg, &target, None, &mut |v, q| {
                if *q == target {
                    out.push(v.to_vec());
                }
            })?;
        }
        _ => {
            if g.is_positive_definite() && norm.is_negative() {
                return Ok(out);
            }
            for_each_coset_vector(&d, coset, norm, Some(bound), &mut |v, q| {
                if q == norm {
                    out.push(v.to_vec());
                }
            })?;
        }
    }
    out.sort();
    Ok(out)
}

/// Number of vectors of `L'` in the given coset class up to norm, keyed
/// by norm, for positive definite lattices.
pub fn short_vector_count(d: &DiscriminantForm, mu: &FqmElement, max_q: &Rational) -> Result<std::collections::BTreeMap<Rational, u64>> {
    let mut counts = std::collections::BTreeMap::new();
    for_each_coset_vector(d, mu, max_q, None, &mut |_, q| {
        *counts.entry(q.clone()).or_insert(0u64) += 1;
    })?;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    #[test]
    fn a2_examples() {
        let g = GramMatrix::a_n(2);
        let zero = FqmElement(vec![0]);
        let gen = FqmElement(vec![1]);
        assert_eq!(coset_vectors(&g, &zero, &rat(0, 1), 0).unwrap(), vec![vec![rat(0, 1), rat(0, 1)]]);
        assert_eq!(coset_vectors(&g, &zero, &rat(1, 1), 0).unwrap().len(), 6);
        assert_eq!(coset_vectors(&g, &gen, &rat(1, 3), 0).unwrap().len(), 3);
        assert!(coset_vectors(&g, &gen, &rat(2, 3), 0).unwrap().is_empty());
        assert_eq!(coset_vectors(&g, &FqmElement(vec![2]), &rat(1, 3), 0).unwrap().len(), 3);
    }

    #[test]
    fn brute_force_agreement() {
        // compare against a plain box scan over L' = G^{-1} Z^m
        let g = GramMatrix::a_n(2).direct_sum(&GramMatrix::diagonal(&[4]).unwrap());
        let d = DiscriminantForm::new(&g).unwrap();
        let inv = g.inverse().unwrap();
        let mut brute: std::collections::BTreeMap<(FqmElement, Rational), usize> = Default::default();
        let b = 12i64;
        for a in -b..=b {
            for c in -b..=b {
                for e in -b..=b {
                    let yv = [a, c, e];
                    let lambda: Vec<Rational> = (0..3)
                        .map(|i| (0..3).map(|j| &inv[i][j] * Rational::from_integer(BigInt::from(yv[j]))).sum())
                        .collect();
                    let q = g.q_rational(&lambda);
                    if q <= rat(2, 1) {
                        *brute.entry((d.class_of(&lambda).unwrap(), q)).or_default() += 1;
                    }
                }
            }
        }
        for ((mu, q), n) in brute {
            assert_eq!(coset_vectors(&g, &mu, &q, 0).unwrap().len(), n, "{mu} {q}");
        }
    }

    #[test]
    fn indefinite_box() {
        let g = GramMatrix::hyperbolic_plane();
        let v = coset_vectors(&g, &FqmElement(vec![]), &rat(0, 1), 2).unwrap();
        // xy = 0 within the 5x5 box
        assert_eq!(v.len(), 9);
        let g = GramMatrix::a_n(2).negated();
        assert_eq!(coset_vectors(&g, &FqmElement(vec![0]), &rat(-1, 1), 0).unwrap().len(), 6);
    }
}
