//! Test corpus and brute-force oracles shared by the integration tests.
//! The oracles only use element-level access to modules and lattices.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fqm_core::exact::rational::rat;
use fqm_core::lattice::DiscriminantForm;
use fqm_core::{Fqm, FqmElement, GramMatrix, Rational};
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn gram(rows: &[&[i64]]) -> GramMatrix {
    GramMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

pub fn a2() -> GramMatrix {
    GramMatrix::a_n(2)
}

pub fn u() -> GramMatrix {
    GramMatrix::hyperbolic_plane()
}

pub fn sum(parts: &[GramMatrix]) -> GramMatrix {
    parts.iter().fold(GramMatrix::empty(), |acc, g| acc.direct_sum(g))
}

/// Even lattices of rank at most 6 with `|A| <= 200` and even signature.
pub fn corpus() -> Vec<(&'static str, GramMatrix)> {
    let b = |r: &[&[i64]]| gram(r);
    vec![
        ("U", u()),
        ("A2", a2()),
        ("A2(-1)", a2().negated()),
        ("A1+A1", GramMatrix::diagonal(&[2, 2]).unwrap()),
        ("diag(2,-2)", GramMatrix::diagonal(&[2, -2]).unwrap()),
        ("U(2)", b(&[&[0, 2], &[2, 0]])),
        ("U(3)", b(&[&[0, 3], &[3, 0]])),
        ("[2,1;1,4]", b(&[&[2, 1], &[1, 4]])),
        ("[2,1;1,8]", b(&[&[2, 1], &[1, 8]])),
        ("[4,1;1,4]", b(&[&[4, 1], &[1, 4]])),
        ("[2,1;1,-2]", b(&[&[2, 1], &[1, -2]])),
        ("[2,1;1,-4]", b(&[&[2, 1], &[1, -4]])),
        ("[2,1;1,12]", b(&[&[2, 1], &[1, 12]])),
        ("A2+U", sum(&[a2(), u()])),
        ("A4", GramMatrix::a_n(4)),
        ("D4", GramMatrix::d_n(4)),
        ("A2+A2", sum(&[a2(), a2()])),
        ("A2+A2(-1)", sum(&[a2(), a2().negated()])),
        ("A3+A1", sum(&[GramMatrix::a_n(3), GramMatrix::diagonal(&[2]).unwrap()])),
        ("A1^4", GramMatrix::diagonal(&[2, 2, 2, 2]).unwrap()),
        ("A4+U", sum(&[GramMatrix::a_n(4), u()])),
        ("A4(-1)+U", sum(&[GramMatrix::a_n(4).negated(), u()])),
        ("D4+U", sum(&[GramMatrix::d_n(4), u()])),
        ("A2+[2,1;1,4]", sum(&[a2(), b(&[&[2, 1], &[1, 4]])])),
        ("A2+U+U", sum(&[a2(), u(), u()])),
        ("A2+[2,1;1,-12]", sum(&[a2(), b(&[&[2, 1], &[1, -12]])])),
        ("U+[2,1;1,26]", sum(&[u(), b(&[&[2, 1], &[1, 26]])])),
        ("A6", GramMatrix::a_n(6)),
        ("D6", GramMatrix::d_n(6)),
        ("E6", e6()),
        ("E6(-1)", e6().negated()),
        ("A2^3", sum(&[a2(), a2(), a2()])),
        ("A5+A1", sum(&[GramMatrix::a_n(5), GramMatrix::diagonal(&[2]).unwrap()])),
        ("A2+A2+U", sum(&[a2(), a2(), u()])),
    ]
}

pub fn e6() -> GramMatrix {
    // Dynkin diagram 1-3-4-5-6 with 2 attached to 4
    let mut g = vec![vec![0i64; 6]; 6];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (i, j) in [(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)] {
        g[i][j] = -1;
        g[j][i] = -1;
    }
    GramMatrix::new(g).unwrap()
}

pub fn signature(g: &GramMatrix) -> i64 {
    let (p, q) = g.signature_pair().unwrap();
    p as i64 - q as i64
}

pub fn disc(g: &GramMatrix) -> Fqm {
    DiscriminantForm::new(g).unwrap().fqm
}

/// Anisotropy by scanning every element.
pub fn scan_anisotropic(a: &Fqm) -> bool {
    a.elements().filter(|x| *x != a.zero()).all(|x| !a.q_value(&x).is_zero())
}

fn image(a: &Fqm, b: &Fqm, images: &[FqmElement], x: &FqmElement) -> FqmElement {
    let mut acc = b.zero();
    for (k, img) in x.coeffs().iter().zip(images) {
        acc = b.add(&acc, &b.scale(*k as i64, img));
    }
    let _ = a;
    acc
}

/// Every `Q`-preserving isomorphism `a -> b`, as images of the generators
/// of `a`.
pub fn brute_isometries(a: &Fqm, b: &Fqm, limit: usize) -> Vec<Vec<FqmElement>> {
    let mut out = Vec::new();
    if a.order() != b.order() {
        return out;
    }
    let gens: Vec<FqmElement> = (0..a.rank()).map(|i| a.generator(i)).collect();
    let candidates: Vec<Vec<FqmElement>> = gens
        .iter()
        .map(|g| b.elements().filter(|y| b.order_of(y) == a.order_of(g) && b.q_value(y) == a.q_value(g)).collect())
        .collect();
    let mut chosen: Vec<FqmElement> = Vec::new();
    fn rec(
        a: &Fqm,
        b: &Fqm,
        gens: &[FqmElement],
        cands: &[Vec<FqmElement>],
        chosen: &mut Vec<FqmElement>,
        out: &mut Vec<Vec<FqmElement>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let i = chosen.len();
        if i == gens.len() {
            let imgs: BTreeSet<FqmElement> = a.elements().map(|x| image(a, b, chosen, &x)).collect();
            let q_ok = a.elements().all(|x| b.q_value(&image(a, b, chosen, &x)) == a.q_value(&x));
            if imgs.len() as u64 == b.order() && q_ok {
                out.push(chosen.clone());
            }
            return;
        }
        for y in &cands[i] {
            if (0..i).all(|j| b.b_value(y, &chosen[j]) == a.b_value(&gens[i], &gens[j])) {
                chosen.push(y.clone());
                rec(a, b, gens, cands, chosen, out, limit);
                chosen.pop();
            }
        }
    }
    rec(a, b, &gens, &candidates, &mut chosen, &mut out, limit);
    out
}

pub fn brute_isomorphic(a: &Fqm, b: &Fqm) -> bool {
    let a = a.without_trivial_generators();
    let b = b.without_trivial_generators();
    if a.is_trivial() || b.is_trivial() {
        return a.order() == b.order();
    }
    !brute_isometries(&a, &b, 1).is_empty()
}

/// Applies an automorphism given by generator images.
pub fn apply(a: &Fqm, images: &[FqmElement], x: &FqmElement) -> FqmElement {
    image(a, a, images, x)
}

/// Counts of `lambda in L'` with `Q(lambda) <= n_max`, by class and norm,
/// from `lambda = G^{-1} y` over a box of `y`.
pub fn theta_oracle(g: &GramMatrix, n_max: &Rational, box_bound: i64) -> BTreeMap<(FqmElement, Rational), u64> {
    let d = DiscriminantForm::new(g).unwrap();
    let inv = g.inverse().unwrap();
    let n = g.rank();
    let mut out = BTreeMap::new();
    let mut y = vec![-box_bound; n];
    loop {
        let lambda: Vec<Rational> =
            (0..n).map(|i| (0..n).map(|j| &inv[i][j] * Rational::from_integer(y[j].into())).sum()).collect();
        let q = g.q_rational(&lambda);
        if q <= *n_max {
            *out.entry((d.class_of(&lambda).unwrap(), q)).or_insert(0) += 1;
        }
        let mut i = 0;
        while i < n && y[i] == box_bound {
            y[i] = -box_bound;
            i += 1;
        }
        if i == n {
            break;
        }
        y[i] += 1;
    }
    out
}

pub fn is_square_i128(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).any(|s| s >= 0 && s * s == n)
}

fn q_int(g: &GramMatrix, x: &[i128]) -> i128 {
    let n = x.len();
    let mut s = 0i128;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * g.entry(i, j) as i128 * x[j];
        }
    }
    s / 2
}

fn b_int(g: &GramMatrix, x: &[i128], y: &[i128]) -> i128 {
    let n = x.len();
    let mut s = 0i128;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * g.entry(i, j) as i128 * y[j];
        }
    }
    s
}

/// A nonzero integer isotropic vector, found by fixing all but the last
/// coordinate in a box and solving the quadratic in the last one over Q.
pub fn find_isotropic(g: &GramMatrix, box_bound: i64) -> Option<Vec<i128>> {
    let n = g.rank();
    let last = n - 1;
    if g.entry(last, last) == 0 {
        let mut e = vec![0i128; n];
        e[last] = 1;
        return Some(e);
    }
    if n == 1 {
        return None;
    }
    let a = g.entry(last, last) as i128; // 2 * coefficient of t^2
    let mut x = vec![-(box_bound as i128); last];
    loop {
        if x.iter().any(|&v| v != 0) {
            let mut full: Vec<i128> = x.clone();
            full.push(0);
            let c = q_int(g, &full);
            let bcoef: i128 = (0..last).map(|i| g.entry(i, last) as i128 * x[i]).sum();
            // (a/2) t^2 + b t + c = 0  <=>  a t^2 + 2 b t + 2 c = 0
            let disc = 4 * bcoef * bcoef - 8 * a * c;
            if is_square_i128(disc) {
                let r = (disc as f64).sqrt().round() as i128;
                let r = (r - 2..=r + 2).find(|s| s * s == disc).unwrap();
                // t = (-2b + r) / (2a); scale by 2a
                let mut v: Vec<i128> = x.iter().map(|&xi| xi * 2 * a).collect();
                v.push(-2 * bcoef + r);
                debug_assert_eq!(q_int(g, &v), 0);
                return Some(v);
            }
        }
        let mut i = 0;
        while i < last && x[i] == box_bound as i128 {
            x[i] = -(box_bound as i128);
            i += 1;
        }
        if i == last {
            return None;
        }
        x[i] += 1;
    }
}

fn rank_i128(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<Rational>> =
        rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for k in 0..cols {
                    let t = &f * &m[rank][k];
                    m[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Witt index over Q of a form of rank at most 4, from explicit isotropic
/// vectors. A box that is too small undercounts.
pub fn oracle_witt(g: &GramMatrix, box_bound: i64) -> usize {
    let n = g.rank();
    let Some(x) = find_isotropic(g, box_bound) else { return 0 };
    if n < 4 {
        return 1;
    }
    // x^perp is spanned by a_k e_i - a_i e_k (a = G x); its quotient by <x>
    // is a nondegenerate binary form.
    let a: Vec<i128> = (0..n).map(|i| (0..n).map(|j| g.entry(i, j) as i128 * x[j]).sum()).collect();
    let k = (0..n).find(|&i| a[i] != 0).unwrap();
    let perp: Vec<Vec<i128>> = (0..n)
        .filter(|&i| i != k)
        .map(|i| {
            let mut w = vec![0i128; n];
            w[i] = a[k];
            w[k] = -a[i];
            w
        })
        .collect();
    for i in 0..perp.len() {
        for j in i + 1..perp.len() {
            if rank_i128(&[x.clone(), perp[i].clone(), perp[j].clone()]) == 3 {
                let (u, v) = (&perp[i], &perp[j]);
                let h = [[b_int(g, u, u), b_int(g, u, v)], [b_int(g, v, u), b_int(g, v, v)]];
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                return if is_square_i128(-det) { 2 } else { 1 };
            }
        }
    }
    unreachable!("x^perp has dimension n - 1")
}

/// `(a/n)` as a product of Legendre symbols by Euler's criterion.
pub fn jacobi_oracle(a: i64, n: u64) -> i64 {
    let mut result = 1i64;
    let mut m = n;
    let mut q = 3u64;
    while m > 1 {
        if m % q == 0 {
            m /= q;
            let r = a.rem_euclid(q as i64) as u64;
            let mut pw = 1u64;
            for _ in 0..(q - 1) / 2 {
                pw = pw * r % q;
            }
            result *= match pw {
                0 => 0,
                1 => 1,
                _ => -1,
            };
        } else {
            q += 2;
        }
    }
    result
}

/// `e(sig(A)/8)` read off a floating point Gauss sum.
pub fn float_signature(a: &Fqm, keep: impl Fn(&FqmElement) -> bool) -> (u64, i64) {
    let mut g = Complex64::new(0.0, 0.0);
    let mut count = 0u64;
    for x in a.elements().filter(|x| keep(x)) {
        let q = a.q_value(&x).to_f64().unwrap();
        g += Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * q);
        count += 1;
    }
    let k = (g.arg() / (std::f64::consts::PI / 4.0)).round() as i64;
    (count, k.rem_euclid(8))
}

/// `1 + chi_{F,p}(m(p,p)) p^{m/2-5}` for `l = 0` as an exact Gaussian
/// rational `(re, im)`.
pub fn nonvanishing_oracle(a: &Fqm, m: i64, p: u64) -> (Rational, Rational) {
    let is_p_power = |mut k: u64| {
        while k % p == 0 {
            k /= p;
        }
        k == 1
    };
    let (ap_order, sig) = float_signature(a, |x| is_p_power(a.order_of(x)));
    let perp = a.order() / ap_order;
    let chi = if perp == 1 { 1 } else { jacobi_oracle(p as i64, perp) };
    let e = m / 2 - 5;
    let pe = if e >= 0 { Rational::from_integer((p as i64).pow(e as u32).into()) } else { rat(1, (p as i64).pow((-e) as u32)) };
    let scale = pe * Rational::from_integer((chi * ap_order as i64).into());
    // e(-sig/4) = i^{-sig}
    let (re, im) = match (-sig).rem_euclid(4) {
        0 => (scale, Rational::zero()),
        1 => (Rational::zero(), scale),
        2 => (-scale, Rational::zero()),
        _ => (Rational::zero(), -scale),
    };
    (re + Rational::from_integer(1.into()), im)
}

pub fn abs_f64(x: &Rational) -> f64 {
    x.abs().to_f64().unwrap()
}
