use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Fqm, FqmElement};
use crate::error::{Error, Result};
use crate::exact::rational::{frac, Rational};
use crate::nt;

/// Largest module scanned element by element.
pub const ANISOTROPY_SCAN_BOUND: u64 = 1_000_000;
/// Default bound on `|A|` for automorphism and isomorphism searches.
pub const AUT_SEARCH_BOUND: u64 = 10_000;

/// True iff `Q(mu) = 0` only for `mu = 0`.
pub fn is_anisotropic(a: &Fqm) -> Result<bool> {
    let order = a.order();
    if order > ANISOTROPY_SCAN_BOUND {
        return Err(Error::SizeLimit { order, bound: ANISOTROPY_SCAN_BOUND });
    }
    Ok(a.elements().skip(1).all(|x| a.q_residue(&x) != 0))
}

/// Splits `A` into its `p`-primary parts, keyed by prime.
pub fn p_primary_decomposition(a: &Fqm) -> BTreeMap<u64, Fqm> {
    let mut out = BTreeMap::new();
    for p in a.primes() {
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for (i, &d) in a.divisors().iter().enumerate() {
            let mut pe = 1u64;
            while d % (pe * p) == 0 {
                pe *= p;
            }
            if pe > 1 {
                gens.push(a.scale((d / pe) as i64, &a.generator(i)));
                orders.push(pe);
            }
        }
        out.insert(p, a.sub_on_generators(&gens, orders));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum JordanKind {
    /// `(Z/p^k, t x^2 / p^k)`, `p` odd.
    #[serde(rename = "A")]
    OddCyclic { t: u64 },
    /// `(Z/2^k, t x^2 / 2^(k+1))`.
    #[serde(rename = "A2")]
    TwoAdicCyclic { t: u64 },
    #[serde(rename = "B")]
    B,
    #[serde(rename = "C")]
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanComponent {
    pub prime: u64,
    pub exponent: u32,
    #[serde(flatten)]
    pub kind: JordanKind,
}

impl JordanComponent {
    pub fn to_fqm(&self) -> Result<Fqm> {
        let pk = self.prime.pow(self.exponent);
        match self.kind {
            JordanKind::OddCyclic { t } | JordanKind::TwoAdicCyclic { t } => Fqm::cyclic(pk, t as i64),
            JordanKind::B => Fqm::b_form(self.exponent),
            JordanKind::C => Fqm::c_form(self.exponent),
        }
    }

    pub fn label(&self) -> String {
        let pk = self.prime.pow(self.exponent);
        match self.kind {
            JordanKind::OddCyclic { t } | JordanKind::TwoAdicCyclic { t } => format!("A_{pk}^{t}"),
            JordanKind::B => format!("B_{pk}"),
            JordanKind::C => format!("C_{pk}"),
        }
    }
}

fn square_class_rep(t: u64, p: u64) -> u64 {
    if nt::jacobi(t as i64, p) == 1 {
        1
    } else {
        nt::smallest_nonresidue(p)
    }
}

/// Anisotropy of an odd-order module from its shape alone, as a cross-check
/// on the exhaustive scan: each `A_p` must have exponent `p` and rank at
/// most 2, and a rank 2 part must carry a binary form whose discriminant is
/// a non-square mod `p`.
pub fn anisotropic_by_structure(a: &Fqm) -> Result<bool> {
    for (p, ap) in p_primary_decomposition(a) {
        if p == 2 {
            return Err(Error::UnsupportedClassification);
        }
        let ap = ap.without_trivial_generators();
        if ap.divisors().iter().any(|&d| d != p) || ap.rank() > 2 {
            return Ok(false);
        }
        if ap.rank() == 2 {
            let (g0, g1) = (ap.generator(0), ap.generator(1));
            let pq = Rational::from_integer((p as i64).into());
            let num = |x: Rational| -> i64 { (x * &pq).to_integer().try_into().expect("residue fits i64") };
            let (q0, q1, b) = (num(ap.q_value(&g0)), num(ap.q_value(&g1)), num(ap.b_value(&g0, &g1)));
            let disc = (b * b - 4 * q0 * q1).rem_euclid(p as i64);
            if disc == 0 || nt::jacobi(disc, p) == 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Identifies an anisotropic `p`-group (`p` odd) as `A_p^t` or
/// `A_p^t + A_p^1`, with `t` reported as `1` or the least non-residue.
/// The answer is confirmed by an explicit isomorphism.
pub fn classify_anisotropic(a_p: &Fqm) -> Result<Vec<JordanComponent>> {
    let a_p = a_p.without_trivial_generators();
    if a_p.is_trivial() {
        return Ok(Vec::new());
    }
    let primes = a_p.primes();
    let [p] = primes[..] else {
        return Err(Error::InvalidArgument("module is not a p-group".into()));
    };
    if p == 2 {
        return Err(Error::UnsupportedClassification);
    }
    if !is_anisotropic(&a_p)? {
        return Err(Error::NotAnisotropic);
    }
    // anisotropic odd p-groups have exponent p and rank at most 2
    if a_p.divisors().iter().any(|&d| d != p) || a_p.rank() > 2 {
        return Err(Error::InvalidModule("anisotropic module with unexpected shape".into()));
    }
    let (level, q, b) = (a_p.level(), &a_p.q, &a_p.b);
    debug_assert_eq!(level, p);
    let comps = if a_p.rank() == 1 {
        vec![JordanComponent { prime: p, exponent: 1, kind: JordanKind::OddCyclic { t: square_class_rep(q[0], p) } }]
    } else {
        // Q = (q1 x^2 + b xy + q2 y^2)/p; the isometry class of the binary
        // form is fixed by the square class of its discriminant 4 q1 q2 - b^2.
        let pi = p as i128;
        let det = (4 * q[0] as i128 * q[1] as i128 - (b[0][1] as i128).pow(2)).rem_euclid(pi) as u64;
        vec![
            JordanComponent { prime: p, exponent: 1, kind: JordanKind::OddCyclic { t: square_class_rep(det, p) } },
            JordanComponent { prime: p, exponent: 1, kind: JordanKind::OddCyclic { t: 1 } },
        ]
    };
    let mut model = Fqm::trivial();
    for c in &comps {
        model = model.direct_sum(&c.to_fqm()?);
    }
    if a_p.order() <= AUT_SEARCH_BOUND && find_isomorphism(&model, &a_p)?.is_none() {
        return Err(Error::InvalidModule("classification could not be confirmed by an isomorphism".into()));
    }
    Ok(comps)
}

/// A `Q`-preserving automorphism, given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Automorphism {
    pub images: Vec<FqmElement>,
}

impl Automorphism {
    pub fn identity(a: &Fqm) -> Self {
        Self { images: (0..a.rank()).map(|i| a.generator(i)).collect() }
    }

    pub fn apply(&self, a: &Fqm, x: &FqmElement) -> FqmElement {
        let mut acc = a.zero();
        for (c, img) in x.0.iter().zip(&self.images) {
            if *c != 0 {
                acc = a.add(&acc, &a.scale(*c as i64, img));
            }
        }
        acc
    }

    /// `self after other`.
    pub fn compose(&self, a: &Fqm, other: &Self) -> Self {
        Self { images: other.images.iter().map(|x| self.apply(a, x)).collect() }
    }

    pub fn inverse(&self, a: &Fqm) -> Self {
        let mut table = vec![a.zero(); a.order() as usize];
        for x in a.elements() {
            let idx = a.index_of(&self.apply(a, &x));
            table[idx] = x;
        }
        Self { images: (0..a.rank()).map(|i| table[a.index_of(&a.generator(i))].clone()).collect() }
    }
}

fn common_residues(a: &Fqm, b: &Fqm) -> (u64, u64, u64) {
    let n = num_integer::lcm(a.level(), b.level());
    (n, n / a.level(), n / b.level())
}

/// Backtracking search over generator images preserving orders, `Q` and
/// the bilinear form. Calls `found` for every bijective map; stops early
/// when it returns `false`.
fn search_isometries(a: &Fqm, b: &Fqm, found: &mut dyn FnMut(Vec<FqmElement>) -> bool) {
    let (_, sa, sb) = common_residues(a, b);
    let b_elems: Vec<FqmElement> = b.elements().collect();
    let b_q: Vec<u64> = b_elems.iter().map(|y| b.q_residue(y) * sb).collect();
    let b_ord: Vec<u64> = b_elems.iter().map(|y| b.order_of(y)).collect();
    let candidates: Vec<Vec<usize>> = (0..a.rank())
        .map(|i| {
            let target_q = a.q[i] * sa;
            (0..b_elems.len())
                .filter(|&j| b_ord[j] == a.divisors[i] && b_q[j] == target_q)
                .collect()
        })
        .collect();

    fn recurse(
        a: &Fqm,
        b: &Fqm,
        sa: u64,
        sb: u64,
        b_elems: &[FqmElement],
        candidates: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        found: &mut dyn FnMut(Vec<FqmElement>) -> bool,
    ) -> bool {
        let i = chosen.len();
        if i == a.rank() {
            let images: Vec<FqmElement> = chosen.iter().map(|&j| b_elems[j].clone()).collect();
            let map = Automorphism { images };
            let mut seen = vec![false; b.order() as usize];
            for x in a.elements() {
                let idx = b.index_of(&map.apply(b, &x));
                if seen[idx] {
                    return true;
                }
                seen[idx] = true;
            }
            return found(map.images);
        }
        for &j in &candidates[i] {
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(k, &jk)| b.b_residue(&b_elems[j], &b_elems[jk]) * sb == a.b[i][k] * sa);
            if ok {
                chosen.push(j);
                let go_on = recurse(a, b, sa, sb, b_elems, candidates, chosen, found);
                chosen.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    let mut chosen = Vec::new();
    recurse(a, b, sa, sb, &b_elems, &candidates, &mut chosen, found);
}

/// An isometry `a -> b`, as images of the generators of `a`, if one exists.
pub fn find_isomorphism(a: &Fqm, b: &Fqm) -> Result<Option<Vec<FqmElement>>> {
    if a.order() != b.order() {
        return Ok(None);
    }
    if a.order() > AUT_SEARCH_BOUND {
        return Err(Error::SizeLimit { order: a.order(), bound: AUT_SEARCH_BOUND });
    }
    let mut result = None;
    search_isometries(a, b, &mut |images| {
        result = Some(images);
        false
    });
    Ok(result)
}

pub fn orthogonal_group(a: &Fqm) -> Result<Vec<Automorphism>> {
    orthogonal_group_with_bound(a, AUT_SEARCH_BOUND)
}

/// All automorphisms of `A` preserving `Q`, in canonical order.
pub fn orthogonal_group_with_bound(a: &Fqm, bound: u64) -> Result<Vec<Automorphism>> {
    if a.order() > bound {
        return Err(Error::SizeLimit { order: a.order(), bound });
    }
    let mut out = BTreeSet::new();
    search_isometries(a, a, &mut |images| {
        out.insert(Automorphism { images });
        true
    });
    Ok(out.into_iter().collect())
}

/// `A_{c,x} = { mu : ord(mu) = c, Q(mu) = x mod 1 }`.
pub fn index_set(a: &Fqm, c: u64, x: &Rational) -> Result<BTreeSet<FqmElement>> {
    if c == 0 {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    let x = frac(x);
    Ok(a.elements().filter(|mu| a.order_of(mu) == c && a.q_value(mu) == x).collect())
}

/// Jacobi symbol `(n / modulus)` for an odd positive modulus.
pub fn jacobi_character(modulus: i64, n: i64) -> Result<i8> {
    if modulus <= 0 || modulus % 2 == 0 {
        return Err(Error::InvalidModulus(modulus));
    }
    Ok(nt::jacobi(n, modulus as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn z3() -> Fqm {
        Fqm::cyclic(3, 1).unwrap()
    }

    fn z3_squared() -> Fqm {
        z3().direct_sum(&z3())
    }

    #[test]
    fn anisotropy_examples() {
        assert!(is_anisotropic(&Fqm::trivial()).unwrap());
        assert!(!is_anisotropic(&Fqm::c_form(1).unwrap()).unwrap());
        assert!(is_anisotropic(&z3()).unwrap());
        assert!(is_anisotropic(&z3_squared()).unwrap());
        // x^2 + 2 y^2 over F_3 represents zero: (1,1)
        assert!(!is_anisotropic(&z3().direct_sum(&Fqm::cyclic(3, 2).unwrap())).unwrap());
        assert!(!is_anisotropic(&Fqm::cyclic(9, 1).unwrap()).unwrap());
    }

    #[test]
    fn structural_anisotropy_examples() {
        let z3_2 = Fqm::cyclic(3, 2).unwrap();
        assert!(anisotropic_by_structure(&Fqm::trivial()).unwrap());
        assert!(anisotropic_by_structure(&z3()).unwrap());
        assert!(anisotropic_by_structure(&z3_squared()).unwrap());
        assert!(!anisotropic_by_structure(&z3().direct_sum(&z3_2)).unwrap());
        assert!(!anisotropic_by_structure(&Fqm::cyclic(9, 1).unwrap()).unwrap());
        assert!(!anisotropic_by_structure(&z3_squared().direct_sum(&z3())).unwrap());
        assert!(anisotropic_by_structure(&Fqm::cyclic(15, 1).unwrap()).unwrap());
        assert!(anisotropic_by_structure(&Fqm::c_form(1).unwrap()).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let d = p_primary_decomposition(&z3_squared());
        assert_eq!(d.keys().copied().collect::<Vec<_>>(), vec![3]);
        let a = Fqm::cyclic(15, 1).unwrap();
        let d = p_primary_decomposition(&a);
        assert_eq!(d.keys().copied().collect::<Vec<_>>(), vec![3, 5]);
        assert_eq!(d[&3].order(), 3);
        assert_eq!(d[&5].order(), 5);
        // 1/15 = 2/3 - 3/5: the 3-part is (Z/3, 5^2/15 x^2) = (Z/3, 2x^2/3)
        assert_eq!(d[&3].q_generators(), vec![rat(2, 3)]);
        assert_eq!(d[&5].q_generators(), vec![rat(3, 5)]);
        assert!(p_primary_decomposition(&Fqm::trivial()).is_empty());
        let sum = d[&3].direct_sum(&d[&5]);
        assert!(find_isomorphism(&sum, &a).unwrap().is_some());
    }

    #[test]
    fn classification_examples() {
        let c = classify_anisotropic(&z3()).unwrap();
        assert_eq!(c, vec![JordanComponent { prime: 3, exponent: 1, kind: JordanKind::OddCyclic { t: 1 } }]);
        let c = classify_anisotropic(&Fqm::cyclic(3, 2).unwrap()).unwrap();
        assert_eq!(c[0].kind, JordanKind::OddCyclic { t: 2 });
        let c = classify_anisotropic(&z3_squared()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].kind, JordanKind::OddCyclic { t: 1 });
        assert!(matches!(classify_anisotropic(&Fqm::c_form(1).unwrap()), Err(Error::UnsupportedClassification)));
        assert!(matches!(classify_anisotropic(&Fqm::cyclic(9, 1).unwrap()), Err(Error::NotAnisotropic)));
        // no isometry between A_3^1 and A_3^2
        assert!(find_isomorphism(&z3(), &Fqm::cyclic(3, 2).unwrap()).unwrap().is_none());
    }

    #[test]
    fn orthogonal_group_examples() {
        assert_eq!(orthogonal_group(&Fqm::trivial()).unwrap().len(), 1);
        let g = orthogonal_group(&z3()).unwrap();
        assert_eq!(g.len(), 2);
        let g = orthogonal_group(&z3_squared()).unwrap();
        assert_eq!(g.len(), 8);
        let a = z3_squared();
        let set: BTreeSet<_> = g.iter().cloned().collect();
        for s in &g {
            assert!(set.contains(&s.inverse(&a)));
            for t in &g {
                assert!(set.contains(&s.compose(&a, t)));
            }
        }
    }

    #[test]
    fn index_set_examples() {
        assert!(index_set(&Fqm::trivial(), 2, &rat(1, 2)).unwrap().is_empty());
        let s = index_set(&z3(), 3, &rat(1, 3)).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![FqmElement(vec![1]), FqmElement(vec![2])]);
        assert!(index_set(&z3(), 3, &rat(2, 3)).unwrap().is_empty());
        assert_eq!(index_set(&z3(), 1, &rat(0, 1)).unwrap().len(), 1);
    }

    #[test]
    fn jacobi_character_examples() {
        assert_eq!(jacobi_character(3, 5).unwrap(), -1);
        assert_eq!(jacobi_character(15, 1).unwrap(), 1);
        assert_eq!(jacobi_character(3, 3).unwrap(), 0);
        assert!(jacobi_character(4, 1).is_err());
        assert!(jacobi_character(-3, 1).is_err());
    }
}
