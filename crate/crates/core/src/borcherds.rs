//! Hypothesis checks for the converse theorem, principal parts of
//! reflective input forms and their symmetrization.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, frac, int, rat};
use crate::exact::Rational;
use crate::fqm::{index_set, is_anisotropic, orthogonal_group, Fqm, FqmElement};
use crate::json::rational_str;
use crate::lattice::{coset_vectors, discriminant_group, witt_index, GramMatrix};
use crate::nt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalTerm {
    pub mu: Vec<u64>,
    #[serde(with = "rational_str")]
    pub n: Rational,
    #[serde(with = "rational_str")]
    pub c: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct PrincipalPartJson {
    #[serde(with = "rational_str")]
    c00: Rational,
    terms: Vec<PrincipalTerm>,
}

/// Principal part `sum c(mu, n) q^n e_mu` (`n < 0`) of a weakly holomorphic
/// form for the dual Weil representation of `A`, plus `c(0, 0)`. The
/// exponents satisfy `n = -Q(mu) mod 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PrincipalPartJson", into = "PrincipalPartJson")]
pub struct PrincipalPart {
    pub c00: Rational,
    pub terms: BTreeMap<(FqmElement, Rational), Rational>,
}

impl TryFrom<PrincipalPartJson> for PrincipalPart {
    type Error = Error;

    fn try_from(j: PrincipalPartJson) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for t in j.terms {
            if !t.n.is_negative() {
                return Err(Error::InvalidArgument(format!("exponent {} is not negative", format_rational(&t.n))));
            }
            if terms.insert((FqmElement(t.mu), t.n), t.c).is_some() {
                return Err(Error::InvalidArgument("repeated (mu, n) in principal part".into()));
            }
        }
        Ok(Self { c00: j.c00, terms })
    }
}

impl From<PrincipalPart> for PrincipalPartJson {
    fn from(p: PrincipalPart) -> Self {
        let terms = p.terms.into_iter().map(|((mu, n), c)| PrincipalTerm { mu: mu.0, n, c }).collect();
        Self { c00: p.c00, terms }
    }
}

impl PrincipalPart {
    pub fn empty() -> Self {
        Self { c00: Rational::zero(), terms: BTreeMap::new() }
    }

    /// Adds `c q^n e_mu`; zero coefficients are dropped.
    pub fn insert(&mut self, mu: FqmElement, n: Rational, c: Rational) {
        if c.is_zero() {
            self.terms.remove(&(mu, n));
        } else {
            self.terms.insert((mu, n), c);
        }
    }

    /// Checks membership in `A`, negativity and `n = -Q(mu) mod 1`.
    pub fn validate(&self, a: &Fqm) -> Result<()> {
        for (mu, n) in self.terms.keys() {
            if !a.contains(mu) {
                return Err(Error::InvalidArgument(format!("{mu:?} is not an element of A")));
            }
            if !n.is_negative() {
                return Err(Error::InvalidArgument(format!("exponent {} is not negative", format_rational(n))));
            }
            if frac(&(n + a.q_value(mu))) != Rational::zero() {
                return Err(Error::InvalidArgument(format!(
                    "exponent {} at {mu:?} is not congruent to -Q(mu) = {} mod 1",
                    format_rational(n),
                    format_rational(&-a.q_value(mu))
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub reason: String,
}

fn check(pass: bool, reason: String) -> Check {
    Check { pass, reason }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub r0: usize,
    pub level: u64,
    pub m_even: Check,
    pub m_mod4: Check,
    pub m_bound: Check,
    pub type_p2: Check,
    pub anisotropic: Check,
    pub level_odd: Check,
    pub level_squarefree: Check,
    pub failing: Vec<String>,
    pub pass: bool,
}

/// Evaluates the hypotheses under which every Borcherds product for `L`
/// comes from a lift: `m` even, `m = 0 mod 4`, `m > max(6, 3 + r_0)`,
/// type `(p, 2)`, `A` anisotropic, odd square-free level.
pub fn check_converse(g: &GramMatrix) -> Result<ConverseReport> {
    let m = g.rank();
    let (p, q) = g.signature_pair()?;
    let r0 = witt_index(g)?;
    let level = g.level()?;
    let a = discriminant_group(g)?;
    let aniso = is_anisotropic(&a)?;
    let bound = 6.max(3 + r0);
    let m_even = check(m % 2 == 0, format!("m = {m}"));
    let m_mod4 = check(m % 4 == 0, format!("m = {m}, m mod 4 = {}", m % 4));
    let m_bound = check(m > bound, format!("m = {m}, max(6, 3 + r0) = {bound} with r0 = {r0}"));
    let type_p2 = check(q == 2, format!("signature ({p}, {q})"));
    let anisotropic = check(aniso, format!("|A| = {}", a.order()));
    let level_odd = check(level % 2 == 1, format!("N = {level}"));
    let level_squarefree = check(nt::is_squarefree(level), format!("N = {level}"));
    let named = [
        ("m_even", &m_even),
        ("m_mod4", &m_mod4),
        ("m_bound", &m_bound),
        ("type_p2", &type_p2),
        ("anisotropic", &anisotropic),
        ("level_odd", &level_odd),
        ("level_squarefree", &level_squarefree),
    ];
    let failing: Vec<String> = named.iter().filter(|(_, c)| !c.pass).map(|(n, _)| n.to_string()).collect();
    let pass = failing.is_empty();
    Ok(ConverseReport {
        m,
        p,
        q,
        r0,
        level,
        m_even,
        m_mod4,
        m_bound,
        type_p2,
        anisotropic,
        level_odd,
        level_squarefree,
        failing,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularWeight {
    #[serde(with = "rational_str")]
    pub weight: Rational,
    /// `c(0, 0) = p - 2`.
    pub c00: i64,
    /// `c(0, 0) / 2`, the weight of the product in the other normalization.
    #[serde(with = "rational_str")]
    pub c00_half: Rational,
}

/// A reflective form of singular weight for type `(p, 2)` has weight
/// `p/2 - 1` and `c(0, 0) = p - 2`.
pub fn singular_weight_data(p: i64) -> Result<SingularWeight> {
    if p < 3 {
        return Err(Error::InvalidArgument(format!("p = {p} must be at least 3")));
    }
    Ok(SingularWeight { weight: rat(p, 2) - int(1), c00: p - 2, c00_half: rat(p - 2, 2) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrality {
    /// Coefficients in `Z_{>0}`.
    Strict,
    /// Coefficients in `Q_{>0}`.
    Relaxed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectiveVerdict {
    pub pass: bool,
    pub reasons: Vec<String>,
}

/// A principal part is reflective when each term is `c q^{-1/l} e_mu` with
/// `l = ord(mu)`, `mu in A_{l,1/l}` and `c` positive (integral in strict
/// mode), with at most one term per coset.
pub fn check_reflective_principal_part(a: &Fqm, pp: &PrincipalPart, mode: Integrality) -> Result<ReflectiveVerdict> {
    let mut reasons = Vec::new();
    if let Err(e) = pp.validate(a) {
        return Ok(ReflectiveVerdict { pass: false, reasons: vec![e.to_string()] });
    }
    let mut per_coset: BTreeMap<&FqmElement, usize> = BTreeMap::new();
    for ((mu, n), c) in &pp.terms {
        *per_coset.entry(mu).or_insert(0) += 1;
        let l = a.order_of(mu);
        let label = format!("mu = {:?}, n = {}", mu.0, format_rational(n));
        let inv_l = rat(1, l as i64);
        if l == 1 || !index_set(a, l, &inv_l)?.contains(mu) {
            reasons.push(format!("{label}: mu is not in A_{{{l},1/{l}}}"));
            continue;
        }
        if *n != -&inv_l {
            reasons.push(format!("{label}: pole order is not 1/ord(mu) = 1/{l}"));
        }
        if !c.is_positive() {
            reasons.push(format!("{label}: coefficient {} is not positive", format_rational(c)));
        } else if mode == Integrality::Strict && !c.is_integer() {
            reasons.push(format!("{label}: coefficient {} is not an integer", format_rational(c)));
        }
    }
    for (mu, k) in per_coset {
        if k > 1 {
            reasons.push(format!("mu = {:?}: {k} principal terms, expected one", mu.0));
        }
    }
    Ok(ReflectiveVerdict { pass: reasons.is_empty(), reasons })
}

/// `(1/|O(A)|) sum_sigma sigma(f)` on principal parts.
pub fn symmetrize(a: &Fqm, pp: &PrincipalPart) -> Result<PrincipalPart> {
    let group = orthogonal_group(a)?;
    let size = Rational::from_integer(BigInt::from(group.len()));
    let mut acc: BTreeMap<(FqmElement, Rational), Rational> = BTreeMap::new();
    for sigma in &group {
        for ((mu, n), c) in &pp.terms {
            // sigma(f) has coefficient c(sigma^-1 nu) at nu = sigma(mu)
            let key = (sigma.apply(a, mu), n.clone());
            *acc.entry(key).or_insert_with(Rational::zero) += c;
        }
    }
    let mut out = PrincipalPart { c00: pp.c00.clone(), terms: BTreeMap::new() };
    for ((mu, n), c) in acc {
        out.insert(mu, n, c / &size);
    }
    Ok(out)
}

/// Number of `lambda in mu + L` with `Q(lambda) = n`, complete for definite
/// lattices and within the coefficient box otherwise.
pub fn heegner_multiplicity(g: &GramMatrix, mu: &FqmElement, n: &Rational, bound: u32) -> Result<u64> {
    if !n.is_positive() {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(coset_vectors(g, mu, n, bound)?.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> Fqm {
        Fqm::cyclic(3, 1).unwrap()
    }

    fn pp(terms: &[(u64, Rational, Rational)]) -> PrincipalPart {
        let mut p = PrincipalPart::empty();
        for (mu, n, c) in terms {
            p.insert(FqmElement(vec![*mu]), n.clone(), c.clone());
        }
        p
    }

    fn u() -> GramMatrix {
        GramMatrix::hyperbolic_plane()
    }

    #[test]
    fn converse_examples() {
        let a2 = GramMatrix::a_n(2);
        let g = a2.direct_sum(&a2).direct_sum(&u()).direct_sum(&u());
        let r = check_converse(&g).unwrap();
        assert_eq!((r.m, r.p, r.q, r.r0, r.level), (8, 6, 2, 2, 3));
        assert!(r.pass, "{r:?}");
        let r = check_converse(&a2.direct_sum(&u()).direct_sum(&u())).unwrap();
        assert_eq!(r.failing, vec!["m_mod4", "m_bound"]);
        let r = check_converse(&GramMatrix::e8().direct_sum(&u()).direct_sum(&u())).unwrap();
        assert!(r.pass, "{r:?}");
        let r = check_converse(&GramMatrix::diagonal(&[2, -2]).unwrap().direct_sum(&GramMatrix::e8())).unwrap();
        assert!(!r.anisotropic.pass);
    }

    #[test]
    fn singular_weights() {
        assert_eq!(singular_weight_data(6).unwrap().weight, int(2));
        assert_eq!(singular_weight_data(6).unwrap().c00, 4);
        assert_eq!(singular_weight_data(4).unwrap().c00, 2);
        let s = singular_weight_data(3).unwrap();
        assert_eq!((s.weight, s.c00, s.c00_half), (rat(1, 2), 1, rat(1, 2)));
        assert!(singular_weight_data(2).is_err());
    }

    #[test]
    fn reflective_examples() {
        let a = z3();
        let strict = Integrality::Strict;
        let p = pp(&[(1, rat(-1, 3), int(1)), (2, rat(-1, 3), int(1))]);
        assert!(check_reflective_principal_part(&a, &p, strict).unwrap().pass);
        let p = pp(&[(1, rat(-4, 3), int(1))]);
        let v = check_reflective_principal_part(&a, &p, strict).unwrap();
        assert!(!v.pass && v.reasons[0].contains("pole order"));
        assert!(check_reflective_principal_part(&a, &PrincipalPart::empty(), strict).unwrap().pass);
        // exponent in the wrong class
        let p = pp(&[(1, rat(-2, 3), int(1))]);
        assert!(!check_reflective_principal_part(&a, &p, strict).unwrap().pass);
        // two terms on one coset
        let p = pp(&[(1, rat(-1, 3), int(1)), (1, rat(-4, 3), int(1))]);
        let v = check_reflective_principal_part(&a, &p, Integrality::Relaxed).unwrap();
        assert!(v.reasons.iter().any(|r| r.contains("2 principal terms")));
    }

    #[test]
    fn symmetrization() {
        let a = z3();
        let p = pp(&[(1, rat(-1, 3), int(1))]);
        let s = symmetrize(&a, &p).unwrap();
        assert_eq!(s, pp(&[(1, rat(-1, 3), rat(1, 2)), (2, rat(-1, 3), rat(1, 2))]));
        assert_eq!(symmetrize(&a, &s).unwrap(), s);
        // averaging breaks integrality
        assert!(!check_reflective_principal_part(&a, &s, Integrality::Strict).unwrap().pass);
        assert!(check_reflective_principal_part(&a, &s, Integrality::Relaxed).unwrap().pass);
        let inv = pp(&[(1, rat(-1, 3), int(1)), (2, rat(-1, 3), int(1))]);
        assert_eq!(symmetrize(&a, &inv).unwrap(), inv);
        let mut t = PrincipalPart::empty();
        t.c00 = int(4);
        assert_eq!(symmetrize(&Fqm::trivial(), &t).unwrap(), t);
    }

    #[test]
    fn heegner_examples() {
        let g = GramMatrix::a_n(2);
        assert_eq!(heegner_multiplicity(&g, &FqmElement(vec![1]), &rat(1, 3), 0).unwrap(), 3);
        assert_eq!(heegner_multiplicity(&g, &FqmElement(vec![2]), &rat(1, 3), 0).unwrap(), 3);
        assert_eq!(heegner_multiplicity(&g, &FqmElement(vec![1]), &rat(2, 3), 0).unwrap(), 0);
        assert_eq!(heegner_multiplicity(&g, &FqmElement(vec![0]), &int(1), 0).unwrap(), 6);
    }

    #[test]
    fn json_shape() {
        let p = pp(&[(1, rat(-1, 3), int(1))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"c00":"0","terms":[{"mu":[1],"n":"-1/3","c":"1"}]}"#);
        assert_eq!(serde_json::from_str::<PrincipalPart>(&s).unwrap(), p);
        assert!(serde_json::from_str::<PrincipalPart>(r#"{"c00":"0","terms":[{"mu":[1],"n":"1/3","c":"1"}]}"#).is_err());
    }
}
