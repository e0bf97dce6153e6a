//! Rational quadratic forms through their complete invariants: rank,
//! signature, discriminant square class and Hasse invariants.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, ToPrimitive};

use super::GramMatrix;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::nt;

/// Squarefree representative of the square class of a nonzero rational.
fn square_class(x: &Rational) -> Result<i64> {
    let n = x.numer() * x.denom();
    let sign = if n.is_negative() { -1 } else { 1 };
    let a = n.abs().to_u64().ok_or_else(|| Error::InvalidArgument("diagonal entry exceeds u64".into()))?;
    let mut out: i64 = 1;
    for (p, e) in nt::factorize(a) {
        if e % 2 == 1 {
            out = out.checked_mul(p as i64).ok_or_else(|| Error::InvalidArgument("square class exceeds i64".into()))?;
        }
    }
    Ok(sign * out)
}

fn legendre(u: i64, p: u64) -> i32 {
    nt::jacobi(u, p) as i32
}

fn split_p(a: i64, p: i64) -> (u32, i64) {
    let mut a = a;
    let mut k = 0;
    while a % p == 0 {
        a /= p;
        k += 1;
    }
    (k, a)
}

/// Hilbert symbol `(a, b)_p` for nonzero integers; `p = 0` is the real place.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> i32 {
    assert!(a != 0 && b != 0, "Hilbert symbol of zero");
    if p == 0 {
        return if a < 0 && b < 0 { -1 } else { 1 };
    }
    let (alpha, u) = split_p(a, p as i64);
    let (beta, v) = split_p(b, p as i64);
    if p == 2 {
        let eps = |x: i64| (x.rem_euclid(4) == 3) as u32;
        let omega = |x: i64| matches!(x.rem_euclid(8), 3 | 5) as u32;
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let mut s = if (alpha * beta) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
    if beta % 2 == 1 {
        s *= legendre(u, p);
    }
    if alpha % 2 == 1 {
        s *= legendre(v, p);
    }
    s
}

/// Invariants of a non-degenerate rational quadratic form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalForm {
    pub rank: usize,
    pub pos: usize,
    pub neg: usize,
    /// Squarefree discriminant class.
    pub disc: i64,
    /// Hasse invariants at the finite primes that can be nontrivial.
    pub hasse: BTreeMap<u64, i32>,
}

impl RationalForm {
    pub fn from_diagonal(diag: &[Rational]) -> Result<Self> {
        let entries: Vec<i64> = diag.iter().map(square_class).collect::<Result<_>>()?;
        let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
        for &a in &entries {
            primes.extend(nt::prime_divisors(a.unsigned_abs()));
        }
        let mut hasse = BTreeMap::new();
        for &p in &primes {
            let mut e = 1;
            for i in 0..entries.len() {
                for j in (i + 1)..entries.len() {
                    e *= hilbert_symbol(entries[i], entries[j], p);
                }
            }
            hasse.insert(p, e);
        }
        let mut disc: i64 = entries.iter().fold(1i64, |acc, &a| mul_class(acc, a));
        if entries.is_empty() {
            disc = 1;
        }
        let pos = entries.iter().filter(|&&a| a > 0).count();
        Ok(Self { rank: entries.len(), pos, neg: entries.len() - pos, disc, hasse })
    }

    pub fn from_gram(g: &GramMatrix) -> Result<Self> {
        Self::from_diagonal(&g.rational_diagonal()?)
    }

    fn is_local_square(d: i64, p: u64) -> bool {
        if d % p as i64 == 0 {
            return false;
        }
        if p == 2 {
            d.rem_euclid(8) == 1
        } else {
            legendre(d, p) == 1
        }
    }

    pub fn is_isotropic(&self) -> bool {
        let indefinite = self.pos > 0 && self.neg > 0;
        match self.rank {
            0 | 1 => false,
            2 => self.disc == -1,
            3 => {
                indefinite
                    && self.hasse.iter().all(|(&p, &e)| hilbert_symbol(-1, -self.disc, p) == e)
            }
            4 => {
                indefinite
                    && self.hasse.iter().all(|(&p, &e)| {
                        !Self::is_local_square(self.disc, p) || e == hilbert_symbol(-1, -1, p)
                    })
            }
            _ => indefinite,
        }
    }

    /// Invariants of the complement of a hyperbolic plane.
    pub fn split_hyperbolic(&self) -> Self {
        let disc = -self.disc;
        let hasse = self.hasse.iter().map(|(&p, &e)| (p, e * hilbert_symbol(-self.disc, -1, p))).collect();
        Self { rank: self.rank - 2, pos: self.pos - 1, neg: self.neg - 1, disc, hasse }
    }

    pub fn witt_index(&self) -> usize {
        let mut f = self.clone();
        let mut r = 0;
        while f.is_isotropic() {
            f = f.split_hyperbolic();
            r += 1;
        }
        r
    }
}

/// Product of two squarefree classes, reduced again to a squarefree class.
fn mul_class(a: i64, b: i64) -> i64 {
    let g = num_integer::gcd(a, b);
    (a / g) * (b / g)
}

/// Witt index of `L tensor Q`.
pub fn witt_index(g: &GramMatrix) -> Result<usize> {
    Ok(RationalForm::from_gram(g)?.witt_index())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> GramMatrix {
        GramMatrix::hyperbolic_plane()
    }

    #[test]
    fn hilbert_symbol_examples() {
        // (a, b)_p via the norm-form criterion on small cases
        assert_eq!(hilbert_symbol(-1, -1, 2), -1);
        assert_eq!(hilbert_symbol(-1, -1, 0), -1);
        assert_eq!(hilbert_symbol(-1, -1, 3), 1);
        assert_eq!(hilbert_symbol(2, 3, 3), -1);
        assert_eq!(hilbert_symbol(2, 5, 2), -1);
        assert_eq!(hilbert_symbol(3, 5, 2), 1);
        assert_eq!(hilbert_symbol(-3, 3, 3), 1);
        // product formula
        for a in [-7i64, -3, -2, -1, 2, 3, 5, 6, 10, 15] {
            for b in [-5i64, -2, -1, 3, 7, 11, 14] {
                let mut prod = hilbert_symbol(a, b, 0);
                for p in nt::primes_up_to(20) {
                    prod *= hilbert_symbol(a, b, p);
                }
                assert_eq!(prod, 1, "product formula for ({a},{b})");
            }
        }
    }

    #[test]
    fn witt_examples() {
        assert_eq!(witt_index(&GramMatrix::e8()).unwrap(), 0);
        assert_eq!(witt_index(&u()).unwrap(), 1);
        assert_eq!(witt_index(&u().direct_sum(&u())).unwrap(), 2);
        let a2 = GramMatrix::a_n(2);
        assert_eq!(witt_index(&a2.direct_sum(&a2).direct_sum(&u()).direct_sum(&u())).unwrap(), 2);
        assert_eq!(witt_index(&GramMatrix::diagonal(&[2, -2]).unwrap()).unwrap(), 1);
        // x^2 - 3 y^2 is anisotropic
        assert_eq!(witt_index(&GramMatrix::diagonal(&[2, -6]).unwrap()).unwrap(), 0);
        // A2 + (-A2): the form is a sum of a form and its negative
        assert_eq!(witt_index(&a2.direct_sum(&a2.negated())).unwrap(), 2);
        // x^2 + y^2 - 3 z^2 is anisotropic over Q_3
        assert_eq!(witt_index(&GramMatrix::diagonal(&[2, 2, -6]).unwrap()).unwrap(), 0);
        assert_eq!(witt_index(&GramMatrix::diagonal(&[2, 2, -2]).unwrap()).unwrap(), 1);
    }

    #[test]
    fn witt_index_grows_with_u() {
        let cases = [
            GramMatrix::a_n(2),
            GramMatrix::diagonal(&[2, -6]).unwrap(),
            GramMatrix::diagonal(&[2, 2, -6]).unwrap(),
            GramMatrix::d_n(4).direct_sum(&GramMatrix::diagonal(&[-2]).unwrap()),
        ];
        for g in cases {
            let r = witt_index(&g).unwrap();
            assert_eq!(witt_index(&g.direct_sum(&u())).unwrap(), r + 1, "{g}");
        }
    }
}
