use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::Fqm;
use crate::error::{Error, Result};
use crate::exact::interval::{exp_2pi_i, Interval};
use crate::exact::{CycloNum, Rational};

const MILGRAM_PRECISION_BITS: u32 = 128;

/// `g_d(A) = sum over mu of e(d Q(mu))`, exactly.
pub fn gauss_sum(a: &Fqm, d: i64) -> CycloNum {
    let n = a.level();
    let mut counts = vec![0u64; n as usize];
    for r in a.q_table() {
        let k = ((r as i128 * d as i128).rem_euclid(n as i128)) as usize;
        counts[k] += 1;
    }
    let coeffs: BTreeMap<u64, Rational> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (k as u64, Rational::from_integer(BigInt::from(c))))
        .collect();
    CycloNum::from_exponent_map(n, &coeffs)
}

/// The signature `s mod 8` with `g(A) = sqrt|A| e(s/8)`.
///
/// The phase is located by comparing a 128-bit enclosure of
/// `g(A)/sqrt|A|` against the eight candidates (they are pairwise at
/// distance at least `2 sin(pi/8)`), then confirmed exactly through
/// `g(A)^2 = |A| e(s/4)`.
pub fn milgram_signature(a: &Fqm) -> Result<u8> {
    let g = gauss_sum(a, 1);
    let order = CycloNum::from_integer(a.order() as i64);
    if &g * &g.conj() != order {
        return Err(Error::GaussSumModulus);
    }
    let z = g.embed_complex(MILGRAM_PRECISION_BITS);
    let prec = z.precision();
    let inv_root = Interval::sqrt_rational(&Rational::from_integer(BigInt::from(a.order())), prec)
        .recip()
        .expect("order is positive");
    let phase = z.scale(&inv_root);
    let hits: Vec<u8> = (0..8u8)
        .filter(|&s| {
            let c = exp_2pi_i(&Rational::new(BigInt::from(s), BigInt::from(8)), prec);
            phase.overlaps(&c)
        })
        .collect();
    let [s] = hits[..] else {
        return Err(Error::GaussSumModulus);
    };
    let check = CycloNum::root_of_unity(&Rational::new(BigInt::from(s), BigInt::from(4)))
        .scale_int(a.order() as i64);
    if &g * &g != check {
        return Err(Error::GaussSumModulus);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    #[test]
    fn gauss_sum_examples() {
        assert_eq!(gauss_sum(&Fqm::trivial(), 7), CycloNum::one());
        let a = Fqm::cyclic(3, 1).unwrap();
        let expected = &CycloNum::one() + &CycloNum::root_of_unity(&rat(1, 3)).scale_int(2);
        assert_eq!(gauss_sum(&a, 1), expected);
        assert_eq!(gauss_sum(&a, 3), CycloNum::from_integer(3));
        assert_eq!(gauss_sum(&a, -3), CycloNum::from_integer(3));
    }

    #[test]
    fn milgram_examples() {
        assert_eq!(milgram_signature(&Fqm::trivial()).unwrap(), 0);
        assert_eq!(milgram_signature(&Fqm::cyclic(3, 1).unwrap()).unwrap(), 2);
        assert_eq!(milgram_signature(&Fqm::cyclic(3, 2).unwrap()).unwrap(), 6);
        // A_1 = (Z/2, x^2/4) has signature 1
        assert_eq!(milgram_signature(&Fqm::cyclic(2, 1).unwrap()).unwrap(), 1);
        assert_eq!(milgram_signature(&Fqm::c_form(1).unwrap()).unwrap(), 0);
        assert_eq!(milgram_signature(&Fqm::b_form(1).unwrap()).unwrap(), 4);
    }

    #[test]
    fn milgram_is_additive() {
        let a = Fqm::cyclic(5, 2).unwrap();
        let b = Fqm::cyclic(7, 1).unwrap();
        let sa = milgram_signature(&a).unwrap();
        let sb = milgram_signature(&b).unwrap();
        assert_eq!(milgram_signature(&a.direct_sum(&b)).unwrap(), (sa + sb) % 8);
        assert_eq!(milgram_signature(&a.negated()).unwrap(), (8 - sa) % 8);
    }
}
