//! Bounded search for a hyperbolic plane splitting off over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::snf::{integer_kernel, IntMatrix};
use super::GramMatrix;
use crate::error::{Error, Result};

/// `L = K + U` with `U` spanned by the isotropic pair `z`, `z_prime`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicSplit {
    pub z: Vec<i64>,
    pub z_prime: Vec<i64>,
    /// Basis of `K` as columns in lattice coordinates.
    pub k_basis: Vec<Vec<i64>>,
    pub k: GramMatrix,
}

fn gcd_vec(v: &[i128]) -> i128 {
    v.iter().fold(0i128, |g, &x| g.gcd(&x))
}

/// Solves `a . w = 1` for a vector `a` with `gcd(a) = 1`.
fn unit_combination(a: &[i128]) -> Vec<i128> {
    let mut w = vec![0i128; a.len()];
    let mut g = 0i128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let e = g.extended_gcd(&x);
        // e.gcd = e.x * g + e.y * x
        for wi in w.iter_mut() {
            *wi *= e.x;
        }
        w[i] = e.y;
        g = e.gcd;
    }
    if g < 0 {
        for wi in w.iter_mut() {
            *wi = -*wi;
        }
    }
    w
}

/// Candidate vectors with max-norm exactly `r`, ordered by support size,
/// then support in lexicographic order, then values in descending order;
/// the first nonzero coordinate is positive.
fn shell(m: usize, r: i64, mut visit: impl FnMut(&[i64]) -> bool) -> bool {
    let values: Vec<i64> = (-r..=r).rev().filter(|&v| v != 0).collect();
    for size in 1..=m {
        let mut support: Vec<usize> = (0..size).collect();
        loop {
            let total = (values.len() as u128).pow(size as u32);
            for n in 0..total {
                // digits of n in base |values|, first coordinate most significant
                let mut rest = n;
                let mut vals = vec![0i64; size];
                for k in (0..size).rev() {
                    vals[k] = values[(rest % values.len() as u128) as usize];
                    rest /= values.len() as u128;
                }
                if vals[0] > 0 && vals.iter().any(|v| v.abs() == r) {
                    let mut z = vec![0i64; m];
                    for (&s, &v) in support.iter().zip(&vals) {
                        z[s] = v;
                    }
                    if !visit(&z) {
                        return false;
                    }
                }
            }
            // next combination
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if support[i] < m - size + i {
                    support[i] += 1;
                    for j in (i + 1)..size {
                        support[j] = support[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    true
}

fn to_i64(v: &[i128]) -> Result<Vec<i64>> {
    v.iter()
        .map(|&x| i64::try_from(x).map_err(|_| Error::InvalidArgument("split witness overflows i64".into())))
        .collect()
}

/// Tries candidates `z` with coefficients up to `search_bound`. `Ok(None)`
/// means the search was exhausted without a witness, which does not rule
/// out a splitting.
pub fn find_hyperbolic_split(g: &GramMatrix, search_bound: u32) -> Result<Option<HyperbolicSplit>> {
    if search_bound == 0 {
        return Err(Error::InvalidArgument("search bound must be at least 1".into()));
    }
    if g.det().is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let m = g.rank();
    if m < 2 {
        return Ok(None);
    }
    let mut found: Option<Result<HyperbolicSplit>> = None;
    for r in 1..=search_bound as i64 {
        let exhausted = shell(m, r, |z| {
            if g.q(z) != 0 || gcd_vec(&z.iter().map(|&x| x as i128).collect::<Vec<_>>()) != 1 {
                return true;
            }
            let gz = g.apply(z);
            if gcd_vec(&gz) != 1 {
                return true;
            }
            found = Some(complete_split(g, z, &gz));
            false
        });
        if !exhausted {
            break;
        }
    }
    found.transpose()
}

fn complete_split(g: &GramMatrix, z: &[i64], gz: &[i128]) -> Result<HyperbolicSplit> {
    let m = g.rank();
    let w = unit_combination(gz);
    let w64 = to_i64(&w)?;
    let qw = g.q(&w64);
    let zp: Vec<i128> = w.iter().zip(z).map(|(&a, &b)| a - qw * b as i128).collect();
    let z_prime = to_i64(&zp)?;
    debug_assert_eq!(g.q(&z_prime), 0);
    debug_assert_eq!(g.bilinear(z, &z_prime), 1);

    let gzp = g.apply(&z_prime);
    let rows: IntMatrix = vec![
        gz.iter().map(|&x| BigInt::from(x)).collect(),
        gzp.iter().map(|&x| BigInt::from(x)).collect(),
    ];
    let kernel = integer_kernel(&rows);
    let k_basis: Vec<Vec<i64>> = kernel
        .iter()
        .map(|v| v.iter().map(|x| x.to_i64().ok_or_else(|| Error::InvalidArgument("kernel basis overflows i64".into()))).collect())
        .collect::<Result<_>>()?;
    let k_rows: Vec<Vec<i64>> = k_basis
        .iter()
        .map(|x| {
            k_basis
                .iter()
                .map(|y| i64::try_from(g.bilinear(x, y)).map_err(|_| Error::InvalidArgument("K Gram overflows i64".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let k = GramMatrix::new(k_rows)?;

    // L = K + U needs [K basis | z | z'] unimodular; then det K = -det L
    let mut cols = k_basis.clone();
    cols.push(z.to_vec());
    cols.push(z_prime.clone());
    let basis = GramMatrix { rows: (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect() };
    let change_det = basis.det();
    if change_det.abs() != BigInt::one() || k.det() != -g.det() {
        return Err(Error::InvalidArgument("split witness failed verification".into()));
    }
    Ok(HyperbolicSplit { z: z.to_vec(), z_prime, k_basis, k })
}
