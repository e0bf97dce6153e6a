//! Smith and column-Hermite reductions over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, k) = (a.len(), b.len());
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][t] * &b[t][j];
            }
        }
    }
    out
}

fn swap_rows(m: &mut IntMatrix, i: usize, j: usize) {
    m.swap(i, j);
}

fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// row_i += f * row_j
fn add_row(m: &mut IntMatrix, i: usize, j: usize, f: &BigInt) {
    let src = m[j].clone();
    for (x, y) in m[i].iter_mut().zip(&src) {
        *x += f * y;
    }
}

/// col_i += f * col_j
fn add_col(m: &mut IntMatrix, i: usize, j: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let y = row[j].clone();
        row[i] += f * y;
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for x in m[i].iter_mut() {
        *x = -&*x;
    }
}

/// Smith normal form of a square matrix: returns `(u, d, v)` with `u a v`
/// diagonal, `u`, `v` unimodular and `d_1 | d_2 | ...`, `d_i >= 0`.
pub fn smith_normal_form(a: &IntMatrix) -> (IntMatrix, Vec<BigInt>, IntMatrix) {
    let n = a.len();
    let mut m = a.clone();
    let mut u = identity(n);
    let mut v = identity(n);
    for k in 0..n {
        loop {
            // bring the smallest nonzero entry of the trailing block to (k, k)
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if !m[i][j].is_zero() && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(u, m, v);
            };
            swap_rows(&mut m, k, bi);
            swap_rows(&mut u, k, bi);
            swap_cols(&mut m, k, bj);
            swap_cols(&mut v, k, bj);

            let mut dirty = false;
            for i in (k + 1)..n {
                let q = m[i][k].div_floor(&m[k][k]);
                if !q.is_zero() {
                    let f = -q;
                    add_row(&mut m, i, k, &f);
                    add_row(&mut u, i, k, &f);
                }
                dirty |= !m[i][k].is_zero();
            }
            for j in (k + 1)..n {
                let q = m[k][j].div_floor(&m[k][k]);
                if !q.is_zero() {
                    let f = -q;
                    add_col(&mut m, j, k, &f);
                    add_col(&mut v, j, k, &f);
                }
                dirty |= !m[k][j].is_zero();
            }
            if dirty {
                continue;
            }
            // enforce divisibility into the trailing block
            let pivot = m[k][k].clone();
            let bad = ((k + 1)..n).find(|&i| ((k + 1)..n).any(|j| !(&m[i][j] % &pivot).is_zero()));
            match bad {
                Some(i) => {
                    add_row(&mut m, k, i, &BigInt::one());
                    add_row(&mut u, k, i, &BigInt::one());
                }
                None => break,
            }
        }
        if m[k][k].is_negative() {
            negate_row(&mut m, k);
            negate_row(&mut u, k);
        }
    }
    finish(u, m, v)
}

fn finish(u: IntMatrix, m: IntMatrix, v: IntMatrix) -> (IntMatrix, Vec<BigInt>, IntMatrix) {
    let d = (0..m.len()).map(|i| m[i][i].clone()).collect();
    (u, d, v)
}

/// A `Z`-basis of the integer kernel of `a` (rows x cols), as column
/// vectors, obtained from a unimodular column reduction `a v = [h | 0]`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.clone();
    let mut v = identity(cols);
    let mut pivot_col = 0;
    for r in 0..rows {
        if pivot_col == cols {
            break;
        }
        loop {
            let best = (pivot_col..cols)
                .filter(|&j| !m[r][j].is_zero())
                .min_by(|&x, &y| m[r][x].abs().cmp(&m[r][y].abs()).then(x.cmp(&y)));
            let Some(j) = best else { break };
            if j != pivot_col {
                swap_cols(&mut m, pivot_col, j);
                swap_cols(&mut v, pivot_col, j);
            }
            let mut done = true;
            for j in (pivot_col + 1)..cols {
                if m[r][j].is_zero() {
                    continue;
                }
                let q = m[r][j].div_floor(&m[r][pivot_col]);
                let f = -q;
                add_col(&mut m, j, pivot_col, &f);
                add_col(&mut v, j, pivot_col, &f);
                done &= m[r][j].is_zero();
            }
            if done {
                pivot_col += 1;
                break;
            }
        }
    }
    (pivot_col..cols).map(|j| (0..cols).map(|i| v[i][j].clone()).collect()).collect()
}
