//! Hermite and Smith normal forms over `Z`, lattice kernels and membership.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntegerMatrix;

/// Row-style Hermite normal form `U * B = H` with `U` unimodular.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntegerMatrix,
    pub transform: IntegerMatrix,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

fn row_axpy(m: &mut IntegerMatrix, target: usize, source: usize, factor: &BigInt) {
    if factor.is_zero() {
        return;
    }
    for j in 0..m.cols() {
        let delta = factor * &m[(source, j)];
        m[(target, j)] -= delta;
    }
}

fn col_axpy(m: &mut IntegerMatrix, target: usize, source: usize, factor: &BigInt) {
    if factor.is_zero() {
        return;
    }
    for i in 0..m.rows() {
        let delta = factor * &m[(i, source)];
        m[(i, target)] -= delta;
    }
}

fn negate_row(m: &mut IntegerMatrix, i: usize) {
    for j in 0..m.cols() {
        let v = -m[(i, j)].clone();
        m[(i, j)] = v;
    }
}

/// Row echelon Hermite normal form: positive pivots, entries above each pivot
/// reduced into `[0, pivot)`, zero rows at the bottom.
pub fn hermite_normal_form(b: &IntegerMatrix) -> HermiteForm {
    let rows = b.rows();
    let cols = b.cols();
    let mut a = b.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        while let Some(piv) = (r..rows)
            .filter(|&i| !a[(i, c)].is_zero())
            .min_by(|&i, &k| a[(i, c)].abs().cmp(&a[(k, c)].abs()))
        {
            a.swap_rows(r, piv);
            u.swap_rows(r, piv);
            let mut clean = true;
            for i in r + 1..rows {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let q = a[(i, c)].div_floor(&a[(r, c)]);
                row_axpy(&mut a, i, r, &q);
                row_axpy(&mut u, i, r, &q);
                if !a[(i, c)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[(r, c)].is_zero() {
            continue;
        }
        if a[(r, c)].is_negative() {
            negate_row(&mut a, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let q = a[(i, c)].div_floor(&a[(r, c)]);
            row_axpy(&mut a, i, r, &q);
            row_axpy(&mut u, i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    HermiteForm {
        h: a,
        transform: u,
        rank: r,
        pivots,
    }
}

/// Basis of the lattice `{v in Z^n : B v = 0}`, returned in Hermite normal form.
///
/// The basis is saturated: any integer vector in the rational kernel is an
/// integer combination of it. Empty when the kernel is trivial.
pub fn integer_kernel(b: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let n = b.cols();
    let hf = hermite_normal_form(&b.transpose());
    let rows: Vec<Vec<BigInt>> = (hf.rank..n)
        .map(|i| hf.transform.row(i).to_vec())
        .collect();
    if rows.is_empty() {
        return rows;
    }
    let basis = IntegerMatrix::from_big_rows(rows).expect("rows share width n");
    let canon = hermite_normal_form(&basis);
    (0..canon.rank).map(|i| canon.h.row(i).to_vec()).collect()
}

/// Diagonal of the Smith normal form, of length `min(rows, cols)`.
///
/// Entries are nonnegative and each divides the next; trailing zeros encode
/// rank deficiency.
pub fn invariant_factors(b: &IntegerMatrix) -> Vec<BigInt> {
    let rows = b.rows();
    let cols = b.cols();
    let n = rows.min(cols);
    let mut a = b.clone();
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (0..n).map(|k| a[(k, k)].abs()).collect();
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&a[(t, t)]);
                    row_axpy(&mut a, i, t, &q);
                    clean &= a[(i, t)].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&a[(t, t)]);
                    col_axpy(&mut a, j, t, &q);
                    clean &= a[(t, j)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&a[(t, t)])));
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                }
                None => break,
            }
        }
    }
    (0..n).map(|k| a[(k, k)].abs()).collect()
}

/// Whether `target` lies in the `Z`-span of the rows of `generators`.
pub fn in_lattice(generators: &IntegerMatrix, target: &[BigInt]) -> bool {
    if target.len() != generators.cols() {
        return false;
    }
    let hf = hermite_normal_form(generators);
    let mut t = target.to_vec();
    for (r, &c) in hf.pivots.iter().enumerate() {
        let pivot = &hf.h[(r, c)];
        if !t[c].is_multiple_of(pivot) {
            return false;
        }
        let q = &t[c] / pivot;
        for (j, tj) in t.iter_mut().enumerate() {
            *tj -= &q * &hf.h[(r, j)];
        }
    }
    t.iter().all(Zero::is_zero)
}
