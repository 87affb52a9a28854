//! Dense Gaussian elimination over a finite field.

use crate::error::{Error, Result};
use crate::finite_field::{Field, FieldElement};

pub type Matrix = Vec<Vec<FieldElement>>;

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inverse().expect("pivot is nonzero");
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &a[r][j] * &f;
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Rank of the submatrix formed by the given columns.
pub fn column_rank(m: &Matrix, columns: &[usize]) -> usize {
    let sub: Matrix = m
        .iter()
        .map(|row| columns.iter().map(|&c| row[c].clone()).collect())
        .collect();
    rank(&sub)
}

/// Basis of { v : M v = 0 }, one vector per free column, in column order.
pub fn null_space(field: &Field, m: &Matrix, cols: usize) -> Matrix {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); cols];
            v[f] = field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&r[row][f];
            }
            v
        })
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|c| m.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// v · M for a row vector v.
pub fn vec_mul(field: &Field, v: &[FieldElement], m: &Matrix) -> Result<Vec<FieldElement>> {
    if v.len() != m.len() {
        return Err(Error::InvalidArgument(format!(
            "vector of length {} against {} rows",
            v.len(),
            m.len()
        )));
    }
    let cols = m.first().map_or(0, Vec::len);
    let mut out = vec![field.zero(); cols];
    for (coef, row) in v.iter().zip(m) {
        if coef.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o = &*o + &(coef * x);
        }
    }
    Ok(out)
}
