//! Dense determinant and inverse for the small `n x n` lattice matrices.

use super::field::Field;

/// Determinant by Gaussian elimination; `None` for a non-square input.
pub fn determinant<F: Field>(m: &[Vec<F::Elem>], field: &F) -> Option<F::Elem> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut a: Vec<Vec<F::Elem>> = m.to_vec();
    let mut det = field.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !field.is_zero(&a[r][col])) else {
            return Some(field.zero());
        };
        if piv != col {
            a.swap(piv, col);
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[col][col]);
        let inv = field.inv(&a[col][col]).expect("nonzero pivot");
        for r in col + 1..n {
            if field.is_zero(&a[r][col]) {
                continue;
            }
            let factor = field.mul(&a[r][col], &inv);
            for c in col..n {
                let t = field.mul(&factor, &a[col][c]);
                a[r][c] = field.sub(&a[r][c], &t);
            }
        }
    }
    Some(det)
}

/// Inverse over the field, `None` when singular.
pub fn inverse<F: Field>(m: &[Vec<F::Elem>], field: &F) -> Option<Vec<Vec<F::Elem>>> {
    let n = m.len();
    let mut a: Vec<Vec<F::Elem>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !field.is_zero(&a[r][col]))?;
        a.swap(piv, col);
        let inv = field.inv(&a[col][col])?;
        for c in 0..2 * n {
            a[col][c] = field.mul(&a[col][c], &inv);
        }
        for r in 0..n {
            if r == col || field.is_zero(&a[r][col]) {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..2 * n {
                let t = field.mul(&factor, &a[col][c]);
                a[r][c] = field.sub(&a[r][c], &t);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn int_to_field<F: Field>(m: &[Vec<i64>], field: &F) -> Vec<Vec<F::Elem>> {
    m.iter()
        .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
        .collect()
}

/// Whether two vectors over `k` are linearly dependent.
pub fn proportional<F: Field>(a: &[F::Elem], b: &[F::Elem], field: &F) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let minor = field.sub(&field.mul(&a[i], &b[j]), &field.mul(&a[j], &b[i]));
            if !field.is_zero(&minor) {
                return false;
            }
        }
    }
    true
}
