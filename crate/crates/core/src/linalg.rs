//! Sparse exact linear algebra over a coefficient field: row echelon
//! bases, kernels, and projections of kernels onto a trailing block of
//! coordinates.

use std::collections::HashMap;

use crate::ring::Field;

/// A sparse vector: strictly increasing column indices, no zero entries.
pub type SparseVec<E> = Vec<(usize, E)>;

/// `a + c * b` for sparse vectors.
pub fn axpy<F: Field>(
    a: &SparseVec<F::Elem>,
    c: &F::Elem,
    b: &SparseVec<F::Elem>,
    field: &F,
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = field.mul(c, &b[j].1);
            if !field.is_zero(&v) {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            field.add_mul_assign(&mut v, c, &b[j].1);
            if !field.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<F: Field>(v: &SparseVec<F::Elem>, c: &F::Elem, field: &F) -> SparseVec<F::Elem> {
    if field.is_zero(c) {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, field.mul(c, x))).collect()
}

/// Builds a sparse vector from unsorted, possibly repeated entries.
pub fn collect_sparse<F: Field>(
    entries: impl IntoIterator<Item = (usize, F::Elem)>,
    field: &F,
) -> SparseVec<F::Elem> {
    let mut acc: Vec<(usize, F::Elem)> = entries.into_iter().collect();
    acc.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec<F::Elem> = Vec::with_capacity(acc.len());
    for (i, v) in acc {
        match out.last_mut() {
            Some((j, w)) if *j == i => *w = field.add(w, &v),
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| !field.is_zero(v));
    out
}

pub fn to_dense<F: Field>(v: &SparseVec<F::Elem>, len: usize, field: &F) -> Vec<F::Elem> {
    let mut out = vec![field.zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn from_dense<F: Field>(v: &[F::Elem], field: &F) -> SparseVec<F::Elem> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !field.is_zero(x))
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// An incrementally built row echelon basis. Each row is normalised so its
/// leading entry is 1, and leading columns are distinct.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    rows: Vec<SparseVec<F::Elem>>,
    pivot_row: HashMap<usize, usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: &F) -> Self {
        Echelon {
            field: field.clone(),
            rows: Vec::new(),
            pivot_row: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec<F::Elem>] {
        &self.rows
    }

    /// Eliminates leading entries until the leading column has no pivot.
    /// The result is empty iff `v` lies in the span.
    pub fn reduce(&self, mut v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        while let Some((c, a)) = v.first() {
            let Some(&r) = self.pivot_row.get(c) else {
                break;
            };
            let neg = self.field.neg(a);
            v = axpy(&v, &neg, &self.rows[r], &self.field);
        }
        v
    }

    pub fn contains(&self, v: &SparseVec<F::Elem>) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Adds `v` to the span. Returns the new pivot column when the rank grew.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> Option<usize> {
        let v = self.reduce(v);
        let (c, a) = v.first()?.clone();
        let inv = self.field.inv(&a).expect("leading entry is nonzero");
        let v = scale(&v, &inv, &self.field);
        self.pivot_row.insert(c, self.rows.len());
        self.rows.push(v);
        Some(c)
    }

    /// Pivot columns paired with row indices, sorted by column.
    fn pivots_sorted(&self) -> Vec<(usize, usize)> {
        let mut p: Vec<(usize, usize)> = self.pivot_row.iter().map(|(&c, &r)| (c, r)).collect();
        p.sort_unstable();
        p
    }

    /// Converts to reduced row echelon form: every pivot column is zero in
    /// all other rows. Rows come back sorted by pivot column.
    pub fn into_reduced(self) -> Vec<SparseVec<F::Elem>> {
        let field = self.field.clone();
        let order = self.pivots_sorted();
        let mut rows = self.rows;
        let pivot_row = self.pivot_row;
        for &(c, r) in order.iter().rev() {
            let mut row = std::mem::take(&mut rows[r]);
            loop {
                let next = row
                    .iter()
                    .skip(1)
                    .find(|(col, _)| pivot_row.contains_key(col))
                    .map(|(col, a)| (*col, field.neg(a)));
                match next {
                    Some((col, neg)) => row = axpy(&row, &neg, &rows[pivot_row[&col]], &field),
                    None => break,
                }
            }
            debug_assert_eq!(row.first().map(|e| e.0), Some(c));
            rows[r] = row;
        }
        order
            .iter()
            .map(|&(_, r)| std::mem::take(&mut rows[r]))
            .collect()
    }
}

/// Basis of `{v : row . v = 0 for all rows}` in `field^ncols`, one vector per
/// free column (in increasing order), each with a 1 in its free column.
pub fn kernel_basis<F: Field>(
    rows: impl IntoIterator<Item = SparseVec<F::Elem>>,
    ncols: usize,
    field: &F,
) -> Vec<SparseVec<F::Elem>> {
    let mut ech = Echelon::new(field);
    for r in rows {
        ech.insert(r);
    }
    kernel_from_echelon(ech, ncols, field)
}

fn kernel_from_echelon<F: Field>(
    ech: Echelon<F>,
    ncols: usize,
    field: &F,
) -> Vec<SparseVec<F::Elem>> {
    let reduced = ech.into_reduced();
    let pivots: Vec<usize> = reduced.iter().map(|r| r[0].0).collect();
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    // column f of the reduced matrix, as (pivot col, entry) pairs
    let mut by_free: HashMap<usize, Vec<(usize, F::Elem)>> = HashMap::new();
    for (row, &p) in reduced.iter().zip(&pivots) {
        for (c, a) in row.iter().skip(1) {
            by_free.entry(*c).or_default().push((p, field.neg(a)));
        }
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = by_free.remove(&f).unwrap_or_default();
            v.push((f, field.one()));
            v.sort_by_key(|(c, _)| *c);
            v
        })
        .collect()
}

/// The image of the kernel of `rows` under projection onto the columns
/// `split..ncols`, as a kernel basis in coordinates reindexed from 0.
pub fn kernel_projection<F: Field>(
    rows: impl IntoIterator<Item = SparseVec<F::Elem>>,
    ncols: usize,
    split: usize,
    field: &F,
) -> Vec<SparseVec<F::Elem>> {
    let mut ech = Echelon::new(field);
    for r in rows {
        ech.insert(r);
    }
    // Rows led by a column >= split vanish on the eliminated block; they cut
    // out the projection exactly.
    let tail_rows: Vec<SparseVec<F::Elem>> = ech
        .rows()
        .iter()
        .filter(|r| r[0].0 >= split)
        .map(|r| r.iter().map(|(c, a)| (c - split, a.clone())).collect())
        .collect();
    kernel_basis(tail_rows, ncols - split, field)
}

/// Rank of a set of vectors.
pub fn rank<F: Field>(vectors: impl IntoIterator<Item = SparseVec<F::Elem>>, field: &F) -> usize {
    let mut ech = Echelon::new(field);
    for v in vectors {
        ech.insert(v);
    }
    ech.rank()
}

/// Whether `v` annihilates every row: `row . v = 0`.
pub fn satisfies<F: Field>(rows: &[SparseVec<F::Elem>], v: &SparseVec<F::Elem>, field: &F) -> bool {
    let lookup: HashMap<usize, &F::Elem> = v.iter().map(|(c, a)| (*c, a)).collect();
    rows.iter().all(|row| {
        let mut acc = field.zero();
        for (c, a) in row {
            if let Some(b) = lookup.get(c) {
                field.add_mul_assign(&mut acc, a, b);
            }
        }
        field.is_zero(&acc)
    })
}
