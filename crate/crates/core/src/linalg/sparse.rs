use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::field::GaussRat;

pub type SparseRow = BTreeMap<usize, GaussRat>;

/// Incremental Gauss-Jordan elimination on sparse rows.
///
/// Rows are pushed one at a time; the stored pivot rows are kept in reduced
/// row echelon form after every push (pivot = smallest column, normalized
/// to 1, eliminated from every other stored row). The final state depends
/// only on the row space, never on the push order.
#[derive(Debug, Clone, Default)]
pub struct SparseEliminator {
    cols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl SparseEliminator {
    pub fn new(cols: usize) -> Self {
        SparseEliminator {
            cols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots. The result has no entries in
    /// pivot columns.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let hits: Vec<usize> = row
            .keys()
            .copied()
            .filter(|c| self.pivots.contains_key(c))
            .collect();
        for c in hits {
            let Some(f) = row.get(&c).cloned() else { continue };
            let prow = &self.pivots[&c];
            for (&j, x) in prow {
                let d = &f * x;
                let e = row.entry(j).or_insert_with(GaussRat::zero);
                *e -= &d;
                if e.is_zero() {
                    row.remove(&j);
                }
            }
        }
        row
    }

    /// Adds a row; returns `true` when it increased the rank.
    pub fn push(&mut self, row: SparseRow) -> bool {
        debug_assert!(row.keys().all(|&c| c < self.cols));
        let mut row = self.reduce(row);
        row.retain(|_, x| !x.is_zero());
        let Some((&p, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero lead");
        if !inv.is_one() {
            for x in row.values_mut() {
                *x = &*x * &inv;
            }
        }
        for other in self.pivots.values_mut() {
            let Some(f) = other.get(&p).cloned() else { continue };
            for (&j, x) in &row {
                let d = &f * x;
                let e = other.entry(j).or_insert_with(GaussRat::zero);
                *e -= &d;
                if e.is_zero() {
                    other.remove(&j);
                }
            }
        }
        self.pivots.insert(p, row);
        true
    }

    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(row.clone()).is_empty()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn pivot_rows(&self) -> impl Iterator<Item = (usize, &SparseRow)> {
        self.pivots.iter().map(|(&c, r)| (c, r))
    }

    /// Kernel basis of the pushed rows, ordered by free column.
    pub fn nullspace(&self) -> Vec<SparseRow> {
        (0..self.cols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|f| {
                let mut v = SparseRow::new();
                v.insert(f, GaussRat::one());
                for (&p, row) in &self.pivots {
                    if let Some(x) = row.get(&f) {
                        v.insert(p, -x);
                    }
                }
                v
            })
            .collect()
    }
}

pub fn dense_to_sparse(v: &[GaussRat]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sparse_to_dense(v: &SparseRow, len: usize) -> Vec<GaussRat> {
    let mut out = vec![GaussRat::zero(); len];
    for (&i, x) in v {
        out[i] = x.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_on_fixed_case() {
        let rows = [[1, 2, 0, 1], [0, 0, 1, 1], [1, 2, 1, 2]];
        let mut e = SparseEliminator::new(4);
        for r in rows {
            let v: Vec<GaussRat> = r.iter().map(|&x| GaussRat::from_int(x)).collect();
            e.push(dense_to_sparse(&v));
        }
        assert_eq!(e.rank(), 2);
        let kernel: Vec<Vec<GaussRat>> = e.nullspace().iter().map(|v| sparse_to_dense(v, 4)).collect();
        let dense = super::super::ExactMatrix::from_int_rows(&[&[1, 2, 0, 1], &[0, 0, 1, 1], &[1, 2, 1, 2]]);
        assert_eq!(kernel, dense.nullspace());
    }
}
