//! Column-major sparse matrices with exact entries.

use std::collections::BTreeMap;

use super::scalar::{Scalar, ScalarKind};
use crate::error::{Error, Result};

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    kind: ScalarKind,
    n_rows: usize,
    cols: Vec<SparseVec>,
}

/// Sorts, merges duplicates and drops zeros.
pub fn normalize_vec(mut v: Vec<(usize, Scalar)>) -> SparseVec {
    v.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += &x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

impl SparseMatrix {
    pub fn zeros(kind: ScalarKind, n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            kind,
            n_rows,
            cols: vec![Vec::new(); n_cols],
        }
    }

    pub fn identity(kind: ScalarKind, n: usize) -> Self {
        let cols = (0..n).map(|i| vec![(i, kind.one())]).collect();
        SparseMatrix {
            kind,
            n_rows: n,
            cols,
        }
    }

    /// Builds from raw column entry lists (duplicates are summed).
    pub fn from_columns(
        kind: ScalarKind,
        n_rows: usize,
        cols: Vec<Vec<(usize, Scalar)>>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(cols.len());
        for c in cols {
            for (i, x) in &c {
                if *i >= n_rows {
                    return Err(Error::DimensionMismatch(format!(
                        "row index {i} out of range {n_rows}"
                    )));
                }
                if x.kind() != kind {
                    return Err(Error::ScalarMismatch {
                        expected: kind,
                        found: x.kind(),
                    });
                }
            }
            out.push(normalize_vec(c));
        }
        Ok(SparseMatrix {
            kind,
            n_rows,
            cols: out,
        })
    }

    pub fn from_triplets(
        kind: ScalarKind,
        n_rows: usize,
        n_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut cols = vec![Vec::new(); n_cols];
        for (i, j, x) in entries {
            if j >= n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "column index {j} out of range {n_cols}"
                )));
            }
            cols[j].push((i, x));
        }
        Self::from_columns(kind, n_rows, cols)
    }

    pub fn from_dense_i64(kind: ScalarKind, rows: &[Vec<i64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let entries = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(move |(j, &v)| (i, j, kind.from_i64(v)))
        });
        Self::from_triplets(kind, n_rows, n_cols, entries).expect("dense input is in range")
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match self.cols[j].binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.cols[j][k].1.clone(),
            Err(_) => self.kind.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// All nonzero entries as (row, col, value), column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, x)| (*i, j, x)))
    }

    pub fn transpose(&self) -> Self {
        let mut cols = vec![Vec::new(); self.n_rows];
        for (i, j, x) in self.entries() {
            cols[i].push((j, x.clone()));
        }
        SparseMatrix {
            kind: self.kind,
            n_rows: self.n_cols(),
            cols,
        }
    }

    fn check_kind(&self, other: &SparseMatrix) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::ScalarMismatch {
                expected: self.kind,
                found: other.kind,
            });
        }
        Ok(())
    }

    /// Sparse vector times this matrix's columns: Σ v_j · col_j.
    pub fn apply(&self, v: &[(usize, Scalar)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (j, a) in v {
            for (i, x) in &self.cols[*j] {
                let t = a * x;
                acc.entry(*i)
                    .and_modify(|y| *y += &t)
                    .or_insert(t);
            }
        }
        acc.into_iter().filter(|e| !e.1.is_zero()).collect()
    }

    pub fn mul_dense(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.n_cols()
            )));
        }
        let sparse: SparseVec = v
            .iter()
            .enumerate()
            .filter(|e| !e.1.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        let mut out = vec![self.kind.zero(); self.n_rows];
        for (i, x) in self.apply(&sparse) {
            out[i] = x;
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_kind(rhs)?;
        if self.n_cols() != rhs.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.n_rows,
                self.n_cols(),
                rhs.n_rows,
                rhs.n_cols()
            )));
        }
        let cols = rhs.cols.iter().map(|c| self.apply(c)).collect();
        Ok(SparseMatrix {
            kind: self.kind,
            n_rows: self.n_rows,
            cols,
        })
    }

    pub fn add(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_kind(rhs)?;
        if self.n_rows != rhs.n_rows || self.n_cols() != rhs.n_cols() {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let cols = self
            .cols
            .iter()
            .zip(&rhs.cols)
            .map(|(a, b)| normalize_vec(a.iter().chain(b.iter()).cloned().collect()))
            .collect();
        Ok(SparseMatrix {
            kind: self.kind,
            n_rows: self.n_rows,
            cols,
        })
    }

    pub fn scale(&self, s: &Scalar) -> SparseMatrix {
        let cols = self
            .cols
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(i, x)| (*i, x * s))
                    .filter(|e| !e.1.is_zero())
                    .collect()
            })
            .collect();
        SparseMatrix {
            kind: self.kind,
            n_rows: self.n_rows,
            cols,
        }
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        self.add(&rhs.scale(&self.kind.from_i64(-1)))
    }

    /// Keeps the rows whose index satisfies `keep`, renumbered in order.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> SparseMatrix {
        let mut map = vec![usize::MAX; self.n_rows];
        let mut n = 0;
        for (i, slot) in map.iter_mut().enumerate() {
            if keep(i) {
                *slot = n;
                n += 1;
            }
        }
        let cols = self
            .cols
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|e| map[e.0] != usize::MAX)
                    .map(|(i, x)| (map[*i], x.clone()))
                    .collect()
            })
            .collect();
        SparseMatrix {
            kind: self.kind,
            n_rows: n,
            cols,
        }
    }

    pub fn select_cols(&self, keep: impl Fn(usize) -> bool) -> SparseMatrix {
        let cols = self
            .cols
            .iter()
            .enumerate()
            .filter(|(j, _)| keep(*j))
            .map(|(_, c)| c.clone())
            .collect();
        SparseMatrix {
            kind: self.kind,
            n_rows: self.n_rows,
            cols,
        }
    }

    /// Reindexes rows and columns: entry (i, j) moves to (rows[i], cols[j]).
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut out = vec![Vec::new(); self.n_cols()];
        for (i, j, x) in self.entries() {
            out[cols[j]].push((rows[i], x.clone()));
        }
        SparseMatrix::from_columns(self.kind, self.n_rows, out).expect("permutation in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.kind.zero(); self.n_cols()]; self.n_rows];
        for (i, j, x) in self.entries() {
            out[i][j] = x.clone();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let k = ScalarKind::Rational;
        let a = SparseMatrix::from_dense_i64(k, &[vec![1, 2], vec![0, 1], vec![3, 0]]);
        let b = SparseMatrix::from_dense_i64(k, &[vec![1, 0, 1], vec![2, 1, 0]]);
        let ab = a.mul(&b).unwrap();
        let want = SparseMatrix::from_dense_i64(
            k,
            &[vec![5, 2, 1], vec![2, 1, 0], vec![3, 0, 3]],
        );
        assert_eq!(ab, want);
        assert_eq!(
            b.transpose().mul(&a.transpose()).unwrap(),
            want.transpose()
        );
    }

    #[test]
    fn duplicates_sum_and_zeros_vanish() {
        let k = ScalarKind::Prime(3);
        let m = SparseMatrix::from_triplets(
            k,
            2,
            1,
            vec![(0, 0, k.from_i64(1)), (0, 0, k.from_i64(2)), (1, 0, k.from_i64(1))],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert!(m.get(0, 0).is_zero());
    }

    #[test]
    fn out_of_range_and_kind_errors() {
        let k = ScalarKind::Rational;
        assert!(SparseMatrix::from_triplets(k, 1, 1, vec![(1, 0, k.one())]).is_err());
        let z = SparseMatrix::identity(ScalarKind::Integer, 2);
        let q = SparseMatrix::identity(k, 2);
        assert!(matches!(q.mul(&z), Err(Error::ScalarMismatch { .. })));
    }
}
