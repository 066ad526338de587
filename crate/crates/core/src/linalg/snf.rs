//! Smith normal form over ℤ with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::SparseMatrix;
use super::scalar::{Scalar, ScalarKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Smith {
    pub u: SparseMatrix,
    pub s: SparseMatrix,
    pub v: SparseMatrix,
}

impl Smith {
    /// Nonzero diagonal entries of S, in order.
    pub fn divisors(&self) -> Vec<BigInt> {
        let n = self.s.n_rows().min(self.s.n_cols());
        (0..n)
            .map(|i| self.s.get(i, i).to_fraction().0)
            .filter(|d| !d.is_zero())
            .collect()
    }
}

type Dense = Vec<Vec<BigInt>>;

fn to_dense(m: &SparseMatrix) -> Result<Dense> {
    let mut a = vec![vec![BigInt::zero(); m.n_cols()]; m.n_rows()];
    for (i, j, x) in m.entries() {
        match x {
            Scalar::Integer(z) => a[i][j] = z.clone(),
            _ => return Err(Error::NotInteger),
        }
    }
    Ok(a)
}

fn from_dense(a: &Dense, n_rows: usize, n_cols: usize) -> SparseMatrix {
    let entries = a.iter().enumerate().flat_map(|(i, r)| {
        r.iter()
            .enumerate()
            .filter(|e| !e.1.is_zero())
            .map(move |(j, x)| (i, j, Scalar::Integer(x.clone())))
    });
    SparseMatrix::from_triplets(ScalarKind::Integer, n_rows, n_cols, entries)
        .expect("dimensions preserved")
}

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Working state: a = L·M·R, with u = L⁻¹ and v = R⁻¹ kept directly.
struct State {
    a: Dense,
    u: Dense,
    v: Dense,
}

impl State {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        for row in self.u.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        self.v.swap(i, j);
    }

    /// row_i += c·row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        let rj = self.a[j].clone();
        for (x, y) in self.a[i].iter_mut().zip(&rj) {
            *x += c * y;
        }
        for row in self.u.iter_mut() {
            let t = c * &row[i];
            row[j] -= t;
        }
    }

    /// col_j += c·col_i
    fn add_col(&mut self, j: usize, i: usize, c: &BigInt) {
        for row in self.a.iter_mut() {
            let t = c * &row[i];
            row[j] += t;
        }
        let vj = self.v[j].clone();
        for (x, y) in self.v[i].iter_mut().zip(&vj) {
            *x -= c * y;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.u.iter_mut() {
            row[i] = -&row[i];
        }
    }
}

/// M = U·S·V with U, V unimodular and S diagonal, d₁ | d₂ | ….
pub fn smith_normal_form(m: &SparseMatrix) -> Result<Smith> {
    if m.kind() != ScalarKind::Integer {
        return Err(Error::NotInteger);
    }
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let mut st = State {
        a: to_dense(m)?,
        u: identity(rows),
        v: identity(cols),
    };
    for t in 0..rows.min(cols) {
        // smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !st.a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| st.a[i][j].abs() < st.a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            let mut again = false;
            for i in t + 1..rows {
                if st.a[i][t].is_zero() {
                    continue;
                }
                let q = st.a[i][t].div_floor(&st.a[t][t]);
                st.add_row(i, t, &-q);
                if !st.a[i][t].is_zero() {
                    st.swap_rows(t, i);
                    again = true;
                }
            }
            for j in t + 1..cols {
                if st.a[t][j].is_zero() {
                    continue;
                }
                let q = st.a[t][j].div_floor(&st.a[t][t]);
                st.add_col(j, t, &-q);
                if !st.a[t][j].is_zero() {
                    st.swap_cols(t, j);
                    again = true;
                }
            }
            if again {
                continue;
            }
            // divisibility of the trailing block
            let bad = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !(&st.a[i][j] % &st.a[t][t]).is_zero())
            });
            match bad {
                Some(i) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.a[t][t].is_negative() {
            st.negate_row(t);
        }
    }
    Ok(Smith {
        u: from_dense(&st.u, rows, rows),
        s: from_dense(&st.a, rows, cols),
        v: from_dense(&st.v, cols, cols),
    })
}

/// Determinant by fraction-free elimination (test helper for unimodularity).
pub fn determinant(m: &SparseMatrix) -> Result<BigInt> {
    let mut a = to_dense(m)?;
    let n = a.len();
    if n != m.n_cols() {
        return Err(Error::DimensionMismatch("determinant of non-square".into()));
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(BigInt::zero());
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_dense_i64(ScalarKind::Integer, rows)
    }

    fn check(m: &SparseMatrix) -> Smith {
        let s = smith_normal_form(m).unwrap();
        assert_eq!(s.u.mul(&s.s).unwrap().mul(&s.v).unwrap(), *m);
        assert!(determinant(&s.u).unwrap().abs().is_one());
        assert!(determinant(&s.v).unwrap().abs().is_one());
        let d = s.divisors();
        for w in d.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        s
    }

    #[test]
    fn diag_two_three() {
        let s = check(&z(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.divisors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_matrix() {
        let s = check(&z(&[vec![0, 0, 0], vec![0, 0, 0]]));
        assert!(s.s.is_zero());
    }

    #[test]
    fn rejects_rationals() {
        let m = SparseMatrix::identity(ScalarKind::Rational, 2);
        assert!(matches!(smith_normal_form(&m), Err(Error::NotInteger)));
    }

    #[test]
    fn mixed_example() {
        let s = check(&z(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        assert_eq!(
            s.divisors(),
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }
}
