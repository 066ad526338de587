//! Rank, kernels and linear solves by sparse elimination.
//!
//! Rank over ℚ runs fraction-free on integer columns (denominators cleared
//! per column, content divided out after every step) in checked `i128`, and
//! restarts in `BigInt` when a step overflows. Kernels and solves track the
//! column combinations and work directly in the field.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{SparseMatrix, SparseVec};
use super::scalar::{inv_mod, mulmod, Scalar, ScalarKind};
use crate::error::{Error, Result};

pub fn rank(m: &SparseMatrix) -> Result<usize> {
    match m.kind() {
        ScalarKind::Integer => Err(Error::IntegerRankRequest),
        ScalarKind::Prime(p) => Ok(rank_mod_p(m, p)),
        ScalarKind::Rational => Ok(rank_rational(m)),
    }
}

fn column_order(m: &SparseMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.n_cols()).collect();
    order.sort_by_key(|&j| (m.column(j).len(), j));
    order
}

fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for j in column_order(m) {
        let mut v: Vec<(usize, u64)> = m
            .column(j)
            .iter()
            .map(|(i, x)| match x {
                Scalar::Prime { value, .. } => (*i, *value),
                _ => unreachable!("kind checked by caller"),
            })
            .collect();
        while let Some(&(lead, a)) = v.first() {
            match pivots.get(&lead) {
                Some(piv) => v = axpy_mod(&v, p - a, piv, p),
                None => {
                    let inv = inv_mod(a, p);
                    for e in v.iter_mut() {
                        e.1 = mulmod(e.1, inv, p);
                    }
                    pivots.insert(lead, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// v + c·w over 𝔽_p.
fn axpy_mod(v: &[(usize, u64)], c: u64, w: &[(usize, u64)], p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut a, mut b) = (0, 0);
    while a < v.len() || b < w.len() {
        let take_v = b >= w.len() || (a < v.len() && v[a].0 < w[b].0);
        let take_w = a >= v.len() || (b < w.len() && w[b].0 < v[a].0);
        if take_v {
            out.push(v[a]);
            a += 1;
        } else if take_w {
            out.push((w[b].0, mulmod(c, w[b].1, p)));
            b += 1;
        } else {
            let x = (v[a].1 + mulmod(c, w[b].1, p)) % p;
            if x != 0 {
                out.push((v[a].0, x));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

/// Integer-like ring used by the fraction-free rank.
trait FfRing: Clone + Sized {
    fn is_zero(&self) -> bool;
    /// b·x − a·y, `None` on overflow.
    fn comb(b: &Self, x: &Self, a: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, g: &Self) -> Self;
    fn is_negative(&self) -> bool;
    fn is_one_abs(&self) -> bool;
    fn zero() -> Self;
    fn neg(&self) -> Self;
}

impl FfRing for i128 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn comb(b: &Self, x: &Self, a: &Self, y: &Self) -> Option<Self> {
        b.checked_mul(*x)?.checked_sub(a.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn is_one_abs(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn zero() -> Self {
        0
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl FfRing for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn comb(b: &Self, x: &Self, a: &Self, y: &Self) -> Option<Self> {
        Some(b * x - a * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_one_abs(&self) -> bool {
        self.abs().is_one()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Divides out the content and makes the leading entry positive.
fn primitive<R: FfRing>(v: &mut [(usize, R)]) {
    let Some(first) = v.first() else { return };
    let mut g = first.1.gcd(&first.1);
    for e in v.iter().skip(1) {
        if g.is_one_abs() {
            break;
        }
        g = g.gcd(&e.1);
    }
    if first.1.is_negative() {
        g = g.neg();
    }
    if !(g.is_one_abs() && !g.is_negative()) {
        for e in v.iter_mut() {
            e.1 = e.1.div_exact(&g);
        }
    }
}

/// b·v − a·w on sparse integer vectors.
fn ff_combine<R: FfRing>(
    b: &R,
    v: &[(usize, R)],
    a: &R,
    w: &[(usize, R)],
) -> Option<Vec<(usize, R)>> {
    let zero = R::zero();
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        let (idx, x, y) = if j >= w.len() || (i < v.len() && v[i].0 < w[j].0) {
            i += 1;
            (v[i - 1].0, &v[i - 1].1, &zero)
        } else if i >= v.len() || w[j].0 < v[i].0 {
            j += 1;
            (w[j - 1].0, &zero, &w[j - 1].1)
        } else {
            i += 1;
            j += 1;
            (v[i - 1].0, &v[i - 1].1, &w[j - 1].1)
        };
        let z = R::comb(b, x, a, y)?;
        if !z.is_zero() {
            out.push((idx, z));
        }
    }
    Some(out)
}

fn ff_rank<R: FfRing>(columns: Vec<Vec<(usize, R)>>) -> Option<usize> {
    let mut pivots: HashMap<usize, Vec<(usize, R)>> = HashMap::new();
    for mut v in columns {
        primitive(&mut v);
        while let Some((lead, a)) = v.first().cloned() {
            match pivots.get(&lead) {
                Some(piv) => {
                    let b = piv[0].1.clone();
                    let g = a.gcd(&b);
                    let (a, b) = (a.div_exact(&g), b.div_exact(&g));
                    v = ff_combine(&b, &v, &a, piv)?;
                    primitive(&mut v);
                }
                None => {
                    pivots.insert(lead, v);
                    break;
                }
            }
        }
    }
    Some(pivots.len())
}

/// Column j scaled to integers: (numerators · lcm/denominators).
fn integer_column(col: &SparseVec) -> Vec<(usize, BigInt)> {
    let mut l = BigInt::one();
    for (_, x) in col {
        let (_, d) = x.to_fraction();
        l = l.lcm(&d);
    }
    col.iter()
        .map(|(i, x)| {
            let (n, d) = x.to_fraction();
            (*i, n * (&l / d))
        })
        .collect()
}

fn rank_rational(m: &SparseMatrix) -> usize {
    let big: Vec<Vec<(usize, BigInt)>> = column_order(m)
        .into_iter()
        .map(|j| integer_column(m.column(j)))
        .collect();
    let small: Option<Vec<Vec<(usize, i128)>>> = big
        .iter()
        .map(|c| {
            c.iter()
                .map(|(i, x)| i128::try_from(x).ok().map(|y| (*i, y)))
                .collect()
        })
        .collect();
    if let Some(cols) = small {
        if let Some(r) = ff_rank(cols) {
            return r;
        }
    }
    ff_rank(big).expect("BigInt elimination cannot overflow")
}

/// v − c·w in the field.
fn axpy_neg(v: &[(usize, Scalar)], c: &Scalar, w: &[(usize, Scalar)]) -> SparseVec {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        if j >= w.len() || (i < v.len() && v[i].0 < w[j].0) {
            out.push(v[i].clone());
            i += 1;
        } else if i >= v.len() || w[j].0 < v[i].0 {
            out.push((w[j].0, -&(c * &w[j].1)));
            j += 1;
        } else {
            let z = &v[i].1 - &(c * &w[j].1);
            if !z.is_zero() {
                out.push((v[i].0, z));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Column echelon form with each pivot's expression in the original columns.
struct Tracked {
    pivots: HashMap<usize, (SparseVec, SparseVec)>,
    kernel: Vec<SparseVec>,
}

fn field_check(m: &SparseMatrix) -> Result<()> {
    if m.kind() == ScalarKind::Integer {
        return Err(Error::IntegerRankRequest);
    }
    Ok(())
}

fn tracked(m: &SparseMatrix) -> Tracked {
    let one = m.kind().one();
    let mut pivots: HashMap<usize, (SparseVec, SparseVec)> = HashMap::new();
    let mut kernel = Vec::new();
    for j in 0..m.n_cols() {
        let mut v = m.column(j).clone();
        let mut t: SparseVec = vec![(j, one.clone())];
        loop {
            let Some((lead, a)) = v.first().cloned() else {
                kernel.push(t);
                break;
            };
            match pivots.get(&lead) {
                Some((pv, pt)) => {
                    v = axpy_neg(&v, &a, pv);
                    t = axpy_neg(&t, &a, pt);
                    t.sort_by_key(|e| e.0);
                }
                None => {
                    let inv = a.inverse().expect("field element");
                    let v: SparseVec = v.iter().map(|(i, x)| (*i, x * &inv)).collect();
                    let t: SparseVec = t.iter().map(|(i, x)| (*i, x * &inv)).collect();
                    pivots.insert(lead, (v, t));
                    break;
                }
            }
        }
    }
    Tracked { pivots, kernel }
}

/// Basis of the null space, as sparse column vectors.
pub fn kernel_basis(m: &SparseMatrix) -> Result<Vec<SparseVec>> {
    field_check(m)?;
    Ok(tracked(m).kernel)
}

/// Some x with M·x = b, if one exists.
pub fn solve_sparse(m: &SparseMatrix, b: &SparseVec) -> Result<Option<SparseVec>> {
    field_check(m)?;
    if let Some((i, _)) = b.iter().find(|e| e.0 >= m.n_rows()) {
        return Err(Error::DimensionMismatch(format!("rhs index {i}")));
    }
    if b.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let tr = tracked(m);
    let mut v = b.clone();
    let mut x: SparseVec = Vec::new();
    while let Some((lead, a)) = v.first().cloned() {
        match tr.pivots.get(&lead) {
            Some((pv, pt)) => {
                v = axpy_neg(&v, &a, pv);
                let neg = -&a;
                x = axpy_neg(&x, &neg, pt);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(x))
}

pub fn solve(m: &SparseMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if b.len() != m.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} for {} rows",
            b.len(),
            m.n_rows()
        )));
    }
    let sb: SparseVec = b
        .iter()
        .enumerate()
        .filter(|e| !e.1.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect();
    Ok(solve_sparse(m, &sb)?.map(|x| {
        let mut out = vec![m.kind().zero(); m.n_cols()];
        for (i, v) in x {
            out[i] = v;
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_dense_i64(ScalarKind::Rational, rows)
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&SparseMatrix::identity(ScalarKind::Rational, 3)).unwrap(), 3);
        assert_eq!(rank(&SparseMatrix::zeros(ScalarKind::Rational, 0, 5)).unwrap(), 0);
        // triangle graph: vertices × edges (01, 02, 12)
        let d1 = q(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        assert_eq!(rank(&d1).unwrap(), 2);
        assert_eq!(
            rank(&SparseMatrix::identity(ScalarKind::Integer, 2)),
            Err(Error::IntegerRankRequest)
        );
    }

    #[test]
    fn rank_depends_on_characteristic() {
        let m = [vec![1, 1], vec![1, -1]];
        assert_eq!(rank(&q(&m)).unwrap(), 2);
        assert_eq!(
            rank(&SparseMatrix::from_dense_i64(ScalarKind::Prime(2), &m)).unwrap(),
            1
        );
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = 1i64 << 62;
        let m = q(&[vec![big, big - 1, 3], vec![big - 3, big, 5], vec![7, big - 11, big]]);
        let r = rank(&m).unwrap();
        let k = kernel_basis(&m).unwrap();
        assert_eq!(r + k.len(), 3);
        assert_eq!(r, 3);
    }

    #[test]
    fn kernel_and_solve_examples() {
        let m = q(&[vec![1, 1]]);
        let k = kernel_basis(&m).unwrap();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
        let one = ScalarKind::Rational.one();
        let x = solve(&m, std::slice::from_ref(&one)).unwrap().unwrap();
        assert_eq!(&x[0] + &x[1], one);
        assert!(kernel_basis(&SparseMatrix::identity(ScalarKind::Rational, 4))
            .unwrap()
            .is_empty());
        let sing = q(&[vec![1, 2], vec![2, 4]]);
        assert!(solve(&sing, &[one.clone(), one.clone()]).unwrap().is_none());
        assert!(matches!(solve(&sing, &[one]), Err(Error::DimensionMismatch(_))));
    }
}
