//! Augmented dg algebras.
//!
//! Elements are addressed by monomials: `[]` is the unit, and each algebra
//! decides what longer monomials mean (`[i]` for a finite basis, letter
//! words for a cobar construction).

use std::collections::BTreeMap;

use super::coalgebra::{parity, sign, Comb, Generator};
use crate::error::{Error, Result};
use crate::linalg::{Scalar, ScalarKind};

pub type Mono = Vec<u32>;
/// Linear combination of monomials.
pub type MComb = Vec<(Mono, Scalar)>;

pub fn collect_m(terms: impl IntoIterator<Item = (Mono, Scalar)>) -> MComb {
    let mut acc: BTreeMap<Mono, Scalar> = BTreeMap::new();
    for (m, x) in terms {
        match acc.get_mut(&m) {
            Some(y) => *y += &x,
            None => {
                acc.insert(m, x);
            }
        }
    }
    acc.into_iter().filter(|e| !e.1.is_zero()).collect()
}

/// Largest weight of a basis element in one degree of an untruncated object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightBound {
    Empty,
    Max(u32),
    Unbounded,
}

impl WeightBound {
    pub fn plus(self, other: WeightBound) -> WeightBound {
        use WeightBound::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (Unbounded, _) | (_, Unbounded) => Unbounded,
            (Max(a), Max(b)) => Max(a + b),
        }
    }

    pub fn join(self, other: WeightBound) -> WeightBound {
        use WeightBound::*;
        match (self, other) {
            (Empty, x) | (x, Empty) => x,
            (Unbounded, _) | (_, Unbounded) => Unbounded,
            (Max(a), Max(b)) => Max(a.max(b)),
        }
    }

    /// Everything in this degree survives truncation at weight `cap`.
    pub fn within(self, cap: u32) -> bool {
        match self {
            WeightBound::Empty => true,
            WeightBound::Max(w) => w <= cap,
            WeightBound::Unbounded => false,
        }
    }

    /// Bound over a finite list of (degree, weight) pairs.
    pub fn scan(items: impl IntoIterator<Item = (i64, u32)>, degree: i64) -> WeightBound {
        items
            .into_iter()
            .filter(|e| e.0 == degree)
            .fold(WeightBound::Empty, |b, (_, w)| b.join(WeightBound::Max(w)))
    }
}

/// A graded augmented algebra with a weight filtration on its basis.
pub trait Algebra {
    fn kind(&self) -> ScalarKind;
    fn degree(&self, a: &[u32]) -> i64;
    fn weight(&self, a: &[u32]) -> u32;
    /// Basis monomials of weight ≤ `max_weight`, unit first.
    fn elements(&self, max_weight: u32) -> Vec<Mono>;
    fn mul(&self, a: &[u32], b: &[u32]) -> MComb;
    fn diff(&self, a: &[u32]) -> MComb;
    fn label(&self, a: &[u32]) -> String;
    /// No basis element lives below this degree.
    fn min_degree(&self) -> i64;
    fn weight_bound(&self, degree: i64) -> WeightBound;
    /// As `weight_bound`, ignoring the unit.
    fn reduced_weight_bound(&self, degree: i64) -> WeightBound;
}

/// Finite-rank augmented dg algebra on Ā with explicit structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGAlgebra {
    kind: ScalarKind,
    gens: Vec<Generator>,
    product: BTreeMap<(usize, usize), Comb>,
    diff: Vec<Comb>,
}

impl DGAlgebra {
    pub fn new(
        kind: ScalarKind,
        gens: Vec<Generator>,
        product: BTreeMap<(usize, usize), Comb>,
        diff: Vec<Comb>,
    ) -> Result<Self> {
        if diff.len() != gens.len() {
            return Err(Error::DimensionMismatch("algebra differential table".into()));
        }
        let product = product
            .into_iter()
            .map(|(k, v)| (k, crate::linalg::normalize_vec(v)))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let a = DGAlgebra {
            kind,
            gens,
            product,
            diff: diff.into_iter().map(crate::linalg::normalize_vec).collect(),
        };
        a.validate()?;
        Ok(a)
    }

    /// The ground field (Ā = 0).
    pub fn ground(kind: ScalarKind) -> Self {
        DGAlgebra {
            kind,
            gens: Vec::new(),
            product: BTreeMap::new(),
            diff: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }
    pub fn gen_degree(&self, i: usize) -> i64 {
        self.gens[i].degree
    }
    pub fn gen_weight(&self, i: usize) -> u32 {
        self.gens[i].weight
    }
    pub fn product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        self.product.get(&(i, j)).map_or(&[], |v| v)
    }
    pub fn d(&self, i: usize) -> &Comb {
        &self.diff[i]
    }

    fn validate(&self) -> Result<()> {
        let n = self.gens.len();
        let bad = |s: String| Err(Error::StructureViolated(s));
        for (&(i, j), v) in &self.product {
            if i >= n || j >= n {
                return bad("product index out of range".into());
            }
            for (k, x) in v {
                if *k >= n || x.kind() != self.kind {
                    return bad("product entry out of range".into());
                }
                if self.gen_degree(*k) != self.gen_degree(i) + self.gen_degree(j) {
                    return Err(Error::GradingMismatch(format!("product ({i},{j})")));
                }
            }
        }
        for (i, v) in self.diff.iter().enumerate() {
            for (k, x) in v {
                if *k >= n || x.kind() != self.kind {
                    return bad("differential entry out of range".into());
                }
                if self.gen_degree(*k) != self.gen_degree(i) - 1 {
                    return Err(Error::GradingMismatch(format!("d of {}", self.gens[i].name)));
                }
            }
        }
        // associativity, Leibniz, d² = 0
        let elems: Vec<Mono> = (0..n as u32).map(|i| vec![i]).collect();
        for a in &elems {
            let dd = self.apply_diff(&self.diff(a));
            if !dd.is_empty() {
                return bad(format!("d² ≠ 0 on {}", self.label(a)));
            }
            for b in &elems {
                let lhs = self.apply_diff(&self.mul(a, b));
                let s = sign(self.kind, parity(self.degree(a)));
                let rhs = collect_m(
                    self.apply_mul_left(&self.diff(a), b)
                        .into_iter()
                        .chain(self.apply_mul_right(a, &self.diff(b)).into_iter().map(|(m, x)| (m, &x * &s))),
                );
                if lhs != rhs {
                    return bad("Leibniz rule fails".into());
                }
                for c in &elems {
                    let l = self.apply_mul_left(&self.mul(a, b), c);
                    let r = self.apply_mul_right(a, &self.mul(b, c));
                    if l != r {
                        return bad("associativity fails".into());
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_diff(&self, v: &MComb) -> MComb {
        collect_m(v.iter().flat_map(|(m, x)| self.diff(m).into_iter().map(move |(n, y)| (n, x * &y))))
    }

    fn apply_mul_left(&self, v: &MComb, b: &[u32]) -> MComb {
        collect_m(v.iter().flat_map(|(m, x)| self.mul(m, b).into_iter().map(move |(n, y)| (n, x * &y))))
    }

    fn apply_mul_right(&self, a: &[u32], v: &MComb) -> MComb {
        collect_m(v.iter().flat_map(|(m, x)| self.mul(a, m).into_iter().map(move |(n, y)| (n, x * &y))))
    }
}

impl Algebra for DGAlgebra {
    fn kind(&self) -> ScalarKind {
        self.kind
    }
    fn degree(&self, a: &[u32]) -> i64 {
        a.first().map_or(0, |&i| self.gens[i as usize].degree)
    }
    fn weight(&self, a: &[u32]) -> u32 {
        a.first().map_or(0, |&i| self.gens[i as usize].weight)
    }
    fn elements(&self, max_weight: u32) -> Vec<Mono> {
        std::iter::once(Vec::new())
            .chain(
                (0..self.gens.len() as u32)
                    .filter(|&i| self.gens[i as usize].weight <= max_weight)
                    .map(|i| vec![i]),
            )
            .collect()
    }
    fn mul(&self, a: &[u32], b: &[u32]) -> MComb {
        match (a.first(), b.first()) {
            (None, _) => vec![(b.to_vec(), self.kind.one())],
            (_, None) => vec![(a.to_vec(), self.kind.one())],
            (Some(&i), Some(&j)) => self
                .product(i as usize, j as usize)
                .iter()
                .map(|(k, x)| (vec![*k as u32], x.clone()))
                .collect(),
        }
    }
    fn diff(&self, a: &[u32]) -> MComb {
        a.first().map_or(Vec::new(), |&i| {
            self.diff[i as usize]
                .iter()
                .map(|(k, x)| (vec![*k as u32], x.clone()))
                .collect()
        })
    }
    fn label(&self, a: &[u32]) -> String {
        a.first()
            .map_or("1".to_string(), |&i| self.gens[i as usize].name.clone())
    }
    fn min_degree(&self) -> i64 {
        self.gens.iter().map(|g| g.degree).min().unwrap_or(0).min(0)
    }
    fn weight_bound(&self, degree: i64) -> WeightBound {
        WeightBound::scan(
            std::iter::once((0, 0)).chain(self.gens.iter().map(|g| (g.degree, g.weight))),
            degree,
        )
    }
    fn reduced_weight_bound(&self, degree: i64) -> WeightBound {
        WeightBound::scan(self.gens.iter().map(|g| (g.degree, g.weight)), degree)
    }
}

/// A ⊗ A^op with (a⊗b)(a′⊗b′) = ± aa′ ⊗ b′b.
pub fn enveloping_algebra(a: &DGAlgebra) -> Result<DGAlgebra> {
    let kind = a.kind;
    // full basis: 0 = unit, i+1 = generator i
    let full = a.len() + 1;
    let to_mono = |i: usize| -> Mono { if i == 0 { vec![] } else { vec![(i - 1) as u32] } };
    let from_mono = |m: &Mono| -> usize { m.first().map_or(0, |&i| i as usize + 1) };
    let deg = |i: usize| a.degree(&to_mono(i));
    let pairs: Vec<(usize, usize)> = (0..full)
        .flat_map(|i| (0..full).map(move |j| (i, j)))
        .filter(|&(i, j)| (i, j) != (0, 0))
        .collect();
    let index: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(k, p)| (*p, k)).collect();
    let gens = pairs
        .iter()
        .map(|&(i, j)| {
            Generator::new(
                format!("{}⊗{}", a.label(&to_mono(i)), a.label(&to_mono(j))),
                deg(i) + deg(j),
                a.weight(&to_mono(i)) + a.weight(&to_mono(j)),
            )
        })
        .collect();
    let mut product = BTreeMap::new();
    for (p, &(i, j)) in pairs.iter().enumerate() {
        for (q, &(k, l)) in pairs.iter().enumerate() {
            // (i⊗j)(k⊗l) = (−1)^{|j||k|} ik ⊗ (j ·op l), j ·op l = (−1)^{|j||l|} l j
            let s = sign(kind, (parity(deg(j)) && parity(deg(k))) ^ (parity(deg(j)) && parity(deg(l))));
            let mut terms = Vec::new();
            for (m1, x) in a.mul(&to_mono(i), &to_mono(k)) {
                for (m2, y) in a.mul(&to_mono(l), &to_mono(j)) {
                    let key = (from_mono(&m1), from_mono(&m2));
                    if let Some(&r) = index.get(&key) {
                        terms.push((r, &(&x * &y) * &s));
                    }
                }
            }
            if !terms.is_empty() {
                product.insert((p, q), terms);
            }
        }
    }
    let diff = pairs
        .iter()
        .map(|&(i, j)| {
            let mut terms = Vec::new();
            for (m, x) in a.diff(&to_mono(i)) {
                if let Some(&r) = index.get(&(from_mono(&m), j)) {
                    terms.push((r, x));
                }
            }
            let s = sign(kind, parity(deg(i)));
            for (m, x) in a.diff(&to_mono(j)) {
                if let Some(&r) = index.get(&(i, from_mono(&m))) {
                    terms.push((r, &x * &s));
                }
            }
            terms
        })
        .collect();
    DGAlgebra::new(kind, gens, product, diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn dual_numbers(kind: ScalarKind) -> DGAlgebra {
        let mut product = BTreeMap::new();
        product.insert((0, 0), vec![]);
        DGAlgebra::new(kind, vec![Generator::new("x", 0, 1)], product, vec![vec![]]).unwrap()
    }

    #[test]
    fn dual_numbers_enveloping() {
        let a = dual_numbers(ScalarKind::Rational);
        let e = enveloping_algebra(&a).unwrap();
        assert_eq!(e.len() + 1, 4);
        // commutative here
        for i in 0..e.len() as u32 {
            for j in 0..e.len() as u32 {
                assert_eq!(e.mul(&[i], &[j]), e.mul(&[j], &[i]));
            }
        }
        let g = enveloping_algebra(&DGAlgebra::ground(ScalarKind::Rational)).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn associativity_is_enforced() {
        // x·x = y, x·y = 0, y·x = y breaks associativity: (xx)x = y·x = y, x(xx) = xy = 0
        let k = ScalarKind::Rational;
        let mut product = BTreeMap::new();
        product.insert((0, 0), vec![(1, k.one())]);
        product.insert((1, 0), vec![(1, k.one())]);
        let r = DGAlgebra::new(
            k,
            vec![Generator::new("x", 0, 1), Generator::new("y", 0, 2)],
            product,
            vec![vec![], vec![]],
        );
        assert!(matches!(r, Err(Error::StructureViolated(_))));
    }
}
