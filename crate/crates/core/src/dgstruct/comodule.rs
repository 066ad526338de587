//! Finite-rank dg comodules and bicomodules over a conilpotent coalgebra.
//!
//! Coactions are stored in reduced form: the counit part m ↦ 1⊗m is implicit,
//! so λ̄(m) = Σ c⊗m′ and ρ̄(m) = Σ m′⊗c with c ∈ C̄.

use std::collections::BTreeMap;

use super::coalgebra::{collect2, collect3, parity, sign, Comb, Comb2, DGCoalgebra, Generator};
use crate::error::{Error, Result};
use crate::linalg::{normalize_vec, Scalar, ScalarKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGComodule {
    kind: ScalarKind,
    basis: Vec<Generator>,
    diff: Vec<Comb>,
    /// λ̄(m) as (c, m′, x).
    left: Option<Vec<Comb2>>,
    /// ρ̄(m) as (m′, c, x).
    right: Option<Vec<Comb2>>,
}

impl DGComodule {
    /// Validates every identity against `coalg` and builds.
    pub fn new(
        coalg: &DGCoalgebra,
        basis: Vec<Generator>,
        diff: Vec<Comb>,
        left: Option<Vec<Comb2>>,
        right: Option<Vec<Comb2>>,
    ) -> Result<Self> {
        let kind = coalg.kind();
        let n = basis.len();
        let sized = |v: &Option<Vec<Comb2>>| v.as_ref().is_none_or(|v| v.len() == n);
        if diff.len() != n || !sized(&left) || !sized(&right) {
            return Err(Error::DimensionMismatch("comodule structure tables".into()));
        }
        let m = DGComodule {
            kind,
            basis,
            diff: diff.into_iter().map(normalize_vec).collect(),
            left: left.map(|v| v.into_iter().map(|t| collect2(kind, t)).collect()),
            right: right.map(|v| v.into_iter().map(|t| collect2(kind, t)).collect()),
        };
        m.validate(coalg)?;
        Ok(m)
    }

    /// The ground field as a bicomodule (zero reduced coactions).
    pub fn trivial(kind: ScalarKind) -> Self {
        DGComodule {
            kind,
            basis: vec![Generator::new("1", 0, 0)],
            diff: vec![Vec::new()],
            left: Some(vec![Vec::new()]),
            right: Some(vec![Vec::new()]),
        }
    }

    /// C = k ⊕ C̄ as a bicomodule over itself. Index 0 is the unit, i+1 is c_i.
    pub fn from_coalgebra(c: &DGCoalgebra) -> Self {
        let kind = c.kind();
        let one = kind.one();
        let mut basis = vec![Generator::new("1", 0, 0)];
        basis.extend(c.gens().iter().cloned());
        let mut diff = vec![Vec::new()];
        let mut left = vec![Vec::new()];
        let mut right = vec![Vec::new()];
        for i in 0..c.len() {
            diff.push(c.d(i).iter().map(|(j, x)| (j + 1, x.clone())).collect());
            let mut l = vec![(i, 0, one.clone())];
            l.extend(c.delta(i).iter().map(|(a, b, x)| (*a, b + 1, x.clone())));
            left.push(l);
            let mut r = vec![(0, i, one.clone())];
            r.extend(c.delta(i).iter().map(|(a, b, x)| (a + 1, *b, x.clone())));
            right.push(r);
        }
        DGComodule {
            kind,
            basis,
            diff,
            left: Some(left.into_iter().map(|t| collect2(kind, t)).collect()),
            right: Some(right.into_iter().map(|t| collect2(kind, t)).collect()),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }
    pub fn len(&self) -> usize {
        self.basis.len()
    }
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }
    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }
    pub fn weight(&self, i: usize) -> u32 {
        self.basis[i].weight
    }
    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }
    pub fn d(&self, i: usize) -> &Comb {
        &self.diff[i]
    }
    pub fn left(&self, i: usize) -> Option<&Comb2> {
        self.left.as_ref().map(|v| &v[i])
    }
    pub fn right(&self, i: usize) -> Option<&Comb2> {
        self.right.as_ref().map(|v| &v[i])
    }
    pub fn has_left(&self) -> bool {
        self.left.is_some()
    }
    pub fn has_right(&self) -> bool {
        self.right.is_some()
    }
    pub fn max_weight(&self) -> u32 {
        self.basis.iter().map(|g| g.weight).max().unwrap_or(0)
    }

    fn validate(&self, c: &DGCoalgebra) -> Result<()> {
        let n = self.len();
        let bad = |s: String| Err(Error::StructureViolated(s));
        for i in 0..n {
            for (j, x) in &self.diff[i] {
                if *j >= n || x.kind() != self.kind {
                    return bad(format!("d({}) out of range", self.name(i)));
                }
                if self.degree(*j) != self.degree(i) - 1 {
                    return Err(Error::GradingMismatch(format!("d({})", self.name(i))));
                }
                if self.weight(*j) > self.weight(i) {
                    return bad(format!("d({}) raises weight", self.name(i)));
                }
            }
            let sides = [
                self.left(i).map(|v| v.iter().map(|(a, m, x)| (*a, *m, x)).collect::<Vec<_>>()),
                self.right(i).map(|v| v.iter().map(|(m, a, x)| (*a, *m, x)).collect()),
            ];
            for (c_idx, m, x) in sides.into_iter().flatten().flatten() {
                if c_idx >= c.len() || m >= n || x.kind() != self.kind {
                    return bad(format!("coaction on {} out of range", self.name(i)));
                }
                if c.degree(c_idx) + self.degree(m) != self.degree(i) {
                    return Err(Error::GradingMismatch(format!("coaction on {}", self.name(i))));
                }
                if c.weight(c_idx) + self.weight(m) > self.weight(i) {
                    return bad(format!("coaction on {} raises weight", self.name(i)));
                }
            }
        }
        if let Some(i) = self.square_defect() {
            return bad(format!("d² ≠ 0 on {}", self.name(i)));
        }
        if let Some(i) = self.left_defect(c) {
            return bad(format!("left coaction fails on {}", self.name(i)));
        }
        if let Some(i) = self.right_defect(c) {
            return bad(format!("right coaction fails on {}", self.name(i)));
        }
        if let Some(i) = self.bicomodule_defect() {
            return bad(format!("coactions do not commute on {}", self.name(i)));
        }
        Ok(())
    }

    fn square_defect(&self) -> Option<usize> {
        (0..self.len()).find(|&i| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (j, x) in &self.diff[i] {
                for (k, y) in &self.diff[*j] {
                    *acc.entry(*k).or_insert_with(|| self.kind.zero()) += &(x * y);
                }
            }
            acc.values().any(|x| !x.is_zero())
        })
    }

    /// First element where (Δ̄⊗1)λ̄ ≠ (1⊗λ̄)λ̄ or λ̄d ≠ (d⊗1 ± 1⊗d)λ̄.
    pub fn left_defect(&self, c: &DGCoalgebra) -> Option<usize> {
        let left = self.left.as_ref()?;
        let k = self.kind;
        (0..self.len()).find(|&i| {
            let lhs = collect3(
                k,
                left[i].iter().flat_map(|(a, m, x)| {
                    c.delta(*a).iter().map(move |(p, q, y)| ((*p, *q, *m), x * y))
                }),
            );
            let rhs = collect3(
                k,
                left[i].iter().flat_map(|(a, m, x)| {
                    left[*m].iter().map(move |(p, q, y)| ((*a, *p, *q), x * y))
                }),
            );
            let dl = collect2(
                k,
                self.diff[i]
                    .iter()
                    .flat_map(|(j, x)| left[*j].iter().map(move |(a, m, y)| (*a, *m, x * y))),
            );
            let mut terms = Vec::new();
            for (a, m, x) in &left[i] {
                for (p, y) in c.d(*a) {
                    terms.push((*p, *m, x * y));
                }
                let s = sign(k, parity(c.degree(*a)));
                for (q, y) in &self.diff[*m] {
                    terms.push((*a, *q, &(x * y) * &s));
                }
            }
            lhs != rhs || dl != collect2(k, terms)
        })
    }

    /// First element where (ρ̄⊗1)ρ̄ ≠ (1⊗Δ̄)ρ̄ or ρ̄d ≠ (d⊗1 ± 1⊗d)ρ̄.
    pub fn right_defect(&self, c: &DGCoalgebra) -> Option<usize> {
        let right = self.right.as_ref()?;
        let k = self.kind;
        (0..self.len()).find(|&i| {
            let lhs = collect3(
                k,
                right[i].iter().flat_map(|(m, a, x)| {
                    right[*m].iter().map(move |(p, q, y)| ((*p, *q, *a), x * y))
                }),
            );
            let rhs = collect3(
                k,
                right[i].iter().flat_map(|(m, a, x)| {
                    c.delta(*a).iter().map(move |(p, q, y)| ((*m, *p, *q), x * y))
                }),
            );
            let dr = collect2(
                k,
                self.diff[i]
                    .iter()
                    .flat_map(|(j, x)| right[*j].iter().map(move |(m, a, y)| (*m, *a, x * y))),
            );
            let mut terms = Vec::new();
            for (m, a, x) in &right[i] {
                for (p, y) in &self.diff[*m] {
                    terms.push((*p, *a, x * y));
                }
                let s = sign(k, parity(self.degree(*m)));
                for (q, y) in c.d(*a) {
                    terms.push((*m, *q, &(x * y) * &s));
                }
            }
            lhs != rhs || dr != collect2(k, terms)
        })
    }

    /// First element where (λ̄⊗1)ρ̄ ≠ (1⊗ρ̄)λ̄.
    pub fn bicomodule_defect(&self) -> Option<usize> {
        let (left, right) = (self.left.as_ref()?, self.right.as_ref()?);
        let k = self.kind;
        (0..self.len()).find(|&i| {
            let lhs = collect3(
                k,
                right[i].iter().flat_map(|(m, b, x)| {
                    left[*m].iter().map(move |(a, q, y)| ((*a, *q, *b), x * y))
                }),
            );
            let rhs = collect3(
                k,
                left[i].iter().flat_map(|(a, m, x)| {
                    right[*m].iter().map(move |(q, b, y)| ((*a, *q, *b), x * y))
                }),
            );
            lhs != rhs
        })
    }

    /// The linear dual M* with the transposed structure: g_j = m_j* has degree
    /// −|m_j| and weight `top` − w(m_j); ρ̄ on M gives λ̄ on M* and vice versa.
    pub fn dual(&self, coalg: &DGCoalgebra, top: u32) -> Result<DGComodule> {
        let k = self.kind;
        let n = self.len();
        if top < self.max_weight() {
            return Err(Error::StructureViolated("dual weight offset below max weight".into()));
        }
        let basis = self
            .basis
            .iter()
            .map(|g| Generator::new(format!("{}*", g.name), -g.degree, top - g.weight))
            .collect();
        // (d g_j)(m_k) = −(−1)^{|g_j|} g_j(d m_k)
        let mut diff = vec![Vec::new(); n];
        for kk in 0..n {
            for (j, x) in &self.diff[kk] {
                let s = -&sign(k, parity(self.degree(*j)));
                diff[*j].push((kk, x * &s));
            }
        }
        let transpose = |table: &Option<Vec<Comb2>>, from_right: bool| {
            table.as_ref().map(|t| {
                let mut out: Vec<Comb2> = vec![Vec::new(); n];
                for (kk, terms) in t.iter().enumerate() {
                    for (p, q, x) in terms {
                        // right: m_k ↦ m_j⊗c gives g_j ↦ c⊗g_k; left: m_k ↦ c⊗m_j gives g_j ↦ g_k⊗c
                        let (j, c_idx) = if from_right { (*p, *q) } else { (*q, *p) };
                        let s = sign(k, !from_right && parity(coalg.degree(c_idx)));
                        if from_right {
                            out[j].push((c_idx, kk, x * &s));
                        } else {
                            out[j].push((kk, c_idx, x * &s));
                        }
                    }
                }
                out
            })
        };
        DGComodule::new(coalg, basis, diff, transpose(&self.right, true), transpose(&self.left, false))
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn coalgebras_are_bicomodules() {
        for c in [sphere(), aff1(), words2()] {
            let m = DGComodule::from_coalgebra(&c);
            let rebuilt = DGComodule::new(
                &c,
                m.basis.clone(),
                m.diff.clone(),
                m.left.clone(),
                m.right.clone(),
            );
            assert_eq!(rebuilt.unwrap(), m);
        }
    }

    #[test]
    fn duals_are_bicomodules() {
        for c in [sphere(), aff1(), words2()] {
            let m = DGComodule::from_coalgebra(&c);
            let d = m.dual(&c, m.max_weight()).unwrap();
            assert_eq!(d.len(), c.len() + 1);
            assert_eq!(d.dual(&c, m.max_weight()).unwrap().len(), m.len());
        }
    }

    #[test]
    fn broken_coaction_is_rejected() {
        let c = aff1();
        let mut m = DGComodule::from_coalgebra(&c);
        m.left.as_mut().unwrap()[3].pop();
        let r = DGComodule::new(&c, m.basis, m.diff, m.left, m.right);
        assert!(matches!(r, Err(Error::StructureViolated(_))));
    }
}
