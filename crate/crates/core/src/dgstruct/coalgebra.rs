//! Conilpotent dg coalgebras with implicit counit/coaugmentation.
//!
//! Only the reduced part C̄ is stored. Each generator carries a filtration
//! weight ≥ 1; d and Δ̄ never raise it and Δ̄ splits it
//! (w(c′) + w(c″) ≤ w(c)), which makes conilpotency automatic and lets every
//! downstream complex be truncated to total weight ≤ L as a subcomplex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Scalar, ScalarKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub weight: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64, weight: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
            weight,
        }
    }
}

/// Linear combination of basis indices.
pub type Comb = Vec<(usize, Scalar)>;
/// Linear combination of tensor pairs of basis indices.
pub type Comb2 = Vec<(usize, usize, Scalar)>;

pub(crate) fn sign(kind: ScalarKind, odd: bool) -> Scalar {
    kind.from_i64(if odd { -1 } else { 1 })
}

pub(crate) fn parity(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

pub(crate) fn collect2(kind: ScalarKind, terms: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Comb2 {
    let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for (a, b, x) in terms {
        let e = acc.entry((a, b)).or_insert_with(|| kind.zero());
        *e += &x;
    }
    acc.into_iter()
        .filter(|e| !e.1.is_zero())
        .map(|((a, b), x)| (a, b, x))
        .collect()
}

pub(crate) fn collect3(
    kind: ScalarKind,
    terms: impl IntoIterator<Item = ((usize, usize, usize), Scalar)>,
) -> BTreeMap<(usize, usize, usize), Scalar> {
    let mut acc: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
    for (k, x) in terms {
        let e = acc.entry(k).or_insert_with(|| kind.zero());
        *e += &x;
    }
    acc.retain(|_, x| !x.is_zero());
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGCoalgebra {
    kind: ScalarKind,
    gens: Vec<Generator>,
    diff: Vec<Comb>,
    coproduct: Vec<Comb2>,
    curvature: Vec<Scalar>,
    cocommutative: bool,
}

impl DGCoalgebra {
    /// Validates and builds. `curvature` may be empty (meaning h = 0).
    pub fn new(
        kind: ScalarKind,
        gens: Vec<Generator>,
        diff: Vec<Comb>,
        coproduct: Vec<Comb2>,
        curvature: Vec<Scalar>,
        cocommutative: bool,
    ) -> Result<Self> {
        let n = gens.len();
        if diff.len() != n || coproduct.len() != n {
            return Err(Error::DimensionMismatch("coalgebra structure tables".into()));
        }
        let curvature = if curvature.is_empty() {
            vec![kind.zero(); n]
        } else {
            curvature
        };
        if curvature.len() != n {
            return Err(Error::DimensionMismatch("curvature".into()));
        }
        let c = DGCoalgebra {
            kind,
            gens,
            diff: diff
                .into_iter()
                .map(crate::linalg::normalize_vec)
                .collect(),
            coproduct: coproduct.into_iter().map(|t| collect2(kind, t)).collect(),
            curvature,
            cocommutative,
        };
        c.validate()?;
        Ok(c)
    }

    /// The ground field: C̄ = 0.
    pub fn trivial(kind: ScalarKind) -> Self {
        DGCoalgebra {
            kind,
            gens: Vec::new(),
            diff: Vec::new(),
            coproduct: Vec::new(),
            curvature: Vec::new(),
            cocommutative: true,
        }
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
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
    pub fn degree(&self, i: usize) -> i64 {
        self.gens[i].degree
    }
    pub fn weight(&self, i: usize) -> u32 {
        self.gens[i].weight
    }
    pub fn name(&self, i: usize) -> &str {
        &self.gens[i].name
    }
    pub fn d(&self, i: usize) -> &Comb {
        &self.diff[i]
    }
    pub fn delta(&self, i: usize) -> &Comb2 {
        &self.coproduct[i]
    }
    pub fn h(&self, i: usize) -> &Scalar {
        &self.curvature[i]
    }
    pub fn is_cocommutative(&self) -> bool {
        self.cocommutative
    }
    pub fn max_weight(&self) -> u32 {
        self.gens.iter().map(|g| g.weight).max().unwrap_or(0)
    }
    pub fn has_curvature(&self) -> bool {
        self.curvature.iter().any(|x| !x.is_zero())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        let bad = |s: String| Err(Error::StructureViolated(s));
        for i in 0..n {
            let (deg, w) = (self.degree(i), self.weight(i));
            if w == 0 {
                return Err(Error::NotConilpotent(format!(
                    "generator {} has weight 0",
                    self.name(i)
                )));
            }
            for (j, x) in &self.diff[i] {
                if *j >= n || x.kind() != self.kind {
                    return bad(format!("d({}) out of range", self.name(i)));
                }
                if self.degree(*j) != deg - 1 {
                    return Err(Error::GradingMismatch(format!("d({})", self.name(i))));
                }
                if self.weight(*j) > w {
                    return bad(format!("d({}) raises weight", self.name(i)));
                }
            }
            for (a, b, x) in &self.coproduct[i] {
                if *a >= n || *b >= n || x.kind() != self.kind {
                    return bad(format!("Δ({}) out of range", self.name(i)));
                }
                if self.degree(*a) + self.degree(*b) != deg {
                    return Err(Error::GradingMismatch(format!("Δ({})", self.name(i))));
                }
                if self.weight(*a) + self.weight(*b) > w {
                    return Err(Error::NotConilpotent(format!(
                        "Δ({}) does not split the weight",
                        self.name(i)
                    )));
                }
            }
            if !self.curvature[i].is_zero() && deg != 2 {
                return Err(Error::GradingMismatch(format!("h({})", self.name(i))));
            }
        }
        if let Some(i) = self.coassociativity_defect() {
            return bad(format!("coassociativity fails on {}", self.name(i)));
        }
        if let Some(i) = self.coderivation_defect() {
            return bad(format!("d is not a coderivation on {}", self.name(i)));
        }
        if let Some(i) = self.curvature_defect() {
            return bad(format!("d² ≠ curvature term on {}", self.name(i)));
        }
        if self.cocommutative {
            if let Some(i) = self.cocommutativity_defect() {
                return bad(format!("cocommutativity fails on {}", self.name(i)));
            }
        }
        Ok(())
    }

    /// First generator where (Δ̄⊗1)Δ̄ ≠ (1⊗Δ̄)Δ̄.
    pub fn coassociativity_defect(&self) -> Option<usize> {
        (0..self.len()).find(|&i| {
            let lhs = collect3(
                self.kind,
                self.coproduct[i].iter().flat_map(|(a, b, x)| {
                    self.coproduct[*a]
                        .iter()
                        .map(move |(p, q, y)| ((*p, *q, *b), x * y))
                }),
            );
            let rhs = collect3(
                self.kind,
                self.coproduct[i].iter().flat_map(|(a, b, x)| {
                    self.coproduct[*b]
                        .iter()
                        .map(move |(p, q, y)| ((*a, *p, *q), x * y))
                }),
            );
            lhs != rhs
        })
    }

    /// First generator where Δ̄d ≠ (d⊗1 + 1⊗d)Δ̄.
    pub fn coderivation_defect(&self) -> Option<usize> {
        (0..self.len()).find(|&i| {
            let lhs = collect2(
                self.kind,
                self.diff[i]
                    .iter()
                    .flat_map(|(j, x)| self.coproduct[*j].iter().map(move |(a, b, y)| (*a, *b, x * y))),
            );
            let mut terms = Vec::new();
            for (a, b, x) in &self.coproduct[i] {
                for (p, y) in &self.diff[*a] {
                    terms.push((*p, *b, x * y));
                }
                let s = sign(self.kind, parity(self.degree(*a)));
                for (q, y) in &self.diff[*b] {
                    terms.push((*a, *q, &(x * y) * &s));
                }
            }
            lhs != collect2(self.kind, terms)
        })
    }

    /// First generator where d²(c) ≠ Σ h(c′)c″ − c′h(c″).
    pub fn curvature_defect(&self) -> Option<usize> {
        (0..self.len()).find(|&i| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (j, x) in &self.diff[i] {
                for (k, y) in &self.diff[*j] {
                    *acc.entry(*k).or_insert_with(|| self.kind.zero()) += &(x * y);
                }
            }
            for (a, b, x) in &self.coproduct[i] {
                let t = x * &self.curvature[*a];
                *acc.entry(*b).or_insert_with(|| self.kind.zero()) += &t;
                let t = -&(x * &self.curvature[*b]);
                *acc.entry(*a).or_insert_with(|| self.kind.zero()) += &t;
            }
            acc.values().any(|x| !x.is_zero())
        })
    }

    /// First generator where swap∘Δ̄ ≠ Δ̄ (Koszul signs).
    pub fn cocommutativity_defect(&self) -> Option<usize> {
        (0..self.len()).find(|&i| {
            let swapped = collect2(
                self.kind,
                self.coproduct[i].iter().map(|(a, b, x)| {
                    let s = sign(self.kind, parity(self.degree(*a)) && parity(self.degree(*b)));
                    (*b, *a, x * &s)
                }),
            );
            swapped != self.coproduct[i]
        })
    }

    /// Smallest k with Δ̄^{(k)}(c_i) = 0, the k-fold iterated reduced coproduct.
    pub fn conilpotency_index(&self, i: usize) -> usize {
        self.conilpotency_index_capped(i, usize::MAX - 1)
    }

    /// Opposite coalgebra: Δ̄^op = Koszul swap of Δ̄.
    pub fn opposite(&self) -> DGCoalgebra {
        let mut c = self.clone();
        c.coproduct = self
            .coproduct
            .iter()
            .map(|t| {
                collect2(
                    self.kind,
                    t.iter().map(|(a, b, x)| {
                        let s = sign(self.kind, parity(self.degree(*a)) && parity(self.degree(*b)));
                        (*b, *a, x * &s)
                    }),
                )
            })
            .collect();
        c
    }

    /// Same coalgebra with structure constants reduced into another scalar kind.
    pub fn with_kind(&self, kind: ScalarKind) -> Result<DGCoalgebra> {
        let conv = |x: &Scalar| {
            kind.from_rational(&x.to_rational())
                .ok_or_else(|| Error::Input(format!("constant {x} not representable over {kind}")))
        };
        let diff = self
            .diff
            .iter()
            .map(|d| d.iter().map(|(j, x)| Ok((*j, conv(x)?))).collect())
            .collect::<Result<Vec<Comb>>>()?;
        let coproduct = self
            .coproduct
            .iter()
            .map(|t| t.iter().map(|(a, b, x)| Ok((*a, *b, conv(x)?))).collect())
            .collect::<Result<Vec<Comb2>>>()?;
        let curvature = self.curvature.iter().map(conv).collect::<Result<Vec<_>>>()?;
        DGCoalgebra::new(kind, self.gens.clone(), diff, coproduct, curvature, self.cocommutative)
    }

    /// Basis renumbering: generator i becomes perm[i].
    pub fn permuted(&self, perm: &[usize]) -> Result<DGCoalgebra> {
        let n = self.len();
        let mut gens = vec![Generator::new("", 0, 1); n];
        let mut diff = vec![Vec::new(); n];
        let mut coproduct = vec![Vec::new(); n];
        let mut curvature = vec![self.kind.zero(); n];
        for i in 0..n {
            gens[perm[i]] = self.gens[i].clone();
            diff[perm[i]] = self.diff[i].iter().map(|(j, x)| (perm[*j], x.clone())).collect();
            coproduct[perm[i]] = self.coproduct[i]
                .iter()
                .map(|(a, b, x)| (perm[*a], perm[*b], x.clone()))
                .collect();
            curvature[perm[i]] = self.curvature[i].clone();
        }
        DGCoalgebra::new(self.kind, gens, diff, coproduct, curvature, self.cocommutative)
    }

    /// The chain complex of C = k ⊕ C̄ (unit in degree 0, labelled "1").
    pub fn chain_complex(&self) -> Result<crate::complexes::ChainComplex> {
        let basis = crate::complexes::LabeledBasis::new(
            std::iter::once((None, 0i64, 0u32))
                .chain((0..self.len()).map(|i| (Some(i), self.degree(i), self.weight(i)))),
        );
        basis.complex(
            self.kind,
            |k| k.map_or("1".to_string(), |i| self.name(i).to_string()),
            |k| match k {
                None => Vec::new(),
                Some(i) => self.diff[*i].iter().map(|(j, x)| (Some(*j), x.clone())).collect(),
            },
        )
    }
}

/// Coradical weights computed from the iterated coproduct, for inputs that
/// do not declare weights.
pub fn coradical_weights(kind: ScalarKind, gens: &[Generator], coproduct: &[Comb2]) -> Vec<u32> {
    let probe = DGCoalgebra {
        kind,
        gens: gens.iter().map(|g| Generator::new(g.name.clone(), g.degree, 1)).collect(),
        diff: vec![Vec::new(); gens.len()],
        coproduct: coproduct.iter().map(|t| collect2(kind, t.clone())).collect(),
        curvature: vec![kind.zero(); gens.len()],
        cocommutative: false,
    };
    (0..gens.len())
        .map(|i| probe.conilpotency_index_capped(i, gens.len() + 2) as u32)
        .collect()
}

impl DGCoalgebra {
    fn conilpotency_index_capped(&self, i: usize, cap: usize) -> usize {
        let mut level: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        level.insert(vec![i], self.kind.one());
        let mut k = 0;
        while !level.is_empty() && k <= cap {
            k += 1;
            let mut next: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
            for (word, x) in &level {
                let last = *word.last().expect("nonempty");
                for (a, b, y) in &self.coproduct[last] {
                    let mut w = word[..word.len() - 1].to_vec();
                    w.push(*a);
                    w.push(*b);
                    *next.entry(w).or_insert_with(|| self.kind.zero()) += &(x * y);
                }
            }
            next.retain(|_, x| !x.is_zero());
            level = next;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarKind {
        ScalarKind::Rational
    }

    /// Reduced model of S²: one class in degree 2.
    fn sphere_model() -> DGCoalgebra {
        DGCoalgebra::new(
            q(),
            vec![Generator::new("s", 2, 1)],
            vec![vec![]],
            vec![vec![]],
            vec![],
            true,
        )
        .unwrap()
    }

    /// Divided powers on a degree-2 class: Δ̄ γ₂ = γ₁⊗γ₁.
    fn divided_powers() -> DGCoalgebra {
        DGCoalgebra::new(
            q(),
            vec![Generator::new("g1", 2, 1), Generator::new("g2", 4, 2)],
            vec![vec![], vec![]],
            vec![vec![], vec![(0, 0, q().one())]],
            vec![],
            true,
        )
        .unwrap()
    }

    #[test]
    fn conilpotency_indices() {
        let c = divided_powers();
        assert_eq!(c.conilpotency_index(0), 1);
        assert_eq!(c.conilpotency_index(1), 2);
        assert!(sphere_model().coassociativity_defect().is_none());
    }

    #[test]
    fn rejects_weight_zero_and_bad_grading() {
        let err = DGCoalgebra::new(
            q(),
            vec![Generator::new("a", 1, 0)],
            vec![vec![]],
            vec![vec![]],
            vec![],
            false,
        );
        assert!(matches!(err, Err(Error::NotConilpotent(_))));
        let err = DGCoalgebra::new(
            q(),
            vec![Generator::new("a", 1, 1), Generator::new("b", 3, 2)],
            vec![vec![], vec![]],
            vec![vec![], vec![(0, 0, q().one())]],
            vec![],
            false,
        );
        assert!(matches!(err, Err(Error::GradingMismatch(_))));
    }

    #[test]
    fn cocommutativity_sign() {
        // Δ̄ z = x⊗y + y⊗x with |x| = |y| = 1 is not cocommutative;
        // x⊗y − y⊗x is.
        let gens = vec![
            Generator::new("x", 1, 1),
            Generator::new("y", 1, 1),
            Generator::new("z", 2, 2),
        ];
        let bad = DGCoalgebra::new(
            q(),
            gens.clone(),
            vec![vec![]; 3],
            vec![vec![], vec![], vec![(0, 1, q().one()), (1, 0, q().one())]],
            vec![],
            true,
        );
        assert!(bad.is_err());
        let good = DGCoalgebra::new(
            q(),
            gens,
            vec![vec![]; 3],
            vec![vec![], vec![], vec![(0, 1, q().one()), (1, 0, q().from_i64(-1))]],
            vec![],
            true,
        );
        assert!(good.is_ok());
    }

    #[test]
    fn coradical_weights_of_divided_powers() {
        let c = divided_powers();
        let w = coradical_weights(q(), c.gens(), &[vec![], vec![(0, 0, q().one())]]);
        assert_eq!(w, vec![1, 2]);
    }
}
