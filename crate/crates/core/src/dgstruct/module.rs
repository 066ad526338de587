//! Dg bimodules over an `Algebra`, addressed by monomials like the algebra.

use super::algebra::{collect_m, Algebra, DGAlgebra, MComb, Mono, WeightBound};
use super::coalgebra::{parity, sign};
use crate::error::{Error, Result};
use crate::linalg::ScalarKind;

pub trait Module {
    fn kind(&self) -> ScalarKind;
    /// Basis of weight ≤ `max_weight`.
    fn elements(&self, max_weight: u32) -> Vec<Mono>;
    fn degree(&self, m: &[u32]) -> i64;
    fn weight(&self, m: &[u32]) -> u32;
    fn diff(&self, m: &[u32]) -> MComb;
    fn act_left(&self, a: &[u32], m: &[u32]) -> MComb;
    fn act_right(&self, m: &[u32], a: &[u32]) -> MComb;
    fn label(&self, m: &[u32]) -> String;
    fn min_degree(&self) -> i64;
    fn weight_bound(&self, degree: i64) -> WeightBound;
}

/// A as a bimodule over itself.
pub struct Regular<'a>(pub &'a dyn Algebra);

impl Module for Regular<'_> {
    fn kind(&self) -> ScalarKind {
        self.0.kind()
    }
    fn elements(&self, max_weight: u32) -> Vec<Mono> {
        self.0.elements(max_weight)
    }
    fn degree(&self, m: &[u32]) -> i64 {
        self.0.degree(m)
    }
    fn weight(&self, m: &[u32]) -> u32 {
        self.0.weight(m)
    }
    fn diff(&self, m: &[u32]) -> MComb {
        self.0.diff(m)
    }
    fn act_left(&self, a: &[u32], m: &[u32]) -> MComb {
        self.0.mul(a, m)
    }
    fn act_right(&self, m: &[u32], a: &[u32]) -> MComb {
        self.0.mul(m, a)
    }
    fn label(&self, m: &[u32]) -> String {
        self.0.label(m)
    }
    fn min_degree(&self) -> i64 {
        self.0.min_degree()
    }
    fn weight_bound(&self, degree: i64) -> WeightBound {
        self.0.weight_bound(degree)
    }
}

/// The ground field, acted on through the augmentation.
pub struct TrivialModule(pub ScalarKind);

impl Module for TrivialModule {
    fn kind(&self) -> ScalarKind {
        self.0
    }
    fn elements(&self, _: u32) -> Vec<Mono> {
        vec![Vec::new()]
    }
    fn degree(&self, _: &[u32]) -> i64 {
        0
    }
    fn weight(&self, _: &[u32]) -> u32 {
        0
    }
    fn diff(&self, _: &[u32]) -> MComb {
        Vec::new()
    }
    fn act_left(&self, a: &[u32], m: &[u32]) -> MComb {
        if a.is_empty() {
            vec![(m.to_vec(), self.0.one())]
        } else {
            Vec::new()
        }
    }
    fn act_right(&self, m: &[u32], a: &[u32]) -> MComb {
        self.act_left(a, m)
    }
    fn label(&self, _: &[u32]) -> String {
        "1".into()
    }
    fn min_degree(&self) -> i64 {
        0
    }
    fn weight_bound(&self, degree: i64) -> WeightBound {
        WeightBound::scan([(0, 0)], degree)
    }
}

/// A* for a finite algebra. `[0]` is 1*, `[i+1]` is the dual of generator i;
/// weights are `top` − w.
pub struct DualModule<'a> {
    alg: &'a DGAlgebra,
    top: u32,
}

impl<'a> DualModule<'a> {
    pub fn new(alg: &'a DGAlgebra, top: u32) -> Self {
        DualModule { alg, top }
    }

    fn full(&self, j: u32) -> Mono {
        if j == 0 {
            Vec::new()
        } else {
            vec![j - 1]
        }
    }

    /// Coefficient pairing: Σ over b with f(x(b)) where `x` is a product.
    fn transpose(&self, f: &[u32], prod: impl Fn(&[u32]) -> MComb, s: impl Fn(&[u32]) -> bool) -> MComb {
        let target = self.full(f[0]);
        collect_m((0..=self.alg.len() as u32).flat_map(|b| {
            let bm = self.full(b);
            let odd = s(&bm);
            prod(&bm)
                .into_iter()
                .filter(|(m, _)| *m == target)
                .map(move |(_, x)| (vec![b], if odd { -&x } else { x }))
                .collect::<Vec<_>>()
        }))
    }
}

impl Module for DualModule<'_> {
    fn kind(&self) -> ScalarKind {
        self.alg.kind()
    }
    fn elements(&self, max_weight: u32) -> Vec<Mono> {
        (0..=self.alg.len() as u32)
            .map(|j| vec![j])
            .filter(|m| self.weight(m) <= max_weight)
            .collect()
    }
    fn degree(&self, m: &[u32]) -> i64 {
        -self.alg.degree(&self.full(m[0]))
    }
    fn weight(&self, m: &[u32]) -> u32 {
        self.top.saturating_sub(self.alg.weight(&self.full(m[0])))
    }
    /// (d f)(b) = −(−1)^{|f|} f(d b)
    fn diff(&self, m: &[u32]) -> MComb {
        let odd = !parity(self.degree(m));
        self.transpose(m, |b| self.alg.diff(b), |_| odd)
    }
    /// (a·f)(b) = (−1)^{|a|} f(b a)
    fn act_left(&self, a: &[u32], m: &[u32]) -> MComb {
        let odd = parity(self.alg.degree(a));
        self.transpose(m, |b| self.alg.mul(b, a), |_| odd)
    }
    /// (f·a)(b) = f(a b)
    fn act_right(&self, m: &[u32], a: &[u32]) -> MComb {
        self.transpose(m, |b| self.alg.mul(a, b), |_| false)
    }
    fn label(&self, m: &[u32]) -> String {
        format!("{}*", self.alg.label(&self.full(m[0])))
    }
    fn min_degree(&self) -> i64 {
        (0..=self.alg.len() as u32)
            .map(|j| self.degree(&[j]))
            .min()
            .unwrap_or(0)
    }
    fn weight_bound(&self, degree: i64) -> WeightBound {
        WeightBound::scan(
            (0..=self.alg.len() as u32).map(|j| (self.degree(&[j]), self.weight(&[j]))),
            degree,
        )
    }
}

/// Checks d² = 0, unit, associativity of both actions, their compatibility
/// and the Leibniz rules on all elements of weight ≤ `max_weight`.
pub fn check_module(alg: &dyn Algebra, m: &dyn Module, max_weight: u32) -> Result<()> {
    let k = m.kind();
    let bad = |s: &str| Err(Error::StructureViolated(s.to_string()));
    let apply = |v: &MComb, f: &dyn Fn(&[u32]) -> MComb| {
        collect_m(v.iter().flat_map(|(x, c)| f(x).into_iter().map(move |(y, e)| (y, c * &e))))
    };
    let avec = alg.elements(max_weight);
    let mvec = m.elements(max_weight);
    for x in &mvec {
        if !apply(&m.diff(x), &|y| m.diff(y)).is_empty() {
            return bad("module d² ≠ 0");
        }
        let one = vec![(x.clone(), k.one())];
        if m.act_left(&[], x) != one || m.act_right(x, &[]) != one {
            return bad("unit does not act as the identity");
        }
        for a in &avec {
            let ax = m.act_left(a, x);
            let xa = m.act_right(x, a);
            let sa = sign(k, parity(alg.degree(a)));
            let sx = sign(k, parity(m.degree(x)));
            let lhs = apply(&ax, &|y| m.diff(y));
            let rhs = collect_m(
                apply(&alg.diff(a), &|b| m.act_left(b, x)).into_iter().chain(
                    apply(&m.diff(x), &|y| m.act_left(a, y))
                        .into_iter()
                        .map(|(y, c)| (y, &c * &sa)),
                ),
            );
            if lhs != rhs {
                return bad("left Leibniz rule fails");
            }
            let lhs = apply(&xa, &|y| m.diff(y));
            let rhs = collect_m(
                apply(&m.diff(x), &|y| m.act_right(y, a)).into_iter().chain(
                    apply(&alg.diff(a), &|b| m.act_right(x, b))
                        .into_iter()
                        .map(|(y, c)| (y, &c * &sx)),
                ),
            );
            if lhs != rhs {
                return bad("right Leibniz rule fails");
            }
            for b in &avec {
                let ab = alg.mul(a, b);
                if apply(&m.act_left(b, x), &|y| m.act_left(a, y)) != apply(&ab, &|c| m.act_left(c, x)) {
                    return bad("left action is not associative");
                }
                if apply(&m.act_right(x, a), &|y| m.act_right(y, b)) != apply(&ab, &|c| m.act_right(x, c)) {
                    return bad("right action is not associative");
                }
                if apply(&ax, &|y| m.act_right(y, b)) != apply(&m.act_right(x, b), &|y| m.act_left(a, y)) {
                    return bad("actions do not commute");
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgstruct::Generator;
    use std::collections::BTreeMap;

    fn exterior() -> DGAlgebra {
        // Λ(e), |e| = 1: checks the odd signs
        let k = ScalarKind::Rational;
        DGAlgebra::new(k, vec![Generator::new("e", 1, 1)], BTreeMap::new(), vec![vec![]]).unwrap()
    }

    fn truncated_poly_with_d() -> DGAlgebra {
        // k[u]/u³ ⊗ Λ(e): |u| = 2, |e| = 1, d u = 0; basis e, u, ue, u², u²e
        let k = ScalarKind::Rational;
        let one = k.one();
        let gens = vec![
            Generator::new("e", 1, 1),
            Generator::new("u", 2, 1),
            Generator::new("ue", 3, 2),
            Generator::new("u2", 4, 2),
            Generator::new("u2e", 5, 3),
        ];
        let mut p = BTreeMap::new();
        p.insert((1, 0), vec![(2, one.clone())]);
        p.insert((0, 1), vec![(2, one.clone())]);
        p.insert((1, 1), vec![(3, one.clone())]);
        p.insert((3, 0), vec![(4, one.clone())]);
        p.insert((0, 3), vec![(4, one.clone())]);
        p.insert((1, 2), vec![(4, one.clone())]);
        p.insert((2, 1), vec![(4, one)]);
        DGAlgebra::new(k, gens, p, vec![vec![]; 5]).unwrap()
    }

    fn with_differential() -> DGAlgebra {
        // e (0), t (1), et (1) with d t = e
        let k = ScalarKind::Rational;
        let one = k.one();
        let mut p = BTreeMap::new();
        p.insert((0, 1), vec![(2, one.clone())]);
        p.insert((1, 0), vec![(2, one.clone())]);
        let gens = vec![Generator::new("e", 0, 1), Generator::new("t", 1, 1), Generator::new("et", 1, 2)];
        DGAlgebra::new(k, gens, p, vec![vec![], vec![(0, one)], vec![]]).unwrap()
    }

    #[test]
    fn regular_and_trivial_modules() {
        check_module(&with_differential(), &Regular(&with_differential()), 10).unwrap();
        let a = truncated_poly_with_d();
        check_module(&a, &Regular(&a), 10).unwrap();
        check_module(&a, &TrivialModule(a.kind()), 10).unwrap();
    }

    #[test]
    fn dual_modules() {
        for a in [exterior(), truncated_poly_with_d(), with_differential()] {
            check_module(&a, &DualModule::new(&a, 3), 10).unwrap();
        }
    }
}
