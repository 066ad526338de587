//! Structural identities on the built-in and randomized structures.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::barcobar::{bar, universal_tau_cobar, Cobar};
use crate::cyclic::{cohochschild_complex, hochschild_complex};
use crate::dgstruct::{check_mc, Comb, Comb2, DGAlgebra, DGCoalgebra, Generator};
use crate::error::Result;
use crate::input::{builtin_coalgebra, builtin_frobenius};
use crate::lie::{ce_coalgebra, ce_squares_to_zero, LieAlgebra};
use crate::linalg::{Scalar, ScalarKind};
use crate::spaces::{chains_coalgebra, reduce_by_tree, SimplicialComplex};

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

const CAP: u32 = 3;

/// d² = 0, coassociativity, coderivation, MC for the universal twisting
/// cochain into the cobar, and the mixed-complex identities on coHH.
pub fn coalgebra_identities(c: &DGCoalgebra) -> Result<Vec<&'static str>> {
    let mut bad = Vec::new();
    if c.chain_complex()?.check_square_zero().is_err() {
        bad.push("d^2");
    }
    if c.coassociativity_defect().is_some() {
        bad.push("coassociativity");
    }
    if c.coderivation_defect().is_some() {
        bad.push("coderivation");
    }
    let om = Cobar::new(c)?;
    if om.complex(CAP)?.check_square_zero().is_err() {
        bad.push("cobar d^2");
    }
    if !check_mc(c, &om, &universal_tau_cobar(c)) {
        bad.push("MC");
    }
    if cohochschild_complex(c, CAP).and_then(|m| m.check()).is_err() {
        bad.push("mixed complex");
    }
    Ok(bad)
}

/// Bar d², MC for the universal twisting cochain into A, Hochschild mixed identities.
pub fn algebra_identities(a: &DGAlgebra) -> Result<Vec<&'static str>> {
    let b = bar(a, CAP as usize)?;
    let mut bad = coalgebra_identities(b.coalgebra())?;
    if !check_mc(b.coalgebra(), a, &b.universal_tau()) {
        bad.push("bar MC");
    }
    if hochschild_complex(a, CAP).and_then(|m| m.check()).is_err() {
        bad.push("Hochschild mixed complex");
    }
    Ok(bad)
}

fn outcome(name: String, r: Result<Vec<&'static str>>) -> Outcome {
    match r {
        Ok(bad) if bad.is_empty() => Outcome { name, passed: true, detail: "ok".into() },
        Ok(bad) => Outcome { name, passed: false, detail: bad.join(", ") },
        Err(e) => Outcome { name, passed: false, detail: e.to_string() },
    }
}

/// Letters a₀, a₁ with random degrees; words of length ≤ 2 (rank ≤ 6).
/// d a₁ = t a₀ when the degrees allow it, extended by the Leibniz rule.
struct Words {
    degrees: Vec<i64>,
    words: Vec<Vec<usize>>,
    t: Option<i64>,
}

impl Words {
    fn random(rng: &mut ChaCha8Rng, min_degree: i64) -> Self {
        let n = rng.random_range(1..=2usize);
        let degrees: Vec<i64> = (0..n).map(|_| rng.random_range(min_degree..=min_degree + 2)).collect();
        let mut words: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for i in 0..n {
            for j in 0..n {
                words.push(vec![i, j]);
            }
        }
        let t = (n == 2 && degrees[1] == degrees[0] + 1).then(|| rng.random_range(1..=3i64));
        Words { degrees, words, t }
    }

    fn degree(&self, w: &[usize]) -> i64 {
        w.iter().map(|&i| self.degrees[i]).sum()
    }

    fn index(&self, w: &[usize]) -> Option<usize> {
        self.words.iter().position(|v| v == w)
    }

    fn gens(&self) -> Vec<Generator> {
        self.words
            .iter()
            .map(|w| Generator::new(w.iter().map(|i| format!("a{i}")).collect::<String>(), self.degree(w), w.len() as u32))
            .collect()
    }

    fn diff(&self, kind: ScalarKind) -> Vec<Comb> {
        let Some(t) = self.t else { return vec![Vec::new(); self.words.len()] };
        self.words
            .iter()
            .map(|w| {
                let mut out = Vec::new();
                let mut sign = 1;
                for (p, &l) in w.iter().enumerate() {
                    if l == 1 {
                        let mut v = w.clone();
                        v[p] = 0;
                        out.push((self.index(&v).expect("word"), kind.from_i64(sign * t)));
                    }
                    if self.degrees[l] % 2 != 0 {
                        sign = -sign;
                    }
                }
                out
            })
            .collect()
    }

    fn coalgebra(&self, kind: ScalarKind) -> Result<DGCoalgebra> {
        let coproduct: Vec<Comb2> = self
            .words
            .iter()
            .map(|w| match w.len() {
                2 => vec![(w[0], w[1], kind.one())],
                _ => Vec::new(),
            })
            .collect();
        DGCoalgebra::new(kind, self.gens(), self.diff(kind), coproduct, Vec::new(), false)
    }

    fn algebra(&self, kind: ScalarKind) -> Result<DGAlgebra> {
        let mut product = BTreeMap::new();
        for i in 0..self.degrees.len() {
            for j in 0..self.degrees.len() {
                product.insert((i, j), vec![(self.index(&[i, j]).expect("word"), kind.one())]);
            }
        }
        DGAlgebra::new(kind, self.gens(), product, self.diff(kind))
    }
}

/// k[x]/x^m with x in an even degree.
fn truncated_polynomial(kind: ScalarKind, m: usize, degree: i64) -> Result<DGAlgebra> {
    let gens = (1..m).map(|k| Generator::new(format!("x{k}"), degree * k as i64, k as u32)).collect();
    let mut product = BTreeMap::new();
    for i in 1..m {
        for j in 1..m {
            if i + j < m {
                product.insert((i - 1, j - 1), vec![(i + j - 1, kind.one())]);
            }
        }
    }
    DGAlgebra::new(kind, gens, product, vec![Vec::new(); m - 1])
}

/// A Lie algebra in the basis y_a = Σ P_ai x_i for a random unimodular integer P.
pub fn random_basis(g: &LieAlgebra, rng: &mut ChaCha8Rng) -> LieAlgebra {
    let n = g.dim();
    let kind = g.kind();
    let mut p: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut q = p.clone();
    for _ in 0..2 * n {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i == j {
            continue;
        }
        let t = rng.random_range(-2..=2i64);
        // P ← E P (row_i += t row_j), Q ← Q E⁻¹ (col_j −= t col_i)
        for k in 0..n {
            p[i][k] += t * p[j][k];
            q[k][j] -= t * q[k][i];
        }
    }
    let s = |x: i64| kind.from_i64(x);
    let mut brackets = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut val: BTreeMap<usize, Scalar> = BTreeMap::new();
            for i in 0..n {
                for j in 0..n {
                    let coef = p[a][i] * p[b][j];
                    if coef == 0 {
                        continue;
                    }
                    for (k, c) in g.bracket(i, j) {
                        for (cc, qv) in q[k].iter().enumerate() {
                            if *qv != 0 {
                                let e = val.entry(cc).or_insert_with(|| kind.zero());
                                *e += &(&c * &s(coef * qv));
                            }
                        }
                    }
                }
            }
            brackets.push((a, b, val.into_iter().collect()));
        }
    }
    LieAlgebra::new(kind, g.names().to_vec(), brackets).expect("basis change")
}

/// Strictly upper triangular 4×4 matrices.
pub fn n4(kind: ScalarKind) -> LieAlgebra {
    let idx = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let names = idx.iter().map(|(i, j)| format!("E{}{}", i + 1, j + 1)).collect();
    let mut brackets = Vec::new();
    for (a, &(i, j)) in idx.iter().enumerate() {
        for (b, &(k, l)) in idx.iter().enumerate() {
            if j == k {
                let c = idx.iter().position(|&e| e == (i, l)).expect("E_il");
                brackets.push((a, b, vec![(c, kind.one())]));
            }
        }
    }
    LieAlgebra::new(kind, names, brackets).expect("n4")
}

/// Lie algebras of dimension ≤ 4 the randomized checks draw from.
pub fn lie_pool(kind: ScalarKind) -> Vec<LieAlgebra> {
    vec![
        LieAlgebra::heisenberg(kind),
        LieAlgebra::sl2(kind),
        LieAlgebra::aff1(kind),
        LieAlgebra::abelian(kind, 2),
        LieAlgebra::abelian(kind, 3),
    ]
}

/// Built-ins first, then `count` randomized coalgebras, algebras and Lie algebras.
pub fn structural_suite(seed: u64, count: usize) -> Vec<Outcome> {
    let q = ScalarKind::Rational;
    let mut out = Vec::new();
    for name in ["sphere", "ce:heisenberg", "ce:sl2", "ce:aff1", "ce:abelian3", "chains:sphere2", "chains:torus7"] {
        let r = builtin_coalgebra(name, q).and_then(|c| coalgebra_identities(&c.expect("builtin")));
        out.push(outcome(format!("coalgebra {name}"), r));
    }
    let rp2 = reduce_by_tree(&SimplicialComplex::rp2_min(), 0).and_then(|m| chains_coalgebra(&m, ScalarKind::Prime(2)));
    out.push(outcome("coalgebra chains:rp2_min over F2".into(), rp2.and_then(|c| coalgebra_identities(&c))));
    for name in ["dual_numbers", "exterior"] {
        let (f, _) = builtin_frobenius(name, q).expect("builtin");
        out.push(outcome(format!("algebra {name}"), algebra_identities(&f.algebra)));
    }
    out.push(outcome("lie n4".into(), ce_coalgebra(&n4(q)).and_then(|c| coalgebra_identities(c.coalgebra()))));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = lie_pool(q);
    for i in 0..count {
        let (name, r) = match i % 4 {
            0 => {
                let w = Words::random(&mut rng, 1);
                (format!("random coalgebra {i} {:?}", w.degrees), w.coalgebra(q).and_then(|c| coalgebra_identities(&c)))
            }
            1 => {
                let w = Words::random(&mut rng, 0);
                (format!("random algebra {i} {:?}", w.degrees), w.algebra(q).and_then(|a| algebra_identities(&a)))
            }
            2 => {
                let m = rng.random_range(2..=5usize);
                let d = 2 * rng.random_range(0..=1i64);
                (format!("truncated polynomial {i} x^{m} in degree {d}"), truncated_polynomial(q, m, d).and_then(|a| algebra_identities(&a)))
            }
            _ => {
                let g = random_basis(&pool[rng.random_range(0..pool.len())], &mut rng);
                let r = ce_coalgebra(&g).and_then(|c| {
                    let mut bad = coalgebra_identities(c.coalgebra())?;
                    if !(g.jacobi_holds() && ce_squares_to_zero(&g)) {
                        bad.push("Jacobi");
                    }
                    Ok(bad)
                });
                (format!("random Lie basis {i}"), r)
            }
        };
        out.push(outcome(name, r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_a_few_random() {
        let out = structural_suite(7, 8);
        let bad: Vec<_> = out.iter().filter(|o| !o.passed).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn basis_change_keeps_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_basis(&LieAlgebra::sl2(ScalarKind::Rational), &mut rng);
        assert!(g.jacobi_holds());
        assert!(crate::lie::is_unimodular(&g));
        let a = random_basis(&LieAlgebra::aff1(ScalarKind::Rational), &mut rng);
        assert!(!crate::lie::is_unimodular(&a));
        assert!(n4(ScalarKind::Rational).jacobi_holds());
    }
}
