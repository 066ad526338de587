//! Truncated cobar and bar constructions, their universal twisting cochains
//! and the counit resolution.
//!
//! Cobar words [c₁|…|c_k] have degree Σ(|cᵢ| − 1) and weight Σ w(cᵢ); the
//! differential is the derivation with
//! d[c] = −[dc] − Σ(−1)^{|c′|}[c′|c″] − h(c)·1,
//! so τ(c) = [c] satisfies the Maurer–Cartan equation on the nose. It never
//! raises weight, so the weight-≤L part is a subcomplex.

use std::collections::{BTreeMap, BTreeSet};

use crate::complexes::{ChainComplex, ChainMap, LabeledBasis};
use crate::dgstruct::{
    collect_m, parity, sign, Algebra, Comb, Comb2, DGAlgebra, DGCoalgebra, DGComodule, Factor,
    Generator, MComb, Module, Mono, Regular, TwistedTensor, TwistingCochain, WeightBound,
};
use crate::error::{Error, Result};
use crate::linalg::ScalarKind;

/// The cobar algebra ΩC on words in the generators of C̄.
#[derive(Clone, Debug)]
pub struct Cobar {
    coalg: DGCoalgebra,
}

impl Cobar {
    pub fn new(coalg: &DGCoalgebra) -> Result<Self> {
        if let Some(i) = (0..coalg.len()).find(|&i| coalg.degree(i) < 1) {
            return Err(Error::GradingMismatch(format!(
                "cobar letter {} would have negative degree",
                coalg.name(i)
            )));
        }
        Ok(Cobar {
            coalg: coalg.clone(),
        })
    }

    pub fn coalgebra(&self) -> &DGCoalgebra {
        &self.coalg
    }

    fn letter_degree(&self, c: u32) -> i64 {
        self.coalg.degree(c as usize) - 1
    }

    /// d on a single letter, as words.
    fn d_letter(&self, c: usize) -> MComb {
        let k = self.coalg.kind();
        let mut terms: MComb = self
            .coalg
            .d(c)
            .iter()
            .map(|(j, x)| (vec![*j as u32], -x))
            .collect();
        for (p, q, x) in self.coalg.delta(c) {
            let s = -&sign(k, parity(self.coalg.degree(*p)));
            terms.push((vec![*p as u32, *q as u32], &s * x));
        }
        if !self.coalg.h(c).is_zero() {
            terms.push((Vec::new(), -self.coalg.h(c)));
        }
        terms
    }

    /// The weight-≤`cap` part as a chain complex, with completeness recorded.
    pub fn complex(&self, cap: u32) -> Result<ChainComplex> {
        let basis = LabeledBasis::new(
            self.elements(cap)
                .into_iter()
                .map(|w| {
                    let (d, wt) = (self.degree(&w), self.weight(&w));
                    (w, d, wt)
                }),
        );
        let mut c = basis.complex(self.kind(), |w| self.label(w), |w| self.diff(w))?;
        let top = c.degrees().last().copied().unwrap_or(0);
        c.set_complete(Some(self.complete_degrees(cap, -2, top + 2 * cap as i64 + 4)));
        Ok(c)
    }

    pub fn complete_degrees(&self, cap: u32, lo: i64, hi: i64) -> BTreeSet<i64> {
        (lo..=hi)
            .filter(|&m| self.weight_bound(m).within(cap))
            .collect()
    }
}

impl Algebra for Cobar {
    fn kind(&self) -> ScalarKind {
        self.coalg.kind()
    }
    fn degree(&self, a: &[u32]) -> i64 {
        a.iter().map(|&c| self.letter_degree(c)).sum()
    }
    fn weight(&self, a: &[u32]) -> u32 {
        a.iter().map(|&c| self.coalg.weight(c as usize)).sum()
    }
    fn elements(&self, max_weight: u32) -> Vec<Mono> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![(Vec::new(), 0u32)];
        while let Some((w, wt)) = frontier.pop() {
            for c in 0..self.coalg.len() {
                let cw = self.coalg.weight(c);
                if wt + cw <= max_weight {
                    let mut next = w.clone();
                    next.push(c as u32);
                    out.push(next.clone());
                    frontier.push((next, wt + cw));
                }
            }
        }
        out.sort();
        out
    }
    fn mul(&self, a: &[u32], b: &[u32]) -> MComb {
        vec![([a, b].concat(), self.kind().one())]
    }
    fn diff(&self, a: &[u32]) -> MComb {
        let k = self.kind();
        let mut terms = Vec::new();
        let mut pre = 0i64;
        for (i, &c) in a.iter().enumerate() {
            let s = sign(k, parity(pre));
            for (w, x) in self.d_letter(c as usize) {
                terms.push(([&a[..i], &w[..], &a[i + 1..]].concat(), &s * &x));
            }
            pre += self.letter_degree(c);
        }
        collect_m(terms)
    }
    fn label(&self, a: &[u32]) -> String {
        if a.is_empty() {
            return "1".into();
        }
        let names: Vec<&str> = a.iter().map(|&c| self.coalg.name(c as usize)).collect();
        format!("[{}]", names.join("|"))
    }
    fn min_degree(&self) -> i64 {
        0
    }
    fn weight_bound(&self, degree: i64) -> WeightBound {
        if degree < 0 {
            return WeightBound::Empty;
        }
        let letters: Vec<(usize, u32)> = (0..self.coalg.len() as u32)
            .map(|c| (self.letter_degree(c) as usize, self.coalg.weight(c as usize)))
            .collect();
        let has_zero = letters.iter().any(|l| l.0 == 0);
        let d = degree as usize;
        // best[m]: max weight of a word of degree m using positive-degree letters
        let mut best: Vec<Option<u32>> = vec![None; d + 1];
        best[0] = Some(0);
        for m in 1..=d {
            best[m] = letters
                .iter()
                .filter(|l| l.0 > 0 && l.0 <= m)
                .filter_map(|l| best[m - l.0].map(|w| w + l.1))
                .max();
        }
        match best[d] {
            None => WeightBound::Empty,
            Some(_) if has_zero => WeightBound::Unbounded,
            Some(w) => WeightBound::Max(w),
        }
    }
    fn reduced_weight_bound(&self, degree: i64) -> WeightBound {
        let has_zero = (0..self.coalg.len() as u32).any(|c| self.letter_degree(c) == 0);
        match degree {
            0 if has_zero => WeightBound::Unbounded,
            0 => WeightBound::Empty,
            _ => self.weight_bound(degree),
        }
    }
}

/// τ(c) = [c].
pub fn universal_tau_cobar(c: &DGCoalgebra) -> TwistingCochain {
    TwistingCochain::new(
        (0..c.len())
            .map(|i| vec![(vec![i as u32], c.kind().one())])
            .collect(),
    )
}

/// The bar coalgebra on words of length ≤ `cap` in the generators of Ā.
/// Letters have degree |a| + 1; a word's weight is the sum of its letters'.
#[derive(Clone, Debug)]
pub struct Bar {
    coalg: DGCoalgebra,
    words: Vec<Vec<usize>>,
}

impl Bar {
    pub fn coalgebra(&self) -> &DGCoalgebra {
        &self.coalg
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn index_of(&self, word: &[usize]) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    /// τ[a] = a, zero on longer words.
    pub fn universal_tau(&self) -> TwistingCochain {
        let k = self.coalg.kind();
        TwistingCochain::new(
            self.words
                .iter()
                .map(|w| match w.as_slice() {
                    [a] => vec![(vec![*a as u32], k.one())],
                    _ => Vec::new(),
                })
                .collect(),
        )
    }
}

pub fn bar(a: &DGAlgebra, cap: usize) -> Result<Bar> {
    let k = a.kind();
    let n = a.len();
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..cap {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..n).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    let index: BTreeMap<&[usize], usize> =
        words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let sdeg = |x: usize| a.gen_degree(x) + 1;
    let gens = words
        .iter()
        .map(|w| {
            let names: Vec<&str> = w.iter().map(|&x| a.gens()[x].name.as_str()).collect();
            Generator::new(
                format!("[{}]", names.join("|")),
                w.iter().map(|&x| sdeg(x)).sum(),
                w.iter().map(|&x| a.gen_weight(x)).sum(),
            )
        })
        .collect();
    let mut diff: Vec<Comb> = Vec::with_capacity(words.len());
    let mut coproduct: Vec<Comb2> = Vec::with_capacity(words.len());
    for w in &words {
        let mut terms = Vec::new();
        let mut pre = 0i64;
        for i in 0..w.len() {
            // −(−1)^{ε_i} [… d a_i …]
            let s = -&sign(k, parity(pre));
            for (y, x) in a.d(w[i]) {
                let mut v = w.clone();
                v[i] = *y;
                terms.push((index[v.as_slice()], &s * x));
            }
            pre += sdeg(w[i]);
            // −(−1)^{ε_{i+1}} [… a_i a_{i+1} …]
            if i + 1 < w.len() {
                let s = -&sign(k, parity(pre));
                for (y, x) in a.product(w[i], w[i + 1]) {
                    let v = [&w[..i], &[*y][..], &w[i + 2..]].concat();
                    terms.push((index[v.as_slice()], &s * x));
                }
            }
        }
        diff.push(terms);
        coproduct.push(
            (1..w.len())
                .map(|i| (index[&w[..i]], index[&w[i..]], k.one()))
                .collect(),
        );
    }
    let coalg = DGCoalgebra::new(k, gens, diff, coproduct, Vec::new(), false)?;
    Ok(Bar { coalg, words })
}

/// Degrees in [lo, hi] that are not trusted in `c`.
fn untrusted(c: &ChainComplex, lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi)
        .filter(|&n| !(c.is_complete(n - 1) && c.is_complete(n) && c.is_complete(n + 1)))
        .collect()
}

/// The weight-≤`cap` part of a module as a complex.
pub fn module_complex(m: &dyn Module, cap: u32) -> Result<ChainComplex> {
    let basis = LabeledBasis::new(m.elements(cap).into_iter().map(|x| {
        let (d, w) = (m.degree(&x), m.weight(&x));
        (x, d, w)
    }));
    let mut c = basis.complex(m.kind(), |x| m.label(x), |x| m.diff(x))?;
    let degs = c.degrees();
    let (lo, hi) = (
        degs.first().copied().unwrap_or(0) - 2,
        degs.last().copied().unwrap_or(0) + 2 * cap as i64 + 4,
    );
    c.set_complete(Some(
        (lo..=hi).filter(|&n| m.weight_bound(n).within(cap)).collect(),
    ));
    Ok(c)
}

/// Ω ⊗ C ⊗ M → M, a⊗e⊗m ↦ ε(e)·a·m, on weight ≤ `cap`.
///
/// With `strict`, every degree of the window must be trusted in both
/// complexes; otherwise the map is returned as a filtered-level statement.
pub fn counit_resolution(
    c: &DGCoalgebra,
    omega: &Cobar,
    m: &dyn Module,
    cap: u32,
    window: (i64, i64),
    strict: bool,
) -> Result<ChainMap> {
    let tau = universal_tau_cobar(c);
    let cc = DGComodule::from_coalgebra(c);
    let reg = Regular(omega);
    let tt = TwistedTensor::new(
        c,
        omega,
        &tau,
        vec![Factor::Module(&reg), Factor::Comodule(&cc), Factor::Module(m)],
        false,
        cap,
    )?;
    let source = tt.complex()?;
    let target = module_complex(m, cap)?;
    if strict {
        let bad: Vec<i64> = untrusted(&source, window.0, window.1)
            .into_iter()
            .chain(untrusted(&target, window.0, window.1))
            .collect();
        if !bad.is_empty() {
            return Err(Error::WindowNotTrusted {
                lo: window.0,
                hi: window.1,
                level: cap,
            });
        }
    }
    let target_basis = LabeledBasis::new(m.elements(cap).into_iter().map(|x| {
        let (d, w) = (m.degree(&x), m.weight(&x));
        (x, d, w)
    }));
    let comps = tt.basis().map_to(&target_basis, c.kind(), 0, false, |key| {
        if key[1][0] != 0 {
            return Vec::new();
        }
        m.act_left(&key[0], &key[2])
    })?;
    let mut f = ChainMap::new(source, target, 0);
    for (n, mat) in comps {
        f.set_component(n, mat)?;
    }
    f.check()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::is_quasi_iso;
    use crate::dgstruct::fixtures::*;
    use crate::dgstruct::{check_mc, twisted_tensor, twisted_tensor_two_sided, Side, TrivialModule};
    use std::collections::BTreeMap;

    #[test]
    fn cobar_squares_to_zero() {
        for c in [sphere(), aff1(), words2()] {
            let om = Cobar::new(&c).unwrap();
            let cx = om.complex(4).unwrap();
            cx.check_square_zero().unwrap();
            assert!(check_mc(&c, &om, &universal_tau_cobar(&c)));
        }
    }

    #[test]
    fn sphere_loop_homology() {
        let om = Cobar::new(&sphere()).unwrap();
        let h = om.complex(5).unwrap().homology(0, 4).unwrap();
        assert_eq!(h.ranks(0, 4), vec![1; 5]);
        assert!(h.degrees.values().all(|e| e.trusted));
    }

    #[test]
    fn aff1_pbw_count() {
        let om = Cobar::new(&aff1()).unwrap();
        let h = om.complex(3).unwrap().homology(0, 0).unwrap();
        assert_eq!(h.rank(0), 10);
        assert!(!h.degrees[&0].trusted);
    }

    #[test]
    fn wrong_sign_tau_fails_mc() {
        let c = aff1();
        let om = Cobar::new(&c).unwrap();
        let tau = universal_tau_cobar(&c).scaled(&ScalarKind::Rational.from_i64(-1));
        assert!(!check_mc(&c, &om, &tau));
    }

    fn dual_numbers() -> DGAlgebra {
        let k = ScalarKind::Rational;
        DGAlgebra::new(k, vec![Generator::new("x", 0, 1)], BTreeMap::new(), vec![vec![]]).unwrap()
    }

    fn exterior() -> DGAlgebra {
        let k = ScalarKind::Rational;
        DGAlgebra::new(k, vec![Generator::new("e", 1, 1)], BTreeMap::new(), vec![vec![]]).unwrap()
    }

    #[test]
    fn bar_of_dual_numbers() {
        let a = dual_numbers();
        let b = bar(&a, 5).unwrap();
        let cx = b.coalgebra().chain_complex().unwrap();
        assert_eq!(cx.homology_all().unwrap().ranks(0, 5), vec![1; 6]);
        assert!(check_mc(b.coalgebra(), &a, &b.universal_tau()));
    }

    #[test]
    fn bar_with_products() {
        // k[u]/u³ with |u| = 2 has nonzero products and odd-free signs;
        // the exterior algebra exercises odd letters.
        let k = ScalarKind::Rational;
        let mut p = BTreeMap::new();
        p.insert((0, 0), vec![(1, k.one())]);
        let a = DGAlgebra::new(
            k,
            vec![Generator::new("u", 2, 1), Generator::new("u2", 4, 2)],
            p,
            vec![vec![], vec![]],
        )
        .unwrap();
        for alg in [a, exterior()] {
            let b = bar(&alg, 3).unwrap();
            assert!(check_mc(b.coalgebra(), &alg, &b.universal_tau()));
        }
        let b = bar(&exterior(), 3).unwrap();
        let h = b.coalgebra().chain_complex().unwrap().homology_all().unwrap();
        assert_eq!(h.ranks(0, 6), vec![1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn twisted_tensors_square_to_zero() {
        for c in [sphere(), aff1(), words2()] {
            let om = Cobar::new(&c).unwrap();
            let tau = universal_tau_cobar(&c);
            let cc = DGComodule::from_coalgebra(&c);
            let reg = Regular(&om);
            for side in [Side::Left, Side::Right] {
                let cx = twisted_tensor(side, &c, &cc, &om, &tau, &reg, 4).unwrap();
                cx.check_square_zero().unwrap();
            }
            twisted_tensor_two_sided(&c, &cc, &om, &tau, 4)
                .unwrap()
                .check_square_zero()
                .unwrap();
            let dual = cc.dual(&c, cc.max_weight()).unwrap();
            twisted_tensor_two_sided(&c, &dual, &om, &tau, 4)
                .unwrap()
                .check_square_zero()
                .unwrap();
        }
    }

    #[test]
    fn one_sided_resolution_is_acyclic() {
        let c = sphere();
        let om = Cobar::new(&c).unwrap();
        let tau = universal_tau_cobar(&c);
        let cc = DGComodule::from_coalgebra(&c);
        let cx = twisted_tensor(Side::Left, &c, &cc, &om, &tau, &Regular(&om), 5).unwrap();
        let h = cx.homology(0, 3).unwrap();
        assert_eq!(h.ranks(0, 3), vec![1, 0, 0, 0]);
    }

    #[test]
    fn counit_resolution_sphere() {
        let c = sphere();
        let om = Cobar::new(&c).unwrap();
        let f = counit_resolution(&c, &om, &TrivialModule(c.kind()), 5, (0, 3), true).unwrap();
        assert!(is_quasi_iso(&f, 0, 3).unwrap());
        let f = counit_resolution(&c, &om, &Regular(&om), 5, (0, 3), true).unwrap();
        assert!(is_quasi_iso(&f, 0, 3).unwrap());
    }

    #[test]
    fn counit_resolution_words() {
        let c = words2();
        let om = Cobar::new(&c).unwrap();
        let f = counit_resolution(&c, &om, &Regular(&om), 4, (0, 2), false).unwrap();
        f.check().unwrap();
    }
}
