//! Twisting cochains and twisted tensor products.
//!
//! A twisted tensor product is a row of factors, each either an A-bimodule or
//! a finite C-comodule. Besides the Koszul-signed internal differentials,
//! every adjacent (comodule, module) pair gets x⊗m ↦ Σ (−1)^{|x₀|} x₀⊗τ(x₁)m
//! from the right coaction, and every (module, comodule) pair gets
//! m⊗y ↦ −Σ (−1)^{|m|} mτ(y₋₁)⊗y₀ from the left coaction. With
//! d_Aτ + τd_C + Σ(−1)^{|c′|}τ(c′)τ(c″) + h·1 = 0 these square to zero.

use std::collections::BTreeSet;

use super::algebra::{collect_m, Algebra, MComb, Mono, WeightBound};
use super::coalgebra::{parity, sign, DGCoalgebra};
use super::comodule::DGComodule;
use super::module::{Module, Regular};
use crate::complexes::{collect_terms, ChainComplex, LabeledBasis};
use crate::error::{Error, Result};
use crate::linalg::{Scalar, ScalarKind};

/// τ: C̄ → A of degree −1, one image per generator of C̄.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistingCochain {
    images: Vec<MComb>,
}

impl TwistingCochain {
    pub fn new(images: Vec<MComb>) -> Self {
        TwistingCochain {
            images: images.into_iter().map(collect_m).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        TwistingCochain {
            images: vec![Vec::new(); n],
        }
    }

    pub fn image(&self, i: usize) -> &MComb {
        &self.images[i]
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn scaled(&self, x: &Scalar) -> Self {
        TwistingCochain::new(
            self.images
                .iter()
                .map(|v| v.iter().map(|(m, y)| (m.clone(), x * y)).collect())
                .collect(),
        )
    }
}

/// First generator where the Maurer–Cartan identity fails, if any.
pub fn mc_defect(c: &DGCoalgebra, a: &dyn Algebra, tau: &TwistingCochain) -> Option<usize> {
    if tau.len() != c.len() {
        return Some(0);
    }
    let k = c.kind();
    (0..c.len()).find(|&i| {
        if tau.image(i).iter().any(|(m, _)| a.degree(m) != c.degree(i) - 1) {
            return true;
        }
        let mut terms: MComb = Vec::new();
        for (m, x) in tau.image(i) {
            terms.extend(a.diff(m).into_iter().map(|(n, y)| (n, x * &y)));
        }
        for (j, x) in c.d(i) {
            terms.extend(tau.image(*j).iter().map(|(n, y)| (n.clone(), x * y)));
        }
        for (p, q, x) in c.delta(i) {
            let s = &sign(k, parity(c.degree(*p))) * x;
            for (m1, y1) in tau.image(*p) {
                for (m2, y2) in tau.image(*q) {
                    let coeff = &(&s * y1) * y2;
                    terms.extend(a.mul(m1, m2).into_iter().map(|(n, z)| (n, &coeff * &z)));
                }
            }
        }
        if !c.h(i).is_zero() {
            terms.push((Vec::new(), c.h(i).clone()));
        }
        !collect_m(terms).is_empty()
    })
}

pub fn check_mc(c: &DGCoalgebra, a: &dyn Algebra, tau: &TwistingCochain) -> bool {
    mc_defect(c, a, tau).is_none()
}

pub enum Factor<'a> {
    Module(&'a dyn Module),
    Comodule(&'a DGComodule),
}

impl Factor<'_> {
    fn degree(&self, m: &[u32]) -> i64 {
        match self {
            Factor::Module(x) => x.degree(m),
            Factor::Comodule(x) => x.degree(m[0] as usize),
        }
    }

    fn weight(&self, m: &[u32]) -> u32 {
        match self {
            Factor::Module(x) => x.weight(m),
            Factor::Comodule(x) => x.weight(m[0] as usize),
        }
    }

    fn elements(&self, max_weight: u32) -> Vec<Mono> {
        match self {
            Factor::Module(x) => x.elements(max_weight),
            Factor::Comodule(x) => (0..x.len() as u32)
                .filter(|&i| x.weight(i as usize) <= max_weight)
                .map(|i| vec![i])
                .collect(),
        }
    }

    fn diff(&self, m: &[u32]) -> MComb {
        match self {
            Factor::Module(x) => x.diff(m),
            Factor::Comodule(x) => x
                .d(m[0] as usize)
                .iter()
                .map(|(j, y)| (vec![*j as u32], y.clone()))
                .collect(),
        }
    }

    fn label(&self, m: &[u32]) -> String {
        match self {
            Factor::Module(x) => x.label(m),
            Factor::Comodule(x) => x.name(m[0] as usize).to_string(),
        }
    }

    fn min_degree(&self) -> i64 {
        match self {
            Factor::Module(x) => x.min_degree(),
            Factor::Comodule(x) => (0..x.len()).map(|i| x.degree(i)).min().unwrap_or(0),
        }
    }

    fn weight_bound(&self, degree: i64) -> WeightBound {
        match self {
            Factor::Module(x) => x.weight_bound(degree),
            Factor::Comodule(x) => {
                WeightBound::scan((0..x.len()).map(|i| (x.degree(i), x.weight(i))), degree)
            }
        }
    }
}

pub type Key = Vec<Mono>;

/// The weight-≤`cap` part of a row of twisted factors.
pub struct TwistedTensor<'a> {
    kind: ScalarKind,
    coalg: &'a DGCoalgebra,
    tau: &'a TwistingCochain,
    factors: Vec<Factor<'a>>,
    wrap: bool,
    cap: u32,
    basis: LabeledBasis<Key>,
}

impl<'a> TwistedTensor<'a> {
    /// `wrap` also twists the last factor (a module) against the first (a
    /// comodule), cyclically, as in the coHochschild complex.
    pub fn new(
        coalg: &'a DGCoalgebra,
        alg: &'a dyn Algebra,
        tau: &'a TwistingCochain,
        factors: Vec<Factor<'a>>,
        wrap: bool,
        cap: u32,
    ) -> Result<Self> {
        if mc_defect(coalg, alg, tau).is_some() {
            return Err(Error::MaurerCartanViolated(
                "twisting cochain fails the Maurer–Cartan equation".into(),
            ));
        }
        let kind = alg.kind();
        let n = factors.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("no tensor factors".into()));
        }
        let pairs = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).chain(wrap.then_some((n - 1, 0)));
        for (i, j) in pairs {
            match (&factors[i], &factors[j]) {
                (Factor::Comodule(x), Factor::Module(_)) if !x.has_right() => {
                    return Err(Error::GradingMismatch("comodule lacks a right coaction".into()))
                }
                (Factor::Module(_), Factor::Comodule(y)) if !y.has_left() => {
                    return Err(Error::GradingMismatch("comodule lacks a left coaction".into()))
                }
                _ => {}
            }
        }
        if wrap && !matches!((&factors[0], &factors[n - 1]), (Factor::Comodule(_), Factor::Module(_))) {
            return Err(Error::GradingMismatch("wrap needs a comodule first and a module last".into()));
        }
        let mut elems = Vec::new();
        enumerate(&factors, cap, &mut Vec::new(), 0, 0, &mut elems);
        let basis = LabeledBasis::new(elems);
        Ok(TwistedTensor {
            kind,
            coalg,
            tau,
            factors,
            wrap,
            cap,
            basis,
        })
    }

    pub fn basis(&self) -> &LabeledBasis<Key> {
        &self.basis
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn degree(&self, key: &[Mono]) -> i64 {
        key.iter().zip(&self.factors).map(|(m, f)| f.degree(m)).sum()
    }

    pub fn weight(&self, key: &[Mono]) -> u32 {
        key.iter().zip(&self.factors).map(|(m, f)| f.weight(m)).sum()
    }

    pub fn label(&self, key: &[Mono]) -> String {
        key.iter()
            .zip(&self.factors)
            .map(|(m, f)| f.label(m))
            .collect::<Vec<_>>()
            .join("⊗")
    }

    /// τ(c)·m for a module factor.
    fn tau_left(&self, c: usize, module: &dyn Module, m: &[u32]) -> MComb {
        collect_m(self.tau.image(c).iter().flat_map(|(t, x)| {
            module.act_left(t, m).into_iter().map(move |(n, y)| (n, x * &y))
        }))
    }

    fn tau_right(&self, module: &dyn Module, m: &[u32], c: usize) -> MComb {
        collect_m(self.tau.image(c).iter().flat_map(|(t, x)| {
            module.act_right(m, t).into_iter().map(move |(n, y)| (n, x * &y))
        }))
    }

    pub fn diff(&self, key: &[Mono]) -> Vec<(Key, Scalar)> {
        let k = self.kind;
        let n = self.factors.len();
        let degs: Vec<i64> = key.iter().zip(&self.factors).map(|(m, f)| f.degree(m)).collect();
        let mut out = Vec::new();
        let mut pre = 0i64;
        for i in 0..n {
            let s = sign(k, parity(pre));
            for (m, x) in self.factors[i].diff(&key[i]) {
                let mut t = key.to_vec();
                t[i] = m;
                out.push((t, &x * &s));
            }
            if i + 1 < n {
                match (&self.factors[i], &self.factors[i + 1]) {
                    (Factor::Comodule(xc), Factor::Module(mm)) => {
                        for (x0, c, x) in xc.right(key[i][0] as usize).expect("checked") {
                            let s = sign(k, parity(pre + xc.degree(*x0)));
                            for (m, y) in self.tau_left(*c, *mm, &key[i + 1]) {
                                let mut t = key.to_vec();
                                t[i] = vec![*x0 as u32];
                                t[i + 1] = m;
                                out.push((t, &(x * &y) * &s));
                            }
                        }
                    }
                    (Factor::Module(mm), Factor::Comodule(yc)) => {
                        let s = -&sign(k, parity(pre + degs[i]));
                        for (c, y0, x) in yc.left(key[i + 1][0] as usize).expect("checked") {
                            for (m, y) in self.tau_right(*mm, &key[i], *c) {
                                let mut t = key.to_vec();
                                t[i] = m;
                                t[i + 1] = vec![*y0 as u32];
                                out.push((t, &(x * &y) * &s));
                            }
                        }
                    }
                    _ => {}
                }
            }
            pre += degs[i];
        }
        if self.wrap {
            // rotate the last factor to the front, twist, rotate back
            let (Factor::Module(mm), Factor::Comodule(yc)) = (&self.factors[n - 1], &self.factors[0])
            else {
                unreachable!("checked in new")
            };
            let dm = degs[n - 1];
            let rest: i64 = degs[..n - 1].iter().sum();
            for (c, y0, x) in yc.left(key[0][0] as usize).expect("checked") {
                let moved = dm + self.coalg.degree(*c) - 1;
                let rest_after = rest - degs[0] + yc.degree(*y0);
                let odd = parity(dm * rest) ^ parity(dm) ^ parity(moved * rest_after);
                let s = -&sign(k, odd);
                for (m, y) in self.tau_right(*mm, &key[n - 1], *c) {
                    let mut t = key.to_vec();
                    t[0] = vec![*y0 as u32];
                    t[n - 1] = m;
                    out.push((t, &(x * &y) * &s));
                }
            }
        }
        collect_terms(out)
    }

    /// Degrees in which truncation at the cap removed nothing.
    pub fn complete_degrees(&self, lo: i64, hi: i64) -> BTreeSet<i64> {
        (lo..=hi)
            .filter(|&m| bound(&self.factors, m).within(self.cap))
            .collect()
    }

    pub fn complex(&self) -> Result<ChainComplex> {
        let mut c = self
            .basis
            .complex(self.kind, |key| self.label(key), |key| self.diff(key))?;
        let degs = c.degrees();
        let (lo, hi) = match (degs.first(), degs.last()) {
            (Some(&lo), Some(&hi)) => (lo - 2, hi + 2 * self.cap as i64 + 4),
            _ => (-2, 2),
        };
        c.set_complete(Some(self.complete_degrees(lo, hi)));
        Ok(c)
    }
}

fn enumerate(
    factors: &[Factor],
    cap: u32,
    prefix: &mut Key,
    deg: i64,
    weight: u32,
    out: &mut Vec<(Key, i64, u32)>,
) {
    let i = prefix.len();
    if i == factors.len() {
        out.push((prefix.clone(), deg, weight));
        return;
    }
    for m in factors[i].elements(cap - weight) {
        let (d, w) = (factors[i].degree(&m), factors[i].weight(&m));
        prefix.push(m);
        enumerate(factors, cap, prefix, deg + d, weight + w, out);
        prefix.pop();
    }
}

/// Weight bound of the untruncated tensor product in one degree.
fn bound(factors: &[Factor], degree: i64) -> WeightBound {
    match factors {
        [] => WeightBound::scan([(0, 0)], degree),
        [f] => f.weight_bound(degree),
        [f, rest @ ..] => {
            let rest_min: i64 = rest.iter().map(|g| g.min_degree()).sum();
            (f.min_degree()..=degree - rest_min).fold(WeightBound::Empty, |acc, d| {
                acc.join(f.weight_bound(d).plus(bound(rest, degree - d)))
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// X ⊗ M, twisted by the right coaction of X.
    Left,
    /// M ⊗ X, twisted by the left coaction of X.
    Right,
}

pub fn twisted_tensor(
    side: Side,
    coalg: &DGCoalgebra,
    x: &DGComodule,
    alg: &dyn Algebra,
    tau: &TwistingCochain,
    m: &dyn Module,
    cap: u32,
) -> Result<ChainComplex> {
    let factors = match side {
        Side::Left => vec![Factor::Comodule(x), Factor::Module(m)],
        Side::Right => vec![Factor::Module(m), Factor::Comodule(x)],
    };
    TwistedTensor::new(coalg, alg, tau, factors, false, cap)?.complex()
}

/// A ⊗ E ⊗ A for a bicomodule E: the two-sided twisted tensor product, with
/// A ⊗ A^op acting on the outer factors.
pub fn twisted_tensor_two_sided(
    coalg: &DGCoalgebra,
    e: &DGComodule,
    alg: &dyn Algebra,
    tau: &TwistingCochain,
    cap: u32,
) -> Result<ChainComplex> {
    let (l, r) = (Regular(alg), Regular(alg));
    let factors = vec![Factor::Module(&l), Factor::Comodule(e), Factor::Module(&r)];
    TwistedTensor::new(coalg, alg, tau, factors, false, cap)?.complex()
}

/// Hom(M, A ⊗ N) ≅ M* ⊗ A ⊗ N for finite left comodules M and N.
pub fn twisted_hom(
    coalg: &DGCoalgebra,
    m: &DGComodule,
    n: &DGComodule,
    alg: &dyn Algebra,
    tau: &TwistingCochain,
    cap: u32,
) -> Result<ChainComplex> {
    if !m.has_left() || !n.has_left() {
        return Err(Error::GradingMismatch("twisted hom needs left comodules".into()));
    }
    let dual = m.dual(coalg, m.max_weight())?;
    let a = Regular(alg);
    let factors = vec![Factor::Comodule(&dual), Factor::Module(&a), Factor::Comodule(n)];
    TwistedTensor::new(coalg, alg, tau, factors, false, cap)?.complex()
}
