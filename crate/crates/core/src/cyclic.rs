//! Mixed complexes: Hochschild chains of an algebra, coHochschild chains of a
//! coalgebra, their cyclic truncations and negative cyclic lifts.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::barcobar::{universal_tau_cobar, Cobar};
use crate::complexes::{collect_terms, ChainComplex, LabeledBasis};
use crate::dgstruct::{
    parity, sign, Algebra, DGCoalgebra, DGComodule, Factor, Mono, Regular, TwistedTensor,
    WeightBound,
};
use crate::error::{Error, Result};
use crate::linalg::{solve_sparse, Scalar, ScalarKind, SparseMatrix, SparseVec};

/// A complex with b as its differential and Connes' B of degree +1.
#[derive(Clone, Debug)]
pub struct MixedComplex {
    complex: ChainComplex,
    connes: BTreeMap<i64, SparseMatrix>,
}

impl MixedComplex {
    pub fn new(complex: ChainComplex, connes: BTreeMap<i64, SparseMatrix>) -> Result<Self> {
        let m = MixedComplex { complex, connes };
        m.check()?;
        Ok(m)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn kind(&self) -> ScalarKind {
        self.complex.kind()
    }

    pub fn b(&self, n: i64) -> SparseMatrix {
        self.complex.d(n)
    }

    /// B: degree n → n + 1.
    pub fn connes(&self, n: i64) -> SparseMatrix {
        self.connes.get(&n).cloned().unwrap_or_else(|| {
            SparseMatrix::zeros(self.kind(), self.complex.dim(n + 1), self.complex.dim(n))
        })
    }

    /// b² = 0, B² = 0 and bB + Bb = 0 as matrix identities.
    pub fn check(&self) -> Result<()> {
        self.complex.check_square_zero()?;
        let mut degs = self.complex.degrees();
        degs.extend(self.connes.keys());
        for &n in &degs {
            if !self.connes(n + 1).mul(&self.connes(n))?.is_zero() {
                return Err(Error::StructureViolated(format!("B² ≠ 0 in degree {n}")));
            }
            let bb = self.b(n + 1).mul(&self.connes(n))?;
            let bb2 = self.connes(n - 1).mul(&self.b(n))?;
            if !bb.add(&bb2)?.is_zero() {
                return Err(Error::StructureViolated(format!("bB + Bb ≠ 0 in degree {n}")));
            }
        }
        Ok(())
    }

    /// (C[u]/u^N, b + uB) with |u| = −2: x·u^j sits in degree |x| − 2j.
    pub fn negative_cyclic(&self, n_u: usize) -> Result<ChainComplex> {
        self.u_complex((0..n_u as i64).collect(), 1)
    }

    /// (C[u⁻¹] truncated to u^{−(N−1)}, b + uB), where u·u⁰ = 0.
    pub fn cyclic(&self, n_u: usize) -> Result<ChainComplex> {
        self.u_complex((0..n_u as i64).map(|j| -j).collect(), 1)
    }

    /// Sum over the listed u-powers; uB moves power j to j + step, dropped
    /// when that power is not listed.
    fn u_complex(&self, powers: Vec<i64>, step: i64) -> Result<ChainComplex> {
        let k = self.kind();
        let base = self.complex.degrees();
        let mut out = ChainComplex::new(k);
        // degree m of the result: blocks (j, x) with |x| = m + 2j
        let block_degs = |m: i64| powers.iter().map(move |&j| (j, m + 2 * j));
        let mut result_degs: Vec<i64> = base
            .iter()
            .flat_map(|&n| powers.iter().map(move |&j| n - 2 * j))
            .collect();
        result_degs.sort();
        result_degs.dedup();
        let offsets = |m: i64| {
            let mut off = BTreeMap::new();
            let mut acc = 0;
            for (j, n) in block_degs(m) {
                off.insert(j, acc);
                acc += self.complex.dim(n);
            }
            (off, acc)
        };
        for &m in &result_degs {
            let mut labels = Vec::new();
            let mut weights = Vec::new();
            for (j, n) in block_degs(m) {
                labels.extend(self.complex.labels(n).iter().map(|l| format!("u^{j}·{l}")));
                weights.extend_from_slice(self.complex.weights(n));
            }
            out.set_degree(m, labels, weights);
        }
        for &m in &result_degs {
            let (src_off, src_dim) = offsets(m);
            let (tgt_off, tgt_dim) = offsets(m - 1);
            let mut trip = Vec::new();
            for (j, n) in block_degs(m) {
                for (r, c, x) in self.b(n).entries() {
                    trip.push((tgt_off[&j] + r, src_off[&j] + c, x.clone()));
                }
                if let Some(&t) = tgt_off.get(&(j + step)) {
                    for (r, c, x) in self.connes(n).entries() {
                        trip.push((t + r, src_off[&j] + c, x.clone()));
                    }
                }
            }
            out.set_differential(m, SparseMatrix::from_triplets(k, tgt_dim, src_dim, trip)?)?;
        }
        let complete = result_degs
            .iter()
            .flat_map(|&m| [m - 1, m, m + 1])
            .filter(|&m| block_degs(m).all(|(_, n)| self.complex.is_complete(n)))
            .collect();
        out.set_complete(Some(complete));
        out.check_square_zero()?;
        Ok(out)
    }
}

fn mixed_from_basis<K: Clone + Eq + std::hash::Hash>(
    kind: ScalarKind,
    basis: &LabeledBasis<K>,
    complex: ChainComplex,
    connes: impl Fn(&K) -> Vec<(K, Scalar)>,
) -> Result<MixedComplex> {
    let b = basis.map_to(basis, kind, 1, false, connes)?;
    MixedComplex::new(complex, b)
}

/// Normalized Hochschild chains a₀[a₁|…|a_n] of total weight ≤ `cap`.
pub fn hochschild_complex(a: &dyn Algebra, cap: u32) -> Result<MixedComplex> {
    let k = a.kind();
    let letters: Vec<Mono> = a.elements(cap).into_iter().filter(|m| !m.is_empty()).collect();
    if letters.iter().any(|m| a.weight(m) == 0) {
        return Err(Error::StructureViolated("augmentation ideal has weight 0".into()));
    }
    let mut elems = Vec::new();
    for a0 in a.elements(cap) {
        let mut stack = vec![vec![a0]];
        while let Some(key) = stack.pop() {
            let w: u32 = key.iter().map(|m| a.weight(m)).sum();
            let deg = hh_degree(a, &key);
            for l in &letters {
                if w + a.weight(l) <= cap {
                    let mut next = key.clone();
                    next.push(l.clone());
                    stack.push(next);
                }
            }
            elems.push((key, deg, w));
        }
    }
    let basis = LabeledBasis::new(elems);
    let label = |key: &Vec<Mono>| {
        let bars: Vec<String> = key[1..].iter().map(|m| a.label(m)).collect();
        format!("{}[{}]", a.label(&key[0]), bars.join("|"))
    };
    let mut complex = basis.complex(k, label, |key| hh_b(a, key))?;
    let degs = complex.degrees();
    let hi = degs.last().copied().unwrap_or(0) + 2 * cap as i64 + 4;
    complex.set_complete(Some(
        (-2..=hi).filter(|&m| hh_bound(a, m).within(cap)).collect(),
    ));
    mixed_from_basis(k, &basis, complex, |key| hh_connes(a, key))
}

fn hh_degree(a: &dyn Algebra, key: &[Mono]) -> i64 {
    a.degree(&key[0]) + key[1..].iter().map(|m| a.degree(m) + 1).sum::<i64>()
}

fn push_normalized(out: &mut Vec<(Vec<Mono>, Scalar)>, key: Vec<Mono>, x: Scalar) {
    if key[1..].iter().all(|m| !m.is_empty()) {
        out.push((key, x));
    }
}

fn hh_b(a: &dyn Algebra, key: &[Mono]) -> Vec<(Vec<Mono>, Scalar)> {
    let k = a.kind();
    let n = key.len() - 1;
    let deg: Vec<i64> = key.iter().map(|m| a.degree(m)).collect();
    // eps[i] = |a₀| + Σ_{1≤j≤i} (|a_j| + 1)
    let mut eps = vec![deg[0]; n + 1];
    for i in 1..=n {
        eps[i] = eps[i - 1] + deg[i] + 1;
    }
    let mut out = Vec::new();
    for (m, x) in a.diff(&key[0]) {
        let mut t = key.to_vec();
        t[0] = m;
        out.push((t, x));
    }
    for i in 1..=n {
        let s = sign(k, !parity(eps[i - 1]));
        for (m, x) in a.diff(&key[i]) {
            let mut t = key.to_vec();
            t[i] = m;
            push_normalized(&mut out, t, &x * &s);
        }
    }
    if n >= 1 {
        let s = sign(k, parity(deg[0]));
        for (m, x) in a.mul(&key[0], &key[1]) {
            let t = [vec![m], key[2..].to_vec()].concat();
            out.push((t, &x * &s));
        }
        for i in 1..n {
            let s = sign(k, parity(eps[i]));
            for (m, x) in a.mul(&key[i], &key[i + 1]) {
                let t = [key[..i].to_vec(), vec![m], key[i + 2..].to_vec()].concat();
                push_normalized(&mut out, t, &x * &s);
            }
        }
        let s = -&sign(k, parity((deg[n] + 1) * eps[n - 1]));
        for (m, x) in a.mul(&key[n], &key[0]) {
            let t = [vec![m], key[1..n].to_vec()].concat();
            out.push((t, &x * &s));
        }
    }
    collect_terms(out)
}

fn hh_connes(a: &dyn Algebra, key: &[Mono]) -> Vec<(Vec<Mono>, Scalar)> {
    if key[0].is_empty() {
        return Vec::new();
    }
    let k = a.kind();
    let sdeg: Vec<i64> = key.iter().map(|m| a.degree(m) + 1).collect();
    let total: i64 = sdeg.iter().sum();
    let mut out = Vec::new();
    let mut before = 0i64;
    for i in 0..key.len() {
        let s = sign(k, parity(before * (total - before)));
        let t = [vec![Vec::new()], key[i..].to_vec(), key[..i].to_vec()].concat();
        out.push((t, s));
        before += sdeg[i];
    }
    collect_terms(out)
}

/// Weight bound of the untruncated Hochschild chains in one degree.
fn hh_bound(a: &dyn Algebra, degree: i64) -> WeightBound {
    if a.min_degree() < 0 {
        return WeightBound::Unbounded;
    }
    // bars[d]: bound for bar parts [a₁|…] of total shifted degree d ≥ 0
    let top = degree.max(0) as usize;
    let mut bars = vec![WeightBound::Empty; top + 1];
    if top + 1 > 0 {
        bars[0] = WeightBound::Max(0);
    }
    for d in 1..=top {
        let mut acc = WeightBound::Empty;
        for s in 1..=d {
            acc = acc.join(a.reduced_weight_bound(s as i64 - 1).plus(bars[d - s]));
        }
        bars[d] = acc;
    }
    (0..=degree).fold(WeightBound::Empty, |acc, d0| {
        acc.join(a.weight_bound(d0).plus(bars[(degree - d0) as usize]))
    })
}

/// coHochschild chains C ⊗ ΩC of total weight ≤ `cap`: the two-sided twist
/// c(w) ↦ Σ ± c′[c″]w ± c″ w[c′], and B(1⊗[a₁|…|a_n]) = Σ ± a_i⊗[a_{i+1}|…|a_{i−1}].
pub fn cohochschild_complex(c: &DGCoalgebra, cap: u32) -> Result<MixedComplex> {
    Ok(cohochschild_with_basis(c, cap)?.0)
}

/// Same, with the keys `[[m], word]` of the basis (m indexes C with 0 the unit).
pub fn cohochschild_with_basis(
    c: &DGCoalgebra,
    cap: u32,
) -> Result<(MixedComplex, LabeledBasis<Vec<Mono>>)> {
    let k = c.kind();
    let om = Cobar::new(c)?;
    let tau = universal_tau_cobar(c);
    let cc = DGComodule::from_coalgebra(c);
    let reg = Regular(&om);
    let tt = TwistedTensor::new(
        c,
        &om,
        &tau,
        vec![Factor::Comodule(&cc), Factor::Module(&reg)],
        true,
        cap,
    )?;
    let complex = tt.complex()?;
    let m = mixed_from_basis(k, tt.basis(), complex, |key| cohh_connes(c, key))?;
    Ok((m, tt.basis().clone()))
}

fn cohh_connes(c: &DGCoalgebra, key: &[Mono]) -> Vec<(Vec<Mono>, Scalar)> {
    if key[0][0] != 0 {
        return Vec::new();
    }
    let k = c.kind();
    let word = &key[1];
    let sdeg: Vec<i64> = word.iter().map(|&l| c.degree(l as usize) - 1).collect();
    let total: i64 = sdeg.iter().sum();
    let mut out = Vec::new();
    let mut before = 0i64;
    for i in 0..word.len() {
        let s = sign(k, parity(before * (total - before)));
        let rest = [&word[i + 1..], &word[..i]].concat();
        out.push((vec![vec![word[i] + 1], rest], s));
        before += sdeg[i];
    }
    collect_terms(out)
}

/// x₀ = z, x₁, … with b x_{i+1} = −B x_i, each x_i in degree n + 2i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub degree: i64,
    pub stages: Vec<SparseVec>,
    /// Stage whose equation had no solution.
    pub obstructed_at: Option<usize>,
}

pub fn lift_to_negative_cyclic(
    m: &MixedComplex,
    n: i64,
    z: &SparseVec,
    stages: usize,
) -> Result<Lift> {
    if !m.b(n).apply(z).is_empty() {
        return Err(Error::NotACycle);
    }
    let mut xs = vec![z.clone()];
    for i in 0..stages.saturating_sub(1) {
        let deg = n + 2 * i as i64;
        let rhs: SparseVec = m
            .connes(deg)
            .apply(&xs[i])
            .into_iter()
            .map(|(r, x)| (r, -x))
            .collect();
        match solve_sparse(&m.b(deg + 2), &rhs)? {
            Some(x) => xs.push(x),
            None => {
                return Ok(Lift {
                    degree: n,
                    stages: xs,
                    obstructed_at: Some(i + 1),
                })
            }
        }
    }
    Ok(Lift {
        degree: n,
        stages: xs,
        obstructed_at: None,
    })
}

/// Replays the defining equations of a lift.
pub fn verify_lift(m: &MixedComplex, lift: &Lift) -> Result<bool> {
    if !m.b(lift.degree).apply(&lift.stages[0]).is_empty() {
        return Ok(false);
    }
    for i in 0..lift.stages.len().saturating_sub(1) {
        let deg = lift.degree + 2 * i as i64;
        let lhs = m.b(deg + 2).apply(&lift.stages[i + 1]);
        let rhs = m.connes(deg).apply(&lift.stages[i]);
        let sum = crate::linalg::normalize_vec(lhs.into_iter().chain(rhs).collect());
        if !sum.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiRow {
    pub degree: i64,
    pub cohochschild: usize,
    pub hochschild: usize,
    pub trusted: bool,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiComparison {
    pub truncation: u32,
    pub rows: Vec<BettiRow>,
}

impl BettiComparison {
    /// Every trusted degree agrees.
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| !r.trusted || r.equal)
    }
}

/// Ranks of coHH(C) against HH(ΩC), both at weight ≤ `cap`.
pub fn betti_compare(c: &DGCoalgebra, cap: u32, window: (i64, i64)) -> Result<BettiComparison> {
    let co = cohochschild_complex(c, cap)?;
    let om = Cobar::new(c)?;
    let hh = hochschild_complex(&om, cap)?;
    let h1 = co.complex().homology(window.0, window.1)?;
    let h2 = hh.complex().homology(window.0, window.1)?;
    let rows = (window.0..=window.1)
        .map(|n| {
            let (a, b) = (h1.rank(n), h2.rank(n));
            BettiRow {
                degree: n,
                cohochschild: a,
                hochschild: b,
                trusted: h1.degrees[&n].trusted && h2.degrees[&n].trusted,
                equal: a == b,
            }
        })
        .collect();
    Ok(BettiComparison {
        truncation: cap,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgstruct::fixtures::*;
    use crate::dgstruct::{DGAlgebra, Generator};

    fn dual_numbers() -> DGAlgebra {
        let k = ScalarKind::Rational;
        DGAlgebra::new(k, vec![Generator::new("x", 0, 1)], BTreeMap::new(), vec![vec![]]).unwrap()
    }

    #[test]
    fn hochschild_of_dual_numbers() {
        let a = dual_numbers();
        let m = hochschild_complex(&a, 6).unwrap();
        let h = m.complex().homology(0, 4).unwrap();
        assert_eq!(h.ranks(0, 4), vec![2, 1, 1, 1, 1]);
        assert!(h.degrees.values().all(|e| e.trusted));
    }

    #[test]
    fn hochschild_of_cobars_is_mixed() {
        for c in [sphere(), aff1(), words2()] {
            let om = Cobar::new(&c).unwrap();
            hochschild_complex(&om, 3).unwrap();
        }
    }

    #[test]
    fn cohochschild_is_mixed() {
        for c in [sphere(), aff1(), words2()] {
            cohochschild_complex(&c, 4).unwrap();
        }
    }

    #[test]
    fn sphere_free_loops() {
        let m = cohochschild_complex(&sphere(), 5).unwrap();
        let h = m.complex().homology(0, 4).unwrap();
        assert_eq!(h.ranks(0, 4), vec![1; 5]);
    }

    #[test]
    fn sphere_betti_compare() {
        let r = betti_compare(&sphere(), 4, (0, 3)).unwrap();
        assert!(r.passes());
        assert!(r.rows.iter().all(|row| row.trusted));
    }

    #[test]
    fn cyclic_truncations_square_to_zero() {
        let m = cohochschild_complex(&aff1(), 3).unwrap();
        m.negative_cyclic(3).unwrap();
        m.cyclic(3).unwrap();
    }

    #[test]
    fn lifts_and_non_cycles() {
        let m = cohochschild_complex(&sphere(), 5).unwrap();
        let basis_deg2 = m.complex().labels(2).to_vec();
        let s = basis_deg2.iter().position(|l| l == "s⊗1").unwrap();
        let z = vec![(s, ScalarKind::Rational.one())];
        let lift = lift_to_negative_cyclic(&m, 2, &z, 3).unwrap();
        assert_eq!(lift.obstructed_at, None);
        assert!(verify_lift(&m, &lift).unwrap());
        let d3 = m.b(3);
        let col = (0..m.complex().dim(3))
            .find(|&c| d3.entries().any(|(_, cc, _)| cc == c))
            .unwrap();
        let bad = vec![(col, ScalarKind::Rational.one())];
        assert_eq!(
            lift_to_negative_cyclic(&m, 3, &bad, 3).unwrap_err(),
            Error::NotACycle
        );
    }
}
