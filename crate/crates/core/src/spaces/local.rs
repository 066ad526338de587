//! Local systems, twisted (co)chains, cap products and duality checks.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{alt, faces, label, pi1_presentation, CosetTable, ReducedModel, SimplicialComplex, Simplex, Word};
use crate::complexes::{cone, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, rank, solve_sparse, Scalar, ScalarKind, SparseMatrix};

/// One invertible r×r matrix per non-tree edge of a reduced model; the
/// edge (a, b) transports the fibre over a to the fibre over b.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    pub name: String,
    rank: usize,
    matrices: Vec<SparseMatrix>,
    inverses: Vec<SparseMatrix>,
}

fn inverse(m: &SparseMatrix) -> Result<SparseMatrix> {
    let kind = m.kind();
    let work = if kind == ScalarKind::Integer {
        let t = m.entries().map(|(i, j, x)| (i, j, Scalar::Rational(x.to_rational())));
        SparseMatrix::from_triplets(ScalarKind::Rational, m.n_rows(), m.n_cols(), t)?
    } else {
        m.clone()
    };
    let n = m.n_rows();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e = vec![(j, work.kind().one())];
        let x = solve_sparse(&work, &e)?.ok_or_else(|| Error::Input("holonomy matrix is singular".into()))?;
        let x = x
            .into_iter()
            .map(|(i, v)| {
                kind.from_rational(&v.to_rational())
                    .map(|v| (i, v))
                    .ok_or_else(|| Error::Input("holonomy inverse is not integral".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        cols.push(x);
    }
    let inv = SparseMatrix::from_columns(kind, n, cols)?;
    if m.mul(&inv)? != SparseMatrix::identity(kind, n) {
        return Err(Error::Input("holonomy matrix is singular".into()));
    }
    Ok(inv)
}

impl LocalSystem {
    pub fn new(name: impl Into<String>, kind: ScalarKind, rank: usize, matrices: Vec<SparseMatrix>) -> Result<Self> {
        for m in &matrices {
            if m.n_rows() != rank || m.n_cols() != rank || m.kind() != kind {
                return Err(Error::DimensionMismatch(format!("holonomy must be {rank}×{rank} over {kind}")));
            }
        }
        let inverses = matrices.iter().map(inverse).collect::<Result<_>>()?;
        Ok(LocalSystem {
            name: name.into(),
            rank,
            matrices,
            inverses,
        })
    }

    pub fn trivial(kind: ScalarKind, n_gens: usize) -> Self {
        Self::new("trivial", kind, 1, vec![SparseMatrix::identity(kind, 1); n_gens]).expect("identity")
    }

    /// Rank one with the given holonomies.
    pub fn rank1(name: impl Into<String>, kind: ScalarKind, values: &[Scalar]) -> Result<Self> {
        let ms = values
            .iter()
            .map(|x| SparseMatrix::from_triplets(kind, 1, 1, [(0, 0, x.clone())]))
            .collect::<Result<_>>()?;
        Self::new(name, kind, 1, ms)
    }

    /// k[π₁] acting on itself through the coset table.
    pub fn regular(kind: ScalarKind, t: &CosetTable) -> Self {
        let ms = t
            .action
            .iter()
            .map(|a| SparseMatrix::from_triplets(kind, t.order, t.order, a.iter().enumerate().map(|(i, &j)| (j, i, kind.one()))).expect("permutation"))
            .collect();
        Self::new("regular", kind, t.order, ms).expect("permutation matrices")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> ScalarKind {
        self.matrices.first().map_or(ScalarKind::Rational, |m| m.kind())
    }

    pub fn matrices(&self) -> &[SparseMatrix] {
        &self.matrices
    }

    pub fn inverse_of(&self, g: usize) -> SparseMatrix {
        self.inverses[g].clone()
    }

    /// Matrix of a word, later letters acting after earlier ones.
    pub fn holonomy(&self, kind: ScalarKind, w: &Word) -> Result<SparseMatrix> {
        let mut h = SparseMatrix::identity(kind, self.rank);
        for &(g, pos) in w {
            let m = if pos { &self.matrices[g] } else { &self.inverses[g] };
            h = m.mul(&h)?;
        }
        Ok(h)
    }

    /// Every triangle relator of the model acts trivially.
    pub fn verify(&self, m: &ReducedModel, kind: ScalarKind) -> Result<()> {
        let p = pi1_presentation(m);
        if self.matrices.len() != p.generators.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} holonomies for {} non-tree edges",
                self.matrices.len(),
                p.generators.len()
            )));
        }
        if !self.matrices.is_empty() && self.kind() != kind {
            return Err(Error::ScalarMismatch { expected: kind, found: self.kind() });
        }
        let id = SparseMatrix::identity(kind, self.rank);
        for (t, r) in m.cells(2).iter().zip(&p.relators) {
            if self.holonomy(kind, r)? != id {
                return Err(Error::RelationViolated(t.clone()));
            }
        }
        Ok(())
    }

    /// Transport along the edge a < b (identity on tree edges).
    fn edge(&self, m: &ReducedModel, kind: ScalarKind, a: usize, b: usize, inverse: bool) -> SparseMatrix {
        if a == b || m.in_tree(&[a, b]) {
            return SparseMatrix::identity(kind, self.rank);
        }
        let g = m.cell_index(&[a, b]).expect("edge of K");
        if inverse { self.inverses[g].clone() } else { self.matrices[g].clone() }
    }
}

/// α = Σ α_σ σ over the n-simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalCycle {
    pub n: usize,
    pub kind: ScalarKind,
    pub coeffs: Vec<(Simplex, Scalar)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleRecord {
    pub n: usize,
    pub coeffs: Vec<(Simplex, String)>,
}

impl FundamentalCycle {
    /// Checks ∂α = 0.
    pub fn new(k: &SimplicialComplex, n: usize, kind: ScalarKind, coeffs: Vec<(Simplex, Scalar)>) -> Result<Self> {
        let c = k.chain_complex(kind)?;
        let mut v = Vec::new();
        for (s, x) in &coeffs {
            if s.len() != n + 1 {
                return Err(Error::GradingMismatch(format!("{s:?} is not an {n}-simplex")));
            }
            let i = k.index_of(s).ok_or_else(|| Error::Input(format!("{s:?} is not a simplex")))?;
            v.push((i, x.clone()));
        }
        if !c.d(n as i64).apply(&crate::linalg::normalize_vec(v)).is_empty() {
            return Err(Error::NotACycle);
        }
        Ok(FundamentalCycle { n, kind, coeffs })
    }

    pub fn scaled(&self, x: &Scalar) -> Self {
        FundamentalCycle {
            n: self.n,
            kind: self.kind,
            coeffs: self.coeffs.iter().map(|(s, y)| (s.clone(), y * x)).filter(|(_, y)| !y.is_zero()).collect(),
        }
    }

    pub fn record(&self) -> CycleRecord {
        CycleRecord {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(s, x)| (s.clone(), x.to_string())).collect(),
        }
    }
}

/// Coherent orientation by propagation across ridges of the dual graph.
pub fn fundamental_cycle(k: &SimplicialComplex, n: usize, kind: ScalarKind) -> Result<FundamentalCycle> {
    if let Some(f) = k.facets().iter().find(|f| f.len() != n + 1) {
        return Err(Error::NotPure(f.len().max(1) - 1));
    }
    let facets = k.simplices(n);
    if facets.is_empty() {
        return Err(Error::NotPure(n));
    }
    let mut signs: Vec<i64> = vec![0; facets.len()];
    if kind.characteristic() == 2 {
        signs.iter_mut().for_each(|s| *s = 1);
    } else {
        let mut ridges: BTreeMap<Simplex, Vec<(usize, usize)>> = BTreeMap::new();
        for (j, s) in facets.iter().enumerate() {
            for (i, f) in faces(s) {
                ridges.entry(f).or_default().push((j, i));
            }
        }
        let mut adj = vec![Vec::new(); facets.len()];
        for cs in ridges.values() {
            for &(a, ia) in cs {
                for &(b, ib) in cs {
                    if a != b {
                        // s_a (−1)^ia + s_b (−1)^ib = 0
                        adj[a].push((b, -alt(ia) * alt(ib)));
                    }
                }
            }
        }
        for root in 0..facets.len() {
            if signs[root] != 0 {
                continue;
            }
            signs[root] = 1;
            let mut stack = vec![root];
            while let Some(a) = stack.pop() {
                for &(b, rel) in &adj[a] {
                    let want = signs[a] * rel;
                    if signs[b] == 0 {
                        signs[b] = want;
                        stack.push(b);
                    } else if signs[b] != want {
                        return Err(Error::NotOrientable);
                    }
                }
            }
        }
    }
    let coeffs = facets.iter().zip(&signs).map(|(s, &x)| (s.clone(), kind.from_i64(x))).collect();
    FundamentalCycle::new(k, n, kind, coeffs)
}

/// Twisted cochains (degree −p) and chains (degree p) of K with coefficients in ℓ.
pub fn twisted_complexes(m: &ReducedModel, ell: &LocalSystem, kind: ScalarKind) -> Result<(ChainComplex, ChainComplex)> {
    ell.verify(m, kind)?;
    let k = m.base();
    let r = ell.rank();
    let mut chains = ChainComplex::new(kind);
    let mut cochains = ChainComplex::new(kind);
    for p in 0..=k.dim().max(0) as usize {
        let labels: Vec<String> = k.simplices(p).iter().flat_map(|s| (0..r).map(move |i| format!("{}e{i}", label(s)))).collect();
        chains.set_degree(p as i64, labels.clone(), vec![0; labels.len()]);
        cochains.set_degree(-(p as i64), labels.clone(), vec![0; labels.len()]);
    }
    for p in 1..=k.dim().max(0) as usize {
        let (rows, cols) = (k.simplices(p - 1).len() * r, k.simplices(p).len() * r);
        let mut bd = Vec::new();
        let mut cob = Vec::new();
        for (j, s) in k.simplices(p).iter().enumerate() {
            for (i, f) in faces(s) {
                let fi = k.index_of(&f).expect("closed");
                if i == 0 {
                    let h = ell.edge(m, kind, s[0], s[1], false);
                    let hinv = ell.edge(m, kind, s[0], s[1], true);
                    for (a, b, x) in h.entries() {
                        bd.push((fi * r + a, j * r + b, x.clone()));
                    }
                    for (a, b, x) in hinv.entries() {
                        cob.push((j * r + a, fi * r + b, x.clone()));
                    }
                } else {
                    for a in 0..r {
                        bd.push((fi * r + a, j * r + a, kind.from_i64(alt(i))));
                        cob.push((j * r + a, fi * r + a, kind.from_i64(alt(i))));
                    }
                }
            }
        }
        chains.set_differential(p as i64, SparseMatrix::from_triplets(kind, rows, cols, bd)?)?;
        let p1 = 1 - p as i64;
        cochains.set_differential(p1, SparseMatrix::from_triplets(kind, cols, rows, cob)?)?;
    }
    chains.check_square_zero()?;
    cochains.check_square_zero()?;
    Ok((cochains, chains))
}

/// f ↦ f ∩ α, evaluating f on back faces and transporting to the front vertex.
pub fn cap_with(m: &ReducedModel, alpha: &FundamentalCycle, ell: &LocalSystem) -> Result<ChainMap> {
    let kind = alpha.kind;
    let (cochains, chains) = twisted_complexes(m, ell, kind)?;
    let k = m.base();
    let r = ell.rank();
    let n = alpha.n;
    let mut f = ChainMap::new(cochains, chains, n as i64);
    for p in 0..=n {
        let (rows, cols) = (k.simplices(n - p).len() * r, k.simplices(p).len() * r);
        let mut t = Vec::new();
        let eps = kind.from_i64(if (p * p.saturating_sub(1) / 2) % 2 == 0 { 1 } else { -1 });
        for (s, a) in &alpha.coeffs {
            let q = n - p;
            let front = k.index_of(&s[..=q]).expect("face");
            let back = k.index_of(&s[q..]).expect("face");
            let h = ell.edge(m, kind, s[0], s[q], true);
            let c = &eps * a;
            for (x, y, v) in h.entries() {
                t.push((front * r + x, back * r + y, &c * v));
            }
        }
        f.set_component(-(p as i64), SparseMatrix::from_triplets(kind, rows, cols, t)?)?;
    }
    f.check()?;
    Ok(f)
}

/// One ±1 rank-one system per basis class of H¹(K; 𝔽₂), gauged to be
/// trivial on the tree. On the torus these are the (−1, 1) and (1, −1) systems.
pub fn sign_characters(m: &ReducedModel, kind: ScalarKind) -> Result<Vec<LocalSystem>> {
    let f2 = ScalarKind::Prime(2);
    let k = m.base();
    let c = k.chain_complex(f2)?;
    let d1 = c.d(1).transpose();
    let cocycles = kernel_basis(&c.d(2).transpose())?;
    let mut span: Vec<Vec<(usize, Scalar)>> = d1.columns().to_vec();
    let mut base_rank = rank(&SparseMatrix::from_columns(f2, k.simplices(1).len(), span.clone())?)?;
    let mut chosen = Vec::new();
    for z in cocycles {
        span.push(z.clone());
        let r = rank(&SparseMatrix::from_columns(f2, k.simplices(1).len(), span.clone())?)?;
        if r > base_rank {
            base_rank = r;
            chosen.push(z);
        } else {
            span.pop();
        }
    }
    // g(v) along the tree so that z + δg vanishes on tree edges
    let mut adj = vec![Vec::new(); k.n_vertices()];
    for &(a, b) in m.tree() {
        adj[a].push(b);
        adj[b].push(a);
    }
    chosen
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let val = |e: &[usize]| z.iter().any(|(j, x)| *j == k.index_of(e).expect("edge") && !x.is_zero());
            let mut g = vec![None; k.n_vertices()];
            g[m.base_vertex()] = Some(false);
            let mut stack = vec![m.base_vertex()];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if g[w].is_none() {
                        g[w] = Some(g[v].unwrap() ^ val(&[v.min(w), v.max(w)]));
                        stack.push(w);
                    }
                }
            }
            let vals: Vec<Scalar> = m
                .cells(1)
                .iter()
                .map(|e| {
                    let odd = val(e) ^ g[e[0]].unwrap() ^ g[e[1]].unwrap();
                    kind.from_i64(if odd { -1 } else { 1 })
                })
                .collect();
            LocalSystem::rank1(format!("sign{i}"), kind, &vals)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemResult {
    pub name: String,
    pub rank: usize,
    pub chain_map: bool,
    pub quasi_iso: bool,
    /// Twisted cohomology ranks H^0..H^n.
    pub cohomology: Vec<usize>,
    /// Twisted homology ranks H_0..H_n.
    pub homology: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PdReport {
    pub n: usize,
    pub systems: Vec<SystemResult>,
    /// |π₁| when coset enumeration finished.
    pub pi1_order: Option<usize>,
    pub passed: bool,
    /// True when the regular representation was included and passed, so
    /// duality holds for every local system.
    pub definitive: bool,
}

fn run_system(m: &ReducedModel, alpha: &FundamentalCycle, ell: &LocalSystem) -> Result<SystemResult> {
    let n = alpha.n as i64;
    let (chain_map, quasi_iso, cohomology, homology) = match cap_with(m, alpha, ell) {
        Ok(f) => {
            let hs = f.source.homology(-n, 0)?;
            let ht = f.target.homology(0, n)?;
            let qi = cone(&f)?.homology_all()?.is_zero();
            (true, qi, (0..=n).map(|p| hs.rank(-p)).collect(), ht.ranks(0, n))
        }
        Err(Error::NotAChainMap(_)) => (false, false, Vec::new(), Vec::new()),
        Err(e) => return Err(e),
    };
    Ok(SystemResult {
        name: ell.name.clone(),
        rank: ell.rank(),
        chain_map,
        quasi_iso,
        cohomology,
        homology,
    })
}

/// Cap-product duality for each supplied system, plus k[π₁] when the group is finite.
pub fn check_pd(m: &ReducedModel, alpha: &FundamentalCycle, systems: &[LocalSystem], coset_limit: usize) -> Result<PdReport> {
    let kind = alpha.kind;
    let table = super::enumerate_cosets(&pi1_presentation(m), coset_limit);
    let mut results = systems.iter().map(|l| run_system(m, alpha, l)).collect::<Result<Vec<_>>>()?;
    let mut definitive = false;
    if let Some(t) = &table {
        let reg = run_system(m, alpha, &LocalSystem::regular(kind, t))?;
        definitive = reg.quasi_iso;
        results.push(reg);
    }
    let passed = results.iter().all(|r| r.chain_map && r.quasi_iso);
    Ok(PdReport {
        n: alpha.n,
        systems: results,
        pi1_order: table.map(|t| t.order),
        passed,
        definitive: definitive && passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{reduce_by_tree, COSET_LIMIT};

    const Q: ScalarKind = ScalarKind::Rational;
    const F2: ScalarKind = ScalarKind::Prime(2);

    #[test]
    fn fundamental_cycles() {
        let s2 = SimplicialComplex::sphere2();
        let a = fundamental_cycle(&s2, 2, Q).unwrap();
        assert_eq!(a.coeffs.len(), 4);
        let rp2 = SimplicialComplex::rp2_min();
        assert_eq!(fundamental_cycle(&rp2, 2, Q), Err(Error::NotOrientable));
        assert_eq!(fundamental_cycle(&rp2, 2, F2).unwrap().coeffs.len(), 10);
        assert_eq!(fundamental_cycle(&s2, 1, Q), Err(Error::NotPure(2)));
        assert!(fundamental_cycle(&SimplicialComplex::torus7(), 2, Q).is_ok());
    }

    #[test]
    fn twisted_circle_is_acyclic() {
        let m = reduce_by_tree(&SimplicialComplex::circle(4).unwrap(), 0).unwrap();
        let ell = LocalSystem::rank1("minus", Q, &[Q.from_i64(-1)]).unwrap();
        let (co, ch) = twisted_complexes(&m, &ell, Q).unwrap();
        assert!(co.homology_all().unwrap().is_zero());
        assert!(ch.homology_all().unwrap().is_zero());
        let (co, _) = twisted_complexes(&m, &LocalSystem::trivial(Q, 1), Q).unwrap();
        assert_eq!(co.homology_all().unwrap().ranks(-1, 0), vec![1, 1]);
    }

    #[test]
    fn twisted_torus_is_acyclic() {
        let m = reduce_by_tree(&SimplicialComplex::torus7(), 0).unwrap();
        let signs = sign_characters(&m, Q).unwrap();
        assert_eq!(signs.len(), 2);
        for ell in &signs {
            let (co, ch) = twisted_complexes(&m, ell, Q).unwrap();
            assert!(co.homology_all().unwrap().is_zero());
            assert!(ch.homology_all().unwrap().is_zero());
        }
    }

    #[test]
    fn duality() {
        let s2 = SimplicialComplex::sphere2();
        let m = reduce_by_tree(&s2, 0).unwrap();
        let a = fundamental_cycle(&s2, 2, Q).unwrap();
        let rep = check_pd(&m, &a, &[LocalSystem::trivial(Q, 3)], COSET_LIMIT).unwrap();
        assert!(rep.passed && rep.definitive, "{rep:?}");
        let rp2 = SimplicialComplex::rp2_min();
        let m = reduce_by_tree(&rp2, 0).unwrap();
        let a = fundamental_cycle(&rp2, 2, F2).unwrap();
        let rep = check_pd(&m, &a, &[], COSET_LIMIT).unwrap();
        assert_eq!(rep.pi1_order, Some(2));
        assert!(rep.passed && rep.definitive, "{rep:?}");
        assert_eq!(rep.systems[0].homology, vec![1, 0, 1]);
    }

    #[test]
    fn bad_relation() {
        let m = reduce_by_tree(&SimplicialComplex::sphere2(), 0).unwrap();
        let ell = LocalSystem::rank1("bad", Q, &[Q.from_i64(2), Q.one(), Q.one()]).unwrap();
        assert!(matches!(ell.verify(&m, Q), Err(Error::RelationViolated(_))));
    }
}
