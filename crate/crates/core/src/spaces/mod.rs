//! Simplicial complexes, one-vertex models, Alexander–Whitney chain
//! coalgebras, fundamental groups, local systems and Poincaré duality.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complexes::{ChainComplex, HomologyEntry};
use crate::dgstruct::{Comb, Comb2, DGCoalgebra, Generator};
use crate::error::{Error, Result};
use crate::linalg::{ScalarKind, SparseMatrix};

mod group;
pub use group::*;
mod local;
pub use local::*;
mod cy;
pub use cy::*;

pub type Simplex = Vec<usize>;

/// Input schema: vertex count and facets as vertex lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub vertices: usize,
    pub facets: Vec<Simplex>,
}

/// Ordered simplicial complex; each simplex is its increasing vertex list.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    n_vertices: usize,
    facets: Vec<Simplex>,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl SimplicialComplex {
    pub fn new(n_vertices: usize, facets: Vec<Simplex>) -> Result<Self> {
        let mut fs = Vec::new();
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != f.len() || s.is_empty() {
                return Err(Error::Input(format!("facet {f:?} repeats a vertex or is empty")));
            }
            if let Some(&v) = s.iter().find(|&&v| v >= n_vertices) {
                return Err(Error::Input(format!("vertex {v} out of range")));
            }
            fs.push(s);
        }
        // keep maximal simplices only, in input order
        let listed = fs.clone();
        let is_face = |a: &Simplex, b: &Simplex| a.len() < b.len() && a.iter().all(|v| b.binary_search(v).is_ok());
        fs.retain(|f| !listed.iter().any(|g| is_face(f, g)));
        let mut seen = BTreeSet::new();
        fs.retain(|f| seen.insert(f.clone()));
        let mut by_dim: Vec<BTreeSet<Simplex>> = Vec::new();
        for v in 0..n_vertices {
            if by_dim.is_empty() {
                by_dim.push(BTreeSet::new());
            }
            by_dim[0].insert(vec![v]);
        }
        for f in &fs {
            let k = f.len();
            for mask in 1u64..(1 << k) {
                let s: Simplex = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                while by_dim.len() < s.len() {
                    by_dim.push(BTreeSet::new());
                }
                by_dim[s.len() - 1].insert(s);
            }
        }
        let simplices: Vec<Vec<Simplex>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = simplices
            .iter()
            .map(|ss| ss.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        Ok(SimplicialComplex {
            n_vertices,
            facets: fs,
            simplices,
            index,
        })
    }

    pub fn from_spec(s: &ComplexSpec) -> Result<Self> {
        Self::new(s.vertices, s.facets.clone())
    }

    pub fn to_spec(&self) -> ComplexSpec {
        ComplexSpec {
            vertices: self.n_vertices,
            facets: self.facets.clone(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    /// −1 for the empty complex.
    pub fn dim(&self) -> i64 {
        self.simplices.len() as i64 - 1
    }

    pub fn simplices(&self, p: usize) -> &[Simplex] {
        self.simplices.get(p).map_or(&[], |v| v)
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index_of(s).is_some()
    }

    pub fn is_connected(&self) -> bool {
        self.n_vertices > 0 && self.bfs_tree(0).1.len() == self.n_vertices
    }

    /// Breadth-first spanning tree from `root`: tree edges and the visited vertices.
    fn bfs_tree(&self, root: usize) -> (BTreeSet<(usize, usize)>, BTreeSet<usize>) {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for e in self.simplices(1) {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        let mut seen = BTreeSet::from([root]);
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let mut next = adj[v].clone();
            next.sort_unstable();
            for w in next {
                if seen.insert(w) {
                    tree.insert((v.min(w), v.max(w)));
                    queue.push_back(w);
                }
            }
        }
        (tree, seen)
    }

    /// Simplicial chains with the alternating-face boundary.
    pub fn chain_complex(&self, kind: ScalarKind) -> Result<ChainComplex> {
        let mut c = ChainComplex::new(kind);
        for (p, ss) in self.simplices.iter().enumerate() {
            c.set_degree(p as i64, ss.iter().map(|s| label(s)).collect(), vec![0; ss.len()]);
        }
        for p in 1..self.simplices.len() {
            let mut t = Vec::new();
            for (j, s) in self.simplices[p].iter().enumerate() {
                for (i, f) in faces(s) {
                    t.push((self.index_of(&f).expect("closed"), j, kind.from_i64(alt(i))));
                }
            }
            let d = SparseMatrix::from_triplets(kind, self.simplices[p - 1].len(), self.simplices[p].len(), t)?;
            c.set_differential(p as i64, d)?;
        }
        Ok(c)
    }

    /// Stellar subdivision of facet `i` at a new vertex.
    pub fn subdivide_facet(&self, i: usize) -> Result<Self> {
        let f = self
            .facets
            .get(i)
            .ok_or_else(|| Error::Input(format!("no facet {i}")))?;
        if f.len() == 1 {
            return Ok(self.clone());
        }
        let v = self.n_vertices;
        let mut facets: Vec<Simplex> = self.facets.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        for skip in 0..f.len() {
            let mut g: Simplex = f.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &x)| x).collect();
            g.push(v);
            facets.push(g);
        }
        Self::new(v + 1, facets)
    }

    /// Vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        crate::error::check_permutation(perm, self.n_vertices)?;
        let facets = self.facets.iter().map(|f| f.iter().map(|&v| perm[v]).collect()).collect();
        Self::new(self.n_vertices, facets)
    }

    /// ∂Δ³.
    pub fn sphere2() -> Self {
        Self::new(4, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).expect("sphere2")
    }

    /// The 6-vertex projective plane (half icosahedron).
    pub fn rp2_min() -> Self {
        let t = [
            [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
            [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
        ];
        Self::new(6, t.iter().map(|f| f.to_vec()).collect()).expect("rp2")
    }

    /// Möbius' 7-vertex torus.
    pub fn torus7() -> Self {
        let facets = (0..7)
            .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
            .collect();
        Self::new(7, facets).expect("torus7")
    }

    /// k-gon, k ≥ 3.
    pub fn circle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::Input("circle needs at least 3 vertices".into()));
        }
        Self::new(k, (0..k).map(|i| vec![i, (i + 1) % k]).collect())
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "sphere2" => Some(Self::sphere2()),
            "rp2_min" | "rp2" => Some(Self::rp2_min()),
            "torus7" | "torus" => Some(Self::torus7()),
            _ => name
                .strip_prefix("circle")
                .map(|s| s.trim_matches(|c| c == '(' || c == ')'))
                .and_then(|s| s.parse().ok())
                .and_then(|k| Self::circle(k).ok()),
        }
    }
}

fn label(s: &[usize]) -> String {
    format!("{s:?}")
}

fn alt(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// (i, d_i s).
fn faces(s: &[usize]) -> impl Iterator<Item = (usize, Simplex)> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (i, f)
    })
}

/// Integral homology of the base and of the quotient, degree by degree.
#[derive(Clone, Debug, Serialize)]
pub struct HomologyCertificate {
    pub base: BTreeMap<i64, HomologyEntry>,
    pub quotient: BTreeMap<i64, HomologyEntry>,
    pub equal: bool,
}

/// K with a maximal tree collapsed to the base vertex.
#[derive(Clone, Debug)]
pub struct ReducedModel {
    base: SimplicialComplex,
    base_vertex: usize,
    tree: BTreeSet<(usize, usize)>,
    /// Nondegenerate simplices of K/T in dimension p ≥ 1; `cells[0]` is unused.
    cells: Vec<Vec<Simplex>>,
    cell_index: HashMap<Simplex, usize>,
    certificate: HomologyCertificate,
}

impl ReducedModel {
    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn base_vertex(&self) -> usize {
        self.base_vertex
    }

    pub fn tree(&self) -> &BTreeSet<(usize, usize)> {
        &self.tree
    }

    pub fn certificate(&self) -> &HomologyCertificate {
        &self.certificate
    }

    pub fn cells(&self, p: usize) -> &[Simplex] {
        if p == 0 {
            return &[];
        }
        self.cells.get(p).map_or(&[], |v| v)
    }

    pub fn in_tree(&self, s: &[usize]) -> bool {
        s.len() == 2 && self.tree.contains(&(s[0], s[1]))
    }

    /// Position of a surviving cell among `cells(dim)`.
    pub fn cell_index(&self, s: &[usize]) -> Option<usize> {
        self.cell_index.get(s).copied()
    }

    /// Normalized chains of K/T; degree 0 is the base point.
    pub fn chain_complex(&self, kind: ScalarKind) -> Result<ChainComplex> {
        let mut c = ChainComplex::new(kind);
        c.set_degree(0, vec!["*".into()], vec![0]);
        for p in 1..self.cells.len() {
            let cs = &self.cells[p];
            c.set_degree(p as i64, cs.iter().map(|s| label(s)).collect(), vec![p as u32; cs.len()]);
        }
        for p in 2..self.cells.len() {
            let mut t = Vec::new();
            for (j, s) in self.cells[p].iter().enumerate() {
                for (i, f) in faces(s) {
                    if let Some(r) = self.cell_index(&f) {
                        t.push((r, j, kind.from_i64(alt(i))));
                    }
                }
            }
            let d = SparseMatrix::from_triplets(kind, self.cells[p - 1].len(), self.cells[p].len(), t)?;
            c.set_differential(p as i64, d)?;
        }
        Ok(c)
    }
}

pub fn reduce_by_tree(k: &SimplicialComplex, base_vertex: usize) -> Result<ReducedModel> {
    if base_vertex >= k.n_vertices() {
        return Err(Error::Input(format!("base vertex {base_vertex} out of range")));
    }
    let (tree, seen) = k.bfs_tree(base_vertex);
    if seen.len() != k.n_vertices() {
        return Err(Error::Disconnected);
    }
    let mut cells = vec![Vec::new()];
    for p in 1..=k.dim().max(0) as usize {
        cells.push(
            k.simplices(p)
                .iter()
                .filter(|s| !(p == 1 && tree.contains(&(s[0], s[1]))))
                .cloned()
                .collect::<Vec<_>>(),
        );
    }
    let cell_index = cells
        .iter()
        .flat_map(|cs| cs.iter().cloned().enumerate().map(|(i, s)| (s, i)))
        .collect();
    let mut m = ReducedModel {
        base: k.clone(),
        base_vertex,
        tree,
        cells,
        cell_index,
        certificate: HomologyCertificate {
            base: BTreeMap::new(),
            quotient: BTreeMap::new(),
            equal: false,
        },
    };
    let hb = k.chain_complex(ScalarKind::Integer)?.homology_all()?.degrees;
    let hq = m.chain_complex(ScalarKind::Integer)?.homology_all()?.degrees;
    let strip = |h: &BTreeMap<i64, HomologyEntry>| -> Vec<(i64, usize, Vec<String>)> {
        h.iter()
            .filter(|(_, e)| e.rank > 0 || !e.torsion.is_empty())
            .map(|(&n, e)| (n, e.rank, e.torsion.iter().map(|x| x.to_string()).collect()))
            .collect()
    };
    let equal = strip(&hb) == strip(&hq);
    m.certificate = HomologyCertificate {
        base: hb,
        quotient: hq,
        equal,
    };
    if !equal {
        return Err(Error::ModelInvalid("tree collapse changed homology".into()));
    }
    Ok(m)
}

/// Normalized chains of K/T with the Alexander–Whitney coproduct;
/// generator order follows `cells`, dimension by dimension.
pub fn chains_coalgebra(m: &ReducedModel, kind: ScalarKind) -> Result<DGCoalgebra> {
    let mut offset = vec![0; m.cells.len() + 1];
    for p in 1..m.cells.len() {
        offset[p + 1] = offset[p] + m.cells[p].len();
    }
    let gen_of = |s: &[usize]| -> Option<usize> {
        if m.in_tree(s) || s.len() < 2 {
            return None;
        }
        m.cell_index(s).map(|i| offset[s.len() - 1] + i)
    };
    let mut gens = Vec::new();
    let mut diff: Vec<Comb> = Vec::new();
    let mut coproduct: Vec<Comb2> = Vec::new();
    for p in 1..m.cells.len() {
        for s in &m.cells[p] {
            gens.push(Generator::new(label(s), p as i64, p as u32));
            diff.push(
                faces(s)
                    .filter_map(|(i, f)| gen_of(&f).map(|g| (g, kind.from_i64(alt(i)))))
                    .collect(),
            );
            coproduct.push(
                (1..p)
                    .filter_map(|i| Some((gen_of(&s[..=i])?, gen_of(&s[i..])?, kind.one())))
                    .collect(),
            );
        }
    }
    if gens.iter().any(|g| g.degree < 1) {
        return Err(Error::ModelInvalid("cell of degree 0 survived".into()));
    }
    DGCoalgebra::new(kind, gens, diff, coproduct, Vec::new(), false)
}

/// Words in the non-tree edges; letter (g, true) is g, (g, false) is g⁻¹.
pub type Word = Vec<(usize, bool)>;

#[derive(Clone, Debug, Serialize)]
pub struct Presentation {
    /// Non-tree edges (a, b), a < b.
    pub generators: Vec<(usize, usize)>,
    /// One relator per 2-simplex [a, b, c]: ab · bc · (ac)⁻¹ with tree edges erased.
    pub relators: Vec<Word>,
}

pub fn pi1_presentation(m: &ReducedModel) -> Presentation {
    let generators: Vec<(usize, usize)> = m.cells(1).iter().map(|e| (e[0], e[1])).collect();
    let gen = |a: usize, b: usize| m.cell_index(&[a, b]).filter(|_| !m.in_tree(&[a, b]));
    let relators = m
        .cells(2)
        .iter()
        .map(|t| {
            [(t[0], t[1], true), (t[1], t[2], true), (t[0], t[2], false)]
                .into_iter()
                .filter_map(|(a, b, e)| gen(a, b).map(|g| (g, e)))
                .collect()
        })
        .collect();
    Presentation {
        generators,
        relators,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: ScalarKind = ScalarKind::Integer;
    const Q: ScalarKind = ScalarKind::Rational;

    fn betti(k: &SimplicialComplex) -> Vec<usize> {
        let h = k.chain_complex(Q).unwrap().homology_all().unwrap();
        h.ranks(0, k.dim())
    }

    #[test]
    fn builtin_homology() {
        assert_eq!(betti(&SimplicialComplex::sphere2()), vec![1, 0, 1]);
        assert_eq!(betti(&SimplicialComplex::torus7()), vec![1, 2, 1]);
        assert_eq!(betti(&SimplicialComplex::circle(5).unwrap()), vec![1, 1]);
        let rp2 = SimplicialComplex::rp2_min();
        assert_eq!(rp2.simplices(1).len(), 15);
        let h = rp2.chain_complex(Z).unwrap().homology_all().unwrap();
        assert_eq!(h.degrees[&1].rank, 0);
        assert_eq!(h.degrees[&1].torsion, vec![2.into()]);
        assert_eq!(h.degrees[&2].rank, 0);
    }

    #[test]
    fn surfaces_are_pseudomanifolds() {
        for k in [SimplicialComplex::rp2_min(), SimplicialComplex::torus7(), SimplicialComplex::sphere2()] {
            for e in k.simplices(1) {
                let n = k.facets().iter().filter(|f| e.iter().all(|v| f.contains(v))).count();
                assert_eq!(n, 2, "{e:?}");
            }
        }
    }

    #[test]
    fn tree_collapse() {
        let s1 = reduce_by_tree(&SimplicialComplex::circle(3).unwrap(), 0).unwrap();
        assert_eq!(s1.cells(1).len(), 1);
        let t = reduce_by_tree(&SimplicialComplex::torus7(), 0).unwrap();
        assert_eq!(t.tree().len(), 6);
        assert_eq!(t.cells(1).len(), 15);
        assert!(t.certificate().equal);
        let point = reduce_by_tree(&SimplicialComplex::new(2, vec![vec![0, 1]]).unwrap(), 1).unwrap();
        assert!(point.cells(1).is_empty());
        let two = SimplicialComplex::new(2, vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(reduce_by_tree(&two, 0), Err(Error::Disconnected)));
    }

    #[test]
    fn aw_coalgebras() {
        let s2 = chains_coalgebra(&reduce_by_tree(&SimplicialComplex::sphere2(), 0).unwrap(), Q).unwrap();
        let h = s2.chain_complex().unwrap().homology_all().unwrap();
        assert_eq!(h.ranks(0, 2), vec![1, 0, 1]);
        let s1 = chains_coalgebra(&reduce_by_tree(&SimplicialComplex::circle(3).unwrap(), 0).unwrap(), Q).unwrap();
        assert_eq!(s1.len(), 1);
        assert!(s1.delta(0).is_empty());
        for k in [SimplicialComplex::torus7(), SimplicialComplex::rp2_min()] {
            let c = chains_coalgebra(&reduce_by_tree(&k, 0).unwrap(), ScalarKind::Prime(2)).unwrap();
            assert_eq!(c.coassociativity_defect(), None);
            assert_eq!(c.coderivation_defect(), None);
        }
    }

    #[test]
    fn presentations() {
        let s1 = pi1_presentation(&reduce_by_tree(&SimplicialComplex::circle(3).unwrap(), 0).unwrap());
        assert_eq!((s1.generators.len(), s1.relators.len()), (1, 0));
        let seg = pi1_presentation(&reduce_by_tree(&SimplicialComplex::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap(), 0).unwrap());
        assert!(seg.generators.is_empty());
    }
}
