//! Graded modules, chain complexes (d of degree −1), chain maps, cones and
//! homology with per-degree trust flags.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{rank, smith_normal_form, Scalar, ScalarKind, SparseMatrix};

/// Basis labels and filtration weights in one degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreePart {
    pub labels: Vec<String>,
    pub weights: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    kind: ScalarKind,
    parts: BTreeMap<i64, DegreePart>,
    /// d_n : C_n → C_{n−1}; absent means zero.
    diff: BTreeMap<i64, SparseMatrix>,
    /// Degrees where a truncation removed nothing; `None` means untruncated.
    complete: Option<BTreeSet<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyEntry {
    pub rank: usize,
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
    pub trusted: bool,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HomologyTable {
    pub degrees: BTreeMap<i64, HomologyEntry>,
}

impl HomologyTable {
    pub fn rank(&self, n: i64) -> usize {
        self.degrees.get(&n).map_or(0, |e| e.rank)
    }

    pub fn ranks(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|n| self.rank(n)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees
            .values()
            .all(|e| e.rank == 0 && e.torsion.is_empty())
    }
}

impl ChainComplex {
    pub fn new(kind: ScalarKind) -> Self {
        ChainComplex {
            kind,
            parts: BTreeMap::new(),
            diff: BTreeMap::new(),
            complete: None,
        }
    }

    /// A complex with the given labels, all weights 0 and zero differential.
    pub fn from_labels(kind: ScalarKind, labels: BTreeMap<i64, Vec<String>>) -> Self {
        let mut c = Self::new(kind);
        for (n, l) in labels {
            let w = vec![0; l.len()];
            c.set_degree(n, l, w);
        }
        c
    }

    pub fn set_degree(&mut self, n: i64, labels: Vec<String>, weights: Vec<u32>) {
        assert_eq!(labels.len(), weights.len());
        if labels.is_empty() {
            self.parts.remove(&n);
        } else {
            self.parts.insert(n, DegreePart { labels, weights });
        }
    }

    pub fn set_differential(&mut self, n: i64, d: SparseMatrix) -> Result<()> {
        if d.kind() != self.kind {
            return Err(Error::ScalarMismatch {
                expected: self.kind,
                found: d.kind(),
            });
        }
        if d.n_cols() != self.dim(n) || d.n_rows() != self.dim(n - 1) {
            return Err(Error::DimensionMismatch(format!(
                "d_{n} is {}x{}, expected {}x{}",
                d.n_rows(),
                d.n_cols(),
                self.dim(n - 1),
                self.dim(n)
            )));
        }
        if d.is_zero() {
            self.diff.remove(&n);
        } else {
            self.diff.insert(n, d);
        }
        Ok(())
    }

    pub fn set_complete(&mut self, complete: Option<BTreeSet<i64>>) {
        self.complete = complete;
    }

    pub fn is_complete(&self, n: i64) -> bool {
        self.complete.as_ref().is_none_or(|s| s.contains(&n))
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn dim(&self, n: i64) -> usize {
        self.parts.get(&n).map_or(0, |p| p.labels.len())
    }

    pub fn total_dim(&self) -> usize {
        self.parts.values().map(|p| p.labels.len()).sum()
    }

    pub fn labels(&self, n: i64) -> &[String] {
        self.parts.get(&n).map_or(&[], |p| &p.labels)
    }

    pub fn weights(&self, n: i64) -> &[u32] {
        self.parts.get(&n).map_or(&[], |p| &p.weights)
    }

    /// Nonempty degrees, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        self.parts.keys().copied().collect()
    }

    pub fn d(&self, n: i64) -> SparseMatrix {
        self.diff
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.kind, self.dim(n - 1), self.dim(n)))
    }

    pub fn check_square_zero(&self) -> Result<()> {
        for (&n, d) in &self.diff {
            if let Some(d1) = self.diff.get(&(n - 1)) {
                if !d1.mul(d)?.is_zero() {
                    return Err(Error::DifferentialNotSquareZero(n));
                }
            }
        }
        Ok(())
    }

    fn trusted(&self, n: i64) -> bool {
        self.is_complete(n - 1) && self.is_complete(n) && self.is_complete(n + 1)
    }

    fn rank_of(&self, n: i64) -> Result<usize> {
        match self.diff.get(&n) {
            None => Ok(0),
            Some(d) if self.kind == ScalarKind::Integer => {
                Ok(smith_normal_form(d)?.divisors().len())
            }
            Some(d) => rank(d),
        }
    }

    /// Homology in degrees lo..=hi.
    pub fn homology(&self, lo: i64, hi: i64) -> Result<HomologyTable> {
        self.check_square_zero()?;
        let mut degrees = BTreeMap::new();
        for n in lo..=hi {
            let (rank, torsion) = if self.kind == ScalarKind::Integer {
                let r_out = self.rank_of(n)?;
                let (r_in, torsion) = match self.diff.get(&(n + 1)) {
                    None => (0, Vec::new()),
                    Some(d) => {
                        let div = smith_normal_form(d)?.divisors();
                        let t = div.iter().filter(|x| !x.is_one()).cloned().collect();
                        (div.len(), t)
                    }
                };
                (self.dim(n) - r_out - r_in, torsion)
            } else {
                (self.dim(n) - self.rank_of(n)? - self.rank_of(n + 1)?, Vec::new())
            };
            degrees.insert(
                n,
                HomologyEntry {
                    rank,
                    torsion,
                    trusted: self.trusted(n),
                },
            );
        }
        Ok(HomologyTable { degrees })
    }

    /// Homology over the full support.
    pub fn homology_all(&self) -> Result<HomologyTable> {
        let ds = self.degrees();
        match (ds.first(), ds.last()) {
            (Some(&lo), Some(&hi)) => self.homology(lo, hi),
            _ => Ok(HomologyTable::default()),
        }
    }

    /// Same complex with basis reordered: `perm[n][i]` is the new position of
    /// old basis element i in degree n.
    pub fn permuted(&self, perm: &BTreeMap<i64, Vec<usize>>) -> ChainComplex {
        let id = |n: i64| -> Vec<usize> {
            perm.get(&n)
                .cloned()
                .unwrap_or_else(|| (0..self.dim(n)).collect())
        };
        let mut out = ChainComplex::new(self.kind);
        for (&n, part) in &self.parts {
            let p = id(n);
            let mut labels = vec![String::new(); p.len()];
            let mut weights = vec![0; p.len()];
            for (i, &j) in p.iter().enumerate() {
                labels[j] = part.labels[i].clone();
                weights[j] = part.weights[i];
            }
            out.set_degree(n, labels, weights);
        }
        for (&n, d) in &self.diff {
            out.diff.insert(n, d.permuted(&id(n - 1), &id(n)));
        }
        out.complete = self.complete.clone();
        out
    }
}

/// A map of the given degree: component m sends source_m to target_{m+degree}.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub degree: i64,
    pub components: BTreeMap<i64, SparseMatrix>,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, degree: i64) -> Self {
        ChainMap {
            source,
            target,
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let mut f = ChainMap::new(c.clone(), c.clone(), 0);
        for n in c.degrees() {
            f.components
                .insert(n, SparseMatrix::identity(c.kind(), c.dim(n)));
        }
        f
    }

    pub fn component(&self, m: i64) -> SparseMatrix {
        self.components.get(&m).cloned().unwrap_or_else(|| {
            SparseMatrix::zeros(
                self.source.kind(),
                self.target.dim(m + self.degree),
                self.source.dim(m),
            )
        })
    }

    pub fn set_component(&mut self, m: i64, f: SparseMatrix) -> Result<()> {
        if f.n_cols() != self.source.dim(m) || f.n_rows() != self.target.dim(m + self.degree) {
            return Err(Error::DimensionMismatch(format!("map component at {m}")));
        }
        if !f.is_zero() {
            self.components.insert(m, f);
        }
        Ok(())
    }

    /// First source degree where d∘f ≠ (−1)^deg f∘d, if any.
    pub fn chain_map_defect(&self) -> Result<Option<i64>> {
        let sign = self.source.kind().from_i64(if self.degree % 2 == 0 { 1 } else { -1 });
        let mut ds: BTreeSet<i64> = self.source.degrees().into_iter().collect();
        ds.extend(self.target.degrees().iter().map(|n| n - self.degree));
        for m in ds {
            let lhs = self.target.d(m + self.degree).mul(&self.component(m))?;
            let rhs = self.component(m - 1).mul(&self.source.d(m))?.scale(&sign);
            if lhs != rhs {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    pub fn check(&self) -> Result<()> {
        match self.chain_map_defect()? {
            Some(m) => Err(Error::NotAChainMap(m)),
            None => Ok(()),
        }
    }
}

/// cone_m = target_m ⊕ source_{m−1−deg}, d = [d_T, f; 0, −(−1)^deg d_S].
pub fn cone(f: &ChainMap) -> Result<ChainComplex> {
    f.check()?;
    let kind = f.source.kind();
    let shift = 1 + f.degree;
    let mut ds: BTreeSet<i64> = f.target.degrees().into_iter().collect();
    ds.extend(f.source.degrees().iter().map(|n| n + shift));
    let mut out = ChainComplex::new(kind);
    for &m in &ds {
        let mut labels: Vec<String> = f.target.labels(m).iter().map(|l| format!("t:{l}")).collect();
        labels.extend(f.source.labels(m - shift).iter().map(|l| format!("s:{l}")));
        let mut weights = f.target.weights(m).to_vec();
        weights.extend_from_slice(f.source.weights(m - shift));
        out.set_degree(m, labels, weights);
    }
    let s_sign = kind.from_i64(if f.degree % 2 == 0 { -1 } else { 1 });
    for &m in &ds {
        let (tm, tm1) = (f.target.dim(m), f.target.dim(m - 1));
        let mut entries = Vec::new();
        for (i, j, x) in f.target.d(m).entries() {
            entries.push((i, j, x.clone()));
        }
        for (i, j, x) in f.component(m - shift).entries() {
            entries.push((i, tm + j, x.clone()));
        }
        for (i, j, x) in f.source.d(m - shift).entries() {
            entries.push((tm1 + i, tm + j, x * &s_sign));
        }
        let d = SparseMatrix::from_triplets(kind, out.dim(m - 1), out.dim(m), entries)?;
        out.set_differential(m, d)?;
    }
    let complete = match (&f.target.complete, &f.source.complete) {
        (None, None) => None,
        _ => {
            let lo = ds.first().copied().unwrap_or(0) - 2;
            let hi = ds.last().copied().unwrap_or(0) + 2;
            Some(
                (lo..=hi)
                    .filter(|&m| f.target.is_complete(m) && f.source.is_complete(m - shift))
                    .collect(),
            )
        }
    };
    out.set_complete(complete);
    Ok(out)
}

/// True iff the cone is acyclic in lo..=hi.
pub fn is_quasi_iso(f: &ChainMap, lo: i64, hi: i64) -> Result<bool> {
    Ok(cone(f)?.homology(lo, hi)?.is_zero())
}

/// Index of labeled generators, grouped by degree, in insertion order.
#[derive(Clone, Debug)]
pub struct LabeledBasis<K> {
    pub by_degree: BTreeMap<i64, Vec<K>>,
    pub weights: BTreeMap<i64, Vec<u32>>,
    index: HashMap<K, (i64, usize)>,
}

impl<K: Clone + Eq + Hash> LabeledBasis<K> {
    pub fn new(elems: impl IntoIterator<Item = (K, i64, u32)>) -> Self {
        let mut by_degree: BTreeMap<i64, Vec<K>> = BTreeMap::new();
        let mut weights: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        let mut index = HashMap::new();
        for (k, n, w) in elems {
            if index.contains_key(&k) {
                continue;
            }
            let v = by_degree.entry(n).or_default();
            index.insert(k.clone(), (n, v.len()));
            v.push(k);
            weights.entry(n).or_default().push(w);
        }
        LabeledBasis {
            by_degree,
            weights,
            index,
        }
    }

    pub fn position(&self, k: &K) -> Option<(i64, usize)> {
        self.index.get(k).copied()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn dim(&self, n: i64) -> usize {
        self.by_degree.get(&n).map_or(0, Vec::len)
    }

    pub fn get(&self, n: i64) -> &[K] {
        self.by_degree.get(&n).map_or(&[], |v| v)
    }

    /// Sparse coordinate vector of a linear combination living in degree n.
    pub fn coords(&self, n: i64, comb: &[(K, Scalar)]) -> Result<Vec<(usize, Scalar)>> {
        let mut out = Vec::with_capacity(comb.len());
        for (k, x) in comb {
            match self.index.get(k) {
                Some(&(m, i)) if m == n => out.push((i, x.clone())),
                Some(&(m, _)) => {
                    return Err(Error::GradingMismatch(format!(
                        "term in degree {m}, expected {n}"
                    )))
                }
                None => {
                    return Err(Error::StructureViolated(
                        "term outside the truncated basis".into(),
                    ))
                }
            }
        }
        Ok(crate::linalg::normalize_vec(out))
    }

    /// The complex with differential given on generators.
    pub fn complex(
        &self,
        kind: ScalarKind,
        label: impl Fn(&K) -> String,
        diff: impl Fn(&K) -> Vec<(K, Scalar)>,
    ) -> Result<ChainComplex> {
        let mut c = ChainComplex::new(kind);
        for (&n, ks) in &self.by_degree {
            c.set_degree(n, ks.iter().map(&label).collect(), self.weights[&n].clone());
        }
        for (&n, ks) in &self.by_degree {
            let cols = ks
                .iter()
                .map(|k| self.coords(n - 1, &diff(k)))
                .collect::<Result<Vec<_>>>()?;
            c.set_differential(n, SparseMatrix::from_columns(kind, self.dim(n - 1), cols)?)?;
        }
        Ok(c)
    }

    /// Matrix components of a map into `target`, given on generators.
    /// Terms outside the target basis are an error unless `drop_outside`.
    pub fn map_to<K2: Clone + Eq + Hash>(
        &self,
        target: &LabeledBasis<K2>,
        kind: ScalarKind,
        degree: i64,
        drop_outside: bool,
        f: impl Fn(&K) -> Vec<(K2, Scalar)>,
    ) -> Result<BTreeMap<i64, SparseMatrix>> {
        let mut out = BTreeMap::new();
        for (&n, ks) in &self.by_degree {
            let mut cols = Vec::with_capacity(ks.len());
            for k in ks {
                let mut img = f(k);
                if drop_outside {
                    img.retain(|(k2, _)| target.position(k2).is_some());
                }
                cols.push(target.coords(n + degree, &img)?);
            }
            let m = SparseMatrix::from_columns(kind, target.dim(n + degree), cols)?;
            if !m.is_zero() {
                out.insert(n, m);
            }
        }
        Ok(out)
    }
}

/// Linear combination accumulator keyed by generator.
pub fn collect_terms<K: Clone + Eq + Hash + Ord>(terms: Vec<(K, Scalar)>) -> Vec<(K, Scalar)> {
    let mut acc: BTreeMap<K, Scalar> = BTreeMap::new();
    for (k, x) in terms {
        match acc.get_mut(&k) {
            Some(y) => *y += &x,
            None => {
                acc.insert(k, x);
            }
        }
    }
    acc.into_iter().filter(|e| !e.1.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_boundary_s2(kind: ScalarKind) -> ChainComplex {
        // ∂Δ³: vertices 0..3, edges 01 02 03 12 13 23, triangles 012 013 023 123
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let tris = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];
        let mut c = ChainComplex::new(kind);
        c.set_degree(0, (0..4).map(|v| v.to_string()).collect(), vec![0; 4]);
        c.set_degree(1, edges.iter().map(|e| format!("{e:?}")).collect(), vec![0; 6]);
        c.set_degree(2, tris.iter().map(|t| format!("{t:?}")).collect(), vec![0; 4]);
        let d1 = edges
            .iter()
            .enumerate()
            .flat_map(|(j, &(a, b))| [(b, j, kind.one()), (a, j, kind.from_i64(-1))]);
        c.set_differential(1, SparseMatrix::from_triplets(kind, 4, 6, d1).unwrap())
            .unwrap();
        let eidx = |a, b| edges.iter().position(|&e| e == (a, b)).unwrap();
        let d2 = tris.iter().enumerate().flat_map(|(j, &(a, b, x))| {
            [
                (eidx(b, x), j, kind.one()),
                (eidx(a, x), j, kind.from_i64(-1)),
                (eidx(a, b), j, kind.one()),
            ]
        });
        c.set_differential(2, SparseMatrix::from_triplets(kind, 6, 4, d2).unwrap())
            .unwrap();
        c
    }

    #[test]
    fn sphere_betti() {
        let c = simplex_boundary_s2(ScalarKind::Rational);
        assert_eq!(c.homology(0, 2).unwrap().ranks(0, 2), vec![1, 0, 1]);
        let z = simplex_boundary_s2(ScalarKind::Integer);
        let h = z.homology(0, 2).unwrap();
        assert_eq!(h.ranks(0, 2), vec![1, 0, 1]);
        assert!(h.degrees.values().all(|e| e.torsion.is_empty()));
    }

    #[test]
    fn identity_cone_is_acyclic() {
        let c = simplex_boundary_s2(ScalarKind::Rational);
        let id = ChainMap::identity(&c);
        assert!(is_quasi_iso(&id, -1, 4).unwrap());
        let k = cone(&id).unwrap();
        k.check_square_zero().unwrap();
    }

    #[test]
    fn zero_map_cone() {
        let kind = ScalarKind::Rational;
        let mut c = ChainComplex::new(kind);
        c.set_degree(0, vec!["e".into()], vec![0]);
        let f = ChainMap::new(c.clone(), c.clone(), 0);
        let k = cone(&f).unwrap();
        assert_eq!(k.homology(0, 1).unwrap().ranks(0, 1), vec![1, 1]);
        assert!(!is_quasi_iso(&f, 0, 1).unwrap());
    }

    #[test]
    fn non_chain_map_is_rejected() {
        let c = simplex_boundary_s2(ScalarKind::Rational);
        let mut f = ChainMap::new(c.clone(), c.clone(), 0);
        f.set_component(1, SparseMatrix::identity(ScalarKind::Rational, 6))
            .unwrap();
        assert!(matches!(cone(&f), Err(Error::NotAChainMap(_))));
    }

    #[test]
    fn bad_differential_is_reported() {
        let kind = ScalarKind::Rational;
        let mut c = ChainComplex::new(kind);
        for n in 0..3 {
            c.set_degree(n, vec![format!("x{n}")], vec![0]);
        }
        c.set_differential(1, SparseMatrix::identity(kind, 1)).unwrap();
        c.set_differential(2, SparseMatrix::identity(kind, 1)).unwrap();
        assert_eq!(c.homology(0, 2), Err(Error::DifferentialNotSquareZero(2)));
    }

    #[test]
    fn odd_degree_cone() {
        // identity of k[1] → k viewed as a degree −1 map between one-term complexes
        let kind = ScalarKind::Rational;
        let mut s = ChainComplex::new(kind);
        s.set_degree(1, vec!["a".into()], vec![0]);
        let mut t = ChainComplex::new(kind);
        t.set_degree(0, vec!["b".into()], vec![0]);
        let mut f = ChainMap::new(s, t, -1);
        f.set_component(1, SparseMatrix::identity(kind, 1)).unwrap();
        assert!(is_quasi_iso(&f, -2, 3).unwrap());
    }
}
