//! JSON input documents and built-in examples.
//!
//! Every document has a top-level `kind`. Scalars are strings ("3", "-1/2")
//! so that they stay exact; basis elements are referred to by name.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use crate::cy_verify::FrobeniusDatum;
use crate::dgstruct::{coradical_weights, Comb, Comb2, DGAlgebra, DGCoalgebra, Generator};
use crate::error::{Error, Result};
use crate::lie::{ce_coalgebra, LieAlgebra};
use crate::linalg::{Scalar, ScalarKind, SparseMatrix};
use crate::spaces::{chains_coalgebra, reduce_by_tree, LocalSystem, ReducedModel, SimplicialComplex, Simplex};

#[derive(Clone, Debug)]
pub enum Document {
    Lie(LieAlgebra),
    Complex(ComplexDoc),
    Algebra(DGAlgebra),
    Coalgebra(DGCoalgebra),
    LocalSystem(LocalSystemDoc),
    Frobenius(FrobeniusDatum, Option<i64>),
}

impl Document {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Document::Lie(_) => "lie_algebra",
            Document::Complex(_) => "simplicial_complex",
            Document::Algebra(_) => "dg_algebra",
            Document::Coalgebra(_) => "dg_coalgebra",
            Document::LocalSystem(_) => "local_system",
            Document::Frobenius(..) => "frobenius",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComplexDoc {
    pub complex: SimplicialComplex,
    pub base_vertex: usize,
    /// Explicit fundamental cycle, if given.
    pub cycle: Option<Vec<(Simplex, Scalar)>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSystemDoc {
    #[serde(default)]
    pub name: Option<String>,
    pub rank: usize,
    /// Holonomy per edge (a, b), a < b; unlisted edges carry the identity.
    #[serde(default)]
    pub holonomy: Vec<EdgeMatrix>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeMatrix {
    pub edge: (usize, usize),
    pub matrix: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenDoc {
    name: String,
    degree: i64,
    #[serde(default)]
    weight: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LieDoc {
    basis: Vec<String>,
    #[serde(default)]
    brackets: Vec<BracketDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketDoc {
    pair: (String, String),
    value: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplicialDoc {
    vertices: usize,
    facets: Vec<Simplex>,
    #[serde(default)]
    base_vertex: usize,
    #[serde(default)]
    cycle: Option<Vec<(Simplex, String)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    generators: Vec<GenDoc>,
    /// [left, right, {result: coefficient}]
    #[serde(default)]
    products: Vec<(String, String, BTreeMap<String, String>)>,
    #[serde(default)]
    differential: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoalgebraDoc {
    generators: Vec<GenDoc>,
    /// Reduced coproduct: name → [[left, right, coefficient], ...]
    #[serde(default)]
    coproduct: BTreeMap<String, Vec<(String, String, String)>>,
    #[serde(default)]
    differential: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    cocommutative: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrobeniusDoc {
    algebra: AlgebraDoc,
    /// Trace on the unit ("1") and on generators; missing entries are 0.
    trace: BTreeMap<String, String>,
    #[serde(default)]
    n: Option<i64>,
}

fn scalar(kind: ScalarKind, s: &str, field: &str) -> Result<Scalar> {
    kind.parse(s)
        .ok_or_else(|| Error::Input(format!("{field}: {s:?} is not a scalar over {kind}")))
}

fn lookup(names: &[String], n: &str, field: &str) -> Result<usize> {
    names
        .iter()
        .position(|x| x == n)
        .ok_or_else(|| Error::Input(format!("{field}: unknown basis element {n:?}")))
}

fn comb(kind: ScalarKind, names: &[String], m: &BTreeMap<String, String>, field: &str) -> Result<Comb> {
    m.iter()
        .map(|(k, v)| Ok((lookup(names, k, field)?, scalar(kind, v, &format!("{field}.{k}"))?)))
        .collect()
}

fn field<T: for<'de> Deserialize<'de>>(v: Value, kind: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Input(format!("{kind} document: {e}")))
}

/// Parses one document. `scalar` is the coefficient type for all entries.
pub fn parse_document(text: &str, kind: ScalarKind) -> Result<Document> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Input(format!("JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Error::Input("top level must be an object".into()))?;
    let tag = obj
        .remove("kind")
        .and_then(|k| k.as_str().map(str::to_string))
        .ok_or_else(|| Error::Input("missing string field \"kind\"".into()))?;
    match tag.as_str() {
        "lie_algebra" => Ok(Document::Lie(lie_from(field(v, &tag)?, kind)?)),
        "simplicial_complex" => {
            let d: SimplicialDoc = field(v, &tag)?;
            let complex = SimplicialComplex::new(d.vertices, d.facets)?;
            let cycle = d
                .cycle
                .map(|c| {
                    c.into_iter()
                        .enumerate()
                        .map(|(i, (s, x))| Ok((s, scalar(kind, &x, &format!("cycle[{i}]"))?)))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            Ok(Document::Complex(ComplexDoc {
                complex,
                base_vertex: d.base_vertex,
                cycle,
            }))
        }
        "dg_algebra" => Ok(Document::Algebra(algebra_from(field(v, &tag)?, kind)?)),
        "dg_coalgebra" => Ok(Document::Coalgebra(coalgebra_from(field(v, &tag)?, kind)?)),
        "local_system" => Ok(Document::LocalSystem(field(v, &tag)?)),
        "frobenius" => {
            let d: FrobeniusDoc = field(v, &tag)?;
            let names: Vec<String> = d.algebra.generators.iter().map(|g| g.name.clone()).collect();
            let a = algebra_from(d.algebra, kind)?;
            let mut trace = vec![kind.zero(); names.len() + 1];
            for (k, x) in &d.trace {
                let i = if k == "1" { 0 } else { lookup(&names, k, "trace")? + 1 };
                trace[i] = scalar(kind, x, &format!("trace.{k}"))?;
            }
            Ok(Document::Frobenius(FrobeniusDatum::new(a, trace)?, d.n))
        }
        other => Err(Error::Input(format!(
            "unknown kind {other:?}; expected lie_algebra, simplicial_complex, dg_algebra, dg_coalgebra, local_system or frobenius"
        ))),
    }
}

fn lie_from(d: LieDoc, kind: ScalarKind) -> Result<LieAlgebra> {
    let brackets = d
        .brackets
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let f = format!("brackets[{i}]");
            Ok((lookup(&d.basis, &b.pair.0, &f)?, lookup(&d.basis, &b.pair.1, &f)?, comb(kind, &d.basis, &b.value, &f)?))
        })
        .collect::<Result<Vec<_>>>()?;
    LieAlgebra::new(kind, d.basis, brackets)
}

fn gens_from(gs: &[GenDoc], default_weight: impl Fn(usize) -> u32) -> Vec<Generator> {
    gs.iter()
        .enumerate()
        .map(|(i, g)| Generator::new(g.name.clone(), g.degree, g.weight.unwrap_or_else(|| default_weight(i))))
        .collect()
}

fn algebra_from(d: AlgebraDoc, kind: ScalarKind) -> Result<DGAlgebra> {
    let names: Vec<String> = d.generators.iter().map(|g| g.name.clone()).collect();
    let gens = gens_from(&d.generators, |_| 1);
    let mut product = BTreeMap::new();
    for (i, (l, r, v)) in d.products.iter().enumerate() {
        let f = format!("products[{i}]");
        product.insert((lookup(&names, l, &f)?, lookup(&names, r, &f)?), comb(kind, &names, v, &f)?);
    }
    let mut diff = vec![Vec::new(); names.len()];
    for (k, v) in &d.differential {
        diff[lookup(&names, k, "differential")?] = comb(kind, &names, v, &format!("differential.{k}"))?;
    }
    DGAlgebra::new(kind, gens, product, diff)
}

fn coalgebra_from(d: CoalgebraDoc, kind: ScalarKind) -> Result<DGCoalgebra> {
    let names: Vec<String> = d.generators.iter().map(|g| g.name.clone()).collect();
    let mut coproduct: Vec<Comb2> = vec![Vec::new(); names.len()];
    for (k, terms) in &d.coproduct {
        let i = lookup(&names, k, "coproduct")?;
        for (j, (a, b, x)) in terms.iter().enumerate() {
            let f = format!("coproduct.{k}[{j}]");
            coproduct[i].push((lookup(&names, a, &f)?, lookup(&names, b, &f)?, scalar(kind, x, &f)?));
        }
    }
    let mut diff = vec![Vec::new(); names.len()];
    for (k, v) in &d.differential {
        diff[lookup(&names, k, "differential")?] = comb(kind, &names, v, &format!("differential.{k}"))?;
    }
    let provisional = gens_from(&d.generators, |_| 1);
    let levels = coradical_weights(kind, &provisional, &coproduct);
    let gens = gens_from(&d.generators, |i| levels[i]);
    DGCoalgebra::new(kind, gens, diff, coproduct, Vec::new(), d.cocommutative)
}

impl LocalSystemDoc {
    /// Holonomies for the non-tree edges of `m`; tree edges must carry the identity.
    pub fn build(&self, m: &ReducedModel, kind: ScalarKind) -> Result<LocalSystem> {
        let r = self.rank;
        let mut by_edge: BTreeMap<(usize, usize), SparseMatrix> = BTreeMap::new();
        for (i, e) in self.holonomy.iter().enumerate() {
            let f = format!("holonomy[{i}]");
            let (a, b) = (e.edge.0.min(e.edge.1), e.edge.0.max(e.edge.1));
            if e.matrix.len() != r || e.matrix.iter().any(|row| row.len() != r) {
                return Err(Error::Input(format!("{f}: matrix must be {r}×{r}")));
            }
            let mut t = Vec::new();
            for (x, row) in e.matrix.iter().enumerate() {
                for (y, s) in row.iter().enumerate() {
                    t.push((x, y, scalar(kind, s, &format!("{f}.matrix[{x}][{y}]"))?));
                }
            }
            let mut mat = SparseMatrix::from_triplets(kind, r, r, t)?;
            if e.edge.0 > e.edge.1 {
                mat = LocalSystem::new("", kind, r, vec![mat])?.inverse_of(0);
            }
            if m.in_tree(&[a, b]) && mat != SparseMatrix::identity(kind, r) {
                return Err(Error::Input(format!("{f}: edge ({a}, {b}) is in the spanning tree and must carry the identity")));
            }
            if m.cell_index(&[a, b]).is_none() {
                return Err(Error::Input(format!("{f}: ({a}, {b}) is not an edge")));
            }
            by_edge.insert((a, b), mat);
        }
        let ms = m
            .cells(1)
            .iter()
            .map(|e| by_edge.remove(&(e[0], e[1])).unwrap_or_else(|| SparseMatrix::identity(kind, r)))
            .collect();
        LocalSystem::new(self.name.clone().unwrap_or_else(|| "input".into()), kind, r, ms)
    }
}

/// k[x]/x² with trace(x) = t_x and trace(1) = t_1.
pub fn dual_numbers(kind: ScalarKind, t1: i64, tx: i64) -> FrobeniusDatum {
    let a = DGAlgebra::new(kind, vec![Generator::new("x", 0, 1)], BTreeMap::new(), vec![vec![]]).expect("k[x]/x^2");
    FrobeniusDatum::new(a, vec![kind.from_i64(t1), kind.from_i64(tx)]).expect("trace length")
}

/// Λ(e), e in degree 1, trace(e) = 1.
pub fn exterior(kind: ScalarKind) -> FrobeniusDatum {
    let a = DGAlgebra::new(kind, vec![Generator::new("e", 1, 1)], BTreeMap::new(), vec![vec![]]).expect("Λ(e)");
    FrobeniusDatum::new(a, vec![kind.zero(), kind.one()]).expect("trace length")
}

/// Built-in Frobenius algebras with their dimension n.
pub fn builtin_frobenius(name: &str, kind: ScalarKind) -> Option<(FrobeniusDatum, i64)> {
    match name {
        "dual_numbers" => Some((dual_numbers(kind, 0, 1), 0)),
        "dual_numbers_degenerate" => Some((dual_numbers(kind, 1, 0), 0)),
        "exterior" => Some((exterior(kind), 1)),
        _ => None,
    }
}

/// `sphere` (one cell in degree 2), `ce:<lie builtin>`, `chains:<space builtin>`.
pub fn builtin_coalgebra(name: &str, kind: ScalarKind) -> Result<Option<DGCoalgebra>> {
    if name == "sphere" {
        return DGCoalgebra::new(kind, vec![Generator::new("s", 2, 1)], vec![vec![]], vec![vec![]], vec![], true).map(Some);
    }
    if let Some(l) = name.strip_prefix("ce:") {
        return match LieAlgebra::builtin(l, kind) {
            Some(g) => Ok(Some(ce_coalgebra(&g)?.coalgebra().clone())),
            None => Ok(None),
        };
    }
    if let Some(s) = name.strip_prefix("chains:") {
        return match SimplicialComplex::builtin(s) {
            Some(k) => chains_coalgebra(&reduce_by_tree(&k, 0)?, kind).map(Some),
            None => Ok(None),
        };
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: ScalarKind = ScalarKind::Rational;

    #[test]
    fn lie_document() {
        let text = r#"{"kind": "lie_algebra", "basis": ["x", "y", "z"],
            "brackets": [{"pair": ["x", "y"], "value": {"z": "1"}}]}"#;
        let Document::Lie(g) = parse_document(text, Q).unwrap() else { panic!() };
        assert_eq!(g, LieAlgebra::heisenberg(Q));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad = r#"{"kind": "lie_algebra", "basis": ["x"], "brackets": [{"pair": ["x", "w"], "value": {}}]}"#;
        let e = parse_document(bad, Q).unwrap_err().to_string();
        assert!(e.contains("brackets[0]") && e.contains("\"w\""), "{e}");
        let e = parse_document("{\"kind\": \"lie_algebra\",\n \"basis\": 3}", Q).unwrap_err().to_string();
        assert!(e.contains("lie_algebra"), "{e}");
        let e = parse_document("{\n\"kind\": }", Q).unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(parse_document(r#"{"kind": "group"}"#, Q).is_err());
    }

    #[test]
    fn coalgebra_and_frobenius_documents() {
        let text = r#"{"kind": "dg_coalgebra", "cocommutative": true,
            "generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 1}, {"name": "xy", "degree": 2}],
            "differential": {"xy": {"y": "-1"}},
            "coproduct": {"xy": [["x", "y", "1"], ["y", "x", "-1"]]}}"#;
        let Document::Coalgebra(c) = parse_document(text, Q).unwrap() else { panic!() };
        assert_eq!(c.weight(2), 2);
        let text = r#"{"kind": "frobenius", "n": 0, "algebra": {"generators": [{"name": "x", "degree": 0}]},
            "trace": {"x": "1"}}"#;
        let Document::Frobenius(f, n) = parse_document(text, Q).unwrap() else { panic!() };
        assert_eq!(n, Some(0));
        assert!(f.is_symmetric());
    }

    #[test]
    fn local_system_document() {
        let m = reduce_by_tree(&SimplicialComplex::circle(3).unwrap(), 0).unwrap();
        let text = r#"{"kind": "local_system", "rank": 1, "holonomy": [{"edge": [1, 2], "matrix": [["-1"]]}]}"#;
        let Document::LocalSystem(d) = parse_document(text, Q).unwrap() else { panic!() };
        let ell = d.build(&m, Q).unwrap();
        assert_eq!(ell.matrices()[0].get(0, 0), Q.from_i64(-1));
        let tree = r#"{"kind": "local_system", "rank": 1, "holonomy": [{"edge": [0, 1], "matrix": [["-1"]]}]}"#;
        let Document::LocalSystem(d) = parse_document(tree, Q).unwrap() else { panic!() };
        assert!(d.build(&m, Q).is_err());
    }
}
