//! Serializable verdicts and the matrices they rest on.

use serde::{Deserialize, Serialize};

use crate::complexes::ChainMap;
use crate::cyclic::Lift;
use crate::error::{Error, Result};
use crate::linalg::{ScalarKind, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Verified,
    VerifiedFiltered,
    Failed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Verified => "VERIFIED",
            Verdict::VerifiedFiltered => "VERIFIED_FILTERED",
            Verdict::Failed => "FAILED",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Weight cap L.
    pub level: u32,
    pub window: (i64, i64),
    /// Powers of u kept in the negative cyclic lift.
    pub u_powers: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            level: 4,
            window: (0, 3),
            u_powers: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub name: String,
    pub degree: i64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl MatrixRecord {
    pub fn new(name: &str, degree: i64, m: &SparseMatrix) -> Self {
        MatrixRecord {
            name: name.to_string(),
            degree,
            rows: m.n_rows(),
            cols: m.n_cols(),
            entries: m.entries().map(|(i, j, x)| (i, j, x.to_string())).collect(),
        }
    }

    pub fn to_matrix(&self, kind: ScalarKind) -> Result<SparseMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|(i, j, s)| {
                kind.parse(s)
                    .map(|x| (*i, *j, x))
                    .ok_or_else(|| Error::Input(format!("bad scalar {s:?} in {}", self.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        SparseMatrix::from_triplets(kind, self.rows, self.cols, entries)
    }
}

/// Source differentials, target differentials and map components of a
/// degree-`degree` chain map, enough to re-check d f = ± f d.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub scalar: String,
    pub degree: i64,
    pub matrices: Vec<MatrixRecord>,
    /// False when the size budget cut some degrees off.
    pub complete: bool,
}

pub const WITNESS_BUDGET: usize = 20_000;

impl Witness {
    pub fn from_map(f: &ChainMap, lo: i64, hi: i64) -> Self {
        let mut w = Witness {
            scalar: f.source.kind().to_string(),
            degree: f.degree,
            matrices: Vec::new(),
            complete: true,
        };
        let mut used = 0;
        for m in lo..=hi {
            let mats = [
                MatrixRecord::new("source_d", m, &f.source.d(m)),
                MatrixRecord::new("target_d", m + f.degree, &f.target.d(m + f.degree)),
                MatrixRecord::new("map", m, &f.component(m)),
                MatrixRecord::new("map", m - 1, &f.component(m - 1)),
            ];
            let size: usize = mats.iter().map(|r| r.entries.len()).sum();
            if used + size > WITNESS_BUDGET {
                w.complete = false;
                break;
            }
            used += size;
            for r in mats {
                if !w.matrices.contains(&r) {
                    w.matrices.push(r);
                }
            }
        }
        w
    }

    fn find(&self, name: &str, degree: i64) -> Option<&MatrixRecord> {
        self.matrices.iter().find(|r| r.name == name && r.degree == degree)
    }

    /// Re-checks d_T f_m = (−1)^deg f_{m−1} d_S at every recorded degree.
    pub fn replay(&self) -> Result<bool> {
        let kind = parse_kind(&self.scalar)?;
        let s = kind.from_i64(if self.degree % 2 == 0 { 1 } else { -1 });
        for r in self.matrices.iter().filter(|r| r.name == "source_d") {
            let m = r.degree;
            let (Some(td), Some(fm), Some(fm1)) = (
                self.find("target_d", m + self.degree),
                self.find("map", m),
                self.find("map", m - 1),
            ) else {
                continue;
            };
            let lhs = td.to_matrix(kind)?.mul(&fm.to_matrix(kind)?)?;
            let rhs = fm1.to_matrix(kind)?.mul(&r.to_matrix(kind)?)?.scale(&s);
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn parse_kind(s: &str) -> Result<ScalarKind> {
    match s {
        "Q" | "q" => Ok(ScalarKind::Rational),
        "Z" | "z" => Ok(ScalarKind::Integer),
        _ => s
            .strip_prefix("F_")
            .or_else(|| s.strip_prefix("fp:"))
            .and_then(|p| p.parse::<u64>().ok())
            .filter(|&p| crate::linalg::is_prime(p))
            .map(ScalarKind::Prime)
            .ok_or_else(|| Error::Input(format!("unknown scalar type {s:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub check: String,
    pub degree: i64,
    pub source_rank: usize,
    pub target_rank: usize,
    /// Whether the degree is computed without truncation error.
    pub trusted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftRecord {
    pub degree: i64,
    /// x_i as (basis index, scalar) pairs in degree degree + 2i.
    pub stages: Vec<Vec<(usize, String)>>,
    pub obstructed_at: Option<usize>,
}

impl LiftRecord {
    pub fn from_lift(l: &Lift) -> Self {
        LiftRecord {
            degree: l.degree,
            stages: l
                .stages
                .iter()
                .map(|v| v.iter().map(|(i, x)| (*i, x.to_string())).collect())
                .collect(),
            obstructed_at: l.obstructed_at,
        }
    }

    /// True iff every stage after the first is zero.
    pub fn is_strict(&self) -> bool {
        self.stages.iter().skip(1).all(|v| v.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CYReport {
    pub verdict: Verdict,
    pub n: i64,
    pub truncation: Truncation,
    /// No degree of the conclusion rests on truncated data alone.
    pub definitive: bool,
    pub checks: Vec<Check>,
    pub obstruction: Option<Obstruction>,
    pub lift: Option<LiftRecord>,
    pub witness: Witness,
}

impl CYReport {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}
