use thiserror::Error;

use crate::linalg::ScalarKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank over the integers requested; use smith_normal_form")]
    IntegerRankRequest,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("scalar kind mismatch: expected {expected}, found {found}")]
    ScalarMismatch { expected: ScalarKind, found: ScalarKind },
    #[error("operation needs integer scalars")]
    NotInteger,
    #[error("d^2 != 0 at degree {0}")]
    DifferentialNotSquareZero(i64),
    #[error("not a chain map at degree {0}")]
    NotAChainMap(i64),
    #[error("Maurer-Cartan equation fails on basis element {0}")]
    MaurerCartanViolated(String),
    #[error("grading mismatch: {0}")]
    GradingMismatch(String),
    #[error("coalgebra is not conilpotent: {0}")]
    NotConilpotent(String),
    #[error("algebra is not augmented: {0}")]
    NotAugmented(String),
    #[error("structure check failed: {0}")]
    StructureViolated(String),
    #[error("window [{lo}, {hi}] is not trusted at truncation {level}")]
    WindowNotTrusted { lo: i64, hi: i64, level: u32 },
    #[error("element is not a cycle")]
    NotACycle,
    #[error("infinite rank input")]
    InfiniteRank,
    #[error("trace pairing is degenerate (rank {rank} of {dim})")]
    DegenerateTrace { rank: usize, dim: usize },
    #[error("Jacobi identity fails")]
    JacobiViolated,
    #[error("unimodularity ({unimodular}) disagrees with CY verdict ({verdict})")]
    VerdictMismatch { unimodular: bool, verdict: String },
    #[error("invalid simplicial model: {0}")]
    ModelInvalid(String),
    #[error("simplicial complex is disconnected")]
    Disconnected,
    #[error("complex is not orientable over this scalar ring")]
    NotOrientable,
    #[error("complex is not pure of dimension {0}")]
    NotPure(usize),
    #[error("local system relation fails on triangle {0:?}")]
    RelationViolated(Vec<usize>),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `perm` must be a permutation of 0..n.
pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Input(format!("{perm:?} is not a permutation of 0..{n}")));
    }
    Ok(())
}
