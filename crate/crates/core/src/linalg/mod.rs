//! Exact linear algebra over ℚ, ℤ and 𝔽_p.

mod elim;
mod matrix;
mod scalar;
mod snf;

pub use elim::{kernel_basis, rank, solve, solve_sparse};
pub use matrix::{normalize_vec, SparseMatrix, SparseVec};
pub use scalar::{is_prime, Scalar, ScalarKind};
pub use snf::{determinant, smith_normal_form, Smith};
