//! Chain-level bar/cobar Koszul duality and Calabi–Yau certificates over
//! exact arithmetic.

pub mod barcobar;
pub mod complexes;
pub mod cy_verify;
pub mod cyclic;
pub mod dgstruct;
pub mod error;
pub mod input;
pub mod lie;
pub mod linalg;
pub mod selftest;
pub mod spaces;

pub use error::{Error, Result};
