//! Dg coalgebras, algebras, comodules and twisted tensor products.

mod algebra;
mod coalgebra;
mod comodule;
mod module;
mod twisted;
#[cfg(test)]
pub(crate) mod fixtures;

pub use algebra::*;
pub use coalgebra::*;
pub use comodule::*;
pub use module::*;
pub use twisted::*;
