//! Gaussian width of hypergraph polynomial maps, tensor-power matrix
//! constructions and the arithmetic-progression experiments built on them.

pub mod apmod;
pub mod birthday;
pub mod error;
pub mod gwidth;
pub mod hypergraph;
pub mod poly;
pub mod randsets;
pub mod rng;
pub mod sparse;
pub mod stats;
pub mod tensorlift;

pub use error::{Error, Result};
pub use hypergraph::Hypergraph;
pub use poly::{BitVector, SignVector};
pub use sparse::SparseMatrix;
pub use stats::McEstimate;
