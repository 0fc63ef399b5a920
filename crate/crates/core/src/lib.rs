//! Exact column-vector calculus on lattice polytopes.

pub mod autos;
pub mod columns;
pub mod corpus;
pub mod divisibility;
pub mod doubling;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod par;
pub mod polygon;
pub mod polytope;
pub mod rigid;
pub mod ring;
pub mod steinberg;
pub mod triangular;

pub use columns::{column_vectors, ColSet, ColumnVector, LongProduct};
pub use error::{Error, Result};
pub use polytope::{are_integrally_affinely_equivalent, AffineMap, Facet, GradedPoint, LatticePolytope};
