//! ILP-based discovery of minimal-substitution QUBO encodings.

pub mod discover;
pub mod ilp;
pub mod simplex;
pub mod solver;
