//! QUBO compilation of boolean formulas and cryptographic circuits.
//!
//! The crate provides:
//!
//! - [`qubo`]: a sparse integer QUBO container with exact energies,
//!   canonical upper-triangular storage and a qbsolv-compatible file format;
//! - [`patterns`]: closed-form encodings of parity, disjunction,
//!   population-count ranges, conjunction, modular addition and a set of
//!   ILP-discovered fixed fragments, each paired with a witness procedure;
//! - [`circuit`]: a gate-level IR with Bristol-fashion and s-expression
//!   frontends, plus flattening of gate chains into multi-input clauses;
//! - [`compile`]: lowering of flattened circuits onto pattern emissions and
//!   end-to-end witness evaluation;
//! - [`crypto`]: bit-exact reference implementations and full-scale QUBO
//!   builds of AES-128/192/256 (both directions), MD5, SHA-1 and SHA-256;
//! - [`search`]: an exact-arithmetic ILP engine that rediscovers minimal
//!   encodings for small truth tables;
//! - [`verify`]: exhaustive and sampled checks of emitted instances.

pub mod circuit;
pub mod cli;
pub mod compile;
pub mod crypto;
pub mod error;
pub mod patterns;
pub mod qubo;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
