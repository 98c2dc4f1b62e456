//! Cryptographic circuit builders and reference implementations.

pub mod aes;
pub mod build;
pub mod hashes;
pub mod reference;
pub mod sbox;
pub mod toy;
