//! One-block preimage instances for MD5, SHA-1 and SHA-256.
//!
//! Each instance has 512 unknown message bits and the digest pinned as
//! constants. The block-size knob trades variable count against
//! coefficient magnitude: B=6 is compact, B=1 with a clause limit keeps
//! every coefficient small.
//!
//!     cargo run --release --example hash_preimage

use quboc::crypto::build::CryptoInstance;
use quboc::crypto::hashes::{build_md5, build_sha1, build_sha256, HashOptions};
use quboc::crypto::reference::{
    md5_compress_trace, sha1_compress_trace, sha256_compress_trace, MD5_INIT, SHA1_INIT,
    SHA256_INIT,
};

/// Message bits in build order: word-major, LSB-first within each word.
fn block_bits(block: &[u8; 64], little_endian: bool) -> Vec<bool> {
    block
        .chunks_exact(4)
        .flat_map(|chunk| {
            let arr: [u8; 4] = chunk.try_into().unwrap();
            let v = if little_endian {
                u32::from_le_bytes(arr)
            } else {
                u32::from_be_bytes(arr)
            };
            (0..32).map(move |i| v >> i & 1 == 1)
        })
        .collect()
}

fn check(name: &str, inst: &CryptoInstance, bits: &[bool]) {
    let report = inst.report();
    println!(
        "{name:<10} vars={:<6} density={:.3}% max|coeff|={}",
        report.num_vars, report.density_percent, report.max_abs_coeff
    );
    let assign = inst.witness(bits).unwrap();
    assert_eq!(inst.energy_of(&assign), 0, "{name}: witness must hit zero");
}

fn main() {
    let mut block = [0u8; 64];
    for (i, b) in block.iter_mut().enumerate() {
        *b = (37 * i + 11) as u8;
    }

    let (_, md5_target) = md5_compress_trace(MD5_INIT, &block);
    let (_, _, sha1_target) = sha1_compress_trace(SHA1_INIT, &block);
    let (_, _, sha256_target) = sha256_compress_trace(SHA256_INIT, &block);

    // compact builds: six-bit adder blocks, unlimited clause length
    let compact = HashOptions::default();
    check(
        "md5",
        &build_md5(md5_target, compact.clone()).unwrap(),
        &block_bits(&block, true),
    );
    check(
        "sha1",
        &build_sha1(sha1_target, compact.clone()).unwrap(),
        &block_bits(&block, false),
    );
    check(
        "sha256",
        &build_sha256(sha256_target, compact).unwrap(),
        &block_bits(&block, false),
    );

    // low-coefficient builds: single-bit adder blocks, 13-literal clauses
    let low = HashOptions {
        block_size: 1,
        clause_limit: Some(13),
    };
    let inst = build_md5(md5_target, low).unwrap();
    check("md5 (B=1)", &inst, &block_bits(&block, true));
    assert!(inst.report().max_abs_coeff <= 128);
    println!("B=1 build keeps every coefficient <= 128");
}
