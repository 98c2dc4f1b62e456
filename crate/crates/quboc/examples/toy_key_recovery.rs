//! End-to-end key recovery on a miniature cipher.
//!
//! Full-size cipher instances are far beyond exhaustive search, so this
//! example uses an 8-bit one-round cipher built from the same fragment
//! plumbing (key whitening, GF(2⁴) inversion S-boxes, a linear mix). The
//! instance is small enough to enumerate completely: its zero-energy key
//! projections must equal the true preimage set.
//!
//!     cargo run --release --example toy_key_recovery

use quboc::crypto::toy::{build_toy, toy_encrypt};
use quboc::verify::brute_force_zero_set;
use std::collections::BTreeSet;

fn main() {
    let (key, pt) = (0xa5u8, 0x3cu8);
    let ct = toy_encrypt(key, pt);
    println!("toy cipher: pt={pt:02x} key={key:02x} -> ct={ct:02x}");

    let inst = build_toy(pt, ct).unwrap();
    let stats = inst.qubo.stats();
    println!(
        "instance: {} vars, max |coeff| {}, offset {}",
        stats.num_vars, stats.max_abs_coeff, stats.offset
    );
    assert!(stats.num_vars <= 26, "must stay enumerable");

    // enumerate all assignments; project zero-energy points onto the key
    let report = brute_force_zero_set(&inst.qubo, &inst.input_vars).unwrap();
    assert!(!report.has_negative, "energy must be non-negative");
    let recovered: BTreeSet<u8> = report.zero_set.iter().map(|&m| m as u8).collect();
    let expected: BTreeSet<u8> = (0..=255u8).filter(|&k| toy_encrypt(k, pt) == ct).collect();
    assert_eq!(recovered, expected);
    assert!(recovered.contains(&key));
    println!(
        "zero-energy keys {:02x?} = exact preimage set (cipher is a key permutation)",
        recovered.iter().collect::<Vec<_>>()
    );
}
