//! Building an AES-128 key-recovery instance.
//!
//! The key bits are the unknowns; the plaintext block is folded in as
//! constants and the ciphertext is pinned through parity constraints. The
//! reference cipher supplies a witness that reaches energy zero.
//!
//! Uses 3 rounds to keep the build quick; pass `--full` for all 10 rounds.
//!
//!     cargo run --release --example aes_key_recovery [-- --full]

use quboc::crypto::aes::{build_aes, AesJob};
use quboc::crypto::reference::{aes_encrypt_trace, AesVariant};
use quboc::verify::sample_nonnegativity;

fn main() {
    let full = std::env::args().any(|a| a == "--full");
    let rounds = if full { 10 } else { 3 };

    // FIPS-197 appendix B key and block
    let key: [u8; 16] = [
        0x2b, 0x7e, 0x15, 0x16, 0x28, 0xae, 0xd2, 0xa6, 0xab, 0xf7, 0x15, 0x88, 0x09, 0xcf,
        0x4f, 0x3c,
    ];
    let pt: [u8; 16] = [
        0x32, 0x43, 0xf6, 0xa8, 0x88, 0x5a, 0x30, 0x8d, 0x31, 0x31, 0x98, 0xa2, 0xe0, 0x37,
        0x07, 0x34,
    ];
    let trace = aes_encrypt_trace(AesVariant::Aes128, rounds, &key, &pt).unwrap();
    let ct = *trace.last().unwrap();

    let job = AesJob {
        variant: AesVariant::Aes128,
        decrypt: false,
        rounds,
        known_block: pt,
        target: ct,
        clause_limit: None,
    };
    let instance = build_aes(&job).unwrap();
    let report = instance.report();
    println!(
        "{} ({} rounds): {} vars, {} terms, density {:.3}%, max |coeff| {}",
        report.algorithm,
        rounds,
        report.num_vars,
        report.num_terms,
        report.density_percent,
        report.max_abs_coeff
    );
    for (origin, count) in &report.breakdown {
        println!("  {origin:<12} {count}");
    }

    // the true key extends to a zero-energy assignment
    let key_bits: Vec<bool> = key
        .iter()
        .flat_map(|&b| (0..8).map(move |i| b >> i & 1 == 1))
        .collect();
    let assign = instance.witness(&key_bits).unwrap();
    assert_eq!(instance.energy_of(&assign), 0);
    println!("true-key witness energy: 0");

    // a wrong key cannot reach zero
    let mut bad = key_bits.clone();
    bad[0] = !bad[0];
    let assign = instance.witness(&bad).unwrap();
    assert!(instance.energy_of(&assign) >= 1);
    println!("flipped-key witness energy: >= 1");

    let min = sample_nonnegativity(&instance.qubo, 10_000, 1);
    assert!(min >= 0);
    println!("10k random assignments: min energy {min} (non-negative)");
}
