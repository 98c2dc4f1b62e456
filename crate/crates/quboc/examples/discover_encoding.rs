//! Rediscovering minimal quadratic encodings by ILP search.
//!
//! Given only a truth table, the search finds integer coefficients of a
//! quadratic polynomial that is non-negative everywhere and reaches zero
//! exactly on the table's rows, adding substitution bits one at a time
//! until a feasible system exists. Each certificate is rechecked
//! exhaustively before it is returned.
//!
//!     cargo run --release --example discover_encoding

use quboc::search::discover::{discover, DiscoverOptions, DiscoverOutcome};
use quboc::search::ilp::TruthSpec;
use std::time::Instant;

fn run(name: &str, spec: &TruthSpec, expect_subs: usize) {
    let t0 = Instant::now();
    let opts = DiscoverOptions::default();
    match discover(spec, &opts).unwrap() {
        DiscoverOutcome::Found(cert) => {
            println!(
                "{name:<16} n_subs={} bound={} minimal_at={:?} strength={:?} ({:.2?})",
                cert.n_subs,
                cert.coeff_bound,
                cert.minimal_at_bound,
                cert.strength,
                t0.elapsed()
            );
            assert_eq!(cert.n_subs, expect_subs);
            cert.recheck(spec).unwrap();
        }
        DiscoverOutcome::NotFound(ev) => {
            panic!("{name}: no encoding found after {} attempts", ev.attempts.len());
        }
    }
}

fn main() {
    // majority over three bits with the result as a fourth primary bit:
    // already quadratic, no substitution needed
    let majority: Vec<u64> = (0..8u64)
        .map(|m| {
            let r = (m.count_ones() >= 2) as u64;
            m | r << 3
        })
        .collect();
    run("majority-3", &TruthSpec::new(4, &majority), 0);

    // 3-input XOR with result: degree 4 as a polynomial, needs one
    // substitution bit
    let xor3: Vec<u64> = (0..8u64)
        .map(|m| {
            let r = m.count_ones() as u64 & 1;
            m | r << 3
        })
        .collect();
    run("xor3-result", &TruthSpec::new(4, &xor3), 1);

    // ternary select z = s ? a : b, also one substitution bit
    let select: Vec<u64> = (0..8u64)
        .map(|m| {
            let (s, a, b) = (m & 1, m >> 1 & 1, m >> 2 & 1);
            let z = if s == 1 { a } else { b };
            m | z << 3
        })
        .collect();
    run("ternary-select", &TruthSpec::new(4, &select), 1);

    println!("all certificates passed exhaustive recheck");
}
