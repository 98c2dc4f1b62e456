//! Compiling a boolean circuit to a QUBO instance.
//!
//! Parses a small s-expression circuit, flattens it into multi-input
//! clauses, extracts shared XOR sub-expressions, lowers it to a QUBO and
//! checks the zero set against direct circuit evaluation.
//!
//!     cargo run --example encode_circuit

use quboc::circuit::{apply_xor_reuse, flatten, parse_sexpr};
use quboc::compile::{lower, CompileOptions, OutputSpec};
use quboc::verify::brute_force_zero_set;

const SRC: &str = "
(inputs a b c d e)
(outputs (xor a b c d)
         (xor a b c e)
         (and a (or d e)))
";

fn main() {
    let circuit = parse_sexpr(SRC).unwrap();
    let flat = flatten(&circuit).unwrap();
    println!(
        "flattened: {} gates, {} literals",
        flat.gates.len(),
        flat.gates.iter().map(|g| g.lits.len()).sum::<usize>()
    );

    // a ⊕ b ⊕ c is shared by the first two outputs; reuse extracts it once
    let flat = apply_xor_reuse(&flat, 3);
    println!(
        "after XOR reuse: {} gates, {} literals",
        flat.gates.len(),
        flat.gates.iter().map(|g| g.lits.len()).sum::<usize>()
    );

    // pin the two parity outputs, leave the AND output free
    let outputs = vec![
        OutputSpec::Fixed(true),
        OutputSpec::Fixed(false),
        OutputSpec::Free,
    ];
    let compiled = lower(&flat, &outputs, &CompileOptions::default()).unwrap();
    let stats = compiled.qubo.stats();
    println!(
        "instance: {} vars, density {:.2}%, max |coeff| {}",
        stats.num_vars,
        stats.density * 100.0,
        stats.max_abs_coeff
    );

    // zero-energy input projections = assignments satisfying both pins
    let report = brute_force_zero_set(&compiled.qubo, &compiled.input_vars).unwrap();
    assert!(!report.has_negative);
    let expected: Vec<u64> = (0..32u64)
        .filter(|&mask| {
            let bits: Vec<bool> = (0..5).map(|i| mask >> i & 1 == 1).collect();
            let out = circuit.eval(&bits).unwrap();
            out[0] && !out[1]
        })
        .collect();
    assert_eq!(report.zero_set, expected);
    println!(
        "zero set matches circuit evaluation on all 32 inputs ({} satisfying)",
        expected.len()
    );

    // witnesses reach energy zero exactly on the satisfying inputs
    for &mask in &expected {
        let bits: Vec<bool> = (0..5).map(|i| mask >> i & 1 == 1).collect();
        let assign = compiled.witness(&bits).unwrap();
        assert_eq!(compiled.qubo.energy(&assign).unwrap(), 0);
    }
    println!("witness evaluation reaches energy 0 on every satisfying input");
}
