//! temp probe
use quboc::patterns::gf4_mult_table;
use quboc::search::discover::{discover, DiscoverOptions, DiscoverOutcome};
use quboc::search::ilp::TruthSpec;
use std::time::Instant;

fn main() {
    let table = gf4_mult_table();
    let mut masks = Vec::new();
    for a in 0..4u64 {
        for b in 0..4u64 {
            let z = table[a as usize][b as usize] as u64;
            masks.push(
                a & 1 | (a >> 1) << 1 | (b & 1) << 2 | (b >> 1) << 3 | (z & 1) << 4 | (z >> 1) << 5,
            );
        }
    }
    let spec = TruthSpec::new(6, &masks);
    let t0 = Instant::now();
    match discover(&spec, &DiscoverOptions::default()).unwrap() {
        DiscoverOutcome::Found(cert) => println!(
            "gf4: found n_subs={} bound={} minimal_at={:?} in {:?}",
            cert.n_subs, cert.coeff_bound, cert.minimal_at_bound, t0.elapsed()
        ),
        DiscoverOutcome::NotFound(ev) => {
            println!("gf4: NOT FOUND in {:?}", t0.elapsed());
            for a in ev.attempts {
                println!("  n_subs={} bound={} {}", a.n_subs, a.coeff_bound, a.verdict);
            }
        }
    }
}
