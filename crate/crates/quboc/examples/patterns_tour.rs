//! A tour of the closed-form encoding patterns.
//!
//! Emits a fragment per pattern family, prints its size and coefficient
//! profile, and checks the zero set exhaustively against the predicate.
//!
//!     cargo run --example patterns_tour

use quboc::patterns::{
    encode_gf4_mult, encode_majority3, encode_modular_add, encode_or, encode_parity,
    encode_range, gf4_mult_table, Literal, ModularAddSpec, PatternEmission, Wire,
};
use quboc::qubo::{VarKind, VarRegistry};
use quboc::verify::check_emission;

fn show(name: &str, reg: &VarRegistry, em: &PatternEmission) {
    let stats = em.fragment.stats();
    println!(
        "{name:<18} vars={:<3} subs={:<2} max|coeff|={:<5} offset={}",
        reg.len(),
        em.subst.len(),
        stats.max_abs_coeff,
        stats.offset
    );
}

fn main() {
    // 10-input OR: the range [1, 10] over the popcount, 3 substitution bits
    let mut reg = VarRegistry::new();
    let xs: Vec<Literal> = (0..10)
        .map(|i| {
            Literal::pos(
                reg.fresh(format!("x{i}"), VarKind::CircuitInput, "example")
                    .unwrap(),
            )
        })
        .collect();
    let em = encode_or(&mut reg, &xs, None).unwrap();
    show("or-10", &reg, &em);
    let report = check_emission(&em, &|get| xs.iter().any(|l| l.eval(get))).unwrap();
    assert!(report.pass, "{:?}", report.failure);

    // 7-input parity constraint
    let mut reg = VarRegistry::new();
    let xs: Vec<Literal> = (0..7)
        .map(|i| {
            Literal::pos(
                reg.fresh(format!("x{i}"), VarKind::CircuitInput, "example")
                    .unwrap(),
            )
        })
        .collect();
    let em = encode_parity(&mut reg, &xs, None).unwrap();
    show("parity-7", &reg, &em);
    let report = check_emission(&em, &|get| {
        xs.iter().fold(false, |acc, l| acc ^ l.eval(get))
    })
    .unwrap();
    assert!(report.pass, "{:?}", report.failure);

    // popcount range 2..=5 of 6 inputs
    let mut reg = VarRegistry::new();
    let xs: Vec<Literal> = (0..6)
        .map(|i| {
            Literal::pos(
                reg.fresh(format!("x{i}"), VarKind::CircuitInput, "example")
                    .unwrap(),
            )
        })
        .collect();
    let em = encode_range(&mut reg, &xs, 2, 5).unwrap();
    show("range-2-5", &reg, &em);
    let report = check_emission(&em, &|get| {
        let c = xs.iter().filter(|l| l.eval(get)).count();
        (2..=5).contains(&c)
    })
    .unwrap();
    assert!(report.pass, "{:?}", report.failure);

    // majority over three bits with a result variable
    let mut reg = VarRegistry::new();
    let v: Vec<_> = (0..3)
        .map(|i| reg.fresh(format!("x{i}"), VarKind::CircuitInput, "example").unwrap())
        .collect();
    let z = reg.fresh("z", VarKind::Intermediate, "example").unwrap();
    let em = encode_majority3(
        &mut reg,
        Literal::pos(v[0]),
        Literal::pos(v[1]),
        Literal::pos(v[2]),
        z,
    )
    .unwrap();
    show("majority-3", &reg, &em);

    // GF(2^2) multiplication, the nonlinear heart of the AES S-box tower
    let mut reg = VarRegistry::new();
    let mut bit = |n: &str| reg.fresh(n, VarKind::CircuitInput, "example").unwrap();
    let (x0, x1, y0, y1) = (bit("x0"), bit("x1"), bit("y0"), bit("y1"));
    let z0 = reg.fresh("z0", VarKind::Intermediate, "example").unwrap();
    let z1 = reg.fresh("z1", VarKind::Intermediate, "example").unwrap();
    let em = encode_gf4_mult(
        &mut reg,
        [Literal::pos(x0), Literal::pos(x1)],
        [Literal::pos(y0), Literal::pos(y1)],
        [z0, z1],
    )
    .unwrap();
    show("gf4-mult", &reg, &em);
    let table = gf4_mult_table();
    let report = check_emission(&em, &|get| {
        let a = get(x0) as usize | (get(x1) as usize) << 1;
        let b = get(y0) as usize | (get(y1) as usize) << 1;
        let z = get(z0) as usize | (get(z1) as usize) << 1;
        table[a][b] as usize == z
    })
    .unwrap();
    assert!(report.pass, "{:?}", report.failure);

    // 3-input modular adder over 4 bits, block size 2
    let mut reg = VarRegistry::new();
    let mut word = |p: &str| -> Vec<Wire> {
        (0..4)
            .map(|i| {
                Wire::lit(
                    reg.fresh(format!("{p}{i}"), VarKind::CircuitInput, "example")
                        .unwrap(),
                )
            })
            .collect()
    };
    let (a, b, c, s) = (word("a"), word("b"), word("c"), word("s"));
    let spec = ModularAddSpec {
        inputs: vec![a.clone(), b.clone(), c.clone()],
        output: s.clone(),
        block_size: 2,
        width: 4,
    };
    let em = encode_modular_add(&mut reg, &spec).unwrap();
    show("add-3x4bit", &reg, &em);
    let word_val = |w: &[Wire], get: &dyn Fn(quboc::qubo::VarId) -> bool| -> u64 {
        w.iter()
            .enumerate()
            .map(|(i, wire)| (wire.eval(get) as u64) << i)
            .sum()
    };
    let report = check_emission(&em, &|get| {
        (word_val(&a, get) + word_val(&b, get) + word_val(&c, get)) % 16 == word_val(&s, get)
    })
    .unwrap();
    assert!(report.pass, "{:?}", report.failure);

    println!("all pattern zero sets verified exhaustively");
}
