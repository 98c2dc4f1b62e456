//! ILP-discovered fixed encodings: small nonlinear functions with
//! hand-published coefficient sets (3-input XOR with result, ternary
//! selection, 3-input majority, the MD5 auxiliary function, GF(2²)
//! multiplication and GF(2⁴) multiplicative inverse).

use super::{Affine, Literal, PatternEmission, WitnessProc};
use crate::error::Result;
use crate::qubo::{QuboBuilder, VarId, VarKind, VarRegistry};

const NONE: i8 = -1;

/// Expands `Σ c · slot_a · slot_b` with literal substitution applied per
/// slot; an index of -1 denotes the constant 1.
fn build_terms(slots: &[Affine], terms: &[(i64, i8, i8)]) -> Result<crate::qubo::QuboInstance> {
    let one = Affine {
        constant: 1,
        ..Default::default()
    };
    let pick = |i: i8| -> &Affine {
        if i == NONE {
            &one
        } else {
            &slots[i as usize]
        }
    };
    let mut b = QuboBuilder::new();
    for &(c, i, j) in terms {
        let mut scaled = pick(i).clone();
        scaled.constant *= c;
        for v in scaled.coeffs.values_mut() {
            *v *= c;
        }
        scaled.mul_into(pick(j), &mut b)?;
    }
    Ok(b.build())
}

fn lit_slot(l: Literal) -> Affine {
    let mut a = Affine::new();
    a.add_lit(l, 1);
    a
}

fn var_slot(v: VarId) -> Affine {
    let mut a = Affine::new();
    a.add_var(v, 1);
    a
}

fn fresh_sub(reg: &mut VarRegistry, origin: &str) -> Result<VarId> {
    let name = format!("s{}", reg.len());
    reg.fresh(name, VarKind::Substitution, origin)
}

/// z = x0 ⊕ x1 ⊕ x2 with a single substitution bit:
/// (x0 + x1 + x2 − z + 2s − 2)².
pub fn encode_xor3_result(
    reg: &mut VarRegistry,
    x0: Literal,
    x1: Literal,
    x2: Literal,
    z: VarId,
) -> Result<PatternEmission> {
    let s = fresh_sub(reg, "xor3")?;
    let mut form = Affine::new();
    form.add_lit(x0, 1);
    form.add_lit(x1, 1);
    form.add_lit(x2, 1);
    form.add_var(z, -1);
    form.add_var(s, 2);
    form.add_const(-2);
    let mut b = QuboBuilder::new();
    form.square_into(&mut b)?;
    Ok(PatternEmission {
        fragment: b.build(),
        primary: vec![x0, x1, x2],
        results: vec![z],
        subst: vec![s],
        witness: WitnessProc::ExhaustiveMin,
    })
}

/// z = (x0 ∧ x1) ∨ (x̄0 ∧ x2), one substitution bit.
pub fn encode_ternary_select(
    reg: &mut VarRegistry,
    x0: Literal,
    x1: Literal,
    x2: Literal,
    z: VarId,
) -> Result<PatternEmission> {
    let s = fresh_sub(reg, "select")?;
    // slots: 0..2 inputs, 3 result, 4 substitution
    let slots = [
        lit_slot(x0),
        lit_slot(x1),
        lit_slot(x2),
        var_slot(z),
        var_slot(s),
    ];
    let terms: &[(i64, i8, i8)] = &[
        (-2, 0, NONE),
        (-2, 1, NONE),
        (-1, 2, NONE),
        (5, 3, NONE),
        (3, 0, 1),
        (1, 0, 2),
        (-2, 0, 3),
        (2, 1, 2),
        (-4, 1, 3),
        (-2, 2, 3),
        (4, 4, 0),
        (6, 4, 1),
        (2, 4, 2),
        (-4, 4, 3),
        (-2, 4, NONE),
        (2, NONE, NONE),
    ];
    Ok(PatternEmission {
        fragment: build_terms(&slots, terms)?,
        primary: vec![x0, x1, x2],
        results: vec![z],
        subst: vec![s],
        witness: WitnessProc::ExhaustiveMin,
    })
}

/// z = MAJ(x0, x1, x2), no substitution bits.
pub fn encode_majority3(
    _reg: &mut VarRegistry,
    x0: Literal,
    x1: Literal,
    x2: Literal,
    z: VarId,
) -> Result<PatternEmission> {
    let slots = [lit_slot(x0), lit_slot(x1), lit_slot(x2), var_slot(z)];
    let terms: &[(i64, i8, i8)] = &[
        (3, 3, NONE),
        (1, 0, 1),
        (1, 0, 2),
        (-2, 0, 3),
        (1, 1, 2),
        (-2, 1, 3),
        (-2, 2, 3),
    ];
    Ok(PatternEmission {
        fragment: build_terms(&slots, terms)?,
        primary: vec![x0, x1, x2],
        results: vec![z],
        subst: vec![],
        witness: WitnessProc::ExhaustiveMin,
    })
}

/// z = x0 ⊕ (x1 ∨ x̄2), the MD5 I-round auxiliary function, one
/// substitution bit.
pub fn encode_md5_i_aux(
    reg: &mut VarRegistry,
    x0: Literal,
    x1: Literal,
    x2: Literal,
    z: VarId,
) -> Result<PatternEmission> {
    let s = fresh_sub(reg, "md5i")?;
    let slots = [
        lit_slot(x0),
        lit_slot(x1),
        lit_slot(x2),
        var_slot(z),
        var_slot(s),
    ];
    let terms: &[(i64, i8, i8)] = &[
        (-7, 0, NONE),
        (-8, 1, NONE),
        (-5, 2, NONE),
        (-7, 3, NONE),
        (4, 0, 1),
        (2, 0, 2),
        (4, 0, 3),
        (3, 1, 2),
        (4, 1, 3),
        (2, 2, 3),
        (6, 4, 0),
        (8, 4, 1),
        (4, 4, 2),
        (6, 4, 3),
        (-10, 4, NONE),
        (11, NONE, NONE),
    ];
    Ok(PatternEmission {
        fragment: build_terms(&slots, terms)?,
        primary: vec![x0, x1, x2],
        results: vec![z],
        subst: vec![s],
        witness: WitnessProc::ExhaustiveMin,
    })
}

/// (z1, z0) = (x1, x0) · (y1, y0) in GF(2²), two weak substitution bits.
pub fn encode_gf4_mult(
    reg: &mut VarRegistry,
    x: [Literal; 2],
    y: [Literal; 2],
    z: [VarId; 2],
) -> Result<PatternEmission> {
    let s0 = fresh_sub(reg, "gf4")?;
    let s1 = fresh_sub(reg, "gf4")?;
    // slots: x0 x1 y0 y1 z0 z1 s0 s1
    let slots = [
        lit_slot(x[0]),
        lit_slot(x[1]),
        lit_slot(y[0]),
        lit_slot(y[1]),
        var_slot(z[0]),
        var_slot(z[1]),
        var_slot(s0),
        var_slot(s1),
    ];
    let terms: &[(i64, i8, i8)] = &[
        (4, 0, NONE),
        (3, 4, NONE),
        (17, 5, NONE),
        (-4, 0, 1),
        (-3, 0, 3),
        (-4, 0, 4),
        (6, 0, 5),
        (1, 1, 2),
        (4, 1, 3),
        (2, 1, 4),
        (-7, 1, 5),
        (-2, 2, 4),
        (-10, 2, 5),
        (2, 3, 4),
        (-5, 3, 5),
        (-4, 4, 5),
        (8, 6, 0),
        (-7, 6, 1),
        (11, 6, 2),
        (-7, 6, 3),
        (-8, 6, 4),
        (-15, 7, 0),
        (13, 7, 1),
        (5, 7, 2),
        (9, 7, 3),
        (10, 7, 4),
        (-18, 7, 5),
        (11, 6, NONE),
        (11, 7, NONE),
        (-17, 6, 7),
    ];
    Ok(PatternEmission {
        fragment: build_terms(&slots, terms)?,
        primary: vec![x[0], x[1], y[0], y[1]],
        results: z.to_vec(),
        subst: vec![s0, s1],
        witness: WitnessProc::ExhaustiveMin,
    })
}

/// (z3..z0) = (x3..x0)⁻¹ in GF(2⁴) (zero maps to zero), one substitution
/// bit.
pub fn encode_gf16_inv(
    reg: &mut VarRegistry,
    x: [Literal; 4],
    z: [VarId; 4],
) -> Result<PatternEmission> {
    let s = fresh_sub(reg, "gf16")?;
    // slots: x0..x3, z0..z3, s
    let slots = [
        lit_slot(x[0]),
        lit_slot(x[1]),
        lit_slot(x[2]),
        lit_slot(x[3]),
        var_slot(z[0]),
        var_slot(z[1]),
        var_slot(z[2]),
        var_slot(z[3]),
        var_slot(s),
    ];
    let terms: &[(i64, i8, i8)] = &[
        (32, 0, NONE),
        (-13, 1, NONE),
        (31, 2, NONE),
        (73, 3, NONE),
        (-3, 5, NONE),
        (-17, 7, NONE),
        (21, 0, 1),
        (-49, 0, 2),
        (-32, 0, 3),
        (65, 0, 4),
        (10, 0, 5),
        (-59, 0, 6),
        (-38, 0, 7),
        (-13, 1, 2),
        (-19, 1, 3),
        (26, 1, 4),
        (4, 1, 5),
        (-9, 1, 6),
        (2, 1, 7),
        (26, 2, 3),
        (-58, 2, 4),
        (-12, 2, 5),
        (38, 2, 6),
        (18, 2, 7),
        (-59, 3, 4),
        (-8, 3, 5),
        (-20, 3, 7),
        (14, 4, 5),
        (-27, 4, 6),
        (-6, 5, 6),
        (54, 6, 7),
        (32, 8, 1),
        (-72, 8, 3),
        (59, 8, 4),
        (10, 8, 5),
        (59, 8, 6),
        (75, 8, 7),
        (-28, 8, NONE),
        (28, NONE, NONE),
    ];
    Ok(PatternEmission {
        fragment: build_terms(&slots, terms)?,
        primary: x.to_vec(),
        results: z.to_vec(),
        subst: vec![s],
        witness: WitnessProc::ExhaustiveMin,
    })
}

/// The GF(2²) multiplication table in the published basis, recovered by
/// enumerating the fragment's zero set. Element value = bit0 + 2·bit1.
pub fn gf4_mult_table() -> [[u8; 4]; 4] {
    let mut reg = VarRegistry::new();
    let mut v = |n: &str| reg.fresh(n, VarKind::Intermediate, "table").unwrap();
    let xs = [Literal::pos(v("x0")), Literal::pos(v("x1"))];
    let ys = [Literal::pos(v("y0")), Literal::pos(v("y1"))];
    let zs = [v("z0"), v("z1")];
    let em = encode_gf4_mult(&mut reg, xs, ys, zs).unwrap();
    let mut table = [[4u8; 4]; 4];
    for x in 0..4u8 {
        for y in 0..4u8 {
            for z in 0..4u8 {
                let get = |v: VarId| match v.0 {
                    0 => x & 1 == 1,
                    1 => x & 2 == 2,
                    2 => y & 1 == 1,
                    3 => y & 2 == 2,
                    4 => z & 1 == 1,
                    5 => z & 2 == 2,
                    _ => unreachable!(),
                };
                if em.minimize_subst(&get).0 == 0 {
                    assert_eq!(table[x as usize][y as usize], 4, "ambiguous product");
                    table[x as usize][y as usize] = z;
                }
            }
        }
    }
    assert!(table.iter().flatten().all(|&z| z < 4), "incomplete table");
    table
}

/// The GF(2⁴) multiplicative-inverse table in the published basis,
/// recovered from the fragment's zero set. Element value = Σ bit_i · 2^i.
pub fn gf16_inv_table() -> [u8; 16] {
    let mut reg = VarRegistry::new();
    let mut v = |n: String| reg.fresh(n, VarKind::Intermediate, "table").unwrap();
    let xs: Vec<VarId> = (0..4).map(|i| v(format!("x{i}"))).collect();
    let zs: Vec<VarId> = (0..4).map(|i| v(format!("z{i}"))).collect();
    let em = encode_gf16_inv(
        &mut reg,
        [0, 1, 2, 3].map(|i| Literal::pos(xs[i])),
        [0, 1, 2, 3].map(|i| zs[i]),
    )
    .unwrap();
    let mut table = [16u8; 16];
    for x in 0..16u8 {
        for z in 0..16u8 {
            let get = |v: VarId| {
                let i = v.index();
                if i < 4 {
                    x >> i & 1 == 1
                } else {
                    z >> (i - 4) & 1 == 1
                }
            };
            if em.minimize_subst(&get).0 == 0 {
                assert_eq!(table[x as usize], 16, "ambiguous inverse");
                table[x as usize] = z;
            }
        }
    }
    assert!(table.iter().all(|&z| z < 16), "incomplete table");
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(reg: &mut VarRegistry, n: &str) -> VarId {
        reg.fresh(n, VarKind::Intermediate, "test").unwrap()
    }

    fn check_table(em: &PatternEmission, vars: &[VarId], pred: &dyn Fn(u64) -> bool) {
        for mask in 0..1u64 << vars.len() {
            let get = |x: VarId| {
                vars.iter()
                    .position(|&p| p == x)
                    .map(|i| mask >> i & 1 == 1)
                    .unwrap()
            };
            let (min, _) = em.minimize_subst(&get);
            if pred(mask) {
                assert_eq!(min, 0, "mask {mask:05b}");
            } else {
                assert!(min >= 1, "mask {mask:05b}: got {min}");
            }
        }
    }

    #[test]
    fn xor3_result_zero_set() {
        let mut reg = VarRegistry::new();
        let vars: Vec<VarId> = ["x0", "x1", "x2", "z"].iter().map(|n| v(&mut reg, n)).collect();
        let em = encode_xor3_result(
            &mut reg,
            Literal::pos(vars[0]),
            Literal::pos(vars[1]),
            Literal::pos(vars[2]),
            vars[3],
        )
        .unwrap();
        assert_eq!(em.subst.len(), 1);
        check_table(&em, &vars, &|m| {
            (m & 1 ^ m >> 1 & 1 ^ m >> 2 & 1) == m >> 3 & 1
        });
    }

    #[test]
    fn xor3_spot_values() {
        // (0,0,0,z=0) with s=1: (0 - 0 + 2 - 2)^2 = 0
        // (1,1,1,z=1) with s=0: (3 - 1 - 2)^2 = 0; with s=1: 16... = 4^2
        let mut reg = VarRegistry::new();
        let vars: Vec<VarId> = ["x0", "x1", "x2", "z"].iter().map(|n| v(&mut reg, n)).collect();
        let em = encode_xor3_result(
            &mut reg,
            Literal::pos(vars[0]),
            Literal::pos(vars[1]),
            Literal::pos(vars[2]),
            vars[3],
        )
        .unwrap();
        let s = em.subst[0];
        let e = |bits: [bool; 4], sv: bool| {
            crate::patterns::energy_with(&em.fragment, &|x: VarId| {
                if x == s {
                    sv
                } else {
                    bits[vars.iter().position(|&p| p == x).unwrap()]
                }
            })
        };
        assert_eq!(e([false, false, false, false], true), 0);
        assert_eq!(e([true, true, true, true], true), 4);
        assert_eq!(e([true, true, true, true], false), 0);
    }

    #[test]
    fn ternary_select_zero_set() {
        let mut reg = VarRegistry::new();
        let vars: Vec<VarId> = ["x0", "x1", "x2", "z"].iter().map(|n| v(&mut reg, n)).collect();
        let em = encode_ternary_select(
            &mut reg,
            Literal::pos(vars[0]),
            Literal::pos(vars[1]),
            Literal::pos(vars[2]),
            vars[3],
        )
        .unwrap();
        assert_eq!(em.subst.len(), 1);
        check_table(&em, &vars, &|m| {
            let (x0, x1, x2) = (m & 1 == 1, m >> 1 & 1 == 1, m >> 2 & 1 == 1);
            let sel = if x0 { x1 } else { x2 };
            sel == (m >> 3 & 1 == 1)
        });
    }

    #[test]
    fn ternary_select_published_coefficients() {
        let mut reg = VarRegistry::new();
        let vars: Vec<VarId> = ["x0", "x1", "x2", "z"].iter().map(|n| v(&mut reg, n)).collect();
        let em = encode_ternary_select(
            &mut reg,
            Literal::pos(vars[0]),
            Literal::pos(vars[1]),
            Literal::pos(vars[2]),
            vars[3],
        )
        .unwrap();
        let s = em.subst[0];
        let q = &em.fragment;
        assert_eq!(q.offset(), 2);
        assert_eq!(q.linear()[&vars[0]], -2);
        assert_eq!(q.linear()[&vars[3]], 5);
        assert_eq!(q.linear()[&s], -2);
        assert_eq!(q.quadratic()[&(vars[0], vars[1])], 3);
        assert_eq!(q.quadratic()[&(vars[1], s)], 6);
        assert_eq!(q.quadratic()[&(vars[3], s)], -4);
    }

    #[test]
    fn majority3_zero_set() {
        let mut reg = VarRegistry::new();
        let vars: Vec<VarId> = ["x0", "x1", "x2", "z"].iter().map(|n| v(&mut reg, n)).collect();
        let em = encode_majority3(
            &mut reg,
            Literal::pos(vars[0]),
            Literal::pos(vars[1]),
            Literal::pos(vars[2]),
            vars[3],
        )
        .unwrap();
        assert!(em.subst.is_empty());
        check_table(&em, &vars, &|m| {
            let c = (m & 1) + (m >> 1 & 1) + (m >> 2 & 1);
            (c >= 2) == (m >> 3 & 1 == 1)
        });
    }

    #[test]
    fn md5_i_aux_zero_set() {
        let mut reg = VarRegistry::new();
        let vars: Vec<VarId> = ["x0", "x1", "x2", "z"].iter().map(|n| v(&mut reg, n)).collect();
        let em = encode_md5_i_aux(
            &mut reg,
            Literal::pos(vars[0]),
            Literal::pos(vars[1]),
            Literal::pos(vars[2]),
            vars[3],
        )
        .unwrap();
        check_table(&em, &vars, &|m| {
            let (x0, x1, x2) = (m & 1 == 1, m >> 1 & 1 == 1, m >> 2 & 1 == 1);
            (x0 ^ (x1 || !x2)) == (m >> 3 & 1 == 1)
        });
    }

    #[test]
    fn gf4_mult_is_a_field_table() {
        let t = gf4_mult_table();
        // commutative, zero-absorbing, has an identity, nonzero rows are
        // permutations of {1, 2, 3}
        let mut identity = None;
        for a in 0..4 {
            assert_eq!(t[0][a], 0);
            assert_eq!(t[a][0], 0);
            for b in 0..4 {
                assert_eq!(t[a][b], t[b][a]);
            }
            if (0..4).all(|b| t[a][b] == b as u8) {
                identity = Some(a);
            }
            if a != 0 {
                let mut row: Vec<u8> = (1..4).map(|b| t[a][b]).collect();
                row.sort_unstable();
                assert_eq!(row, vec![1, 2, 3]);
            }
        }
        assert!(identity.is_some());
    }

    #[test]
    fn gf16_inv_is_an_involution() {
        let t = gf16_inv_table();
        assert_eq!(t[0], 0);
        for a in 1..16usize {
            assert_ne!(t[a], 0);
            assert_eq!(t[t[a] as usize] as usize, a, "inv(inv({a}))");
        }
    }

    #[test]
    fn gf16_published_coefficients() {
        let mut reg = VarRegistry::new();
        let xs: Vec<VarId> = (0..4).map(|i| v(&mut reg, &format!("x{i}"))).collect();
        let zs: Vec<VarId> = (0..4).map(|i| v(&mut reg, &format!("z{i}"))).collect();
        let em = encode_gf16_inv(
            &mut reg,
            [0, 1, 2, 3].map(|i| Literal::pos(xs[i])),
            [0, 1, 2, 3].map(|i| zs[i]),
        )
        .unwrap();
        let q = &em.fragment;
        let s = em.subst[0];
        assert_eq!(q.offset(), 28);
        assert_eq!(q.linear()[&xs[3]], 73);
        assert_eq!(q.linear()[&s], -28);
        assert_eq!(q.quadratic()[&(xs[0], zs[0])], 65);
        assert_eq!(q.quadratic()[&(zs[2], zs[3])], 54);
        assert_eq!(q.quadratic()[&(zs[3], s)], 75);
        assert_eq!(q.quadratic().get(&(xs[3], zs[2])), None);
    }
}
