//! Parity, disjunction, population-count range and conjunction encoders.

use super::{Affine, Literal, PatternEmission, RelaxedExpansion, WitnessProc};
use crate::error::{Error, Result};
use crate::qubo::{QuboBuilder, VarId, VarKind, VarRegistry};

fn fresh_subs(reg: &mut VarRegistry, n: usize, origin: &str) -> Result<Vec<VarId>> {
    (0..n)
        .map(|_| {
            let name = format!("s{}", reg.len());
            reg.fresh(name, VarKind::Substitution, origin)
        })
        .collect()
}

/// Encodes odd parity of `xs` (multi-input XOR), or `result = XOR(xs)` when a
/// result bit is given: the square of the literal sum minus an odd slack
/// expanded over substitution bits.
pub fn encode_parity(
    reg: &mut VarRegistry,
    xs: &[Literal],
    result: Option<VarId>,
) -> Result<PatternEmission> {
    if xs.is_empty() {
        return Err(Error::Contract("parity over zero literals".into()));
    }
    // With a result bit the encoded predicate is the always-odd sum
    // Σ x_i + (1 - r).
    let mut sum = Affine::new();
    for &l in xs {
        sum.add_lit(l, 1);
    }
    if let Some(r) = result {
        sum.add_lit(Literal::neg(r), 1);
    }
    let n_terms = xs.len() + result.is_some() as usize;
    let t_max = (n_terms as i64 + 1) / 2;
    let expansion = RelaxedExpansion::parity(t_max);
    let subst = fresh_subs(reg, expansion.n_subs(), "parity")?;

    // (sum - (2t - 1))^2 with t = 1 + Σ c_i s_i
    let mut form = sum.clone();
    form.add_const(-1);
    for (&s, &c) in subst.iter().zip(&expansion.coefficients) {
        form.add_var(s, -2 * c);
    }
    let mut b = QuboBuilder::new();
    form.square_into(&mut b)?;

    Ok(PatternEmission {
        fragment: b.build(),
        primary: xs.to_vec(),
        results: result.into_iter().collect(),
        subst,
        witness: WitnessProc::Expansion { sum, expansion },
    })
}

/// Encodes `L <= popcount(xs) <= H` as the product of the literal sum minus
/// two substitution-expanded roots differing by one.
pub fn encode_range(
    reg: &mut VarRegistry,
    xs: &[Literal],
    lo: i64,
    hi: i64,
) -> Result<PatternEmission> {
    let n = xs.len() as i64;
    if lo > hi || hi > n || lo < 0 {
        return Err(Error::Contract(format!(
            "range [{lo}, {hi}] invalid for {n} literals"
        )));
    }
    let mut sum = Affine::new();
    for &l in xs {
        sum.add_lit(l, 1);
    }
    if lo == 0 && hi == n {
        // tautology
        return Ok(PatternEmission {
            fragment: QuboBuilder::new().build(),
            primary: xs.to_vec(),
            results: vec![],
            subst: vec![],
            witness: WitnessProc::ExhaustiveMin,
        });
    }
    let expansion = RelaxedExpansion::range(lo, hi);
    let subst = fresh_subs(reg, expansion.n_subs(), "range")?;

    // f1 = lo + Σ c_i s_i, f2 = f1 + 1 (f2 = f1 when the range is a point)
    let mut f1 = sum.clone();
    f1.add_const(-lo);
    for (&s, &c) in subst.iter().zip(&expansion.coefficients) {
        f1.add_var(s, -c);
    }
    let mut b = QuboBuilder::new();
    if expansion.paired {
        let mut f2 = f1.clone();
        f2.add_const(-1);
        f1.mul_into(&f2, &mut b)?;
    } else {
        f1.square_into(&mut b)?;
    }

    Ok(PatternEmission {
        fragment: b.build(),
        primary: xs.to_vec(),
        results: vec![],
        subst,
        witness: WitnessProc::Expansion { sum, expansion },
    })
}

/// Appends the 2-CNF side of a result-bit clause set:
/// Σ_i (guard) · (x_i), each a non-negative product of two literals.
fn add_two_cnf(guard: Literal, xs: &[Literal], b: &mut QuboBuilder) -> Result<()> {
    let mut g = Affine::new();
    g.add_lit(guard, 1);
    for &x in xs {
        let mut t = Affine::new();
        t.add_lit(x, 1);
        g.mul_into(&t, b)?;
    }
    Ok(())
}

/// Encodes `OR(xs) = 1`, or `result = OR(xs)` when a result bit is given.
///
/// The result form combines the long clause (r̄ ∨ ⋁ x_i) encoded by the
/// range product with the 2-CNF penalties (1 − r)·x_i forcing r on whenever
/// any input is on.
pub fn encode_or(
    reg: &mut VarRegistry,
    xs: &[Literal],
    result: Option<VarId>,
) -> Result<PatternEmission> {
    if xs.is_empty() {
        return Err(Error::Contract("disjunction over zero literals".into()));
    }
    match result {
        None => encode_range(reg, xs, 1, xs.len() as i64),
        Some(r) => {
            let mut clause = vec![Literal::neg(r)];
            clause.extend_from_slice(xs);
            let mut em = encode_range(reg, &clause, 1, clause.len() as i64)?;
            let mut b = QuboBuilder::new();
            b.merge(&em.fragment)?;
            add_two_cnf(Literal::neg(r), xs, &mut b)?;
            em.fragment = b.build();
            em.primary = xs.to_vec();
            em.results = vec![r];
            Ok(em)
        }
    }
}

/// Encodes `AND(xs) = 1`, or `result = AND(xs)` when a result bit is given.
///
/// Without a result the default form is the squared deficit (N − Σ x_i)²;
/// `low_coeff` selects the paired-product form whose coefficients all lie in
/// {−1, +1} apart from the constant. The result form is the De Morgan dual
/// of [`encode_or`]: the clause (r ∨ ⋁ x̄_i) plus penalties r·(1 − x_i).
pub fn encode_and(
    reg: &mut VarRegistry,
    xs: &[Literal],
    result: Option<VarId>,
    low_coeff: bool,
) -> Result<PatternEmission> {
    if xs.is_empty() {
        return Err(Error::Contract("conjunction over zero literals".into()));
    }
    if let Some(r) = result {
        let negs: Vec<Literal> = xs.iter().map(|l| l.negate()).collect();
        let mut clause = vec![Literal::pos(r)];
        clause.extend_from_slice(&negs);
        let mut em = encode_range(reg, &clause, 1, clause.len() as i64)?;
        let mut b = QuboBuilder::new();
        b.merge(&em.fragment)?;
        add_two_cnf(Literal::pos(r), &negs, &mut b)?;
        em.fragment = b.build();
        em.primary = xs.to_vec();
        em.results = vec![r];
        return Ok(em);
    }
    let mut b = QuboBuilder::new();
    if low_coeff {
        let n = xs.len();
        // pairs contribute -x_{2i} x_{2i+1}; an odd tail adds -x_last and
        // bumps the constant by one
        b.add_offset((n / 2) as i64 + (n % 2) as i64)?;
        for pair in xs.chunks_exact(2) {
            let mut a0 = Affine::new();
            a0.add_lit(pair[0], -1);
            let mut a1 = Affine::new();
            a1.add_lit(pair[1], 1);
            a0.mul_into(&a1, &mut b)?;
        }
        if n % 2 == 1 {
            let mut tail = Affine::new();
            tail.add_lit(xs[n - 1], -1);
            let one = Affine {
                constant: 1,
                ..Default::default()
            };
            tail.mul_into(&one, &mut b)?;
        }
    } else {
        let mut deficit = Affine::new();
        deficit.add_const(xs.len() as i64);
        for &l in xs {
            deficit.add_lit(l, -1);
        }
        deficit.square_into(&mut b)?;
    }
    Ok(PatternEmission {
        fragment: b.build(),
        primary: xs.to_vec(),
        results: vec![],
        subst: vec![],
        witness: WitnessProc::ExhaustiveMin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::energy_with;

    fn lits(n: usize, reg: &mut VarRegistry) -> Vec<Literal> {
        (0..n)
            .map(|i| Literal::pos(reg.fresh(format!("x{i}"), VarKind::Intermediate, "test").unwrap()))
            .collect()
    }

    /// Exhaustively checks that min-over-subs energy is 0 exactly where
    /// `pred` holds on the primary (and result) bits, and >= 1 elsewhere,
    /// and that the witness attains the minimum on satisfying assignments.
    fn check_zero_set(
        em: &PatternEmission,
        primaries: &[VarId],
        pred: &dyn Fn(&dyn Fn(VarId) -> bool) -> bool,
    ) {
        let n = primaries.len();
        assert!(n <= 14);
        for mask in 0..1u64 << n {
            let get = |v: VarId| {
                primaries
                    .iter()
                    .position(|&p| p == v)
                    .map(|i| mask >> i & 1 == 1)
                    .unwrap_or(false)
            };
            let (min, _) = em.minimize_subst(&get);
            let holds = pred(&get);
            if holds {
                assert_eq!(min, 0, "mask {mask:b}: expected zero energy");
                let w = em.witness_subst(&get);
                let getw = |v: VarId| {
                    w.iter()
                        .find(|&&(s, _)| s == v)
                        .map(|&(_, b)| b)
                        .unwrap_or_else(|| get(v))
                };
                assert_eq!(
                    energy_with(&em.fragment, &getw),
                    0,
                    "mask {mask:b}: witness misses the minimum"
                );
            } else {
                assert!(min >= 1, "mask {mask:b}: expected positive energy, got {min}");
            }
        }
    }

    fn all_vars(em: &PatternEmission) -> Vec<VarId> {
        let mut vs: Vec<VarId> = em.primary.iter().map(|l| l.var).collect();
        vs.extend(&em.results);
        vs.extend(&em.subst);
        vs
    }

    #[test]
    fn parity_single_literal() {
        let mut reg = VarRegistry::new();
        let xs = lits(1, &mut reg);
        let em = encode_parity(&mut reg, &xs, None).unwrap();
        assert!(em.subst.is_empty());
        assert_eq!(em.fragment.offset(), 1);
        assert_eq!(em.fragment.linear()[&xs[0].var], -1);
    }

    #[test]
    fn parity_two_inputs_is_xor_square() {
        let mut reg = VarRegistry::new();
        let xs = lits(2, &mut reg);
        let em = encode_parity(&mut reg, &xs, None).unwrap();
        // (x0 + x1 - 1)^2 = 1 - x0 - x1 + 2 x0 x1
        assert!(em.subst.is_empty());
        assert_eq!(em.fragment.offset(), 1);
        assert_eq!(em.fragment.quadratic()[&(xs[0].var, xs[1].var)], 2);
    }

    #[test]
    fn parity_substitution_counts() {
        let mut reg = VarRegistry::new();
        let xs = lits(4, &mut reg);
        let em = encode_parity(&mut reg, &xs, None).unwrap();
        assert_eq!(em.subst.len(), 1);
        for n in 1..=11usize {
            let mut reg = VarRegistry::new();
            let xs = lits(n, &mut reg);
            let em = encode_parity(&mut reg, &xs, None).unwrap();
            let t_max = (n + 1) / 2;
            let expect = (t_max as f64).log2().ceil() as usize;
            assert_eq!(em.subst.len(), expect, "N = {n}");
        }
    }

    #[test]
    fn parity_zero_sets() {
        for n in 1..=7usize {
            for with_result in [false, true] {
                let mut reg = VarRegistry::new();
                let xs = lits(n, &mut reg);
                let r = with_result
                    .then(|| reg.fresh("r", VarKind::Intermediate, "test").unwrap());
                let em = encode_parity(&mut reg, &xs, r).unwrap();
                let mut primaries: Vec<VarId> = xs.iter().map(|l| l.var).collect();
                primaries.extend(r);
                let xs2 = xs.clone();
                check_zero_set(&em, &primaries, &|get| {
                    let p = xs2.iter().filter(|l| l.eval(get)).count() % 2 == 1;
                    match r {
                        Some(rv) => get(rv) == p,
                        None => p,
                    }
                });
            }
        }
    }

    #[test]
    fn parity_negated_literals() {
        let mut reg = VarRegistry::new();
        let vs = lits(3, &mut reg);
        let xs = vec![vs[0], vs[1].negate(), vs[2]];
        let em = encode_parity(&mut reg, &xs, None).unwrap();
        let primaries: Vec<VarId> = vs.iter().map(|l| l.var).collect();
        let xs2 = xs.clone();
        check_zero_set(&em, &primaries, &|get| {
            xs2.iter().filter(|l| l.eval(get)).count() % 2 == 1
        });
    }

    #[test]
    fn range_contract_errors() {
        let mut reg = VarRegistry::new();
        let xs = lits(3, &mut reg);
        assert!(encode_range(&mut reg, &xs, 2, 1).is_err());
        assert!(encode_range(&mut reg, &xs, 0, 4).is_err());
        assert!(encode_range(&mut reg, &xs, -1, 2).is_err());
    }

    #[test]
    fn range_point_is_square() {
        let mut reg = VarRegistry::new();
        let xs = lits(4, &mut reg);
        let em = encode_range(&mut reg, &xs, 2, 2).unwrap();
        assert!(em.subst.is_empty());
        assert_eq!(em.fragment.offset(), 4);
    }

    #[test]
    fn range_tautology_is_empty() {
        let mut reg = VarRegistry::new();
        let xs = lits(4, &mut reg);
        let em = encode_range(&mut reg, &xs, 0, 4).unwrap();
        assert_eq!(em.fragment.num_terms(), 0);
        assert_eq!(em.fragment.offset(), 0);
    }

    #[test]
    fn range_ten_input_or_uses_three_subs() {
        let mut reg = VarRegistry::new();
        let xs = lits(10, &mut reg);
        let em = encode_range(&mut reg, &xs, 1, 10).unwrap();
        assert_eq!(em.subst.len(), 3);
    }

    #[test]
    fn range_zero_sets_exhaustive() {
        for n in 1..=6usize {
            for lo in 0..=n as i64 {
                for hi in lo..=n as i64 {
                    let mut reg = VarRegistry::new();
                    let xs = lits(n, &mut reg);
                    let em = encode_range(&mut reg, &xs, lo, hi).unwrap();
                    let primaries: Vec<VarId> = xs.iter().map(|l| l.var).collect();
                    let xs2 = xs.clone();
                    check_zero_set(&em, &primaries, &|get| {
                        let c = xs2.iter().filter(|l| l.eval(get)).count() as i64;
                        lo <= c && c <= hi
                    });
                }
            }
        }
    }

    #[test]
    fn range_non_negative_everywhere() {
        for n in 1..=5usize {
            for lo in 0..=n as i64 {
                for hi in lo..=n as i64 {
                    let mut reg = VarRegistry::new();
                    let xs = lits(n, &mut reg);
                    let em = encode_range(&mut reg, &xs, lo, hi).unwrap();
                    let vars = all_vars(&em);
                    for mask in 0..1u64 << vars.len() {
                        let get = |v: VarId| {
                            vars.iter()
                                .position(|&p| p == v)
                                .map(|i| mask >> i & 1 == 1)
                                .unwrap()
                        };
                        assert!(energy_with(&em.fragment, &get) >= 0);
                    }
                }
            }
        }
    }

    #[test]
    fn or_zero_sets() {
        for n in 1..=6usize {
            for with_result in [false, true] {
                let mut reg = VarRegistry::new();
                let xs = lits(n, &mut reg);
                let r = with_result
                    .then(|| reg.fresh("r", VarKind::Intermediate, "test").unwrap());
                let em = encode_or(&mut reg, &xs, r).unwrap();
                let mut primaries: Vec<VarId> = xs.iter().map(|l| l.var).collect();
                primaries.extend(r);
                let xs2 = xs.clone();
                check_zero_set(&em, &primaries, &|get| {
                    let v = xs2.iter().any(|l| l.eval(get));
                    match r {
                        Some(rv) => get(rv) == v,
                        None => v,
                    }
                });
            }
        }
    }

    #[test]
    fn and_pair_product_form() {
        let mut reg = VarRegistry::new();
        let xs = lits(4, &mut reg);
        let em = encode_and(&mut reg, &xs, None, true).unwrap();
        // 2 - x1 x0 - x3 x2
        assert_eq!(em.fragment.offset(), 2);
        assert_eq!(em.fragment.quadratic()[&(xs[0].var, xs[1].var)], -1);
        assert_eq!(em.fragment.quadratic()[&(xs[2].var, xs[3].var)], -1);
        assert!(em.fragment.linear().is_empty());
    }

    #[test]
    fn and_two_input_square() {
        let mut reg = VarRegistry::new();
        let xs = lits(2, &mut reg);
        let em = encode_and(&mut reg, &xs, None, false).unwrap();
        // (2 - x0 - x1)^2: 4 at (0,0), 1 at weight one, 0 at (1,1)
        let vars: Vec<VarId> = xs.iter().map(|l| l.var).collect();
        let vals: Vec<i64> = (0..4u64)
            .map(|m| {
                energy_with(&em.fragment, &|v| {
                    vars.iter().position(|&p| p == v).map(|i| m >> i & 1 == 1).unwrap()
                })
            })
            .collect();
        assert_eq!(vals, vec![4, 1, 1, 0]);
    }

    #[test]
    fn and_zero_sets() {
        for n in 1..=6usize {
            for with_result in [false, true] {
                for low in [false, true] {
                    let mut reg = VarRegistry::new();
                    let xs = lits(n, &mut reg);
                    let r = with_result
                        .then(|| reg.fresh("r", VarKind::Intermediate, "test").unwrap());
                    let em = encode_and(&mut reg, &xs, r, low).unwrap();
                    let mut primaries: Vec<VarId> = xs.iter().map(|l| l.var).collect();
                    primaries.extend(r);
                    let xs2 = xs.clone();
                    check_zero_set(&em, &primaries, &|get| {
                        let v = xs2.iter().all(|l| l.eval(get));
                        match r {
                            Some(rv) => get(rv) == v,
                            None => v,
                        }
                    });
                }
            }
        }
    }

    #[test]
    fn or_alternative_expansion_also_valid() {
        // the documented alternative coefficient choice for N = 10 spans the
        // same interval: f1 in 0 + {5, 3, 2} subsets covers pairs over [1, 10]
        let alt = RelaxedExpansion {
            base: 1,
            coefficients: vec![1, 2, 5],
            span: 10,
            paired: true,
        };
        assert!(alt.covers_target());
    }
}
