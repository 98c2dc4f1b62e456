//! Correctness oracles: exhaustive enumeration on small instances, witness
//! evaluation and random sampling on large ones.

use crate::error::{Error, Result};
use crate::patterns::{energy_with, PatternEmission};
use crate::qubo::{QuboInstance, VarId};
use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;

/// Hard cap on exhaustive enumeration (~6.7e7 evaluations).
pub const ENUMERATION_BOUND: usize = 26;

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSetReport {
    /// Primary assignments (bit i of the mask = i-th primary variable)
    /// whose minimum energy over all remaining variables is zero.
    pub zero_set: Vec<u64>,
    pub min_energy: i64,
    pub has_negative: bool,
}

/// Enumerates every assignment of `q` in Gray-code order with incremental
/// energy updates, projecting onto `primary` and minimizing over the rest.
pub fn brute_force_zero_set(q: &QuboInstance, primary: &[VarId]) -> Result<ZeroSetReport> {
    let n = q.num_vars();
    if n > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            num_vars: n,
            bound: ENUMERATION_BOUND,
        });
    }
    for &p in primary {
        if p.index() >= n.max(1) {
            return Err(Error::UnknownVar(p.index()));
        }
    }
    // adjacency for O(degree) flip deltas
    let mut linear = vec![0i64; n];
    for (&v, &c) in q.linear() {
        linear[v.index()] = c;
    }
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (&(i, j), &c) in q.quadratic() {
        adj[i.index()].push((j.index(), c));
        adj[j.index()].push((i.index(), c));
    }
    // bit index of each primary variable, if any
    let mut primary_pos = vec![usize::MAX; n];
    for (i, &p) in primary.iter().enumerate() {
        primary_pos[p.index()] = i;
    }

    let mut min_for: Vec<i64> = vec![i64::MAX; 1usize << primary.len()];
    let mut energy = q.offset();
    let mut assigned: u64 = 0;
    let mut pmask: usize = 0;
    let mut global_min = energy;
    min_for[0] = energy;

    let total = 1u64 << n;
    for step in 1..total {
        let v = step.trailing_zeros() as usize;
        let mut delta = linear[v];
        for &(u, c) in &adj[v] {
            if assigned >> u & 1 == 1 {
                delta += c;
            }
        }
        if assigned >> v & 1 == 1 {
            energy -= delta;
        } else {
            energy += delta;
        }
        assigned ^= 1 << v;
        if primary_pos[v] != usize::MAX {
            pmask ^= 1 << primary_pos[v];
        }
        if energy < min_for[pmask] {
            min_for[pmask] = energy;
        }
        if energy < global_min {
            global_min = energy;
        }
    }

    let zero_set = min_for
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m == 0)
        .map(|(m, _)| m as u64)
        .collect();
    Ok(ZeroSetReport {
        zero_set,
        min_energy: global_min,
        has_negative: global_min < 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EmissionReport {
    pub pass: bool,
    /// First failing check, if any.
    pub failure: Option<String>,
    /// Primary+result assignment exhibiting the failure (variable index,
    /// value), if any.
    pub counterexample: Option<Vec<(u32, bool)>>,
    pub zero_set_size: usize,
    pub min_energy: i64,
}

/// Exhaustively validates an emission against a predicate oracle over its
/// primary (and result) bits: non-negativity over all bits, zero-iff-
/// predicate under minimization over substitution bits, and witness
/// soundness on satisfying assignments.
pub fn check_emission(
    em: &PatternEmission,
    oracle: &dyn Fn(&dyn Fn(VarId) -> bool) -> bool,
) -> Result<EmissionReport> {
    let mut outer: Vec<VarId> = em.primary.iter().map(|l| l.var).collect();
    outer.extend(&em.results);
    outer.sort_unstable();
    outer.dedup();
    let total_bits = outer.len() + em.subst.len();
    if total_bits > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            num_vars: total_bits,
            bound: ENUMERATION_BOUND,
        });
    }

    let mut zero_set_size = 0usize;
    let mut min_energy = i64::MAX;
    let fail = |msg: String, mask: u64, outer: &[VarId]| EmissionReport {
        pass: false,
        failure: Some(msg),
        counterexample: Some(
            outer
                .iter()
                .enumerate()
                .map(|(i, v)| (v.0, mask >> i & 1 == 1))
                .collect(),
        ),
        zero_set_size: 0,
        min_energy: 0,
    };

    for mask in 0..1u64 << outer.len() {
        let get = |v: VarId| {
            outer
                .iter()
                .position(|&p| p == v)
                .map(|i| mask >> i & 1 == 1)
                .unwrap_or(false)
        };
        // non-negativity over every substitution assignment
        for smask in 0..1u64 << em.subst.len() {
            let gets = |v: VarId| {
                em.subst
                    .iter()
                    .position(|&s| s == v)
                    .map(|i| smask >> i & 1 == 1)
                    .unwrap_or_else(|| get(v))
            };
            let e = energy_with(&em.fragment, &gets);
            min_energy = min_energy.min(e);
            if e < 0 {
                return Ok(fail(format!("negative energy {e}"), mask, &outer));
            }
        }
        let (min, _) = em.minimize_subst(&get);
        let holds = oracle(&get);
        if holds && min != 0 {
            return Ok(fail(
                format!("predicate holds but minimum energy is {min}"),
                mask,
                &outer,
            ));
        }
        if !holds && min == 0 {
            return Ok(fail("predicate fails but energy reaches zero".into(), mask, &outer));
        }
        if holds {
            zero_set_size += 1;
            let w = em.witness_subst(&get);
            let getw = |v: VarId| {
                w.iter()
                    .find(|&&(s, _)| s == v)
                    .map(|&(_, b)| b)
                    .unwrap_or_else(|| get(v))
            };
            let e = energy_with(&em.fragment, &getw);
            if e != 0 {
                return Ok(fail(format!("witness attains {e}, not zero"), mask, &outer));
            }
        }
    }
    Ok(EmissionReport {
        pass: true,
        failure: None,
        counterexample: None,
        zero_set_size,
        min_energy,
    })
}

/// Evaluates `n_samples` uniformly random assignments and returns the
/// minimum observed energy. Deterministic for a given seed.
pub fn sample_nonnegativity(q: &QuboInstance, n_samples: usize, seed: u64) -> i64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = q.num_vars();
    let mut min = if n_samples == 0 { q.offset() } else { i64::MAX };
    let mut bits = vec![false; n];
    for _ in 0..n_samples {
        for b in bits.iter_mut() {
            *b = rng.gen_bool(0.5);
        }
        let e = q.energy(&bits).expect("assignment sized to instance");
        min = min.min(e);
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{encode_majority3, encode_or, encode_range, Literal};
    use crate::qubo::{QuboBuilder, VarKind, VarRegistry};

    #[test]
    fn empty_instance_zero_everywhere() {
        let q = QuboBuilder::new().build();
        let r = brute_force_zero_set(&q, &[]).unwrap();
        assert_eq!(r.zero_set, vec![0]);
        assert_eq!(r.min_energy, 0);
        assert!(!r.has_negative);
    }

    #[test]
    fn refuses_oversized_instance() {
        let mut b = QuboBuilder::new();
        b.reserve_vars(27);
        let q = b.build();
        assert!(matches!(
            brute_force_zero_set(&q, &[]),
            Err(Error::EnumerationBound { num_vars: 27, .. })
        ));
    }

    #[test]
    fn majority_zero_set_is_truth_table() {
        let mut reg = VarRegistry::new();
        let vars: Vec<VarId> = (0..4)
            .map(|i| reg.fresh(format!("v{i}"), VarKind::Intermediate, "test").unwrap())
            .collect();
        let em = encode_majority3(
            &mut reg,
            Literal::pos(vars[0]),
            Literal::pos(vars[1]),
            Literal::pos(vars[2]),
            vars[3],
        )
        .unwrap();
        let r = brute_force_zero_set(&em.fragment, &vars).unwrap();
        assert_eq!(r.zero_set.len(), 8);
        assert!(!r.has_negative);
        for m in r.zero_set {
            let maj = (m & 1) + (m >> 1 & 1) + (m >> 2 & 1) >= 2;
            assert_eq!(maj, m >> 3 & 1 == 1);
        }
    }

    #[test]
    fn or_six_zero_set_has_63_rows() {
        let mut reg = VarRegistry::new();
        let xs: Vec<Literal> = (0..6)
            .map(|i| Literal::pos(reg.fresh(format!("x{i}"), VarKind::Intermediate, "t").unwrap()))
            .collect();
        let em = encode_or(&mut reg, &xs, None).unwrap();
        let primary: Vec<VarId> = xs.iter().map(|l| l.var).collect();
        let r = brute_force_zero_set(&em.fragment, &primary).unwrap();
        assert_eq!(r.zero_set.len(), 63);
        assert!(!r.zero_set.contains(&0));
        assert!(!r.has_negative);
    }

    #[test]
    fn check_emission_passes_range() {
        let mut reg = VarRegistry::new();
        let xs: Vec<Literal> = (0..9)
            .map(|i| Literal::pos(reg.fresh(format!("x{i}"), VarKind::Intermediate, "t").unwrap()))
            .collect();
        let em = encode_range(&mut reg, &xs, 2, 5).unwrap();
        let xs2 = xs.clone();
        let r = check_emission(&em, &|get| {
            let c = xs2.iter().filter(|l| l.eval(get)).count();
            (2..=5).contains(&c)
        })
        .unwrap();
        assert!(r.pass, "{:?}", r.failure);
        let expect: usize = (2..=5).map(|k| binom(9, k)).sum();
        assert_eq!(r.zero_set_size, expect);
    }

    fn binom(n: usize, k: usize) -> usize {
        (1..=k).fold(1, |acc, i| acc * (n - i + 1) / i)
    }

    #[test]
    fn check_emission_catches_corruption() {
        let mut reg = VarRegistry::new();
        let xs: Vec<Literal> = (0..3)
            .map(|i| Literal::pos(reg.fresh(format!("x{i}"), VarKind::Intermediate, "t").unwrap()))
            .collect();
        let mut em = encode_range(&mut reg, &xs, 1, 3).unwrap();
        let mut b = QuboBuilder::new();
        b.merge(&em.fragment).unwrap();
        b.add_linear(xs[0].var, 1).unwrap();
        em.fragment = b.build();
        let xs2 = xs.clone();
        let r = check_emission(&em, &|get| xs2.iter().any(|l| l.eval(get))).unwrap();
        assert!(!r.pass);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn sampling_is_deterministic_and_catches_negatives() {
        let mut b = QuboBuilder::new();
        b.add_linear(VarId(0), -1).unwrap();
        b.reserve_vars(4);
        let q = b.build();
        let a = sample_nonnegativity(&q, 1000, 42);
        let b2 = sample_nonnegativity(&q, 1000, 42);
        assert_eq!(a, b2);
        assert_eq!(a, -1);
    }

    #[test]
    fn brute_force_agrees_with_check_emission() {
        // two independent paths over the same emission
        let mut reg = VarRegistry::new();
        let xs: Vec<Literal> = (0..5)
            .map(|i| Literal::pos(reg.fresh(format!("x{i}"), VarKind::Intermediate, "t").unwrap()))
            .collect();
        let em = encode_range(&mut reg, &xs, 1, 4).unwrap();
        let primary: Vec<VarId> = xs.iter().map(|l| l.var).collect();
        let r1 = brute_force_zero_set(&em.fragment, &primary).unwrap();
        let xs2 = xs.clone();
        let r2 = check_emission(&em, &|get| {
            (1..=4).contains(&xs2.iter().filter(|l| l.eval(get)).count())
        })
        .unwrap();
        assert!(r2.pass);
        assert_eq!(r1.zero_set.len(), r2.zero_set_size);
    }
}
