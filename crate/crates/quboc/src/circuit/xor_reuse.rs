//! Greedy reuse of shared XOR sub-expressions.
//!
//! Given a set of multi-input XOR clauses, repeatedly extract the largest
//! variable subset shared by at least two clauses, define one intermediate
//! for it, and rewrite the containing clauses by cancellation. Extracting a
//! subset of size `w` shared by `m` clauses changes the total literal count
//! by `m + w - m·w`, which is strictly negative for `w >= 3, m >= 2`; the
//! default threshold therefore skips break-even 2-literal subsets.

use super::{FlatAtom, FlatCircuit, FlatGate, FlatKind, FlatLit, FlatWire, XorClause};
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct ReuseOutcome {
    /// Rewritten clauses, same order as the input.
    pub clauses: Vec<XorClause>,
    /// Introduced intermediates: (fresh variable, defining XOR body). The
    /// variable equals the XOR of the body's literals.
    pub defs: Vec<(usize, XorClause)>,
}

impl ReuseOutcome {
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(|c| c.len()).sum::<usize>()
            + self.defs.iter().map(|(_, d)| d.len()).sum::<usize>()
    }
}

/// Candidate shared subset: chosen by maximal size, then by number of
/// containing clauses, then lexicographically smallest variable set.
fn best_candidate(clauses: &[XorClause], threshold: usize) -> Option<(BTreeSet<usize>, usize)> {
    let mut best: Option<(BTreeSet<usize>, usize)> = None;
    for i in 0..clauses.len() {
        for j in i + 1..clauses.len() {
            let inter: BTreeSet<usize> = clauses[i]
                .vars
                .intersection(&clauses[j].vars)
                .copied()
                .collect();
            if inter.len() < threshold {
                continue;
            }
            let support = clauses
                .iter()
                .filter(|c| inter.is_subset(&c.vars))
                .count();
            let better = match &best {
                None => true,
                Some((bset, bsup)) => {
                    (inter.len(), support) > (bset.len(), *bsup)
                        || ((inter.len(), support) == (bset.len(), *bsup)
                            && inter.iter().lt(bset.iter()))
                }
            };
            if better {
                best = Some((inter, support));
            }
        }
    }
    best
}

/// Applies the greedy extraction until no shared subset of at least
/// `threshold` variables remains. Fresh intermediates are numbered from
/// `next_var`.
pub fn xor_reuse(clauses: &[XorClause], threshold: usize, mut next_var: usize) -> ReuseOutcome {
    let threshold = threshold.max(2);
    let mut clauses = clauses.to_vec();
    let mut defs = Vec::new();
    while let Some((subset, _)) = best_candidate(&clauses, threshold) {
        let t = next_var;
        next_var += 1;
        let mut body = XorClause::new();
        for &v in &subset {
            body.toggle(v, false);
        }
        for c in clauses.iter_mut() {
            if subset.is_subset(&c.vars) {
                for &v in &subset {
                    c.toggle(v, false);
                }
                c.toggle(t, false);
            }
        }
        defs.push((t, body));
    }
    ReuseOutcome { clauses, defs }
}

/// Runs the greedy extraction over every XOR gate of a flattened circuit,
/// inserting one new XOR gate per extracted sub-expression and rewriting
/// the originals by cancellation. Non-XOR gates and all outputs are
/// remapped; semantics are preserved.
pub fn apply_xor_reuse(flat: &FlatCircuit, threshold: usize) -> FlatCircuit {
    let n_in = flat.n_inputs();
    // variable universe: inputs, then original gates
    let atom_var = |a: FlatAtom| match a {
        FlatAtom::Input(k) => k,
        FlatAtom::Gate(g) => n_in + g,
    };
    let xor_gates: Vec<usize> = flat
        .gates
        .iter()
        .enumerate()
        .filter(|(_, g)| g.kind == FlatKind::Xor)
        .map(|(i, _)| i)
        .collect();
    let clauses: Vec<XorClause> = xor_gates
        .iter()
        .map(|&i| {
            let g = &flat.gates[i];
            let mut c = XorClause::new();
            for l in &g.lits {
                c.toggle(atom_var(l.atom), l.negated);
            }
            c.constant ^= g.xor_const;
            c
        })
        .collect();
    let out = xor_reuse(&clauses, threshold, n_in + flat.gates.len());
    if out.defs.is_empty() {
        return flat.clone();
    }

    // insertion point of each intermediate: before its earliest consumer
    // (its body only references atoms available there, since the body is a
    // subset of that consumer's original clause)
    let mut def_pos = vec![flat.gates.len(); out.defs.len()];
    let def_index = |v: usize| v.checked_sub(n_in + flat.gates.len());
    for d in (0..out.defs.len()).rev() {
        let t = out.defs[d].0;
        let mut pos = flat.gates.len();
        for (ci, c) in out.clauses.iter().enumerate() {
            if c.vars.contains(&t) {
                pos = pos.min(xor_gates[ci]);
            }
        }
        for (d2, (_, body)) in out.defs.iter().enumerate().skip(d + 1) {
            if body.vars.contains(&t) {
                pos = pos.min(def_pos[d2]);
            }
        }
        def_pos[d] = pos;
    }

    let mut gates: Vec<FlatGate> = Vec::with_capacity(flat.gates.len() + out.defs.len());
    let mut old2new = vec![usize::MAX; flat.gates.len()];
    let mut def2new = vec![usize::MAX; out.defs.len()];
    // resolve a universe variable to an atom in the rewritten circuit
    let resolve = |v: usize, old2new: &[usize], def2new: &[usize]| -> FlatAtom {
        if v < n_in {
            FlatAtom::Input(v)
        } else if let Some(d) = def_index(v) {
            FlatAtom::Gate(def2new[d])
        } else {
            FlatAtom::Gate(old2new[v - n_in])
        }
    };
    let mut next_clause = 0usize;
    for p in 0..=flat.gates.len() {
        for d in 0..out.defs.len() {
            if def_pos[d] == p {
                let body = &out.defs[d].1;
                def2new[d] = gates.len();
                gates.push(FlatGate {
                    kind: FlatKind::Xor,
                    lits: body
                        .vars
                        .iter()
                        .map(|&v| FlatLit {
                            atom: resolve(v, &old2new, &def2new),
                            negated: false,
                        })
                        .collect(),
                    xor_const: body.constant,
                });
            }
        }
        if p == flat.gates.len() {
            break;
        }
        let g = &flat.gates[p];
        old2new[p] = gates.len();
        if g.kind == FlatKind::Xor {
            let c = &out.clauses[next_clause];
            next_clause += 1;
            gates.push(FlatGate {
                kind: FlatKind::Xor,
                lits: c
                    .vars
                    .iter()
                    .map(|&v| FlatLit {
                        atom: resolve(v, &old2new, &def2new),
                        negated: false,
                    })
                    .collect(),
                xor_const: c.constant,
            });
        } else {
            gates.push(FlatGate {
                kind: g.kind,
                lits: g
                    .lits
                    .iter()
                    .map(|l| FlatLit {
                        atom: match l.atom {
                            FlatAtom::Input(k) => FlatAtom::Input(k),
                            FlatAtom::Gate(og) => FlatAtom::Gate(old2new[og]),
                        },
                        negated: l.negated,
                    })
                    .collect(),
                xor_const: g.xor_const,
            });
        }
    }
    let outputs = flat
        .outputs
        .iter()
        .map(|w| match *w {
            FlatWire::Const(b) => FlatWire::Const(b),
            FlatWire::Lit(l) => FlatWire::Lit(FlatLit {
                atom: match l.atom {
                    FlatAtom::Input(k) => FlatAtom::Input(k),
                    FlatAtom::Gate(og) => FlatAtom::Gate(old2new[og]),
                },
                negated: l.negated,
            }),
        })
        .collect();
    FlatCircuit {
        input_names: flat.input_names.clone(),
        gates,
        outputs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(vars: &[usize]) -> XorClause {
        let mut c = XorClause::new();
        for &v in vars {
            c.toggle(v, false);
        }
        c
    }

    /// Evaluates the rewritten system on an assignment of the original
    /// variables, deriving intermediates from their definitions.
    fn eval_system(out: &ReuseOutcome, n_orig: usize, mask: u64) -> Vec<bool> {
        let mut vals = vec![false; n_orig + out.defs.len()];
        for (i, v) in vals.iter_mut().enumerate().take(n_orig) {
            *v = mask >> i & 1 == 1;
        }
        for (t, body) in &out.defs {
            let v = body.eval(&|u| vals[u]);
            vals[*t] = v;
        }
        out.clauses.iter().map(|c| c.eval(&|u| vals[u])).collect()
    }

    #[test]
    fn shared_triple_extracted() {
        // {a⊕b⊕c⊕d, a⊕b⊕c⊕e} → t = a⊕b⊕c; {t⊕d, t⊕e}
        let cs = [clause(&[0, 1, 2, 3]), clause(&[0, 1, 2, 4])];
        let out = xor_reuse(&cs, 3, 5);
        assert_eq!(out.defs.len(), 1);
        assert_eq!(out.defs[0].1.vars, [0, 1, 2].into_iter().collect());
        assert_eq!(out.clauses[0].vars, [3, 5].into_iter().collect());
        assert_eq!(out.clauses[1].vars, [4, 5].into_iter().collect());
        for mask in 0..32u64 {
            let orig: Vec<bool> = cs.iter().map(|c| c.eval(&|u| mask >> u & 1 == 1)).collect();
            assert_eq!(eval_system(&out, 5, mask), orig);
        }
    }

    #[test]
    fn disjoint_clauses_unchanged() {
        let cs = [clause(&[0, 1, 2]), clause(&[3, 4, 5])];
        let out = xor_reuse(&cs, 3, 6);
        assert!(out.defs.is_empty());
        assert_eq!(out.clauses.to_vec(), cs.to_vec());
    }

    #[test]
    fn three_clauses_one_intermediate() {
        let cs = [
            clause(&[0, 1, 2, 3]),
            clause(&[0, 1, 2, 4]),
            clause(&[0, 1, 2, 5]),
        ];
        let out = xor_reuse(&cs, 3, 6);
        assert_eq!(out.defs.len(), 1);
        for c in &out.clauses {
            assert!(c.vars.contains(&6));
            assert_eq!(c.len(), 2);
        }
        for mask in 0..64u64 {
            let orig: Vec<bool> = cs.iter().map(|c| c.eval(&|u| mask >> u & 1 == 1)).collect();
            assert_eq!(eval_system(&out, 6, mask), orig);
        }
    }

    #[test]
    fn circuit_rewrite_preserves_semantics() {
        use super::super::{flatten, Circuit, Op};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let mut c = Circuit::new();
            let n = rng.gen_range(3..8);
            let mut nodes: Vec<_> = (0..n).map(|i| c.input(format!("x{i}"))).collect();
            for _ in 0..rng.gen_range(2..10) {
                let a = nodes[rng.gen_range(0..nodes.len())];
                let b = nodes[rng.gen_range(0..nodes.len())];
                let op = match rng.gen_range(0..4) {
                    0 => Op::Xor,
                    1 => Op::Xnor,
                    2 => Op::And,
                    _ => Op::Or,
                };
                if let Ok(g) = c.gate(op, a, b) {
                    nodes.push(g);
                }
            }
            for _ in 0..rng.gen_range(1..4) {
                c.mark_output(nodes[rng.gen_range(0..nodes.len())]);
            }
            let flat = flatten(&c).unwrap();
            let rewritten = apply_xor_reuse(&flat, 3);
            for mask in 0..1u64 << n {
                let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                assert_eq!(
                    flat.eval(&bits).unwrap(),
                    rewritten.eval(&bits).unwrap(),
                    "mask {mask:b}"
                );
            }
        }
    }

    #[test]
    fn circuit_rewrite_extracts_shared_parity() {
        use super::super::{flatten, Circuit, Op};
        // two root XORs sharing a⊕b⊕c
        let mut c = Circuit::new();
        let vars: Vec<_> = ["a", "b", "c", "d", "e"].iter().map(|n| c.input(*n)).collect();
        let ab = c.gate(Op::Xor, vars[0], vars[1]).unwrap();
        let abc = c.gate(Op::Xor, ab, vars[2]).unwrap();
        let o1 = c.gate(Op::Xor, abc, vars[3]).unwrap();
        let ab2 = c.gate(Op::Xor, vars[0], vars[1]).unwrap();
        let abc2 = c.gate(Op::Xor, ab2, vars[2]).unwrap();
        let o2 = c.gate(Op::Xor, abc2, vars[4]).unwrap();
        c.mark_output(o1);
        c.mark_output(o2);
        let flat = flatten(&c).unwrap();
        let rewritten = apply_xor_reuse(&flat, 3);
        let lits = |f: &FlatCircuit| f.gates.iter().map(|g| g.lits.len()).sum::<usize>();
        assert!(lits(&rewritten) < lits(&flat));
        for mask in 0..32u64 {
            let bits: Vec<bool> = (0..5).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(flat.eval(&bits).unwrap(), rewritten.eval(&bits).unwrap());
        }
    }

    #[test]
    fn literal_count_never_increases() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n_vars = rng.gen_range(4..10);
            let n_clauses = rng.gen_range(2..8);
            let cs: Vec<XorClause> = (0..n_clauses)
                .map(|_| {
                    let mut c = XorClause::new();
                    for v in 0..n_vars {
                        if rng.gen_bool(0.5) {
                            c.toggle(v, rng.gen_bool(0.2));
                        }
                    }
                    c
                })
                .collect();
            let before: usize = cs.iter().map(|c| c.len()).sum();
            let out = xor_reuse(&cs, 3, n_vars);
            assert!(out.literal_count() <= before);
            for mask in 0..1u64 << n_vars {
                let orig: Vec<bool> =
                    cs.iter().map(|c| c.eval(&|u| mask >> u & 1 == 1)).collect();
                assert_eq!(eval_system(&out, n_vars, mask), orig, "mask {mask:b}");
            }
        }
    }
}
