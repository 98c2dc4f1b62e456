//! Block-wise QUBO encoding of k-input modular addition.
//!
//! The width-w sum is split into blocks of `block_size` bits. Each block
//! contributes the squared difference between the incoming partial sums
//! (inputs plus carry-in) and the outgoing value (output bits plus
//! carry-out), so large power-of-two coefficients stay bounded by the block
//! size rather than the full word width. The carries out of the final block
//! are left unconstrained, which realizes reduction modulo 2^width.

use super::{PatternEmission, Wire, WitnessProc};
use crate::error::{Error, Result};
use crate::patterns::Affine;
use crate::qubo::{QuboBuilder, VarId, VarKind, VarRegistry};

#[derive(Debug, Clone)]
pub struct ModularAddSpec {
    /// k addends, each a width-long little-endian wire vector.
    pub inputs: Vec<Vec<Wire>>,
    /// Little-endian output wires (normally fresh variables; constants when
    /// the sum is pinned, e.g. to a known digest).
    pub output: Vec<Wire>,
    /// Block size B in bits. The final block may be shorter when B does not
    /// divide the width.
    pub block_size: usize,
    pub width: usize,
}

pub(crate) struct CarryWitness {
    blocks: Vec<WitnessBlock>,
}

struct WitnessBlock {
    inputs: Vec<Vec<Wire>>,
    output: Vec<Wire>,
    carry_out: Vec<VarId>,
    bits: usize,
}

impl CarryWitness {
    pub(crate) fn derive(&self, get: &dyn Fn(VarId) -> bool) -> Vec<(VarId, bool)> {
        let mut out = Vec::new();
        let mut carry: u64 = 0;
        for blk in &self.blocks {
            let wire_val = |ws: &[Wire]| -> u64 {
                ws.iter()
                    .enumerate()
                    .map(|(j, &w)| (w.eval(get) as u64) << j)
                    .sum()
            };
            let lhs: u64 = blk.inputs.iter().map(|i| wire_val(i)).sum::<u64>() + carry;
            let rhs = wire_val(&blk.output);
            let cap = (1u64 << blk.carry_out.len()) - 1;
            carry = (lhs.saturating_sub(rhs) >> blk.bits).min(cap);
            for (j, &c) in blk.carry_out.iter().enumerate() {
                out.push((c, carry >> j & 1 == 1));
            }
        }
        out
    }
}

/// Encodes `Σ inputs ≡ output (mod 2^width)` block by block with binary
/// carry variables sized to the largest partial sum each boundary can see.
pub fn encode_modular_add(
    reg: &mut VarRegistry,
    spec: &ModularAddSpec,
) -> Result<PatternEmission> {
    let k = spec.inputs.len();
    if !(2..=7).contains(&k) {
        return Err(Error::Contract(format!("{k} addends, supported range is 2..=7")));
    }
    if spec.block_size == 0 {
        return Err(Error::Contract("block size must be positive".into()));
    }
    if spec.width == 0 || spec.output.len() != spec.width {
        return Err(Error::Contract("output width mismatch".into()));
    }
    for input in &spec.inputs {
        if input.len() != spec.width {
            return Err(Error::Contract("input width mismatch".into()));
        }
    }

    let mut b = QuboBuilder::new();
    let mut carry_in: Vec<VarId> = Vec::new();
    let mut subst = Vec::new();
    let mut blocks = Vec::new();
    let mut lo = 0usize;
    while lo < spec.width {
        let w = spec.block_size.min(spec.width - lo);
        let range = lo..lo + w;

        // largest value the left-hand side of this block can reach, with
        // constants taken at face value
        let mut max_lhs: u64 = 0;
        for input in &spec.inputs {
            for (j, &wire) in input[range.clone()].iter().enumerate() {
                if !matches!(wire, Wire::Const(false)) {
                    max_lhs += 1u64 << j;
                }
            }
        }
        max_lhs += carry_in.iter().enumerate().map(|(j, _)| 1u64 << j).sum::<u64>();
        let max_carry = max_lhs >> w;
        let n_carry = (64 - max_carry.leading_zeros()) as usize;
        let carry_out: Vec<VarId> = (0..n_carry)
            .map(|_| {
                let name = format!("s{}", reg.len());
                reg.fresh(name, VarKind::Carry, "adder")
            })
            .collect::<Result<_>>()?;
        subst.extend(&carry_out);

        let mut diff = Affine::new();
        for input in &spec.inputs {
            for (j, &wire) in input[range.clone()].iter().enumerate() {
                diff.add_wire(wire, 1 << j);
            }
        }
        for (j, &c) in carry_in.iter().enumerate() {
            diff.add_var(c, 1 << j);
        }
        for (j, &wire) in spec.output[range.clone()].iter().enumerate() {
            diff.add_wire(wire, -(1 << j));
        }
        for (j, &c) in carry_out.iter().enumerate() {
            diff.add_var(c, -(1i64 << (w + j)));
        }
        diff.square_into(&mut b)?;

        blocks.push(WitnessBlock {
            inputs: spec.inputs.iter().map(|i| i[range.clone()].to_vec()).collect(),
            output: spec.output[range.clone()].to_vec(),
            carry_out: carry_out.clone(),
            bits: w,
        });
        carry_in = carry_out;
        lo += w;
    }

    let mut primary = Vec::new();
    let mut results = Vec::new();
    for input in &spec.inputs {
        primary.extend(input.iter().filter_map(|w| match w {
            Wire::Lit(l) => Some(*l),
            Wire::Const(_) => None,
        }));
    }
    for &w in &spec.output {
        if let Wire::Lit(l) = w {
            results.push(l.var);
        }
    }

    Ok(PatternEmission {
        fragment: b.build(),
        primary,
        results,
        subst,
        witness: WitnessProc::Carries(CarryWitness { blocks }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::energy_with;

    fn bit_vec(reg: &mut VarRegistry, prefix: &str, width: usize) -> Vec<VarId> {
        (0..width)
            .map(|i| reg.fresh(format!("{prefix}{i}"), VarKind::Intermediate, "test").unwrap())
            .collect()
    }

    /// Builds a k-input adder over variable inputs/outputs and checks the
    /// zero set against integer arithmetic for every input/output pair.
    fn check_adder(k: usize, block: usize, width: usize) {
        let mut reg = VarRegistry::new();
        let in_vars: Vec<Vec<VarId>> = (0..k)
            .map(|i| bit_vec(&mut reg, &format!("a{i}_"), width))
            .collect();
        let out_vars = bit_vec(&mut reg, "c_", width);
        let spec = ModularAddSpec {
            inputs: in_vars
                .iter()
                .map(|vs| vs.iter().map(|&v| Wire::lit(v)).collect())
                .collect(),
            output: out_vars.iter().map(|&v| Wire::lit(v)).collect(),
            block_size: block,
            width,
        };
        let em = encode_modular_add(&mut reg, &spec).unwrap();

        let modulus = 1u64 << width;
        for ins in 0..modulus.pow(k as u32) {
            let vals: Vec<u64> = (0..k as u32).map(|i| ins >> (i * width as u32) & (modulus - 1)).collect();
            let expect = vals.iter().sum::<u64>() % modulus;
            for out in 0..modulus {
                let get = |v: VarId| {
                    for (i, vs) in in_vars.iter().enumerate() {
                        if let Some(j) = vs.iter().position(|&x| x == v) {
                            return vals[i] >> j & 1 == 1;
                        }
                    }
                    let j = out_vars.iter().position(|&x| x == v).unwrap();
                    out >> j & 1 == 1
                };
                let (min, _) = em.minimize_subst(&get);
                if out == expect {
                    assert_eq!(min, 0, "k={k} B={block} {vals:?} -> {out}");
                    // witness must reach the same zero
                    let w = em.witness_subst(&get);
                    let getw = |v: VarId| {
                        w.iter().find(|&&(s, _)| s == v).map(|&(_, b)| b).unwrap_or_else(|| get(v))
                    };
                    assert_eq!(energy_with(&em.fragment, &getw), 0);
                } else {
                    assert!(min >= 1, "k={k} B={block} {vals:?} -> {out} gave {min}");
                }
            }
        }
    }

    #[test]
    fn two_input_single_block() {
        // B = width degenerates to one squared equality with a single carry
        let mut reg = VarRegistry::new();
        let a = bit_vec(&mut reg, "a", 3);
        let b_ = bit_vec(&mut reg, "b", 3);
        let c = bit_vec(&mut reg, "c", 3);
        let spec = ModularAddSpec {
            inputs: vec![
                a.iter().map(|&v| Wire::lit(v)).collect(),
                b_.iter().map(|&v| Wire::lit(v)).collect(),
            ],
            output: c.iter().map(|&v| Wire::lit(v)).collect(),
            block_size: 3,
            width: 3,
        };
        let em = encode_modular_add(&mut reg, &spec).unwrap();
        assert_eq!(em.subst.len(), 1);
        check_adder(2, 3, 3);
    }

    #[test]
    fn two_input_blocked() {
        check_adder(2, 2, 4);
        check_adder(2, 1, 3);
    }

    #[test]
    fn four_input_blocked() {
        check_adder(4, 2, 3);
    }

    #[test]
    fn carry_counts_match_input_count() {
        // a single wide block needs exactly ceil(log2 k) carry bits: the
        // sum of k six-bit words overflows by at most k - 1
        for k in 2..=7usize {
            let width = 6;
            let mut reg = VarRegistry::new();
            let inputs: Vec<Vec<Wire>> = (0..k)
                .map(|i| {
                    bit_vec(&mut reg, &format!("a{i}_"), width)
                        .into_iter()
                        .map(Wire::lit)
                        .collect()
                })
                .collect();
            let output = bit_vec(&mut reg, "c_", width).into_iter().map(Wire::lit).collect();
            let spec = ModularAddSpec {
                inputs,
                output,
                block_size: 6,
                width,
            };
            let em = encode_modular_add(&mut reg, &spec).unwrap();
            let expect = (k as f64).log2().ceil() as usize;
            assert_eq!(em.subst.len(), expect, "k={k}");
        }
    }

    #[test]
    fn constant_inputs_fold() {
        // a + 5 mod 16 with a constant second addend
        let mut reg = VarRegistry::new();
        let a = bit_vec(&mut reg, "a", 4);
        let c = bit_vec(&mut reg, "c", 4);
        let five: Vec<Wire> = (0..4).map(|j| Wire::Const(5 >> j & 1 == 1)).collect();
        let spec = ModularAddSpec {
            inputs: vec![a.iter().map(|&v| Wire::lit(v)).collect(), five],
            output: c.iter().map(|&v| Wire::lit(v)).collect(),
            block_size: 2,
            width: 4,
        };
        let em = encode_modular_add(&mut reg, &spec).unwrap();
        for av in 0..16u64 {
            for cv in 0..16u64 {
                let get = |v: VarId| {
                    if let Some(j) = a.iter().position(|&x| x == v) {
                        av >> j & 1 == 1
                    } else {
                        let j = c.iter().position(|&x| x == v).unwrap();
                        cv >> j & 1 == 1
                    }
                };
                let (min, _) = em.minimize_subst(&get);
                assert_eq!(min == 0, (av + 5) % 16 == cv, "{av} + 5 = {cv}?");
            }
        }
    }

    #[test]
    fn ragged_final_block() {
        // width 5 with B = 2 leaves a 1-bit final block
        check_adder(2, 2, 5);
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut reg = VarRegistry::new();
        let a = bit_vec(&mut reg, "a", 2);
        let wires: Vec<Wire> = a.iter().map(|&v| Wire::lit(v)).collect();
        let spec = ModularAddSpec {
            inputs: vec![wires.clone()],
            output: wires.clone(),
            block_size: 1,
            width: 2,
        };
        assert!(encode_modular_add(&mut reg, &spec).is_err());
        let spec = ModularAddSpec {
            inputs: vec![wires.clone(); 8],
            output: wires.clone(),
            block_size: 1,
            width: 2,
        };
        assert!(encode_modular_add(&mut reg, &spec).is_err());
        let spec = ModularAddSpec {
            inputs: vec![wires.clone(), wires[..1].to_vec()],
            output: wires,
            block_size: 0,
            width: 2,
        };
        assert!(encode_modular_add(&mut reg, &spec).is_err());
    }
}
