//! Lowering of flattened circuits onto pattern emissions.
//!
//! Every flat gate whose value is consumed elsewhere (by another gate or by
//! a free output) receives a result variable and is encoded with the
//! matching result-bit pattern. Gates that only feed constant-constrained
//! outputs become pure constraints with the polarity folded in, which saves
//! the result variable. Long clauses are split into chains of intermediate
//! result gates when a clause-length limit is set.

use crate::circuit::{FlatAtom, FlatCircuit, FlatGate, FlatKind, FlatLit, FlatWire};
use crate::error::{Error, Result};
use crate::patterns::{
    encode_and, encode_or, encode_parity, encode_xor3_result, Literal, PatternEmission, Wire,
};
use crate::qubo::{QuboBuilder, QuboInstance, VarId, VarKind, VarRegistry};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputSpec {
    /// The output is exposed as a wire over the instance variables.
    Free,
    /// The output is constrained to the given constant.
    Fixed(bool),
}

#[derive(Debug, Clone)]
pub struct CompileOptions {
    /// Maximum number of literals (inputs plus result bit) in one emitted
    /// clause; longer gates are chained through intermediates. Must be at
    /// least 3 when set.
    pub clause_length_limit: Option<usize>,
    /// Use the coefficient-1 product form for pure conjunction constraints.
    pub and_low_coeff: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            clause_length_limit: None,
            and_low_coeff: false,
        }
    }
}

/// One derived variable of the witness plan: `var` equals the gate function
/// applied to `lits` (for XOR, additionally flipped by `flip`).
struct Def {
    var: VarId,
    kind: FlatKind,
    lits: Vec<Literal>,
    flip: bool,
}

impl Def {
    fn eval(&self, get: &dyn Fn(VarId) -> bool) -> bool {
        match self.kind {
            FlatKind::And => self.lits.iter().all(|l| l.eval(get)),
            FlatKind::Or => self.lits.iter().any(|l| l.eval(get)),
            FlatKind::Xor => self.lits.iter().fold(self.flip, |acc, l| acc ^ l.eval(get)),
        }
    }
}

/// A lowered circuit: the instance, its variable registry and enough
/// structure to reconstruct a zero-energy assignment from input bits.
pub struct Compiled {
    pub qubo: QuboInstance,
    pub registry: VarRegistry,
    /// Instance variable of each circuit input, in input order.
    pub input_vars: Vec<VarId>,
    /// Result variable of each flat gate, when one was needed.
    pub gate_vars: Vec<Option<VarId>>,
    /// Free outputs as wires over the instance variables (constant-folded
    /// outputs stay constants); `None` for constrained outputs.
    pub outputs: Vec<Option<Wire>>,
    emissions: Vec<PatternEmission>,
    defs: Vec<Def>,
}

impl Compiled {
    pub fn emissions(&self) -> &[PatternEmission] {
        &self.emissions
    }

    /// Extends circuit input bits to a full assignment: derived variables
    /// take their defined values and substitution bits their witness values.
    /// The result has energy zero exactly when every constrained output
    /// matches its constant under `inputs`.
    pub fn witness(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.input_vars.len() {
            return Err(Error::Dimension {
                expected: self.input_vars.len(),
                got: inputs.len(),
            });
        }
        let mut assign = vec![false; self.registry.len()];
        for (&v, &b) in self.input_vars.iter().zip(inputs) {
            assign[v.index()] = b;
        }
        for def in &self.defs {
            let v = def.eval(&|u: VarId| assign[u.index()]);
            assign[def.var.index()] = v;
        }
        for em in &self.emissions {
            for (v, b) in em.witness_subst(&|u: VarId| assign[u.index()]) {
                assign[v.index()] = b;
            }
        }
        Ok(assign)
    }
}

struct Lowerer<'a> {
    opts: &'a CompileOptions,
    reg: VarRegistry,
    input_vars: Vec<VarId>,
    gate_vars: Vec<Option<VarId>>,
    emissions: Vec<PatternEmission>,
    defs: Vec<Def>,
    /// Linear pins (var, required value) for doubly-used constrained values.
    pins: Vec<(VarId, bool)>,
}

impl<'a> Lowerer<'a> {
    fn atom_lit(&self, l: FlatLit) -> Literal {
        let var = match l.atom {
            FlatAtom::Input(k) => self.input_vars[k],
            FlatAtom::Gate(g) => self.gate_vars[g].expect("consumed gate has a variable"),
        };
        if l.negated {
            Literal::neg(var)
        } else {
            Literal::pos(var)
        }
    }

    fn limit(&self) -> usize {
        self.opts.clause_length_limit.unwrap_or(usize::MAX)
    }

    /// Replaces prefixes of `lits` with chain intermediates until at most
    /// `max_final` literals remain.
    fn reduce(&mut self, kind: FlatKind, mut lits: Vec<Literal>, max_final: usize) -> Result<Vec<Literal>> {
        while lits.len() > max_final {
            let take = (self.limit() - 1).min(lits.len());
            let chunk: Vec<Literal> = lits.drain(..take).collect();
            let name = format!("t{}", self.reg.len());
            let t = self.reg.fresh(name, VarKind::Intermediate, "chain")?;
            self.emit_result(kind, chunk.clone(), false, t)?;
            self.defs.push(Def {
                var: t,
                kind,
                lits: chunk,
                flip: false,
            });
            lits.insert(0, Literal::pos(t));
        }
        Ok(lits)
    }

    /// Emits `r = OP(lits)` (XOR additionally flipped by `flip`). `lits`
    /// must already respect the clause-length limit minus the result bit.
    fn emit_result(&mut self, kind: FlatKind, mut lits: Vec<Literal>, flip: bool, r: VarId) -> Result<()> {
        let em = match kind {
            FlatKind::Xor => {
                if flip {
                    lits[0] = lits[0].negate();
                }
                if lits.len() == 3 {
                    encode_xor3_result(&mut self.reg, lits[0], lits[1], lits[2], r)?
                } else {
                    encode_parity(&mut self.reg, &lits, Some(r))?
                }
            }
            FlatKind::And => encode_and(&mut self.reg, &lits, Some(r), false)?,
            FlatKind::Or => encode_or(&mut self.reg, &lits, Some(r))?,
        };
        self.emissions.push(em);
        Ok(())
    }

    /// Emits the constraint `OP(lits) = value` without a result variable.
    fn emit_constraint(&mut self, kind: FlatKind, mut lits: Vec<Literal>, flip: bool, value: bool) -> Result<()> {
        let em = match kind {
            FlatKind::Xor => {
                // XOR(lits) must equal value ^ flip; the parity pattern
                // fixes odd parity, so fold an even target into a literal.
                if !(value ^ flip) {
                    lits[0] = lits[0].negate();
                }
                encode_parity(&mut self.reg, &lits, None)?
            }
            FlatKind::And if value => {
                encode_and(&mut self.reg, &lits, None, self.opts.and_low_coeff)?
            }
            FlatKind::And => {
                let negs: Vec<Literal> = lits.iter().map(|l| l.negate()).collect();
                encode_or(&mut self.reg, &negs, None)?
            }
            FlatKind::Or if value => encode_or(&mut self.reg, &lits, None)?,
            FlatKind::Or => {
                let negs: Vec<Literal> = lits.iter().map(|l| l.negate()).collect();
                encode_and(&mut self.reg, &negs, None, self.opts.and_low_coeff)?
            }
        };
        self.emissions.push(em);
        Ok(())
    }

    fn lower_gate(&mut self, idx: usize, gate: &FlatGate, fixed: Option<bool>) -> Result<()> {
        let lits: Vec<Literal> = gate.lits.iter().map(|&l| self.atom_lit(l)).collect();
        if let Some(r) = self.gate_vars[idx] {
            let reduced = self.reduce(gate.kind, lits.clone(), self.limit().saturating_sub(1))?;
            self.emit_result(gate.kind, reduced, gate.xor_const, r)?;
            self.defs.push(Def {
                var: r,
                kind: gate.kind,
                lits,
                flip: gate.xor_const,
            });
            if let Some(v) = fixed {
                self.pins.push((r, v));
            }
        } else if let Some(v) = fixed {
            let reduced = self.reduce(gate.kind, lits, self.limit())?;
            self.emit_constraint(gate.kind, reduced, gate.xor_const, v)?;
        }
        Ok(())
    }
}

/// Lowers a flattened circuit to a QUBO instance whose zero-energy
/// assignments are exactly the circuit executions satisfying every `Fixed`
/// output, projected onto (inputs, derived values, witness bits).
pub fn lower(flat: &FlatCircuit, outputs: &[OutputSpec], opts: &CompileOptions) -> Result<Compiled> {
    if outputs.len() != flat.outputs.len() {
        return Err(Error::Dimension {
            expected: flat.outputs.len(),
            got: outputs.len(),
        });
    }
    if let Some(k) = opts.clause_length_limit {
        if k < 3 {
            return Err(Error::Contract(
                "clause length limit must be at least 3".into(),
            ));
        }
    }

    // Required constant per atom, from the Fixed outputs.
    let mut required: BTreeMap<FlatAtom, bool> = BTreeMap::new();
    let mut consumed = vec![false; flat.gates.len()];
    for (w, spec) in flat.outputs.iter().zip(outputs) {
        match (w, spec) {
            (FlatWire::Const(b), OutputSpec::Fixed(c)) => {
                if b != c {
                    return Err(Error::Contract(
                        "output constant contradicts its constraint".into(),
                    ));
                }
            }
            (FlatWire::Lit(l), OutputSpec::Fixed(c)) => {
                let v = c ^ l.negated;
                if let Some(&prev) = required.get(&l.atom) {
                    if prev != v {
                        return Err(Error::Contract(
                            "contradictory constraints on one output value".into(),
                        ));
                    }
                } else {
                    required.insert(l.atom, v);
                }
            }
            (FlatWire::Lit(l), OutputSpec::Free) => {
                if let FlatAtom::Gate(g) = l.atom {
                    consumed[g] = true;
                }
            }
            (FlatWire::Const(_), OutputSpec::Free) => {}
        }
    }
    for g in &flat.gates {
        for l in &g.lits {
            if let FlatAtom::Gate(k) = l.atom {
                consumed[k] = true;
            }
        }
    }

    let mut reg = VarRegistry::new();
    let input_vars: Vec<VarId> = flat
        .input_names
        .iter()
        .map(|n| reg.fresh(n.clone(), VarKind::CircuitInput, "input"))
        .collect::<Result<_>>()?;
    let gate_vars: Vec<Option<VarId>> = (0..flat.gates.len())
        .map(|i| {
            if consumed[i] {
                Some(reg.fresh(format!("g{i}"), VarKind::Intermediate, "gate"))
            } else {
                None
            }
        })
        .map(|o| o.transpose())
        .collect::<Result<_>>()?;

    let mut lo = Lowerer {
        opts,
        reg,
        input_vars,
        gate_vars,
        emissions: Vec::new(),
        defs: Vec::new(),
        pins: Vec::new(),
    };
    for (&atom, &v) in &required {
        if let FlatAtom::Input(k) = atom {
            let var = lo.input_vars[k];
            lo.pins.push((var, v));
        }
    }
    for idx in 0..flat.gates.len() {
        let gate = flat.gates[idx].clone();
        let fixed = required.get(&FlatAtom::Gate(idx)).copied();
        lo.lower_gate(idx, &gate, fixed)?;
    }

    let mut b = QuboBuilder::new();
    b.reserve_vars(lo.reg.len());
    for em in &lo.emissions {
        b.merge(&em.fragment)?;
    }
    for &(v, want) in &lo.pins {
        // (x - c)^2 over a boolean x and constant c
        if want {
            b.add_offset(1)?;
            b.add_linear(v, -1)?;
        } else {
            b.add_linear(v, 1)?;
        }
    }

    let outputs = flat
        .outputs
        .iter()
        .zip(outputs)
        .map(|(w, spec)| match (w, spec) {
            (_, OutputSpec::Fixed(_)) => None,
            (FlatWire::Const(b), OutputSpec::Free) => Some(Wire::Const(*b)),
            (FlatWire::Lit(l), OutputSpec::Free) => {
                let lit = lo.atom_lit(*l);
                Some(Wire::Lit(lit))
            }
        })
        .collect();

    Ok(Compiled {
        qubo: b.build(),
        registry: lo.reg,
        input_vars: lo.input_vars,
        gate_vars: lo.gate_vars,
        outputs,
        emissions: lo.emissions,
        defs: lo.defs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{flatten, parse_sexpr};
    use crate::patterns::energy_with;
    use crate::verify::brute_force_zero_set;

    fn compile_src(src: &str, outputs: &[OutputSpec], opts: &CompileOptions) -> Compiled {
        let c = parse_sexpr(src).unwrap();
        let flat = flatten(&c).unwrap();
        lower(&flat, outputs, opts).unwrap()
    }

    /// Asserts the instance zero set over the circuit inputs equals the set
    /// of input assignments satisfying every fixed output, and that the
    /// witness attains energy zero there (and at least one elsewhere).
    fn check_against_circuit(src: &str, outputs: &[OutputSpec], opts: &CompileOptions) {
        let c = parse_sexpr(src).unwrap();
        let flat = flatten(&c).unwrap();
        let comp = lower(&flat, outputs, opts).unwrap();
        let n = comp.input_vars.len();
        assert!(n <= 12);
        let report = brute_force_zero_set(&comp.qubo, &comp.input_vars).unwrap();
        assert!(!report.has_negative);
        for mask in 0..1u64 << n {
            let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let outs = flat.eval(&bits).unwrap();
            let sat = outs
                .iter()
                .zip(outputs)
                .all(|(&o, s)| !matches!(s, OutputSpec::Fixed(c) if o != *c));
            assert_eq!(
                report.zero_set.contains(&mask),
                sat,
                "inputs {mask:b} in {src}"
            );
            let assign = comp.witness(&bits).unwrap();
            let energy = energy_with(&comp.qubo, &|v: VarId| assign[v.index()]);
            if sat {
                assert_eq!(energy, 0, "witness energy at {mask:b} in {src}");
            } else {
                assert!(energy >= 1, "unsat energy at {mask:b} in {src}");
            }
        }
    }

    #[test]
    fn simple_formulas_sound() {
        let t = OutputSpec::Fixed(true);
        let dfl = CompileOptions::default();
        for src in [
            "(inputs a b c)(outputs (and a b c))",
            "(inputs a b c)(outputs (or a (not b) c))",
            "(inputs a b c d)(outputs (xor a b c d))",
            "(inputs a b c)(outputs (and (or a b) (xor b c)))",
            "(inputs a b c d)(def t (xor a b))(outputs (or (and t c) (and (not t) d)))",
            "(inputs a b c d e)(outputs (xor (and a b) (or c d e)))",
        ] {
            check_against_circuit(src, &[t], &dfl);
        }
    }

    #[test]
    fn multi_output_and_negative_constraints() {
        let dfl = CompileOptions::default();
        check_against_circuit(
            "(inputs a b c)(outputs (and a b) (xor b c))",
            &[OutputSpec::Fixed(true), OutputSpec::Fixed(false)],
            &dfl,
        );
        check_against_circuit(
            "(inputs a b c)(outputs (or a b c))",
            &[OutputSpec::Fixed(false)],
            &dfl,
        );
        check_against_circuit(
            "(inputs a b c)(outputs (nand a b) (nor b c))",
            &[OutputSpec::Fixed(false), OutputSpec::Fixed(true)],
            &dfl,
        );
    }

    #[test]
    fn shared_gate_gets_one_variable() {
        let comp = compile_src(
            "(inputs a b c)(def t (and a b))(outputs (or t c) (xor t c))",
            &[OutputSpec::Fixed(true), OutputSpec::Fixed(true)],
            &CompileOptions::default(),
        );
        let named: Vec<_> = comp.gate_vars.iter().flatten().collect();
        assert_eq!(named.len(), 1, "only the shared AND needs a variable");
        check_against_circuit(
            "(inputs a b c)(def t (and a b))(outputs (or t c) (xor t c))",
            &[OutputSpec::Fixed(true), OutputSpec::Fixed(true)],
            &CompileOptions::default(),
        );
    }

    #[test]
    fn clause_limit_chains_long_xor() {
        let src = "(inputs x0 x1 x2 x3 x4 x5 x6 x7)(outputs (xor x0 x1 x2 x3 x4 x5 x6 x7))";
        let opts = CompileOptions {
            clause_length_limit: Some(5),
            and_low_coeff: false,
        };
        let comp = compile_src(src, &[OutputSpec::Fixed(true)], &opts);
        // one intermediate over four literals, one final five-literal parity
        assert_eq!(comp.emissions.len(), 2);
        let inter = comp
            .registry
            .entries()
            .iter()
            .filter(|e| e.kind == VarKind::Intermediate)
            .count();
        assert_eq!(inter, 1);
        check_against_circuit(src, &[OutputSpec::Fixed(true)], &opts);
    }

    #[test]
    fn clause_limit_chains_and_or() {
        let opts = CompileOptions {
            clause_length_limit: Some(3),
            and_low_coeff: false,
        };
        check_against_circuit(
            "(inputs a b c d e f)(outputs (and a b c d e f))",
            &[OutputSpec::Fixed(true)],
            &opts,
        );
        check_against_circuit(
            "(inputs a b c d e f)(outputs (or a b c d e f))",
            &[OutputSpec::Fixed(false)],
            &opts,
        );
        check_against_circuit(
            "(inputs a b c d e)(def t (or a b c d e))(outputs (xor t a e))",
            &[OutputSpec::Fixed(true)],
            &opts,
        );
    }

    #[test]
    fn free_output_tracks_gate_value() {
        let c = parse_sexpr("(inputs a b c)(outputs (xor (and a b) c))").unwrap();
        let flat = flatten(&c).unwrap();
        let comp = lower(&flat, &[OutputSpec::Free], &CompileOptions::default()).unwrap();
        let wire = comp.outputs[0].expect("free output is exposed");
        for mask in 0..8u64 {
            let bits: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            let assign = comp.witness(&bits).unwrap();
            let get = |v: VarId| assign[v.index()];
            assert_eq!(energy_with(&comp.qubo, &get), 0);
            assert_eq!(wire.eval(&get), flat.eval(&bits).unwrap()[0]);
        }
    }

    #[test]
    fn input_pin_and_contradiction() {
        // constraining a bare input pins it
        let comp = compile_src(
            "(inputs a b)(outputs a (xor a b))",
            &[OutputSpec::Fixed(true), OutputSpec::Fixed(true)],
            &CompileOptions::default(),
        );
        let report = brute_force_zero_set(&comp.qubo, &comp.input_vars).unwrap();
        assert_eq!(report.zero_set, vec![0b01]);

        // a and ¬a cannot both be true
        let c = parse_sexpr("(inputs a)(outputs a (not a))").unwrap();
        let flat = flatten(&c).unwrap();
        let e = lower(
            &flat,
            &[OutputSpec::Fixed(true), OutputSpec::Fixed(true)],
            &CompileOptions::default(),
        );
        assert!(e.is_err());
    }

    #[test]
    fn low_coeff_and_keeps_soundness() {
        let opts = CompileOptions {
            clause_length_limit: None,
            and_low_coeff: true,
        };
        check_against_circuit(
            "(inputs a b c d e)(outputs (and a b c d e))",
            &[OutputSpec::Fixed(true)],
            &opts,
        );
        let comp = compile_src(
            "(inputs a b c d e)(outputs (and a b c d e))",
            &[OutputSpec::Fixed(true)],
            &opts,
        );
        assert!(comp.qubo.stats().max_abs_coeff <= 1);
    }

    #[test]
    fn rejects_tiny_clause_limit() {
        let c = parse_sexpr("(inputs a b)(outputs (and a b))").unwrap();
        let flat = flatten(&c).unwrap();
        let opts = CompileOptions {
            clause_length_limit: Some(2),
            and_low_coeff: false,
        };
        assert!(lower(&flat, &[OutputSpec::Fixed(true)], &opts).is_err());
    }
}
