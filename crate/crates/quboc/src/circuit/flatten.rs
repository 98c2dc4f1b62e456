//! Collapse binary gate graphs into multi-input AND/OR/XOR clauses.
//!
//! Every binary connective belongs to one of three equivalence classes —
//! conjunction, disjunction or parity — once negations are pushed to the
//! leaves. Chains within a class (and dual-class children under a
//! negation, by De Morgan) merge into a single multi-input gate when the
//! child is not shared; shared children keep their own gate and are
//! referenced through a literal.

use super::{Circuit, NodeId, Op};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatKind {
    And,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlatAtom {
    Input(usize),
    Gate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlatLit {
    pub atom: FlatAtom,
    pub negated: bool,
}

impl FlatLit {
    fn negate_if(self, c: bool) -> Self {
        Self {
            atom: self.atom,
            negated: self.negated ^ c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatWire {
    Const(bool),
    Lit(FlatLit),
}

impl FlatWire {
    fn negate_if(self, c: bool) -> Self {
        match self {
            FlatWire::Const(b) => FlatWire::Const(b ^ c),
            FlatWire::Lit(l) => FlatWire::Lit(l.negate_if(c)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlatGate {
    pub kind: FlatKind,
    pub lits: Vec<FlatLit>,
    /// For XOR gates: the gate value is XOR of the literals, then flipped
    /// when this is set (the folded XNOR constant).
    pub xor_const: bool,
}

/// A flattened circuit: multi-input gates in topological order over input
/// and earlier-gate literals.
#[derive(Debug, Clone)]
pub struct FlatCircuit {
    pub input_names: Vec<String>,
    pub gates: Vec<FlatGate>,
    pub outputs: Vec<FlatWire>,
}

impl FlatCircuit {
    pub fn n_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn eval_gates(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.n_inputs() {
            return Err(Error::Dimension {
                expected: self.n_inputs(),
                got: inputs.len(),
            });
        }
        let mut gate_vals = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            let lit = |l: &FlatLit| {
                let v = match l.atom {
                    FlatAtom::Input(k) => inputs[k],
                    FlatAtom::Gate(k) => gate_vals[k],
                };
                v ^ l.negated
            };
            gate_vals[i] = match g.kind {
                FlatKind::And => g.lits.iter().all(lit),
                FlatKind::Or => g.lits.iter().any(lit),
                FlatKind::Xor => g.lits.iter().fold(g.xor_const, |acc, l| acc ^ lit(l)),
            };
        }
        Ok(gate_vals)
    }

    pub fn eval(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        let gate_vals = self.eval_gates(inputs)?;
        Ok(self
            .outputs
            .iter()
            .map(|w| match *w {
                FlatWire::Const(b) => b,
                FlatWire::Lit(l) => {
                    let v = match l.atom {
                        FlatAtom::Input(k) => inputs[k],
                        FlatAtom::Gate(k) => gate_vals[k],
                    };
                    v ^ l.negated
                }
            })
            .collect())
    }
}

/// (class, negate-a, negate-b) of each binary connective; XNOR is XOR with
/// a folded constant instead of a leaf negation.
fn classify(op: Op) -> Option<(FlatKind, bool, bool, bool)> {
    Some(match op {
        Op::And => (FlatKind::And, false, false, false),
        Op::Nor => (FlatKind::And, true, true, false),
        Op::Nimply => (FlatKind::And, false, true, false),
        Op::Cnimply => (FlatKind::And, true, false, false),
        Op::Or => (FlatKind::Or, false, false, false),
        Op::Nand => (FlatKind::Or, true, true, false),
        Op::Imply => (FlatKind::Or, true, false, false),
        Op::Cimply => (FlatKind::Or, false, true, false),
        Op::Xor => (FlatKind::Xor, false, false, false),
        Op::Xnor => (FlatKind::Xor, false, false, true),
        _ => return None,
    })
}

struct Flattener<'a> {
    circuit: &'a Circuit,
    fanout: Vec<usize>,
    input_index: Vec<usize>,
    memo: Vec<Option<FlatWire>>,
    gates: Vec<FlatGate>,
}

/// Literal accumulator for one multi-input gate, applying the per-class
/// simplification rules as literals arrive.
struct Acc {
    kind: FlatKind,
    lits: Vec<FlatLit>,
    xor_const: bool,
    /// And: a false literal was seen; Or: a true one (gate is constant).
    saturated: bool,
}

impl Acc {
    fn new(kind: FlatKind) -> Self {
        Self {
            kind,
            lits: Vec::new(),
            xor_const: false,
            saturated: false,
        }
    }

    fn push_const(&mut self, b: bool) {
        match self.kind {
            FlatKind::And => {
                if !b {
                    self.saturated = true;
                }
            }
            FlatKind::Or => {
                if b {
                    self.saturated = true;
                }
            }
            FlatKind::Xor => self.xor_const ^= b,
        }
    }

    fn push_lit(&mut self, l: FlatLit) {
        match self.kind {
            FlatKind::Xor => {
                // set semantics: a repeated variable cancels, a complement
                // pair cancels into a constant flip
                if let Some(pos) = self.lits.iter().position(|e| e.atom == l.atom) {
                    let other = self.lits.swap_remove(pos);
                    // (v ^ n1) ⊕ (v ^ n2) = n1 ⊕ n2
                    self.xor_const ^= other.negated ^ l.negated;
                } else {
                    self.lits.push(l);
                }
            }
            FlatKind::And | FlatKind::Or => {
                if let Some(e) = self.lits.iter().find(|e| e.atom == l.atom) {
                    if e.negated != l.negated {
                        // x ∧ x̄ = 0, x ∨ x̄ = 1
                        self.saturated = true;
                    }
                    // duplicate literal: idempotent, drop
                } else {
                    self.lits.push(l);
                }
            }
        }
    }

    /// The gate value when it degenerates to a constant or single literal.
    fn finish(mut self) -> std::result::Result<FlatGate, FlatWire> {
        if self.saturated {
            return Err(FlatWire::Const(matches!(self.kind, FlatKind::Or)));
        }
        if self.lits.is_empty() {
            return Err(FlatWire::Const(match self.kind {
                FlatKind::And => true,
                FlatKind::Or => false,
                FlatKind::Xor => self.xor_const,
            }));
        }
        if self.lits.len() == 1 {
            let l = self.lits[0];
            return Err(FlatWire::Lit(match self.kind {
                FlatKind::Xor => l.negate_if(self.xor_const),
                _ => l,
            }));
        }
        self.lits.sort_unstable();
        Ok(FlatGate {
            kind: self.kind,
            lits: self.lits,
            xor_const: self.xor_const,
        })
    }
}

impl<'a> Flattener<'a> {
    /// Whether a child of class `child_kind`, used under `negated` phase,
    /// merges into a parent accumulator of class `kind`. Merging a negated
    /// dual-class child applies De Morgan; parity absorbs negation into
    /// the constant.
    fn merges(kind: FlatKind, child_kind: FlatKind, negated: bool) -> bool {
        match (kind, child_kind) {
            (FlatKind::Xor, FlatKind::Xor) => true,
            (FlatKind::And, FlatKind::And) | (FlatKind::Or, FlatKind::Or) => !negated,
            (FlatKind::And, FlatKind::Or) | (FlatKind::Or, FlatKind::And) => negated,
            _ => false,
        }
    }

    /// Folds node `id`, negated as given, into the accumulator: constants
    /// fold, compatible unshared gates inline, everything else becomes a
    /// literal.
    fn collect(&mut self, id: NodeId, negated: bool, acc: &mut Acc) -> Result<()> {
        let node = self.circuit.nodes()[id];
        match node.op {
            Op::Const0 => acc.push_const(negated),
            Op::Const1 => acc.push_const(!negated),
            Op::Not => self.collect(node.a, !negated, acc)?,
            Op::Input => acc.push_lit(FlatLit {
                atom: FlatAtom::Input(self.input_index[id]),
                negated,
            }),
            op => {
                let (kind, na, nb, flip) = classify(op).expect("binary op");
                let inline = self.fanout[id] == 1 && Self::merges(acc.kind, kind, negated);
                if inline {
                    // parity: parent-level negation and the XNOR constant
                    // both land in the accumulator constant
                    let neg = if kind == FlatKind::Xor { false } else { negated };
                    if kind == FlatKind::Xor {
                        acc.push_const(negated ^ flip);
                    }
                    self.collect(node.a, na ^ neg, acc)?;
                    self.collect(node.b, nb ^ neg, acc)?;
                } else {
                    match self.as_wire(id)?.negate_if(negated) {
                        FlatWire::Const(b) => acc.push_const(b),
                        FlatWire::Lit(l) => acc.push_lit(l),
                    }
                }
            }
        }
        Ok(())
    }

    /// The value of node `id` as a wire, materializing a flat gate when the
    /// node is a non-degenerate gate. Memoized so shared nodes get exactly
    /// one gate.
    fn as_wire(&mut self, id: NodeId) -> Result<FlatWire> {
        if let Some(w) = self.memo[id] {
            return Ok(w);
        }
        let node = self.circuit.nodes()[id];
        let wire = match node.op {
            Op::Input => FlatWire::Lit(FlatLit {
                atom: FlatAtom::Input(self.input_index[id]),
                negated: false,
            }),
            Op::Const0 => FlatWire::Const(false),
            Op::Const1 => FlatWire::Const(true),
            Op::Not => self.as_wire(node.a)?.negate_if(true),
            op => {
                let (kind, na, nb, flip) = classify(op).expect("binary op");
                let mut acc = Acc::new(kind);
                if kind == FlatKind::Xor {
                    acc.push_const(flip);
                }
                self.collect(node.a, na, &mut acc)?;
                self.collect(node.b, nb, &mut acc)?;
                match acc.finish() {
                    Ok(gate) => {
                        self.gates.push(gate);
                        FlatWire::Lit(FlatLit {
                            atom: FlatAtom::Gate(self.gates.len() - 1),
                            negated: false,
                        })
                    }
                    Err(w) => w,
                }
            }
        };
        self.memo[id] = Some(wire);
        Ok(wire)
    }
}

/// Flattens a binary circuit into multi-input gates; see module docs.
pub fn flatten(c: &Circuit) -> Result<FlatCircuit> {
    let mut input_index = vec![usize::MAX; c.nodes().len()];
    for (k, &id) in c.inputs().iter().enumerate() {
        input_index[id] = k;
    }
    let mut f = Flattener {
        circuit: c,
        fanout: c.fanout(),
        input_index,
        memo: vec![None; c.nodes().len()],
        gates: Vec::new(),
    };
    let outputs = c
        .outputs()
        .iter()
        .map(|&o| f.as_wire(o))
        .collect::<Result<Vec<_>>>()?;
    Ok(FlatCircuit {
        input_names: c.input_names().to_vec(),
        gates: f.gates,
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn differential(c: &Circuit) {
        let fc = flatten(c).unwrap();
        let n = c.inputs().len();
        assert!(n <= 16);
        for mask in 0..1u64 << n {
            let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(
                c.eval(&bits).unwrap(),
                fc.eval(&bits).unwrap(),
                "inputs {mask:b}"
            );
        }
    }

    #[test]
    fn nimply_merges_into_conjunction() {
        // a ∧ (b ↛ c) → 3-input AND over (a, b, c̄)
        let mut c = Circuit::new();
        let a = c.input("a");
        let b = c.input("b");
        let cc = c.input("c");
        let inner = c.gate(Op::Nimply, b, cc).unwrap();
        let root = c.gate(Op::And, a, inner).unwrap();
        c.mark_output(root);
        let fc = flatten(&c).unwrap();
        assert_eq!(fc.gates.len(), 1);
        assert_eq!(fc.gates[0].kind, FlatKind::And);
        assert_eq!(fc.gates[0].lits.len(), 3);
        assert_eq!(
            fc.gates[0]
                .lits
                .iter()
                .filter(|l| l.negated)
                .map(|l| l.atom)
                .collect::<Vec<_>>(),
            vec![FlatAtom::Input(2)]
        );
        differential(&c);
    }

    #[test]
    fn xnor_pair_cancels_constants() {
        // (a⇔b) ⊕ (c⇔d) → 4-input XOR, constant 0
        let mut c = Circuit::new();
        let ins: Vec<_> = ["a", "b", "c", "d"].map(|n| c.input(n)).into();
        let e1 = c.gate(Op::Xnor, ins[0], ins[1]).unwrap();
        let e2 = c.gate(Op::Xnor, ins[2], ins[3]).unwrap();
        let root = c.gate(Op::Xor, e1, e2).unwrap();
        c.mark_output(root);
        let fc = flatten(&c).unwrap();
        assert_eq!(fc.gates.len(), 1);
        let g = &fc.gates[0];
        assert_eq!(g.kind, FlatKind::Xor);
        assert_eq!(g.lits.len(), 4);
        assert!(!g.xor_const);
        differential(&c);
    }

    #[test]
    fn lone_xnor_keeps_constant() {
        // a⇔b → XOR(a, b) with constant 1
        let mut c = Circuit::new();
        let a = c.input("a");
        let b = c.input("b");
        let root = c.gate(Op::Xnor, a, b).unwrap();
        c.mark_output(root);
        let fc = flatten(&c).unwrap();
        assert_eq!(fc.gates.len(), 1);
        assert!(fc.gates[0].xor_const);
        differential(&c);
    }

    #[test]
    fn shared_subgate_not_inlined() {
        // t = a∧b feeds two gates: it must stay a separate gate
        let mut c = Circuit::new();
        let a = c.input("a");
        let b = c.input("b");
        let d = c.input("d");
        let t = c.gate(Op::And, a, b).unwrap();
        let u = c.gate(Op::And, t, d).unwrap();
        let v = c.gate(Op::Or, t, d).unwrap();
        c.mark_output(u);
        c.mark_output(v);
        let fc = flatten(&c).unwrap();
        assert_eq!(fc.gates.len(), 3);
        differential(&c);
    }

    #[test]
    fn demorgan_merges_negated_dual() {
        // ¬(a∨b) ∧ c → AND(ā, b̄, c)
        let mut c = Circuit::new();
        let a = c.input("a");
        let b = c.input("b");
        let cc = c.input("c");
        let o = c.gate(Op::Or, a, b).unwrap();
        let n = c.not(o).unwrap();
        let root = c.gate(Op::And, n, cc).unwrap();
        c.mark_output(root);
        let fc = flatten(&c).unwrap();
        assert_eq!(fc.gates.len(), 1);
        assert_eq!(fc.gates[0].lits.iter().filter(|l| l.negated).count(), 2);
        differential(&c);
    }

    #[test]
    fn complementary_literals_fold() {
        // a ∧ ¬a → const false; a ∨ ¬a → const true; a ⊕ a → const false
        let mut c = Circuit::new();
        let a = c.input("a");
        let na = c.not(a).unwrap();
        let g0 = c.gate(Op::And, a, na).unwrap();
        let g1 = c.gate(Op::Or, a, na).unwrap();
        let g2 = c.gate(Op::Xor, a, a).unwrap();
        c.mark_output(g0);
        c.mark_output(g1);
        c.mark_output(g2);
        let fc = flatten(&c).unwrap();
        assert!(fc.gates.is_empty());
        assert_eq!(
            fc.outputs,
            vec![
                FlatWire::Const(false),
                FlatWire::Const(true),
                FlatWire::Const(false)
            ]
        );
        differential(&c);
    }

    #[test]
    fn random_circuits_preserve_semantics() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ops = [
            Op::And,
            Op::Or,
            Op::Nand,
            Op::Nor,
            Op::Xor,
            Op::Xnor,
            Op::Imply,
            Op::Nimply,
            Op::Cimply,
            Op::Cnimply,
        ];
        for _ in 0..60 {
            let mut c = Circuit::new();
            let n_in = rng.gen_range(2..=6);
            for i in 0..n_in {
                c.input(format!("i{i}"));
            }
            if rng.gen_bool(0.3) {
                c.constant(rng.gen_bool(0.5));
            }
            let n_gates = rng.gen_range(1..=12);
            for _ in 0..n_gates {
                let hi = c.nodes().len();
                let a = rng.gen_range(0..hi);
                if rng.gen_bool(0.15) {
                    c.not(a).unwrap();
                } else {
                    let b = rng.gen_range(0..hi);
                    let op = ops[rng.gen_range(0..ops.len())];
                    c.gate(op, a, b).unwrap();
                }
            }
            let hi = c.nodes().len();
            for _ in 0..rng.gen_range(1..=3) {
                let o = rng.gen_range(0..hi);
                c.mark_output(o);
            }
            differential(&c);
        }
    }
}
