//! Boolean circuit intermediate representation.
//!
//! Circuits enter as binary gate graphs (Bristol files or the s-expression
//! DSL), are normalized into multi-input AND/OR/XOR clauses over literals by
//! [`flatten`], and leave for the compiler with substitution markers on
//! every gate whose value is consumed.

mod bristol;
mod flatten;
mod sexpr;
mod xor_reuse;

pub use bristol::parse_bristol;
pub use flatten::{flatten, FlatAtom, FlatCircuit, FlatGate, FlatKind, FlatLit, FlatWire};
pub use sexpr::parse_sexpr;
pub use xor_reuse::{apply_xor_reuse, xor_reuse, ReuseOutcome};

use crate::error::{Error, Result};
use std::collections::BTreeSet;

pub type NodeId = usize;

/// Elementary gate operations; the two-operand set mirrors the standard
/// table of binary connectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Input,
    Const0,
    Const1,
    Not,
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    /// a → b
    Imply,
    /// ¬(a → b) = a ∧ ¬b
    Nimply,
    /// b → a
    Cimply,
    /// ¬(b → a) = ¬a ∧ b
    Cnimply,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Input | Op::Const0 | Op::Const1 => 0,
            Op::Not => 1,
            _ => 2,
        }
    }

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Op::And => a && b,
            Op::Or => a || b,
            Op::Nand => !(a && b),
            Op::Nor => !(a || b),
            Op::Xor => a ^ b,
            Op::Xnor => !(a ^ b),
            Op::Imply => !a || b,
            Op::Nimply => a && !b,
            Op::Cimply => a || !b,
            Op::Cnimply => !a && b,
            _ => unreachable!("not a binary operation"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub op: Op,
    pub a: NodeId,
    pub b: NodeId,
}

/// A binary-gate circuit in topological order.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    nodes: Vec<Node>,
    inputs: Vec<NodeId>,
    input_names: Vec<String>,
    outputs: Vec<NodeId>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self, name: impl Into<String>) -> NodeId {
        let id = self.push_raw(Node {
            op: Op::Input,
            a: 0,
            b: 0,
        });
        self.inputs.push(id);
        self.input_names.push(name.into());
        id
    }

    pub fn constant(&mut self, value: bool) -> NodeId {
        self.push_raw(Node {
            op: if value { Op::Const1 } else { Op::Const0 },
            a: 0,
            b: 0,
        })
    }

    pub fn not(&mut self, a: NodeId) -> Result<NodeId> {
        self.gate(Op::Not, a, a)
    }

    pub fn gate(&mut self, op: Op, a: NodeId, b: NodeId) -> Result<NodeId> {
        let n = self.nodes.len();
        if a >= n || (op.arity() == 2 && b >= n) {
            return Err(Error::Structure(format!(
                "gate operand out of range (node {n})"
            )));
        }
        if op.arity() == 0 {
            return Err(Error::Structure("nullary op added as gate".into()));
        }
        Ok(self.push_raw(Node { op, a, b }))
    }

    fn push_raw(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn mark_output(&mut self, id: NodeId) {
        self.outputs.push(id);
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    /// Evaluates every node; `values[i]` is the i-th circuit input.
    pub fn eval_all(&self, values: &[bool]) -> Result<Vec<bool>> {
        if values.len() != self.inputs.len() {
            return Err(Error::Dimension {
                expected: self.inputs.len(),
                got: values.len(),
            });
        }
        let mut vals = vec![false; self.nodes.len()];
        let mut next_input = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            vals[i] = match node.op {
                Op::Input => {
                    let v = values[next_input];
                    next_input += 1;
                    v
                }
                Op::Const0 => false,
                Op::Const1 => true,
                Op::Not => !vals[node.a],
                op => op.apply(vals[node.a], vals[node.b]),
            };
        }
        Ok(vals)
    }

    pub fn eval(&self, values: &[bool]) -> Result<Vec<bool>> {
        let vals = self.eval_all(values)?;
        Ok(self.outputs.iter().map(|&o| vals[o]).collect())
    }

    /// Number of references to each node from other gates or outputs.
    pub fn fanout(&self) -> Vec<usize> {
        let mut fan = vec![0usize; self.nodes.len()];
        for node in &self.nodes {
            match node.op.arity() {
                1 => fan[node.a] += 1,
                2 => {
                    fan[node.a] += 1;
                    fan[node.b] += 1;
                }
                _ => {}
            }
        }
        for &o in &self.outputs {
            fan[o] += 1;
        }
        fan
    }
}

/// A multi-input XOR clause under set semantics: a literal appearing twice
/// cancels, and a negated literal is the positive literal plus a constant
/// flip.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct XorClause {
    /// Positive-variable identifiers present an odd number of times.
    pub vars: BTreeSet<usize>,
    pub constant: bool,
}

impl XorClause {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `var` (negated: also flips the constant).
    pub fn toggle(&mut self, var: usize, negated: bool) {
        if !self.vars.remove(&var) {
            self.vars.insert(var);
        }
        self.constant ^= negated;
    }

    pub fn xor_assign(&mut self, other: &XorClause) {
        for &v in &other.vars {
            self.toggle(v, false);
        }
        self.constant ^= other.constant;
    }

    pub fn eval(&self, get: &dyn Fn(usize) -> bool) -> bool {
        self.vars.iter().fold(self.constant, |acc, &v| acc ^ get(v))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}
