//! Shared plumbing for the cryptographic QUBO builds.
//!
//! The builder keeps circuit values as lazy GF(2) linear expressions over
//! instance variables ([`Bx`]); XOR-only steps (shifts, rotations, basis
//! changes, MixColumns, key additions) cost nothing. An expression is
//! materialized into a variable — one parity clause, chained under the
//! clause-length limit — only where a nonlinear fragment or an adder needs
//! a literal input. Every derived variable records a definition so a full
//! zero-energy witness can be reconstructed from the unknown input bits
//! alone.

use crate::error::{Error, Result};
use crate::patterns::{
    encode_and, encode_gf4_mult, encode_gf16_inv, encode_majority3, encode_md5_i_aux,
    encode_modular_add, encode_or, encode_parity, encode_ternary_select, encode_xor3_result,
    energy_with, Literal, ModularAddSpec, PatternEmission, Wire,
};
use crate::qubo::{QuboBuilder, QuboInstance, QuboStats, VarId, VarKind, VarRegistry};
use serde::Serialize;
use std::collections::BTreeMap;

/// A GF(2) linear expression: XOR of variables plus a constant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bx {
    vars: std::collections::BTreeSet<VarId>,
    constant: bool,
}

impl Bx {
    pub fn from_const(c: bool) -> Self {
        Bx {
            vars: Default::default(),
            constant: c,
        }
    }

    pub fn from_var(v: VarId) -> Self {
        let mut b = Bx::default();
        b.vars.insert(v);
        b
    }

    pub fn xor_assign(&mut self, other: &Bx) {
        for &v in &other.vars {
            if !self.vars.remove(&v) {
                self.vars.insert(v);
            }
        }
        self.constant ^= other.constant;
    }

    pub fn xor_const(&mut self, c: bool) {
        self.constant ^= c;
    }

    pub fn as_const(&self) -> Option<bool> {
        self.vars.is_empty().then_some(self.constant)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn eval(&self, get: &dyn Fn(VarId) -> bool) -> bool {
        self.vars.iter().fold(self.constant, |acc, &v| acc ^ get(v))
    }
}

/// XOR of a slice of expressions.
pub fn bx_xor(parts: &[&Bx]) -> Bx {
    let mut acc = Bx::default();
    for p in parts {
        acc.xor_assign(p);
    }
    acc
}

/// A word as little-endian bit expressions.
pub type Wx = Vec<Bx>;

pub fn wx_const(value: u64, width: usize) -> Wx {
    (0..width).map(|i| Bx::from_const(value >> i & 1 == 1)).collect()
}

pub fn wx_vars(vars: &[VarId]) -> Wx {
    vars.iter().map(|&v| Bx::from_var(v)).collect()
}

pub fn wx_xor(a: &Wx, b: &Wx) -> Wx {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut r = x.clone();
            r.xor_assign(y);
            r
        })
        .collect()
}

/// Rotate left within the word width.
pub fn wx_rotl(w: &Wx, r: usize) -> Wx {
    let n = w.len();
    (0..n).map(|i| w[(i + n - r % n) % n].clone()).collect()
}

pub fn wx_rotr(w: &Wx, r: usize) -> Wx {
    wx_rotl(w, w.len() - r % w.len())
}

/// Logical right shift: vacated high bits become constant zero.
pub fn wx_shr(w: &Wx, r: usize) -> Wx {
    let n = w.len();
    (0..n)
        .map(|i| {
            if i + r < n {
                w[i + r].clone()
            } else {
                Bx::from_const(false)
            }
        })
        .collect()
}

/// Derived-variable definitions, in topological order, from which a witness
/// recomputes every non-substitution variable.
enum Def {
    /// `var` = XOR of literals, plus `flip`.
    Xor {
        var: VarId,
        lits: Vec<Literal>,
        flip: bool,
    },
    /// `var` = AND (all) or OR (any) of literals.
    Gate {
        var: VarId,
        lits: Vec<Literal>,
        any: bool,
    },
    /// Truth-table fragment: bit j of `table[index]` defines `outs[j]`,
    /// where `ins[i]` contributes bit i of the index.
    Table {
        ins: Vec<Literal>,
        outs: Vec<VarId>,
        table: Vec<u8>,
    },
    /// `outputs` = Σ inputs mod 2^width (inputs may mix wires and consts).
    Add {
        inputs: Vec<Vec<Wire>>,
        outputs: Vec<VarId>,
        width: usize,
    },
}

impl Def {
    fn apply(&self, assign: &mut [bool]) {
        let get = |a: &[bool], v: VarId| a[v.index()];
        match self {
            Def::Xor { var, lits, flip } => {
                let v = lits
                    .iter()
                    .fold(*flip, |acc, l| acc ^ l.eval(&|u| get(assign, u)));
                assign[var.index()] = v;
            }
            Def::Gate { var, lits, any } => {
                let v = if *any {
                    lits.iter().any(|l| l.eval(&|u| get(assign, u)))
                } else {
                    lits.iter().all(|l| l.eval(&|u| get(assign, u)))
                };
                assign[var.index()] = v;
            }
            Def::Table { ins, outs, table } => {
                let mut idx = 0usize;
                for (i, l) in ins.iter().enumerate() {
                    idx |= (l.eval(&|u| get(assign, u)) as usize) << i;
                }
                for (j, &o) in outs.iter().enumerate() {
                    assign[o.index()] = table[idx] >> j & 1 == 1;
                }
            }
            Def::Add {
                inputs,
                outputs,
                width,
            } => {
                let sum: u64 = inputs
                    .iter()
                    .map(|w| {
                        w.iter()
                            .enumerate()
                            .map(|(j, wire)| (wire.eval(&|u| get(assign, u)) as u64) << j)
                            .sum::<u64>()
                    })
                    .sum();
                let masked = if *width == 64 {
                    sum
                } else {
                    sum & ((1u64 << width) - 1)
                };
                for (j, &o) in outputs.iter().enumerate() {
                    assign[o.index()] = masked >> j & 1 == 1;
                }
            }
        }
    }
}

/// Per-origin variable counts for the build report.
#[derive(Debug, Clone, Serialize)]
pub struct BuildReport {
    pub algorithm: String,
    pub num_vars: usize,
    pub num_terms: usize,
    pub density_percent: f64,
    pub max_abs_coeff: i64,
    pub offset: i64,
    pub breakdown: BTreeMap<String, usize>,
}

/// A finished cryptographic instance with its witness plan.
pub struct CryptoInstance {
    pub qubo: QuboInstance,
    pub registry: VarRegistry,
    /// The unknown bits (key or message), little-endian build order.
    pub input_vars: Vec<VarId>,
    pub algorithm: String,
    emissions: Vec<PatternEmission>,
    defs: Vec<Def>,
}

impl CryptoInstance {
    /// Extends the unknown input bits to a full assignment via the recorded
    /// definitions and per-fragment witness procedures.
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
            def.apply(&mut assign);
        }
        for em in &self.emissions {
            for (v, b) in em.witness_subst(&|u: VarId| assign[u.index()]) {
                assign[v.index()] = b;
            }
        }
        Ok(assign)
    }

    pub fn energy_of(&self, assign: &[bool]) -> i64 {
        energy_with(&self.qubo, &|v: VarId| assign[v.index()])
    }

    pub fn report(&self) -> BuildReport {
        let QuboStats {
            num_vars,
            density,
            max_abs_coeff,
            ..
        } = self.qubo.stats();
        let num_terms = self.qubo.num_terms();
        let mut breakdown: BTreeMap<String, usize> = BTreeMap::new();
        for entry in self.registry.entries() {
            *breakdown.entry(entry.origin.clone()).or_default() += 1;
        }
        BuildReport {
            algorithm: self.algorithm.clone(),
            num_vars,
            num_terms,
            density_percent: density * 100.0,
            max_abs_coeff,
            offset: self.qubo.offset(),
            breakdown,
        }
    }
}

/// Incremental builder shared by the AES and hash constructions.
pub struct CryptoBuilder {
    pub reg: VarRegistry,
    emissions: Vec<PatternEmission>,
    defs: Vec<Def>,
    /// Materialization cache: variable set → (variable, constant at
    /// definition time), so x⊕c and x⊕c̄ share one variable.
    memo: BTreeMap<Vec<VarId>, (VarId, bool)>,
    clause_limit: Option<usize>,
}

impl CryptoBuilder {
    pub fn new(clause_limit: Option<usize>) -> Result<Self> {
        if let Some(k) = clause_limit {
            if k < 3 {
                return Err(Error::Contract(
                    "clause length limit must be at least 3".into(),
                ));
            }
        }
        Ok(CryptoBuilder {
            reg: VarRegistry::new(),
            emissions: Vec::new(),
            defs: Vec::new(),
            memo: BTreeMap::new(),
            clause_limit,
        })
    }

    pub fn fresh(&mut self, kind: VarKind, origin: &str) -> Result<VarId> {
        let name = format!("v{}", self.reg.len());
        self.reg.fresh(name, kind, origin)
    }

    pub fn fresh_word(&mut self, width: usize, kind: VarKind, origin: &str) -> Result<Vec<VarId>> {
        (0..width).map(|_| self.fresh(kind, origin)).collect()
    }

    fn limit(&self) -> usize {
        self.clause_limit.unwrap_or(usize::MAX)
    }

    /// Emits `r = XOR(lits) ⊕ flip` as one fragment (3-literal bodies use
    /// the dedicated pattern).
    fn emit_xor_result(&mut self, mut lits: Vec<Literal>, flip: bool, r: VarId) -> Result<()> {
        if flip {
            lits[0] = lits[0].negate();
        }
        let em = if lits.len() == 3 {
            encode_xor3_result(&mut self.reg, lits[0], lits[1], lits[2], r)?
        } else {
            encode_parity(&mut self.reg, &lits, Some(r))?
        };
        self.emissions.push(em);
        Ok(())
    }

    /// Shortens a literal list below `max_final` by chaining XOR
    /// intermediates of at most `limit - 1` literals each.
    fn chain(&mut self, mut lits: Vec<Literal>, max_final: usize, origin: &str) -> Result<Vec<Literal>> {
        while lits.len() > max_final {
            let take = (self.limit() - 1).min(lits.len());
            let chunk: Vec<Literal> = lits.drain(..take).collect();
            let t = self.fresh(VarKind::Intermediate, origin)?;
            self.emit_xor_result(chunk.clone(), false, t)?;
            self.defs.push(Def::Xor {
                var: t,
                lits: chunk,
                flip: false,
            });
            lits.insert(0, Literal::pos(t));
        }
        Ok(lits)
    }

    /// The expression as a single literal, creating (or reusing) a defining
    /// XOR variable when it has more than one term. Pure constants have no
    /// literal form and are rejected.
    pub fn materialize(&mut self, e: &Bx, origin: &str) -> Result<Literal> {
        let mut it = e.vars.iter();
        match (it.next(), it.next()) {
            (None, _) => Err(Error::Contract(
                "cannot materialize a constant expression".into(),
            )),
            (Some(&v), None) => Ok(if e.constant {
                Literal::neg(v)
            } else {
                Literal::pos(v)
            }),
            _ => {
                let key: Vec<VarId> = e.vars.iter().copied().collect();
                if let Some(&(v, c)) = self.memo.get(&key) {
                    return Ok(if e.constant ^ c {
                        Literal::neg(v)
                    } else {
                        Literal::pos(v)
                    });
                }
                let lits: Vec<Literal> = key.iter().map(|&v| Literal::pos(v)).collect();
                let r = self.fresh(VarKind::Intermediate, origin)?;
                let max_final = self.limit().saturating_sub(1);
                let reduced = self.chain(lits.clone(), max_final, origin)?;
                self.emit_xor_result(reduced, e.constant, r)?;
                self.defs.push(Def::Xor {
                    var: r,
                    lits,
                    flip: e.constant,
                });
                self.memo.insert(key, (r, e.constant));
                Ok(Literal::pos(r))
            }
        }
    }

    /// A fresh variable pinned to a constant, as a literal evaluating to
    /// that constant. Used when a fragment input degenerates to a constant.
    pub fn pinned_const(&mut self, c: bool, origin: &str) -> Result<Literal> {
        let v = self.fresh(VarKind::Intermediate, origin)?;
        let lit = if c { Literal::pos(v) } else { Literal::neg(v) };
        let em = encode_parity(&mut self.reg, &[lit], None)?;
        self.emissions.push(em);
        self.defs.push(Def::Xor {
            var: v,
            lits: vec![],
            flip: c,
        });
        Ok(Literal::pos(v))
    }

    pub fn as_wire(&mut self, e: &Bx, origin: &str) -> Result<Wire> {
        match e.as_const() {
            Some(c) => Ok(Wire::Const(c)),
            None => Ok(Wire::Lit(self.materialize(e, origin)?)),
        }
    }

    /// Pins an expression to a constant with a parity constraint.
    pub fn constrain(&mut self, e: &Bx, value: bool) -> Result<()> {
        if let Some(c) = e.as_const() {
            return if c == value {
                Ok(())
            } else {
                Err(Error::Contract("constraint contradicts a constant".into()))
            };
        }
        let mut lits: Vec<Literal> = e.vars.iter().map(|&v| Literal::pos(v)).collect();
        let lits = self.chain(std::mem::take(&mut lits), self.limit(), "constraint")?;
        let mut lits = lits;
        // XOR(lits) must equal value ⊕ constant; parity fixes odd, so fold
        // an even target into the first literal
        if !(value ^ e.constant) {
            lits[0] = lits[0].negate();
        }
        let em = encode_parity(&mut self.reg, &lits, None)?;
        self.emissions.push(em);
        Ok(())
    }

    /// A truth-table fragment with freshly created output variables.
    fn table_fragment<F>(
        &mut self,
        ins: Vec<Literal>,
        n_out: usize,
        table: Vec<u8>,
        origin: &str,
        encode: F,
    ) -> Result<Vec<VarId>>
    where
        F: FnOnce(&mut VarRegistry, &[Literal], &[VarId]) -> Result<PatternEmission>,
    {
        let outs = self.fresh_word(n_out, VarKind::Intermediate, origin)?;
        let em = encode(&mut self.reg, &ins, &outs)?;
        self.emissions.push(em);
        self.defs.push(Def::Table {
            ins,
            outs: outs.clone(),
            table,
        });
        Ok(outs)
    }

    /// z = x0 ? x1 : x2 over wires, reducing algebraically when a wire is
    /// constant; only the all-variable case spends a fragment.
    pub fn select(&mut self, x0: Wire, x1: Wire, x2: Wire, origin: &str) -> Result<Bx> {
        let bx_of = |w: Wire| match w {
            Wire::Const(c) => Bx::from_const(c),
            Wire::Lit(l) => {
                let mut b = Bx::from_var(l.var);
                b.xor_const(l.negated);
                b
            }
        };
        match (x0, x1, x2) {
            (Wire::Const(c), x1, x2) => Ok(bx_of(if c { x1 } else { x2 })),
            (x0, Wire::Const(c1), Wire::Const(c2)) => Ok(match (c1, c2) {
                (true, true) => Bx::from_const(true),
                (false, false) => Bx::from_const(false),
                (true, false) => bx_of(x0),
                (false, true) => {
                    let mut b = bx_of(x0);
                    b.xor_const(true);
                    b
                }
            }),
            (Wire::Lit(a), Wire::Const(c), Wire::Lit(z)) => {
                // a ? c : z — c=1: a ∨ z; c=0: ā ∧ z
                let r = self.fresh(VarKind::Intermediate, origin)?;
                let lits = if c { vec![a, z] } else { vec![a.negate(), z] };
                let em = if c {
                    encode_or(&mut self.reg, &lits, Some(r))?
                } else {
                    encode_and(&mut self.reg, &lits, Some(r), false)?
                };
                self.emissions.push(em);
                self.defs.push(Def::Gate {
                    var: r,
                    lits,
                    any: c,
                });
                Ok(Bx::from_var(r))
            }
            (Wire::Lit(a), Wire::Lit(y), Wire::Const(c)) => {
                // a ? y : c — c=0: a ∧ y; c=1: ā ∨ y
                let r = self.fresh(VarKind::Intermediate, origin)?;
                let lits = if c { vec![a.negate(), y] } else { vec![a, y] };
                let em = if c {
                    encode_or(&mut self.reg, &lits, Some(r))?
                } else {
                    encode_and(&mut self.reg, &lits, Some(r), false)?
                };
                self.emissions.push(em);
                self.defs.push(Def::Gate {
                    var: r,
                    lits,
                    any: c,
                });
                Ok(Bx::from_var(r))
            }
            (Wire::Lit(a), Wire::Lit(y), Wire::Lit(z)) => {
                let mut table = vec![0u8; 8];
                for (idx, t) in table.iter_mut().enumerate() {
                    let (b0, b1, b2) = (idx & 1 == 1, idx & 2 == 2, idx & 4 == 4);
                    *t = if b0 { b1 } else { b2 } as u8;
                }
                let outs = self.table_fragment(
                    vec![a, y, z],
                    1,
                    table,
                    origin,
                    |reg, ins, outs| encode_ternary_select(reg, ins[0], ins[1], ins[2], outs[0]),
                )?;
                Ok(Bx::from_var(outs[0]))
            }
        }
    }

    /// z = MAJ(x0, x1, x2) over wires; constants reduce to AND/OR.
    pub fn majority(&mut self, x0: Wire, x1: Wire, x2: Wire, origin: &str) -> Result<Bx> {
        let mut consts = Vec::new();
        let mut lits = Vec::new();
        for w in [x0, x1, x2] {
            match w {
                Wire::Const(c) => consts.push(c),
                Wire::Lit(l) => lits.push(l),
            }
        }
        match (consts.as_slice(), lits.as_slice()) {
            ([], [a, b, c]) => {
                let mut table = vec![0u8; 8];
                for (idx, t) in table.iter_mut().enumerate() {
                    *t = ((idx.count_ones() >= 2) as u8) & 1;
                }
                let outs =
                    self.table_fragment(vec![*a, *b, *c], 1, table, origin, |reg, ins, outs| {
                        encode_majority3(reg, ins[0], ins[1], ins[2], outs[0])
                    })?;
                Ok(Bx::from_var(outs[0]))
            }
            ([c], [a, b]) => {
                // MAJ(a, b, 1) = a ∨ b; MAJ(a, b, 0) = a ∧ b
                let r = self.fresh(VarKind::Intermediate, origin)?;
                let lits = vec![*a, *b];
                let em = if *c {
                    encode_or(&mut self.reg, &lits, Some(r))?
                } else {
                    encode_and(&mut self.reg, &lits, Some(r), false)?
                };
                self.emissions.push(em);
                self.defs.push(Def::Gate {
                    var: r,
                    lits,
                    any: *c,
                });
                Ok(Bx::from_var(r))
            }
            ([c1, c2], [a]) => Ok(match (c1, c2) {
                (true, true) => Bx::from_const(true),
                (false, false) => Bx::from_const(false),
                _ => {
                    let mut b = Bx::from_var(a.var);
                    b.xor_const(a.negated);
                    b
                }
            }),
            ([c1, c2, c3], []) => {
                Ok(Bx::from_const((*c1 as u8 + *c2 as u8 + *c3 as u8) >= 2))
            }
            _ => unreachable!("three operands"),
        }
    }

    /// z = x0 ⊕ (x1 ∨ x̄2), the MD5 I-round auxiliary; constants reduce.
    pub fn md5_i(&mut self, x0: Wire, x1: Wire, x2: Wire, origin: &str) -> Result<Bx> {
        let bx_of = |w: &Wire| match *w {
            Wire::Const(c) => Bx::from_const(c),
            Wire::Lit(l) => {
                let mut b = Bx::from_var(l.var);
                b.xor_const(l.negated);
                b
            }
        };
        match (&x0, &x1, &x2) {
            (_, Wire::Const(c1), _) => {
                // x1 = 1 → z = x0 ⊕ 1; x1 = 0 → z = x0 ⊕ x̄2
                let mut z = bx_of(&x0);
                if *c1 {
                    z.xor_const(true);
                } else {
                    let mut n2 = bx_of(&x2);
                    n2.xor_const(true);
                    z.xor_assign(&n2);
                }
                Ok(z)
            }
            (_, _, Wire::Const(c2)) => {
                // x2 = 0 → z = x0 ⊕ 1; x2 = 1 → z = x0 ⊕ x1
                let mut z = bx_of(&x0);
                if *c2 {
                    z.xor_assign(&bx_of(&x1));
                } else {
                    z.xor_const(true);
                }
                Ok(z)
            }
            (Wire::Const(c0), Wire::Lit(b), Wire::Lit(d)) => {
                // z = (b ∨ d̄) ⊕ c0
                let r = self.fresh(VarKind::Intermediate, origin)?;
                let lits = vec![*b, d.negate()];
                let em = encode_or(&mut self.reg, &lits, Some(r))?;
                self.emissions.push(em);
                self.defs.push(Def::Gate {
                    var: r,
                    lits,
                    any: true,
                });
                let mut z = Bx::from_var(r);
                z.xor_const(*c0);
                Ok(z)
            }
            (Wire::Lit(c), Wire::Lit(b), Wire::Lit(d)) => {
                let mut table = vec![0u8; 8];
                for (idx, t) in table.iter_mut().enumerate() {
                    let (x0, x1, x2) = (idx & 1 == 1, idx & 2 == 2, idx & 4 == 4);
                    *t = (x0 ^ (x1 || !x2)) as u8;
                }
                let outs =
                    self.table_fragment(vec![*c, *b, *d], 1, table, origin, |reg, ins, outs| {
                        encode_md5_i_aux(reg, ins[0], ins[1], ins[2], outs[0])
                    })?;
                Ok(Bx::from_var(outs[0]))
            }
        }
    }

    /// GF(2²) product fragment; returns the two result bits.
    pub fn gf4_mult(
        &mut self,
        table: &[[u8; 4]; 4],
        x: [Literal; 2],
        y: [Literal; 2],
        origin: &str,
    ) -> Result<[VarId; 2]> {
        let mut flat = vec![0u8; 16];
        for (idx, t) in flat.iter_mut().enumerate() {
            let a = idx & 3;
            let b = idx >> 2 & 3;
            *t = table[a][b];
        }
        let outs = self.table_fragment(
            vec![x[0], x[1], y[0], y[1]],
            2,
            flat,
            origin,
            |reg, ins, outs| {
                encode_gf4_mult(reg, [ins[0], ins[1]], [ins[2], ins[3]], [outs[0], outs[1]])
            },
        )?;
        Ok([outs[0], outs[1]])
    }

    /// GF(2⁴) inversion fragment (in the polynomial's own basis).
    pub fn gf16_inv(
        &mut self,
        table: &[u8; 16],
        x: [Literal; 4],
        origin: &str,
    ) -> Result<[VarId; 4]> {
        let outs = self.table_fragment(
            x.to_vec(),
            4,
            table.to_vec(),
            origin,
            |reg, ins, outs| {
                encode_gf16_inv(
                    reg,
                    [ins[0], ins[1], ins[2], ins[3]],
                    [outs[0], outs[1], outs[2], outs[3]],
                )
            },
        )?;
        Ok([outs[0], outs[1], outs[2], outs[3]])
    }

    /// Modular addition of expression words. Constant addends are pre-summed
    /// into one addend; a single remaining addend degenerates to wiring. The
    /// output is either pinned to a known constant or returned as fresh
    /// variables.
    pub fn modular_add(
        &mut self,
        addends: &[&Wx],
        block_size: usize,
        pinned: Option<u64>,
        origin: &str,
    ) -> Result<Wx> {
        let width = addends
            .first()
            .map(|w| w.len())
            .ok_or_else(|| Error::Contract("addition without addends".into()))?;
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        let mut const_sum: u64 = 0;
        let mut inputs: Vec<Vec<Wire>> = Vec::new();
        for w in addends {
            if w.len() != width {
                return Err(Error::Dimension {
                    expected: width,
                    got: w.len(),
                });
            }
            let value: Option<u64> = w
                .iter()
                .enumerate()
                .try_fold(0u64, |acc, (j, b)| Some(acc | (b.as_const()? as u64) << j));
            match value {
                Some(v) => const_sum = const_sum.wrapping_add(v) & mask,
                None => {
                    let wires: Vec<Wire> = w
                        .iter()
                        .map(|b| self.as_wire(b, origin))
                        .collect::<Result<_>>()?;
                    inputs.push(wires);
                }
            }
        }
        if const_sum != 0 || inputs.is_empty() {
            inputs.push((0..width).map(|j| Wire::Const(const_sum >> j & 1 == 1)).collect());
        }

        if inputs.len() == 1 {
            // nothing to add: the sum is the single addend itself
            let only = inputs.pop().unwrap();
            return match pinned {
                None => Ok(only
                    .iter()
                    .map(|w| match *w {
                        Wire::Const(c) => Bx::from_const(c),
                        Wire::Lit(l) => {
                            let mut b = Bx::from_var(l.var);
                            b.xor_const(l.negated);
                            b
                        }
                    })
                    .collect()),
                Some(target) => {
                    for (j, w) in only.iter().enumerate() {
                        let b = match *w {
                            Wire::Const(c) => Bx::from_const(c),
                            Wire::Lit(l) => {
                                let mut b = Bx::from_var(l.var);
                                b.xor_const(l.negated);
                                b
                            }
                        };
                        self.constrain(&b, target >> j & 1 == 1)?;
                    }
                    Ok(wx_const(target, width))
                }
            };
        }

        let (output, out_vars): (Vec<Wire>, Vec<VarId>) = match pinned {
            Some(target) => (
                (0..width).map(|j| Wire::Const(target >> j & 1 == 1)).collect(),
                Vec::new(),
            ),
            None => {
                let vars = self.fresh_word(width, VarKind::Intermediate, origin)?;
                (vars.iter().map(|&v| Wire::Lit(Literal::pos(v))).collect(), vars)
            }
        };
        let spec = ModularAddSpec {
            inputs: inputs.clone(),
            output,
            block_size,
            width,
        };
        let em = encode_modular_add(&mut self.reg, &spec)?;
        self.emissions.push(em);
        if !out_vars.is_empty() {
            self.defs.push(Def::Add {
                inputs,
                outputs: out_vars.clone(),
                width,
            });
            Ok(wx_vars(&out_vars))
        } else {
            Ok(wx_const(pinned.unwrap(), width))
        }
    }

    pub fn finish(self, algorithm: &str, input_vars: Vec<VarId>) -> Result<CryptoInstance> {
        let mut b = QuboBuilder::new();
        b.reserve_vars(self.reg.len());
        for em in &self.emissions {
            b.merge(&em.fragment)?;
        }
        Ok(CryptoInstance {
            qubo: b.build(),
            registry: self.reg,
            input_vars,
            algorithm: algorithm.to_string(),
            emissions: self.emissions,
            defs: self.defs,
        })
    }
}
