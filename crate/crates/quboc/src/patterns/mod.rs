//! Closed-form QUBO encodings of multi-input boolean predicates.
//!
//! Every encoder returns a [`PatternEmission`]: a non-negative quadratic
//! fragment whose zero set, after minimizing over its substitution bits,
//! is exactly the satisfying set of the encoded predicate, together with a
//! witness procedure producing those substitution bits from the primary
//! assignment.

mod adder;
mod affine;
mod basic;
mod fixed;

pub use adder::{encode_modular_add, ModularAddSpec};
pub use affine::Affine;
pub use basic::{encode_and, encode_or, encode_parity, encode_range};
pub use fixed::{
    encode_gf16_inv, encode_gf4_mult, encode_majority3, encode_md5_i_aux, encode_ternary_select,
    encode_xor3_result, gf16_inv_table, gf4_mult_table,
};

use crate::qubo::{QuboInstance, VarId};

/// A possibly negated variable occurrence. Polynomial expansion substitutes
/// (1 - x) for a negated literal before collecting terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Self {
        Self {
            var,
            negated: false,
        }
    }

    pub fn neg(var: VarId) -> Self {
        Self { var, negated: true }
    }

    pub fn negate(self) -> Self {
        Self {
            var: self.var,
            negated: !self.negated,
        }
    }

    pub fn eval(self, get: &dyn Fn(VarId) -> bool) -> bool {
        get(self.var) ^ self.negated
    }
}

/// A circuit wire: either a known constant or a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wire {
    Const(bool),
    Lit(Literal),
}

impl Wire {
    pub fn lit(var: VarId) -> Self {
        Wire::Lit(Literal::pos(var))
    }

    pub fn eval(self, get: &dyn Fn(VarId) -> bool) -> bool {
        match self {
            Wire::Const(b) => b,
            Wire::Lit(l) => l.eval(get),
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Wire::Const(b) => Wire::Const(!b),
            Wire::Lit(l) => Wire::Lit(l.negate()),
        }
    }
}

/// Relaxed binary expansion of an integer slack variable: `base` plus a
/// subset sum of `coefficients`, spanning `span` consecutive target values.
///
/// The most significant coefficient is shrunk from its positional value so
/// that the spanned set covers the target interval without overflow; the
/// least significant coefficient is never relaxed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedExpansion {
    pub base: i64,
    pub coefficients: Vec<i64>,
    /// Number of target values covered (t_max for the parity form, H-L+1
    /// for the range form).
    pub span: i64,
    /// True when values pair up with an offset-by-one partner (the product
    /// form covering two values per substitution combination).
    pub paired: bool,
}

fn ceil_log2(n: i64) -> u32 {
    debug_assert!(n >= 1);
    64 - ((n - 1) as u64).leading_zeros()
}

impl RelaxedExpansion {
    pub fn n_subs(&self) -> usize {
        self.coefficients.len()
    }

    /// Expansion of the parity slack t over [1, t_max]: plain binary when
    /// t_max is a power of two, relaxed most-significant coefficient
    /// otherwise.
    pub fn parity(t_max: i64) -> Self {
        debug_assert!(t_max >= 1);
        let n = if t_max <= 1 { 0 } else { ceil_log2(t_max) } as usize;
        let mut coefficients = Vec::with_capacity(n);
        for i in 0..n.saturating_sub(1) {
            coefficients.push(1i64 << i);
        }
        if n >= 1 {
            coefficients.push(t_max - (1i64 << (n - 1)));
        }
        Self {
            base: 1,
            coefficients,
            span: t_max,
            paired: false,
        }
    }

    /// Expansion of f1 for the range product form over [L, H]: step-two
    /// coefficients with a relaxed most significant one, paired with
    /// f2 = f1 + 1 so each substitution combination covers two values.
    pub fn range(lo: i64, hi: i64) -> Self {
        debug_assert!(lo <= hi);
        let span = hi - lo + 1;
        let n = if span <= 2 {
            0
        } else {
            (ceil_log2(span) - 1) as usize
        };
        let mut coefficients = Vec::with_capacity(n);
        for i in 0..n.saturating_sub(1) {
            coefficients.push(2i64 << i);
        }
        if n >= 1 {
            // span - 2^n (not span - 2^n + 1): the larger relaxation would
            // let f2 = f1 + 1 reach hi + 1, a spurious zero of the product
            // form. With this choice f1 tops out at hi - 1.
            coefficients.push(span - (1i64 << n));
        }
        Self {
            base: lo,
            coefficients,
            span,
            paired: span > 1,
        }
    }

    /// All attainable values base + subset sum, indexed by the substitution
    /// bit pattern.
    pub fn values(&self) -> Vec<i64> {
        let n = self.coefficients.len();
        (0..1u64 << n)
            .map(|mask| {
                self.base
                    + self
                        .coefficients
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &c)| c)
                        .sum::<i64>()
            })
            .collect()
    }

    /// Checks that every integer of the target interval is attained
    /// (directly, or through the f2 = f1 + 1 partner in paired mode) and
    /// that no attained value escapes the interval — an escaping value
    /// would be a spurious zero of the product form.
    pub fn covers_target(&self) -> bool {
        let vals = self.values();
        let lo = self.base;
        let hi = self.base + self.span - 1;
        let top = if self.paired { hi - 1 } else { hi };
        let covered = (lo..=hi).all(|t| {
            vals.iter()
                .any(|&v| v == t || (self.paired && v + 1 == t))
        });
        covered && vals.iter().all(|&v| lo <= v && v <= top.max(lo))
    }

    /// Substitution bits realizing the given target value, if attainable.
    pub fn bits_for(&self, target: i64) -> Option<Vec<bool>> {
        let n = self.coefficients.len();
        (0..1u64 << n)
            .find(|&mask| {
                self.base
                    + self
                        .coefficients
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &c)| c)
                        .sum::<i64>()
                    == target
            })
            .map(|mask| (0..n).map(|i| mask >> i & 1 == 1).collect())
    }
}

/// Evaluates an instance against a variable getter instead of a dense
/// assignment (fragments are indexed in a larger shared variable space).
pub fn energy_with(q: &QuboInstance, get: &dyn Fn(VarId) -> bool) -> i64 {
    let mut acc = q.offset();
    for (&v, &c) in q.linear() {
        if get(v) {
            acc += c;
        }
    }
    for (&(i, j), &c) in q.quadratic() {
        if get(i) && get(j) {
            acc += c;
        }
    }
    acc
}

pub(crate) enum WitnessProc {
    /// Minimize the fragment exhaustively over its own substitution bits.
    ExhaustiveMin,
    /// Substitution bits encode a slack value derived from a literal sum.
    Expansion {
        sum: Affine,
        expansion: RelaxedExpansion,
    },
    /// Block-wise carry bits of a modular addition.
    Carries(adder::CarryWitness),
}

/// A QUBO fragment encoding one predicate, plus its witness procedure.
pub struct PatternEmission {
    pub fragment: QuboInstance,
    /// Input literals of the encoded predicate.
    pub primary: Vec<Literal>,
    /// Result bits defined by the predicate (empty for pure constraints).
    pub results: Vec<VarId>,
    /// Substitution bits owned by this fragment.
    pub subst: Vec<VarId>,
    pub(crate) witness: WitnessProc,
}

impl PatternEmission {
    /// Substitution assignment attaining energy zero whenever the encoded
    /// predicate holds on the primary (and result) bits. If the predicate
    /// fails, the returned bits are a local minimizer; the energy stays >= 1.
    pub fn witness_subst(&self, get: &dyn Fn(VarId) -> bool) -> Vec<(VarId, bool)> {
        match &self.witness {
            WitnessProc::ExhaustiveMin => self.minimize_subst(get).1,
            WitnessProc::Expansion { sum, expansion } => {
                let s = sum.value_with(get);
                let target = if expansion.paired {
                    // f1 = s (first factor zero) or f1 = s - 1 (second).
                    expansion
                        .bits_for(s)
                        .or_else(|| expansion.bits_for(s - 1))
                } else {
                    // parity slack: 2t - 1 = s
                    if (s - 1) % 2 == 0 {
                        expansion.bits_for((s + 1) / 2)
                    } else {
                        None
                    }
                };
                match target {
                    Some(bits) => self.subst.iter().copied().zip(bits).collect(),
                    None => self.minimize_subst(get).1,
                }
            }
            WitnessProc::Carries(c) => c.derive(get),
        }
    }

    /// Minimum fragment energy over all substitution assignments, with an
    /// argmin. Exponential in the substitution count; intended for small
    /// fragments and tests.
    pub fn minimize_subst(&self, get: &dyn Fn(VarId) -> bool) -> (i64, Vec<(VarId, bool)>) {
        let n = self.subst.len();
        assert!(n <= 24, "substitution space too large to enumerate");
        let mut best = i64::MAX;
        let mut best_mask = 0u64;
        for mask in 0..1u64 << n {
            let getter = |v: VarId| {
                if let Some(pos) = self.subst.iter().position(|&s| s == v) {
                    mask >> pos & 1 == 1
                } else {
                    get(v)
                }
            };
            let e = energy_with(&self.fragment, &getter);
            if e < best {
                best = e;
                best_mask = mask;
            }
        }
        let bits = self
            .subst
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, best_mask >> i & 1 == 1))
            .collect();
        (best, bits)
    }
}
