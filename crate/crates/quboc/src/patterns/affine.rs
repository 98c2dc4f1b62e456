//! Integer affine forms over binary variables, with exact expansion of
//! products into quadratic terms (x^2 = x folds into the linear part).

use super::{Literal, Wire};
use crate::error::Result;
use crate::qubo::{QuboBuilder, VarId};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct Affine {
    pub constant: i64,
    pub coeffs: BTreeMap<VarId, i64>,
}

impl Affine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_const(&mut self, c: i64) {
        self.constant += c;
    }

    pub fn add_var(&mut self, v: VarId, scale: i64) {
        let slot = self.coeffs.entry(v).or_insert(0);
        *slot += scale;
        if *slot == 0 {
            self.coeffs.remove(&v);
        }
    }

    /// Adds `scale * lit`, substituting (1 - x) for a negated literal.
    pub fn add_lit(&mut self, lit: Literal, scale: i64) {
        if lit.negated {
            self.constant += scale;
            self.add_var(lit.var, -scale);
        } else {
            self.add_var(lit.var, scale);
        }
    }

    pub fn add_wire(&mut self, w: Wire, scale: i64) {
        match w {
            Wire::Const(true) => self.constant += scale,
            Wire::Const(false) => {}
            Wire::Lit(l) => self.add_lit(l, scale),
        }
    }

    pub fn value_with(&self, get: &dyn Fn(VarId) -> bool) -> i64 {
        let mut acc = self.constant;
        for (&v, &c) in &self.coeffs {
            if get(v) {
                acc += c;
            }
        }
        acc
    }

    /// Accumulates the expansion of `self * other` into `b`.
    pub fn mul_into(&self, other: &Affine, b: &mut QuboBuilder) -> Result<()> {
        b.add_offset(self.constant.checked_mul(other.constant).unwrap())?;
        for (&v, &a) in &self.coeffs {
            let c = other.constant.checked_mul(a).unwrap();
            if c != 0 {
                b.add_linear(v, c)?;
            }
        }
        for (&v, &a) in &other.coeffs {
            let c = self.constant.checked_mul(a).unwrap();
            if c != 0 {
                b.add_linear(v, c)?;
            }
        }
        for (&vi, &ai) in &self.coeffs {
            for (&vj, &aj) in &other.coeffs {
                let c = ai.checked_mul(aj).unwrap();
                b.add_quadratic(vi, vj, c)?;
            }
        }
        Ok(())
    }

    /// Accumulates the expansion of `self^2` into `b`.
    pub fn square_into(&self, b: &mut QuboBuilder) -> Result<()> {
        self.mul_into(self, b)
    }
}
