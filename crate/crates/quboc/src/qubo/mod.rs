//! Sparse integer QUBO instances: construction, evaluation, statistics and
//! serialization.
//!
//! An instance stores the upper-triangular canonical form of a symmetric
//! quadratic form over binary variables, with 64-bit signed coefficients and
//! an integer constant offset. All arithmetic is exact; overflow is a checked
//! error.

mod io;

pub use io::{read_qubo, write_qubo, InstanceMeta};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Index of a binary variable within one instance/registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Role of a variable inside a compiled instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    CircuitInput,
    KeyBit,
    Intermediate,
    Substitution,
    Carry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarEntry {
    pub name: String,
    pub kind: VarKind,
    pub origin: String,
}

/// Ordered, name-unique variable table shared by the fragments of one build.
#[derive(Debug, Clone, Default)]
pub struct VarRegistry {
    entries: Vec<VarEntry>,
    by_name: std::collections::HashMap<String, VarId>,
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Allocates a fresh variable. Names must be unique within the registry.
    pub fn fresh(&mut self, name: impl Into<String>, kind: VarKind, origin: &str) -> Result<VarId> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        let id = VarId(self.entries.len() as u32);
        self.by_name.insert(name.clone(), id);
        self.entries.push(VarEntry {
            name,
            kind,
            origin: origin.to_string(),
        });
        Ok(id)
    }

    pub fn lookup_name(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn entry(&self, id: VarId) -> Option<&VarEntry> {
        self.entries.get(id.index())
    }

    pub fn entries(&self) -> &[VarEntry] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &VarEntry)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (VarId(i as u32), e))
    }
}

/// Summary statistics in the symmetric-matrix convention of the size tables:
/// off-diagonal nonzeros count twice in the density numerator, quadratic
/// coefficients are reported as stored (not halved).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboStats {
    pub num_vars: usize,
    pub density: f64,
    pub max_abs_coeff: i64,
    pub offset: i64,
}

/// Immutable sparse QUBO instance in canonical form: no stored zeros, every
/// quadratic key ordered with the lower index first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuboInstance {
    num_vars: usize,
    linear: BTreeMap<VarId, i64>,
    quadratic: BTreeMap<(VarId, VarId), i64>,
    offset: i64,
}

impl QuboInstance {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<VarId, i64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(VarId, VarId), i64> {
        &self.quadratic
    }

    pub fn num_terms(&self) -> usize {
        self.linear.len() + self.quadratic.len()
    }

    /// Exact integer energy of a full binary assignment.
    pub fn energy(&self, assignment: &[bool]) -> Result<i64> {
        if assignment.len() != self.num_vars {
            return Err(Error::Dimension {
                expected: self.num_vars,
                got: assignment.len(),
            });
        }
        let mut acc: i64 = self.offset;
        for (&v, &c) in &self.linear {
            if assignment[v.index()] {
                acc = acc.checked_add(c).ok_or(Error::Overflow("energy"))?;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if assignment[i.index()] && assignment[j.index()] {
                acc = acc.checked_add(c).ok_or(Error::Overflow("energy"))?;
            }
        }
        Ok(acc)
    }

    /// Coefficient-wise sum with `fragment`, whose variable `i` is renamed to
    /// `var_map[i]` in the result.
    pub fn add(&self, fragment: &QuboInstance, var_map: &[VarId]) -> Result<QuboInstance> {
        let mut b = QuboBuilder::with_capacity(self.num_vars);
        b.offset = self.offset;
        b.linear = self.linear.clone();
        b.quadratic = self.quadratic.clone();
        let map = |v: VarId| -> Result<VarId> {
            let mapped = *var_map
                .get(v.index())
                .ok_or(Error::Unmapped(v.index()))?;
            if mapped.index() >= self.num_vars {
                return Err(Error::Unmapped(v.index()));
            }
            Ok(mapped)
        };
        for (&v, &c) in &fragment.linear {
            b.add_linear(map(v)?, c)?;
        }
        for (&(i, j), &c) in &fragment.quadratic {
            b.add_quadratic(map(i)?, map(j)?, c)?;
        }
        b.add_offset(fragment.offset)?;
        Ok(b.build())
    }

    /// Eliminates variable `v` by fixing it to `bit`. Indices of the other
    /// variables are unchanged (the slot simply becomes unused).
    pub fn substitute_constant(&self, v: VarId, bit: bool) -> Result<QuboInstance> {
        if v.index() >= self.num_vars {
            return Err(Error::UnknownVar(v.index()));
        }
        let mut b = QuboBuilder::with_capacity(self.num_vars);
        b.offset = self.offset;
        for (&w, &c) in &self.linear {
            if w == v {
                if bit {
                    b.add_offset(c)?;
                }
            } else {
                b.add_linear(w, c)?;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if i == v || j == v {
                if bit {
                    let other = if i == v { j } else { i };
                    b.add_linear(other, c)?;
                }
            } else {
                b.add_quadratic(i, j, c)?;
            }
        }
        Ok(b.build())
    }

    pub fn stats(&self) -> QuboStats {
        let mut max_abs = 0i64;
        for &c in self.linear.values() {
            max_abs = max_abs.max(c.abs());
        }
        for &c in self.quadratic.values() {
            max_abs = max_abs.max(c.abs());
        }
        let nonzeros = self.linear.len() + 2 * self.quadratic.len();
        let density = if self.num_vars == 0 {
            0.0
        } else {
            nonzeros as f64 / (self.num_vars as f64 * self.num_vars as f64)
        };
        QuboStats {
            num_vars: self.num_vars,
            density,
            max_abs_coeff: max_abs,
            offset: self.offset,
        }
    }
}

/// Single-threaded accumulator for building instances term by term.
#[derive(Debug, Clone, Default)]
pub struct QuboBuilder {
    num_vars: usize,
    linear: BTreeMap<VarId, i64>,
    quadratic: BTreeMap<(VarId, VarId), i64>,
    offset: i64,
}

impl QuboBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(num_vars: usize) -> Self {
        Self {
            num_vars,
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Grows the variable space to at least `n` variables.
    pub fn reserve_vars(&mut self, n: usize) {
        self.num_vars = self.num_vars.max(n);
    }

    fn touch(&mut self, v: VarId) {
        self.num_vars = self.num_vars.max(v.index() + 1);
    }

    pub fn add_offset(&mut self, c: i64) -> Result<()> {
        self.offset = self
            .offset
            .checked_add(c)
            .ok_or(Error::Overflow("offset"))?;
        Ok(())
    }

    pub fn add_linear(&mut self, v: VarId, c: i64) -> Result<()> {
        self.touch(v);
        let slot = self.linear.entry(v).or_insert(0);
        *slot = slot.checked_add(c).ok_or(Error::Overflow("linear term"))?;
        Ok(())
    }

    /// Adds a quadratic term; the diagonal x*x folds into the linear part.
    pub fn add_quadratic(&mut self, i: VarId, j: VarId, c: i64) -> Result<()> {
        if i == j {
            return self.add_linear(i, c);
        }
        self.touch(i);
        self.touch(j);
        let key = if i < j { (i, j) } else { (j, i) };
        let slot = self.quadratic.entry(key).or_insert(0);
        *slot = slot
            .checked_add(c)
            .ok_or(Error::Overflow("quadratic term"))?;
        Ok(())
    }

    pub fn merge(&mut self, other: &QuboInstance) -> Result<()> {
        for (&v, &c) in &other.linear {
            self.add_linear(v, c)?;
        }
        for (&(i, j), &c) in &other.quadratic {
            self.add_quadratic(i, j, c)?;
        }
        self.add_offset(other.offset)
    }

    pub fn build(self) -> QuboInstance {
        QuboInstance {
            num_vars: self.num_vars,
            linear: self.linear.into_iter().filter(|&(_, c)| c != 0).collect(),
            quadratic: self
                .quadratic
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .collect(),
            offset: self.offset,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    #[test]
    fn empty_instance_energy_is_zero() {
        let q = QuboBuilder::new().build();
        assert_eq!(q.energy(&[]).unwrap(), 0);
    }

    #[test]
    fn linear_with_offset() {
        let mut b = QuboBuilder::new();
        b.add_linear(v(0), 3).unwrap();
        b.add_offset(-3).unwrap();
        let q = b.build();
        assert_eq!(q.energy(&[true]).unwrap(), 0);
        assert_eq!(q.energy(&[false]).unwrap(), -3);
    }

    #[test]
    fn energy_dimension_mismatch() {
        let mut b = QuboBuilder::new();
        b.add_linear(v(1), 1).unwrap();
        let q = b.build();
        assert!(matches!(
            q.energy(&[true]),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn add_cancels_to_canonical_empty() {
        let mut b = QuboBuilder::new();
        b.add_linear(v(0), 1).unwrap();
        let q = b.build();
        let mut b2 = QuboBuilder::new();
        b2.add_linear(v(0), -1).unwrap();
        let frag = b2.build();
        let sum = q.add(&frag, &[v(0)]).unwrap();
        assert_eq!(sum.num_terms(), 0);
        assert_eq!(sum, QuboBuilder::with_capacity(1).build());
    }

    #[test]
    fn add_disjoint_is_union() {
        let mut b = QuboBuilder::new();
        b.add_linear(v(0), 2).unwrap();
        b.reserve_vars(3);
        let q = b.build();
        let mut b2 = QuboBuilder::new();
        b2.add_quadratic(v(0), v(1), 5).unwrap();
        let frag = b2.build();
        let sum = q.add(&frag, &[v(1), v(2)]).unwrap();
        assert_eq!(sum.linear().get(&v(0)), Some(&2));
        assert_eq!(sum.quadratic().get(&(v(1), v(2))), Some(&5));
    }

    #[test]
    fn add_unmapped_variable_errors() {
        let q = QuboBuilder::with_capacity(1).build();
        let mut b2 = QuboBuilder::new();
        b2.add_linear(v(1), 1).unwrap();
        let frag = b2.build();
        assert!(matches!(q.add(&frag, &[v(0)]), Err(Error::Unmapped(1))));
    }

    #[test]
    fn substitute_linear_to_offset() {
        let mut b = QuboBuilder::new();
        b.add_linear(v(0), 5).unwrap();
        let q = b.build();
        let r = q.substitute_constant(v(0), true).unwrap();
        assert_eq!(r.offset(), 5);
        assert_eq!(r.num_terms(), 0);
    }

    #[test]
    fn substitute_quadratic_drop_and_fold() {
        let mut b = QuboBuilder::new();
        b.add_quadratic(v(0), v(1), 3).unwrap();
        let q = b.build();
        let dropped = q.substitute_constant(v(0), false).unwrap();
        assert_eq!(dropped.num_terms(), 0);

        let mut b = QuboBuilder::new();
        b.add_quadratic(v(0), v(1), 3).unwrap();
        b.add_linear(v(0), 2).unwrap();
        let q = b.build();
        let folded = q.substitute_constant(v(0), true).unwrap();
        assert_eq!(folded.linear().get(&v(1)), Some(&3));
        assert_eq!(folded.offset(), 2);
    }

    #[test]
    fn stats_conventions() {
        let empty = QuboBuilder::new().build();
        let s = empty.stats();
        assert_eq!(s.density, 0.0);
        assert_eq!(s.max_abs_coeff, 0);

        let mut b = QuboBuilder::new();
        b.add_linear(v(0), 7).unwrap();
        let s = b.build().stats();
        assert_eq!(s.num_vars, 1);
        assert_eq!(s.density, 1.0);
        assert_eq!(s.max_abs_coeff, 7);

        // off-diagonal counts twice
        let mut b = QuboBuilder::new();
        b.add_quadratic(v(0), v(1), -4).unwrap();
        let s = b.build().stats();
        assert_eq!(s.density, 2.0 / 4.0);
        assert_eq!(s.max_abs_coeff, 4);
    }

    #[test]
    fn registry_round_trip() {
        let mut reg = VarRegistry::new();
        let a = reg.fresh("a", VarKind::CircuitInput, "test").unwrap();
        let b = reg.fresh("b", VarKind::Substitution, "test").unwrap();
        assert_eq!(reg.lookup_name("a"), Some(a));
        assert_eq!(reg.entry(b).unwrap().name, "b");
        assert!(reg.fresh("a", VarKind::Carry, "test").is_err());
    }
}
