//! ILP construction for minimal-substitution encoding discovery.
//!
//! For a truth specification over N primary bits and a chosen number of
//! substitution bits, the unknowns are the integer coefficients of the
//! general quadratic form plus one binary indicator per (min-term,
//! substitution-string) pair. Non-min-term rows force the form ≥ 1
//! everywhere outside the satisfying set; min-term rows use a big-M
//! linearization so each min-term reaches zero for at least one (strong:
//! exactly one) substitution string.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// A truth specification: the satisfying assignments over `n` primary bits
/// (character `p` of a min-term string is bit `p`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthSpec {
    pub n: usize,
    pub min_terms: Vec<String>,
}

impl TruthSpec {
    pub fn new(n: usize, masks: &[u64]) -> Self {
        TruthSpec {
            n,
            min_terms: masks.iter().map(|&m| mask_to_string(m, n)).collect(),
        }
    }

    /// Min-terms as bit masks (bit `p` = character `p`), validated.
    pub fn masks(&self) -> Result<Vec<u64>> {
        if self.n == 0 || self.n > 20 {
            return Err(Error::Contract(format!(
                "spec has {} primary bits, supported range is 1..=20",
                self.n
            )));
        }
        if self.min_terms.is_empty() {
            return Err(Error::Contract("spec has no min-terms".into()));
        }
        let mut masks = Vec::with_capacity(self.min_terms.len());
        for term in &self.min_terms {
            if term.len() != self.n || !term.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Contract(format!(
                    "min-term `{term}` is not a {}-bit string",
                    self.n
                )));
            }
            let mask = term
                .bytes()
                .enumerate()
                .fold(0u64, |acc, (p, b)| acc | ((b == b'1') as u64) << p);
            if masks.contains(&mask) {
                return Err(Error::Contract(format!("duplicate min-term `{term}`")));
            }
            masks.push(mask);
        }
        Ok(masks)
    }
}

pub fn mask_to_string(mask: u64, n: usize) -> String {
    (0..n).map(|p| if mask >> p & 1 == 1 { '1' } else { '0' }).collect()
}

/// Index layout of the quadratic form's coefficient unknowns, ordered by
/// branching priority: constant, linear primary, linear substitution, then
/// the quadratic blocks.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub n: usize,
    pub k: usize,
}

impl Layout {
    pub fn idx_h(&self) -> usize {
        0
    }
    pub fn idx_c(&self, i: usize) -> usize {
        1 + i
    }
    pub fn idx_f(&self, j: usize) -> usize {
        1 + self.n + j
    }
    pub fn idx_d(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        1 + self.n + self.k + pair_index(i, j)
    }
    pub fn idx_e(&self, i: usize, j: usize) -> usize {
        1 + self.n + self.k + pairs(self.n) + i * self.k + j
    }
    pub fn idx_g(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        1 + self.n + self.k + pairs(self.n) + self.n * self.k + pair_index(i, j)
    }
    /// Total number of coefficient unknowns (monomials).
    pub fn num_coeffs(&self) -> usize {
        1 + self.n + self.k + pairs(self.n) + self.n * self.k + pairs(self.k)
    }

    /// The row of monomial values at assignment (x, s): the dot product of
    /// this row with the coefficient vector is g(x, s).
    pub fn monomial_row(&self, x: u64, s: u64) -> Vec<(usize, i64)> {
        let xb = |i: usize| (x >> i & 1) as i64;
        let sb = |j: usize| (s >> j & 1) as i64;
        let mut row = vec![(self.idx_h(), 1)];
        for i in 0..self.n {
            if xb(i) == 1 {
                row.push((self.idx_c(i), 1));
            }
        }
        for j in 0..self.k {
            if sb(j) == 1 {
                row.push((self.idx_f(j), 1));
            }
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                if xb(i) * xb(j) == 1 {
                    row.push((self.idx_d(i, j), 1));
                }
            }
        }
        for i in 0..self.n {
            for j in 0..self.k {
                if xb(i) * sb(j) == 1 {
                    row.push((self.idx_e(i, j), 1));
                }
            }
        }
        for i in 0..self.k {
            for j in i + 1..self.k {
                if sb(i) * sb(j) == 1 {
                    row.push((self.idx_g(i, j), 1));
                }
            }
        }
        row
    }
}

fn pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn pair_index(i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in lexicographic pair order
    j * (j - 1) / 2 + i
}

/// One sparse linear row `Σ terms (cmp rhs)`.
#[derive(Debug, Clone, Serialize)]
pub struct LinRow {
    pub terms: Vec<(usize, i64)>,
    pub rhs: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Unknown {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

/// An integer linear feasibility system: all unknowns integral and finitely
/// bounded, equality rows and ≤-rows.
#[derive(Debug, Clone, Serialize)]
pub struct IlpProblem {
    pub unknowns: Vec<Unknown>,
    pub eq_rows: Vec<LinRow>,
    pub le_rows: Vec<LinRow>,
    /// Optional objective (minimized); feasibility search leaves it empty.
    pub objective: Option<Vec<(usize, i64)>>,
    /// Blocks of indicator unknowns, one per included min-term (in the
    /// order passed to the builder).
    pub indicator_blocks: Vec<Vec<usize>>,
}

impl IlpProblem {
    /// Exact integer check of every row.
    pub fn satisfied_by(&self, assign: &[i64]) -> bool {
        if assign.len() != self.unknowns.len() {
            return false;
        }
        for (u, &v) in self.unknowns.iter().zip(assign) {
            if v < u.lo || v > u.hi {
                return false;
            }
        }
        let activity = |row: &LinRow| -> i128 {
            row.terms
                .iter()
                .map(|&(u, c)| c as i128 * assign[u] as i128)
                .sum()
        };
        self.eq_rows.iter().all(|r| activity(r) == r.rhs as i128)
            && self.le_rows.iter().all(|r| activity(r) <= r.rhs as i128)
    }
}

/// The big-M constant: no attainable |g| can exceed it.
pub fn big_m(layout: &Layout, coeff_bound: i64) -> i64 {
    coeff_bound * layout.num_coeffs() as i64
}

/// Builds the feasibility ILP for `spec` with `n_subs` substitution bits,
/// restricted to the min-term blocks listed in `blocks` (indices into the
/// validated min-term list; pass all of them for the full problem).
pub fn build_ilp_blocks(
    spec: &TruthSpec,
    n_subs: usize,
    coeff_bound: i64,
    strong: bool,
    blocks: &[usize],
) -> Result<IlpProblem> {
    if coeff_bound < 1 {
        return Err(Error::Contract("coefficient bound must be positive".into()));
    }
    let masks = spec.masks()?;
    let layout = Layout {
        n: spec.n,
        k: n_subs,
    };
    let m = big_m(&layout, coeff_bound);
    let n_s = 1u64 << n_subs;

    let mut unknowns: Vec<Unknown> = Vec::new();
    for idx in 0..layout.num_coeffs() {
        unknowns.push(Unknown {
            name: coeff_name(&layout, idx),
            lo: -coeff_bound,
            hi: coeff_bound,
        });
    }
    let mut eq_rows = Vec::new();
    let mut le_rows = Vec::new();

    // Non-min-term rows: g(x, s) ≥ 1 for every s, i.e. −g ≤ −1.
    for x in 0..1u64 << spec.n {
        if masks.contains(&x) {
            continue;
        }
        for s in 0..n_s {
            let row = layout.monomial_row(x, s);
            le_rows.push(LinRow {
                terms: row.into_iter().map(|(u, c)| (u, -c)).collect(),
                rhs: -1,
            });
        }
    }

    // Min-term blocks with indicators: k = 0 selects a zero-energy string.
    let mut indicator_blocks = Vec::with_capacity(blocks.len());
    for &b in blocks {
        let x = *masks.get(b).ok_or_else(|| {
            Error::Contract(format!("min-term block index {b} out of range"))
        })?;
        let mut block = Vec::with_capacity(n_s as usize);
        for s in 0..n_s {
            let ind = unknowns.len();
            unknowns.push(Unknown {
                name: format!("k_{b}_{s}"),
                lo: 0,
                hi: 1,
            });
            block.push(ind);
            let g_row = layout.monomial_row(x, s);
            // row-local big-M: |g(x, s)| ≤ bound × (active monomials),
            // much tighter than the global M for sparse assignments
            let m_row = (coeff_bound * g_row.len() as i64).min(m);
            // g ≥ 0: −g ≤ 0
            le_rows.push(LinRow {
                terms: g_row.iter().map(|&(u, c)| (u, -c)).collect(),
                rhs: 0,
            });
            // g ≥ 1 − (M+1)(1 − k): −g + (M+1)·k ≤ M
            let mut r = g_row.iter().map(|&(u, c)| (u, -c)).collect::<Vec<_>>();
            r.push((ind, m_row + 1));
            le_rows.push(LinRow {
                terms: r,
                rhs: m_row,
            });
            // g ≤ M·k
            let mut r = g_row.clone();
            r.push((ind, -m_row));
            le_rows.push(LinRow { terms: r, rhs: 0 });
        }
        // at least one zero-energy string: Σ k ≤ 2^k − 1 (strong: exactly)
        let card = LinRow {
            terms: block.iter().map(|&u| (u, 1)).collect(),
            rhs: n_s as i64 - 1,
        };
        if strong {
            eq_rows.push(card);
        } else {
            le_rows.push(card);
        }
        indicator_blocks.push(block);
    }

    Ok(IlpProblem {
        unknowns,
        eq_rows,
        le_rows,
        objective: None,
        indicator_blocks,
    })
}

/// The full feasibility problem over every min-term block.
pub fn build_ilp(
    spec: &TruthSpec,
    n_subs: usize,
    coeff_bound: i64,
    strong: bool,
) -> Result<IlpProblem> {
    let blocks: Vec<usize> = (0..spec.masks()?.len()).collect();
    build_ilp_blocks(spec, n_subs, coeff_bound, strong, &blocks)
}

fn coeff_name(layout: &Layout, idx: usize) -> String {
    let n = layout.n;
    let k = layout.k;
    if idx == 0 {
        return "h".into();
    }
    let mut i = idx - 1;
    if i < n {
        return format!("c_{i}");
    }
    i -= n;
    if i < k {
        return format!("f_{i}");
    }
    i -= k;
    if i < pairs(n) {
        let (a, b) = unpair_index(i);
        return format!("d_{a}_{b}");
    }
    i -= pairs(n);
    if i < n * k {
        return format!("e_{}_{}", i / k, i % k);
    }
    i -= n * k;
    let (a, b) = unpair_index(i);
    format!("g_{a}_{b}")
}

fn unpair_index(p: usize) -> (usize, usize) {
    let mut j = 1;
    while (j + 1) * j / 2 <= p {
        j += 1;
    }
    (p - j * (j - 1) / 2, j)
}

/// Appends lexicographic symmetry-breaking rows over adjacent substitution
/// pairs: the weighted column profile of s_j must dominate that of s_{j+1}.
/// The weights depend only on the primary index (and a single shared weight
/// for the s–s quadratic column), so some member of every permutation orbit
/// always survives.
pub fn add_symmetry_breaking(mut p: IlpProblem, layout: &Layout) -> IlpProblem {
    if layout.k < 2 {
        return p;
    }
    for j in 0..layout.k - 1 {
        let mut terms: BTreeMap<usize, i64> = BTreeMap::new();
        let add = |terms: &mut BTreeMap<usize, i64>, u: usize, w: i64| {
            *terms.entry(u).or_default() += w;
        };
        // profile(j+1) − profile(j) ≤ 0
        for (col, sign) in [(j + 1, 1i64), (j, -1i64)] {
            add(&mut terms, layout.idx_f(col), sign);
            for i in 0..layout.n {
                add(&mut terms, layout.idx_e(i, col), sign * (i as i64 + 2));
            }
            let gw = layout.n as i64 + 2;
            for l in 0..layout.k {
                if l == j || l == j + 1 {
                    continue;
                }
                let (a, b) = if l < col { (l, col) } else { (col, l) };
                add(&mut terms, layout.idx_g(a, b), sign * gw);
            }
        }
        p.le_rows.push(LinRow {
            terms: terms.into_iter().filter(|&(_, c)| c != 0).collect(),
            rhs: 0,
        });
    }
    p
}

/// Certificate strength taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strength {
    Strong,
    Weak,
    PreConstrained,
}

/// A discovered encoding with its exhaustively checkable data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodingCertificate {
    pub n_primary: usize,
    pub n_subs: usize,
    pub coeff_bound: i64,
    pub h: i64,
    pub c: Vec<i64>,
    pub f: Vec<i64>,
    /// Upper-triangular pair coefficients as (i, j, value), i < j.
    pub d: Vec<(usize, usize, i64)>,
    pub e: Vec<(usize, usize, i64)>,
    pub g: Vec<(usize, usize, i64)>,
    /// min-term string → zero-energy substitution strings.
    pub subst_map: BTreeMap<String, Vec<String>>,
    pub strength: Strength,
    /// Bound at which every smaller substitution count was proven
    /// infeasible (absent if a smaller count only exhausted its budget).
    pub minimal_at_bound: Option<i64>,
}

impl EncodingCertificate {
    /// Builds the certificate from a solved coefficient assignment.
    pub fn from_assignment(
        spec: &TruthSpec,
        n_subs: usize,
        coeff_bound: i64,
        assign: &[i64],
    ) -> Result<Self> {
        let layout = Layout {
            n: spec.n,
            k: n_subs,
        };
        let masks = spec.masks()?;
        let take = |idx: usize| assign[idx];
        let mut cert = EncodingCertificate {
            n_primary: spec.n,
            n_subs,
            coeff_bound,
            h: take(layout.idx_h()),
            c: (0..spec.n).map(|i| take(layout.idx_c(i))).collect(),
            f: (0..n_subs).map(|j| take(layout.idx_f(j))).collect(),
            d: (0..spec.n)
                .flat_map(|i| (i + 1..spec.n).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, take(layout.idx_d(i, j))))
                .filter(|&(_, _, v)| v != 0)
                .collect(),
            e: (0..spec.n)
                .flat_map(|i| (0..n_subs).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, take(layout.idx_e(i, j))))
                .filter(|&(_, _, v)| v != 0)
                .collect(),
            g: (0..n_subs)
                .flat_map(|i| (i + 1..n_subs).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, take(layout.idx_g(i, j))))
                .filter(|&(_, _, v)| v != 0)
                .collect(),
            subst_map: BTreeMap::new(),
            strength: Strength::Weak,
            minimal_at_bound: None,
        };
        // derive the substitution map and strength from the zero set
        let mut all_unique = true;
        for &x in &masks {
            let zeros: Vec<String> = (0..1u64 << n_subs)
                .filter(|&s| cert.eval(x, s) == 0)
                .map(|s| mask_to_string(s, n_subs))
                .collect();
            if zeros.is_empty() {
                return Err(Error::Structure(format!(
                    "candidate reaches no zero at min-term {}",
                    mask_to_string(x, spec.n)
                )));
            }
            all_unique &= zeros.len() == 1;
            cert.subst_map.insert(mask_to_string(x, spec.n), zeros);
        }
        cert.strength = if all_unique {
            Strength::Strong
        } else {
            Strength::Weak
        };
        Ok(cert)
    }

    /// Evaluates the quadratic form at assignment (x, s).
    pub fn eval(&self, x: u64, s: u64) -> i64 {
        let xb = |i: usize| (x >> i & 1) as i64;
        let sb = |j: usize| (s >> j & 1) as i64;
        let mut v = self.h;
        for (i, &ci) in self.c.iter().enumerate() {
            v += ci * xb(i);
        }
        for (j, &fj) in self.f.iter().enumerate() {
            v += fj * sb(j);
        }
        for &(i, j, w) in &self.d {
            v += w * xb(i) * xb(j);
        }
        for &(i, j, w) in &self.e {
            v += w * xb(i) * sb(j);
        }
        for &(i, j, w) in &self.g {
            v += w * sb(i) * sb(j);
        }
        v
    }

    /// The unconditional exhaustive recheck: nonnegative everywhere, zero
    /// exactly at (min-term, mapped substitution) pairs, every min-term
    /// reached.
    pub fn recheck(&self, spec: &TruthSpec) -> Result<()> {
        let masks = spec.masks()?;
        if spec.n != self.n_primary {
            return Err(Error::Dimension {
                expected: self.n_primary,
                got: spec.n,
            });
        }
        for x in 0..1u64 << spec.n {
            let is_min = masks.contains(&x);
            let mut hit = false;
            for s in 0..1u64 << self.n_subs {
                let v = self.eval(x, s);
                if v < 0 {
                    return Err(Error::Structure(format!(
                        "negative value {v} at x={x:b} s={s:b}"
                    )));
                }
                if v == 0 {
                    if !is_min {
                        return Err(Error::Structure(format!(
                            "zero outside the min-term set at x={x:b} s={s:b}"
                        )));
                    }
                    let mapped = &self.subst_map[&mask_to_string(x, spec.n)];
                    if !mapped.contains(&mask_to_string(s, self.n_subs)) {
                        return Err(Error::Structure(format!(
                            "zero at unmapped substitution x={x:b} s={s:b}"
                        )));
                    }
                    hit = true;
                }
            }
            if is_min && !hit {
                return Err(Error::Structure(format!(
                    "min-term {x:b} never reaches zero"
                )));
            }
        }
        Ok(())
    }
}

/// Writes the problem in CPLEX-LP format.
pub fn export_lp(p: &IlpProblem) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj: ");
    match &p.objective {
        Some(obj) if !obj.is_empty() => {
            for (pos, &(u, c)) in obj.iter().enumerate() {
                push_term(&mut out, pos == 0, c, &p.unknowns[u].name);
            }
        }
        _ => out.push('0'),
    }
    out.push_str("\nSubject To\n");
    let mut idx = 0usize;
    for (rows, op) in [(&p.eq_rows, "="), (&p.le_rows, "<=")] {
        for row in rows.iter() {
            idx += 1;
            let _ = write!(out, " r{idx}: ");
            if row.terms.is_empty() {
                out.push('0');
            }
            for (pos, &(u, c)) in row.terms.iter().enumerate() {
                push_term(&mut out, pos == 0, c, &p.unknowns[u].name);
            }
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
    }
    out.push_str("Bounds\n");
    for u in &p.unknowns {
        let _ = writeln!(out, " {} <= {} <= {}", u.lo, u.name, u.hi);
    }
    let binaries: Vec<&str> = p
        .unknowns
        .iter()
        .filter(|u| u.lo == 0 && u.hi == 1)
        .map(|u| u.name.as_str())
        .collect();
    let generals: Vec<&str> = p
        .unknowns
        .iter()
        .filter(|u| !(u.lo == 0 && u.hi == 1))
        .map(|u| u.name.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n ");
        out.push_str(&generals.join(" "));
        out.push('\n');
    }
    if !binaries.is_empty() {
        out.push_str("Binaries\n ");
        out.push_str(&binaries.join(" "));
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, first: bool, c: i64, name: &str) {
    if first {
        if c < 0 {
            out.push_str("- ");
        }
    } else if c < 0 {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    let a = c.abs();
    if a == 1 {
        out.push_str(name);
    } else {
        let _ = write!(out, "{a} {name}");
    }
}
