//! Exact integer feasibility search by branch-and-bound.
//!
//! Each node runs integer interval propagation (cheap, i128) and a fast
//! floating-point LP relaxation for guidance. Floating-point results are
//! never trusted directly: an LP infeasibility verdict only prunes after
//! an exact integer recheck of the aggregated Farkas surrogate row, and a
//! near-integral LP point is only accepted after `satisfied_by` confirms
//! it exactly. An `Infeasible` verdict for the whole tree is therefore a
//! proof; only a spent node budget downgrades the answer to
//! `BudgetExhausted`.

use super::ilp::{IlpProblem, LinRow};
use super::simplex::{lp_feasible_f64, Cmp, FRow, FastOutcome};

/// Default node budget for discovery runs.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Tolerance for treating an LP coordinate as integral.
const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A satisfying integer assignment (one value per unknown).
    Feasible(Vec<i64>),
    /// Proven: no integer assignment satisfies the rows within bounds.
    Infeasible,
    /// The node budget ran out before the tree was exhausted.
    BudgetExhausted,
}

/// Searches for any integer point satisfying `p`, spending at most
/// `budget` search nodes.
pub fn solve_feasibility(p: &IlpProblem, budget: u64) -> SolveOutcome {
    let lo: Vec<i64> = p.unknowns.iter().map(|u| u.lo).collect();
    let hi: Vec<i64> = p.unknowns.iter().map(|u| u.hi).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return SolveOutcome::Infeasible;
    }
    let mut nodes_left = budget;
    match dfs(p, lo, hi, &mut nodes_left) {
        NodeOutcome::Feasible(x) => SolveOutcome::Feasible(x),
        NodeOutcome::Infeasible => SolveOutcome::Infeasible,
        NodeOutcome::Budget => SolveOutcome::BudgetExhausted,
    }
}

enum NodeOutcome {
    Feasible(Vec<i64>),
    Infeasible,
    Budget,
}

fn dfs(p: &IlpProblem, mut lo: Vec<i64>, mut hi: Vec<i64>, nodes_left: &mut u64) -> NodeOutcome {
    if *nodes_left == 0 {
        return NodeOutcome::Budget;
    }
    *nodes_left -= 1;

    if !propagate(p, &mut lo, &mut hi) {
        return NodeOutcome::Infeasible;
    }

    // All fixed? Verify exactly.
    if lo == hi {
        return if p.satisfied_by(&lo) {
            NodeOutcome::Feasible(lo)
        } else {
            NodeOutcome::Infeasible
        };
    }

    // Fast LP relaxation over shifted variables v = u − lo ≥ 0 with the
    // box rows v ≤ hi − lo. Guidance only; every verdict gets rechecked.
    let n = p.unknowns.len();
    let caps: Vec<i64> = (0..n).map(|u| hi[u] - lo[u]).collect();
    let structural: Vec<(&LinRow, bool)> = p
        .eq_rows
        .iter()
        .map(|r| (r, true))
        .chain(p.le_rows.iter().map(|r| (r, false)))
        .collect();
    // Fixed variables (cap 0) are folded into the shifted right-hand side
    // and need neither terms nor box rows. ≤-rows that interval arithmetic
    // already proves redundant over the box are dropped; deep nodes shed
    // most of their rows this way.
    let mut frows = Vec::with_capacity(structural.len() + n);
    let mut live = Vec::with_capacity(structural.len());
    for (j, &(row, is_eq)) in structural.iter().enumerate() {
        let mut rhs = row.rhs as i128;
        let mut max_act: i128 = 0;
        let mut terms = Vec::with_capacity(row.terms.len());
        for &(u, c) in &row.terms {
            rhs -= c as i128 * lo[u] as i128;
            if caps[u] > 0 {
                if c > 0 {
                    max_act += c as i128 * caps[u] as i128;
                }
                terms.push((u, c as f64));
            }
        }
        if !is_eq && max_act <= rhs {
            continue;
        }
        live.push(j);
        frows.push(FRow {
            terms,
            cmp: if is_eq { Cmp::Eq } else { Cmp::Le },
            rhs: rhs as f64,
        });
    }
    for (u, &cap) in caps.iter().enumerate() {
        if cap > 0 {
            frows.push(FRow {
                terms: vec![(u, 1.0)],
                cmp: Cmp::Le,
                rhs: cap as f64,
            });
        }
    }

    let point = match lp_feasible_f64(n, &frows) {
        FastOutcome::Infeasible { multipliers } => {
            let live_rows: Vec<(&LinRow, bool)> = live.iter().map(|&j| structural[j]).collect();
            if certified_infeasible(&live_rows, &multipliers, &caps, &lo) {
                return NodeOutcome::Infeasible;
            }
            None
        }
        FastOutcome::Feasible(v) => Some(v),
    };

    // Branch on the fractional coordinate with the narrowest remaining
    // range (ties: lowest index), so binary indicators split before wide
    // coefficient boxes. A fully integral point is accepted only if
    // `satisfied_by` confirms it.
    let mut branch: Option<(usize, i64)> = None;
    if let Some(v) = &point {
        let mut rounded = Vec::with_capacity(n);
        let mut best = (i64::MAX, 0.0f64);
        for (u, &val) in v.iter().enumerate() {
            let orig = val + lo[u] as f64;
            let frac_dist = (orig - orig.round()).abs();
            if lo[u] < hi[u]
                && frac_dist > INT_TOL
                && (caps[u], -frac_dist) < (best.0, -best.1)
            {
                best = (caps[u], frac_dist);
                branch = Some((u, orig.floor() as i64));
            }
            rounded.push((orig.round() as i64).clamp(lo[u], hi[u]));
        }
        if branch.is_none() && p.satisfied_by(&rounded) {
            return NodeOutcome::Feasible(rounded);
        }
    }
    // Fallback split (no usable LP point): bisect the first unfixed
    // variable. Either way both children are strictly smaller boxes.
    let (var, fl) = match branch {
        Some((u, f)) => (u, f.clamp(lo[u], hi[u] - 1)),
        None => {
            let u = (0..n).find(|&u| lo[u] < hi[u]).expect("some variable is unfixed");
            (u, lo[u] + (hi[u] - lo[u]) / 2)
        }
    };

    // Value order: try the side whose boundary is smaller in magnitude first.
    let sides = if fl.abs() <= (fl + 1).abs() {
        [(lo[var], fl), (fl + 1, hi[var])]
    } else {
        [(fl + 1, hi[var]), (lo[var], fl)]
    };
    let mut saw_budget = false;
    for (l, h) in sides {
        if l > h {
            continue;
        }
        let mut clo = lo.clone();
        let mut chi = hi.clone();
        clo[var] = l.max(lo[var]);
        chi[var] = h.min(hi[var]);
        match dfs(p, clo, chi, nodes_left) {
            NodeOutcome::Feasible(x) => return NodeOutcome::Feasible(x),
            NodeOutcome::Budget => saw_budget = true,
            NodeOutcome::Infeasible => {}
        }
    }
    if saw_budget {
        NodeOutcome::Budget
    } else {
        NodeOutcome::Infeasible
    }
}

/// Exact recheck of an approximate Farkas certificate.
///
/// The multipliers are scaled to integers and the surrogate row
/// `Σ m·(a·v) ≤ Σ m·b` (shifted coordinates, m ≥ 0 on ≤-rows) is
/// aggregated in i128. Box constraints enter through the exact minimum of
/// each surrogate term over `v ∈ [0, cap]`. Positive scaling and sign
/// clamping preserve validity, so `true` is a proof of emptiness
/// regardless of how inaccurate the floating-point duals were.
fn certified_infeasible(
    structural: &[(&LinRow, bool)],
    multipliers: &[f64],
    caps: &[i64],
    lo: &[i64],
) -> bool {
    try_certificate(structural, multipliers, caps, lo).unwrap_or(false)
}

fn try_certificate(
    structural: &[(&LinRow, bool)],
    multipliers: &[f64],
    caps: &[i64],
    lo: &[i64],
) -> Option<bool> {
    let peak = multipliers
        .iter()
        .take(structural.len())
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    if !(peak > 0.0) || !peak.is_finite() {
        return Some(false);
    }
    let scale = 1e12 / peak;
    let mut coeff = vec![0i128; caps.len()];
    let mut rhs: i128 = 0;
    for (j, &(row, is_eq)) in structural.iter().enumerate() {
        let scaled = multipliers[j] * scale;
        if !scaled.is_finite() {
            return Some(false);
        }
        let mut num = scaled.round() as i128;
        if !is_eq {
            num = num.max(0);
        }
        if num == 0 {
            continue;
        }
        let mut row_rhs = row.rhs as i128;
        for &(u, c) in &row.terms {
            row_rhs -= (c as i128).checked_mul(lo[u] as i128)?;
            coeff[u] = coeff[u].checked_add(num.checked_mul(c as i128)?)?;
        }
        rhs = rhs.checked_add(num.checked_mul(row_rhs)?)?;
    }
    let mut min_activity: i128 = 0;
    for (u, &c) in coeff.iter().enumerate() {
        if c < 0 {
            min_activity = min_activity.checked_add(c.checked_mul(caps[u] as i128)?)?;
        }
    }
    Some(min_activity > rhs)
}

/// Integer bound tightening to a fixpoint. Returns false on proven
/// emptiness of the box.
fn propagate(p: &IlpProblem, lo: &mut [i64], hi: &mut [i64]) -> bool {
    for _ in 0..64 {
        let mut changed = false;
        for (row, is_eq) in p
            .eq_rows
            .iter()
            .map(|r| (r, true))
            .chain(p.le_rows.iter().map(|r| (r, false)))
        {
            if !tighten(row, is_eq, lo, hi, &mut changed) {
                return false;
            }
        }
        if !changed {
            return true;
        }
    }
    true
}

/// Tightens bounds from one row; `Σ c·u ≤ rhs`, and additionally
/// `Σ c·u ≥ rhs` when `is_eq`.
fn tighten(row: &LinRow, is_eq: bool, lo: &mut [i64], hi: &mut [i64], changed: &mut bool) -> bool {
    let term_min = |c: i64, l: i64, h: i64| -> i128 {
        if c >= 0 {
            c as i128 * l as i128
        } else {
            c as i128 * h as i128
        }
    };
    let term_max = |c: i64, l: i64, h: i64| -> i128 {
        if c >= 0 {
            c as i128 * h as i128
        } else {
            c as i128 * l as i128
        }
    };
    let min_act: i128 = row.terms.iter().map(|&(u, c)| term_min(c, lo[u], hi[u])).sum();
    let max_act: i128 = row.terms.iter().map(|&(u, c)| term_max(c, lo[u], hi[u])).sum();
    let rhs = row.rhs as i128;
    if min_act > rhs || (is_eq && max_act < rhs) {
        return false;
    }
    for &(u, c) in &row.terms {
        if c == 0 {
            continue;
        }
        // upper side: c·u ≤ rhs − min(others)
        let others_min = min_act - term_min(c, lo[u], hi[u]);
        let budget = rhs - others_min;
        if c > 0 {
            let nb = div_floor(budget, c as i128);
            if nb < hi[u] as i128 {
                hi[u] = nb.max(lo[u] as i128 - 1) as i64;
                *changed = true;
                if hi[u] < lo[u] {
                    return false;
                }
            }
        } else {
            let nb = -div_floor(budget, (-c) as i128);
            if nb > lo[u] as i128 {
                lo[u] = nb.min(hi[u] as i128 + 1) as i64;
                *changed = true;
                if hi[u] < lo[u] {
                    return false;
                }
            }
        }
        if is_eq {
            // lower side: c·u ≥ rhs − max(others)
            let others_max = max_act - term_max(c, lo[u], hi[u]);
            let need = rhs - others_max;
            if c > 0 {
                let nb = div_ceil(need, c as i128);
                if nb > lo[u] as i128 {
                    lo[u] = nb.min(hi[u] as i128 + 1) as i64;
                    *changed = true;
                    if hi[u] < lo[u] {
                        return false;
                    }
                }
            } else {
                let nb = -div_ceil(need, (-c) as i128);
                if nb < hi[u] as i128 {
                    hi[u] = nb.max(lo[u] as i128 - 1) as i64;
                    *changed = true;
                    if hi[u] < lo[u] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn div_floor(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    let q = a / b;
    if a % b < 0 {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    let q = a / b;
    if a % b > 0 {
        q + 1
    } else {
        q
    }
}
