//! Exact rational LP solving for the discovery engine's relaxations.
//!
//! A dense two-phase primal simplex over arbitrary-precision rationals:
//! no tolerances, so "infeasible" is a proof, which the minimality claims
//! of the discovery loop rely on. Dantzig pricing with a Bland fallback
//! after a pivot-count threshold guards against cycling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// One linear constraint `Σ coeffs·x (cmp) rhs` over variables `x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub terms: Vec<(usize, BigRational)>,
    pub cmp: Cmp,
    pub rhs: BigRational,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// A feasible point (length = number of structural variables).
    Feasible(Vec<BigRational>),
    Infeasible,
}

pub fn ratio(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Decides feasibility of `rows` over `n_vars` nonnegative variables by
/// phase-one simplex (minimize the sum of artificial variables).
pub fn lp_feasible(n_vars: usize, rows: &[LpRow]) -> LpOutcome {
    // Normalize to Σ a x = b with b ≥ 0, adding slack/surplus columns.
    let mut n_cols = n_vars;
    let mut matrix: Vec<Vec<(usize, BigRational)>> = Vec::with_capacity(rows.len());
    let mut rhs: Vec<BigRational> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut terms: Vec<(usize, BigRational)> = row
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .cloned()
            .collect();
        let mut b = row.rhs.clone();
        let mut cmp = row.cmp;
        if b.is_negative() {
            for t in &mut terms {
                t.1 = -t.1.clone();
            }
            b = -b;
            cmp = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
        match cmp {
            Cmp::Le => {
                terms.push((n_cols, BigRational::one()));
                n_cols += 1;
            }
            Cmp::Ge => {
                terms.push((n_cols, -BigRational::one()));
                n_cols += 1;
            }
            Cmp::Eq => {}
        }
        matrix.push(terms);
        rhs.push(b);
    }

    // Dense tableau with one artificial per row.
    let m = matrix.len();
    if m == 0 {
        return LpOutcome::Feasible(vec![BigRational::zero(); n_vars]);
    }
    let total = n_cols + m;
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); total + 1]; m];
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for (r, terms) in matrix.iter().enumerate() {
        for (c, v) in terms {
            t[r][*c] += v.clone();
        }
        t[r][n_cols + r] = BigRational::one();
        t[r][total] = rhs[r].clone();
        basis.push(n_cols + r);
    }

    // Objective: minimize Σ artificials. Reduced cost row = Σ basic rows.
    let mut obj: Vec<BigRational> = vec![BigRational::zero(); total + 1];
    for row in t.iter() {
        for (c, o) in obj.iter_mut().enumerate() {
            *o += row[c].clone();
        }
    }
    // Artificial columns start basic; their reduced costs are zeroed by the
    // summation trick only for structural columns, so clear them explicitly.
    for a in n_cols..total {
        obj[a] = BigRational::zero();
    }

    let mut pivots = 0usize;
    let bland_after = 20 * (m + total);
    loop {
        // entering column: positive reduced cost (Dantzig, Bland fallback)
        let entering = if pivots < bland_after {
            (0..total)
                .filter(|&c| obj[c].is_positive())
                .max_by(|&a, &b| obj[a].cmp(&obj[b]))
        } else {
            (0..total).find(|&c| obj[c].is_positive())
        };
        let Some(col) = entering else { break };
        // ratio test
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..m {
            if t[r][col].is_positive() {
                let ratio = &t[r][total] / &t[r][col];
                let better = match &leave {
                    None => true,
                    Some((lr, lv)) => {
                        ratio < *lv || (ratio == *lv && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((prow, _)) = leave else {
            // unbounded phase-one objective cannot happen (bounded below by 0)
            break;
        };
        // pivot
        let piv = t[prow][col].clone();
        for v in t[prow].iter_mut() {
            *v /= piv.clone();
        }
        for r in 0..m {
            if r != prow && !t[r][col].is_zero() {
                let f = t[r][col].clone();
                for c in 0..=total {
                    let delta = &f * &t[prow][c];
                    t[r][c] -= delta;
                }
            }
        }
        if !obj[col].is_zero() {
            let f = obj[col].clone();
            for c in 0..=total {
                let delta = &f * &t[prow][c];
                obj[c] -= delta;
            }
        }
        basis[prow] = col;
        pivots += 1;
    }

    // Feasible iff all artificials can be driven to zero.
    let artificial_sum: BigRational = (0..m)
        .filter(|&r| basis[r] >= n_cols)
        .map(|r| t[r][total].clone())
        .sum();
    if !artificial_sum.is_zero() {
        return LpOutcome::Infeasible;
    }
    let mut x = vec![BigRational::zero(); n_vars];
    for r in 0..m {
        if basis[r] < n_vars {
            x[basis[r]] = t[r][total].clone();
        }
    }
    LpOutcome::Feasible(x)
}

/// One floating-point constraint row (same shape as [`LpRow`]).
#[derive(Debug, Clone)]
pub struct FRow {
    pub terms: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub enum FastOutcome {
    Feasible(Vec<f64>),
    /// Phase-one optimum stayed positive; `multipliers[i]` is the dual
    /// weight of input row `i` applied to that row as written, so the
    /// surrogate `Σ mᵢ·(aᵢ·x) ≤ Σ mᵢ·bᵢ` is valid whenever mᵢ ≥ 0 on Le
    /// rows and mᵢ ≤ 0 on Ge rows (Eq rows free). The weights are
    /// approximate — the caller must clamp the signs and recheck the
    /// aggregated surrogate exactly.
    Infeasible { multipliers: Vec<f64> },
}

const EPS: f64 = 1e-9;

/// Floating-point phase-one simplex over `x ≥ 0`. Fast but approximate:
/// use the returned point or multipliers only as a hint to verify exactly.
pub fn lp_feasible_f64(n_vars: usize, rows: &[FRow]) -> FastOutcome {
    let m = rows.len();
    if m == 0 {
        return FastOutcome::Feasible(vec![0.0; n_vars]);
    }
    // Normalize to equalities with b ≥ 0; remember each row's sign flip.
    // Rows normalizing to ≤ take their slack as initial basis; only Eq
    // and normalized-≥ rows start on a costed artificial. Every row still
    // keeps an artificial column as B⁻¹ bookkeeping for dual extraction.
    let mut n_cols = n_vars;
    let mut slack_col = vec![usize::MAX; m];
    let mut flipped = vec![false; m];
    let mut slack_basic = vec![false; m];
    let mut norm: Vec<(Vec<(usize, f64)>, f64)> = Vec::with_capacity(m);
    for (r, row) in rows.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> =
            row.terms.iter().filter(|(_, c)| *c != 0.0).cloned().collect();
        let mut b = row.rhs;
        let mut cmp = row.cmp;
        if b < 0.0 {
            for t in &mut terms {
                t.1 = -t.1;
            }
            b = -b;
            flipped[r] = true;
            cmp = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
        match cmp {
            Cmp::Le => {
                terms.push((n_cols, 1.0));
                slack_col[r] = n_cols;
                slack_basic[r] = true;
                n_cols += 1;
            }
            Cmp::Ge => {
                terms.push((n_cols, -1.0));
                slack_col[r] = n_cols;
                n_cols += 1;
            }
            Cmp::Eq => {}
        }
        norm.push((terms, b));
    }

    let total = n_cols + m;
    let mut t = vec![vec![0.0f64; total + 1]; m];
    let mut basis = Vec::with_capacity(m);
    for (r, (terms, b)) in norm.iter().enumerate() {
        for &(c, v) in terms {
            t[r][c] += v;
        }
        t[r][n_cols + r] = 1.0;
        t[r][total] = *b;
        basis.push(if slack_basic[r] { slack_col[r] } else { n_cols + r });
    }
    // Phase-one reduced costs: sum of the artificial-basic rows.
    let mut obj = vec![0.0f64; total + 1];
    for (r, row) in t.iter().enumerate() {
        if !slack_basic[r] {
            for (c, o) in obj.iter_mut().enumerate() {
                *o += row[c];
            }
        }
    }
    for a in n_cols..total {
        obj[a] = 0.0;
    }

    let mut pivots = 0usize;
    let max_pivots = 50 * (m + total);
    while pivots < max_pivots {
        let mut col = usize::MAX;
        let mut best = EPS;
        for c in 0..n_cols {
            if obj[c] > best {
                best = obj[c];
                col = c;
            }
        }
        if col == usize::MAX {
            break;
        }
        let mut prow = usize::MAX;
        let mut best_ratio = f64::INFINITY;
        for r in 0..m {
            if t[r][col] > EPS {
                let ratio = t[r][total] / t[r][col];
                if ratio < best_ratio - EPS
                    || (ratio < best_ratio + EPS && prow != usize::MAX && basis[r] < basis[prow])
                {
                    best_ratio = ratio;
                    prow = r;
                }
            }
        }
        if prow == usize::MAX {
            break;
        }
        let piv = t[prow][col];
        for v in t[prow].iter_mut() {
            *v /= piv;
        }
        for r in 0..m {
            if r != prow && t[r][col].abs() > EPS * EPS {
                let f = t[r][col];
                for c in 0..=total {
                    t[r][c] -= f * t[prow][c];
                }
            }
        }
        let f = obj[col];
        if f.abs() > EPS * EPS {
            for c in 0..=total {
                obj[c] -= f * t[prow][c];
            }
        }
        basis[prow] = col;
        pivots += 1;
    }

    let residual: f64 = (0..m)
        .filter(|&r| basis[r] >= n_cols)
        .map(|r| t[r][total])
        .sum();
    if residual <= 1e-7 {
        let mut x = vec![0.0; n_vars];
        for r in 0..m {
            if basis[r] < n_vars {
                x[basis[r]] = t[r][total];
            }
        }
        return FastOutcome::Feasible(x);
    }

    // Phase-one duals: y = c_B B⁻¹, and B⁻¹ is stored in the artificial
    // columns. Undo each row's normalization flip, then clamp the sign to
    // what makes the surrogate valid for the row's sense.
    let mut multipliers = vec![0.0; m];
    for j in 0..m {
        let mut y = 0.0;
        for r in 0..m {
            if basis[r] >= n_cols {
                y += t[r][n_cols + j];
            }
        }
        // Phase-one duals satisfy y·A ≤ 0 and y·b > 0 over the normalized
        // rows, so −σ·y (σ = the flip sign) weights the original rows
        // into a violated ≤-surrogate.
        let signed = if flipped[j] { y } else { -y };
        multipliers[j] = match rows[j].cmp {
            Cmp::Eq => signed,
            Cmp::Le => signed.max(0.0),
            Cmp::Ge => signed.min(0.0),
        };
    }
    FastOutcome::Infeasible { multipliers }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(terms: &[(usize, i64)], cmp: Cmp, rhs: i64) -> LpRow {
        LpRow {
            terms: terms.iter().map(|&(i, c)| (i, ratio(c))).collect(),
            cmp,
            rhs: ratio(rhs),
        }
    }

    #[test]
    fn empty_problem_is_feasible() {
        match lp_feasible(2, &[]) {
            LpOutcome::Feasible(x) => assert_eq!(x.len(), 2),
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn simple_systems() {
        // x0 + x1 = 3, x0 - x1 <= 1 → feasible
        let rows = vec![
            row(&[(0, 1), (1, 1)], Cmp::Eq, 3),
            row(&[(0, 1), (1, -1)], Cmp::Le, 1),
        ];
        match lp_feasible(2, &rows) {
            LpOutcome::Feasible(x) => {
                assert_eq!(&x[0] + &x[1], ratio(3));
                assert!(&x[0] - &x[1] <= ratio(1));
            }
            _ => panic!("expected feasible"),
        }
        // x ≤ 1 and x ≥ 2 → infeasible
        let rows = vec![row(&[(0, 1)], Cmp::Le, 1), row(&[(0, 1)], Cmp::Ge, 2)];
        assert!(matches!(lp_feasible(1, &rows), LpOutcome::Infeasible));
    }

    #[test]
    fn negative_rhs_normalization() {
        // -x0 ≤ -2  (x0 ≥ 2) together with x0 ≤ 5
        let rows = vec![row(&[(0, -1)], Cmp::Le, -2), row(&[(0, 1)], Cmp::Le, 5)];
        match lp_feasible(1, &rows) {
            LpOutcome::Feasible(x) => assert!(x[0] >= ratio(2) && x[0] <= ratio(5)),
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn degenerate_equalities() {
        // x0 = 0, x0 + x1 = 0 → x1 = 0
        let rows = vec![
            row(&[(0, 1)], Cmp::Eq, 0),
            row(&[(0, 1), (1, 1)], Cmp::Eq, 0),
        ];
        match lp_feasible(2, &rows) {
            LpOutcome::Feasible(x) => {
                assert!(x[0].is_zero() && x[1].is_zero());
            }
            _ => panic!("expected feasible"),
        }
    }
}
