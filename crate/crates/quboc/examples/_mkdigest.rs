//! temp probe 2
use quboc::search::simplex::{lp_feasible_f64, Cmp, FRow, FastOutcome};

fn main() {
    // x1 + x2 <= 1, x1 + x2 >= 3 (as -x1 -x2 <= -3), x >= 0 : infeasible
    let rows = vec![
        FRow { terms: vec![(0, 1.0), (1, 1.0)], cmp: Cmp::Le, rhs: 1.0 },
        FRow { terms: vec![(0, -1.0), (1, -1.0)], cmp: Cmp::Le, rhs: -3.0 },
        FRow { terms: vec![(0, 1.0)], cmp: Cmp::Le, rhs: 8.0 },
        FRow { terms: vec![(1, 1.0)], cmp: Cmp::Le, rhs: 8.0 },
    ];
    match lp_feasible_f64(2, &rows) {
        FastOutcome::Feasible(x) => println!("feasible?! {x:?}"),
        FastOutcome::Infeasible { multipliers } => println!("infeasible, m = {multipliers:?}"),
    }
    // eq version: x1 + x2 = 1, x1 + x2 = 3
    let rows = vec![
        FRow { terms: vec![(0, 1.0), (1, 1.0)], cmp: Cmp::Eq, rhs: 1.0 },
        FRow { terms: vec![(0, 1.0), (1, 1.0)], cmp: Cmp::Eq, rhs: 3.0 },
    ];
    match lp_feasible_f64(2, &rows) {
        FastOutcome::Feasible(x) => println!("feasible?! {x:?}"),
        FastOutcome::Infeasible { multipliers } => println!("infeasible, m = {multipliers:?}"),
    }
}
