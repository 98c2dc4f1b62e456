//! The discovery loop: smallest substitution count first, with
//! counterexample-guided constraint growth and coefficient-bound
//! escalation.

use super::ilp::{
    add_symmetry_breaking, build_ilp_blocks, EncodingCertificate, Layout, TruthSpec,
};
use super::solver::{solve_feasibility, SolveOutcome, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use serde::Serialize;

/// Knobs for a discovery run; `Default` matches the CLI defaults.
#[derive(Debug, Clone)]
pub struct DiscoverOptions {
    /// Largest substitution count to try (inclusive).
    pub max_subs: usize,
    /// Starting coefficient bound.
    pub coeff_bound: i64,
    /// Bound ceiling; the bound doubles on a fruitless full sweep.
    pub max_coeff_bound: i64,
    /// Require exactly one zero-energy substitution string per min-term.
    pub strong: bool,
    /// Counterexample-guided growth of min-term blocks.
    pub cegar: bool,
    /// Branch-and-bound node budget per solver call.
    pub node_budget: u64,
}

impl Default for DiscoverOptions {
    fn default() -> Self {
        DiscoverOptions {
            max_subs: 2,
            coeff_bound: 100,
            max_coeff_bound: 400,
            strong: false,
            cegar: true,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// One solver attempt in the evidence trail.
#[derive(Debug, Clone, Serialize)]
pub struct Attempt {
    pub n_subs: usize,
    pub coeff_bound: i64,
    pub verdict: String,
}

/// Evidence returned when no encoding exists within the search space.
#[derive(Debug, Clone, Serialize)]
pub struct NotFoundEvidence {
    pub attempts: Vec<Attempt>,
    pub node_budget: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DiscoverOutcome {
    Found(EncodingCertificate),
    NotFound(NotFoundEvidence),
}

enum LevelVerdict {
    Feasible(Vec<i64>),
    Infeasible,
    Budget,
}

/// Finds the encoding with the smallest substitution count in
/// `[0, max_subs]`, escalating the coefficient bound by doubling when a
/// full sweep finds nothing. Every returned certificate has passed the
/// exhaustive recheck.
pub fn discover(spec: &TruthSpec, opts: &DiscoverOptions) -> Result<DiscoverOutcome> {
    let masks = spec.masks()?;
    if spec.n + opts.max_subs > 20 {
        return Err(Error::Contract(format!(
            "{} primary + {} substitution bits exceeds the recheck bound of 20",
            spec.n, opts.max_subs
        )));
    }
    if opts.coeff_bound < 1 || opts.max_coeff_bound < opts.coeff_bound {
        return Err(Error::Contract("invalid coefficient bound range".into()));
    }
    // all strings satisfying + strong is infeasible by construction
    if opts.strong && masks.len() == 1usize << spec.n {
        return Ok(DiscoverOutcome::NotFound(NotFoundEvidence {
            attempts: vec![Attempt {
                n_subs: 0,
                coeff_bound: opts.coeff_bound,
                verdict: "infeasible (every assignment is a min-term, nothing can sit above zero)"
                    .into(),
            }],
            node_budget: opts.node_budget,
        }));
    }

    let mut attempts = Vec::new();
    let mut bound = opts.coeff_bound;
    loop {
        // whether every level below the current one was *proven* infeasible
        let mut lower_all_proven = true;
        for n_subs in 0..=opts.max_subs {
            match solve_level(spec, &masks, n_subs, bound, opts)? {
                LevelVerdict::Feasible(assign) => {
                    let mut cert =
                        EncodingCertificate::from_assignment(spec, n_subs, bound, &assign)?;
                    if lower_all_proven {
                        cert.minimal_at_bound = Some(bound);
                    }
                    cert.recheck(spec)?;
                    return Ok(DiscoverOutcome::Found(cert));
                }
                LevelVerdict::Infeasible => {
                    attempts.push(Attempt {
                        n_subs,
                        coeff_bound: bound,
                        verdict: "infeasible".into(),
                    });
                }
                LevelVerdict::Budget => {
                    attempts.push(Attempt {
                        n_subs,
                        coeff_bound: bound,
                        verdict: "budget-exhausted".into(),
                    });
                    lower_all_proven = false;
                }
            }
        }
        if bound >= opts.max_coeff_bound {
            return Ok(DiscoverOutcome::NotFound(NotFoundEvidence {
                attempts,
                node_budget: opts.node_budget,
            }));
        }
        bound = (bound * 2).min(opts.max_coeff_bound);
    }
}

/// Solves one (n_subs, bound) level; with CEGAR the min-term blocks grow
/// on demand, and infeasibility of the block subset already proves
/// infeasibility of the full problem (the subset is a relaxation).
fn solve_level(
    spec: &TruthSpec,
    masks: &[u64],
    n_subs: usize,
    bound: i64,
    opts: &DiscoverOptions,
) -> Result<LevelVerdict> {
    let layout = Layout {
        n: spec.n,
        k: n_subs,
    };
    let all_blocks: Vec<usize> = (0..masks.len()).collect();
    let mut blocks: Vec<usize> = if opts.cegar {
        vec![0]
    } else {
        all_blocks.clone()
    };
    loop {
        let mut p = build_ilp_blocks(spec, n_subs, bound, opts.strong, &blocks)?;
        if n_subs >= 2 {
            p = add_symmetry_breaking(p, &layout);
        }
        let assign = match solve_feasibility(&p, opts.node_budget) {
            SolveOutcome::Infeasible => return Ok(LevelVerdict::Infeasible),
            SolveOutcome::BudgetExhausted => return Ok(LevelVerdict::Budget),
            SolveOutcome::Feasible(a) => a,
        };
        if blocks.len() == masks.len() {
            return Ok(LevelVerdict::Feasible(assign));
        }
        // direct evaluation of the candidate on the excluded min-terms
        let eval = |x: u64, s: u64| -> i64 {
            layout
                .monomial_row(x, s)
                .into_iter()
                .map(|(u, c)| c * assign[u])
                .sum()
        };
        let violated = all_blocks.iter().copied().find(|b| {
            if blocks.contains(b) {
                return false;
            }
            let x = masks[*b];
            let mut zeros = 0usize;
            for s in 0..1u64 << n_subs {
                match eval(x, s) {
                    v if v < 0 => return true,
                    0 => zeros += 1,
                    _ => {}
                }
            }
            zeros == 0 || (opts.strong && zeros != 1)
        });
        match violated {
            Some(b) => blocks.push(b),
            None => return Ok(LevelVerdict::Feasible(assign)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::ilp::Strength;

    fn spec_of(n: usize, f: impl Fn(u64) -> bool) -> TruthSpec {
        TruthSpec::new(n, &(0..1u64 << n).filter(|&x| f(x)).collect::<Vec<_>>())
    }

    fn found(spec: &TruthSpec, opts: &DiscoverOptions) -> EncodingCertificate {
        match discover(spec, opts).unwrap() {
            DiscoverOutcome::Found(c) => c,
            DiscoverOutcome::NotFound(e) => panic!("expected certificate, got {e:?}"),
        }
    }

    #[test]
    fn single_literal_needs_no_substitution() {
        let spec = TruthSpec::new(1, &[1]);
        let cert = found(&spec, &DiscoverOptions::default());
        assert_eq!(cert.n_subs, 0);
        assert_eq!(cert.minimal_at_bound, Some(100));
    }

    #[test]
    fn and_with_result_needs_no_substitution() {
        // z = x0 ∧ x1 over (x0, x1, z)
        let spec = spec_of(3, |x| (x >> 2 & 1) == (x & 1) & (x >> 1 & 1));
        let cert = found(&spec, &DiscoverOptions::default());
        assert_eq!(cert.n_subs, 0);
        assert_eq!(cert.strength, Strength::Strong);
    }

    #[test]
    fn xor3_with_result_needs_one_substitution() {
        let spec = spec_of(4, |x| {
            (x >> 3 & 1) == (x & 1) ^ (x >> 1 & 1) ^ (x >> 2 & 1)
        });
        let cert = found(&spec, &DiscoverOptions::default());
        assert_eq!(cert.n_subs, 1);
        assert_eq!(cert.minimal_at_bound, Some(100));
    }

    #[test]
    fn all_min_terms_with_strong_flag_is_not_found() {
        let spec = spec_of(2, |_| true);
        let opts = DiscoverOptions {
            strong: true,
            ..DiscoverOptions::default()
        };
        match discover(&spec, &opts).unwrap() {
            DiscoverOutcome::NotFound(e) => assert!(!e.attempts.is_empty()),
            DiscoverOutcome::Found(c) => panic!("unexpected certificate {c:?}"),
        }
    }

    #[test]
    fn cegar_and_direct_agree_on_majority() {
        let spec = spec_of(4, |x| {
            let bits = (x & 1) + (x >> 1 & 1) + (x >> 2 & 1);
            (x >> 3 & 1) == u64::from(bits >= 2)
        });
        for cegar in [true, false] {
            let opts = DiscoverOptions {
                cegar,
                ..DiscoverOptions::default()
            };
            let cert = found(&spec, &opts);
            assert_eq!(cert.n_subs, 0, "cegar={cegar}");
            cert.recheck(&spec).unwrap();
        }
    }
}
