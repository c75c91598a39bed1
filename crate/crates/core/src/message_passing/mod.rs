//! Belief and Warning Propagation, and the edge-by-edge correspondence
//! between them: a BP message is uniform exactly when the WP message in the
//! same position is not null.

pub mod bp;
pub mod wp;

use serde::Serialize;

pub use bp::{bp_marginal, bp_run, bp_step, BpFixpoint, BpState};
pub use wp::{wp_marks_at, wp_run, wp_run_graph, wp_step, MarkSets, Wp, WpCounts, WpRun, WpState};

use crate::formula::XorsatFormula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Site {
    VarToClause { edge: usize },
    ClauseToVar { edge: usize },
    Mark { var: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub iteration: usize,
    pub site: Site,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    /// Iterations `0..=last_iteration` were compared.
    pub last_iteration: usize,
    pub counterexample: Option<Counterexample>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn compare(f_bp: &BpState, wp: &WpState, g: &crate::FactorGraph) -> Option<Site> {
    for e in 0..g.num_edges() {
        if f_bp.var_to_clause[e].is_half() != (wp.var_to_clause[e] != Wp::Null) {
            return Some(Site::VarToClause { edge: e });
        }
        if f_bp.clause_to_var[e].is_half() != (wp.clause_to_var[e] != Wp::Null) {
            return Some(Site::ClauseToVar { edge: e });
        }
    }
    (0..g.num_vars())
        .find(|&x| bp::marginal(g, f_bp, x).is_half() != (wp.marks[x] != Wp::Null))
        .map(|var| Site::Mark { var })
}

/// Runs both engines side by side and compares every message and mark at
/// each iteration `0..=ell`. With `ell = None` runs until both have
/// converged.
pub fn bp_wp_equivalence_check(f: &XorsatFormula, ell: Option<usize>) -> EquivalenceReport {
    let g = f.factor_graph();
    let mut b = BpState::uniform(&g);
    let mut w = WpState::frozen(&g);
    let cap = 2 * g.num_edges() + 2;
    loop {
        if let Some(site) = compare(&b, &w, &g) {
            return EquivalenceReport {
                last_iteration: b.iteration,
                counterexample: Some(Counterexample {
                    iteration: b.iteration,
                    site,
                }),
            };
        }
        if ell.is_some_and(|l| b.iteration >= l) || b.iteration >= cap {
            break;
        }
        let nb = bp_step(f, &g, &b);
        let nw = wp_step(&g, &w);
        let converged = ell.is_none()
            && nb.var_to_clause == b.var_to_clause
            && nb.clause_to_var == b.clause_to_var
            && nw.var_to_clause == w.var_to_clause
            && nw.clause_to_var == w.clause_to_var;
        b = nb;
        w = nw;
        if converged {
            break;
        }
    }
    EquivalenceReport {
        last_iteration: b.iteration,
        counterexample: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    #[test]
    fn holds_vacuously_at_start() {
        let f = XorsatFormula::generate_random(50, 2.0, 3, 1).unwrap();
        let r = bp_wp_equivalence_check(&f, Some(0));
        assert!(r.holds());
        assert_eq!(r.last_iteration, 0);
    }

    #[test]
    fn forced_edge_turns_null_in_both() {
        // x0 = 1 and x0 + x1 = 0: the message into x1 is forced from step 3.
        let f = XorsatFormula::new(
            2,
            0,
            vec![
                Clause::new(vec![0], true).unwrap(),
                Clause::new(vec![0, 1], false).unwrap(),
            ],
        )
        .unwrap();
        let g = f.factor_graph();
        let mut b = BpState::uniform(&g);
        let mut w = WpState::frozen(&g);
        let edge_into_x1 = g.var_edges(1)[0] as usize;
        for step in 1..=3 {
            b = bp_step(&f, &g, &b);
            w = wp_step(&g, &w);
            let forced = !b.clause_to_var[edge_into_x1].is_half();
            assert_eq!(forced, w.clause_to_var[edge_into_x1] == Wp::Null);
            assert_eq!(forced, step >= 3, "step {step}");
        }
        assert!(bp_wp_equivalence_check(&f, None).holds());
    }

    #[test]
    fn random_instances() {
        for seed in 0..40 {
            let f = XorsatFormula::generate_random(60, 1.0 + (seed % 4) as f64 * 0.6, 3, seed).unwrap();
            assert!(bp_wp_equivalence_check(&f, None).holds(), "seed {seed}");
        }
    }
}
