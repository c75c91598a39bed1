//! Belief-Propagation-Guided Decimation.
//!
//! Strict mode runs BP to its fixpoint on every simplified formula `F_t`
//! and assigns `x_{t+1}` its free bit when the marginal is 1/2 and the
//! forced value otherwise. A conflict is recorded at iteration `t` when
//! `F_{t+1}` is contradictory: a clause has been violated or BP delivers
//! opposite forced messages to some variable.
//!
//! Fast mode delegates to UCP. The two agree on the assignment, on which
//! steps are free and on the first conflict; after a conflict BP resolves
//! contradictions message by message and can assign later variables
//! differently from UCP, so traces are only compared up to that point.

use serde::{Deserialize, Serialize};

use super::trace::{Outcome, StepKind, TrialTrace};
use super::ucp::{run_ucp, run_ucp_with, UcpOptions};
use crate::formula::{PartialAssignment, XorsatFormula};
use crate::message_passing::bp_run;
use crate::trit::Trit;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BpgdMode {
    Strict,
    #[default]
    Fast,
}

/// Full BPGD trace plus the marginal used at each step.
#[derive(Clone, Debug)]
pub struct BpgdRun {
    pub trace: TrialTrace,
    /// `μ_{F_t}` for `t = 0..n`; empty in fast mode.
    pub marginals: Vec<Trit>,
}

pub fn run_bpgd(f: &XorsatFormula, tau: &[bool], mode: BpgdMode) -> TrialTrace {
    match mode {
        BpgdMode::Fast => run_ucp(f, tau),
        BpgdMode::Strict => run_bpgd_strict(f, tau).trace,
    }
}

pub fn run_bpgd_with(f: &XorsatFormula, tau: &[bool], mode: BpgdMode, opts: UcpOptions) -> TrialTrace {
    match mode {
        BpgdMode::Fast => run_ucp_with(f, tau, opts),
        BpgdMode::Strict => run_bpgd_strict(f, tau).trace,
    }
}

fn contradictory(f: &XorsatFormula, violated: usize) -> (bool, Vec<Trit>) {
    let fix = bp_run(f, &f.factor_graph());
    (violated > 0 || fix.contradiction, fix.marginals)
}

pub fn run_bpgd_strict(f: &XorsatFormula, tau: &[bool]) -> BpgdRun {
    let n = f.num_vars();
    assert_eq!(tau.len(), n, "one free bit per variable");
    let mut current = f.clone();
    let mut violated = 0usize;
    let (mut contra, mut marg) = contradictory(&current, violated);
    let initially_contradictory = contra;
    let mut assignment = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    let mut marginals = Vec::with_capacity(n);
    let mut conflicts = Vec::new();
    for t in 0..n {
        let mu = marg[t];
        marginals.push(mu);
        let b = match mu.value() {
            None => {
                steps.push(StepKind::Free);
                tau[t]
            }
            Some(b) => {
                steps.push(StepKind::Forced);
                b
            }
        };
        assignment.push(b);
        let mut sigma = PartialAssignment::new(n);
        sigma.assign(t, b).expect("fresh variable");
        let sub = current.substitute(&sigma);
        violated += sub.violated;
        current = sub.formula;
        (contra, marg) = contradictory(&current, violated);
        if contra || (t == 0 && initially_contradictory) {
            conflicts.push(t);
        }
    }
    let outcome = if f.is_satisfied_by(&assignment) {
        Outcome::Satisfying
    } else {
        Outcome::Failure
    };
    BpgdRun {
        trace: TrialTrace {
            outcome,
            assignment,
            steps,
            conflicts,
            snapshots: Vec::new(),
        },
        marginals,
    }
}

/// Differences between two BPGD/UCP traces over the range where they are
/// required to agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceMismatch {
    Outcome,
    FirstConflict { left: Option<usize>, right: Option<usize> },
    Assignment { var: usize },
    Step { var: usize },
}

/// Compares two traces: same outcome and first conflict; without a conflict
/// the whole assignment and step kinds agree, otherwise those of
/// `x_1..x_{t+1}` for the first conflict iteration `t`.
pub fn compare_traces(a: &TrialTrace, b: &TrialTrace) -> Option<TraceMismatch> {
    if a.outcome != b.outcome {
        return Some(TraceMismatch::Outcome);
    }
    if a.first_conflict() != b.first_conflict() {
        return Some(TraceMismatch::FirstConflict {
            left: a.first_conflict(),
            right: b.first_conflict(),
        });
    }
    let upto = a.first_conflict().map_or(a.assignment.len(), |t| t + 1);
    if let Some(var) = (0..upto).find(|&i| a.assignment[i] != b.assignment[i]) {
        return Some(TraceMismatch::Assignment { var });
    }
    (0..upto)
        .find(|&i| a.steps[i] != b.steps[i])
        .map(|var| TraceMismatch::Step { var })
}
