//! The decimation process: assign `x_1, x_2, …` in turn from their exact
//! marginals given the values chosen so far. The output is a uniformly
//! random solution.

use rand::Rng;

use super::trace::{Outcome, StepKind, TrialTrace};
use super::ucp::run_ucp;
use crate::error::{Error, Result};
use crate::f2::Echelon;
use crate::formula::XorsatFormula;
use crate::trit::Trit;

#[derive(Clone, Debug)]
pub struct DecimationRun {
    pub trace: TrialTrace,
    /// `π_t = P[σ(x_{t+1}) = 1 | F_t]`; empty for unsatisfiable input.
    pub marginals: Vec<Trit>,
}

/// Runs the process, drawing the bit for each step with marginal 1/2 from
/// `free_bit(t)`.
pub fn run_decimation_with(f: &XorsatFormula, mut free_bit: impl FnMut(usize) -> bool) -> DecimationRun {
    let n = f.num_vars();
    let mut ech = Echelon::from_formula(f);
    if !ech.is_consistent() {
        return DecimationRun {
            trace: TrialTrace {
                outcome: Outcome::Unsatisfiable,
                assignment: Vec::new(),
                steps: Vec::new(),
                conflicts: Vec::new(),
                snapshots: Vec::new(),
            },
            marginals: Vec::new(),
        };
    }
    let mut assignment = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    let mut marginals = Vec::with_capacity(n);
    for t in 0..n {
        let pi = ech.marginal(t).expect("stays consistent");
        marginals.push(pi);
        let b = match pi.value() {
            Some(b) => {
                steps.push(StepKind::Forced);
                b
            }
            None => {
                steps.push(StepKind::Free);
                free_bit(t)
            }
        };
        assignment.push(b);
        ech.push_unit(t, b);
    }
    assert!(f.is_satisfied_by(&assignment), "decimation left the solution space");
    DecimationRun {
        trace: TrialTrace {
            outcome: Outcome::Satisfying,
            assignment,
            steps,
            conflicts: Vec::new(),
            snapshots: Vec::new(),
        },
        marginals,
    }
}

pub fn run_decimation<R: Rng + ?Sized>(f: &XorsatFormula, rng: &mut R) -> DecimationRun {
    run_decimation_with(f, |_| rng.gen())
}

/// BPGD (via UCP) and the decimation process driven by the same free bits.
#[derive(Clone, Debug)]
pub struct CoupledRun {
    pub bpgd: TrialTrace,
    pub decimation: TrialTrace,
    /// First variable on which the two assignments differ, `n` if none.
    pub delta: usize,
}

/// Fails on unsatisfiable input. Panics if the runs diverge while BPGD
/// records no conflict, which the coupling rules out.
pub fn coupled_run(f: &XorsatFormula, tau: &[bool]) -> Result<CoupledRun> {
    let dec = run_decimation_with(f, |t| tau[t]);
    if dec.trace.outcome == Outcome::Unsatisfiable {
        return Err(Error::Unsatisfiable);
    }
    let bpgd = run_ucp(f, tau);
    let n = f.num_vars();
    let delta = (0..n)
        .find(|&i| bpgd.assignment[i] != dec.trace.assignment[i])
        .unwrap_or(n);
    assert!(
        delta == n || !bpgd.conflicts.is_empty(),
        "runs diverged at {delta} without a conflict"
    );
    Ok(CoupledRun {
        bpgd,
        decimation: dec.trace,
        delta,
    })
}
