use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The assignment satisfies every clause of the input.
    Satisfying,
    /// The run finished with an assignment that violates some clause.
    Failure,
    /// The input has no solution; reported by the exact decimation process.
    Unsatisfiable,
}

/// How a variable received its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// A free choice taken from the shared bits or the random stream.
    Free,
    /// Implied by the formula.
    Forced,
}

/// State of the formula after `t` iterations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub t: usize,
    /// Unassigned variables.
    pub n: usize,
    /// `m[l]` counts live clauses with exactly `l` unassigned variables,
    /// for `l = 0..=k`; `m[0]` counts violated clauses.
    pub m: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialTrace {
    pub outcome: Outcome,
    pub assignment: Vec<bool>,
    /// Per variable, how it was assigned.
    pub steps: Vec<StepKind>,
    /// Iterations `t` (0-based, iteration `t` handles variable `t`) in which
    /// a conflict occurred, strictly increasing.
    pub conflicts: Vec<usize>,
    pub snapshots: Vec<Snapshot>,
}

impl TrialTrace {
    pub fn first_conflict(&self) -> Option<usize> {
        self.conflicts.first().copied()
    }

    pub fn succeeded(&self) -> bool {
        self.outcome == Outcome::Satisfying
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }

    /// Snapshot series as CSV with columns `t,n,m_0..m_k`.
    pub fn snapshots_csv(&self) -> String {
        let width = self.snapshots.first().map_or(0, |s| s.m.len());
        let mut out = String::from("t,n");
        for l in 0..width {
            let _ = write!(out, ",m_{l}");
        }
        out.push('\n');
        for s in &self.snapshots {
            let _ = write!(out, "{},{}", s.t, s.n);
            for m in &s.m {
                let _ = write!(out, ",{m}");
            }
            out.push('\n');
        }
        out
    }
}

/// Snapshots at multiples of `stride` (and the final one), from a trace
/// recorded with stride 1 or a divisor of `stride`.
pub fn trajectory_snapshots(trace: &TrialTrace, stride: usize) -> Vec<Snapshot> {
    let last = trace.snapshots.last().map(|s| s.t);
    trace
        .snapshots
        .iter()
        .filter(|s| s.t % stride.max(1) == 0 || Some(s.t) == last)
        .cloned()
        .collect()
}
