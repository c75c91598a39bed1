//! Unit Clause Propagation.
//!
//! Variables are visited in index order. An unassigned variable gets its
//! free bit, then unit clauses are pursued until none remain. Two unit
//! clauses demanding opposite values on the same variable are a conflict:
//! the variable is set to 0 and the run continues.
//!
//! Per clause the engine keeps the number of unassigned variables, the
//! parity `rhs ⊕ Σ assigned values` (the value a unit clause demands) and
//! the XOR of the unassigned variable ids (the variable of a unit clause).
//! Unit clauses already present in the input are flushed before the first
//! free choice and count towards iteration 0.

use std::collections::VecDeque;

use super::trace::{Outcome, Snapshot, StepKind, TrialTrace};
use crate::formula::{FactorGraph, XorsatFormula};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QueueOrder {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UcpOptions {
    pub order: QueueOrder,
    /// Record a snapshot after every `stride` iterations (and at the end).
    pub snapshot_stride: Option<usize>,
}

struct Engine<'a> {
    g: &'a FactorGraph,
    live: Vec<u32>,
    parity: Vec<bool>,
    ids: Vec<u32>,
    value: Vec<Option<bool>>,
    steps: Vec<StepKind>,
    queue: VecDeque<u32>,
    order: QueueOrder,
    m: Vec<usize>,
    unassigned: usize,
}

impl<'a> Engine<'a> {
    fn new(f: &XorsatFormula, g: &'a FactorGraph, order: QueueOrder) -> Self {
        let width = f.clauses().iter().map(|c| c.len()).max().unwrap_or(0).max(f.k());
        let mut m = vec![0; width + 1];
        let mut queue = VecDeque::new();
        let mut ids = Vec::with_capacity(f.num_clauses());
        for (a, c) in f.clauses().iter().enumerate() {
            m[c.len()] += 1;
            ids.push(c.vars().iter().fold(0u32, |x, &v| x ^ v));
            if c.len() == 1 {
                queue.push_back(a as u32);
            }
        }
        Engine {
            g,
            live: f.clauses().iter().map(|c| c.len() as u32).collect(),
            parity: f.clauses().iter().map(|c| c.rhs()).collect(),
            ids,
            value: vec![None; f.num_vars()],
            steps: vec![StepKind::Free; f.num_vars()],
            queue,
            order,
            m,
            unassigned: f.num_vars(),
        }
    }

    fn assign(&mut self, x: usize, b: bool, kind: StepKind) {
        debug_assert!(self.value[x].is_none());
        self.value[x] = Some(b);
        self.steps[x] = kind;
        self.unassigned -= 1;
        for &e in self.g.var_edges(x) {
            let a = self.g.edge_clause(e as usize);
            let l = self.live[a] as usize;
            self.m[l] -= 1;
            self.live[a] -= 1;
            self.parity[a] ^= b;
            self.ids[a] ^= x as u32;
            match l - 1 {
                0 => {
                    // Fully assigned: satisfied clauses leave the tally,
                    // violated ones stay in m[0].
                    if self.parity[a] {
                        self.m[0] += 1;
                    }
                }
                1 => {
                    self.m[1] += 1;
                    self.queue.push_back(a as u32);
                }
                l => self.m[l] += 1,
            }
        }
    }

    /// Pursues unit clauses until none remain; returns whether a conflict
    /// occurred.
    fn propagate(&mut self) -> bool {
        let mut conflict = false;
        loop {
            let next = match self.order {
                QueueOrder::Fifo => self.queue.pop_front(),
                QueueOrder::Lifo => self.queue.pop_back(),
            };
            let Some(a) = next else { break };
            let a = a as usize;
            if self.live[a] != 1 {
                continue;
            }
            let x = self.ids[a] as usize;
            let s = self.parity[a];
            let opposed = self.g.var_edges(x).iter().any(|&e| {
                let b = self.g.edge_clause(e as usize);
                b != a && self.live[b] == 1 && self.parity[b] != s
            });
            if opposed {
                conflict = true;
                self.assign(x, false, StepKind::Forced);
            } else {
                self.assign(x, s, StepKind::Forced);
            }
        }
        conflict
    }

    fn snapshot(&self, t: usize) -> Snapshot {
        Snapshot {
            t,
            n: self.unassigned,
            m: self.m.clone(),
        }
    }
}

/// Runs UCP with free bits `tau` (one per variable).
pub fn run_ucp_with(f: &XorsatFormula, tau: &[bool], opts: UcpOptions) -> TrialTrace {
    let g = f.factor_graph();
    run_ucp_graph(f, &g, tau, opts)
}

pub fn run_ucp(f: &XorsatFormula, tau: &[bool]) -> TrialTrace {
    run_ucp_with(f, tau, UcpOptions::default())
}

pub fn run_ucp_graph(f: &XorsatFormula, g: &FactorGraph, tau: &[bool], opts: UcpOptions) -> TrialTrace {
    let n = f.num_vars();
    assert_eq!(tau.len(), n, "one free bit per variable");
    let mut eng = Engine::new(f, g, opts.order);
    let mut conflicts = Vec::new();
    let mut snapshots = Vec::new();
    let initial_conflict = eng.propagate();
    if let Some(stride) = opts.snapshot_stride {
        debug_assert!(stride > 0);
        snapshots.push(eng.snapshot(0));
    }
    for t in 0..n {
        let mut conflict = t == 0 && initial_conflict;
        if eng.value[t].is_none() {
            eng.assign(t, tau[t], StepKind::Free);
            conflict |= eng.propagate();
        }
        if conflict {
            conflicts.push(t);
        }
        if let Some(stride) = opts.snapshot_stride {
            if (t + 1) % stride == 0 || t + 1 == n {
                snapshots.push(eng.snapshot(t + 1));
            }
        }
    }
    let assignment: Vec<bool> = eng.value.iter().map(|v| v.expect("all assigned")).collect();
    let outcome = if f.is_satisfied_by(&assignment) {
        Outcome::Satisfying
    } else {
        Outcome::Failure
    };
    TrialTrace {
        outcome,
        assignment,
        steps: eng.steps,
        conflicts,
        snapshots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn formula(n: usize, clauses: &[(&[u32], bool)]) -> XorsatFormula {
        XorsatFormula::new(
            n,
            0,
            clauses
                .iter()
                .map(|(v, b)| Clause::new(v.to_vec(), *b).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_formula_returns_tau() {
        let tau = vec![true, false, true];
        let tr = run_ucp(&XorsatFormula::empty(3), &tau);
        assert_eq!(tr.assignment, tau);
        assert!(tr.conflicts.is_empty());
        assert!(tr.succeeded());
    }

    #[test]
    fn opposing_units_conflict_at_zero() {
        let f = formula(2, &[(&[0, 1], true), (&[0, 1], false)]);
        for tau in [[false, false], [true, true]] {
            let tr = run_ucp(&f, &tau);
            assert_eq!(tr.conflicts, vec![0]);
            assert!(!tr.assignment[1]);
            assert_eq!(tr.outcome, Outcome::Failure);
        }
    }

    #[test]
    fn input_units_flush_first() {
        let f = formula(2, &[(&[0], true), (&[0, 1], true)]);
        let tr = run_ucp(&f, &[false, true]);
        assert_eq!(tr.assignment, vec![true, false]);
        assert_eq!(tr.steps, vec![StepKind::Forced, StepKind::Forced]);
        assert!(tr.succeeded());
    }

    #[test]
    fn snapshots_track_clause_lengths() {
        let f = XorsatFormula::generate_random(2000, 1.5, 3, 3).unwrap();
        let tau = vec![false; 2000];
        let tr = run_ucp_with(
            &f,
            &tau,
            UcpOptions {
                snapshot_stride: Some(100),
                ..Default::default()
            },
        );
        let first = &tr.snapshots[0];
        assert_eq!((first.t, first.n), (0, 2000));
        assert_eq!(first.m, vec![0, 0, 0, f.num_clauses()]);
        let last = tr.snapshots.last().unwrap();
        assert_eq!((last.t, last.n), (2000, 0));
        assert_eq!(&last.m[1..], &[0, 0, 0]);
        assert_eq!(last.m[0], f.clauses().iter().filter(|c| !c.is_satisfied_by(&tr.assignment)).count());
        for s in &tr.snapshots {
            assert_eq!(s.m[1], 0, "t = {}", s.t);
            assert!(s.m.iter().sum::<usize>() <= f.num_clauses());
        }
        assert_eq!(tr.snapshots.len(), 21);
        assert_eq!(super::super::trace::trajectory_snapshots(&tr, 500).len(), 5);
    }
}
