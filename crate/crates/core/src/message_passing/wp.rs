//! Warning Propagation over `{frozen, uniform, null}`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::formula::{FactorGraph, XorsatFormula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Wp {
    Frozen,
    Uniform,
    Null,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpState {
    pub var_to_clause: Vec<Wp>,
    pub clause_to_var: Vec<Wp>,
    pub marks: Vec<Wp>,
    pub iteration: usize,
}

/// Variables grouped by mark.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MarkSets {
    pub null: Vec<usize>,
    pub frozen: Vec<usize>,
    pub uniform: Vec<usize>,
}

impl MarkSets {
    pub fn from_marks(marks: &[Wp]) -> Self {
        let mut s = MarkSets::default();
        for (x, m) in marks.iter().enumerate() {
            match m {
                Wp::Null => s.null.push(x),
                Wp::Frozen => s.frozen.push(x),
                Wp::Uniform => s.uniform.push(x),
            }
        }
        s
    }
}

/// Message and mark tallies for one iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WpCounts {
    pub iteration: usize,
    pub null_messages: usize,
    pub frozen_messages: usize,
    pub uniform_messages: usize,
    pub null_marks: usize,
    pub frozen_marks: usize,
    pub uniform_marks: usize,
}

impl WpState {
    /// All messages frozen, marks computed from them.
    pub fn frozen(g: &FactorGraph) -> Self {
        let clause_to_var = vec![Wp::Frozen; g.num_edges()];
        let marks = marks(g, &clause_to_var);
        WpState {
            var_to_clause: vec![Wp::Frozen; g.num_edges()],
            clause_to_var,
            marks,
            iteration: 0,
        }
    }

    pub fn counts(&self) -> WpCounts {
        let tally = |v: &[Wp], w: Wp| v.iter().filter(|&&m| m == w).count();
        let msg = |w| tally(&self.var_to_clause, w) + tally(&self.clause_to_var, w);
        WpCounts {
            iteration: self.iteration,
            null_messages: msg(Wp::Null),
            frozen_messages: msg(Wp::Frozen),
            uniform_messages: msg(Wp::Uniform),
            null_marks: tally(&self.marks, Wp::Null),
            frozen_marks: tally(&self.marks, Wp::Frozen),
            uniform_marks: tally(&self.marks, Wp::Uniform),
        }
    }

    pub fn mark_sets(&self) -> MarkSets {
        MarkSets::from_marks(&self.marks)
    }
}

fn combine_at_var(nulls: usize, frozens: usize) -> Wp {
    if nulls > 0 {
        Wp::Null
    } else if frozens > 0 {
        Wp::Frozen
    } else {
        Wp::Uniform
    }
}

fn var_tally(edges: &[u32], cv: &[Wp]) -> (usize, usize) {
    edges.iter().fold((0, 0), |(n, f), &e| match cv[e as usize] {
        Wp::Null => (n + 1, f),
        Wp::Frozen => (n, f + 1),
        Wp::Uniform => (n, f),
    })
}

fn marks(g: &FactorGraph, cv: &[Wp]) -> Vec<Wp> {
    (0..g.num_vars())
        .map(|x| {
            let (n, f) = var_tally(g.var_edges(x), cv);
            combine_at_var(n, f)
        })
        .collect()
}

/// One synchronous round.
pub fn wp_step(g: &FactorGraph, state: &WpState) -> WpState {
    let mut clause_to_var = vec![Wp::Uniform; g.num_edges()];
    for a in 0..g.num_clauses() {
        let edges = g.clause_edges(a);
        let deg = edges.len();
        let (mut nulls, mut uniforms) = (0usize, 0usize);
        for e in edges.clone() {
            match state.var_to_clause[e] {
                Wp::Null => nulls += 1,
                Wp::Uniform => uniforms += 1,
                Wp::Frozen => {}
            }
        }
        for e in edges {
            let own = state.var_to_clause[e];
            let others = deg - 1;
            let other_nulls = nulls - usize::from(own == Wp::Null);
            let other_uniforms = uniforms - usize::from(own == Wp::Uniform);
            clause_to_var[e] = if other_nulls == others {
                Wp::Null
            } else if other_uniforms == 0 {
                Wp::Frozen
            } else {
                Wp::Uniform
            };
        }
    }
    let mut var_to_clause = vec![Wp::Uniform; g.num_edges()];
    for x in 0..g.num_vars() {
        let (nulls, frozens) = var_tally(g.var_edges(x), &state.clause_to_var);
        for &e in g.var_edges(x) {
            let e = e as usize;
            let (n, f) = match state.clause_to_var[e] {
                Wp::Null => (nulls - 1, frozens),
                Wp::Frozen => (nulls, frozens - 1),
                Wp::Uniform => (nulls, frozens),
            };
            var_to_clause[e] = combine_at_var(n, f);
        }
    }
    let marks = marks(g, &clause_to_var);
    WpState {
        var_to_clause,
        clause_to_var,
        marks,
        iteration: state.iteration + 1,
    }
}

/// Result of [`wp_run`].
#[derive(Clone, Debug)]
pub struct WpRun {
    /// State at the first iteration whose successor is identical.
    pub fixpoint: WpState,
    /// Mark sets at each requested iteration, in request order.
    pub marks_at: Vec<(usize, MarkSets)>,
    /// Tallies for iterations `0..=fixpoint.iteration`.
    pub trace: Vec<WpCounts>,
}

impl WpRun {
    pub fn limit(&self) -> MarkSets {
        self.fixpoint.mark_sets()
    }
}

/// Iterates until nothing changes. Panics past `2|C| + 1` rounds, and if the
/// null count ever drops or the frozen count ever grows.
pub fn wp_run(f: &XorsatFormula, record: &[usize]) -> WpRun {
    let g = f.factor_graph();
    wp_run_graph(&g, record)
}

pub fn wp_run_graph(g: &FactorGraph, record: &[usize]) -> WpRun {
    let cap = 2 * g.num_clauses() + 1;
    let mut state = WpState::frozen(g);
    let mut trace = vec![state.counts()];
    let mut snapshots: Vec<Option<MarkSets>> = vec![None; record.len()];
    let take = |state: &WpState, snapshots: &mut Vec<Option<MarkSets>>| {
        for (i, &l) in record.iter().enumerate() {
            if l == state.iteration {
                snapshots[i] = Some(state.mark_sets());
            }
        }
    };
    take(&state, &mut snapshots);
    loop {
        let next = wp_step(g, &state);
        let (prev, cur) = (trace.last().unwrap(), next.counts());
        assert!(cur.null_messages >= prev.null_messages, "null count dropped");
        assert!(cur.frozen_messages <= prev.frozen_messages, "frozen count grew");
        let done = next.var_to_clause == state.var_to_clause
            && next.clause_to_var == state.clause_to_var;
        if done {
            break;
        }
        state = next;
        trace.push(cur);
        take(&state, &mut snapshots);
        assert!(state.iteration <= cap, "WP exceeded {cap} rounds");
    }
    // Messages are stationary from here on, and so are the marks.
    let marks_at = record
        .iter()
        .zip(snapshots)
        .map(|(&l, s)| (l, s.unwrap_or_else(|| state.mark_sets())))
        .collect();
    WpRun {
        fixpoint: state,
        marks_at,
        trace,
    }
}

/// Runs exactly `ell` rounds (or stops early at a fixpoint) and returns the
/// state at iteration `ell`.
pub fn wp_marks_at(g: &FactorGraph, ell: usize) -> WpState {
    let mut state = WpState::frozen(g);
    while state.iteration < ell {
        let next = wp_step(g, &state);
        if next.var_to_clause == state.var_to_clause && next.clause_to_var == state.clause_to_var {
            return WpState {
                iteration: ell,
                ..next
            };
        }
        state = next;
    }
    state
}

/// Per-iteration tallies as CSV.
pub fn trace_csv(trace: &[WpCounts]) -> String {
    let mut out = String::from(
        "iteration,null_messages,frozen_messages,uniform_messages,null_marks,frozen_marks,uniform_marks\n",
    );
    for c in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.iteration,
            c.null_messages,
            c.frozen_messages,
            c.uniform_messages,
            c.null_marks,
            c.frozen_marks,
            c.uniform_marks
        );
    }
    out
}
