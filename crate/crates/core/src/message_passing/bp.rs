//! Belief Propagation with messages in `{0, 1/2, 1}`.

use crate::formula::{FactorGraph, XorsatFormula};
use crate::trit::Trit;

/// Messages on every directed edge, indexed by the factor graph's edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpState {
    /// `μ_{x→a}(1)`.
    pub var_to_clause: Vec<Trit>,
    /// `μ_{a→x}(1)`.
    pub clause_to_var: Vec<Trit>,
    pub iteration: usize,
}

impl BpState {
    /// All messages uniform.
    pub fn uniform(g: &FactorGraph) -> Self {
        BpState {
            var_to_clause: vec![Trit::Half; g.num_edges()],
            clause_to_var: vec![Trit::Half; g.num_edges()],
            iteration: 0,
        }
    }
}

/// One synchronous round: every new message is computed from the previous
/// round's messages.
pub fn bp_step(f: &XorsatFormula, g: &FactorGraph, state: &BpState) -> BpState {
    let mut clause_to_var = vec![Trit::Half; g.num_edges()];
    for (a, clause) in f.clauses().iter().enumerate() {
        let edges = g.clause_edges(a);
        let mut halves = 0usize;
        let mut parity = clause.rhs();
        for e in edges.clone() {
            match state.var_to_clause[e] {
                Trit::Half => halves += 1,
                t => parity ^= t == Trit::One,
            }
        }
        for e in edges {
            let own = state.var_to_clause[e];
            let other_halves = halves - usize::from(own.is_half());
            if other_halves == 0 {
                let own_bit = own == Trit::One;
                clause_to_var[e] = Trit::forced(parity ^ own_bit);
            }
        }
    }
    let mut var_to_clause = vec![Trit::Half; g.num_edges()];
    for x in 0..g.num_vars() {
        let (ones, zeros) = forced_counts(g.var_edges(x), &state.clause_to_var);
        for &e in g.var_edges(x) {
            let e = e as usize;
            let (o, z) = match state.clause_to_var[e] {
                Trit::One => (ones - 1, zeros),
                Trit::Zero => (ones, zeros - 1),
                Trit::Half => (ones, zeros),
            };
            var_to_clause[e] = match (o > 0, z > 0) {
                (false, false) => Trit::Half,
                (true, false) => Trit::One,
                (false, true) => Trit::Zero,
                (true, true) => match state.var_to_clause[e] {
                    Trit::Half => Trit::Zero,
                    prev => prev,
                },
            };
        }
    }
    BpState {
        var_to_clause,
        clause_to_var,
        iteration: state.iteration + 1,
    }
}

fn forced_counts(edges: &[u32], cv: &[Trit]) -> (usize, usize) {
    edges.iter().fold((0, 0), |(o, z), &e| match cv[e as usize] {
        Trit::One => (o + 1, z),
        Trit::Zero => (o, z + 1),
        Trit::Half => (o, z),
    })
}

/// Marginal of `x` from the clause-to-variable messages; conflicting forced
/// messages give `0`.
pub fn marginal(g: &FactorGraph, state: &BpState, x: usize) -> Trit {
    match forced_counts(g.var_edges(x), &state.clause_to_var) {
        (0, 0) => Trit::Half,
        (_, 0) => Trit::One,
        _ => Trit::Zero,
    }
}

/// Whether some variable receives forced messages with both values.
pub fn has_contradiction(g: &FactorGraph, state: &BpState) -> bool {
    (0..g.num_vars()).any(|x| {
        let (o, z) = forced_counts(g.var_edges(x), &state.clause_to_var);
        o > 0 && z > 0
    })
}

/// Converged BP on a formula.
#[derive(Clone, Debug)]
pub struct BpFixpoint {
    pub state: BpState,
    pub marginals: Vec<Trit>,
    pub contradiction: bool,
}

/// Iterates [`bp_step`] until no message changes. Panics if this takes more
/// than `2 Σ|∂a| + 1` rounds, which the half-integral dynamics rule out.
pub fn bp_run(f: &XorsatFormula, g: &FactorGraph) -> BpFixpoint {
    let cap = 2 * g.num_edges() + 1;
    let mut state = BpState::uniform(g);
    loop {
        let next = bp_step(f, g, &state);
        let done = next.var_to_clause == state.var_to_clause
            && next.clause_to_var == state.clause_to_var;
        state = next;
        if done {
            break;
        }
        assert!(state.iteration <= cap + 1, "BP exceeded {cap} rounds");
    }
    let marginals = (0..g.num_vars()).map(|x| marginal(g, &state, x)).collect();
    let contradiction = has_contradiction(g, &state);
    BpFixpoint {
        state,
        marginals,
        contradiction,
    }
}

/// Converged BP marginal of one variable.
pub fn bp_marginal(f: &XorsatFormula, x: usize) -> Trit {
    let g = f.factor_graph();
    bp_run(f, &g).marginals[x]
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
    fn unit_clause_forces_after_one_step() {
        let f = formula(1, &[(&[0], true)]);
        let g = f.factor_graph();
        let s = bp_step(&f, &g, &BpState::uniform(&g));
        assert_eq!(s.clause_to_var[0], Trit::One);
        assert_eq!(bp_marginal(&f, 0), Trit::One);
    }

    #[test]
    fn symmetric_clause_stays_uniform() {
        let f = formula(3, &[(&[0, 1, 2], true)]);
        let g = f.factor_graph();
        let s = bp_step(&f, &g, &BpState::uniform(&g));
        assert!(s.clause_to_var.iter().all(|t| t.is_half()));
    }

    #[test]
    fn forced_chain() {
        let f = formula(2, &[(&[0], true), (&[0, 1], true)]);
        let g = f.factor_graph();
        let mut s = BpState::uniform(&g);
        for _ in 0..3 {
            s = bp_step(&f, &g, &s);
        }
        assert_eq!(marginal(&g, &s, 1), Trit::Zero);
        assert_eq!(crate::f2::exact_marginal(&f, 1), Some(Trit::Zero));
    }

    #[test]
    fn isolated_variable_is_uniform() {
        assert_eq!(bp_marginal(&XorsatFormula::empty(2), 1), Trit::Half);
    }

    #[test]
    fn contradictory_units() {
        let f = formula(1, &[(&[0], true), (&[0], false)]);
        let r = bp_run(&f, &f.factor_graph());
        assert!(r.contradiction);
        assert_eq!(r.marginals[0], Trit::Zero);
        // Each unit clause overrides the other on the outgoing message.
        assert_eq!(r.state.var_to_clause, vec![Trit::Zero, Trit::One]);
    }
}
