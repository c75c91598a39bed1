//! Toxic cycles: cycles of binary clauses whose equations sum to `0 = 1`.

use serde::Serialize;

use crate::formula::XorsatFormula;

/// A simple cycle `v_0 -c_0- v_1 -c_1- … -c_{l-1}- v_0` in the graph whose
/// edges are the binary clauses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub vars: Vec<usize>,
    pub clauses: Vec<usize>,
}

/// All simple cycles of binary clauses, each reported once. Parallel
/// clauses on the same pair give cycles of length 2.
pub fn binary_cycles(f: &XorsatFormula) -> Vec<Cycle> {
    let n = f.num_vars();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (a, c) in f.clauses().iter().enumerate() {
        if let [u, v] = *c.vars() {
            adj[u as usize].push((v as usize, a));
            adj[v as usize].push((u as usize, a));
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    for s in 0..n {
        let mut vars = vec![s];
        let mut clauses = Vec::new();
        on_path[s] = true;
        extend(s, s, &adj, &mut on_path, &mut vars, &mut clauses, &mut out);
        on_path[s] = false;
    }
    out
}

// Cycles are rooted at their smallest vertex; of the two orientations the
// one whose first clause id is below its last is kept.
fn extend(
    s: usize,
    u: usize,
    adj: &[Vec<(usize, usize)>],
    on_path: &mut [bool],
    vars: &mut Vec<usize>,
    clauses: &mut Vec<usize>,
    out: &mut Vec<Cycle>,
) {
    for &(w, a) in &adj[u] {
        if clauses.last() == Some(&a) {
            continue;
        }
        if w == s {
            if !clauses.is_empty() && clauses[0] < a {
                let mut cl = clauses.clone();
                cl.push(a);
                out.push(Cycle {
                    vars: vars.clone(),
                    clauses: cl,
                });
            }
            continue;
        }
        if w < s || on_path[w] {
            continue;
        }
        on_path[w] = true;
        vars.push(w);
        clauses.push(a);
        extend(s, w, adj, on_path, vars, clauses, out);
        clauses.pop();
        vars.pop();
        on_path[w] = false;
    }
}

pub fn is_toxic(f: &XorsatFormula, cycle: &Cycle) -> bool {
    cycle
        .clauses
        .iter()
        .fold(false, |acc, &a| acc ^ f.clauses()[a].rhs())
}

pub fn find_toxic_cycles(f: &XorsatFormula) -> Vec<Cycle> {
    binary_cycles(f)
        .into_iter()
        .filter(|c| is_toxic(f, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn binary(n: usize, edges: &[(u32, u32, bool)]) -> XorsatFormula {
        XorsatFormula::new(
            n,
            2,
            edges
                .iter()
                .map(|&(u, v, b)| Clause::new(vec![u, v], b).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parallel_pair_with_different_rhs() {
        let f = binary(2, &[(0, 1, true), (0, 1, false)]);
        let t = find_toxic_cycles(&f);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].clauses, vec![0, 1]);
    }

    #[test]
    fn even_triangle_is_harmless() {
        let f = binary(3, &[(0, 1, false), (1, 2, false), (0, 2, false)]);
        assert_eq!(binary_cycles(&f).len(), 1);
        assert!(find_toxic_cycles(&f).is_empty());
    }

    #[test]
    fn counts_cycles_of_k4() {
        let mut e = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                e.push((u, v, false));
            }
        }
        // K4 has 4 triangles and 3 four-cycles.
        assert_eq!(binary_cycles(&binary(4, &e)).len(), 7);
    }

    #[test]
    fn ignores_wider_clauses() {
        let f = XorsatFormula::new(
            3,
            0,
            vec![
                Clause::new(vec![0, 1, 2], true).unwrap(),
                Clause::new(vec![0, 1], true).unwrap(),
            ],
        )
        .unwrap();
        assert!(binary_cycles(&f).is_empty());
    }

    /// With explicit literal signs, a cycle is toxic iff the number of
    /// negations has the opposite parity to its length.
    #[test]
    fn sign_criterion_agrees_with_rhs_sum() {
        for len in 2..=5u32 {
            for negs in 0u32..(1 << (2 * len)) {
                let mut clauses = Vec::new();
                let mut total_neg = 0;
                for i in 0..len {
                    let (u, v) = (i, (i + 1) % len);
                    let (nu, nv) = (negs >> (2 * i) & 1 == 1, negs >> (2 * i + 1) & 1 == 1);
                    total_neg += u32::from(nu) + u32::from(nv);
                    clauses.push(Clause::from_literals(&[(u, nu), (v, nv)]).unwrap());
                }
                let f = XorsatFormula::new(len as usize, 2, clauses).unwrap();
                let sign_toxic = (total_neg % 2 == 1) == (len % 2 == 0);
                assert_eq!(!find_toxic_cycles(&f).is_empty(), sign_toxic);
            }
        }
    }
}
