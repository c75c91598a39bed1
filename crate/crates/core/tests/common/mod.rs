#![allow(dead_code)]

use rand::Rng;
use xorsat::{Clause, PartialAssignment, Trit, XorsatFormula};

/// Rooted trees on `n` vertices as parent arrays (`parent[0] = usize::MAX`),
/// one per canonical level sequence. Every free tree appears at least once.
pub fn rooted_trees(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    loop {
        out.push(parents(&level));
        let Some(p) = (0..n).rev().find(|&i| level[i] > 2) else {
            break;
        };
        let q = (0..p).rev().find(|&i| level[i] == level[p] - 1).unwrap();
        for i in p..n {
            level[i] = level[i - (p - q)];
        }
    }
    out
}

fn parents(level: &[usize]) -> Vec<usize> {
    (0..level.len())
        .map(|i| {
            (0..i)
                .rev()
                .find(|&j| level[j] + 1 == level[i])
                .unwrap_or(usize::MAX)
        })
        .collect()
}

/// Edges of a tree given by its parent array.
pub fn tree_edges(parent: &[usize]) -> Vec<(usize, usize)> {
    (1..parent.len()).map(|i| (parent[i], i)).collect()
}

/// Binary formula on `n` variables with the given edges, relabelled by
/// `perm`, clause order shuffled by the caller.
pub fn binary_formula(n: usize, edges: &[(usize, usize)], perm: &[usize], rhs: &[bool]) -> XorsatFormula {
    let clauses = edges
        .iter()
        .zip(rhs)
        .map(|(&(u, v), &r)| Clause::new(vec![perm[u] as u32, perm[v] as u32], r).unwrap())
        .collect();
    XorsatFormula::new(n, 2, clauses).unwrap()
}

/// All solutions by enumeration, as bit masks over the variables.
pub fn brute_force_solutions(f: &XorsatFormula) -> Vec<u32> {
    let n = f.num_vars();
    assert!(n <= 20);
    let rows: Vec<(u32, bool)> = f
        .clauses()
        .iter()
        .map(|c| (c.vars().iter().fold(0u32, |m, &v| m | 1 << v), c.rhs()))
        .collect();
    (0..1u32 << n)
        .filter(|&s| rows.iter().all(|&(m, r)| ((s & m).count_ones() & 1 == 1) == r))
        .collect()
}

/// Marginal of each variable over the solutions; `None` if there are none.
pub fn brute_force_marginals(n: usize, sols: &[u32]) -> Option<Vec<Trit>> {
    if sols.is_empty() {
        return None;
    }
    Some(
        (0..n)
            .map(|x| {
                let ones = sols.iter().filter(|&&s| s >> x & 1 == 1).count();
                if ones == 0 {
                    Trit::Zero
                } else if ones == sols.len() {
                    Trit::One
                } else {
                    Trit::Half
                }
            })
            .collect(),
    )
}

/// Variables that are zero in every kernel vector, by enumeration of the
/// homogeneous system.
pub fn brute_force_null_variables(f: &XorsatFormula) -> Vec<usize> {
    let homogeneous = XorsatFormula::new(
        f.num_vars(),
        f.k(),
        f.clauses()
            .iter()
            .map(|c| Clause::new(c.vars().to_vec(), false).unwrap())
            .collect(),
    )
    .unwrap();
    let kernel = brute_force_solutions(&homogeneous);
    (0..f.num_vars())
        .filter(|&x| kernel.iter().all(|&s| s >> x & 1 == 0))
        .collect()
}

/// A random formula with a prefix of one of its solutions substituted, so
/// that unit clauses are present. Falls back to the plain formula when it
/// is unsatisfiable.
pub fn decimated_instance<R: Rng>(n: usize, d: f64, k: usize, seed: u64, rng: &mut R) -> XorsatFormula {
    let f = XorsatFormula::generate_random(n, d, k, seed).unwrap();
    let e = xorsat::f2::Echelon::from_formula(&f);
    match e.sample_solution(rng) {
        Ok(sol) => {
            let t = rng.gen_range(0..=n / 2);
            f.substitute(&PartialAssignment::prefix(n, &sol[..t])).formula
        }
        Err(_) => f,
    }
}
