//! Rank, consistency and uniform solutions of large sparse systems.
//!
//! Peeling removes columns of degree one together with their row, and
//! unit rows together with their column, until neither remains. Whatever is
//! left (the core) is eliminated densely. Below the 2-core threshold the
//! core of a random system is empty or tiny, so this runs in near linear
//! time where dense elimination would not.

use std::collections::VecDeque;

use rand::Rng;

use super::{BitVec, Echelon};
use crate::formula::XorsatFormula;

/// Outcome of a sparse analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseReport {
    pub n: usize,
    pub rank: usize,
    pub consistent: bool,
    /// Rows remaining after peeling.
    pub core_rows: usize,
    /// A uniform random solution, when requested and consistent.
    pub solution: Option<Vec<bool>>,
}

impl SparseReport {
    pub fn nullity(&self) -> usize {
        self.n - self.rank
    }
}

/// Sparse F₂ system given by row supports.
#[derive(Clone, Debug, Default)]
pub struct SparseSystem {
    n: usize,
    rows: Vec<Vec<u32>>,
    rhs: Vec<bool>,
}

impl SparseSystem {
    pub fn new(n: usize) -> Self {
        SparseSystem {
            n,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn from_formula(f: &XorsatFormula) -> Self {
        let mut s = SparseSystem::new(f.num_vars());
        for c in f.clauses() {
            s.push(c.vars().to_vec(), c.rhs());
        }
        s
    }

    /// Adds a row; `vars` must be distinct and below `n`.
    pub fn push(&mut self, vars: Vec<u32>, rhs: bool) {
        debug_assert!(vars.iter().all(|&v| (v as usize) < self.n));
        self.rows.push(vars);
        self.rhs.push(rhs);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Rank and consistency.
    pub fn analyze(&self) -> SparseReport {
        self.peel().report(self.n, None)
    }

    /// Rank, consistency and, if consistent, a uniformly random solution.
    pub fn solve<R: Rng + ?Sized>(&self, rng: &mut R) -> SparseReport {
        let p = self.peel();
        let solution = p.consistent.then(|| self.sample(&p, rng));
        p.report(self.n, solution)
    }

    /// `forced[x]` iff `x` takes the same value in every solution, i.e. the
    /// unit vector at `x` lies in the row space. Independent of the
    /// right-hand side.
    ///
    /// Tests `x` against 128 uniform kernel vectors: a variable that is not
    /// forced is reported as forced with probability `2^{-128}`.
    pub fn forced_mask<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let p = self.peel();
        let a = self.kernel_lanes(&p, rng);
        let b = self.kernel_lanes(&p, rng);
        a.iter().zip(&b).map(|(&x, &y)| x | y == 0).collect()
    }

    fn peel(&self) -> Peeled {
        let n = self.n;
        let m = self.rows.len();
        let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut row_live = vec![0u32; m];
        for (r, vars) in self.rows.iter().enumerate() {
            for &v in vars {
                col_rows[v as usize].push(r as u32);
            }
            row_live[r] = vars.len() as u32;
        }
        let mut col_deg: Vec<u32> = col_rows.iter().map(|rs| rs.len() as u32).collect();
        let mut row_alive = vec![true; m];
        let mut col_alive = vec![true; n];
        // Columns fixed by unit rows; their value is known immediately.
        let mut unit_value: Vec<Option<bool>> = vec![None; n];
        let mut rank = 0usize;
        let mut consistent = true;
        // Degree-one columns, each solved from its row once everything
        // else is known.
        let mut deferred: Vec<(usize, usize)> = Vec::new();

        let mut col_queue: VecDeque<u32> = (0..n as u32)
            .filter(|&c| col_deg[c as usize] == 1)
            .collect();
        let mut row_queue: VecDeque<u32> = (0..m as u32)
            .filter(|&r| row_live[r as usize] <= 1)
            .collect();

        let live_col = |r: usize, col_alive: &[bool]| {
            self.rows[r]
                .iter()
                .copied()
                .find(|&v| col_alive[v as usize])
                .map(|v| v as usize)
        };

        loop {
            if let Some(r) = row_queue.pop_front() {
                let r = r as usize;
                if !row_alive[r] {
                    continue;
                }
                match row_live[r] {
                    0 => {
                        row_alive[r] = false;
                        let mut b = self.rhs[r];
                        for &v in &self.rows[r] {
                            b ^= unit_value[v as usize].expect("dead column without value");
                        }
                        if b {
                            consistent = false;
                        }
                    }
                    1 => {
                        let c = live_col(r, &col_alive).expect("unit row without live column");
                        let mut b = self.rhs[r];
                        for &v in &self.rows[r] {
                            if v as usize != c {
                                b ^= unit_value[v as usize].expect("dead column without value");
                            }
                        }
                        row_alive[r] = false;
                        rank += 1;
                        col_alive[c] = false;
                        unit_value[c] = Some(b);
                        for &r2 in &col_rows[c] {
                            let r2 = r2 as usize;
                            if row_alive[r2] {
                                row_live[r2] -= 1;
                                if row_live[r2] <= 1 {
                                    row_queue.push_back(r2 as u32);
                                }
                            }
                        }
                    }
                    _ => {}
                }
                continue;
            }
            if let Some(c) = col_queue.pop_front() {
                let c = c as usize;
                if !col_alive[c] || col_deg[c] != 1 {
                    continue;
                }
                let r = col_rows[c]
                    .iter()
                    .map(|&r| r as usize)
                    .find(|&r| row_alive[r])
                    .expect("degree-one column without live row");
                row_alive[r] = false;
                col_alive[c] = false;
                rank += 1;
                deferred.push((r, c));
                for &v in &self.rows[r] {
                    let v = v as usize;
                    if col_alive[v] {
                        col_deg[v] -= 1;
                        if col_deg[v] == 1 {
                            col_queue.push_back(v as u32);
                        }
                    }
                }
                continue;
            }
            break;
        }

        // Dense elimination of the core.
        let core_rows: Vec<usize> = (0..m).filter(|&r| row_alive[r]).collect();
        let mut core_cols: Vec<usize> = Vec::new();
        let mut core_index = vec![u32::MAX; n];
        for &r in &core_rows {
            for &v in &self.rows[r] {
                let v = v as usize;
                if col_alive[v] && core_index[v] == u32::MAX {
                    core_index[v] = core_cols.len() as u32;
                    core_cols.push(v);
                }
            }
        }
        let mut core = Echelon::new(core_cols.len());
        for &r in &core_rows {
            let mut b = self.rhs[r];
            let mut row = BitVec::zeros(core_cols.len());
            for &v in &self.rows[r] {
                let v = v as usize;
                if col_alive[v] {
                    row.set(core_index[v] as usize, true);
                } else {
                    b ^= unit_value[v].expect("dead core column without value");
                }
            }
            core.push_row(&row, b);
        }
        rank += core.rank();
        consistent &= core.is_consistent();
        Peeled {
            rank,
            consistent,
            core_rows: core_rows.len(),
            col_alive,
            unit_value,
            deferred,
            core_cols,
            core_index,
            core,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, p: &Peeled, rng: &mut R) -> Vec<bool> {
        let mut value: Vec<Option<bool>> = p.unit_value.clone();
        let core_sol = p.core.sample_solution(rng).expect("consistent core");
        for (i, &c) in p.core_cols.iter().enumerate() {
            value[c] = Some(core_sol[i]);
        }
        for c in 0..self.n {
            if p.col_alive[c] && value[c].is_none() {
                value[c] = Some(rng.gen());
            }
        }
        for &(row, col) in p.deferred.iter().rev() {
            let mut b = self.rhs[row];
            for &v in &self.rows[row] {
                if v as usize != col {
                    b ^= value[v as usize].expect("unsolved column");
                }
            }
            value[col] = Some(b);
        }
        value.into_iter().map(|v| v.expect("unsolved column")).collect()
    }

    /// 64 independent uniform kernel vectors, one per bit lane.
    fn kernel_lanes<R: Rng + ?Sized>(&self, p: &Peeled, rng: &mut R) -> Vec<u64> {
        let mut lanes = vec![0u64; self.n];
        for b in p.core.kernel_basis() {
            let mask: u64 = rng.gen();
            for i in b.ones() {
                lanes[p.core_cols[i]] ^= mask;
            }
        }
        for c in 0..self.n {
            if p.col_alive[c] && p.core_index[c] == u32::MAX {
                lanes[c] = rng.gen();
            }
        }
        for &(row, col) in p.deferred.iter().rev() {
            lanes[col] = self.rows[row]
                .iter()
                .filter(|&&v| v as usize != col)
                .fold(0, |acc, &v| acc ^ lanes[v as usize]);
        }
        lanes
    }
}

/// State left by peeling.
struct Peeled {
    rank: usize,
    consistent: bool,
    core_rows: usize,
    col_alive: Vec<bool>,
    /// Values of columns removed through unit rows.
    unit_value: Vec<Option<bool>>,
    /// `(row, column)` pairs removed as degree-one columns, in order.
    deferred: Vec<(usize, usize)>,
    core_cols: Vec<usize>,
    /// Position in `core_cols`, `u32::MAX` outside the core.
    core_index: Vec<u32>,
    core: Echelon,
}

impl Peeled {
    fn report(&self, n: usize, solution: Option<Vec<bool>>) -> SparseReport {
        SparseReport {
            n,
            rank: self.rank,
            consistent: self.consistent,
            core_rows: self.core_rows,
            solution,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::{CheckSystem, Echelon};
    use crate::rng::{self, Purpose};

    fn random_sparse(n: usize, m: usize, seed: u64) -> SparseSystem {
        let mut r = rng::stream(seed, Purpose::Instance, 7);
        let mut s = SparseSystem::new(n);
        for _ in 0..m {
            let w = r.gen_range(1..=4.min(n));
            let vars = rand::seq::index::sample(&mut r, n, w)
                .into_iter()
                .map(|v| v as u32)
                .collect();
            s.push(vars, r.gen());
        }
        s
    }

    fn dense(s: &SparseSystem) -> Echelon {
        let mut sys = CheckSystem::new(s.n);
        for (vars, &b) in s.rows.iter().zip(&s.rhs) {
            sys.push(BitVec::from_indices(s.n, vars.iter().map(|&v| v as usize)), b)
                .unwrap();
        }
        Echelon::from_system(&sys)
    }

    #[test]
    fn matches_dense_elimination() {
        for seed in 0..300 {
            let mut r = rng::stream(seed, Purpose::Instance, 8);
            let n = r.gen_range(1..40);
            let m = r.gen_range(0..50);
            let s = random_sparse(n, m, seed);
            let d = dense(&s);
            let mut sr = rng::stream(seed, Purpose::Solution, 0);
            let rep = s.solve(&mut sr);
            assert_eq!(rep.rank, d.rank(), "seed {seed}");
            assert_eq!(rep.consistent, d.is_consistent(), "seed {seed}");
            assert_eq!(s.analyze().rank, rep.rank);
            if d.is_consistent() {
                let want: Vec<bool> = (0..n).map(|x| d.forced_value(x).is_some()).collect();
                assert_eq!(s.forced_mask(&mut sr), want, "seed {seed}");
            }
            if let Some(x) = rep.solution {
                for (vars, &b) in s.rows.iter().zip(&s.rhs) {
                    let p = vars.iter().fold(false, |a, &v| a ^ x[v as usize]);
                    assert_eq!(p, b, "seed {seed}");
                }
            } else {
                assert!(!rep.consistent);
            }
        }
    }

    #[test]
    fn solutions_are_uniform() {
        // x0 + x1 = 1, x1 + x2 + x3 = 0: 4 solutions.
        let mut s = SparseSystem::new(4);
        s.push(vec![0, 1], true);
        s.push(vec![1, 2, 3], false);
        let mut r = rng::stream(5, Purpose::Solution, 0);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..8000 {
            *counts.entry(s.solve(&mut r).solution.unwrap()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 4);
        for c in counts.values() {
            assert!((*c as f64 / 8000.0 - 0.25).abs() < 0.03, "{counts:?}");
        }
    }

    #[test]
    fn subcritical_random_formula_has_empty_core() {
        let f = XorsatFormula::generate_random(20_000, 2.0, 3, 4).unwrap();
        let rep = SparseSystem::from_formula(&f).analyze();
        assert_eq!(rep.rank, f.num_clauses());
        assert!(rep.consistent);
        assert!(rep.core_rows < 50, "{}", rep.core_rows);
    }
}
