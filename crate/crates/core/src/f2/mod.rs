//! Linear algebra over F₂.
//!
//! [`CheckSystem`] is the augmented matrix `(A_F | y_F)` of a formula.
//! [`Echelon`] keeps a system in reduced row-echelon form and accepts new
//! rows incrementally; [`reduce`] eliminates from scratch. Both produce the
//! same (unique) RREF. [`sparse`] handles large sparse systems by peeling.

mod bitvec;
pub mod sparse;

use std::fmt::Write as _;

use rand::Rng;

pub use bitvec::BitVec;
pub use sparse::{SparseReport, SparseSystem};
use bitvec::WORD;

use crate::error::{Error, Result};
use crate::formula::XorsatFormula;
use crate::trit::Trit;

/// Augmented F₂ system with `n` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckSystem {
    n: usize,
    rows: Vec<BitVec>,
    rhs: Vec<bool>,
}

impl CheckSystem {
    pub fn new(n: usize) -> Self {
        CheckSystem {
            n,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// One row per clause with ones at the clause's variables.
    pub fn from_formula(f: &XorsatFormula) -> Self {
        let mut sys = CheckSystem::new(f.num_vars());
        for c in f.clauses() {
            sys.rows.push(BitVec::from_indices(
                f.num_vars(),
                c.vars().iter().map(|&v| v as usize),
            ));
            sys.rhs.push(c.rhs());
        }
        sys
    }

    pub fn push(&mut self, row: BitVec, rhs: bool) -> Result<()> {
        if row.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "row width {} != {}",
                row.len(),
                self.n
            )));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn num_cols(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn rhs(&self) -> &[bool] {
        &self.rhs
    }
}

/// Summary of a reduced system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub n: usize,
    pub rank: usize,
    /// One vector per free column, free columns in increasing order.
    pub basis: Vec<BitVec>,
    /// Free columns set to zero; `None` when the system is inconsistent.
    pub particular: Option<Vec<bool>>,
    /// Columns that vanish in every kernel vector.
    pub null_set: Vec<usize>,
}

impl KernelReport {
    pub fn nullity(&self) -> usize {
        self.n - self.rank
    }

    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }
}

const NO_ROW: u32 = u32::MAX;

/// Outcome of [`Echelon::push_row`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PushOutcome {
    /// The row added a new pivot.
    Independent,
    /// The row was in the row space and agreed with the system.
    Redundant,
    /// The row was in the row space with a contradicting right-hand side.
    Inconsistent,
}

/// A system kept in reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    n: usize,
    rows: Vec<BitVec>,
    rhs: Vec<bool>,
    pivots: Vec<usize>,
    row_of_col: Vec<u32>,
    consistent: bool,
}

impl Echelon {
    pub fn new(n: usize) -> Self {
        Echelon {
            n,
            rows: Vec::new(),
            rhs: Vec::new(),
            pivots: Vec::new(),
            row_of_col: vec![NO_ROW; n],
            consistent: true,
        }
    }

    /// Column-sweep Gauss–Jordan elimination: for each column in turn the
    /// lowest-index remaining row with a one there becomes the pivot row.
    pub fn from_system(sys: &CheckSystem) -> Self {
        let n = sys.n;
        let mut rows = sys.rows.clone();
        let mut rhs = sys.rhs.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, p);
            rhs.swap(r, p);
            let (head, tail) = rows.split_at_mut(r);
            let (pivot_row, rest) = tail.split_first_mut().unwrap();
            let w = col / WORD;
            for (i, row) in head.iter_mut().chain(rest.iter_mut()).enumerate() {
                if row.get(col) {
                    row.xor_from(pivot_row, w);
                    let i = if i < r { i } else { i + 1 };
                    rhs[i] ^= rhs[r];
                }
            }
            pivots.push(col);
            r += 1;
        }
        let consistent = rhs[r..].iter().all(|&b| !b);
        rows.truncate(r);
        rhs.truncate(r);
        let mut row_of_col = vec![NO_ROW; n];
        for (i, &p) in pivots.iter().enumerate() {
            row_of_col[p] = i as u32;
        }
        Echelon {
            n,
            rows,
            rhs,
            pivots,
            row_of_col,
            consistent,
        }
    }

    pub fn from_formula(f: &XorsatFormula) -> Self {
        let mut e = Echelon::new(f.num_vars());
        for c in f.clauses() {
            e.push_sparse(c.vars().iter().map(|&v| v as usize), c.rhs());
        }
        e
    }

    /// Adds one equation, restoring reduced form. The result equals a
    /// from-scratch reduction of the enlarged system.
    pub fn push_row(&mut self, row: &BitVec, rhs: bool) -> PushOutcome {
        assert_eq!(row.len(), self.n, "row width mismatch");
        let mut r = row.clone();
        let mut b = rhs;
        // Pivot rows vanish on every other pivot column, so one pass over the
        // original bits clears all pivot columns.
        for c in row.ones() {
            let i = self.row_of_col[c];
            if i != NO_ROW {
                r.xor_assign(&self.rows[i as usize]);
                b ^= self.rhs[i as usize];
            }
        }
        self.insert_reduced(r, b)
    }

    /// [`push_row`](Self::push_row) for a row given by its support.
    pub fn push_sparse(&mut self, ones: impl IntoIterator<Item = usize>, rhs: bool) -> PushOutcome {
        let row = BitVec::from_indices(self.n, ones);
        self.push_row(&row, rhs)
    }

    /// Adds the unit equation `x = value`.
    pub fn push_unit(&mut self, x: usize, value: bool) -> PushOutcome {
        let mut r = BitVec::zeros(self.n);
        r.set(x, true);
        let mut b = value;
        let i = self.row_of_col[x];
        if i != NO_ROW {
            r.xor_assign(&self.rows[i as usize]);
            b ^= self.rhs[i as usize];
        }
        self.insert_reduced(r, b)
    }

    fn insert_reduced(&mut self, r: BitVec, b: bool) -> PushOutcome {
        let Some(p) = r.first_one() else {
            if b {
                self.consistent = false;
                return PushOutcome::Inconsistent;
            }
            return PushOutcome::Redundant;
        };
        let w = p / WORD;
        for (row, rhs) in self.rows.iter_mut().zip(self.rhs.iter_mut()) {
            if row.get(p) {
                row.xor_from(&r, w);
                *rhs ^= b;
            }
        }
        self.row_of_col[p] = self.rows.len() as u32;
        self.rows.push(r);
        self.rhs.push(b);
        self.pivots.push(p);
        PushOutcome::Independent
    }

    pub fn num_cols(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn nullity(&self) -> usize {
        self.n - self.rank()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub fn is_pivot(&self, x: usize) -> bool {
        self.row_of_col[x] != NO_ROW
    }

    /// `Some(b)` iff every kernel vector vanishes at `x` (then every solution
    /// has `x = b`).
    pub fn forced_value(&self, x: usize) -> Option<bool> {
        let i = self.row_of_col[x];
        if i == NO_ROW {
            return None;
        }
        let row = &self.rows[i as usize];
        (row.count_ones() == 1).then_some(self.rhs[i as usize])
    }

    /// Exact marginal `P[σ(x) = 1]` under the uniform distribution on
    /// solutions; `None` when there are no solutions.
    pub fn marginal(&self, x: usize) -> Option<Trit> {
        if !self.consistent {
            return None;
        }
        Some(self.forced_value(x).map_or(Trit::Half, Trit::forced))
    }

    pub fn null_variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .pivots
            .iter()
            .zip(&self.rows)
            .filter(|(_, row)| row.count_ones() == 1)
            .map(|(&p, _)| p)
            .collect();
        v.sort_unstable();
        v
    }

    /// Rows and right-hand sides sorted by pivot column.
    pub fn canonical_rows(&self) -> Vec<(BitVec, bool)> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_unstable_by_key(|&i| self.pivots[i]);
        order
            .into_iter()
            .map(|i| (self.rows[i].clone(), self.rhs[i]))
            .collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.n).filter(|&c| !self.is_pivot(c)).collect()
    }

    pub fn kernel_basis(&self) -> Vec<BitVec> {
        self.free_columns()
            .into_iter()
            .map(|j| {
                let mut v = BitVec::zeros(self.n);
                v.set(j, true);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if row.get(j) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    pub fn particular_solution(&self) -> Option<Vec<bool>> {
        if !self.consistent {
            return None;
        }
        let mut x = vec![false; self.n];
        for (&p, &b) in self.pivots.iter().zip(&self.rhs) {
            x[p] = b;
        }
        Some(x)
    }

    /// Uniform random solution: free columns get fair coins and pivot
    /// columns follow.
    pub fn sample_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<bool>> {
        if !self.consistent {
            return Err(Error::Unsatisfiable);
        }
        let mut free = BitVec::zeros(self.n);
        for c in 0..self.n {
            if !self.is_pivot(c) && rng.gen::<bool>() {
                free.set(c, true);
            }
        }
        let mut x = free.to_bools();
        for ((row, &p), &b) in self.rows.iter().zip(&self.pivots).zip(&self.rhs) {
            let mut acc = b;
            for c in row.ones() {
                if c != p {
                    acc ^= free.get(c);
                }
            }
            x[p] = acc;
        }
        Ok(x)
    }

    pub fn report(&self) -> KernelReport {
        KernelReport {
            n: self.n,
            rank: self.rank(),
            basis: self.kernel_basis(),
            particular: self.particular_solution(),
            null_set: self.null_variables(),
        }
    }

    /// Text bitmap of the reduced rows in pivot order, one row per line with
    /// the right-hand side after a bar.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (row, b) in self.canonical_rows() {
            for c in 0..self.n {
                out.push(if row.get(c) { '1' } else { '.' });
            }
            let _ = writeln!(out, " | {}", u8::from(b));
        }
        out
    }
}

/// Scratch reduction of a system.
pub fn reduce(sys: &CheckSystem) -> KernelReport {
    Echelon::from_system(sys).report()
}

/// Coordinates that vanish on the whole kernel, read off the kernel basis.
pub fn null_variables(sys: &CheckSystem) -> Vec<usize> {
    let report = reduce(sys);
    let mut union = BitVec::zeros(sys.n);
    for b in &report.basis {
        for c in b.ones() {
            union.set(c, true);
        }
    }
    (0..sys.n).filter(|&c| !union.get(c)).collect()
}

/// Exact marginal of `x` in `f`; `None` if `f` is unsatisfiable.
pub fn exact_marginal(f: &XorsatFormula, x: usize) -> Option<Trit> {
    Echelon::from_formula(f).marginal(x)
}

/// Particular solution plus a uniform combination of kernel basis vectors.
pub fn sample_uniform_solution<R: Rng + ?Sized>(
    report: &KernelReport,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let mut x = BitVec::from_bools(report.particular.as_ref().ok_or(Error::Unsatisfiable)?);
    for b in &report.basis {
        if rng.gen::<bool>() {
            x.xor_assign(b);
        }
    }
    Ok(x.to_bools())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;
    use crate::rng::{self, Purpose};
    use proptest::prelude::*;
    use rand::Rng;

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

    fn solutions(f: &XorsatFormula) -> Vec<Vec<bool>> {
        let n = f.num_vars();
        (0u32..1 << n)
            .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| f.is_satisfied_by(s))
            .collect()
    }

    fn random_system(n: usize, m: usize, density: f64, seed: u64) -> CheckSystem {
        let mut r = rng::stream(seed, Purpose::Instance, 0);
        let mut sys = CheckSystem::new(n);
        for _ in 0..m {
            let row = BitVec::from_indices(n, (0..n).filter(|_| r.gen_bool(density)));
            sys.push(row, r.gen()).unwrap();
        }
        sys
    }

    #[test]
    fn empty_system() {
        let sys = CheckSystem::from_formula(&XorsatFormula::empty(4));
        assert_eq!(sys.num_rows(), 0);
        let rep = reduce(&CheckSystem::new(5));
        assert_eq!((rep.rank, rep.nullity()), (0, 5));
        assert!(rep.null_set.is_empty());
    }

    #[test]
    fn single_row() {
        let f = formula(4, &[(&[0, 1, 2], true)]);
        let sys = CheckSystem::from_formula(&f);
        assert_eq!(sys.rows()[0].to_bools(), vec![true, true, true, false]);
        assert_eq!(sys.rhs(), &[true]);
        let rep = reduce(&CheckSystem::from_formula(&formula(3, &[(&[0, 1, 2], false)])));
        assert_eq!((rep.rank, rep.nullity()), (1, 2));
        assert!(rep.null_set.is_empty());
    }

    #[test]
    fn substituted_system_matches_manual_fold() {
        let f = formula(4, &[(&[0, 1, 2], true), (&[1, 3], false), (&[0, 3], true)]);
        let sigma = crate::formula::PartialAssignment::prefix(4, &[true]);
        let sys = CheckSystem::from_formula(&f.substitute(&sigma).formula);
        // x1 = 1 folds into the first and third rows.
        let manual = {
            let mut s = CheckSystem::new(4);
            s.push(BitVec::from_indices(4, [1, 2]), false).unwrap();
            s.push(BitVec::from_indices(4, [1, 3]), false).unwrap();
            s.push(BitVec::from_indices(4, [3]), false).unwrap();
            s
        };
        assert_eq!(sys, manual);
    }

    #[test]
    fn full_rank_chain() {
        let f = formula(2, &[(&[0], true), (&[0, 1], true)]);
        let rep = reduce(&CheckSystem::from_formula(&f));
        assert_eq!((rep.rank, rep.nullity()), (2, 0));
        assert_eq!(rep.particular, Some(vec![true, false]));
        assert_eq!(rep.null_set, vec![0, 1]);
        assert_eq!(solutions(&f), vec![vec![true, false]]);
    }

    #[test]
    fn null_variable_examples() {
        let mut sq = CheckSystem::new(3);
        for i in 0..3 {
            sq.push(BitVec::from_indices(3, 0..=i), false).unwrap();
        }
        assert_eq!(null_variables(&sq), vec![0, 1, 2]);
        assert!(null_variables(&CheckSystem::new(3)).is_empty());
        let chain = formula(3, &[(&[0, 1], false), (&[1, 2], false)]);
        let rep = reduce(&CheckSystem::from_formula(&chain));
        assert_eq!(rep.basis, vec![BitVec::from_indices(3, [0, 1, 2])]);
        assert!(null_variables(&CheckSystem::from_formula(&chain)).is_empty());
    }

    #[test]
    fn exact_marginal_examples() {
        assert_eq!(exact_marginal(&formula(3, &[(&[0, 1, 2], true)]), 0), Some(Trit::Half));
        assert_eq!(exact_marginal(&formula(1, &[(&[0], true)]), 0), Some(Trit::One));
        assert_eq!(
            exact_marginal(&formula(2, &[(&[0, 1], true), (&[0, 1], false)]), 0),
            None
        );
    }

    #[test]
    fn sampling_unique_solution() {
        let f = formula(2, &[(&[0], true), (&[0, 1], true)]);
        let rep = reduce(&CheckSystem::from_formula(&f));
        let mut r = rng::stream(1, Purpose::Solution, 0);
        for _ in 0..20 {
            assert_eq!(sample_uniform_solution(&rep, &mut r).unwrap(), vec![true, false]);
        }
        let bad = formula(1, &[(&[0], true), (&[0], false)]);
        assert!(matches!(
            sample_uniform_solution(&reduce(&CheckSystem::from_formula(&bad)), &mut r),
            Err(Error::Unsatisfiable)
        ));
    }

    #[test]
    fn sampling_two_solutions_is_fair() {
        let f = formula(2, &[(&[0, 1], false)]);
        let rep = reduce(&CheckSystem::from_formula(&f));
        let mut r = rng::stream(2, Purpose::Solution, 0);
        let zeros = (0..10_000)
            .filter(|_| sample_uniform_solution(&rep, &mut r).unwrap() == vec![false, false])
            .count();
        assert!((zeros as f64 / 1e4 - 0.5).abs() < 0.02, "{zeros}");
    }

    #[test]
    fn sampling_full_cube() {
        let rep = reduce(&CheckSystem::new(3));
        let mut r = rng::stream(3, Purpose::Solution, 0);
        let mut counts = [0usize; 8];
        for _ in 0..1000 {
            let s = sample_uniform_solution(&rep, &mut r).unwrap();
            counts[s.iter().enumerate().map(|(i, &b)| usize::from(b) << i).sum::<usize>()] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1000.0 - 0.125).abs() < 0.04, "{counts:?}");
        }
    }

    #[test]
    fn push_redundant_and_unit() {
        let f = formula(3, &[(&[0, 1], false), (&[1, 2], true)]);
        let mut e = Echelon::from_formula(&f);
        assert_eq!(e.push_sparse([0, 2], true), PushOutcome::Redundant);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.push_sparse([0, 2], false), PushOutcome::Inconsistent);
        assert!(!e.is_consistent());

        let mut e = Echelon::from_formula(&f);
        assert_eq!(e.forced_value(1), None);
        let before = e.nullity();
        assert_eq!(e.push_unit(1, true), PushOutcome::Independent);
        assert_eq!(e.nullity(), before - 1);
        assert_eq!(e.particular_solution(), Some(vec![true, true, false]));
    }

    #[test]
    fn dump_lists_rows_in_pivot_order() {
        let e = Echelon::from_formula(&formula(3, &[(&[1, 2], true), (&[0, 1], false)]));
        assert_eq!(e.dump(), "1.1 | 1\n.11 | 1\n");
    }

    #[test]
    fn push_sequences_match_scratch_reduction() {
        for seed in 0..200u64 {
            let mut r = rng::stream(seed, Purpose::Instance, 1);
            let n = r.gen_range(1..=64);
            let m = r.gen_range(0..=80);
            let sys = random_system(n, m, r.gen_range(0.02..0.3), seed);
            let mut inc = Echelon::new(n);
            for (row, &b) in sys.rows().iter().zip(sys.rhs()) {
                inc.push_row(row, b);
            }
            let scratch = Echelon::from_system(&sys);
            assert_eq!(inc.rank(), scratch.rank());
            assert_eq!(inc.is_consistent(), scratch.is_consistent());
            assert_eq!(inc.null_variables(), scratch.null_variables());
            let rows = |e: &Echelon| e.canonical_rows().into_iter().map(|(r, _)| r).collect::<Vec<_>>();
            assert_eq!(rows(&inc), rows(&scratch));
            // Right-hand sides only carry meaning for a consistent system.
            if scratch.is_consistent() {
                assert_eq!(inc.canonical_rows(), scratch.canonical_rows());
            }
        }
    }

    #[test]
    fn elimination_is_deterministic() {
        let sys = random_system(40, 30, 0.1, 9);
        assert_eq!(reduce(&sys), reduce(&sys));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn brute_force_oracle(n in 1usize..=10, m in 0usize..=12, density in 0.05f64..0.6, seed in any::<u64>()) {
            let sys = random_system(n, m, density, seed);
            let mut clauses = Vec::new();
            for (row, &b) in sys.rows().iter().zip(sys.rhs()) {
                let vars: Vec<u32> = row.ones().map(|c| c as u32).collect();
                if !vars.is_empty() {
                    clauses.push(Clause::new(vars, b).unwrap());
                }
            }
            let zero_row_inconsistent = sys.rows().iter().zip(sys.rhs()).any(|(r, &b)| r.is_zero() && b);
            let f = XorsatFormula::new(n, 0, clauses).unwrap();
            let sols = if zero_row_inconsistent { Vec::new() } else { solutions(&f) };
            let rep = reduce(&sys);
            prop_assert_eq!(rep.rank + rep.nullity(), n);
            prop_assert_eq!(rep.is_consistent(), !sols.is_empty());
            if rep.is_consistent() {
                prop_assert_eq!(sols.len(), 1usize << rep.nullity());
                let p = rep.particular.clone().unwrap();
                prop_assert!(sols.contains(&p));
                let e = Echelon::from_system(&sys);
                for x in 0..n {
                    let ones = sols.iter().filter(|s| s[x]).count();
                    let expect = if ones == 0 { Trit::Zero } else if ones == sols.len() { Trit::One } else { Trit::Half };
                    prop_assert_eq!(e.marginal(x), Some(expect));
                    prop_assert_eq!(rep.null_set.contains(&x), expect != Trit::Half);
                }
            }
            for b in &rep.basis {
                for row in sys.rows() {
                    let acc = b.ones().fold(false, |acc, c| acc ^ row.get(c));
                    prop_assert!(!acc);
                }
            }
            prop_assert_eq!(null_variables(&sys), rep.null_set.clone());
        }
    }
}
