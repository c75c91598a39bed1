//! XORSAT formulas in folded form, random generation, substitution and the
//! variable/clause factor graph.
//!
//! Variables are 0-based internally (`0..n`); the XNF file format uses the
//! conventional 1-based ids. A clause is an equation over F₂: it is satisfied
//! by `σ` iff the sum of `σ(v)` over its variables equals `rhs`. Literal signs
//! are folded into `rhs` on input, `rhs = (1 + #negations) mod 2`.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// One XOR constraint: sorted distinct variables and a parity target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    vars: Vec<u32>,
    rhs: bool,
}

impl Clause {
    /// Builds a clause from variables in any order. Fails on an empty or
    /// repeated variable list.
    pub fn new(mut vars: Vec<u32>, rhs: bool) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidArgument("empty clause".into()));
        }
        vars.sort_unstable();
        if vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated variable in clause {vars:?}"
            )));
        }
        Ok(Clause { vars, rhs })
    }

    /// Builds a clause from signed literals `(var, negated)`; the clause
    /// asserts that the XOR of its literals is true.
    pub fn from_literals(lits: &[(u32, bool)]) -> Result<Self> {
        let negations = lits.iter().filter(|(_, neg)| *neg).count();
        let vars = lits.iter().map(|(v, _)| *v).collect();
        Clause::new(vars, (1 + negations) % 2 == 1)
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn rhs(&self) -> bool {
        self.rhs
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vars.binary_search(&v).is_ok()
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        let parity = self
            .vars
            .iter()
            .fold(false, |acc, &v| acc ^ assignment[v as usize]);
        parity == self.rhs
    }
}

/// A XORSAT instance over variables `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorsatFormula {
    n: usize,
    k: usize,
    clauses: Vec<Clause>,
}

impl XorsatFormula {
    /// Assembles a formula, checking that every variable id is below `n`.
    /// `k` records the original clause width; it is taken as the maximum
    /// clause length when zero.
    pub fn new(n: usize, k: usize, clauses: Vec<Clause>) -> Result<Self> {
        if let Some(c) = clauses
            .iter()
            .find(|c| c.vars.last().is_some_and(|&v| v as usize >= n))
        {
            return Err(Error::InvalidArgument(format!(
                "clause {:?} references a variable outside 0..{n}",
                c.vars
            )));
        }
        let k = if k == 0 {
            clauses.iter().map(Clause::len).max().unwrap_or(0)
        } else {
            k
        };
        Ok(XorsatFormula { n, k, clauses })
    }

    pub fn empty(n: usize) -> Self {
        XorsatFormula {
            n,
            k: 0,
            clauses: Vec::new(),
        }
    }

    /// Samples the random model: `m ~ Po(dn/k)` clauses, each over `k`
    /// distinct uniform variables with uniform signs, drawn independently.
    pub fn generate_random(n: usize, d: f64, k: usize, seed: u64) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameters(format!("k = {k} < 3")));
        }
        if n < k {
            return Err(Error::InvalidParameters(format!("n = {n} < k = {k}")));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameters(format!("d = {d} must be >= 0")));
        }
        let mean = d * n as f64 / k as f64;
        let m = if mean == 0.0 {
            0
        } else {
            let poisson = Poisson::new(mean)
                .map_err(|e| Error::InvalidParameters(format!("poisson mean {mean}: {e}")))?;
            poisson.sample(&mut rng::stream(seed, Purpose::ClauseCount, 0)) as usize
        };
        let mut clauses = Vec::with_capacity(m);
        for i in 0..m {
            let mut var_rng = rng::stream(seed, Purpose::ClauseVars, i as u64);
            let mut sign_rng = rng::stream(seed, Purpose::ClauseSigns, i as u64);
            let vars: Vec<u32> = rand::seq::index::sample(&mut var_rng, n, k)
                .into_iter()
                .map(|v| v as u32)
                .collect();
            let negations = (0..k).filter(|_| sign_rng.gen::<bool>()).count();
            clauses.push(Clause::new(vars, (1 + negations) % 2 == 1)?);
        }
        Ok(XorsatFormula { n, k, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Original clause width.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.n && self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }

    /// Number of directed-edge pairs, i.e. the sum of clause lengths.
    pub fn num_edges(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    /// Substitutes the assigned variables and folds their values into the
    /// right-hand sides. Clauses left without variables are dropped and
    /// counted as satisfied or violated.
    pub fn substitute(&self, sigma: &PartialAssignment) -> Substitution {
        let mut clauses = Vec::with_capacity(self.clauses.len());
        let mut satisfied = 0;
        let mut violated = 0;
        for c in &self.clauses {
            let mut rhs = c.rhs;
            let mut vars = Vec::with_capacity(c.vars.len());
            for &v in &c.vars {
                match sigma.get(v as usize) {
                    Some(b) => rhs ^= b,
                    None => vars.push(v),
                }
            }
            if vars.is_empty() {
                if rhs {
                    violated += 1;
                } else {
                    satisfied += 1;
                }
            } else {
                clauses.push(Clause { vars, rhs });
            }
        }
        Substitution {
            formula: XorsatFormula {
                n: self.n,
                k: self.k,
                clauses,
            },
            satisfied,
            violated,
        }
    }

    /// Keeps only clauses of exactly `len` variables.
    pub fn restrict_to_width(&self, len: usize) -> XorsatFormula {
        XorsatFormula {
            n: self.n,
            k: self.k,
            clauses: self
                .clauses
                .iter()
                .filter(|c| c.len() == len)
                .cloned()
                .collect(),
        }
    }

    pub fn factor_graph(&self) -> FactorGraph {
        FactorGraph::new(self)
    }
}

/// Result of [`XorsatFormula::substitute`].
#[derive(Clone, Debug)]
pub struct Substitution {
    pub formula: XorsatFormula,
    pub satisfied: usize,
    pub violated: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstitutionStatus {
    Consistent,
    Violated,
}

impl Substitution {
    pub fn status(&self) -> SubstitutionStatus {
        if self.violated > 0 {
            SubstitutionStatus::Violated
        } else {
            SubstitutionStatus::Consistent
        }
    }
}

/// Values for a subset of the variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    pub fn new(n: usize) -> Self {
        PartialAssignment {
            values: vec![None; n],
        }
    }

    /// Assignment of the first `values.len()` variables.
    pub fn prefix(n: usize, values: &[bool]) -> Self {
        let mut a = PartialAssignment::new(n);
        for (i, &b) in values.iter().enumerate() {
            a.values[i] = Some(b);
        }
        a
    }

    /// Assigns `v`; fails if it already carries a value.
    pub fn assign(&mut self, v: usize, value: bool) -> Result<()> {
        if v >= self.values.len() {
            return Err(Error::InvalidArgument(format!("variable {v} out of range")));
        }
        if self.values[v].is_some() {
            return Err(Error::InvalidArgument(format!("variable {v} assigned twice")));
        }
        self.values[v] = Some(value);
        Ok(())
    }

    pub fn get(&self, v: usize) -> Option<bool> {
        self.values.get(v).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Union of two assignments with disjoint domains.
    pub fn union(&self, other: &PartialAssignment) -> Result<PartialAssignment> {
        let mut out = self.clone();
        for (v, val) in other.values.iter().enumerate() {
            if let Some(b) = val {
                out.assign(v, *b)?;
            }
        }
        Ok(out)
    }
}

/// A vertex of the factor graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Vertex {
    Var(usize),
    Clause(usize),
}

/// Variable/clause incidence structure in CSR layout.
///
/// Edges are numbered clause-major: the edges of clause `a` are the contiguous
/// range `clause_offsets[a]..clause_offsets[a+1]`, in the clause's variable
/// order. Each variable keeps the list of its edge ids.
#[derive(Clone, Debug)]
pub struct FactorGraph {
    n: usize,
    clause_offsets: Vec<usize>,
    edge_var: Vec<u32>,
    edge_clause: Vec<u32>,
    var_offsets: Vec<usize>,
    var_edges: Vec<u32>,
}

impl FactorGraph {
    pub fn new(f: &XorsatFormula) -> Self {
        let n = f.num_vars();
        let mut clause_offsets = Vec::with_capacity(f.num_clauses() + 1);
        let mut edge_var = Vec::with_capacity(f.num_edges());
        let mut edge_clause = Vec::with_capacity(f.num_edges());
        clause_offsets.push(0);
        for (a, c) in f.clauses().iter().enumerate() {
            for &v in c.vars() {
                edge_var.push(v);
                edge_clause.push(a as u32);
            }
            clause_offsets.push(edge_var.len());
        }
        let mut degree = vec![0usize; n + 1];
        for &v in &edge_var {
            degree[v as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let var_offsets = degree;
        let mut fill = var_offsets.clone();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        FactorGraph {
            n,
            clause_offsets,
            edge_var,
            edge_clause,
            var_offsets,
            var_edges,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.clause_offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Edge ids of clause `a`.
    pub fn clause_edges(&self, a: usize) -> std::ops::Range<usize> {
        self.clause_offsets[a]..self.clause_offsets[a + 1]
    }

    /// Edge ids incident to variable `v`.
    pub fn var_edges(&self, v: usize) -> &[u32] {
        &self.var_edges[self.var_offsets[v]..self.var_offsets[v + 1]]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e] as usize
    }

    pub fn edge_clause(&self, e: usize) -> usize {
        self.edge_clause[e] as usize
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_offsets[v + 1] - self.var_offsets[v]
    }

    pub fn clause_degree(&self, a: usize) -> usize {
        self.clause_offsets[a + 1] - self.clause_offsets[a]
    }

    fn neighbors(&self, u: Vertex) -> Vec<Vertex> {
        match u {
            Vertex::Var(v) => self
                .var_edges(v)
                .iter()
                .map(|&e| Vertex::Clause(self.edge_clause(e as usize)))
                .collect(),
            Vertex::Clause(a) => self
                .clause_edges(a)
                .map(|e| Vertex::Var(self.edge_var(e)))
                .collect(),
        }
    }

    fn contains(&self, u: Vertex) -> bool {
        match u {
            Vertex::Var(v) => v < self.n,
            Vertex::Clause(a) => a < self.num_clauses(),
        }
    }

    /// Breadth-first ball of radius `radius` around `root`.
    pub fn neighborhood(&self, root: Vertex, radius: usize) -> Result<Neighborhood> {
        if !self.contains(root) {
            return Err(Error::InvalidArgument(format!("unknown vertex {root:?}")));
        }
        let mut dist_var = vec![usize::MAX; self.n];
        let mut dist_clause = vec![usize::MAX; self.num_clauses()];
        let set = |u: Vertex, d: usize, dv: &mut Vec<usize>, dc: &mut Vec<usize>| match u {
            Vertex::Var(v) => dv[v] = d,
            Vertex::Clause(a) => dc[a] = d,
        };
        let get = |u: Vertex, dv: &Vec<usize>, dc: &Vec<usize>| match u {
            Vertex::Var(v) => dv[v],
            Vertex::Clause(a) => dc[a],
        };
        set(root, 0, &mut dist_var, &mut dist_clause);
        let mut layers = vec![vec![root]];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let du = get(u, &dist_var, &dist_clause);
            if du == radius {
                continue;
            }
            for w in self.neighbors(u) {
                if get(w, &dist_var, &dist_clause) == usize::MAX {
                    set(w, du + 1, &mut dist_var, &mut dist_clause);
                    if layers.len() <= du + 1 {
                        layers.push(Vec::new());
                    }
                    layers[du + 1].push(w);
                    queue.push_back(w);
                }
            }
        }
        layers.resize(radius + 1, Vec::new());
        for layer in &mut layers {
            layer.sort_unstable();
        }
        // The ball is connected, so it induces a tree iff it has |ball| - 1 edges.
        let vertices: usize = layers.iter().map(Vec::len).sum();
        let mut edges = 0usize;
        for a in 0..self.num_clauses() {
            if dist_clause[a] == usize::MAX {
                continue;
            }
            edges += self
                .clause_edges(a)
                .filter(|&e| dist_var[self.edge_var(e)] != usize::MAX)
                .count();
        }
        Ok(Neighborhood {
            layers,
            acyclic: edges + 1 == vertices,
        })
    }
}

/// The sets `∂^ℓ v` for `ℓ = 0..=radius` and whether the ball is a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    /// `layers[ℓ]` holds the vertices at distance exactly `ℓ`, sorted.
    pub layers: Vec<Vec<Vertex>>,
    pub acyclic: bool,
}

impl Neighborhood {
    pub fn boundary(&self) -> &[Vertex] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// All vertices within the radius, sorted.
    pub fn ball(&self) -> Vec<Vertex> {
        let mut all: Vec<Vertex> = self.layers.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}
