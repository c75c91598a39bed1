//! Seeded Monte Carlo experiments comparing simulation with the asymptotic
//! predictions of [`crate::analytic`].
//!
//! Every trial draws its randomness from streams keyed by the master seed and
//! the trial's position in the grid, and results are merged in that order,
//! so output does not depend on the number of worker threads.
//!
//! Experiments that need the formula `F_t` seen by the decimation process
//! after `t` steps sample it directly: the first `t` values the process picks
//! are the prefix of a uniformly random solution, so `F_t` is the formula
//! with the prefix of a uniform solution substituted.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{run_bpgd, run_bpgd_with, BpgdMode, QueueOrder, SharedBits, UcpOptions};
use crate::analytic::{self, fixed_points, gw_wp_recursion, GwMode, ModelParams};
use crate::error::{Error, Result};
use crate::f2::SparseSystem;
use crate::formula::{PartialAssignment, XorsatFormula};
use crate::message_passing::{bp_run, wp_run_graph};
use crate::rng::{self, derive_seed, Purpose};
use crate::trit::Trit;
use crate::xnf::write_atomic;

/// Resampling cap for the rare unsatisfiable instance.
const MAX_ATTEMPTS: u64 = 256;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Values of `d`; experiments over `θ` run at each of them.
    pub d: Vec<f64>,
    pub theta: Vec<f64>,
    /// Worker threads, 0 for one per core. Not echoed: it must not change
    /// the output.
    #[serde(skip)]
    pub threads: usize,
    /// Warning Propagation depth.
    pub ell: usize,
    pub mode: BpgdMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k: 3,
            n: 1000,
            trials: 10,
            seed: 0,
            d: Vec::new(),
            theta: Vec::new(),
            threads: 0,
            ell: 60,
            mode: BpgdMode::Fast,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self, needs_theta: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if self.k < 3 {
            return bad(format!("k = {} must be at least 3", self.k));
        }
        if self.n < self.k {
            return bad(format!("n = {} must be at least k = {}", self.n, self.k));
        }
        if self.trials == 0 {
            return bad("at least one trial is required".into());
        }
        if self.d.is_empty() {
            return bad("the d grid is empty".into());
        }
        if let Some(d) = self.d.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
            return bad(format!("d = {d} must be finite and nonnegative"));
        }
        if needs_theta {
            if self.theta.is_empty() {
                return bad("the θ grid is empty".into());
            }
            if let Some(t) = self.theta.iter().find(|t| !(0.0..1.0).contains(*t)) {
                return bad(format!("θ = {t} must lie in [0, 1)"));
            }
        }
        Ok(())
    }

    fn steps(&self, theta: f64) -> usize {
        (theta * self.n as f64).floor() as usize
    }
}

/// One quantity at one grid point.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub quantity: String,
    pub d: f64,
    pub theta: f64,
    pub mean: f64,
    pub std_error: f64,
    pub predicted: f64,
    pub trials: usize,
    /// Per-trial values, in trial order.
    #[serde(skip)]
    pub samples: Vec<f64>,
}

impl ResultRow {
    fn new(quantity: &str, d: f64, theta: f64, predicted: f64, samples: Vec<f64>) -> Self {
        let (mean, std_error) = mean_and_std_error(&samples);
        ResultRow {
            quantity: quantity.to_string(),
            d,
            theta,
            mean,
            std_error,
            predicted,
            trials: samples.len(),
            samples,
        }
    }
}

/// Sample mean and `s/√N` with the unbiased sample deviation `s`; the error
/// is 0 for a single sample.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub experiment: String,
    pub version: String,
    /// Kept out of the files so they stay byte-identical across runs.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub meta: Meta,
}

/// Ten significant digits, printed without trailing zeros.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("float round-trips");
    format!("{rounded}")
}

impl ExperimentResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,d,theta,mean,std_error,predicted,trials\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.quantity,
                format_float(r.d),
                format_float(r.theta),
                format_float(r.mean),
                format_float(r.std_error),
                format_float(r.predicted),
                r.trials
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serialises");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        write_atomic(path, self.render(format).as_bytes())
    }

    pub fn rows_named<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }
}

/// Parses `lo:hi:steps` into `steps` evenly spaced points from `lo` to `hi`,
/// or a comma-separated list of values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad grid {s:?}; expected lo:hi:steps or a list"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, steps] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let steps: usize = steps.trim().parse().map_err(|_| bad())?;
            match steps {
                0 => Err(bad()),
                1 => Ok(vec![lo]),
                _ => Ok((0..steps)
                    .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
                    .collect()),
            }
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Runs `f(point, trial)` for every pair, in parallel, and returns the
/// results grouped by point in trial order.
fn run_grid<T: Send>(cfg: &ExperimentConfig, points: usize, f: impl Fn(usize, usize) -> T + Sync) -> Result<Vec<Vec<T>>> {
    let trials = cfg.trials;
    let flat: Vec<T> = pool(cfg.threads)?.install(|| {
        (0..points * trials)
            .into_par_iter()
            .map(|i| f(i / trials, i % trials))
            .collect()
    });
    let mut it = flat.into_iter();
    Ok((0..points).map(|_| it.by_ref().take(trials).collect()).collect())
}

fn trial_index(point: usize, trial: usize, attempt: u64) -> u64 {
    ((point as u64) << 40) | (attempt << 32) | trial as u64
}

fn instance(cfg: &ExperimentConfig, d: f64, point: usize, trial: usize) -> Result<XorsatFormula> {
    let idx = trial_index(point, trial, 0);
    XorsatFormula::generate_random(cfg.n, d, cfg.k, derive_seed(cfg.seed, Purpose::Instance, idx))
}

/// A satisfiable instance and a uniform random solution of it. Unsatisfiable
/// draws are replaced by fresh ones.
fn satisfiable_instance(cfg: &ExperimentConfig, d: f64, point: usize, trial: usize) -> Result<(XorsatFormula, Vec<bool>)> {
    for attempt in 0..MAX_ATTEMPTS {
        let idx = trial_index(point, trial, attempt);
        let f = XorsatFormula::generate_random(cfg.n, d, cfg.k, derive_seed(cfg.seed, Purpose::Instance, idx))?;
        let mut r = rng::stream(cfg.seed, Purpose::Solution, idx);
        if let Some(sol) = SparseSystem::from_formula(&f).solve(&mut r).solution {
            return Ok((f, sol));
        }
    }
    Err(Error::Unsatisfiable)
}

/// `F_t`: the formula with `x_1..x_t` fixed to the solution's values.
fn decimated(f: &XorsatFormula, solution: &[bool], t: usize) -> XorsatFormula {
    let sub = f.substitute(&PartialAssignment::prefix(f.num_vars(), &solution[..t]));
    debug_assert_eq!(sub.violated, 0);
    sub.formula
}

fn finish(name: &str, cfg: &ExperimentConfig, rows: Vec<ResultRow>, start: Instant) -> ExperimentResult {
    ExperimentResult {
        config: cfg.clone(),
        rows,
        meta: Meta {
            experiment: name.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_secs: start.elapsed().as_secs_f64(),
        },
    }
}

fn collect<T>(grouped: Vec<Vec<Result<T>>>) -> Result<Vec<Vec<T>>> {
    grouped.into_iter().map(|g| g.into_iter().collect()).collect()
}

/// `(d, θ)` pairs, `θ` varying fastest.
fn pairs(cfg: &ExperimentConfig) -> Vec<(f64, f64)> {
    cfg.d
        .iter()
        .flat_map(|&d| cfg.theta.iter().map(move |&t| (d, t)))
        .collect()
}

fn fixed_points_at(cfg: &ExperimentConfig, d: f64, theta: f64) -> Result<analytic::FixedPointReport> {
    Ok(fixed_points(&ModelParams::from_theta(d, cfg.k, theta)?))
}

/// Fraction of runs of BPGD that return a satisfying assignment, against
/// the limiting success probability (0 from `d_min` on).
pub fn run_success_curve(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate(false)?;
    let start = Instant::now();
    let d_min = analytic::d_min(cfg.k)?;
    let grouped = run_grid(cfg, cfg.d.len(), |p, j| -> Result<f64> {
        let f = instance(cfg, cfg.d[p], p, j)?;
        let tau = SharedBits::derived(cfg.n, cfg.seed, trial_index(p, j, 0));
        Ok(f64::from(u8::from(run_bpgd(&f, tau.as_slice(), cfg.mode).succeeded())))
    })?;
    let mut rows = Vec::new();
    for (p, samples) in collect(grouped)?.into_iter().enumerate() {
        let d = cfg.d[p];
        let predicted = if d < d_min - 1e-9 {
            analytic::success_probability(d, cfg.k)?
        } else {
            0.0
        };
        rows.push(ResultRow::new("success", d, 0.0, predicted, samples));
    }
    Ok(finish("success-curve", cfg, rows, start))
}

/// `nul(F_t)/n` over the unassigned variables against `Φ(α_max)`.
pub fn run_nullity_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate(true)?;
    let start = Instant::now();
    let pts = pairs(cfg);
    let grouped = run_grid(cfg, pts.len(), |p, j| -> Result<f64> {
        let (d, theta) = pts[p];
        let (f, sol) = satisfiable_instance(cfg, d, p, j)?;
        let t = cfg.steps(theta);
        let ft = decimated(&f, &sol, t);
        let rank = SparseSystem::from_formula(&ft).analyze().rank;
        Ok((cfg.n - t - rank) as f64 / cfg.n as f64)
    })?;
    let mut rows = Vec::new();
    for (p, samples) in collect(grouped)?.into_iter().enumerate() {
        let (d, theta) = pts[p];
        let predicted = analytic::nullity_prediction(d, cfg.k, theta)?;
        rows.push(ResultRow::new("nullity", d, theta, predicted, samples));
    }
    Ok(finish("nullity", cfg, rows, start))
}

fn forced_mask(cfg: &ExperimentConfig, ft: &XorsatFormula, p: usize, j: usize) -> Vec<bool> {
    let mut r = rng::stream(cfg.seed, Purpose::Trial, trial_index(p, j, 0));
    SparseSystem::from_formula(ft).forced_mask(&mut r)
}

fn reject_near(cfg: &ExperimentConfig, d: f64, theta: f64, what: &str, edges: &[Option<f64>], gap: f64) -> Result<()> {
    for e in edges.iter().flatten() {
        if (theta - e).abs() < gap {
            return Err(Error::InvalidParameters(format!(
                "θ = {theta} lies within {gap} of {what} = {e} at d = {d}, k = {}",
                cfg.k
            )));
        }
    }
    Ok(())
}

/// `(t + |V₀(F_t)|)/n` against `α_max`, and `|V₀ △ V_null|/n` against
/// `α_max − α_*`, where `V₀` holds the variables frozen in every solution
/// and `V_null` those that BP (equivalently WP at its fixed point) fixes.
pub fn run_null_variable_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate(true)?;
    let pts = pairs(cfg);
    for &(d, theta) in &pts {
        let th = analytic::thresholds_at(d, cfg.k)?;
        reject_near(cfg, d, theta, "θ_cond", &[th.theta_cond], 0.02)?;
    }
    let start = Instant::now();
    let grouped = run_grid(cfg, pts.len(), |p, j| -> Result<(f64, f64)> {
        let (d, theta) = pts[p];
        let (f, sol) = satisfiable_instance(cfg, d, p, j)?;
        let t = cfg.steps(theta);
        let ft = decimated(&f, &sol, t);
        let frozen = forced_mask(cfg, &ft, p, j);
        let wp = wp_run_graph(&ft.factor_graph(), &[]).limit();
        let mut in_null = vec![false; cfg.n];
        for &x in &wp.null {
            in_null[x] = true;
        }
        let v0 = frozen.iter().filter(|&&b| b).count();
        let sym = (0..cfg.n).filter(|&x| frozen[x] != in_null[x]).count();
        let n = cfg.n as f64;
        Ok(((t + v0) as f64 / n, sym as f64 / n))
    })?;
    let mut rows = Vec::new();
    for (p, samples) in collect(grouped)?.into_iter().enumerate() {
        let (d, theta) = pts[p];
        let fp = fixed_points_at(cfg, d, theta)?;
        let (a, b): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        rows.push(ResultRow::new("frozen_fraction", d, theta, fp.alpha_max, a));
        rows.push(ResultRow::new("frozen_not_null", d, theta, fp.alpha_max - fp.alpha_sub, b));
    }
    Ok(finish("null-variables", cfg, rows, start))
}

/// WP marks after `ell` rounds on `F_t`: `(t + |V_{n,ℓ}|)/n` against `α_*`,
/// `|V_{f,ℓ}|/n` against `α^* − α_*`, and the part of the limiting null set
/// not yet reached, against the tree recursion at depth `ℓ`.
pub fn run_wp_mark_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate(true)?;
    let pts = pairs(cfg);
    for &(d, theta) in &pts {
        let th = analytic::thresholds_at(d, cfg.k)?;
        reject_near(cfg, d, theta, "θ_* or θ^*", &[th.theta_sub, th.theta_sup], 0.02)?;
    }
    let start = Instant::now();
    let ell = cfg.ell;
    let grouped = run_grid(cfg, pts.len(), |p, j| -> Result<[f64; 3]> {
        let (d, theta) = pts[p];
        let (f, sol) = satisfiable_instance(cfg, d, p, j)?;
        let t = cfg.steps(theta);
        let ft = decimated(&f, &sol, t);
        let run = wp_run_graph(&ft.factor_graph(), &[ell]);
        let at = &run.marks_at[0].1;
        let limit = run.limit();
        let n = cfg.n as f64;
        Ok([
            (t + at.null.len()) as f64 / n,
            at.frozen.len() as f64 / n,
            (limit.null.len() - at.null.len()) as f64 / n,
        ])
    })?;
    let mut rows = Vec::new();
    for (p, samples) in collect(grouped)?.into_iter().enumerate() {
        let (d, theta) = pts[p];
        let params = ModelParams::from_theta(d, cfg.k, theta)?;
        let fp = fixed_points(&params);
        let depth = theta + (1.0 - theta) * gw_wp_recursion(&params, ell, GwMode::Null);
        let col = |i: usize| samples.iter().map(|s| s[i]).collect::<Vec<f64>>();
        rows.push(ResultRow::new("assigned_or_null", d, theta, fp.alpha_sub, col(0)));
        rows.push(ResultRow::new("frozen", d, theta, fp.alpha_sup - fp.alpha_sub, col(1)));
        rows.push(ResultRow::new("null_not_reached", d, theta, fp.alpha_sub - depth, col(2)));
    }
    Ok(finish("wp-marks", cfg, rows, start))
}

/// How often the BP marginal of `x_{t+1}` on `F_t` differs from its exact
/// marginal. The prediction `(α_max − α_*)/(1 − θ)` is the share of the
/// unassigned variables that are frozen but not fixed by BP.
pub fn run_marginal_agreement(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate(true)?;
    let start = Instant::now();
    let pts = pairs(cfg);
    let grouped = run_grid(cfg, pts.len(), |p, j| -> Result<f64> {
        let (d, theta) = pts[p];
        let (f, sol) = satisfiable_instance(cfg, d, p, j)?;
        let t = cfg.steps(theta);
        let ft = decimated(&f, &sol, t);
        let mu = bp_run(&ft, &ft.factor_graph()).marginals[t];
        let pi = if forced_mask(cfg, &ft, p, j)[t] {
            Trit::forced(sol[t])
        } else {
            Trit::Half
        };
        Ok(f64::from(u8::from(mu != pi)))
    })?;
    let mut rows = Vec::new();
    for (p, samples) in collect(grouped)?.into_iter().enumerate() {
        let (d, theta) = pts[p];
        let fp = fixed_points_at(cfg, d, theta)?;
        let predicted = (fp.alpha_max - fp.alpha_sub) / (1.0 - theta);
        rows.push(ResultRow::new("disagreement", d, theta, predicted, samples));
    }
    Ok(finish("marginals", cfg, rows, start))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// UCP state at `t = ⌊θn⌋`: unassigned variables and clauses of each length
/// `ℓ ≥ 2`, per variable, against the closed-form trajectory.
pub fn run_trajectory_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate(true)?;
    let predictions: Vec<Vec<analytic::TrajectoryPrediction>> = cfg
        .d
        .iter()
        .map(|&d| {
            cfg.theta
                .iter()
                .map(|&t| analytic::ucp_trajectory_prediction(d, cfg.k, t))
                .collect()
        })
        .collect::<Result<_>>()?;
    let start = Instant::now();
    let targets: Vec<usize> = cfg.theta.iter().map(|&t| cfg.steps(t)).collect();
    let stride = targets.iter().fold(cfg.n, |g, &t| gcd(g, t));
    let opts = UcpOptions {
        order: QueueOrder::Fifo,
        snapshot_stride: Some(stride),
    };
    let grouped = run_grid(cfg, cfg.d.len(), |p, j| -> Result<Vec<Vec<f64>>> {
        let f = instance(cfg, cfg.d[p], p, j)?;
        let tau = SharedBits::derived(cfg.n, cfg.seed, trial_index(p, j, 0));
        let trace = run_bpgd_with(&f, tau.as_slice(), BpgdMode::Fast, opts);
        let n = cfg.n as f64;
        Ok(targets
            .iter()
            .map(|&t| {
                let s = trace
                    .snapshots
                    .iter()
                    .find(|s| s.t == t)
                    .expect("snapshot at every target");
                std::iter::once(s.n as f64 / n)
                    .chain(s.m[2..].iter().map(|&m| m as f64 / n))
                    .collect()
            })
            .collect())
    })?;
    let mut rows = Vec::new();
    for (p, per_trial) in collect(grouped)?.into_iter().enumerate() {
        let d = cfg.d[p];
        for (i, &theta) in cfg.theta.iter().enumerate() {
            let pred = &predictions[p][i];
            let col = |c: usize| per_trial.iter().map(|tr| tr[i][c]).collect::<Vec<f64>>();
            rows.push(ResultRow::new("unassigned", d, theta, pred.n_hat, col(0)));
            for l in 2..=cfg.k {
                rows.push(ResultRow::new(&format!("m{l}"), d, theta, pred.m_hat[l], col(l - 1)));
            }
        }
    }
    Ok(finish("trajectory", cfg, rows, start))
}

/// One row of the `(d, θ)` phase diagram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub d: f64,
    pub theta_sup: f64,
    pub theta_cond: f64,
    pub theta_sub: f64,
}

/// The curves `θ^*`, `θ_cond`, `θ_*` over a grid inside `(d_min, d_sat)`.
pub fn emit_phase_diagram(k: usize, ds: &[f64]) -> Result<Vec<PhaseRow>> {
    ds.iter()
        .map(|&d| {
            let t = analytic::thresholds_at(d, k)?;
            let row = match (t.theta_sup, t.theta_cond, t.theta_sub) {
                (Some(theta_sup), Some(theta_cond), Some(theta_sub)) => PhaseRow {
                    d,
                    theta_sup,
                    theta_cond,
                    theta_sub,
                },
                _ => {
                    return Err(Error::OutOfRegime(format!(
                        "d = {d} outside (d_min, d_sat) = ({}, {})",
                        t.d_min, t.d_sat
                    )))
                }
            };
            assert!(
                row.theta_sup < row.theta_cond && row.theta_cond < row.theta_sub,
                "phase curves out of order at d = {d}"
            );
            Ok(row)
        })
        .collect()
}

pub fn phase_diagram_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from("d,theta_sup,theta_cond,theta_sub\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_float(r.d),
            format_float(r.theta_sup),
            format_float(r.theta_cond),
            format_float(r.theta_sub)
        );
    }
    out
}
