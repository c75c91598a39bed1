use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use xorsat::algorithms::{run_bpgd, run_decimation, run_ucp, BpgdMode, SharedBits};
use xorsat::analytic::{self, fixed_points, ModelParams};
use xorsat::experiments::{self, format_float, parse_grid, ExperimentConfig, ExperimentResult, OutputFormat};
use xorsat::message_passing::{wp_run, wp::trace_csv};
use xorsat::rng::{self, Purpose};
use xorsat::xnf::{format_xnf, read_xnf, write_atomic};
use xorsat::{Error, XorsatFormula};

/// Random k-XORSAT laboratory: instances, solvers, message passing,
/// thresholds and Monte Carlo experiments.
#[derive(Parser)]
#[command(name = "xorsat", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random formula in XNF.
    Gen(GenArgs),
    /// Run BPGD with free bits drawn from the seed; prints the trace as JSON.
    SolveBpgd(BpgdArgs),
    /// Run unit clause propagation; prints the trace as JSON.
    SolveUcp(SolveArgs),
    /// Run the exact-marginal decimation process; prints the trace as JSON.
    Decimate(SolveArgs),
    /// Run Warning Propagation to its fixed point; prints per-round tallies.
    Wp(WpArgs),
    /// Print d_min, d_core, d_sat and, given d, the θ window and θ_cond.
    /// With a θ grid, tabulates fixed points and potentials instead.
    Thresholds(ThresholdArgs),
    /// BPGD success rate against the limiting success probability.
    SuccessCurve(ExpArgs),
    /// θ^*, θ_cond and θ_* over a grid of d.
    PhaseDiagram(PhaseArgs),
    /// Nullity of the decimated formula against Φ(α_max).
    Nullity(ExpArgs),
    /// Warning Propagation mark fractions against the fixed points.
    Marks(ExpArgs),
    /// Disagreement between BP and exact marginals.
    Marginals(ExpArgs),
    /// Frozen variables against those fixed by BP.
    NullVariables(ExpArgs),
    /// UCP trajectory against its closed form.
    Trajectory(ExpArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Mode {
    Strict,
    #[default]
    Fast,
}

impl From<Mode> for BpgdMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => BpgdMode::Strict,
            Mode::Fast => BpgdMode::Fast,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write here (atomically) instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: f64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SolveArgs {
    /// Formula in XNF.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BpgdArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// `strict` reruns BP on every step; `fast` uses unit propagation.
    #[arg(long, value_enum, default_value_t = Mode::Fast)]
    mode: Mode,
}

#[derive(Args)]
struct WpArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also report the mark counts after this many rounds.
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DGrid {
    #[arg(long, conflicts_with = "d_grid")]
    d: Option<f64>,
    /// `lo:hi:steps` or a comma-separated list.
    #[arg(long)]
    d_grid: Option<String>,
}

#[derive(Args)]
struct ThetaGrid {
    #[arg(long, conflicts_with = "theta_grid")]
    theta: Option<f64>,
    /// `lo:hi:steps` or a comma-separated list.
    #[arg(long)]
    theta_grid: Option<String>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    d: DGrid,
    #[command(flatten)]
    theta: ThetaGrid,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    d: DGrid,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[command(flatten)]
    d: DGrid,
    #[command(flatten)]
    theta: ThetaGrid,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Warning Propagation depth.
    #[arg(long, default_value_t = 60)]
    ell: usize,
    #[arg(long, value_enum, default_value_t = Mode::Fast)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

type CliResult<T> = Result<T, Error>;

impl DGrid {
    fn values(&self) -> CliResult<Vec<f64>> {
        grid(self.d, self.d_grid.as_deref())
    }
}

impl ThetaGrid {
    fn values(&self) -> CliResult<Vec<f64>> {
        grid(self.theta, self.theta_grid.as_deref())
    }
}

fn grid(single: Option<f64>, range: Option<&str>) -> CliResult<Vec<f64>> {
    match (single, range) {
        (Some(x), _) => Ok(vec![x]),
        (None, Some(s)) => parse_grid(s),
        (None, None) => Ok(Vec::new()),
    }
}

fn emit(output: &Output, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn run_experiment(args: &ExpArgs, run: fn(&ExperimentConfig) -> CliResult<ExperimentResult>) -> CliResult<()> {
    let cfg = ExperimentConfig {
        k: args.k,
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        d: args.d.values()?,
        theta: args.theta.values()?,
        threads: args.threads,
        ell: args.ell,
        mode: args.mode.into(),
    };
    let result = run(&cfg)?;
    emit(&args.output, &result.render(args.format.into()))?;
    eprintln!(
        "{}: {} rows in {:.2}s",
        result.meta.experiment,
        result.rows.len(),
        result.meta.wall_time_secs
    );
    Ok(())
}

#[derive(Serialize)]
struct GridRow {
    d: f64,
    theta: f64,
    alpha_sub: f64,
    alpha_sup: f64,
    alpha_max: f64,
    phi_sub: f64,
    phi_sup: f64,
    lambda_cond: Option<f64>,
}

fn threshold_grid(k: usize, ds: &[f64], thetas: &[f64], format: Format) -> CliResult<String> {
    let mut rows = Vec::new();
    for &d in ds {
        let lambda_cond = analytic::lambda_cond(d, k).ok().map(|(l, _)| l);
        for &theta in thetas {
            let fp = fixed_points(&ModelParams::from_theta(d, k, theta)?);
            rows.push(GridRow {
                d,
                theta,
                alpha_sub: fp.alpha_sub,
                alpha_sup: fp.alpha_sup,
                alpha_max: fp.alpha_max,
                phi_sub: fp.phi_sub,
                phi_sup: fp.phi_sup,
                lambda_cond,
            });
        }
    }
    Ok(match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("d,theta,alpha_sub,alpha_sup,alpha_max,phi_sub,phi_sup,lambda_cond\n");
            for r in &rows {
                let cells = [r.d, r.theta, r.alpha_sub, r.alpha_sup, r.alpha_max, r.phi_sub, r.phi_sup];
                let mut line: Vec<String> = cells.iter().map(|&x| format_float(x)).collect();
                line.push(r.lambda_cond.map(format_float).unwrap_or_default());
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
    })
}

fn thresholds(args: &ThresholdArgs) -> CliResult<()> {
    let ds = args.d.values()?;
    let thetas = args.theta.values()?;
    let text = if !thetas.is_empty() {
        if ds.is_empty() {
            return Err(Error::InvalidArgument("a θ grid needs --d or --d-grid".into()));
        }
        threshold_grid(args.k, &ds, &thetas, args.format)?
    } else if ds.is_empty() {
        to_json(&analytic::thresholds(args.k)?)
    } else {
        let sets = ds
            .iter()
            .map(|&d| analytic::thresholds_at(d, args.k))
            .collect::<CliResult<Vec<_>>>()?;
        if sets.len() == 1 {
            to_json(&sets[0])
        } else {
            to_json(&sets)
        }
    };
    emit(&args.output, &text)
}

fn phase_diagram(args: &PhaseArgs) -> CliResult<()> {
    let ds = args.d.values()?;
    if ds.is_empty() {
        return Err(Error::InvalidArgument("--d or --d-grid is required".into()));
    }
    let rows = experiments::emit_phase_diagram(args.k, &ds)?;
    let text = match args.format {
        Format::Csv => experiments::phase_diagram_csv(&rows),
        Format::Json => to_json(&rows),
    };
    emit(&args.output, &text)
}

fn load(path: &Path) -> CliResult<XorsatFormula> {
    read_xnf(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

#[derive(Serialize)]
struct WpReport {
    rounds: usize,
    trace: Vec<xorsat::message_passing::WpCounts>,
    at_ell: Option<MarkCounts>,
    limit: MarkCounts,
}

#[derive(Serialize)]
struct MarkCounts {
    ell: usize,
    null: usize,
    frozen: usize,
    uniform: usize,
}

fn wp(args: &WpArgs) -> CliResult<()> {
    let f = load(&args.input)?;
    let record: Vec<usize> = args.ell.into_iter().collect();
    let run = wp_run(&f, &record);
    let text = match args.format {
        Format::Csv => trace_csv(&run.trace),
        Format::Json => {
            let counts = |ell: usize, m: &xorsat::message_passing::MarkSets| MarkCounts {
                ell,
                null: m.null.len(),
                frozen: m.frozen.len(),
                uniform: m.uniform.len(),
            };
            to_json(&WpReport {
                rounds: run.fixpoint.iteration,
                trace: run.trace.clone(),
                at_ell: run.marks_at.first().map(|(l, m)| counts(*l, m)),
                limit: counts(run.fixpoint.iteration, &run.limit()),
            })
        }
    };
    emit(&args.output, &text)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Gen(a) => {
            let f = XorsatFormula::generate_random(a.n, a.d, a.k, a.seed)?;
            emit(&a.output, &format_xnf(&f))
        }
        Cmd::SolveBpgd(BpgdArgs { solve: a, mode }) => {
            let f = load(&a.input)?;
            let tau = SharedBits::derived(f.num_vars(), a.seed, 0);
            emit(&a.output, &(run_bpgd(&f, tau.as_slice(), mode.into()).to_json() + "\n"))
        }
        Cmd::SolveUcp(a) => {
            let f = load(&a.input)?;
            let tau = SharedBits::derived(f.num_vars(), a.seed, 0);
            emit(&a.output, &(run_ucp(&f, tau.as_slice()).to_json() + "\n"))
        }
        Cmd::Decimate(a) => {
            let f = load(&a.input)?;
            let mut r = rng::stream(a.seed, Purpose::Decimation, 0);
            emit(&a.output, &(run_decimation(&f, &mut r).trace.to_json() + "\n"))
        }
        Cmd::Wp(a) => wp(&a),
        Cmd::Thresholds(a) => thresholds(&a),
        Cmd::PhaseDiagram(a) => phase_diagram(&a),
        Cmd::SuccessCurve(a) => run_experiment(&a, experiments::run_success_curve),
        Cmd::Nullity(a) => run_experiment(&a, experiments::run_nullity_experiment),
        Cmd::Marks(a) => run_experiment(&a, experiments::run_wp_mark_experiment),
        Cmd::Marginals(a) => run_experiment(&a, experiments::run_marginal_agreement),
        Cmd::NullVariables(a) => run_experiment(&a, experiments::run_null_variable_experiment),
        Cmd::Trajectory(a) => run_experiment(&a, experiments::run_trajectory_experiment),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io(_) => 2,
                _ => 1,
            })
        }
    }
}
