//! Command-line front end for thermoflow.
//!
//! Every subcommand reads state files in the JSON layout of
//! [`thermoflow::states::StateFile`] and writes JSON or CSV to stdout.

mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use thermoflow::divergence::{
    check_cto_transition, check_cto_with_ancilla, iid_extend, smooth_free_energy, AlphaGrid, RenyiAlpha,
};
use thermoflow::engine::{
    carnot, eta_nano, omega, quasi_static_estimate, Constraints, EngineSpec, OmegaConvention,
};
use thermoflow::oracle::{catalyst_search, feasibility_lp, sample_bistochastic, CatalystGrid, SeededSampler};
use thermoflow::order::{check_noisy_transition, StochasticMatrix};
use thermoflow::states::{gibbs, StateFile};
use thermoflow::thermo_curve::{check_thermal_transition, curve, ThermoCurve};
use thermoflow::work::{distillable_work, work_fixed_output, work_of_formation, WorkValue};
use thermoflow::{IncoherentState, InverseTemperature, TransitionVerdict};

pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable holding a comma-separated α grid.
pub const ALPHA_GRID_ENV: &str = "THERMOFLOW_ALPHA_GRID";

const AFTER_HELP: &str = "\
Exit status:
  0  success, or the transition is feasible
  1  the transition is infeasible (check, oracle)
  2  usage, input or I/O error

Environment:
  THERMOFLOW_ALPHA_GRID  comma-separated orders replacing the default alpha grid";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: malformed JSON: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },

    #[error(transparent)]
    Core(#[from] thermoflow::Error),

    #[error("{0}")]
    Usage(String),

    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),

    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "thermoflow", version, about = "Thermodynamic transition checks for energy-incoherent states", after_help = AFTER_HELP)]
pub struct Cli {
    /// Orders for the second-law checks, comma-separated. Overrides THERMOFLOW_ALPHA_GRID.
    #[arg(long, global = true)]
    alpha_grid: Option<String>,

    /// Inverse temperature overriding the one stored in the state files.
    #[arg(long, global = true)]
    beta: Option<f64>,

    /// Seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Thermo-majorization curve vertices as CSV (x,y), optionally also as SVG.
    Curve(CurveArgs),
    /// Decide whether the first state can be turned into the second.
    Check(CheckArgs),
    /// Work quantifiers.
    Work {
        #[command(subcommand)]
        kind: WorkCommand,
    },
    /// Smoothed free energies of n-copy states as CSV (n,alpha,epsilon,value).
    Smooth(SmoothArgs),
    /// Heat-engine efficiencies.
    Engine {
        #[command(subcommand)]
        kind: EngineCommand,
    },
    /// Independent verification tools.
    Oracle {
        #[command(subcommand)]
        kind: OracleCommand,
    },
    /// Check every pair file in a directory; CSV (file,verdict,detail).
    Batch(BatchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Noisy,
    Thermal,
    Catalytic,
    CatalyticAncilla,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CurveFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// One or two state files.
    #[arg(required = true, num_args = 1..=2)]
    states: Vec<PathBuf>,
    /// Also write an SVG rendering here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: CurveFormat,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "thermal")]
    model: Model,
    source: PathBuf,
    target: PathBuf,
}

#[derive(Debug, Subcommand)]
enum WorkCommand {
    /// Deterministic work extractable from a state.
    Distill { state: PathBuf },
    /// Work needed to form a state from the Gibbs state.
    Formation { state: PathBuf },
    /// Work extractable in a fixed transition (negative: work cost).
    Fixed { source: PathBuf, target: PathBuf },
}

#[derive(Debug, Args)]
struct SmoothArgs {
    state: PathBuf,
    /// Orders to smooth, each 0 or inf.
    #[arg(long, value_delimiter = ',', default_values = ["0", "inf"])]
    alpha: Vec<RenyiAlpha>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.01])]
    epsilon: Vec<f64>,
    /// Numbers of copies.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    n: Vec<usize>,
    /// Divide each value by n.
    #[arg(long)]
    per_copy: bool,
}

#[derive(Debug, Args)]
struct EngineArgs {
    #[arg(long)]
    beta_hot: f64,
    #[arg(long)]
    beta_cold: f64,
    /// Cold-bath qubit gaps, comma-separated.
    #[arg(long, value_delimiter = ',')]
    gaps: Vec<f64>,
    /// Battery failure budget.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value = "verbatim")]
    omega_convention: OmegaConvention,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConstraintSet {
    Full,
    FreeEnergy,
}

#[derive(Debug, Subcommand)]
enum EngineCommand {
    Carnot {
        #[arg(long)]
        beta_hot: f64,
        #[arg(long)]
        beta_cold: f64,
    },
    Omega(EngineArgs),
    Eta {
        #[arg(long)]
        beta_hot: f64,
        #[arg(long)]
        beta_cold: f64,
        /// Use this Ω instead of computing it from the gaps.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        gaps: Vec<f64>,
        #[arg(long, default_value = "verbatim")]
        omega_convention: OmegaConvention,
    },
    /// CSV (beta_prime,W_ext,dH,efficiency) for a single cold qubit.
    Quasistatic {
        #[command(flatten)]
        engine: EngineArgs,
        /// Final cold inverse temperatures, comma-separated. Defaults to 20 points up to beta_cold.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(long, value_enum, default_value = "full")]
        constraints: ConstraintSet,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Solve the Gibbs-preserving stochastic-map feasibility problem.
    Lp { source: PathBuf, target: PathBuf },
    /// Search for a qubit catalyst.
    Catalyst {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[arg(long, default_value_t = 4.0)]
        max_gap: f64,
    },
    /// Sample a bistochastic matrix (row-major JSON).
    Bistochastic {
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Debug, Args)]
struct BatchArgs {
    dir: PathBuf,
    #[arg(long, value_enum, default_value = "thermal")]
    model: Model,
}

/// A pair file for `batch`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub initial: StateFile,
    pub target: StateFile,
}

struct Context {
    grid: AlphaGrid,
    beta: Option<f64>,
    seed: u64,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_FEASIBLE };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn alpha_grid(flag: Option<&str>) -> CliResult<AlphaGrid> {
    if let Some(spec) = flag {
        return Ok(AlphaGrid::parse(spec)?);
    }
    match std::env::var(ALPHA_GRID_ENV) {
        Ok(spec) => AlphaGrid::parse(&spec)
            .map_err(|e| CliError::Usage(format!("{ALPHA_GRID_ENV}: {e}"))),
        Err(_) => Ok(AlphaGrid::default()),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    let ctx = Context {
        grid: alpha_grid(cli.alpha_grid.as_deref())?,
        beta: cli.beta,
        seed: cli.seed,
    };
    match cli.command {
        Command::Curve(args) => run_curve(&ctx, args, out),
        Command::Check(args) => {
            let (p, q, beta) = load_pair(&args.source, &args.target, ctx.beta)?;
            let verdict = decide(args.model, &p, &q, beta, &ctx.grid)?;
            writeln!(out, "{}", verdict.to_json())?;
            Ok(verdict_code(&verdict))
        }
        Command::Work { kind } => {
            let value = match kind {
                WorkCommand::Distill { state } => {
                    let (rho, beta) = load_state(&state, ctx.beta)?;
                    distillable_work(&rho, beta)
                }
                WorkCommand::Formation { state } => {
                    let (rho, beta) = load_state(&state, ctx.beta)?;
                    work_of_formation(&rho, beta)
                }
                WorkCommand::Fixed { source, target } => {
                    let (p, q, beta) = load_pair(&source, &target, ctx.beta)?;
                    work_fixed_output(&p, &q, beta, &ctx.grid)?
                }
            };
            writeln!(out, "{}", work_json(&value))?;
            Ok(EXIT_FEASIBLE)
        }
        Command::Smooth(args) => run_smooth(&ctx, args, out),
        Command::Engine { kind } => run_engine(&ctx, kind, out),
        Command::Oracle { kind } => run_oracle(&ctx, kind, out),
        Command::Batch(args) => run_batch(&ctx, args, out),
    }
}

/// Shortest text that parses back to the same `f64`; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_number(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:?}")
    }
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format_number(x))
    }
}

fn work_json(w: &WorkValue) -> String {
    serde_json::to_string(w).expect("work value serializes")
}

fn matrix_json(m: &StochasticMatrix) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|&x| json_number(x)).collect()))
            .collect(),
    )
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })
}

fn resolve_beta(file_beta: f64, over: Option<f64>) -> CliResult<InverseTemperature> {
    Ok(InverseTemperature::new(over.unwrap_or(file_beta))?)
}

fn load_state(path: &Path, over: Option<f64>) -> CliResult<(IncoherentState, InverseTemperature)> {
    let file: StateFile = read_json(path)?;
    Ok((file.state()?, resolve_beta(file.beta, over)?))
}

fn pair_states(
    initial: &StateFile,
    target: &StateFile,
    over: Option<f64>,
) -> CliResult<(IncoherentState, IncoherentState, InverseTemperature)> {
    if over.is_none() && initial.beta != target.beta {
        return Err(CliError::Usage(format!(
            "state files disagree on beta ({} vs {}); pass --beta",
            initial.beta, target.beta
        )));
    }
    Ok((initial.state()?, target.state()?, resolve_beta(initial.beta, over)?))
}

fn load_pair(
    source: &Path,
    target: &Path,
    over: Option<f64>,
) -> CliResult<(IncoherentState, IncoherentState, InverseTemperature)> {
    let a: StateFile = read_json(source)?;
    let b: StateFile = read_json(target)?;
    pair_states(&a, &b, over)
}

/// The library call behind `check --model`.
pub fn decide(
    model: Model,
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    grid: &AlphaGrid,
) -> thermoflow::Result<TransitionVerdict> {
    match model {
        Model::Noisy => check_noisy_transition(source, target),
        Model::Thermal => {
            if !source.same_hamiltonian(target) {
                return Err(thermoflow::Error::HamiltonianMismatch);
            }
            Ok(check_thermal_transition(source, target, beta))
        }
        Model::Catalytic => check_cto_transition(source, target, beta, grid),
        Model::CatalyticAncilla => check_cto_with_ancilla(source, target, beta, grid),
    }
}

fn verdict_code(v: &TransitionVerdict) -> i32 {
    if v.feasible {
        EXIT_FEASIBLE
    } else {
        EXIT_INFEASIBLE
    }
}

fn run_curve(ctx: &Context, args: CurveArgs, out: &mut dyn Write) -> CliResult<i32> {
    let files: Vec<StateFile> = args.states.iter().map(|p| read_json(p)).collect::<CliResult<_>>()?;
    if ctx.beta.is_none() && files.windows(2).any(|w| w[0].beta != w[1].beta) {
        return Err(CliError::Usage("state files disagree on beta; pass --beta".into()));
    }
    let curves: Vec<ThermoCurve> = files
        .iter()
        .map(|f| Ok(curve(&f.state()?, resolve_beta(f.beta, ctx.beta)?)))
        .collect::<CliResult<_>>()?;
    match args.format {
        CurveFormat::Csv => {
            for (k, c) in curves.iter().enumerate() {
                if k > 0 {
                    writeln!(out)?;
                }
                writeln!(out, "x,y")?;
                for &(x, y) in c.vertices() {
                    writeln!(out, "{},{}", format_number(x), format_number(y))?;
                }
            }
        }
        CurveFormat::Json => {
            let all: Vec<Value> = curves
                .iter()
                .map(|c| {
                    Value::Array(
                        c.vertices()
                            .iter()
                            .map(|&(x, y)| json!([json_number(x), json_number(y)]))
                            .collect(),
                    )
                })
                .collect();
            writeln!(out, "{}", Value::Array(all))?;
        }
    }
    if let Some(path) = args.svg {
        fs::write(&path, svg::render(&curves)).map_err(|source| CliError::Io { path, source })?;
    }
    Ok(EXIT_FEASIBLE)
}

fn run_smooth(ctx: &Context, args: SmoothArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (rho, beta) = load_state(&args.state, ctx.beta)?;
    writeln!(out, "n,alpha,epsilon,value")?;
    for &n in &args.n {
        let extended = iid_extend(&rho, n)?;
        for &alpha in &args.alpha {
            for &eps in &args.epsilon {
                let mut value = smooth_free_energy(&extended, beta, alpha, eps)?;
                if args.per_copy {
                    value /= n as f64;
                }
                writeln!(out, "{n},{alpha},{},{}", format_number(eps), format_number(value))?;
            }
        }
    }
    Ok(EXIT_FEASIBLE)
}

fn betas(hot: f64, cold: f64) -> CliResult<(InverseTemperature, InverseTemperature)> {
    Ok((InverseTemperature::new(hot)?, InverseTemperature::new(cold)?))
}

fn engine_spec(args: &EngineArgs) -> CliResult<EngineSpec> {
    let (h, c) = betas(args.beta_hot, args.beta_cold)?;
    Ok(EngineSpec::new(h, c, args.gaps.clone(), args.epsilon)?)
}

fn run_engine(ctx: &Context, kind: EngineCommand, out: &mut dyn Write) -> CliResult<i32> {
    match kind {
        EngineCommand::Carnot { beta_hot, beta_cold } => {
            let (h, c) = betas(beta_hot, beta_cold)?;
            writeln!(out, "{}", format_number(carnot(h, c)?))?;
        }
        EngineCommand::Omega(args) => {
            let spec = engine_spec(&args)?;
            writeln!(out, "{}", format_number(omega(&spec, args.omega_convention)))?;
        }
        EngineCommand::Eta {
            beta_hot,
            beta_cold,
            omega: given,
            gaps,
            omega_convention,
        } => {
            let (h, c) = betas(beta_hot, beta_cold)?;
            let w = match given {
                Some(w) => w,
                None if gaps.is_empty() => {
                    return Err(CliError::Usage("eta needs --omega or --gaps".into()));
                }
                None => omega(&EngineSpec::new(h, c, gaps, 0.0)?, omega_convention),
            };
            writeln!(out, "{}", format_number(eta_nano(w, h, c)?))?;
        }
        EngineCommand::Quasistatic {
            engine,
            grid,
            constraints,
        } => {
            let spec = engine_spec(&engine)?;
            let beta_primes = if grid.is_empty() {
                (1..=20)
                    .map(|k| engine.beta_hot + (engine.beta_cold - engine.beta_hot) * k as f64 / 20.0)
                    .collect()
            } else {
                grid
            };
            let constraints = match constraints {
                ConstraintSet::Full => Constraints::Full(ctx.grid.clone()),
                ConstraintSet::FreeEnergy => Constraints::FreeEnergyOnly,
            };
            writeln!(out, "beta_prime,W_ext,dH,efficiency")?;
            for p in quasi_static_estimate(&spec, &beta_primes, &constraints)? {
                writeln!(
                    out,
                    "{},{},{},{}",
                    format_number(p.beta_prime),
                    format_number(p.work),
                    format_number(p.heat),
                    format_number(p.efficiency)
                )?;
            }
        }
    }
    Ok(EXIT_FEASIBLE)
}

fn run_oracle(ctx: &Context, kind: OracleCommand, out: &mut dyn Write) -> CliResult<i32> {
    match kind {
        OracleCommand::Lp { source, target } => {
            let (p, q, beta) = load_pair(&source, &target, ctx.beta)?;
            if !p.same_hamiltonian(&q) {
                return Err(thermoflow::Error::HamiltonianMismatch.into());
            }
            let tau = gibbs(&p.hamiltonian(), beta).expanded_probabilities();
            let lp = feasibility_lp(&p.expanded_probabilities(), &tau, &q.expanded_probabilities())?;
            let witness = lp.witness.as_ref().map_or(Value::Null, matrix_json);
            writeln!(out, "{}", json!({ "feasible": lp.feasible, "witness": witness }))?;
            Ok(if lp.feasible { EXIT_FEASIBLE } else { EXIT_INFEASIBLE })
        }
        OracleCommand::Catalyst {
            source,
            target,
            resolution,
            max_gap,
        } => {
            let (p, q, beta) = load_pair(&source, &target, ctx.beta)?;
            let found = catalyst_search(&p, &q, beta, CatalystGrid { resolution, max_gap })?;
            let catalyst = found.as_ref().map_or(Value::Null, |c| {
                json!({ "probability": json_number(c.probability), "gap": json_number(c.gap) })
            });
            writeln!(out, "{}", json!({ "found": found.is_some(), "catalyst": catalyst }))?;
            Ok(if found.is_some() { EXIT_FEASIBLE } else { EXIT_INFEASIBLE })
        }
        OracleCommand::Bistochastic { dim } => {
            let mut sampler = SeededSampler::new(ctx.seed, 0);
            let m = sample_bistochastic(dim, &mut sampler)?;
            writeln!(out, "{}", json!({ "dim": dim, "seed": ctx.seed, "matrix": matrix_json(&m) }))?;
            Ok(EXIT_FEASIBLE)
        }
    }
}

struct BatchRow {
    file: String,
    verdict: &'static str,
    detail: String,
}

fn batch_row(path: &Path, model: Model, ctx: &Context) -> BatchRow {
    let file = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let outcome = read_json::<PairFile>(path).and_then(|pair| {
        let (p, q, beta) = pair_states(&pair.initial, &pair.target, ctx.beta)?;
        Ok(decide(model, &p, &q, beta, &ctx.grid)?)
    });
    match outcome {
        Ok(v) => BatchRow {
            file,
            verdict: if v.feasible { "feasible" } else { "infeasible" },
            detail: v
                .certificate
                .map(|c| serde_json::to_string(&c).expect("certificate serializes"))
                .unwrap_or_default(),
        },
        Err(e) => BatchRow {
            file,
            verdict: "error",
            detail: e.to_string(),
        },
    }
}

fn run_batch(ctx: &Context, args: BatchArgs, out: &mut dyn Write) -> CliResult<i32> {
    let entries = fs::read_dir(&args.dir).map_err(|source| CliError::Io {
        path: args.dir.clone(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| CliError::Io {
                path: args.dir.clone(),
                source,
            })?
            .path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    let rows: Vec<BatchRow> = paths.par_iter().map(|p| batch_row(p, args.model, ctx)).collect();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["file", "verdict", "detail"])?;
    for r in &rows {
        w.write_record([r.file.as_str(), r.verdict, r.detail.as_str()])?;
    }
    w.flush()?;
    Ok(EXIT_FEASIBLE)
}
