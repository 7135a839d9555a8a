//! Command-line front end for `kcycle-core`.

pub mod record;

use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kcycle_core::bench::{bench_cell, ConvergeSpec};
use kcycle_core::costmodel::{
    fit_params_weighted, level_calls, model_ops, n_gpu_calls, predict_components, total_calls,
    turning_point, CostModelParams, FitWeighting, Kappa, Observation,
};
use kcycle_core::cycle::{solve_standalone, CycleConfig, SolveOutcome};
use kcycle_core::krylov::{solve_pcg, PcgConfig};
use kcycle_core::mesh::Coarsening;
use kcycle_core::operator::{CoarseOperator, ProblemSpec, Rhs};
use kcycle_core::smoother::{SmootherKind, SmootherSpec, DEFAULT_OMEGA};
use kcycle_core::MgError;

use record::{RunConfig, RunRecord, SolverKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_FIT_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "kcycle", version, about = "Kappa-cycle multigrid solver, call counts and run-time model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the rotated anisotropic diffusion problem and print a run record
    Solve(SolveArgs),
    /// Per-level and total routine calls of one cycle
    Calls(CallsArgs),
    /// Model run time of one cycle
    Predict(PredictArgs),
    /// Fit launch and operation costs from a `kappa,levels,ms` CSV
    Fit(FitArgs),
    /// Problem size where launch overhead equals computation time
    TurningPoint(TurningArgs),
    /// Time single cycles over a (kappa, levels) sweep and emit CSV
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmootherArg {
    Jacobi,
    /// Alternating x/y zebra line relaxation
    ZebraXy,
    /// Zebra relaxation along x lines
    ZebraX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoarseningArg {
    Full,
    SemiY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Standalone,
    Pcg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoarseOpArg {
    Galerkin,
    Rediscretize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Relative,
    Absolute,
}

fn parse_kappa(s: &str) -> Result<Kappa, String> {
    s.parse::<Kappa>().map_err(|e| e.to_string())
}

/// Problem and cycle flags shared by `solve` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Anisotropy strength in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Rotation angle in degrees
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Constant right-hand side; the default zero RHS measures the error norm
    #[arg(long)]
    pub rhs: Option<f64>,
    #[arg(long, value_enum, default_value_t = SmootherArg::Jacobi)]
    pub smoother: SmootherArg,
    /// Defaults to semi-y for zebra-x and full otherwise
    #[arg(long, value_enum)]
    pub coarsening: Option<CoarseningArg>,
    /// Jacobi damping factor
    #[arg(long, default_value_t = DEFAULT_OMEGA)]
    pub omega: f64,
    #[arg(long, default_value_t = 2)]
    pub nu1: usize,
    #[arg(long, default_value_t = 2)]
    pub nu2: usize,
    #[arg(long, value_enum, default_value_t = CoarseOpArg::Galerkin)]
    pub coarse_op: CoarseOpArg,
    /// Seed of the random initial guess
    #[arg(long, default_value_t = kcycle_core::operator::DEFAULT_SEED)]
    pub seed: u64,
}

impl ProblemArgs {
    pub fn problem(&self) -> ProblemSpec {
        let mut p = ProblemSpec::new(self.eps, self.phi);
        p.seed = self.seed;
        if let Some(c) = self.rhs {
            p.rhs = Rhs::Constant(c);
        }
        p
    }

    /// Cycle configuration plus any pairing warning.
    pub fn cycle(&self, levels: usize, kappa: Kappa) -> (CycleConfig, Option<String>) {
        let smoother = match self.smoother {
            SmootherArg::Jacobi => SmootherSpec::jacobi(self.omega),
            SmootherArg::ZebraXy => SmootherSpec::zebra(SmootherKind::ZebraAlternating),
            SmootherArg::ZebraX => SmootherSpec::zebra(SmootherKind::ZebraX),
        };
        let paired = match self.smoother {
            SmootherArg::ZebraX => CoarseningArg::SemiY,
            _ => CoarseningArg::Full,
        };
        let chosen = self.coarsening.unwrap_or(paired);
        let warning = (chosen != paired).then(|| {
            format!(
                "warning: smoother {:?} is normally paired with {:?} coarsening, running with {:?}",
                self.smoother, paired, chosen
            )
        });
        let config = CycleConfig {
            kappa,
            gamma: 1,
            nu1: self.nu1,
            nu2: self.nu2,
            smoother,
            coarsening: match chosen {
                CoarseningArg::Full => Coarsening::FullStandard,
                CoarseningArg::SemiY => Coarsening::SemiY,
            },
            coarse_op: match self.coarse_op {
                CoarseOpArg::Galerkin => CoarseOperator::Galerkin,
                CoarseOpArg::Rediscretize => CoarseOperator::Rediscretize,
            },
            n: levels,
        };
        (config, warning)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub levels: usize,
    /// Cycle counter: positive integer or "inf"
    #[arg(long, value_parser = parse_kappa, default_value = "1")]
    pub kappa: Kappa,
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Required reduction of the stopping norm
    #[arg(long, default_value_t = 1e8)]
    pub reduction: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_cycles: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::Standalone)]
    pub solver: SolverArg,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct CallsArgs {
    #[arg(long, value_parser = parse_kappa)]
    pub kappa: Kappa,
    #[arg(long)]
    pub levels: u32,
    /// Relaxations per routine call, for the launch count
    #[arg(long, default_value_t = 4)]
    pub nu: u32,
    /// Plain text unless set
    #[arg(long, value_enum)]
    pub out: Option<OutFormat>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// ms per kernel-equivalent launch
    #[arg(long)]
    pub alpha: f64,
    /// ms per operation unit
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 4)]
    pub nu: u32,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated counters
    #[arg(long, value_parser = parse_kappa, value_delimiter = ',', default_value = "1,2,3,4,inf")]
    pub kappa: Vec<Kappa>,
    /// Comma-separated level counts or inclusive ranges such as 4..13
    #[arg(long, value_delimiter = ',', default_value = "4..13")]
    pub levels: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header `kappa,levels,ms`; `-` reads stdin
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub nu: u32,
    /// Coarsening factor of the operation model
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = WeightingArg::Relative)]
    pub weighting: WeightingArg,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct TurningArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_kappa, value_delimiter = ',', default_value = "1,2,3,4,inf")]
    pub kappa: Vec<Kappa>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_kappa, value_delimiter = ',', default_value = "1,2,3,4,inf")]
    pub kappa: Vec<Kappa>,
    /// Comma-separated level counts or inclusive ranges such as 4..10
    #[arg(long, value_delimiter = ',', default_value = "4..10")]
    pub levels: Vec<String>,
    /// Timed repetitions per cell; 0 gives counts only
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Also solve each cell and report cycles to the target reduction
    #[arg(long)]
    pub converge: bool,
    #[arg(long, default_value_t = 1e8)]
    pub reduction: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_cycles: usize,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Fit(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<MgError> for CliError {
    fn from(e: MgError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Fit(_) => EXIT_FIT_FAILED,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Fit(m) => write!(f, "fit failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Expands `4,6..8` into `[4, 6, 7, 8]`.
pub fn expand_levels(items: &[String]) -> Result<Vec<usize>, CliError> {
    let bad = |s: &str| CliError::Usage(format!("invalid level list entry {s:?}"));
    let mut out = Vec::new();
    for item in items {
        let item = item.trim();
        if let Some((a, b)) = item.split_once("..") {
            let lo: usize = a.trim().parse().map_err(|_| bad(item))?;
            let hi: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad(item))?;
            if lo > hi {
                return Err(bad(item));
            }
            out.extend(lo..=hi);
        } else {
            out.push(item.parse().map_err(|_| bad(item))?);
        }
    }
    if out.iter().any(|&n| n == 0) {
        return Err(CliError::Usage("level counts must be >= 1".into()));
    }
    Ok(out)
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Calls(a) => cmd_calls(&a, out).map(|_| EXIT_OK),
        Command::Predict(a) => cmd_predict(&a, out).map(|_| EXIT_OK),
        Command::Fit(a) => cmd_fit(&a, out).map(|_| EXIT_OK),
        Command::TurningPoint(a) => cmd_turning_point(&a, out).map(|_| EXIT_OK),
        Command::Bench(a) => cmd_bench(&a, out, err).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let problem = args.problem.problem();
    let (cycle, warning) = args.problem.cycle(args.levels, args.kappa);
    if let Some(w) = warning {
        writeln!(err, "{w}")?;
    }
    cycle.validate()?;
    let report = match args.solver {
        SolverArg::Standalone => solve_standalone(&problem, &cycle, args.reduction, args.max_cycles)?,
        SolverArg::Pcg => solve_pcg(
            &problem,
            &PcgConfig {
                cycle,
                target_reduction: args.reduction,
                max_iterations: args.max_cycles,
            },
        )?,
    };
    let record = RunRecord::new(
        RunConfig {
            solver: match args.solver {
                SolverArg::Standalone => SolverKind::Standalone,
                SolverArg::Pcg => SolverKind::Pcg,
            },
            problem,
            cycle,
            target_reduction: args.reduction,
            max_iterations: args.max_cycles,
        },
        &report,
    );
    match args.out {
        OutFormat::Json => {
            serde_json::to_writer(&mut *out, &record).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        OutFormat::Csv => {
            writeln!(out, "{}", RunRecord::CSV_HEADER)?;
            writeln!(out, "{}", record.csv_row())?;
        }
    }
    Ok(outcome_exit_code(report.outcome))
}

pub fn outcome_exit_code(outcome: SolveOutcome) -> i32 {
    match outcome {
        SolveOutcome::Converged => EXIT_OK,
        SolveOutcome::Diverged | SolveOutcome::Breakdown => EXIT_DIVERGED,
        SolveOutcome::MaxIterations => EXIT_NOT_CONVERGED,
    }
}

#[derive(Serialize)]
struct CallsReport {
    kappa: Kappa,
    levels: u32,
    level_calls: Vec<u128>,
    total_calls: u128,
    launches: u128,
}

pub fn cmd_calls(args: &CallsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.levels < 1 {
        return Err(CliError::Usage("--levels must be >= 1".into()));
    }
    let per_level = (1..=args.levels)
        .map(|l| level_calls(args.kappa, l))
        .collect::<Result<Vec<_>, _>>()?;
    let report = CallsReport {
        kappa: args.kappa,
        levels: args.levels,
        total_calls: total_calls(args.kappa, args.levels)?,
        launches: n_gpu_calls(args.kappa, args.levels, args.nu)?,
        level_calls: per_level,
    };
    match args.out {
        None => {
            let row: Vec<String> = report.level_calls.iter().map(u128::to_string).collect();
            writeln!(out, "levels: {}", row.join(" "))?;
            writeln!(out, "total: {}", report.total_calls)?;
            writeln!(out, "launches: {}", report.launches)?;
        }
        Some(OutFormat::Json) => {
            serde_json::to_writer(&mut *out, &report).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Some(OutFormat::Csv) => {
            writeln!(out, "level,calls")?;
            for (l, c) in report.level_calls.iter().enumerate() {
                writeln!(out, "{},{c}", l + 1)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PredictRow {
    kappa: Kappa,
    levels: u32,
    launches: u128,
    ops: f64,
    launch_ms: f64,
    op_ms: f64,
    predicted_ms: f64,
}

pub fn cmd_predict(args: &PredictArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = CostModelParams::new(args.model.alpha, args.model.beta, args.model.nu);
    let levels = expand_levels(&args.levels)?;
    let mut rows = Vec::new();
    for &kappa in &args.kappa {
        for &n in &levels {
            let n = n as u32;
            let (launch_ms, op_ms) = predict_components(&params, kappa, n)?;
            rows.push(PredictRow {
                kappa,
                levels: n,
                launches: n_gpu_calls(kappa, n, params.nu)?,
                ops: model_ops(kappa, n, params.c)?,
                launch_ms,
                op_ms,
                predicted_ms: launch_ms + op_ms,
            });
        }
    }
    match args.out {
        OutFormat::Json => {
            serde_json::to_writer(&mut *out, &rows).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        OutFormat::Csv => {
            writeln!(out, "kappa,levels,launches,ops,launch_ms,op_ms,predicted_ms")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.kappa, r.levels, r.launches, r.ops, r.launch_ms, r.op_ms, r.predicted_ms
                )?;
            }
        }
    }
    Ok(())
}

/// Parses timing CSV with `kappa`, `levels` and `ms` (or `mean_ms`, as
/// written by `kcycle bench`) columns. Other columns are ignored.
pub fn parse_observations(reader: impl BufRead) -> Result<Vec<Observation>, CliError> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(CliError::Usage("empty timing file".into())),
        }
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |names: &[&str]| cols.iter().position(|c| names.contains(c));
    let (Some(ik), Some(il), Some(im)) = (find(&["kappa"]), find(&["levels"]), find(&["ms", "mean_ms"])) else {
        return Err(CliError::Usage(format!(
            "expected kappa, levels and ms columns, got {header:?}"
        )));
    };
    let mut obs = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || CliError::Usage(format!("line {}: malformed row {line:?}", i + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(bad());
        }
        obs.push(Observation {
            kappa: fields[ik].parse().map_err(|_| bad())?,
            levels: fields[il].parse().map_err(|_| bad())?,
            ms: fields[im].parse().map_err(|_| bad())?,
        });
    }
    Ok(obs)
}

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let obs = if args.input.as_os_str() == "-" {
        parse_observations(io::stdin().lock())?
    } else {
        let file = std::fs::File::open(&args.input)
            .map_err(|e| CliError::Usage(format!("{}: {e}", args.input.display())))?;
        parse_observations(io::BufReader::new(file))?
    };
    let weighting = match args.weighting {
        WeightingArg::Relative => FitWeighting::Relative,
        WeightingArg::Absolute => FitWeighting::Absolute,
    };
    let (alpha, beta) = match fit_params_weighted(&obs, args.nu, args.c, weighting) {
        Ok(p) => p,
        Err(MgError::RankDeficient) => {
            return Err(CliError::Fit(format!(
                "rank-deficient design over {} observations",
                obs.len()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    match args.out {
        OutFormat::Json => {
            let v = serde_json::json!({
                "alpha_ms": alpha,
                "beta_ms": beta,
                "observations": obs.len(),
            });
            writeln!(out, "{v}")?;
        }
        OutFormat::Csv => {
            writeln!(out, "alpha_ms,beta_ms")?;
            writeln!(out, "{alpha},{beta}")?;
        }
    }
    Ok(())
}

pub fn cmd_turning_point(args: &TurningArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = CostModelParams::new(args.model.alpha, args.model.beta, args.model.nu);
    let mut rows = Vec::new();
    for &kappa in &args.kappa {
        rows.push((kappa, turning_point(&params, kappa)?));
    }
    match args.out {
        OutFormat::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(k, tp)| serde_json::json!({ "kappa": k, "turning_point": tp }))
                .collect();
            writeln!(out, "{}", serde_json::Value::Array(v))?;
        }
        OutFormat::Csv => {
            writeln!(out, "kappa,n_tp,unknowns_tp,iterations,status")?;
            for (k, tp) in rows {
                let status = serde_json::to_value(tp.status).map_err(io::Error::from)?;
                writeln!(
                    out,
                    "{k},{},{},{},{}",
                    tp.n_tp,
                    tp.unknowns_tp,
                    tp.iterations,
                    status.as_str().unwrap_or_default()
                )?;
            }
        }
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let levels = expand_levels(&args.levels)?;
    let problem = args.problem.problem();
    let converge = args.converge.then_some(ConvergeSpec {
        target_reduction: args.reduction,
        max_cycles: args.max_cycles,
    });
    let mut header = "kappa,levels,mean_ms,launches,op_units".to_string();
    if args.converge {
        header.push_str(",cycles_to_target");
    }
    writeln!(out, "{header}")?;
    let mut warned = false;
    for &kappa in &args.kappa {
        for &n in &levels {
            let (config, warning) = args.problem.cycle(n, kappa);
            if let (Some(w), false) = (warning, warned) {
                writeln!(err, "{w}")?;
                warned = true;
            }
            let row = bench_cell(&problem, &config, args.reps, converge)?;
            let mean = row.mean_ms.map(|m| m.to_string()).unwrap_or_default();
            write!(out, "{},{},{mean},{},{}", row.kappa, row.levels, row.launches, row.op_units)?;
            if args.converge {
                let cycles = row.cycles_to_target.map(|c| c.to_string()).unwrap_or_default();
                write!(out, ",{cycles}")?;
            }
            writeln!(out)?;
            out.flush()?;
        }
    }
    Ok(())
}
