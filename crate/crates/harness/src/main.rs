use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shqp_core::solvers::TerminalStatus;
use shqp_harness::config::{
    Algorithm, ConfigError, ExperimentConfig, FallbackDef, Format, ProblemDef, StartDef, X0Def,
};
use shqp_harness::experiment::run;
use shqp_harness::output::{report_json, trace_csv, write_file, write_outcome};
use shqp_harness::sweep::{run_sweep, sweep_csv};
use shqp_harness::{gallery, Error};

const EXIT_OTHER: u8 = 1;
const EXIT_MAX_ITERATIONS: u8 = 2;
const EXIT_FALLBACK_EXHAUSTED: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Supporting-halfspace QP solvers for nonconvex set intersection problems.
#[derive(Debug, Parser)]
#[command(name = "shqp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its trace and report.
    Run(RunArgs),
    /// Run a config over its sweep grid and write one row per grid point.
    Sweep(SweepArgs),
    /// List gallery problems and algorithms.
    List,
    /// Check a JSON config without running it.
    ValidateConfig {
        /// Path to the JSON config.
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FallbackArg {
    Ladder,
    Abort,
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gallery problem name.
    #[arg(long)]
    problem: Option<String>,
    /// map, basic-shqp, mass, memory-shqp, two-shqp, averaged or global.
    #[arg(long)]
    algorithm: Option<String>,
    /// Start point `a,b,...` or `ball:R` for a seeded draw around the known solution.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    /// Memory depth.
    #[arg(long)]
    pbar: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    fallback: Option<FallbackArg>,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output formats (repeatable or comma-separated).
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Vec<FormatArg>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Record wall-clock time in the report (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Comma-separated tau values.
    #[arg(long, value_delimiter = ',')]
    taus: Vec<f64>,
    /// Comma-separated memory depths.
    #[arg(long, value_delimiter = ',')]
    pbars: Vec<usize>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
}

fn read_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(ExperimentConfig::from_json(&text)?)
}

fn parse_x0(s: &str) -> Result<X0Def, Error> {
    if let Some(r) = s.strip_prefix("ball:") {
        let radius = r
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("bad radius in --x0 `{s}`")))?;
        return Ok(X0Def::Random(StartDef::RandomBall { radius }));
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map(X0Def::Point)
        .map_err(|_| Error::Usage(format!("bad --x0 `{s}`")))
}

fn build_config(o: &Overrides) -> Result<ExperimentConfig, Error> {
    let algorithm = o
        .algorithm
        .as_deref()
        .map(|a| {
            Algorithm::parse(a).ok_or_else(|| Error::Usage(format!("unknown algorithm `{a}`")))
        })
        .transpose()?;
    let mut cfg = match (&o.config, &o.problem, algorithm) {
        (Some(path), _, _) => read_config(path)?,
        (None, Some(p), Some(a)) => ExperimentConfig::new(ProblemDef::Named(p.clone()), a),
        (None, _, _) => {
            return Err(Error::Usage(
                "need --config or both --problem and --algorithm".into(),
            ))
        }
    };
    if let Some(p) = &o.problem {
        cfg.problem = ProblemDef::Named(p.clone());
    }
    if let Some(a) = algorithm {
        cfg.algorithm = a;
    }
    if let Some(x) = &o.x0 {
        cfg.x0 = Some(parse_x0(x)?);
    }
    if let Some(t) = o.tau {
        cfg.tau = t;
    }
    if let Some(p) = o.pbar {
        cfg.pbar = p;
    }
    if let Some(s) = o.seed {
        cfg.rng_seed = s;
    }
    if let Some(k) = o.max_iters {
        cfg.max_iters = k;
    }
    if let Some(t) = o.tol {
        cfg.tol = t;
    }
    if let Some(f) = o.fallback {
        cfg.fallback = match f {
            FallbackArg::Ladder => FallbackDef::Ladder,
            FallbackArg::Abort => FallbackDef::Abort,
        };
    }
    if let Some(d) = &o.out_dir {
        cfg.outputs.dir = Some(d.display().to_string());
    }
    if !o.format.is_empty() {
        cfg.outputs.formats = o
            .format
            .iter()
            .map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            })
            .collect();
    }
    Ok(cfg)
}

fn status_code(status: TerminalStatus) -> u8 {
    match status {
        TerminalStatus::Converged => 0,
        TerminalStatus::MaxIterations => EXIT_MAX_ITERATIONS,
        TerminalStatus::QpInfeasibleFallbackExhausted => EXIT_FALLBACK_EXHAUSTED,
    }
}

fn cmd_run(args: &RunArgs) -> Result<u8, Error> {
    let cfg = build_config(&args.overrides)?;
    let outcome = run(&cfg)?;
    match &cfg.outputs.dir {
        Some(dir) => {
            for p in write_outcome(&outcome, Path::new(dir), &cfg.outputs.formats, args.timing)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            for f in &cfg.outputs.formats {
                match f {
                    Format::Csv => print!("{}", trace_csv(&outcome.trace)),
                    Format::Json => print!("{}", report_json(&outcome, args.timing)),
                }
            }
        }
    }
    eprintln!("{}", outcome.trace.status);
    Ok(status_code(outcome.trace.status))
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, Error> {
    let mut cfg = build_config(&args.overrides)?;
    if !args.taus.is_empty() {
        cfg.sweep.tau = args.taus.clone();
    }
    if !args.pbars.is_empty() {
        cfg.sweep.pbar = args.pbars.clone();
    }
    if !args.seeds.is_empty() {
        cfg.sweep.seeds = args.seeds.clone();
    }
    let rows = run_sweep(&cfg)?;
    let body = sweep_csv(&rows);
    match &cfg.outputs.dir {
        Some(dir) => {
            let path = Path::new(dir).join("sweep.csv");
            write_file(&path, &body)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{body}"),
    }
    Ok(0)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn cmd_list() -> Result<u8, Error> {
    println!("problems:");
    println!(
        "  {:<18} {:>3} {:>3} {:>8} {:>8}  note",
        "name", "m", "n", "beta", "eta"
    );
    for e in gallery::all() {
        println!(
            "  {:<18} {:>3} {:>3} {:>8} {:>8}  {}",
            e.name,
            e.problem.set_count(),
            e.problem.dimension(),
            fmt_opt(e.certified.beta),
            fmt_opt(e.certified.eta),
            e.note
        );
    }
    println!("algorithms:");
    for a in Algorithm::ALL {
        println!("  {}", a.name());
    }
    Ok(0)
}

fn cmd_validate(path: &Path) -> Result<u8, Error> {
    let cfg = read_config(path)?;
    cfg.resolve()?;
    println!("ok");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::List => cmd_list(),
        Command::ValidateConfig { path } => cmd_validate(path),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                Error::Config(ConfigError::Invalid { .. } | ConfigError::UnknownProblem(_))
                | Error::Usage(_) => EXIT_USAGE,
                Error::Io { .. } if matches!(&cli.command, Command::ValidateConfig { .. }) => {
                    EXIT_USAGE
                }
                _ => EXIT_OTHER,
            };
            ExitCode::from(code)
        }
    }
}
