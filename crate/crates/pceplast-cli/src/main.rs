//! `pceplast` — configuration-driven studies of an elastoplastic material
//! point under uncertain parameters.
//!
//! Three verbs: `run` executes a full study (Monte Carlo reference,
//! sparse-grid surrogates, error/R²/timing tables), `grid` exports a
//! quadrature grid, and `trace` slices model and surrogate responses at
//! chosen stochastic points.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure
//! during a run.

use clap::{Args, Parser, Subcommand};
use pceplast::pce::PceSurrogate;
use pceplast::sparse_grid::smolyak;
use pceplast::study::{
    plan_study, resolve, run_study, trace_point, trace_sweep, write_grid_csv, Experiment,
    StudyConfig,
};
use pceplast::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pceplast", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study: Monte Carlo reference, surrogates, and result tables.
    Run(RunArgs),
    /// Write a sparse quadrature grid as CSV and print its point count.
    Grid(GridArgs),
    /// Trace per-step responses at a stochastic point, or sweep one
    /// coordinate at fixed steps.
    Trace(TraceArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON study config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Experiment preset; overrides the config's `experiment` field.
    #[arg(long, value_parser = parse_experiment)]
    experiment: Option<Experiment>,

    /// Expansion degree(s); repeat for several (overrides the config).
    #[arg(long = "pce-degree")]
    pce_degree: Vec<usize>,

    /// Grid accuracy level(s); repeat for several (overrides the config).
    #[arg(long = "grid-level")]
    grid_level: Vec<usize>,

    /// Monte Carlo sample count (2..=1e6).
    #[arg(long = "mc-samples")]
    mc_samples: Option<usize>,

    /// Sampling seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Worker threads (default: one per hardware thread).
    #[arg(long)]
    threads: Option<usize>,

    /// Output directory (falls back to the config's `out`, then $PCEPLAST_OUT).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Validate the config and print the execution plan without writing.
    #[arg(long = "dry-run")]
    dry_run: bool,
}

#[derive(Args)]
struct GridArgs {
    /// Number of stochastic dimensions.
    #[arg(long)]
    dim: usize,

    /// Grid accuracy level.
    #[arg(long = "grid-level")]
    grid_level: usize,

    /// Output CSV path (default: grid_d<dim>_l<level>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Stochastic point, comma-separated (default: all zeros).
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,

    /// Surrogate CSV (as written by `run`) to evaluate alongside the model.
    #[arg(long)]
    surrogate: Option<PathBuf>,

    /// Sweep this coordinate (1-based) instead of tracing a single point.
    #[arg(long = "sweep-coord")]
    sweep_coord: Option<usize>,

    /// Sweep range as `lo,hi`.
    #[arg(long = "sweep-range", default_value = "-3,3", allow_hyphen_values = true)]
    sweep_range: String,

    /// Points in the sweep.
    #[arg(long = "sweep-points", default_value_t = 61)]
    sweep_points: usize,

    /// 1-based load steps reported by a sweep, comma-separated.
    #[arg(long = "at-steps")]
    at_steps: Option<String>,

    /// Output CSV path.
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

fn parse_experiment(s: &str) -> std::result::Result<Experiment, String> {
    match s {
        "exp1" => Ok(Experiment::Exp1),
        "exp2" => Ok(Experiment::Exp2),
        "custom" => Ok(Experiment::Custom),
        other => Err(format!("unknown experiment `{other}` (exp1|exp2|custom)")),
    }
}

/// Loads the config (or starts from a preset) and folds the flag overrides
/// in; the result is what the run manifest echoes.
fn build_config(args: &ConfigArgs) -> Result<StudyConfig> {
    let mut config = match (&args.config, args.experiment) {
        (Some(path), _) => StudyConfig::load(path)?,
        (None, Some(experiment)) => StudyConfig::preset(experiment),
        (None, None) => {
            return Err(Error::Config(
                "pass --config FILE or --experiment exp1|exp2|custom".into(),
            ))
        }
    };
    if let Some(experiment) = args.experiment {
        config.experiment = experiment;
    }
    if !args.pce_degree.is_empty() {
        config.degrees = Some(args.pce_degree.clone());
    }
    if !args.grid_level.is_empty() {
        config.levels = Some(args.grid_level.clone());
    }
    if args.mc_samples.is_some() || args.seed.is_some() {
        let mut mc = config.mc.clone().unwrap_or_default();
        if let Some(n) = args.mc_samples {
            mc.n = n;
        }
        if let Some(seed) = args.seed {
            mc.seed = seed;
        }
        config.mc = Some(mc);
    }
    Ok(config)
}

fn resolve_out_dir(flag: &Option<PathBuf>, config: &StudyConfig) -> Result<PathBuf> {
    if let Some(dir) = flag {
        return Ok(dir.clone());
    }
    if let Some(dir) = &config.out {
        return Ok(dir.clone());
    }
    if let Some(dir) = std::env::var_os("PCEPLAST_OUT") {
        return Ok(PathBuf::from(dir));
    }
    Err(Error::Config(
        "no output directory: pass --out, set `out` in the config, or export PCEPLAST_OUT".into(),
    ))
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("{what}: `{part}`: {e}")))
        })
        .collect()
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| Error::Config(format!("{what}: `{part}`: {e}")))
        })
        .collect()
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let mut config = build_config(&args.config)?;
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    if args.dry_run {
        print!("{}", plan_study(&config)?);
        return Ok(());
    }
    let out_dir = resolve_out_dir(&args.out, &config)?;
    let summary = run_study(&config, &out_dir, args.threads)?;
    println!(
        "wrote {} files to {} (manifest: {})",
        summary.files.len() + 1,
        summary.out_dir.display(),
        summary.manifest.display()
    );
    Ok(())
}

fn cmd_grid(args: &GridArgs) -> Result<()> {
    let grid = smolyak(args.dim, args.grid_level)?;
    let out = args.out.clone().unwrap_or_else(|| {
        PathBuf::from(format!("grid_d{}_l{}.csv", args.dim, args.grid_level))
    });
    let count = write_grid_csv(&grid, &out)?;
    println!("{count} points -> {}", out.display());
    Ok(())
}

fn cmd_trace(args: &TraceArgs) -> Result<()> {
    let config = build_config(&args.config)?;
    let study = resolve(&config)?;
    let dim = study.input.dimension();
    let xi = match &args.xi {
        Some(text) => parse_f64_list(text, "--xi")?,
        None => vec![0.0; dim],
    };
    let surrogate = args
        .surrogate
        .as_deref()
        .map(PceSurrogate::read_csv)
        .transpose()?;

    match args.sweep_coord {
        None => trace_point(&study, &xi, surrogate.as_ref(), &args.out)?,
        Some(coord) => {
            if coord < 1 {
                return Err(Error::Config("--sweep-coord is 1-based".into()));
            }
            let range = parse_f64_list(&args.sweep_range, "--sweep-range")?;
            let [lo, hi] = range[..] else {
                return Err(Error::Config("--sweep-range wants `lo,hi`".into()));
            };
            let steps_text = args.at_steps.as_deref().ok_or_else(|| {
                Error::Config("a sweep needs --at-steps (1-based load steps)".into())
            })?;
            let at_steps = parse_usize_list(steps_text, "--at-steps")?;
            trace_sweep(
                &study,
                &xi,
                coord - 1,
                lo,
                hi,
                args.sweep_points,
                &at_steps,
                surrogate.as_ref(),
                &args.out,
            )?;
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Grid(args) => cmd_grid(&args),
        Command::Trace(args) => cmd_trace(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
