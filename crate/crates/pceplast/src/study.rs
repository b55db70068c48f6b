//! Study orchestration: configuration schema, the two built-in experiment
//! presets, and the end-to-end pipeline that produces every output table.
//!
//! A study is resolved from a [`StudyConfig`] into concrete marginals, a
//! load path, and a `(degree, level)` product, then executed as:
//! Monte Carlo reference → per-level snapshot collection (cached on disk)
//! → projection per degree → sampled/analytic surrogate statistics →
//! error, R², error-versus-n, and timing tables, plus a JSON manifest.
//!
//! Everything numeric in the CSV outputs is a pure function of
//! `(config, seed)`; wall-clock measurements are confined to `timing.csv`
//! and the manifest.

use crate::analysis::{
    analytic_stats, archive_prefix_stats, ladder_for, mc_reference, prefix_stats,
    r_squared_series, relative_error, sample_surrogate, AnalyticStats, StatSeries, TimingRecord,
};
use crate::collocation::{
    build_from_snapshots, collect_snapshots, read_snapshot_cache, study_hash,
    write_snapshot_cache, Provenance,
};
use crate::io::{fmt_f64, CsvWriter};
use crate::material::{run_uniaxial, LoadPath};
use crate::pce::PceSurrogate;
use crate::random::{MarginalSpec, StochasticInput};
use crate::sparse_grid::{smolyak, SparseGrid};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Hard cap on Monte Carlo sample counts accepted from configs.
pub const MAX_MC_SAMPLES: usize = 1_000_000;
/// Default Monte Carlo budget: resolves the 0.01-quantile while staying
/// desk-scale.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Exp1,
    Exp2,
    Custom,
}

impl Experiment {
    pub fn label(self) -> &'static str {
        match self {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2 => "exp2",
            Experiment::Custom => "custom",
        }
    }
}

/// Load path description as it appears in configs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub steps: usize,
    pub eps_max: f64,
    #[serde(default)]
    pub unload: bool,
}

impl PathSpec {
    pub fn build(&self) -> Result<LoadPath> {
        if self.unload {
            LoadPath::ramp_unload(self.steps, self.eps_max)
        } else {
            LoadPath::ramp(self.steps, self.eps_max)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub n: usize,
    pub seed: u64,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec {
            n: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

/// One study, as read from a JSON config file. Unknown keys are rejected.
///
/// The `exp1`/`exp2` presets lock `marginals` and `path` to the built-in
/// values; supplying either alongside a preset is a config error, and a
/// `custom` study must supply both. `degrees`, `levels`, `mc`, and `out`
/// may always be set and default per experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginals: Option<StochasticInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl StudyConfig {
    pub fn preset(experiment: Experiment) -> Self {
        StudyConfig {
            experiment,
            marginals: None,
            path: None,
            degrees: None,
            levels: None,
            mc: None,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// A validated, fully-specified study ready to execute.
#[derive(Clone, Debug)]
pub struct ResolvedStudy {
    pub label: String,
    pub input: StochasticInput,
    pub path_spec: PathSpec,
    pub path: LoadPath,
    pub degrees: Vec<usize>,
    pub levels: Vec<usize>,
    pub n: usize,
    pub seed: u64,
}

fn exp1_marginals() -> StochasticInput {
    StochasticInput {
        young: MarginalSpec::Lognormal {
            mean: 210e9,
            std: 21e9,
        },
        nu: MarginalSpec::Constant { value: 0.3 },
        sigma_y0: MarginalSpec::Constant { value: 235e6 },
        hardening: MarginalSpec::Constant { value: 2.1e9 },
    }
}

fn exp2_marginals() -> StochasticInput {
    StochasticInput {
        young: MarginalSpec::Lognormal {
            mean: 210e9,
            std: 21e9,
        },
        nu: MarginalSpec::Lognormal {
            mean: 0.3,
            std: 0.015,
        },
        sigma_y0: MarginalSpec::Lognormal {
            mean: 235e6,
            std: 23.5e6,
        },
        hardening: MarginalSpec::Lognormal {
            mean: 2.1e9,
            std: 0.21e9,
        },
    }
}

/// Validates a config and fills preset values and defaults.
pub fn resolve(config: &StudyConfig) -> Result<ResolvedStudy> {
    let (input, path_spec, default_degrees, default_levels) = match config.experiment {
        Experiment::Exp1 => {
            if config.marginals.is_some() || config.path.is_some() {
                return Err(Error::Config(
                    "exp1 locks marginals and path to its preset; use \"custom\" to change them"
                        .into(),
                ));
            }
            (
                exp1_marginals(),
                PathSpec {
                    steps: 80,
                    eps_max: 2.8e-3,
                    unload: false,
                },
                vec![1, 3, 5],
                vec![5, 9, 10, 17, 18],
            )
        }
        Experiment::Exp2 => {
            if config.marginals.is_some() || config.path.is_some() {
                return Err(Error::Config(
                    "exp2 locks marginals and path to its preset; use \"custom\" to change them"
                        .into(),
                ));
            }
            (
                exp2_marginals(),
                PathSpec {
                    steps: 300,
                    eps_max: 2.8e-3,
                    unload: true,
                },
                vec![1, 5],
                vec![5, 10],
            )
        }
        Experiment::Custom => {
            let marginals = config.marginals.clone().ok_or_else(|| {
                Error::Config("custom study requires explicit marginals".into())
            })?;
            let path = config
                .path
                .ok_or_else(|| Error::Config("custom study requires an explicit path".into()))?;
            (marginals, path, vec![1], vec![2])
        }
    };
    input.validate()?;
    let path = path_spec.build()?;
    let degrees = config.degrees.clone().unwrap_or(default_degrees);
    let levels = config.levels.clone().unwrap_or(default_levels);
    if degrees.is_empty() || levels.is_empty() {
        return Err(Error::Config(
            "degrees and levels must each list at least one entry".into(),
        ));
    }
    let mc = config.mc.clone().unwrap_or_default();
    if mc.n < 2 || mc.n > MAX_MC_SAMPLES {
        return Err(Error::Config(format!(
            "mc.n = {} outside 2..={MAX_MC_SAMPLES}",
            mc.n
        )));
    }
    Ok(ResolvedStudy {
        label: config.experiment.label().to_string(),
        input,
        path_spec,
        path,
        degrees,
        levels,
        n: mc.n,
        seed: mc.seed,
    })
}

/// Builds the study's grids, rejecting level lists that collapse to the
/// same point count (identical rules would silently overwrite each other's
/// outputs).
fn build_grids(study: &ResolvedStudy) -> Result<Vec<SparseGrid>> {
    let dim = study.input.dimension();
    let mut grids = Vec::with_capacity(study.levels.len());
    for &level in &study.levels {
        let grid = smolyak(dim, level)?;
        if let Some(prev) = grids
            .iter()
            .find(|g: &&SparseGrid| g.len() == grid.len())
        {
            return Err(Error::Config(format!(
                "levels {} and {} both produce {} points; drop one",
                prev.level(),
                level,
                grid.len()
            )));
        }
        grids.push(grid);
    }
    Ok(grids)
}

/// Human-readable execution plan for `--dry-run`: evaluation counts and
/// the files a run would write. Performs full validation, writes nothing.
pub fn plan_study(config: &StudyConfig) -> Result<String> {
    let study = resolve(config)?;
    let grids = build_grids(&study)?;
    let mut out = String::new();
    let dim = study.input.dimension();
    out.push_str(&format!(
        "study {}: {} random coordinate(s) {:?}, {} load steps, mc n={} seed={}\n",
        study.label,
        dim,
        study.input.coordinate_names(),
        study.path.len(),
        study.n,
        study.seed
    ));
    let mut model_evals = study.n;
    for grid in &grids {
        out.push_str(&format!(
            "grid level {:2}: {:5} points ({} model evaluations)\n",
            grid.level(),
            grid.len(),
            grid.len()
        ));
        model_evals += grid.len();
    }
    for grid in &grids {
        for &p in &study.degrees {
            let r = crate::pce::basis_size(dim.max(1), p)?;
            out.push_str(&format!(
                "surrogate p={p} i={}: {r} basis terms, {} sampled evaluations\n",
                grid.len(),
                study.n
            ));
        }
    }
    out.push_str(&format!("total model evaluations: {model_evals}\n"));
    out.push_str("writes: manifest.json mc_stats.csv mc_archive.bin errors.csv r2.csv err_vs_n.csv timing.csv");
    out.push_str(" + per-grid snapshots_i*.csv(+.provenance.json) + per-config surrogate_p*_i*.csv, surrogate_stats_p*_i*.csv\n");
    Ok(out)
}

/// Everything `run_study` leaves behind.
#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: PathBuf,
    /// Files written, in creation order, relative to `out_dir`.
    pub files: Vec<String>,
}

struct ConfigResult {
    degree: usize,
    points: usize,
    e_mean: f64,
    e_std: f64,
    e_q01: f64,
    r2: Vec<f64>,
    /// `(metric, ladder errors)` triples in ladder order.
    ladder_errors: Vec<[f64; 3]>,
}

/// Runs a full study into `out_dir` on a dedicated pool of `threads`
/// workers (`None`: one per hardware thread). The manifest is written even
/// when the run fails partway, with `status: "failed"` and the files
/// produced so far.
pub fn run_study(
    config: &StudyConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<RunSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_study_pinned(config, out_dir))
}

fn run_study_pinned(config: &StudyConfig, out_dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::file(out_dir, e))?;
    let started = Instant::now();
    let mut files: Vec<String> = Vec::new();
    let result = execute_study(config, out_dir, &mut files);
    let wall = started.elapsed().as_secs_f64();

    let manifest_path = out_dir.join("manifest.json");
    let manifest = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "status": match &result { Ok(_) => "complete", Err(_) => "failed" },
        "error": match &result { Ok(_) => serde_json::Value::Null, Err(e) => e.to_string().into() },
        "wall_seconds": wall,
        "outputs": files,
    });
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )
    .map_err(|e| Error::file(&manifest_path, e))?;
    result?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        manifest: manifest_path,
        files,
    })
}

fn execute_study(config: &StudyConfig, out_dir: &Path, files: &mut Vec<String>) -> Result<()> {
    let study = resolve(config)?;
    let grids = build_grids(&study)?;
    let steps = study.path.len();
    let ladder = ladder_for(study.n);
    let mut timings: Vec<(String, TimingRecord)> = Vec::new();

    // Monte Carlo reference.
    let clock = Instant::now();
    let (mc_stats, archive) = mc_reference(
        &study.input,
        &study.path,
        study.n,
        study.seed,
        &out_dir.join("mc_archive.bin"),
    )?;
    timings.push((
        "mc".into(),
        TimingRecord {
            n_model_evals: study.n,
            model_eval_seconds: clock.elapsed().as_secs_f64(),
            ..TimingRecord::default()
        },
    ));
    files.push("mc_archive.bin".into());
    write_stat_series(&out_dir.join("mc_stats.csv"), &mc_stats)?;
    files.push("mc_stats.csv".into());

    // Reference statistics at ladder prefixes (self-convergence columns).
    let mut mc_ladder: Vec<StatSeries> = Vec::new();
    for &m in &ladder {
        mc_ladder.push(archive_prefix_stats(&archive, m)?);
    }

    let hash = study_hash(&study.input, &study.path);
    let mut results: Vec<ConfigResult> = Vec::new();

    for grid in &grids {
        // Snapshots for this grid, reused from the cache when the study
        // hash and grid identity match.
        let snap_csv = out_dir.join(format!("snapshots_i{}.csv", grid.len()));
        let snap_sidecar = out_dir.join(format!("snapshots_i{}.provenance.json", grid.len()));
        let expected = Provenance {
            study_hash: hash.clone(),
            grid_level: grid.level(),
            grid_points: grid.len(),
            degree: 0,
            basis_len: 0,
            steps,
            version: env!("CARGO_PKG_VERSION").into(),
        };
        let clock = Instant::now();
        let (snapshots, fresh) = match read_snapshot_cache(&snap_csv, &snap_sidecar, &expected)? {
            Some(cached) => (cached, false),
            None => (collect_snapshots(&study.input, &study.path, grid)?, true),
        };
        timings.push((
            format!("snapshots_i{}", grid.len()),
            TimingRecord {
                n_model_evals: if fresh { grid.len() } else { 0 },
                model_eval_seconds: clock.elapsed().as_secs_f64(),
                ..TimingRecord::default()
            },
        ));

        for &degree in &study.degrees {
            let label = format!("p{}_i{}", degree, grid.len());
            let clock = Instant::now();
            let (surrogate, provenance) =
                build_from_snapshots(&study.input, &study.path, &snapshots, grid, degree)?;
            let build_seconds = clock.elapsed().as_secs_f64();
            if fresh && degree == study.degrees[0] {
                write_snapshot_cache(&snap_csv, &snap_sidecar, &snapshots, &provenance)?;
            }
            if degree == study.degrees[0] {
                files.push(snap_csv.file_name().unwrap().to_string_lossy().into());
                files.push(snap_sidecar.file_name().unwrap().to_string_lossy().into());
            }
            let surrogate_csv = format!("surrogate_{label}.csv");
            surrogate.write_csv(&out_dir.join(&surrogate_csv))?;
            files.push(surrogate_csv);

            let clock = Instant::now();
            let samples = sample_surrogate(&surrogate, study.n, study.seed)?;
            let sampling_seconds = clock.elapsed().as_secs_f64();
            timings.push((
                label.clone(),
                TimingRecord {
                    surrogate_build_seconds: build_seconds,
                    surrogate_sampling_seconds: sampling_seconds,
                    n_surrogate_samples: study.n,
                    ..TimingRecord::default()
                },
            ));

            let sampled = prefix_stats(&samples, study.n)?;
            let analytic = analytic_stats(&surrogate);
            let stats_csv = format!("surrogate_stats_{label}.csv");
            write_surrogate_stats(&out_dir.join(&stats_csv), &sampled, &analytic)?;
            files.push(stats_csv);

            let r2 = r_squared_series(&samples, &archive, &mc_stats)?;
            let mut ladder_errors = Vec::with_capacity(ladder.len());
            for &m in &ladder {
                let prefix = prefix_stats(&samples, m)?;
                ladder_errors.push([
                    relative_error(&prefix.mean, &mc_stats.mean)?,
                    relative_error(&prefix.std, &mc_stats.std)?,
                    relative_error(&prefix.q01, &mc_stats.q01)?,
                ]);
            }
            results.push(ConfigResult {
                degree,
                points: grid.len(),
                e_mean: relative_error(&analytic.mean, &mc_stats.mean)?,
                e_std: relative_error(&analytic.std, &mc_stats.std)?,
                e_q01: relative_error(&sampled.q01, &mc_stats.q01)?,
                r2,
                ladder_errors,
            });
        }
    }

    write_error_table(&out_dir.join("errors.csv"), &study, &grids, &results)?;
    files.push("errors.csv".into());
    write_r2_table(&out_dir.join("r2.csv"), steps, &results)?;
    files.push("r2.csv".into());
    write_ladder_table(
        &out_dir.join("err_vs_n.csv"),
        &ladder,
        &mc_ladder,
        &mc_stats,
        &results,
    )?;
    files.push("err_vs_n.csv".into());
    write_timing_table(&out_dir.join("timing.csv"), &timings)?;
    files.push("timing.csv".into());
    Ok(())
}

fn write_stat_series(path: &Path, stats: &StatSeries) -> Result<()> {
    let mut w = CsvWriter::create(path, &["t", "mean", "std", "q01"])?;
    for t in 0..stats.steps() {
        w.write_row(&[
            (t + 1).to_string(),
            fmt_f64(stats.mean[t]),
            fmt_f64(stats.std[t]),
            fmt_f64(stats.q01[t]),
        ])?;
    }
    w.finish()
}

fn write_surrogate_stats(
    path: &Path,
    sampled: &StatSeries,
    analytic: &AnalyticStats,
) -> Result<()> {
    let mut w = CsvWriter::create(
        path,
        &[
            "t",
            "mean_sampled",
            "std_sampled",
            "q01_sampled",
            "mean_analytic",
            "std_analytic",
        ],
    )?;
    for t in 0..sampled.steps() {
        w.write_row(&[
            (t + 1).to_string(),
            fmt_f64(sampled.mean[t]),
            fmt_f64(sampled.std[t]),
            fmt_f64(sampled.q01[t]),
            fmt_f64(analytic.mean[t]),
            fmt_f64(analytic.std[t]),
        ])?;
    }
    w.finish()
}

/// Error table in the layout of the result tables: one row per metric and
/// degree, one column per grid size. The analytic mean is independent of
/// the degree (the zero coefficient is the same projection for every p),
/// so it gets a single row with `p = -`.
fn write_error_table(
    path: &Path,
    study: &ResolvedStudy,
    grids: &[SparseGrid],
    results: &[ConfigResult],
) -> Result<()> {
    let mut header = vec!["metric".to_string(), "p".to_string()];
    header.extend(grids.iter().map(|g| format!("i{}", g.len())));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = CsvWriter::create(path, &header_refs)?;

    let cell = |degree: usize, points: usize, pick: &dyn Fn(&ConfigResult) -> f64| -> String {
        let r = results
            .iter()
            .find(|r| r.degree == degree && r.points == points)
            .expect("every (degree, grid) pair has a result");
        fmt_f64(pick(r))
    };

    let mut row = vec!["mean".to_string(), "-".to_string()];
    for g in grids {
        row.push(cell(study.degrees[0], g.len(), &|r| r.e_mean));
    }
    w.write_row(&row)?;
    for &p in &study.degrees {
        let mut row = vec!["std".to_string(), p.to_string()];
        for g in grids {
            row.push(cell(p, g.len(), &|r| r.e_std));
        }
        w.write_row(&row)?;
    }
    for &p in &study.degrees {
        let mut row = vec!["q01".to_string(), p.to_string()];
        for g in grids {
            row.push(cell(p, g.len(), &|r| r.e_q01));
        }
        w.write_row(&row)?;
    }
    w.finish()
}

fn write_r2_table(path: &Path, steps: usize, results: &[ConfigResult]) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend(
        results
            .iter()
            .map(|r| format!("r2_p{}_i{}", r.degree, r.points)),
    );
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = CsvWriter::create(path, &header_refs)?;
    for t in 0..steps {
        let mut row = vec![(t + 1).to_string()];
        row.extend(results.iter().map(|r| fmt_f64(r.r2[t])));
        w.write_row(&row)?;
    }
    w.finish()
}

/// Error-versus-sample-count curves. All columns share one sample stream:
/// row `n` uses the first `n` draws both for the reference's own prefix
/// statistics (`mc_*` columns, converging to zero against the full run)
/// and for each surrogate's sampled statistics.
fn write_ladder_table(
    path: &Path,
    ladder: &[usize],
    mc_ladder: &[StatSeries],
    mc_stats: &StatSeries,
    results: &[ConfigResult],
) -> Result<()> {
    let mut header = vec![
        "n".to_string(),
        "mc_mean".to_string(),
        "mc_std".to_string(),
        "mc_q01".to_string(),
    ];
    for r in results {
        for metric in ["mean", "std", "q01"] {
            header.push(format!("{metric}_p{}_i{}", r.degree, r.points));
        }
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = CsvWriter::create(path, &header_refs)?;
    for (pos, &m) in ladder.iter().enumerate() {
        let mut row = vec![m.to_string()];
        let prefix = &mc_ladder[pos];
        row.push(fmt_f64(relative_error(&prefix.mean, &mc_stats.mean)?));
        row.push(fmt_f64(relative_error(&prefix.std, &mc_stats.std)?));
        row.push(fmt_f64(relative_error(&prefix.q01, &mc_stats.q01)?));
        for r in results {
            for &e in &r.ladder_errors[pos] {
                row.push(fmt_f64(e));
            }
        }
        w.write_row(&row)?;
    }
    w.finish()
}

fn write_timing_table(path: &Path, timings: &[(String, TimingRecord)]) -> Result<()> {
    let mut w = CsvWriter::create(
        path,
        &[
            "label",
            "n_model_evals",
            "model_eval_seconds",
            "surrogate_build_seconds",
            "surrogate_sampling_seconds",
            "n_surrogate_samples",
        ],
    )?;
    for (label, r) in timings {
        w.write_row(&[
            label.clone(),
            r.n_model_evals.to_string(),
            fmt_f64(r.model_eval_seconds),
            fmt_f64(r.surrogate_build_seconds),
            fmt_f64(r.surrogate_sampling_seconds),
            r.n_surrogate_samples.to_string(),
        ])?;
    }
    w.finish()
}

/// Writes a sparse grid as CSV (`j, xi_1..xi_s, w`) and returns the point
/// count.
pub fn write_grid_csv(grid: &SparseGrid, path: &Path) -> Result<usize> {
    let mut header = vec!["j".to_string()];
    header.extend((1..=grid.dim()).map(|k| format!("xi_{k}")));
    header.push("w".to_string());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = CsvWriter::create(path, &header_refs)?;
    for j in 0..grid.len() {
        let mut row = vec![j.to_string()];
        row.extend(grid.point(j).iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(grid.weights()[j]));
        w.write_row(&row)?;
    }
    w.finish()?;
    Ok(grid.len())
}

/// Per-step model response at one stochastic point `xi`, with the
/// surrogate's response alongside when one is given. Columns:
/// `t, eps11, model[, surrogate]`.
pub fn trace_point(
    study: &ResolvedStudy,
    xi: &[f64],
    surrogate: Option<&PceSurrogate>,
    path: &Path,
) -> Result<()> {
    let params = study.input.realize(xi)?;
    let response = run_uniaxial(&params, &study.path)?;
    let surrogate_response = surrogate
        .map(|s| -> Result<Vec<f64>> {
            if s.dim() != xi.len() {
                return Err(Error::Dimension(format!(
                    "surrogate has {} coordinates, xi has {}",
                    s.dim(),
                    xi.len()
                )));
            }
            let mut scratch = Vec::new();
            let mut out = vec![0.0; s.steps()];
            s.eval_trajectory_into(xi, &mut scratch, &mut out)?;
            Ok(out)
        })
        .transpose()?;
    if let Some(sr) = &surrogate_response {
        if sr.len() != response.len() {
            return Err(Error::Dimension(format!(
                "surrogate covers {} steps, model path has {}",
                sr.len(),
                response.len()
            )));
        }
    }

    let mut header = vec!["t", "eps11", "model"];
    if surrogate_response.is_some() {
        header.push("surrogate");
    }
    let mut w = CsvWriter::create(path, &header)?;
    for t in 0..response.len() {
        let mut row = vec![
            (t + 1).to_string(),
            fmt_f64(study.path.targets()[t]),
            fmt_f64(response[t]),
        ];
        if let Some(sr) = &surrogate_response {
            row.push(fmt_f64(sr[t]));
        }
        w.write_row(&row)?;
    }
    w.finish()
}

/// Sweeps one stochastic coordinate over `[lo, hi]` (the other coordinates
/// held at `base`) and records the model — and optionally surrogate —
/// response at the listed 1-based steps. Columns:
/// `xi_<k+1>, model_T<s>.. [, surrogate_T<s>..]`.
#[allow(clippy::too_many_arguments)]
pub fn trace_sweep(
    study: &ResolvedStudy,
    base: &[f64],
    coord: usize,
    lo: f64,
    hi: f64,
    count: usize,
    at_steps: &[usize],
    surrogate: Option<&PceSurrogate>,
    path: &Path,
) -> Result<()> {
    let dim = study.input.dimension();
    if base.len() != dim {
        return Err(Error::Dimension(format!(
            "base point has {} coordinates, study has {dim}",
            base.len()
        )));
    }
    if coord >= dim {
        return Err(Error::Dimension(format!(
            "sweep coordinate {} out of range for dimension {dim}",
            coord + 1
        )));
    }
    if count < 2 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidInput(
            "sweep needs finite lo < hi and at least 2 points".into(),
        ));
    }
    if at_steps.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one step".into()));
    }
    for &t in at_steps {
        if t < 1 || t > study.path.len() {
            return Err(Error::InvalidInput(format!(
                "step T={t} outside 1..={}",
                study.path.len()
            )));
        }
    }

    let mut header = vec![format!("xi_{}", coord + 1)];
    for &t in at_steps {
        header.push(format!("model_T{t}"));
    }
    if surrogate.is_some() {
        for &t in at_steps {
            header.push(format!("surrogate_T{t}"));
        }
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = CsvWriter::create(path, &header_refs)?;

    let mut xi = base.to_vec();
    let mut scratch = Vec::new();
    let mut surrogate_out = vec![0.0; study.path.len()];
    for step in 0..count {
        let x = lo + (hi - lo) * step as f64 / (count - 1) as f64;
        xi[coord] = x;
        let params = study.input.realize(&xi)?;
        let response = run_uniaxial(&params, &study.path)?;
        let mut row = vec![fmt_f64(x)];
        for &t in at_steps {
            row.push(fmt_f64(response[t - 1]));
        }
        if let Some(s) = surrogate {
            s.eval_trajectory_into(&xi, &mut scratch, &mut surrogate_out)?;
            for &t in at_steps {
                row.push(fmt_f64(surrogate_out[t - 1]));
            }
        }
        w.write_row(&row)?;
    }
    w.finish()
}
