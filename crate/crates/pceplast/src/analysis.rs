//! Monte Carlo reference statistics, surrogate statistics, the relative
//! error metric, and the per-step coefficient of determination.
//!
//! Samples are addressed by index through the counter-based generator, so
//! sample `k` is the same numbers no matter how work is batched or how many
//! workers run. Evaluation happens in fixed 4096-sample batches; batch
//! results are merged in index order and every reduction runs in a fixed
//! sequence, which makes each statistic a pure function of `(config, seed)`.
//!
//! The reference responses go to an on-disk archive stored column-major
//! (one contiguous block per load step), so per-step passes — unbiased
//! standard deviation, quantile selection, R² — stream one 8-byte-per-sample
//! column at a time instead of holding the full `n x T` matrix in memory.

use crate::material::{run_uniaxial, LoadPath};
use crate::pce::PceSurrogate;
use crate::random::{sample_standard_normals_range, StochasticInput};
use crate::{Error, Result};
use rayon::prelude::*;
use std::fs::{File, OpenOptions};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};

/// Every sampled quantile in this crate is the 0.01-quantile.
pub const QUANTILE_P: f64 = 0.01;

/// Samples per evaluation batch. Fixed (never derived from the worker
/// count) so batch boundaries, and therefore all merge orders, are
/// reproducible.
pub const BATCH_SAMPLES: usize = 4096;

/// Batches evaluated concurrently before an ordered merge; bounds peak
/// memory at `MERGE_WINDOW * BATCH_SAMPLES` trajectories.
const MERGE_WINDOW: usize = 16;

/// Sample counts for error-versus-n curves. Curves share prefixes of one
/// sample stream, so every point of every curve sees the same draws.
pub const SAMPLE_LADDER: [usize; 8] = [
    100, 300, 1_000, 3_000, 10_000, 30_000, 100_000, 1_000_000,
];

/// Per-step empirical statistics of a response ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct StatSeries {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Empirical 0.01-quantile (lower order statistic at rank
    /// `ceil(0.01 n)`, no interpolation).
    pub q01: Vec<f64>,
}

impl StatSeries {
    pub fn steps(&self) -> usize {
        self.mean.len()
    }
}

/// Moments read directly off expansion coefficients (no sampling); the
/// quantile has no closed form and is absent by design.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Wall-clock accounting for one study configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TimingRecord {
    pub n_model_evals: usize,
    pub model_eval_seconds: f64,
    pub surrogate_build_seconds: f64,
    pub surrogate_sampling_seconds: f64,
    pub n_surrogate_samples: usize,
}

/// On-disk ensemble of model responses, column-major by load step: column
/// `t` occupies bytes `[t*n*8, (t+1)*n*8)` as little-endian `f64`, ordered
/// by sample index. Re-reads stream per step without recomputation.
#[derive(Debug)]
pub struct McArchive {
    file: File,
    path: PathBuf,
    samples: usize,
    steps: usize,
    dim: usize,
    seed: u64,
}

impl McArchive {
    fn create(path: &Path, samples: usize, steps: usize, dim: usize, seed: u64) -> Result<Self> {
        let file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(true)
            .open(path)
            .map_err(|e| Error::file(path, e))?;
        file.set_len((samples * steps * 8) as u64)
            .map_err(|e| Error::file(path, e))?;
        Ok(Self {
            file,
            path: path.to_path_buf(),
            samples,
            steps,
            dim,
            seed,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Scatters a row-major batch (`count x steps`, samples starting at
    /// `start`) into the per-step columns.
    fn write_batch(&self, start: usize, rows: &[f64], count: usize) -> Result<()> {
        let mut bytes = vec![0u8; count * 8];
        for t in 0..self.steps {
            for k in 0..count {
                bytes[k * 8..(k + 1) * 8]
                    .copy_from_slice(&rows[k * self.steps + t].to_le_bytes());
            }
            let offset = ((t * self.samples + start) * 8) as u64;
            self.file
                .write_all_at(&bytes, offset)
                .map_err(|e| Error::file(&self.path, e))?;
        }
        Ok(())
    }

    /// Reads the first `buf.len()` samples of step `t` (ordered by sample
    /// index) — pass a full-length buffer for the whole column.
    pub fn read_column_into(&self, t: usize, buf: &mut [f64]) -> Result<()> {
        assert!(t < self.steps && buf.len() <= self.samples);
        let mut bytes = vec![0u8; buf.len() * 8];
        self.file
            .read_exact_at(&mut bytes, (t * self.samples * 8) as u64)
            .map_err(|e| Error::file(&self.path, e))?;
        for (x, chunk) in buf.iter_mut().zip(bytes.chunks_exact(8)) {
            *x = f64::from_le_bytes(chunk.try_into().unwrap());
        }
        Ok(())
    }
}

/// Evaluates `model` at samples `0..n` of the `dim`-dimensional standard
/// normal stream for `seed`, passing each finished batch to `consume(start,
/// rows)` in ascending index order. Batches within a window run in
/// parallel; `consume` always runs on the caller thread, so sequential
/// accumulation in it is deterministic.
///
/// `model` fills a `steps`-long response row per sample; a failure aborts
/// the pass and names the sample index.
pub fn for_each_sample_batch<M, C>(
    dim: usize,
    steps: usize,
    n: usize,
    seed: u64,
    model: &M,
    mut consume: C,
) -> Result<()>
where
    M: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
    C: FnMut(usize, &[f64]) -> Result<()>,
{
    let starts: Vec<usize> = (0..n).step_by(BATCH_SAMPLES).collect();
    for window in starts.chunks(MERGE_WINDOW) {
        let results: Vec<Result<Vec<f64>>> = window
            .par_iter()
            .map(|&start| {
                let count = BATCH_SAMPLES.min(n - start);
                let normals =
                    sample_standard_normals_range(dim, start as u64..(start + count) as u64, seed);
                let mut rows = vec![0.0; count * steps];
                for k in 0..count {
                    model(
                        &normals[k * dim..(k + 1) * dim],
                        &mut rows[k * steps..(k + 1) * steps],
                    )
                    .map_err(|e| Error::Numerical(format!("sample {}: {e}", start + k)))?;
                }
                Ok(rows)
            })
            .collect();
        for (&start, rows) in window.iter().zip(results) {
            consume(start, &rows?)?;
        }
    }
    Ok(())
}

/// Empirical 0.01-quantile: the order statistic at rank `ceil(0.01 n)`
/// (so the minimum for `n = 100`). Reorders `values` in place.
pub fn empirical_q01(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let rank = values.len().div_ceil(100);
    let (_, q, _) = values.select_nth_unstable_by(rank - 1, f64::total_cmp);
    *q
}

/// Monte Carlo pass for an arbitrary response model: returns per-step
/// mean, unbiased (n−1) standard deviation, and 0.01-quantile, plus the
/// response archive. The mean accumulates during evaluation; std and
/// quantile stream back over archive columns (two-pass), so memory stays at
/// one column regardless of `n x steps`.
pub fn mc_sample_model<M>(
    dim: usize,
    steps: usize,
    n: usize,
    seed: u64,
    model: &M,
    archive_path: &Path,
) -> Result<(StatSeries, McArchive)>
where
    M: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "Monte Carlo needs at least 2 samples, got {n}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("empty response series".into()));
    }
    let archive = McArchive::create(archive_path, n, steps, dim, seed)?;
    let mut sums = vec![0.0; steps];
    for_each_sample_batch(dim, steps, n, seed, model, |start, rows| {
        let count = rows.len() / steps;
        archive.write_batch(start, rows, count)?;
        for k in 0..count {
            for (sum, &x) in sums.iter_mut().zip(&rows[k * steps..(k + 1) * steps]) {
                *sum += x;
            }
        }
        Ok(())
    })?;
    let mean: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();

    let mut std = vec![0.0; steps];
    let mut q01 = vec![0.0; steps];
    let mut column = vec![0.0; n];
    for t in 0..steps {
        archive.read_column_into(t, &mut column)?;
        let mut devsq = 0.0;
        for &x in &column {
            let d = x - mean[t];
            devsq += d * d;
        }
        std[t] = (devsq / (n - 1) as f64).sqrt();
        q01[t] = empirical_q01(&mut column);
    }
    Ok((StatSeries { mean, std, q01 }, archive))
}

/// Reference solution: full model runs at `n` sampled parameter sets.
pub fn mc_reference(
    input: &StochasticInput,
    path: &LoadPath,
    n: usize,
    seed: u64,
    archive_path: &Path,
) -> Result<(StatSeries, McArchive)> {
    let model = |xi: &[f64], out: &mut [f64]| -> Result<()> {
        let params = input.realize(xi)?;
        let response = run_uniaxial(&params, path)?;
        out.copy_from_slice(&response);
        Ok(())
    };
    mc_sample_model(input.dimension(), path.len(), n, seed, &model, archive_path)
}

/// In-memory surrogate response ensemble, column-major by step, tagged
/// with its sample-stream identity for cross-checks against an archive.
pub struct SurrogateSamples {
    n: usize,
    steps: usize,
    dim: usize,
    seed: u64,
    /// Column-major `steps x n`: sample `k` of step `t` is `data[t*n + k]`.
    data: Vec<f64>,
}

impl SurrogateSamples {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn column(&self, t: usize) -> &[f64] {
        &self.data[t * self.n..(t + 1) * self.n]
    }
}

/// Evaluates the surrogate on samples `0..n` of the generator stream —
/// the identical parameter draws `mc_reference` sees for the same
/// `(dim, seed)`, which is what makes archive/surrogate comparisons
/// sample-by-sample meaningful.
pub fn sample_surrogate(
    surrogate: &PceSurrogate,
    n: usize,
    seed: u64,
) -> Result<SurrogateSamples> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "surrogate sampling needs at least 2 samples, got {n}"
        )));
    }
    let steps = surrogate.steps();
    let mut data = vec![0.0; steps * n];
    let model = |xi: &[f64], out: &mut [f64]| -> Result<()> {
        let mut scratch = Vec::new();
        surrogate.eval_trajectory_into(xi, &mut scratch, out)
    };
    for_each_sample_batch(surrogate.dim(), steps, n, seed, &model, |start, rows| {
        let count = rows.len() / steps;
        for k in 0..count {
            for t in 0..steps {
                data[t * n + start + k] = rows[k * steps + t];
            }
        }
        Ok(())
    })?;
    Ok(SurrogateSamples {
        n,
        steps,
        dim: surrogate.dim(),
        seed,
        data,
    })
}

/// Statistics of the first `m` samples of an in-memory ensemble. Used with
/// the sample ladder: prefixes of one stream give every curve the same
/// draws.
pub fn prefix_stats(samples: &SurrogateSamples, m: usize) -> Result<StatSeries> {
    if m < 2 || m > samples.n {
        return Err(Error::InvalidInput(format!(
            "prefix length {m} outside 2..={}",
            samples.n
        )));
    }
    let steps = samples.steps;
    let mut mean = vec![0.0; steps];
    let mut std = vec![0.0; steps];
    let mut q01 = vec![0.0; steps];
    let mut scratch = vec![0.0; m];
    for t in 0..steps {
        let column = &samples.column(t)[..m];
        let mu = column.iter().sum::<f64>() / m as f64;
        let mut devsq = 0.0;
        for &x in column {
            let d = x - mu;
            devsq += d * d;
        }
        mean[t] = mu;
        std[t] = (devsq / (m - 1) as f64).sqrt();
        scratch.copy_from_slice(column);
        q01[t] = empirical_q01(&mut scratch);
    }
    Ok(StatSeries { mean, std, q01 })
}

/// Statistics of the first `m` archived samples, streaming one column
/// prefix at a time.
pub fn archive_prefix_stats(archive: &McArchive, m: usize) -> Result<StatSeries> {
    if m < 2 || m > archive.samples() {
        return Err(Error::InvalidInput(format!(
            "prefix length {m} outside 2..={}",
            archive.samples()
        )));
    }
    let steps = archive.steps();
    let mut mean = vec![0.0; steps];
    let mut std = vec![0.0; steps];
    let mut q01 = vec![0.0; steps];
    let mut column = vec![0.0; m];
    for t in 0..steps {
        archive.read_column_into(t, &mut column)?;
        let mu = column.iter().sum::<f64>() / m as f64;
        let mut devsq = 0.0;
        for &x in &column {
            let d = x - mu;
            devsq += d * d;
        }
        mean[t] = mu;
        std[t] = (devsq / (m - 1) as f64).sqrt();
        q01[t] = empirical_q01(&mut column);
    }
    Ok(StatSeries { mean, std, q01 })
}

/// Closed-form surrogate moments per step.
pub fn analytic_stats(surrogate: &PceSurrogate) -> AnalyticStats {
    let steps = surrogate.steps();
    AnalyticStats {
        mean: (0..steps).map(|t| surrogate.analytic_mean(t)).collect(),
        std: (0..steps).map(|t| surrogate.analytic_std(t)).collect(),
    }
}

/// Sampled and analytic surrogate statistics in one call; the sampled side
/// uses the same generator contract as [`mc_reference`].
pub fn surrogate_stats(
    surrogate: &PceSurrogate,
    n: usize,
    seed: u64,
) -> Result<(StatSeries, AnalyticStats)> {
    let samples = sample_surrogate(surrogate, n, seed)?;
    let sampled = prefix_stats(&samples, n)?;
    Ok((sampled, analytic_stats(surrogate)))
}

/// Relative L2 error of a per-step sequence against a reference:
/// `‖v − v_ref‖₂ / ‖v_ref‖₂`.
pub fn relative_error(v: &[f64], v_ref: &[f64]) -> Result<f64> {
    if v.len() != v_ref.len() {
        return Err(Error::Dimension(format!(
            "sequences of length {} and {} are not comparable",
            v.len(),
            v_ref.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&a, &b) in v.iter().zip(v_ref) {
        num += (a - b) * (a - b);
        den += b * b;
    }
    if den == 0.0 {
        return Err(Error::InvalidInput(
            "relative error against a zero reference sequence".into(),
        ));
    }
    Ok((num / den).sqrt())
}

/// Coefficient of determination at one step:
/// `1 − Σ(mc − pc)² / Σ(mc − mc_mean)²`.
///
/// A zero-variance step (deterministic response, e.g. all-elastic under
/// constant parameters) is defined as 1 when the surrogate also matches
/// (numerator ≤ 1e-20) and is an error otherwise.
pub fn r_squared_step(mc: &[f64], pc: &[f64], mc_mean: f64) -> Result<f64> {
    if mc.len() != pc.len() {
        return Err(Error::Dimension(format!(
            "{} reference samples vs {} surrogate samples",
            mc.len(),
            pc.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&m, &p) in mc.iter().zip(pc) {
        num += (m - p) * (m - p);
        let d = m - mc_mean;
        den += d * d;
    }
    if den <= 1e-20 {
        if num <= 1e-20 {
            Ok(1.0)
        } else {
            Err(Error::Numerical(
                "zero-variance step with nonzero surrogate residual".into(),
            ))
        }
    } else {
        Ok(1.0 - num / den)
    }
}

/// Per-step R² of a surrogate ensemble against the archived reference.
/// Both ensembles must come from the same sample stream — same count,
/// dimension, and seed — otherwise the comparison is meaningless and is
/// rejected.
pub fn r_squared_series(
    samples: &SurrogateSamples,
    archive: &McArchive,
    reference: &StatSeries,
) -> Result<Vec<f64>> {
    if samples.n != archive.samples()
        || samples.dim != archive.dim()
        || samples.seed != archive.seed()
    {
        return Err(Error::InvalidInput(format!(
            "sample-set mismatch: surrogate ensemble (n={}, dim={}, seed={}) vs archive (n={}, dim={}, seed={})",
            samples.n,
            samples.dim,
            samples.seed,
            archive.samples(),
            archive.dim(),
            archive.seed()
        )));
    }
    if samples.steps != archive.steps() || reference.steps() != archive.steps() {
        return Err(Error::Dimension(format!(
            "step counts differ: ensemble {}, archive {}, reference {}",
            samples.steps,
            archive.steps(),
            reference.steps()
        )));
    }
    let mut column = vec![0.0; archive.samples()];
    let mut out = Vec::with_capacity(archive.steps());
    for t in 0..archive.steps() {
        archive.read_column_into(t, &mut column)?;
        out.push(r_squared_step(&column, samples.column(t), reference.mean[t])?);
    }
    Ok(out)
}

/// The sample-count ladder truncated to the available budget.
pub fn ladder_for(n: usize) -> Vec<usize> {
    SAMPLE_LADDER.iter().copied().filter(|&m| m <= n).collect()
}
