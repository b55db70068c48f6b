//! Non-intrusive spectral projection: runs the deterministic material model
//! at sparse-grid nodes and turns the snapshots into polynomial-chaos
//! coefficients.
//!
//! The discrete projection for basis term `alpha` and load step `t` is
//!
//! ```text
//! u_{alpha,t} = (1 / gamma_alpha) * sum_j  sigma11(xi_j)[t] * H_alpha(xi_j) * w_j
//! ```
//!
//! summed over grid points in index order — a fixed-order reduction, so
//! coefficients are bit-reproducible for any worker count. Snapshot rows are
//! computed independently (embarrassingly parallel) and stored by point
//! index; a persisted snapshot cache lets several expansion degrees reuse
//! one set of model runs, since the grid — not the degree — determines them.

use crate::io::{fmt_f64, read_csv, CsvWriter};
use crate::material::{run_uniaxial, LoadPath};
use crate::pce::{gamma, hermite_table, full_index_set, MultiIndex, PceSurrogate};
use crate::random::StochasticInput;
use crate::sparse_grid::{smolyak, SparseGrid};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// Model responses at grid points: row `j` holds the per-step `sigma11`
/// trajectory at node `xi_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotMatrix {
    points: usize,
    steps: usize,
    /// Row-major `points x steps`.
    data: Vec<f64>,
}

impl SnapshotMatrix {
    pub fn from_rows(points: usize, steps: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != points * steps {
            return Err(Error::Dimension(format!(
                "snapshot storage holds {} values, expected {points} x {steps}",
                data.len()
            )));
        }
        Ok(Self {
            points,
            steps,
            data,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.steps..(j + 1) * self.steps]
    }
}

/// Runs the material model at every grid node.
///
/// Rows are computed in parallel and assembled by point index, so the
/// result does not depend on the worker count. A model failure aborts the
/// collection and reports the offending node and its realized parameters.
pub fn collect_snapshots(
    input: &StochasticInput,
    path: &LoadPath,
    grid: &SparseGrid,
) -> Result<SnapshotMatrix> {
    if grid.dim() != input.dimension() {
        return Err(Error::Dimension(format!(
            "grid dimension {} does not match the {} random coordinates",
            grid.dim(),
            input.dimension()
        )));
    }
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let xi = grid.point(j);
            let params = input.realize(xi).map_err(|e| {
                Error::Numerical(format!("grid point {j}, xi {xi:?}: {e}"))
            })?;
            run_uniaxial(&params, path).map_err(|e| {
                Error::Numerical(format!(
                    "model failed at grid point {j}, xi {xi:?}, params {params:?}: {e}"
                ))
            })
        })
        .collect::<Result<_>>()?;
    let mut data = Vec::with_capacity(grid.len() * path.len());
    for row in &rows {
        data.extend_from_slice(row);
    }
    SnapshotMatrix::from_rows(grid.len(), path.len(), data)
}

/// Projects snapshots onto the basis spanned by `index_set`.
///
/// Returns coefficients in the `steps x R` row-major layout of
/// [`PceSurrogate::from_coefficients`]. Each coefficient is a fixed-order
/// sum over grid points; terms are parallelized over basis positions, which
/// does not alter any individual sum.
pub fn project(
    snapshots: &SnapshotMatrix,
    grid: &SparseGrid,
    index_set: &[MultiIndex],
    gammas: &[f64],
) -> Result<Vec<f64>> {
    if snapshots.points() != grid.len() {
        return Err(Error::Dimension(format!(
            "{} snapshot rows for a {}-point grid",
            snapshots.points(),
            grid.len()
        )));
    }
    if index_set.len() != gammas.len() {
        return Err(Error::Dimension(format!(
            "{} basis terms but {} norms",
            index_set.len(),
            gammas.len()
        )));
    }
    let dim = grid.dim();
    let degree = index_set
        .iter()
        .map(|a| a.iter().sum::<usize>())
        .max()
        .unwrap_or(0);
    let steps = snapshots.steps();

    // He_n(xi_jk) for every point, coordinate, and degree: point-major,
    // then coordinate, then degree.
    let width = degree + 1;
    let mut hermite = vec![0.0; grid.len() * dim * width];
    for j in 0..grid.len() {
        let xi = grid.point(j);
        for (k, &x) in xi.iter().enumerate() {
            let base = (j * dim + k) * width;
            hermite_table(x, &mut hermite[base..base + width]);
        }
    }

    // One `steps`-long accumulator per basis term (alpha-major), transposed
    // to step-major at the end.
    let weights = grid.weights();
    let rows: Vec<Vec<f64>> = index_set
        .par_iter()
        .zip(gammas.par_iter())
        .map(|(alpha, &gamma_alpha)| {
            let mut acc = vec![0.0; steps];
            for j in 0..grid.len() {
                let mut c = weights[j];
                for (k, &a) in alpha.iter().enumerate() {
                    c *= hermite[(j * dim + k) * width + a];
                }
                for (slot, &s) in acc.iter_mut().zip(snapshots.row(j)) {
                    *slot += c * s;
                }
            }
            let inv = 1.0 / gamma_alpha;
            for slot in &mut acc {
                *slot *= inv;
            }
            acc
        })
        .collect();

    let r = index_set.len();
    let mut coeffs = vec![0.0; steps * r];
    for (pos, row) in rows.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            coeffs[t * r + pos] = v;
        }
    }
    Ok(coeffs)
}

/// Identity of the model runs behind a surrogate or snapshot cache:
/// everything that determines snapshot values, hashed; plus the shape
/// bookkeeping needed to regenerate the build bit-identically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Hex SHA-256 over marginals and load path (bit-exact encoding).
    pub study_hash: String,
    pub grid_level: usize,
    pub grid_points: usize,
    pub degree: usize,
    pub basis_len: usize,
    pub steps: usize,
    pub version: String,
}

/// Hash of the deterministic study inputs: marginal kinds/moments and the
/// load-path targets, fed to SHA-256 as exact bit patterns (no decimal
/// formatting involved).
pub fn study_hash(input: &StochasticInput, path: &LoadPath) -> String {
    let mut hasher = Sha256::new();
    for (name, marginal) in input.marginals() {
        hasher.update(name.as_bytes());
        match *marginal {
            crate::random::MarginalSpec::Constant { value } => {
                hasher.update([0u8]);
                hasher.update(value.to_bits().to_le_bytes());
            }
            crate::random::MarginalSpec::Lognormal { mean, std } => {
                hasher.update([1u8]);
                hasher.update(mean.to_bits().to_le_bytes());
                hasher.update(std.to_bits().to_le_bytes());
            }
        }
    }
    hasher.update((path.len() as u64).to_le_bytes());
    for &e in path.targets() {
        hasher.update(e.to_bits().to_le_bytes());
    }
    format!("{:x}", hasher.finalize())
}

/// Collects snapshots on the `(input.dimension(), level)` Smolyak grid and
/// projects them onto the full degree-`degree` basis.
pub fn build_surrogate(
    input: &StochasticInput,
    path: &LoadPath,
    degree: usize,
    level: usize,
) -> Result<(PceSurrogate, Provenance)> {
    let grid = smolyak(input.dimension(), level)?;
    let snapshots = collect_snapshots(input, path, &grid)?;
    build_from_snapshots(input, path, &snapshots, &grid, degree)
}

/// Projection step of [`build_surrogate`], reusing existing snapshots.
pub fn build_from_snapshots(
    input: &StochasticInput,
    path: &LoadPath,
    snapshots: &SnapshotMatrix,
    grid: &SparseGrid,
    degree: usize,
) -> Result<(PceSurrogate, Provenance)> {
    let index_set = full_index_set(grid.dim(), degree)?;
    let gammas: Vec<f64> = index_set.iter().map(|a| gamma(a)).collect();
    let coeffs = project(snapshots, grid, &index_set, &gammas)?;
    let surrogate = PceSurrogate::from_coefficients(grid.dim(), degree, snapshots.steps(), coeffs)?;
    let provenance = Provenance {
        study_hash: study_hash(input, path),
        grid_level: grid.level(),
        grid_points: grid.len(),
        degree,
        basis_len: surrogate.basis_len(),
        steps: surrogate.steps(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok((surrogate, provenance))
}

/// Writes the snapshot cache: a long-form CSV `(j, t, sigma11)` plus a JSON
/// sidecar identifying the producing study.
pub fn write_snapshot_cache(
    csv_path: &Path,
    sidecar_path: &Path,
    snapshots: &SnapshotMatrix,
    provenance: &Provenance,
) -> Result<()> {
    let mut w = CsvWriter::create(csv_path, &["j", "t", "sigma11"])?;
    for j in 0..snapshots.points() {
        for (t, &s) in snapshots.row(j).iter().enumerate() {
            w.write_row(&[j.to_string(), t.to_string(), fmt_f64(s)])?;
        }
    }
    w.finish()?;
    let json = serde_json::to_string_pretty(provenance).expect("provenance serializes");
    std::fs::write(sidecar_path, json).map_err(|e| Error::file(sidecar_path, e))
}

/// Loads a snapshot cache if — and only if — its sidecar matches the
/// expected provenance (hash, grid, steps); returns `Ok(None)` when the
/// cache is absent or was produced by a different study, in which case the
/// caller recollects.
pub fn read_snapshot_cache(
    csv_path: &Path,
    sidecar_path: &Path,
    expected: &Provenance,
) -> Result<Option<SnapshotMatrix>> {
    if !csv_path.exists() || !sidecar_path.exists() {
        return Ok(None);
    }
    let sidecar =
        std::fs::read_to_string(sidecar_path).map_err(|e| Error::file(sidecar_path, e))?;
    let found: Provenance = match serde_json::from_str(&sidecar) {
        Ok(p) => p,
        Err(_) => return Ok(None),
    };
    // The degree/basis fields describe the surrogate built on top and may
    // differ between users of one cache; the model runs are identified by
    // the study hash, the grid, and the step count.
    let matches = found.study_hash == expected.study_hash
        && found.grid_level == expected.grid_level
        && found.grid_points == expected.grid_points
        && found.steps == expected.steps;
    if !matches {
        return Ok(None);
    }

    let csv = read_csv(csv_path)?;
    let malformed = |message: String| Error::Parse {
        path: csv_path.display().to_string(),
        message,
    };
    if csv.rows.len() != found.grid_points * found.steps {
        return Err(malformed(format!(
            "expected {} rows, found {}",
            found.grid_points * found.steps,
            csv.rows.len()
        )));
    }
    let mut data = vec![0.0; csv.rows.len()];
    for (row, slot) in data.iter_mut().enumerate() {
        let j = csv.parse_usize(row, 0)?;
        let t = csv.parse_usize(row, 1)?;
        if j != row / found.steps || t != row % found.steps {
            return Err(malformed(format!("row {}: index out of order", row + 1)));
        }
        *slot = csv.parse_f64(row, 2)?;
    }
    Ok(Some(SnapshotMatrix::from_rows(
        found.grid_points,
        found.steps,
        data,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::MarginalSpec;
    use approx::assert_relative_eq;

    fn input_e_only() -> StochasticInput {
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

    fn ramp80() -> LoadPath {
        LoadPath::ramp(80, 2.8e-3).unwrap()
    }

    #[test]
    fn single_node_grid_yields_median_response() {
        let input = input_e_only();
        let path = ramp80();
        let grid = smolyak(1, 1).unwrap();
        let snaps = collect_snapshots(&input, &path, &grid).unwrap();
        assert_eq!(snaps.points(), 1);
        assert_eq!(snaps.steps(), 80);
        let median = input.realize(&[0.0]).unwrap();
        let reference = run_uniaxial(&median, &path).unwrap();
        assert_eq!(snaps.row(0), &reference[..]);
    }

    #[test]
    fn snapshots_match_elastic_closed_form_before_yield() {
        let input = input_e_only();
        let path = ramp80();
        let grid = smolyak(1, 18).unwrap();
        assert_eq!(grid.len(), 35);
        let snaps = collect_snapshots(&input, &path, &grid).unwrap();
        for j in 0..grid.len() {
            let params = input.realize(grid.point(j)).unwrap();
            let limit = params.elastic_limit_strain();
            for (t, &eps) in path.targets().iter().enumerate() {
                let s = snaps.row(j)[t];
                assert!(s.is_finite());
                if eps < limit {
                    assert_relative_eq!(s, params.young() * eps, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn snapshot_dimension_mismatch_is_rejected() {
        let input = input_e_only();
        let grid = smolyak(2, 2).unwrap();
        assert!(collect_snapshots(&input, &ramp80(), &grid).is_err());
    }

    #[test]
    fn projecting_constant_snapshots_recovers_only_the_mean() {
        let grid = smolyak(2, 3).unwrap();
        let c = 7.25e8;
        let snaps =
            SnapshotMatrix::from_rows(grid.len(), 2, vec![c; grid.len() * 2]).unwrap();
        let index_set = full_index_set(2, 3).unwrap();
        let gammas: Vec<f64> = index_set.iter().map(|a| gamma(a)).collect();
        let coeffs = project(&snaps, &grid, &index_set, &gammas).unwrap();
        for t in 0..2 {
            let row = &coeffs[t * index_set.len()..(t + 1) * index_set.len()];
            assert_relative_eq!(row[0], c, max_relative = 1e-12);
            for &u in &row[1..] {
                assert!(u.abs() <= 1e-10 * c, "{u:e}");
            }
        }
    }

    #[test]
    fn projecting_a_coordinate_recovers_its_basis_term() {
        let grid = smolyak(2, 3).unwrap();
        let data: Vec<f64> = (0..grid.len()).map(|j| grid.point(j)[0]).collect();
        let snaps = SnapshotMatrix::from_rows(grid.len(), 1, data).unwrap();
        let index_set = full_index_set(2, 2).unwrap();
        let gammas: Vec<f64> = index_set.iter().map(|a| gamma(a)).collect();
        let coeffs = project(&snaps, &grid, &index_set, &gammas).unwrap();
        for (pos, alpha) in index_set.iter().enumerate() {
            let expected = if alpha == &vec![1, 0] { 1.0 } else { 0.0 };
            assert!(
                (coeffs[pos] - expected).abs() <= 1e-10,
                "alpha {alpha:?}: {:e}",
                coeffs[pos]
            );
        }
    }

    #[test]
    fn degree_zero_build_is_the_weighted_mean() {
        let input = input_e_only();
        let path = LoadPath::ramp(4, 2.8e-3).unwrap();
        let (surrogate, prov) = build_surrogate(&input, &path, 0, 5).unwrap();
        assert_eq!(surrogate.basis_len(), 1);
        assert_eq!(prov.grid_points, 9);
        let grid = smolyak(1, 5).unwrap();
        let snaps = collect_snapshots(&input, &path, &grid).unwrap();
        for t in 0..4 {
            let mean: f64 = (0..grid.len())
                .map(|j| grid.weights()[j] * snaps.row(j)[t])
                .sum();
            assert_relative_eq!(surrogate.analytic_mean(t), mean, max_relative = 1e-12);
        }
    }

    #[test]
    fn lower_degree_coefficients_nest_inside_higher_degree() {
        let input = input_e_only();
        let path = LoadPath::ramp(12, 2.8e-3).unwrap();
        let grid = smolyak(1, 10).unwrap();
        let snaps = collect_snapshots(&input, &path, &grid).unwrap();
        let (low, _) = build_from_snapshots(&input, &path, &snaps, &grid, 3).unwrap();
        let (high, _) = build_from_snapshots(&input, &path, &snaps, &grid, 4).unwrap();
        for t in 0..12 {
            let low_row = low.coefficients_at(t);
            let high_row = high.coefficients_at(t);
            for (pos, &u) in low_row.iter().enumerate() {
                assert_relative_eq!(u, high_row[pos], max_relative = 1e-12, epsilon = 1e-3);
            }
        }
    }

    #[test]
    fn shape_guards_fire() {
        let grid = smolyak(2, 2).unwrap();
        let snaps = SnapshotMatrix::from_rows(3, 1, vec![0.0; 3]).unwrap();
        let index_set = full_index_set(2, 1).unwrap();
        let gammas: Vec<f64> = index_set.iter().map(|a| gamma(a)).collect();
        assert!(project(&snaps, &grid, &index_set, &gammas).is_err());
        assert!(project(&snaps, &grid, &index_set, &gammas[..1]).is_err());
        assert!(SnapshotMatrix::from_rows(2, 3, vec![0.0; 5]).is_err());
    }

    #[test]
    fn study_hash_tracks_inputs() {
        let input = input_e_only();
        let path = ramp80();
        let h1 = study_hash(&input, &path);
        assert_eq!(h1, study_hash(&input, &path));
        let mut other = input.clone();
        other.nu = MarginalSpec::Constant { value: 0.29 };
        assert_ne!(h1, study_hash(&other, &path));
        let shorter = LoadPath::ramp(79, 2.8e-3).unwrap();
        assert_ne!(h1, study_hash(&input, &shorter));
    }

    #[test]
    fn snapshot_cache_round_trip_and_invalidation() {
        let input = input_e_only();
        let path = LoadPath::ramp(6, 2.8e-3).unwrap();
        let grid = smolyak(1, 2).unwrap();
        let snaps = collect_snapshots(&input, &path, &grid).unwrap();
        let (_, prov) = build_from_snapshots(&input, &path, &snaps, &grid, 1).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("snaps.csv");
        let sidecar = dir.path().join("snaps.provenance.json");
        assert!(read_snapshot_cache(&csv, &sidecar, &prov).unwrap().is_none());

        write_snapshot_cache(&csv, &sidecar, &snaps, &prov).unwrap();
        let cached = read_snapshot_cache(&csv, &sidecar, &prov).unwrap().unwrap();
        assert_eq!(cached, snaps);

        // A different study (changed marginal) must refuse the cache.
        let mut other = input.clone();
        other.sigma_y0 = MarginalSpec::Constant { value: 240e6 };
        let (_, other_prov) = build_from_snapshots(&other, &path, &snaps, &grid, 1).unwrap();
        assert!(read_snapshot_cache(&csv, &sidecar, &other_prov)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rebuilding_from_cache_is_bit_identical() {
        let input = input_e_only();
        let path = LoadPath::ramp(10, 2.8e-3).unwrap();
        let grid = smolyak(1, 5).unwrap();
        let snaps = collect_snapshots(&input, &path, &grid).unwrap();
        let (fresh, prov) = build_from_snapshots(&input, &path, &snaps, &grid, 4).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("snaps.csv");
        let sidecar = dir.path().join("snaps.provenance.json");
        write_snapshot_cache(&csv, &sidecar, &snaps, &prov).unwrap();
        let cached = read_snapshot_cache(&csv, &sidecar, &prov).unwrap().unwrap();
        let (rebuilt, _) = build_from_snapshots(&input, &path, &cached, &grid, 4).unwrap();
        for t in 0..10 {
            assert_eq!(fresh.coefficients_at(t), rebuilt.coefficients_at(t));
        }
    }

    #[test]
    fn realized_parameters_type_is_reported_on_failure() {
        // A constant nu of 0.6 violates the parameter invariants at every
        // node; the error must point at the node and show the inputs.
        let input = StochasticInput {
            young: MarginalSpec::Lognormal {
                mean: 210e9,
                std: 21e9,
            },
            nu: MarginalSpec::Constant { value: 0.6 },
            sigma_y0: MarginalSpec::Constant { value: 235e6 },
            hardening: MarginalSpec::Constant { value: 2.1e9 },
        };
        let grid = smolyak(1, 2).unwrap();
        let err = collect_snapshots(&input, &ramp80(), &grid).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("grid point"), "{message}");
        assert!(message.contains("Poisson"), "{message}");
    }
}
