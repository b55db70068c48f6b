//! Nested Kronrod–Patterson (Genz–Keister) quadrature for the standard
//! Gaussian measure, and Smolyak sparse grids assembled from it.
//!
//! The 1D family is the nested extension chain with 1, 3, 9, 19, 35 points
//! (plus the intermediate truncations 7, 17, 31, 33), shipped as
//! high-precision tables in [`tables`]. Accuracy level `a` selects the
//! smallest rule of polynomial degree at least `2a - 1` (a "delayed" level
//! map, so consecutive levels often reuse the same rule). The
//! `s`-dimensional grid of level `k` is the standard Smolyak combination
//!
//! ```text
//! A(q, s) = sum_{q-s+1 <= |i| <= q} (-1)^(q-|i|) C(s-1, q-|i|) (U_{i_1} x ... x U_{i_s})
//! ```
//!
//! with `q = s + k - 1` over the full tensor rules `U`, which guarantees
//! total-degree exactness of at least `2k - 1` (see [`exactness`]).
//!
//! Because every rule draws its nodes verbatim from one master table,
//! coincident tensor points are identified by integer node indices — no
//! floating-point tolerance is involved — and their signed combination
//! weights are merged exactly. Points whose merged weight is tiny are kept:
//! the documented per-level point counts (e.g. 9/17/19/33/35 in 1D and
//! 37/261/921 in 2D) count every structurally present node.

mod tables;

use crate::{Error, Result};
use tables::{half_table, master_half, LEVEL_RULE_SIZE, RULE_DEGREES, RULE_SIZES};

/// Largest tabulated accuracy level.
pub const MAX_LEVEL: usize = 25;

/// Largest supported dimension (the packed node-index keys allot 6 bits
/// per coordinate; studies here use at most 4).
pub const MAX_DIM: usize = 10;

/// Guaranteed total polynomial degree integrated exactly by
/// [`smolyak`]`(s, level)` for any dimension: `2 * level - 1`.
pub fn exactness(level: usize) -> usize {
    2 * level - 1
}

/// One-dimensional nested quadrature rule for the standard Gaussian weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1D {
    level: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule1D {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in ascending order, symmetric about zero.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights aligned with [`nodes`](Self::nodes); some intermediate rules
    /// carry (small) negative weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn check_level(level: usize) -> Result<()> {
    if level == 0 || level > MAX_LEVEL {
        return Err(Error::GridLevel {
            level,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// The tabulated 1D rule used at `level` (1-based, up to [`MAX_LEVEL`]).
pub fn kpn_rule(level: usize) -> Result<Rule1D> {
    check_level(level)?;
    let half = half_table(LEVEL_RULE_SIZE[level - 1]);
    let mut nodes = Vec::with_capacity(2 * half.len() - 1);
    let mut weights = Vec::with_capacity(2 * half.len() - 1);
    for &(x, w) in half.iter().skip(1).rev() {
        nodes.push(-x);
        weights.push(w);
    }
    for &(x, w) in half {
        nodes.push(x);
        weights.push(w);
    }
    Ok(Rule1D {
        level,
        nodes,
        weights,
    })
}

/// Degree of the rule served at `level` (may exceed [`exactness`] because
/// of the delayed rule selection).
pub fn rule_degree(level: usize) -> Result<usize> {
    check_level(level)?;
    let size = LEVEL_RULE_SIZE[level - 1];
    let pos = RULE_SIZES.iter().position(|&s| s == size).unwrap();
    Ok(RULE_DEGREES[pos])
}

/// Signed master index of each node of the level's rule, ascending:
/// `0` is the origin, `±k` the `k`-th positive magnitude and its mirror.
fn signed_rule(level: usize) -> Vec<(i32, f64)> {
    let half = half_table(LEVEL_RULE_SIZE[level - 1]);
    let master = master_half();
    let index_of = |x: f64| -> i32 {
        master
            .iter()
            .position(|&(m, _)| m == x)
            .expect("every tabulated node appears in the master table") as i32
    };
    let mut rule = Vec::with_capacity(2 * half.len() - 1);
    for &(x, w) in half.iter().skip(1).rev() {
        rule.push((-index_of(x), w));
    }
    for &(x, w) in half {
        rule.push((index_of(x), w));
    }
    rule
}

/// Smolyak sparse grid: points in `R^s` with signed weights summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseGrid {
    dim: usize,
    level: usize,
    /// Row-major `len x dim` coordinates.
    points: Vec<f64>,
    weights: Vec<f64>,
    /// `mirror[j]` is the index of the reflected point `-xi_j` (equal to
    /// `j` only for the origin); mirrored weights are bit-identical, which
    /// [`integrate`] exploits to cancel odd integrands exactly.
    mirror: Vec<usize>,
}

impl SparseGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the reflection `-xi_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.mirror[j]
    }
}

/// Bits per coordinate in the packed node-index key.
const KEY_BITS: u32 = 6;
/// Offset that maps signed master indices to non-negative key fields.
const KEY_BIAS: i32 = (1 << (KEY_BITS - 1)) - 1; // 31; master indices stay below this

fn reflect_key(key: u64, dim: usize) -> u64 {
    let mask = (1u64 << KEY_BITS) - 1;
    let mut out = 0u64;
    for j in (0..dim).rev() {
        let field = (key >> (KEY_BITS * j as u32)) & mask;
        out |= (2 * KEY_BIAS as u64 - field) << (KEY_BITS * j as u32);
    }
    out
}

/// Builds the level-`level` Smolyak grid in `dim` dimensions.
///
/// Deterministic by construction: combination terms are enumerated in a
/// fixed order and accumulated per node key, and the final point order is
/// ascending in the packed key (lexicographic in the node indices), so the
/// same `(dim, level)` always yields bit-identical grids.
pub fn smolyak(dim: usize, level: usize) -> Result<SparseGrid> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "grid dimension must be in 1..={MAX_DIM}, got {dim}"
        )));
    }
    check_level(level)?;

    // Per-level signed rules, built once (levels are small integers).
    let rules: Vec<Vec<(i32, f64)>> = (1..=level).map(signed_rule).collect();

    let q = dim + level - 1;
    let low = q - dim + 1; // level >= 1 makes this >= dim's lower bound of interest
    let mut acc = std::collections::BTreeMap::<u64, f64>::new();
    let mut index = vec![1usize; dim];

    // Enumerate multi-levels i with low <= |i| <= q, each coordinate >= 1,
    // in lexicographic order; for each, scatter the signed tensor rule.
    loop {
        let total: usize = index.iter().sum();
        if total >= low.max(dim) && total <= q {
            let t = q - total;
            let coeff = if t.is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(dim - 1, t);
            if coeff != 0.0 {
                scatter_tensor(&rules, &index, coeff, &mut acc);
            }
        }
        // Odometer increment with per-coordinate bound `level`
        // (coordinates above `level` cannot satisfy |i| <= q ... they can:
        // i_j <= q - (dim-1) = level; so `level` is the exact bound).
        let mut j = dim;
        loop {
            if j == 0 {
                // Wrapped past the most significant coordinate: done.
                let (points, weights, mirror) = assemble(dim, &acc);
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > 1e-10 {
                    return Err(Error::Numerical(format!(
                        "sparse-grid weights sum to 1{:+e}",
                        sum - 1.0
                    )));
                }
                return Ok(SparseGrid {
                    dim,
                    level,
                    points,
                    weights,
                    mirror,
                });
            }
            j -= 1;
            if index[j] < level {
                index[j] += 1;
                break;
            }
            index[j] = 1;
        }
    }
}

/// Adds `coeff * (w_1 ... w_dim)` for every node combination of the tensor
/// rule `U_{i_1} x ... x U_{i_dim}` into the accumulator.
fn scatter_tensor(
    rules: &[Vec<(i32, f64)>],
    index: &[usize],
    coeff: f64,
    acc: &mut std::collections::BTreeMap<u64, f64>,
) {
    fn recurse(
        rules: &[Vec<(i32, f64)>],
        index: &[usize],
        j: usize,
        key: u64,
        product: f64,
        acc: &mut std::collections::BTreeMap<u64, f64>,
    ) {
        if j == index.len() {
            *acc.entry(key).or_insert(0.0) += product;
            return;
        }
        for &(id, w) in &rules[index[j] - 1] {
            recurse(
                rules,
                index,
                j + 1,
                (key << KEY_BITS) | (id + KEY_BIAS) as u64,
                product * w,
                acc,
            );
        }
    }
    recurse(rules, index, 0, 0, coeff, acc);
}

fn assemble(
    dim: usize,
    acc: &std::collections::BTreeMap<u64, f64>,
) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let master = master_half();
    let n = acc.len();
    let mut points = Vec::with_capacity(n * dim);
    let mut weights = Vec::with_capacity(n);
    let position: std::collections::BTreeMap<u64, usize> =
        acc.keys().enumerate().map(|(j, &k)| (k, j)).collect();
    let mut mirror = Vec::with_capacity(n);
    let mask = (1u64 << KEY_BITS) - 1;
    for (&key, &w) in acc {
        for j in (0..dim).rev() {
            let id = ((key >> (KEY_BITS * j as u32)) & mask) as i32 - KEY_BIAS;
            let x = master[id.unsigned_abs() as usize].0;
            points.push(if id < 0 { -x } else { x });
        }
        weights.push(w);
        mirror.push(position[&reflect_key(key, dim)]);
    }
    (points, weights, mirror)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for j in 1..=k {
        r = r * (n - k + j) as f64 / j as f64;
    }
    r
}

/// Quadrature sum `Σ_j w_j f(xi_j)`.
///
/// All integrand values are computed first (in point order), then reduced
/// by symmetric pairs: each point is summed together with its reflection,
/// whose merged weight is bit-identical, so odd integrands cancel exactly
/// and the reduction order is fixed regardless of caller parallelism.
pub fn integrate<F>(grid: &SparseGrid, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = grid.len();
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let v = f(grid.point(j)).map_err(|e| e.at_step(j))?;
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "integrand returned {v:e} at grid point {j}"
            )));
        }
        values.push(v);
    }
    let w = grid.weights();
    let mut total = 0.0;
    for j in 0..n {
        let m = grid.mirror(j);
        match m.cmp(&j) {
            std::cmp::Ordering::Equal => total += w[j] * values[j],
            std::cmp::Ordering::Greater => {
                debug_assert_eq!(w[j].to_bits(), w[m].to_bits());
                total += w[j] * (values[j] + values[m]);
            }
            std::cmp::Ordering::Less => {}
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Gaussian moment E[xi^k]: (k-1)!! for even k, 0 for odd.
    fn gaussian_moment(k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            (1..k).step_by(2).map(|j| j as f64).product()
        }
    }

    #[test]
    fn moment_helper_closed_forms() {
        assert_eq!(gaussian_moment(0), 1.0);
        assert_eq!(gaussian_moment(1), 0.0);
        assert_eq!(gaussian_moment(2), 1.0);
        assert_eq!(gaussian_moment(4), 3.0);
        assert_eq!(gaussian_moment(6), 15.0);
        assert_eq!(gaussian_moment(8), 105.0);
    }

    #[test]
    fn level_one_is_midpoint_rule() {
        let rule = kpn_rule(1).unwrap();
        assert_eq!(rule.nodes(), &[0.0]);
        assert_eq!(rule.weights(), &[1.0]);
    }

    #[test]
    fn levels_out_of_range_are_rejected() {
        assert!(kpn_rule(0).is_err());
        assert!(kpn_rule(MAX_LEVEL + 1).is_err());
        assert!(smolyak(2, 0).is_err());
        assert!(smolyak(0, 3).is_err());
        assert!(smolyak(MAX_DIM + 1, 3).is_err());
    }

    #[test]
    fn rules_are_normalized_and_symmetric() {
        for level in 1..=MAX_LEVEL {
            let rule = kpn_rule(level).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "level {level}: sum {sum}");
            let n = rule.len();
            for j in 0..n {
                assert_eq!(rule.nodes()[j], -rule.nodes()[n - 1 - j]);
                assert_eq!(rule.weights()[j], rule.weights()[n - 1 - j]);
            }
            assert!(rule.nodes().windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn rules_are_nested_along_levels() {
        for level in 1..MAX_LEVEL {
            let small = kpn_rule(level).unwrap();
            let big = kpn_rule(level + 1).unwrap();
            for &x in small.nodes() {
                assert!(
                    big.nodes().iter().any(|&y| y.to_bits() == x.to_bits()),
                    "node {x} of level {level} missing at level {}",
                    level + 1
                );
            }
        }
    }

    #[test]
    fn three_node_rule_matches_low_gaussian_moments() {
        let rule = kpn_rule(2).unwrap();
        assert_eq!(rule.len(), 3);
        for k in 0..=5 {
            let estimate: f64 = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&x, &w)| w * x.powi(k as i32))
                .sum();
            assert_relative_eq!(estimate, gaussian_moment(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn nine_node_rule_reaches_degree_fifteen() {
        let rule = kpn_rule(5).unwrap();
        assert_eq!(rule.len(), 9);
        for k in 0..=15 {
            let estimate: f64 = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&x, &w)| w * x.powi(k as i32))
                .sum();
            let exact = gaussian_moment(k);
            // Scale-aware: high moments reach 1e5, where 1e-10 absolute
            // would be below representable resolution of the sum.
            assert!(
                (estimate - exact).abs() <= 1e-10 * exact.abs().max(1.0),
                "k={k}: {estimate} vs {exact}"
            );
        }
    }

    #[test]
    fn one_dimensional_grid_degenerates_to_the_rule() {
        for level in [1, 2, 5, 9, 10, 17, 18] {
            let grid = smolyak(1, level).unwrap();
            let rule = kpn_rule(level).unwrap();
            assert_eq!(grid.len(), rule.len());
            for j in 0..grid.len() {
                assert_eq!(grid.point(j)[0].to_bits(), rule.nodes()[j].to_bits());
                assert_relative_eq!(grid.weights()[j], rule.weights()[j], epsilon = 1e-16);
            }
        }
    }

    #[test]
    fn documented_point_counts_dim1() {
        for (level, count) in [(5, 9), (9, 17), (10, 19), (17, 33), (18, 35)] {
            assert_eq!(smolyak(1, level).unwrap().len(), count, "level {level}");
        }
    }

    #[test]
    fn documented_point_counts_dim2() {
        for (level, count) in [(5, 37), (14, 261), (25, 921)] {
            assert_eq!(smolyak(2, level).unwrap().len(), count, "level {level}");
        }
    }

    #[test]
    fn documented_point_counts_dim4() {
        let ladder = [
            (1, 1),
            (2, 9),
            (3, 33),
            (4, 81),
            (5, 201),
            (6, 441),
            (7, 761),
            (8, 1305),
            (9, 2129),
            (10, 3065),
            (11, 4489),
            (12, 6185),
            (13, 8745),
            (14, 12057),
            (15, 15321),
            (16, 20681),
        ];
        for (level, count) in ladder {
            assert_eq!(smolyak(4, level).unwrap().len(), count, "level {level}");
        }
    }

    #[test]
    fn grid_weights_are_normalized() {
        for (dim, level) in [(1, 18), (2, 9), (3, 6), (4, 5)] {
            let grid = smolyak(dim, level).unwrap();
            let sum: f64 = grid.weights().iter().sum();
            assert!(
                (sum - 1.0).abs() <= 1e-10,
                "dim {dim} level {level}: sum {sum}"
            );
        }
    }

    #[test]
    fn grids_nest_across_levels() {
        for (dim, level) in [(2, 4), (4, 3)] {
            let small = smolyak(dim, level).unwrap();
            let big = smolyak(dim, level + 1).unwrap();
            let keys: std::collections::HashSet<Vec<u64>> = (0..big.len())
                .map(|j| big.point(j).iter().map(|x| x.to_bits()).collect())
                .collect();
            for j in 0..small.len() {
                let key: Vec<u64> = small.point(j).iter().map(|x| x.to_bits()).collect();
                assert!(keys.contains(&key), "point {j} not nested");
            }
        }
    }

    #[test]
    fn grid_points_are_mirror_symmetric() {
        let grid = smolyak(3, 4).unwrap();
        for j in 0..grid.len() {
            let m = grid.mirror(j);
            assert_eq!(grid.weights()[j].to_bits(), grid.weights()[m].to_bits());
            for (a, b) in grid.point(j).iter().zip(grid.point(m)) {
                // -0.0 normalizes to 0.0 under + 0.0.
                assert_eq!((a + 0.0).to_bits(), ((-b) + 0.0).to_bits());
            }
        }
    }

    #[test]
    fn integrate_constant_and_second_moments() {
        let grid = smolyak(2, 5).unwrap();
        assert_relative_eq!(
            integrate(&grid, |_| Ok(1.0)).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            integrate(&grid, |xi| Ok(xi[0] * xi[0])).unwrap(),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn integrate_cancels_odd_monomials_exactly() {
        let grid = smolyak(2, 9).unwrap();
        for (e0, e1) in [(1, 0), (3, 2), (5, 0), (7, 4), (9, 8)] {
            let value = integrate(&grid, |xi| Ok(xi[0].powi(e0) * xi[1].powi(e1))).unwrap();
            assert_eq!(value, 0.0, "({e0},{e1})");
        }
    }

    #[test]
    fn integrate_propagates_failures_with_point_index() {
        let grid = smolyak(1, 2).unwrap();
        let err = integrate(&grid, |xi| {
            if xi[0] > 0.0 {
                Err(Error::Numerical("boom".into()))
            } else {
                Ok(0.0)
            }
        })
        .unwrap_err();
        assert!(err.to_string().contains("step 2"), "{err}");
        assert!(integrate(&grid, |_| Ok(f64::NAN)).is_err());
    }

    /// Integrates every monomial of total degree <= 2*level-1 on the grid;
    /// even ones must match closed-form Gaussian moments, odd ones vanish.
    fn check_total_degree_exactness(dim: usize, level: usize) {
        let grid = smolyak(dim, level).unwrap();
        let degree = exactness(level);
        let mut expo = vec![0usize; dim];
        'enumerate: loop {
            let total: usize = expo.iter().sum();
            if total <= degree {
                let exact: f64 = expo.iter().map(|&e| gaussian_moment(e)).product();
                let estimate = integrate(&grid, |xi| {
                    Ok(xi
                        .iter()
                        .zip(&expo)
                        .map(|(&x, &e)| x.powi(e as i32))
                        .product())
                })
                .unwrap();
                assert!(
                    (estimate - exact).abs() <= 1e-9 * exact.abs().max(1.0),
                    "dim {dim} level {level} expo {expo:?}: {estimate} vs {exact}"
                );
            }
            let mut j = dim;
            loop {
                if j == 0 {
                    break 'enumerate;
                }
                j -= 1;
                if expo[j] < degree {
                    expo[j] += 1;
                    break;
                }
                expo[j] = 0;
            }
        }
    }

    #[test]
    fn smolyak_exactness_over_total_degree() {
        for (dim, level) in [(2, 3), (2, 5), (3, 3), (4, 2)] {
            check_total_degree_exactness(dim, level);
        }
    }
}
