//! Hermite polynomial-chaos basis and surrogate representation.
//!
//! The basis is the probabilists' Hermite family `He_n`, orthogonal under
//! the standard Gaussian measure with `E[He_m He_n] = n! δ_mn`. Multivariate
//! polynomials are products over coordinates, indexed by multi-indices
//! `alpha` with total degree at most `p`; the full degree-`p` basis in `s`
//! dimensions has `R = (s+p)! / (s! p!)` members.
//!
//! A [`PceSurrogate`] stores one coefficient vector per load step, so a
//! single surrogate represents the whole stress trajectory. Its mean and
//! standard deviation per step come out of the coefficients analytically —
//! no sampling involved: mean is the zero-index coefficient and variance is
//! `Σ_{alpha≠0} gamma_alpha u_alpha^2` with `gamma_alpha = Π alpha_k!`.

use crate::io::{fmt_f64, read_csv, CsvWriter};
use crate::{Error, Result};
use std::path::Path;

/// Exponents of one basis polynomial, one entry per random coordinate.
pub type MultiIndex = Vec<usize>;

/// Largest basis cardinality the library will enumerate. Guards against
/// accidental `(s, p)` combinations whose coefficient storage would be
/// absurd; the studies shipped here stay below 4000.
pub const MAX_BASIS_SIZE: usize = 1_000_000;

/// Probabilists' Hermite polynomial `He_n(x)` by the three-term recurrence
/// `He_{n+1} = x He_n - n He_{n-1}` with `He_0 = 1`, `He_1 = x`.
pub fn hermite_1d(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        (prev, cur) = (cur, x * cur - k as f64 * prev);
    }
    cur
}

/// Fills `out[k] = He_k(x)` for `k = 0..out.len()`; the shared-prefix form
/// of the recurrence used in hot loops.
pub fn hermite_table(x: f64, out: &mut [f64]) {
    if let Some(first) = out.first_mut() {
        *first = 1.0;
    }
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 2..out.len() {
        out[k] = x * out[k - 1] - (k - 1) as f64 * out[k - 2];
    }
}

/// Basis cardinality `R = C(s+p, p)` as an exact integer.
pub fn basis_size(s: usize, p: usize) -> Result<usize> {
    let mut r: u128 = 1;
    for k in 1..=p as u128 {
        r = r * (s as u128 + k) / k; // exact: product of k consecutive integers divides by k!
        if r > MAX_BASIS_SIZE as u128 {
            return Err(Error::Config(format!(
                "basis for dimension {s}, degree {p} exceeds the {MAX_BASIS_SIZE}-term cap"
            )));
        }
    }
    Ok(r as usize)
}

/// All multi-indices with `|alpha| <= p` in graded lexicographic order:
/// total degree ascending, ties broken lexicographically descending, so the
/// zero index comes first and e.g. `(s=2, p=2)` enumerates as
/// `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)`. This order fixes the
/// coefficient layout in memory and on disk.
pub fn full_index_set(s: usize, p: usize) -> Result<Vec<MultiIndex>> {
    if s == 0 {
        return Err(Error::InvalidInput(
            "index set needs at least one dimension".into(),
        ));
    }
    let r = basis_size(s, p)?;
    let mut set = Vec::with_capacity(r);
    let mut alpha = vec![0usize; s];
    for degree in 0..=p {
        push_degree_block(&mut set, &mut alpha, 0, degree);
    }
    debug_assert_eq!(set.len(), r);
    Ok(set)
}

/// Appends all indices of exact total degree `remaining` over coordinates
/// `k..s`, assigning larger leading exponents first (lex-descending).
fn push_degree_block(
    set: &mut Vec<MultiIndex>,
    alpha: &mut MultiIndex,
    k: usize,
    remaining: usize,
) {
    if k + 1 == alpha.len() {
        alpha[k] = remaining;
        set.push(alpha.clone());
        return;
    }
    for lead in (0..=remaining).rev() {
        alpha[k] = lead;
        push_degree_block(set, alpha, k + 1, remaining - lead);
    }
    alpha[k] = 0;
}

/// Basis norm `gamma_alpha = E[H_alpha^2] = Π alpha_k!`.
pub fn gamma(alpha: &[usize]) -> f64 {
    alpha
        .iter()
        .map(|&a| (1..=a).map(|k| k as f64).product::<f64>())
        .product()
}

/// Multivariate Hermite polynomial `H_alpha(xi) = Π He_{alpha_k}(xi_k)`.
pub fn eval_basis(alpha: &[usize], xi: &[f64]) -> f64 {
    assert_eq!(alpha.len(), xi.len(), "multi-index/point dimension mismatch");
    alpha
        .iter()
        .zip(xi)
        .map(|(&a, &x)| hermite_1d(a, x))
        .product()
}

/// Polynomial-chaos surrogate of a stepwise response: one coefficient
/// vector over the full degree-`p` basis per load step.
#[derive(Clone, Debug, PartialEq)]
pub struct PceSurrogate {
    dim: usize,
    degree: usize,
    steps: usize,
    index_set: Vec<MultiIndex>,
    gamma: Vec<f64>,
    /// Row-major `steps x R`: `coeffs[t * R + r]` is `u_alpha` for step `t`
    /// and basis position `r` in graded-lex order.
    coeffs: Vec<f64>,
}

impl PceSurrogate {
    /// Wraps projected coefficients (`steps x R` row-major, graded-lex
    /// column order) into a surrogate, validating shape and finiteness.
    pub fn from_coefficients(
        dim: usize,
        degree: usize,
        steps: usize,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        let index_set = full_index_set(dim, degree)?;
        let r = index_set.len();
        if coeffs.len() != steps * r {
            return Err(Error::Dimension(format!(
                "coefficient matrix has {} entries, expected {} steps x {} basis terms",
                coeffs.len(),
                steps,
                r
            )));
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::Numerical(
                "surrogate coefficients contain non-finite values".into(),
            ));
        }
        let gamma = index_set.iter().map(|a| gamma(a)).collect();
        Ok(Self {
            dim,
            degree,
            steps,
            index_set,
            gamma,
            coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn basis_len(&self) -> usize {
        self.index_set.len()
    }

    pub fn index_set(&self) -> &[MultiIndex] {
        &self.index_set
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gamma
    }

    /// Coefficients of step `t` in graded-lex basis order.
    pub fn coefficients_at(&self, t: usize) -> &[f64] {
        let r = self.index_set.len();
        &self.coeffs[t * r..(t + 1) * r]
    }

    fn check_point(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim {
            return Err(Error::Dimension(format!(
                "surrogate expects {}-dimensional points, got {}",
                self.dim,
                xi.len()
            )));
        }
        Ok(())
    }

    /// Values of all `R` basis polynomials at `xi`, in graded-lex order.
    pub fn basis_values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_point(xi)?;
        let mut values = vec![0.0; self.index_set.len()];
        self.basis_values_into(xi, &mut values);
        Ok(values)
    }

    fn basis_values_into(&self, xi: &[f64], values: &mut [f64]) {
        // Per-coordinate Hermite tables up to the degree, then products.
        let width = self.degree + 1;
        let mut tables = vec![0.0; self.dim * width];
        for (k, &x) in xi.iter().enumerate() {
            hermite_table(x, &mut tables[k * width..(k + 1) * width]);
        }
        for (slot, alpha) in values.iter_mut().zip(&self.index_set) {
            let mut h = 1.0;
            for (k, &a) in alpha.iter().enumerate() {
                h *= tables[k * width + a];
            }
            *slot = h;
        }
    }

    /// Surrogate response at point `xi`, step `t`.
    pub fn eval(&self, xi: &[f64], t: usize) -> Result<f64> {
        let basis = self.basis_values(xi)?;
        Ok(dot(self.coefficients_at(t), &basis))
    }

    /// Fills `out[t]` with the surrogate response at every step for one
    /// point; computes the basis once, so this is the preferred call in
    /// sampling loops. `out` must have length `steps`.
    pub fn eval_trajectory_into(
        &self,
        xi: &[f64],
        basis_scratch: &mut Vec<f64>,
        out: &mut [f64],
    ) -> Result<()> {
        self.check_point(xi)?;
        if out.len() != self.steps {
            return Err(Error::Dimension(format!(
                "trajectory buffer holds {} steps, surrogate has {}",
                out.len(),
                self.steps
            )));
        }
        basis_scratch.resize(self.index_set.len(), 0.0);
        self.basis_values_into(xi, basis_scratch);
        for (t, slot) in out.iter_mut().enumerate() {
            *slot = dot(self.coefficients_at(t), basis_scratch);
        }
        Ok(())
    }

    /// Mean response at step `t`: the zero-index coefficient.
    pub fn analytic_mean(&self, t: usize) -> f64 {
        self.coefficients_at(t)[0]
    }

    /// Standard deviation at step `t`:
    /// `sqrt(Σ_{alpha≠0} gamma_alpha u_alpha^2)`, summed in basis order.
    pub fn analytic_std(&self, t: usize) -> f64 {
        let coeffs = self.coefficients_at(t);
        let mut var = 0.0;
        for (g, u) in self.gamma[1..].iter().zip(&coeffs[1..]) {
            var += g * u * u;
        }
        var.sqrt()
    }

    /// Writes the surrogate as CSV with columns
    /// `t, alpha_1..alpha_s, u_alpha, gamma_alpha`, rows ordered by step
    /// then basis position.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let alpha_names: Vec<String> =
            (1..=self.dim).map(|k| format!("alpha_{k}")).collect();
        let mut header: Vec<&str> = vec!["t"];
        header.extend(alpha_names.iter().map(String::as_str));
        header.push("u_alpha");
        header.push("gamma_alpha");
        let mut w = CsvWriter::create(path, &header)?;
        let mut row = Vec::with_capacity(header.len());
        for t in 0..self.steps {
            let coeffs = self.coefficients_at(t);
            for (r, alpha) in self.index_set.iter().enumerate() {
                row.clear();
                row.push(t.to_string());
                row.extend(alpha.iter().map(|a| a.to_string()));
                row.push(fmt_f64(coeffs[r]));
                row.push(fmt_f64(self.gamma[r]));
                w.write_row(&row)?;
            }
        }
        w.finish()
    }

    /// Reads a surrogate back from [`write_csv`](Self::write_csv) output,
    /// validating the graded-lex row order and basis completeness.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let csv = read_csv(path)?;
        let malformed = |message: String| Error::Parse {
            path: path.display().to_string(),
            message,
        };

        let dim = csv
            .header
            .iter()
            .filter(|h| h.starts_with("alpha_"))
            .count();
        if dim == 0 || csv.header.first().map(String::as_str) != Some("t") {
            return Err(malformed(
                "expected columns t, alpha_1.., u_alpha, gamma_alpha".into(),
            ));
        }
        let u_col = csv.column("u_alpha")?;

        // Degree = max total degree present; infer, then check completeness.
        let mut max_degree = 0;
        for row in 0..csv.rows.len() {
            let total: usize = (0..dim)
                .map(|k| csv.parse_usize(row, 1 + k))
                .sum::<Result<usize>>()?;
            max_degree = max_degree.max(total);
        }
        let index_set = full_index_set(dim, max_degree)?;
        let r = index_set.len();
        if csv.rows.is_empty() || csv.rows.len() % r != 0 {
            return Err(malformed(format!(
                "{} data rows do not tile a {}-term basis",
                csv.rows.len(),
                r
            )));
        }
        let steps = csv.rows.len() / r;

        let mut coeffs = vec![0.0; steps * r];
        for (row, slot) in coeffs.iter_mut().enumerate() {
            let t = csv.parse_usize(row, 0)?;
            if t != row / r {
                return Err(malformed(format!(
                    "row {}: steps out of order (found t={t})",
                    row + 1
                )));
            }
            let expected_alpha = &index_set[row % r];
            for (k, &expected_exp) in expected_alpha.iter().enumerate() {
                if csv.parse_usize(row, 1 + k)? != expected_exp {
                    return Err(malformed(format!(
                        "row {}: multi-index out of graded-lex order",
                        row + 1
                    )));
                }
            }
            *slot = csv.parse_f64(row, u_col)?;
        }
        Self::from_coefficients(dim, max_degree, steps, coeffs)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
