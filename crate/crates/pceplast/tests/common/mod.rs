//! Shared oracles for the integration suites.
//!
//! Each integration test binary compiles this module separately and uses a
//! subset of it, so unused-item lints are off.
//!
//! Everything here is computed by a route independent of the library code
//! under test: Gauss–Hermite rules come from an eigendecomposition of the
//! Jacobi matrix rather than tabulated abscissas, and the uniaxial
//! elastoplastic reference is a scalar return map that never touches the
//! tensorial implementation.

#![allow(dead_code)]

use nalgebra::DMatrix;

/// Gauss–Hermite rule for the standard normal weight (probabilists'
/// convention): `sum(w[i] * g(x[i]))` approximates `E[g(Z)]`, `Z ~ N(0,1)`,
/// exactly for polynomials of degree `2n - 1`.
///
/// Built by Golub–Welsch: the monic probabilists' Hermite polynomials obey
/// `He_{k+1}(x) = x He_k(x) - k He_{k-1}(x)`, so the Jacobi matrix has zero
/// diagonal and off-diagonal entries `sqrt(k)`. Nodes are its eigenvalues;
/// each weight is the squared first component of the matching normalized
/// eigenvector.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eigen = nalgebra::SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eigen.eigenvalues[i];
            let first = eigen.eigenvectors[(0, i)];
            (node, first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Probabilists' Hermite polynomial `He_k(x)` by the three-term recurrence.
pub fn hermite_he(k: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = x;
    for j in 1..k {
        let next = x * cur - (j as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Scalar (1D) rate-independent elastoplasticity with linear isotropic
/// hardening, integrated by the textbook return map. Under uniaxial stress
/// the tensorial model must reproduce this law exactly: elastic branches of
/// slope `E`, plastic loading along `sigma_y0 + E_t (eps - eps_y)` with
/// `E_t = E H / (E + H)`.
///
/// `targets` are total-strain waypoints, one per output entry; each step may
/// load or unload arbitrarily.
pub fn bilinear_1d(e: f64, sigma_y0: f64, h: f64, targets: &[f64]) -> Vec<f64> {
    let mut eps_p = 0.0;
    let mut kappa = 0.0;
    let mut out = Vec::with_capacity(targets.len());
    for &eps in targets {
        let sigma_trial = e * (eps - eps_p);
        let f = sigma_trial.abs() - (sigma_y0 + h * kappa);
        let sigma = if f > 0.0 {
            let dgamma = f / (e + h);
            let sign = sigma_trial.signum();
            eps_p += sign * dgamma;
            kappa += dgamma;
            sigma_trial - sign * e * dgamma
        } else {
            sigma_trial
        };
        out.push(sigma);
    }
    out
}

/// Lognormal location/scale from a target mean and standard deviation:
/// `sigma_ln^2 = ln(1 + (std/mean)^2)`, `mu_ln = ln(mean) - sigma_ln^2 / 2`.
pub fn lognormal_params(mean: f64, std: f64) -> (f64, f64) {
    let cv2 = (std / mean) * (std / mean);
    let var_ln = (1.0 + cv2).ln();
    ((mean.ln() - 0.5 * var_ln), var_ln.sqrt())
}

/// Standard normal CDF via the complementary error function. `erfc` keeps
/// full relative accuracy in the far tails where `0.5 * (1 + erf(...))`
/// would cancel.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Ordinary least-squares slope and R^2 of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let ss_tot: f64 = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    (slope, intercept, r2)
}
