//! Statistical estimators against distribution theory: the empirical 1%
//! quantile of a genuinely normal stream, and the O(n^-1/2) Monte Carlo
//! convergence rate of the sampled mean.

mod common;

use pceplast::analysis::{mc_sample_model, prefix_stats, sample_surrogate};
use pceplast::pce::PceSurrogate;

#[test]
fn passthrough_stream_reproduces_the_normal_law_at_one_million() {
    // The model copies its single standard-normal input through, so the MC
    // statistics must match N(0,1): the 1% quantile is Phi^-1(0.01).
    let dir = tempfile::tempdir().unwrap();
    let n = 1_000_000;
    let model = |xi: &[f64], out: &mut [f64]| {
        out[0] = xi[0];
        Ok(())
    };
    let (stats, archive) =
        mc_sample_model(1, 1, n, 42, &model, &dir.path().join("mc.bin")).unwrap();
    assert_eq!(archive.samples(), n);

    assert!(stats.mean[0].abs() <= 4e-3, "mean {:e}", stats.mean[0]);
    assert!((stats.std[0] - 1.0).abs() <= 5e-3, "std {}", stats.std[0]);
    assert!(
        (stats.q01[0] - (-2.3263)).abs() <= 0.01,
        "q01 {} vs -2.3263",
        stats.q01[0]
    );
}

#[test]
fn sampled_mean_error_decays_as_inverse_square_root() {
    // Surrogate u(xi) = xi has analytic mean zero; the sampled-mean error at
    // prefix size m is a mean of m unit normals, so its RMS over many seeds
    // must follow m^'t-1/2'. Fit the log-log slope across three decades.
    let surrogate = PceSurrogate::from_coefficients(1, 1, 1, vec![0.0, 1.0]).unwrap();
    let sizes = [100usize, 1_000, 10_000, 100_000];
    let seeds = 64;

    let mut sq_err = [0.0f64; 4];
    for seed in 0..seeds {
        let samples = sample_surrogate(&surrogate, *sizes.last().unwrap(), seed).unwrap();
        for (slot, &m) in sq_err.iter_mut().zip(&sizes) {
            let stats = prefix_stats(&samples, m).unwrap();
            *slot += stats.mean[0] * stats.mean[0];
        }
    }

    let log_n: Vec<f64> = sizes.iter().map(|&m| (m as f64).log10()).collect();
    let log_rms: Vec<f64> = sq_err
        .iter()
        .map(|&s| (s / seeds as f64).sqrt().log10())
        .collect();
    let (slope, _, r2) = common::linear_fit(&log_n, &log_rms);
    assert!(
        (-0.6..=-0.4).contains(&slope),
        "convergence slope {slope} outside -0.5 +- 0.1"
    );
    assert!(r2 > 0.98, "log-log fit R^2 = {r2}");

    // The RMS at each size is also near the exact standard error 1/sqrt(m).
    for (&s, &m) in sq_err.iter().zip(&sizes) {
        let rms = (s / seeds as f64).sqrt();
        let se = 1.0 / (m as f64).sqrt();
        assert!(
            rms <= 1.5 * se && rms >= se / 1.5,
            "RMS {rms:e} far from standard error {se:e} at m = {m}"
        );
    }
}
