//! Polynomial-chaos surrogates for an elastoplastic material point.
//!
//! The crate couples four building blocks into reproducible uncertainty
//! studies of the uniaxial stress response `sigma11(t)` of a von Mises
//! material point with bilinear isotropic hardening:
//!
//! * [`material`] — the deterministic solver: Voigt-6 tensor algebra,
//!   radial-return stress update, and a damped-Newton uniaxial-stress driver.
//! * [`random`] — moment-matched lognormal parameter maps plus a
//!   counter-addressable standard-normal sampler (same deviates for any
//!   worker count or evaluation order).
//! * [`pce`] / [`sparse_grid`] / [`collocation`] — probabilists'-Hermite
//!   chaos bases, nested Gauss-Hermite sparse collocation grids, and the
//!   discrete projection that turns model snapshots into a surrogate.
//! * [`analysis`] — the Monte Carlo reference (with an on-disk sample
//!   archive), surrogate statistics, error norms, per-step R², and timing.
//!
//! [`study`] wires the pieces into the `run`/`grid`/`trace` commands exposed
//! by the companion CLI binary and pins the two shipped experiment presets.
//!
//! Everything downstream of a `(config, seed)` pair is deterministic: CSV
//! outputs are byte-identical across reruns and across `--threads` settings.

pub mod analysis;
pub mod collocation;
mod error;
pub mod io;
pub mod material;
pub mod pce;
pub mod random;
pub mod sparse_grid;
pub mod study;

pub use error::{Error, Result};
