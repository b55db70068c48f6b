//! Von Mises (J2) elastoplasticity at a single material point.
//!
//! Small-strain kinematics with the additive split `eps = eps_e + eps_p`,
//! linear isotropic elasticity, an associated flow rule, and bilinear
//! isotropic hardening `sigma_y(kappa) = sigma_y0 + H * kappa`. The stress
//! update is the classical radial-return map; for linear hardening the
//! discrete consistency condition is linear in the plastic multiplier, so
//! the return is exact (no local iteration).
//!
//! # Voigt convention
//!
//! Symmetric tensors are stored as `[a11, a22, a33, a12, a23, a31]` with
//! *tensorial* (unscaled) shear components. The factor of two that
//! engineering notation attaches to shear strains is applied inside the
//! stiffness operators: [`elastic_stress`] computes
//! `sigma = lambda tr(eps) I + 2 G eps` componentwise (so
//! `sigma12 = 2 G eps12`), while the matrix returned by
//! [`elastic_stiffness`] keeps the familiar engineering form with `G` on the
//! shear diagonal and therefore multiplies engineering shears `2 eps_ij`.

use crate::{Error, Result};
use nalgebra::Matrix6;

/// Lateral-stress tolerance of the uniaxial driver, relative to `sigma_y0`.
///
/// [`uniaxial_stress_step`] guarantees `|sigma22|, |sigma33| <= TOL * sigma_y0`
/// on success.
pub const LATERAL_STRESS_TOL: f64 = 1e-6;

/// Yield-consistency tolerance after a plastic return, relative to `sigma_y0`.
pub const YIELD_RESIDUAL_TOL: f64 = 1e-6;

/// Internal Newton target, relative to `sigma_y0`. Much tighter than the
/// guaranteed [`LATERAL_STRESS_TOL`]: the lateral residual leaks into
/// `sigma11` roughly one-to-one (factor `2ν` elastically), and downstream
/// consumers compare `sigma11` against closed-form references at 1e-8
/// relative and require refinement-invariance at 1e-10. A 1e-12 target
/// bounds the leak at ~1e-12 of the stress scale while costing at most one
/// extra iteration, since the residual is piecewise linear in the lateral
/// strain.
const NEWTON_TARGET: f64 = 1e-12;

/// Iteration cap of the damped Newton solve in [`uniaxial_stress_step`].
const NEWTON_MAX_ITER: usize = 50;

/// Finite-difference step (strain units) for the Newton slope. The residual
/// is piecewise linear in the lateral strain, so any step well above
/// round-off and well below the strain scale gives the exact branch slope.
const FD_STEP: f64 = 1e-9;

/// Largest admissible |strain| on a load path (small-strain regime).
const MAX_PATH_STRAIN: f64 = 0.1;

/// Symmetric second-order tensor in Voigt order `[11, 22, 33, 12, 23, 31]`
/// with tensorial (unscaled) shear components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Voigt(pub [f64; 6]);

impl Voigt {
    pub const ZERO: Voigt = Voigt([0.0; 6]);

    /// Second-order identity.
    pub const IDENTITY: Voigt = Voigt([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// Deviatoric part `a - tr(a)/3 I`.
    pub fn deviator(&self) -> Voigt {
        let m = self.trace() / 3.0;
        Voigt([
            self.0[0] - m,
            self.0[1] - m,
            self.0[2] - m,
            self.0[3],
            self.0[4],
            self.0[5],
        ])
    }

    /// Full double contraction `a : b`; off-diagonal entries count twice
    /// because each Voigt slot stands for a symmetric pair.
    pub fn double_dot(&self, other: &Voigt) -> f64 {
        self.0[0] * other.0[0]
            + self.0[1] * other.0[1]
            + self.0[2] * other.0[2]
            + 2.0 * (self.0[3] * other.0[3] + self.0[4] * other.0[4] + self.0[5] * other.0[5])
    }

    /// Frobenius norm `sqrt(a : a)`.
    pub fn norm(&self) -> f64 {
        self.double_dot(self).sqrt()
    }

    /// Von Mises equivalent stress `sqrt(3 J2) = sqrt(3/2 s : s)`.
    pub fn von_mises(&self) -> f64 {
        let s = self.deviator();
        (1.5 * s.double_dot(&s)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, f: f64) -> Voigt {
        let mut out = self.0;
        for x in &mut out {
            *x *= f;
        }
        Voigt(out)
    }
}

impl std::ops::Add for Voigt {
    type Output = Voigt;
    fn add(self, rhs: Voigt) -> Voigt {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Voigt(out)
    }
}

impl std::ops::Sub for Voigt {
    type Output = Voigt;
    fn sub(self, rhs: Voigt) -> Voigt {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Voigt(out)
    }
}

/// Elastic constants and the bilinear hardening law of the material point.
///
/// Constructed through [`MaterialParams::new`], which enforces
/// `E > 0`, `0 < nu < 0.5`, `sigma_y0 > 0`, `H >= 0` (all finite).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    young: f64,
    poisson: f64,
    yield_stress: f64,
    hardening: f64,
}

impl MaterialParams {
    pub fn new(young: f64, poisson: f64, yield_stress: f64, hardening: f64) -> Result<Self> {
        if !(young.is_finite() && young > 0.0) {
            return Err(Error::InvalidInput(format!(
                "Young's modulus must be finite and positive, got {young:e}"
            )));
        }
        if !(poisson.is_finite() && poisson > 0.0 && poisson < 0.5) {
            return Err(Error::InvalidInput(format!(
                "Poisson's ratio must lie in (0, 0.5), got {poisson:e}"
            )));
        }
        if !(yield_stress.is_finite() && yield_stress > 0.0) {
            return Err(Error::InvalidInput(format!(
                "initial yield stress must be finite and positive, got {yield_stress:e}"
            )));
        }
        if !(hardening.is_finite() && hardening >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "hardening modulus must be finite and non-negative, got {hardening:e}"
            )));
        }
        Ok(Self {
            young,
            poisson,
            yield_stress,
            hardening,
        })
    }

    pub fn young(&self) -> f64 {
        self.young
    }

    pub fn poisson(&self) -> f64 {
        self.poisson
    }

    /// Initial yield stress `sigma_y0`.
    pub fn yield_stress(&self) -> f64 {
        self.yield_stress
    }

    /// Isotropic hardening modulus `H`.
    pub fn hardening(&self) -> f64 {
        self.hardening
    }

    pub fn shear_modulus(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }

    pub fn lame_lambda(&self) -> f64 {
        self.young * self.poisson / ((1.0 + self.poisson) * (1.0 - 2.0 * self.poisson))
    }

    pub fn bulk_modulus(&self) -> f64 {
        self.young / (3.0 * (1.0 - 2.0 * self.poisson))
    }

    /// Yield stress at hardening state `kappa`.
    pub fn yield_stress_at(&self, kappa: f64) -> f64 {
        self.yield_stress + self.hardening * kappa
    }

    /// Uniaxial strain at first yield, `sigma_y0 / E`.
    pub fn elastic_limit_strain(&self) -> f64 {
        self.yield_stress / self.young
    }

    /// Post-yield tangent of the uniaxial response, `E H / (E + H)`.
    pub fn tangent_modulus(&self) -> f64 {
        self.young * self.hardening / (self.young + self.hardening)
    }
}

/// State carried across load steps: total strain, stress, plastic strain,
/// and the accumulated equivalent plastic strain `kappa` (non-decreasing).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlasticState {
    pub strain: Voigt,
    pub stress: Voigt,
    pub plastic_strain: Voigt,
    pub eps_p_eq: f64,
}

impl PlasticState {
    /// Virgin state: zero strain, stress, and hardening.
    pub fn initial() -> Self {
        Self {
            strain: Voigt::ZERO,
            stress: Voigt::ZERO,
            plastic_strain: Voigt::ZERO,
            eps_p_eq: 0.0,
        }
    }

    /// Hardening-variable alias used by the yield law.
    pub fn kappa(&self) -> f64 {
        self.eps_p_eq
    }
}

/// Prescribed `eps11` targets, one per load step.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadPath {
    targets: Vec<f64>,
}

impl LoadPath {
    /// Validates a raw target sequence: at least one step, every target
    /// finite with `|eps11| <= 0.1` (small-strain regime), and a
    /// non-negative first increment from the virgin state.
    pub fn from_targets(targets: Vec<f64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidInput(
                "load path must contain at least one step".into(),
            ));
        }
        for (t, &e) in targets.iter().enumerate() {
            if !e.is_finite() || e.abs() > MAX_PATH_STRAIN {
                return Err(Error::InvalidInput(format!(
                    "load path step {t}: strain {e:e} outside the small-strain range \
                     |eps| <= {MAX_PATH_STRAIN}"
                )));
            }
        }
        if targets[0] < 0.0 {
            return Err(Error::InvalidInput(
                "load path must start with a non-negative strain".into(),
            ));
        }
        Ok(Self { targets })
    }

    /// Monotone ramp `0 -> eps_max` in `steps` equal increments
    /// (`targets[t] = eps_max (t+1)/steps`).
    pub fn ramp(steps: usize, eps_max: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidInput("ramp needs at least one step".into()));
        }
        let targets = (1..=steps)
            .map(|t| eps_max * t as f64 / steps as f64)
            .collect();
        Self::from_targets(targets)
    }

    /// Ramp `0 -> eps_max` in `steps/2` increments followed by the mirrored
    /// unload back to exactly zero; `steps` must be even.
    pub fn ramp_unload(steps: usize, eps_max: f64) -> Result<Self> {
        if steps == 0 || !steps.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "load/unload path needs an even number of steps, got {steps}"
            )));
        }
        let half = steps / 2;
        let mut targets: Vec<f64> = (1..=half)
            .map(|t| eps_max * t as f64 / half as f64)
            .collect();
        targets.extend((0..half).rev().map(|t| eps_max * t as f64 / half as f64));
        Self::from_targets(targets)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

/// Per-step `sigma11` trajectory returned by [`run_uniaxial`].
pub type ResponseSeries = Vec<f64>;

/// Isotropic elastic stress `sigma = lambda tr(eps) I + 2 G eps`.
///
/// Operates on tensorial shear components; this is where the engineering
/// factor of two lives (`sigma12 = 2 G eps12`).
pub fn elastic_stress(params: &MaterialParams, strain: &Voigt) -> Voigt {
    let lambda = params.lame_lambda();
    let two_g = 2.0 * params.shear_modulus();
    let tr = strain.trace();
    Voigt([
        lambda * tr + two_g * strain.0[0],
        lambda * tr + two_g * strain.0[1],
        lambda * tr + two_g * strain.0[2],
        two_g * strain.0[3],
        two_g * strain.0[4],
        two_g * strain.0[5],
    ])
}

/// Isotropic elastic stiffness from raw constants, as a 6x6 matrix in
/// engineering-shear form: normal block `lambda + 2G` on the diagonal with
/// `lambda` coupling, and `G` on the shear diagonal.
///
/// The matrix multiplies engineering strain vectors (shears doubled);
/// applying it to this crate's tensorial Voigt vectors therefore requires
/// scaling the shear slots by two first, which is exactly what
/// [`elastic_stress`] does internally. For `E = 1, nu = 0` the matrix is
/// `diag(1, 1, 1, 1/2, 1/2, 1/2)`.
///
/// Accepts any finite `E > 0`, `0 <= nu < 0.5`; unlike
/// [`MaterialParams::new`] the degenerate `nu = 0` is allowed here since the
/// matrix itself stays well defined (the axes merely decouple).
pub fn isotropic_stiffness(young: f64, poisson: f64) -> Matrix6<f64> {
    let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    let g = young / (2.0 * (1.0 + poisson));
    let mut d = Matrix6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            d[(i, j)] = lambda;
        }
        d[(i, i)] = lambda + 2.0 * g;
        d[(i + 3, i + 3)] = g;
    }
    d
}

/// Elastic stiffness of a validated parameter set; see [`isotropic_stiffness`].
pub fn elastic_stiffness(params: &MaterialParams) -> Matrix6<f64> {
    isotropic_stiffness(params.young, params.poisson)
}

/// Value of the yield function `f = q - sigma_y(kappa)` where
/// `q = sqrt(3 J2)` is the von Mises stress. `f <= 0` is elastic.
///
/// (The literature often writes the equivalent form
/// `sqrt(J2) - sigma_y/sqrt(3)`; the two differ by the constant factor
/// `sqrt(3)` and share their zero set.)
pub fn yield_function(params: &MaterialParams, stress: &Voigt, kappa: f64) -> f64 {
    stress.von_mises() - params.yield_stress_at(kappa)
}

/// Strain-driven radial-return update for one increment `deps`.
///
/// Computes the elastic trial stress, checks the yield condition against
/// the current hardening state, and — if the trial lies outside the yield
/// surface — returns the deviator radially with
/// `dgamma = f_trial / (3 G + H)`, which satisfies the discrete consistency
/// condition exactly for bilinear hardening. The returned state has
/// `|f| <= 1e-6 sigma_y0` and unchanged plastic volume
/// (the flow direction is deviatoric).
pub fn radial_return(
    params: &MaterialParams,
    state: &PlasticState,
    deps: &Voigt,
) -> Result<PlasticState> {
    if !deps.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite strain increment {deps:?}"
        )));
    }
    let strain = state.strain + *deps;
    let trial = state.stress + elastic_stress(params, deps);
    let q_trial = trial.von_mises();
    let f_trial = q_trial - params.yield_stress_at(state.eps_p_eq);

    if f_trial <= 0.0 {
        return Ok(PlasticState {
            strain,
            stress: trial,
            plastic_strain: state.plastic_strain,
            eps_p_eq: state.eps_p_eq,
        });
    }

    let g = params.shear_modulus();
    let dgamma = f_trial / (3.0 * g + params.hardening());
    // Flow direction n = 3 s / (2 q); plastic increment dgamma * n keeps
    // dgamma equal to the equivalent-plastic-strain increment.
    let s_trial = trial.deviator();
    let flow = s_trial.scaled(1.5 * dgamma / q_trial);
    let mean = trial.trace() / 3.0;
    let stress = s_trial.scaled(1.0 - 3.0 * g * dgamma / q_trial) + Voigt::IDENTITY.scaled(mean);
    let next = PlasticState {
        strain,
        stress,
        plastic_strain: state.plastic_strain + flow,
        eps_p_eq: state.eps_p_eq + dgamma,
    };

    let residual = yield_function(params, &next.stress, next.eps_p_eq);
    if !next.stress.is_finite() || residual.abs() > YIELD_RESIDUAL_TOL * params.yield_stress() {
        return Err(Error::Numerical(format!(
            "radial return left the yield surface unsatisfied (f = {residual:e})"
        )));
    }
    Ok(next)
}

/// Advances the state to a prescribed axial strain `eps11` under the
/// uniaxial-stress constraint `sigma22 = sigma33 = 0` (shears zero).
///
/// The lateral strains `eps22 = eps33` are found by a damped Newton
/// iteration (finite-difference slope, step halving whenever the residual
/// grows, at most 50 iterations) started from the previous step's converged
/// lateral strain. On success `|sigma22|` and `|sigma33|` are below
/// `1e-6 sigma_y0`; the iteration itself targets `1e-9 sigma_y0`.
pub fn uniaxial_stress_step(
    params: &MaterialParams,
    state: &PlasticState,
    eps11: f64,
) -> Result<PlasticState> {
    if !eps11.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite axial strain target {eps11:e}"
        )));
    }

    let try_lateral = |lat: f64| -> Result<(PlasticState, f64)> {
        let deps = Voigt([
            eps11 - state.strain.0[0],
            lat - state.strain.0[1],
            lat - state.strain.0[2],
            -state.strain.0[3],
            -state.strain.0[4],
            -state.strain.0[5],
        ]);
        let next = radial_return(params, state, &deps)?;
        let residual = 0.5 * (next.stress.0[1] + next.stress.0[2]);
        Ok((next, residual))
    };

    let scale = params.yield_stress();
    let target = NEWTON_TARGET * scale;
    let mut lat = state.strain.0[1];
    let (mut next, mut residual) = try_lateral(lat)?;

    let mut iterations = 0;
    while residual.abs() > target {
        if iterations >= NEWTON_MAX_ITER {
            return Err(Error::Convergence {
                context: "uniaxial stress driver",
                iterations,
                residual,
            });
        }
        iterations += 1;

        let (_, shifted) = try_lateral(lat + FD_STEP)?;
        let slope = (shifted - residual) / FD_STEP;
        if !slope.is_finite() || slope == 0.0 {
            return Err(Error::Numerical(format!(
                "degenerate lateral stiffness {slope:e} in uniaxial driver"
            )));
        }

        let mut step = -residual / slope;
        // Damping: halve the update until the residual stops growing.
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = lat + step;
            let (cand_state, cand_residual) = try_lateral(candidate)?;
            if cand_residual.abs() < residual.abs() {
                lat = candidate;
                next = cand_state;
                residual = cand_residual;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::Convergence {
                context: "uniaxial stress driver (damping stalled)",
                iterations,
                residual,
            });
        }
    }

    let bound = LATERAL_STRESS_TOL * scale;
    if next.stress.0[1].abs() > bound || next.stress.0[2].abs() > bound {
        return Err(Error::Convergence {
            context: "uniaxial stress driver (lateral stress out of tolerance)",
            iterations,
            residual,
        });
    }
    Ok(next)
}

/// Runs the full strain-driven path from the virgin state and returns the
/// `sigma11` trajectory.
pub fn run_uniaxial(params: &MaterialParams, path: &LoadPath) -> Result<ResponseSeries> {
    let mut state = PlasticState::initial();
    let mut sigma11 = Vec::with_capacity(path.len());
    for (step, &eps11) in path.targets().iter().enumerate() {
        state = uniaxial_stress_step(params, &state, eps11).map_err(|e| e.at_step(step))?;
        sigma11.push(state.stress.0[0]);
    }
    Ok(sigma11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn steel() -> MaterialParams {
        MaterialParams::new(210e9, 0.3, 235e6, 2.1e9).unwrap()
    }

    #[test]
    fn params_reject_invalid_ranges() {
        assert!(MaterialParams::new(0.0, 0.3, 235e6, 2.1e9).is_err());
        assert!(MaterialParams::new(-1.0, 0.3, 235e6, 2.1e9).is_err());
        assert!(MaterialParams::new(210e9, 0.5, 235e6, 2.1e9).is_err());
        assert!(MaterialParams::new(210e9, 0.0, 235e6, 2.1e9).is_err());
        assert!(MaterialParams::new(210e9, 0.3, 0.0, 2.1e9).is_err());
        assert!(MaterialParams::new(210e9, 0.3, 235e6, -1.0).is_err());
        assert!(MaterialParams::new(f64::NAN, 0.3, 235e6, 2.1e9).is_err());
        assert!(MaterialParams::new(210e9, 0.3, 235e6, 2.1e9).is_ok());
    }

    #[test]
    fn derived_moduli_match_closed_forms() {
        let p = steel();
        assert_relative_eq!(p.shear_modulus(), 210e9 / 2.6, max_relative = 1e-15);
        assert_relative_eq!(
            p.lame_lambda(),
            210e9 * 0.3 / (1.3 * 0.4),
            max_relative = 1e-15
        );
        assert_relative_eq!(p.elastic_limit_strain(), 235e6 / 210e9, max_relative = 1e-15);
        assert_relative_eq!(
            p.tangent_modulus(),
            210e9 * 2.1e9 / (210e9 + 2.1e9),
            max_relative = 1e-15
        );
    }

    #[test]
    fn stiffness_unit_modulus_zero_poisson_is_identity_with_half_shears() {
        let d = isotropic_stiffness(1.0, 0.0);
        let expected = Matrix6::from_diagonal(&nalgebra::Vector6::new(
            1.0, 1.0, 1.0, 0.5, 0.5, 0.5,
        ));
        assert_eq!(d, expected);
    }

    #[test]
    fn stiffness_steel_first_entry() {
        let d = elastic_stiffness(&steel());
        // E(1-nu)/((1+nu)(1-2nu)) = 210e9 * 0.7 / 0.52
        assert_relative_eq!(d[(0, 0)], 210e9 * 0.7 / 0.52, max_relative = 1e-14);
        assert_relative_eq!(d[(0, 0)], 2.826923076923077e11, max_relative = 1e-12);
    }

    #[test]
    fn stiffness_is_symmetric_positive_definite() {
        for (e, nu) in [(210e9, 0.3), (70e9, 0.33), (1.0, 0.49), (5e6, 0.01)] {
            let p = MaterialParams::new(e, nu, 1.0, 0.0).unwrap();
            let d = elastic_stiffness(&p);
            assert_eq!(d, d.transpose());
            let eig = d.symmetric_eigenvalues();
            for lambda in eig.iter() {
                assert!(*lambda > 0.0, "eigenvalue {lambda} not positive");
            }
        }
    }

    #[test]
    fn elastic_stress_matches_stiffness_on_engineering_strains() {
        let p = steel();
        let eps = Voigt([1e-3, -2e-4, 3e-4, 4e-4, -5e-4, 6e-4]);
        let direct = elastic_stress(&p, &eps);
        let d = elastic_stiffness(&p);
        let mut eng = nalgebra::Vector6::zeros();
        for i in 0..3 {
            eng[i] = eps.0[i];
            eng[i + 3] = 2.0 * eps.0[i + 3];
        }
        let via_matrix = d * eng;
        for i in 0..6 {
            assert_relative_eq!(direct.0[i], via_matrix[i], max_relative = 1e-13);
        }
    }

    #[test]
    fn radial_return_zero_increment_is_identity() {
        let p = steel();
        let state = PlasticState::initial();
        let next = radial_return(&p, &state, &Voigt::ZERO).unwrap();
        assert_eq!(next, state);
    }

    #[test]
    fn radial_return_rejects_non_finite_increment() {
        let p = steel();
        let state = PlasticState::initial();
        let bad = Voigt([f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(radial_return(&p, &state, &bad).is_err());
    }

    #[test]
    fn radial_return_pure_shear_returns_to_surface_radially() {
        let p = steel();
        let state = PlasticState::initial();
        // Large shear step, well past yield.
        let deps = Voigt([0.0, 0.0, 0.0, 5e-3, 0.0, 0.0]);
        let next = radial_return(&p, &state, &deps).unwrap();
        let f = yield_function(&p, &next.stress, next.eps_p_eq);
        assert!(f.abs() <= YIELD_RESIDUAL_TOL * p.yield_stress());
        assert!(next.eps_p_eq > 0.0);
        // Deviatoric flow: no plastic volume change.
        assert!(next.plastic_strain.trace().abs() <= 1e-12 * next.plastic_strain.norm());
        // Radial: stress deviator keeps the trial direction (pure 12-shear).
        assert!(next.stress.0[3] > 0.0);
        for i in [0, 1, 2, 4, 5] {
            assert!(next.stress.0[i].abs() < 1e-3 * next.stress.0[3].abs());
        }
    }

    #[test]
    fn uniaxial_elastic_step_recovers_hookean_response() {
        let p = steel();
        let eps = 5e-4; // below the elastic limit 1.119e-3
        let state = uniaxial_stress_step(&p, &PlasticState::initial(), eps).unwrap();
        assert_relative_eq!(state.stress.0[0], 210e9 * eps, max_relative = 1e-9);
        assert_relative_eq!(state.strain.0[1], -0.3 * eps, max_relative = 1e-9);
        assert_relative_eq!(state.strain.0[2], -0.3 * eps, max_relative = 1e-9);
        assert!(state.stress.0[1].abs() <= LATERAL_STRESS_TOL * p.yield_stress());
        assert_eq!(state.eps_p_eq, 0.0);
    }

    #[test]
    fn uniaxial_plastic_step_matches_bilinear_law() {
        let p = steel();
        let eps = 2e-3; // beyond yield in a single step
        let state = uniaxial_stress_step(&p, &PlasticState::initial(), eps).unwrap();
        let expected = p.yield_stress() + p.tangent_modulus() * (eps - p.elastic_limit_strain());
        assert_relative_eq!(state.stress.0[0], expected, max_relative = 1e-8);
        assert!(state.eps_p_eq > 0.0);
        assert!(state.plastic_strain.trace().abs() <= 1e-12 * state.plastic_strain.norm());
    }

    #[test]
    fn load_path_constructors_and_validation() {
        let ramp = LoadPath::ramp(80, 2.8e-3).unwrap();
        assert_eq!(ramp.len(), 80);
        assert_relative_eq!(ramp.targets()[0], 3.5e-5, max_relative = 1e-15);
        assert_relative_eq!(ramp.targets()[79], 2.8e-3, max_relative = 1e-15);

        let cycle = LoadPath::ramp_unload(300, 2.8e-3).unwrap();
        assert_eq!(cycle.len(), 300);
        assert_relative_eq!(cycle.targets()[149], 2.8e-3, max_relative = 1e-15);
        assert_eq!(cycle.targets()[299], 0.0);

        assert!(LoadPath::ramp(0, 1e-3).is_err());
        assert!(LoadPath::ramp_unload(301, 1e-3).is_err());
        assert!(LoadPath::from_targets(vec![]).is_err());
        assert!(LoadPath::from_targets(vec![0.2]).is_err());
        assert!(LoadPath::from_targets(vec![-1e-3]).is_err());
        assert!(LoadPath::from_targets(vec![f64::NAN]).is_err());
    }

    #[test]
    fn run_uniaxial_yields_near_documented_step() {
        let p = steel();
        let path = LoadPath::ramp(80, 2.8e-3).unwrap();
        let sigma = run_uniaxial(&p, &path).unwrap();
        assert_eq!(sigma.len(), 80);
        // Elastic limit 1.119e-3 falls between steps 31 and 32 (1-based).
        let ey = p.elastic_limit_strain();
        assert!(path.targets()[30] < ey && ey < path.targets()[31]);
        for (t, &s) in sigma.iter().enumerate() {
            let eps = path.targets()[t];
            if eps < ey {
                assert_relative_eq!(s, 210e9 * eps, max_relative = 1e-8);
            }
        }
        assert!(*sigma.last().unwrap() > p.yield_stress());
    }
}
