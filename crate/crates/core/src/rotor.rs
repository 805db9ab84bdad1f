//! Quantum-rotor description of the spin-1 condensate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// Harmonic-rotor quantities derived from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorModel {
    /// Moment of inertia I = N/c₂, in seconds.
    pub inertia_i: f64,
    /// Bare trap frequency ω_θ.
    pub omega_theta: f64,
    /// Ground-state width (dimensional convention).
    pub theta_bar: f64,
    /// Quadratic optomechanical coupling ξ_θ.
    pub xi_theta: f64,
    /// 1 + 3/(2N) + q/c₂.
    pub bracket: f64,
}

/// Convention for the ground-state width θ̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WidthMode {
    /// (I ω_θ)^(-1/2), the width of the harmonic ground state.
    #[default]
    Dimensional,
    /// sqrt(c₂/(2qN²)), the closed form quoted in the literature.
    Paper,
}

pub fn build_rotor(params: &PhysicalParams) -> Result<RotorModel> {
    params.validate()?;
    let n = params.n();
    let bracket = params.bracket();
    let inertia_i = n / params.c2;
    let omega_theta = (2.0 * params.q * params.c2 * bracket).sqrt();
    Ok(RotorModel {
        inertia_i,
        omega_theta,
        theta_bar: (inertia_i * omega_theta).sqrt().recip(),
        xi_theta: params.u0 * n * bracket,
        bracket,
    })
}

/// Full rotor potential V(θ) = q(N+3/2)sin²θ + (q²N/8c₂)sin²2θ.
pub fn potential_full(theta: f64, params: &PhysicalParams) -> f64 {
    let n = params.n();
    let s = theta.sin();
    let s2 = (2.0 * theta).sin();
    params.q * (n + 1.5) * s * s + params.q * params.q * n / (8.0 * params.c2) * s2 * s2
}

/// Harmonic approximation ½ I ω_θ² θ².
pub fn potential_harmonic(theta: f64, model: &RotorModel) -> f64 {
    0.5 * model.inertia_i * model.omega_theta * model.omega_theta * theta * theta
}

/// Quartic coefficient β = (q − U₀ n_ph) N / 3 for a given photon number.
pub fn quartic_beta(params: &PhysicalParams, photon_number: f64) -> Result<f64> {
    if !(photon_number >= 0.0) {
        return Err(Error::Domain(format!("photon number must be >= 0, got {photon_number}")));
    }
    Ok((params.q - params.u0 * photon_number) * params.n() / 3.0)
}

pub fn ground_state_width(params: &PhysicalParams, mode: WidthMode) -> f64 {
    let n = params.n();
    match mode {
        WidthMode::Paper => (params.c2 / (2.0 * params.q * n * n)).sqrt(),
        WidthMode::Dimensional => {
            (params.c2 / (2.0 * params.q)).powf(0.25) * params.bracket().powf(-0.25) / n.sqrt()
        }
    }
}

/// |Ψ₀(θ)|² = exp(−θ²/θ̄²)/sqrt(π θ̄²).
pub fn ground_state_density(theta: f64, params: &PhysicalParams, mode: WidthMode) -> f64 {
    let w = ground_state_width(params, mode);
    (-(theta * theta) / (w * w)).exp() / (PI * w * w).sqrt()
}

/// Harmonic prediction for the depletion N − ⟨n₀⟩ of the m = 0 component.
///
/// Near the pole the director moves in two transverse directions, each with
/// variance θ̄²/2, so ⟨sin²θ⟩ ≈ θ̄² and the depletion is N·θ̄².
pub fn harmonic_depletion(params: &PhysicalParams) -> f64 {
    let w = ground_state_width(params, WidthMode::Dimensional);
    params.n() * w * w
}
