//! Mean-field steady state of the driven cavity and the rotor trap
//! enhancement it produces.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::rotor::{build_rotor, RotorModel};

/// Intracavity steady-state field a_s = κ_L/(γ − iΔ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityField {
    pub a_s: Complex64,
    pub photon_number: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub a_s: Complex64,
    pub photon_number: f64,
    pub eta: f64,
    pub omega_eff: f64,
    pub theta_s: f64,
    pub l_z_s: f64,
}

impl SteadyState {
    pub fn field(&self) -> CavityField {
        CavityField {
            a_s: self.a_s,
            photon_number: self.photon_number,
        }
    }
}

pub fn cavity_steady_field(params: &PhysicalParams) -> CavityField {
    let a_s = Complex64::new(params.kappa_l, 0.0) / Complex64::new(params.gamma, -params.delta);
    CavityField {
        a_s,
        photon_number: params.kappa_l * params.kappa_l / (params.gamma * params.gamma + params.delta * params.delta),
    }
}

/// 1 + (U₀/q)·κ_L²/(Δ² + γ²); negative when the light anti-traps.
pub fn enhancement_radicand(params: &PhysicalParams) -> f64 {
    1.0 + params.u0 / params.q * cavity_steady_field(params).photon_number
}

/// η = sqrt(1 + (U₀/q)·κ_L²/(Δ² + γ²)).
pub fn enhancement_factor(params: &PhysicalParams) -> Result<f64> {
    if !(params.gamma > 0.0 && params.q > 0.0) {
        return Err(Error::InvalidParams("enhancement factor needs gamma > 0 and q > 0".into()));
    }
    let radicand = enhancement_radicand(params);
    if radicand < 0.0 {
        return Err(Error::AntiTrapping { radicand });
    }
    Ok(radicand.sqrt())
}

/// ω_eff = η ω_θ.
pub fn effective_frequency(params: &PhysicalParams) -> Result<f64> {
    let rotor = build_rotor(params)?;
    Ok(enhancement_factor(params)? * rotor.omega_theta)
}

/// The unique mean-field fixed point θ_s = L_z,s = 0, a = a_s.
pub fn solve_steady_state(params: &PhysicalParams, rotor: &RotorModel) -> Result<SteadyState> {
    let field = cavity_steady_field(params);
    let eta = enhancement_factor(params)?;
    Ok(SteadyState {
        a_s: field.a_s,
        photon_number: field.photon_number,
        eta,
        omega_eff: eta * rotor.omega_theta,
        theta_s: 0.0,
        l_z_s: 0.0,
    })
}

/// All mean-field fixed points (θ_s², |a_s|²) of the nonlinear equations.
///
/// θ̇ = 0 forces L_z = 0; L̇_z = 0 needs θ = 0 or I ω_θ² + 2ξ_θ|a|² = 0; the
/// cavity then obeys |a|² = κ_L²/((Δ − ξ_θθ²)² + γ²). With U₀ > 0 the second
/// branch is empty, so the only solution is θ_s = 0.
pub fn mean_field_fixed_points(params: &PhysicalParams, rotor: &RotorModel) -> Vec<(f64, f64)> {
    let base = cavity_steady_field(params);
    let mut out = vec![(0.0, base.photon_number)];
    let xi = rotor.xi_theta;
    if xi == 0.0 || params.kappa_l == 0.0 {
        return out;
    }
    let n_star = -rotor.inertia_i * rotor.omega_theta * rotor.omega_theta / (2.0 * xi);
    if n_star <= 0.0 {
        return out;
    }
    let detune_sq = params.kappa_l * params.kappa_l / n_star - params.gamma * params.gamma;
    if detune_sq < 0.0 {
        return out;
    }
    let root = detune_sq.sqrt();
    for shift in [params.delta - root, params.delta + root] {
        let theta_sq = shift / xi;
        if theta_sq > 0.0 && !out.iter().any(|&(t, _)| (t - theta_sq).abs() <= 1e-15 * theta_sq) {
            out.push((theta_sq, n_star));
        }
    }
    out
}
