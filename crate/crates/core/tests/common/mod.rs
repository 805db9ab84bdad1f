//! Parameter generators shared by the integration tests.
#![allow(dead_code)]

use afm_optomech::params::{hz, validate_regime, PhysicalParams, DEFAULT_REGIME_MARGIN};
use afm_optomech::rotor::build_rotor;
use afm_optomech::steady::solve_steady_state;
use rand::Rng;

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random trapping parameters inside the harmonic window, loosely around
/// the figure preset.
pub fn random_stable_params<R: Rng>(rng: &mut R) -> PhysicalParams {
    loop {
        let c2 = hz(rng.random_range(5.0..50.0));
        let mut p = PhysicalParams {
            c2,
            q: c2 * log_uniform(rng, 1e-4, 1e-2),
            n_atoms: log_uniform(rng, 1e4, 1e6) as u64,
            u0: hz(rng.random_range(1.0..1000.0)),
            gamma: hz(rng.random_range(1e4..1e5)),
            kappa_l: hz(rng.random_range(1e5..5e6)),
            delta: 0.0,
            d_theta: 0.0,
            temperature: log_uniform(rng, 1e-10, 1e-5),
        };
        p.delta = rng.random_range(-10.0..10.0) * p.gamma;
        p.d_theta = p.default_d_theta() * log_uniform(rng, 0.1, 10.0);
        if validate_regime(&p, DEFAULT_REGIME_MARGIN).ok() && p.validate().is_ok() {
            return p;
        }
    }
}

/// Cavity and rotor on comparable time scales, η = 2, rotor quality
/// factor 10 (damping rate ω_eff/10) and temperature `kt_over_omega`·ω_eff.
pub fn scaled_params(kt_over_omega: f64) -> PhysicalParams {
    let mut p = PhysicalParams {
        c2: hz(20.0),
        q: hz(0.02),
        n_atoms: 100_000,
        u0: 1e-4,
        gamma: hz(5.0),
        kappa_l: 0.0,
        delta: 0.0,
        d_theta: 0.0,
        temperature: 0.0,
    };
    // (U₀/q)κ²/γ² = 3 gives η = 2
    p.kappa_l = (3.0 * p.q * p.gamma * p.gamma / p.u0).sqrt();
    let rotor = build_rotor(&p).unwrap();
    let steady = solve_steady_state(&p, &rotor).unwrap();
    p.d_theta = 0.1 * steady.omega_eff * rotor.inertia_i;
    p.temperature = kt_over_omega * steady.omega_eff / afm_optomech::params::KB_OVER_HBAR;
    p
}
