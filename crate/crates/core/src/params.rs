//! Physical inputs and unit conventions.
//!
//! Everything is stored with ħ = 1: rates and energies in rad/s, the rotor
//! angle and angular momentum dimensionless, the moment of inertia in
//! seconds. Temperatures stay in kelvin and are converted to rad/s only
//! through [`thermal_frequency`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant, J·s (exact SI value).
pub const HBAR: f64 = 6.626_070_15e-34 / TWO_PI;
/// k_B/ħ in rad/(s·K).
pub const KB_OVER_HBAR: f64 = BOLTZMANN / HBAR;
/// μ_B/h in Hz per gauss.
pub const BOHR_MAGNETON_HZ_PER_GAUSS: f64 = 1.399_624_493_6e6;
pub const GAUSS_PER_TESLA: f64 = 1.0e4;

/// Separation factor used to read "≪" as a reproducible inequality.
pub const DEFAULT_REGIME_MARGIN: f64 = 10.0;

/// Default rotor damping when none is given: D_θ/I = this × ω_θ.
pub const DEFAULT_DAMPING_RATIO: f64 = 1.0e-2;

/// Converts a frequency in Hz to rad/s.
#[inline]
pub fn hz(f: f64) -> f64 {
    TWO_PI * f
}

/// Experimental inputs in canonical units (rad/s, kelvin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Antiferromagnetic spin-exchange coupling c₂.
    pub c2: f64,
    /// Quadratic Zeeman shift q.
    pub q: f64,
    pub n_atoms: u64,
    /// Single-photon light shift U₀; may be negative.
    pub u0: f64,
    /// Cavity amplitude damping rate γ.
    pub gamma: f64,
    /// Pump amplitude κ_L.
    pub kappa_l: f64,
    /// Static pump-cavity detuning Δ.
    pub delta: f64,
    /// Rotor damping parameter D_θ (dimensionless; the rate is D_θ/I).
    pub d_theta: f64,
    /// Reservoir temperature in kelvin.
    pub temperature: f64,
}

impl PhysicalParams {
    /// The parameter set of the roton-occupation figure: U₀ = 2π×100 Hz,
    /// γ = 2π×50 kHz, κ_L = 2π×3 MHz, c₂ = 2π×20 Hz, q = 10⁻³c₂, N = 10⁵,
    /// Δ = 0, T = 500 pK and the default rotor damping.
    pub fn figure1() -> Self {
        let mut p = PhysicalParams {
            c2: hz(20.0),
            q: hz(20.0) * 1.0e-3,
            n_atoms: 100_000,
            u0: hz(100.0),
            gamma: hz(50.0e3),
            kappa_l: hz(3.0e6),
            delta: 0.0,
            d_theta: 0.0,
            temperature: 5.0e-10,
        };
        p.d_theta = p.default_d_theta();
        p
    }

    pub fn n(&self) -> f64 {
        self.n_atoms as f64
    }

    /// The factor 1 + 3/(2N) + q/c₂ shared by ω_θ² and ξ_θ.
    pub fn bracket(&self) -> f64 {
        1.0 + 1.5 / self.n() + self.q / self.c2
    }

    /// D_θ giving a damping rate D_θ/I of 1% of the bare trap frequency.
    pub fn default_d_theta(&self) -> f64 {
        let inertia = self.n() / self.c2;
        let omega_theta = (2.0 * self.q * self.c2 * self.bracket()).sqrt();
        DEFAULT_DAMPING_RATIO * inertia * omega_theta
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        fn bad(msg: String) -> Result<()> {
            Err(Error::InvalidParams(msg))
        }
        let finite = [
            ("c2", self.c2),
            ("q", self.q),
            ("u0", self.u0),
            ("gamma", self.gamma),
            ("kappa_l", self.kappa_l),
            ("delta", self.delta),
            ("d_theta", self.d_theta),
            ("temperature", self.temperature),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.c2 <= 0.0 {
            return bad(format!("c2 must be > 0 (antiferromagnetic), got {}", self.c2));
        }
        if self.q <= 0.0 {
            return bad(format!("q must be > 0, got {}", self.q));
        }
        if self.n_atoms < 2 {
            return bad(format!("n_atoms must be >= 2, got {}", self.n_atoms));
        }
        if self.gamma <= 0.0 {
            return bad(format!("gamma must be > 0, got {}", self.gamma));
        }
        if self.kappa_l < 0.0 {
            return bad(format!("kappa_l must be >= 0, got {}", self.kappa_l));
        }
        if self.d_theta < 0.0 {
            return bad(format!("d_theta must be >= 0, got {}", self.d_theta));
        }
        if self.temperature < 0.0 {
            return bad(format!("temperature must be >= 0, got {}", self.temperature));
        }
        Ok(())
    }
}

/// Position of a parameter set relative to the harmonic-rotor window
/// `margin ≤ c₂/q ≤ 2N²/margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub ratio_c2_q: f64,
    pub bound_2n2: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub margin: f64,
}

impl RegimeReport {
    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Quadratic Zeeman shift q = (μ_B B/ħ)²/(4Δ_hf), with `b_field` in tesla
/// and `delta_hf` in rad/s.
pub fn quadratic_zeeman(b_field: f64, delta_hf: f64) -> Result<f64> {
    if !(delta_hf > 0.0) {
        return Err(Error::Domain(format!("delta_hf must be > 0, got {delta_hf}")));
    }
    if !(b_field >= 0.0) {
        return Err(Error::Domain(format!("b_field must be >= 0, got {b_field}")));
    }
    let larmor = hz(BOHR_MAGNETON_HZ_PER_GAUSS * GAUSS_PER_TESLA) * b_field;
    Ok(larmor * larmor / (4.0 * delta_hf))
}

/// k_B T/ħ in rad/s.
pub fn thermal_frequency(temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!("temperature must be >= 0, got {temperature}")));
    }
    Ok(KB_OVER_HBAR * temperature)
}

/// Reports whether `params` sit inside the harmonic window. Never fails.
pub fn validate_regime(params: &PhysicalParams, margin: f64) -> RegimeReport {
    let ratio = params.c2 / params.q;
    let bound = 2.0 * params.n() * params.n();
    RegimeReport {
        ratio_c2_q: ratio,
        bound_2n2: bound,
        lower_ok: ratio >= margin,
        upper_ok: ratio <= bound / margin,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeeman_zero_field() {
        assert_eq!(quadratic_zeeman(0.0, hz(1.77e9)).unwrap(), 0.0);
    }

    #[test]
    fn zeeman_is_quadratic() {
        let dhf = hz(1.77e9);
        for b in [1e-6, 3.7e-5, 1e-3, 0.25] {
            let q1 = quadratic_zeeman(b, dhf).unwrap();
            let q2 = quadratic_zeeman(2.0 * b, dhf).unwrap();
            assert!((q2 - 4.0 * q1).abs() <= 4.0 * f64::EPSILON * q2);
        }
    }

    #[test]
    fn zeeman_sodium_value() {
        // 0.1 G on the 1.77 GHz sodium clock splitting.
        // (1.3996244936e5)^2 / (4 * 1.77e9) = 2.76684... Hz
        let q = quadratic_zeeman(0.1 / GAUSS_PER_TESLA, hz(1.77e9)).unwrap();
        let expect = hz(1.399_624_493_6e5f64.powi(2) / (4.0 * 1.77e9));
        assert!((q - expect).abs() < 1e-12 * expect);
        assert!((q / TWO_PI - 2.7668).abs() < 1e-3);
    }

    #[test]
    fn zeeman_rejects_bad_splitting() {
        assert!(matches!(quadratic_zeeman(1e-5, 0.0), Err(Error::Domain(_))));
        assert!(matches!(quadratic_zeeman(1e-5, -1.0), Err(Error::Domain(_))));
        assert!(matches!(quadratic_zeeman(-1e-5, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn thermal_frequency_values() {
        assert_eq!(thermal_frequency(0.0).unwrap(), 0.0);
        assert!((thermal_frequency(2e-6).unwrap() - 2.6184e5).abs() < 5.0);
        assert!((thermal_frequency(5e-10).unwrap() - 65.46).abs() < 0.01);
        assert!(thermal_frequency(-1e-9).is_err());
    }

    #[test]
    fn regime_examples() {
        let mut p = PhysicalParams::figure1();
        let r = validate_regime(&p, 10.0);
        assert!((r.ratio_c2_q - 1000.0).abs() < 1e-9);
        assert_eq!(r.bound_2n2, 2e10);
        assert!(r.lower_ok && r.upper_ok);

        p.q = p.c2;
        assert!(!validate_regime(&p, 10.0).lower_ok);

        p.q = p.c2 / 20.0;
        p.n_atoms = 200;
        let r = validate_regime(&p, 10.0);
        assert_eq!(r.bound_2n2, 8e4);
        assert!(r.lower_ok && r.upper_ok);
    }

    #[test]
    fn validate_catches_each_invariant() {
        let good = PhysicalParams::figure1();
        assert!(good.validate().is_ok());
        let cases: [fn(&mut PhysicalParams); 8] = [
            |p| p.c2 = 0.0,
            |p| p.q = -1.0,
            |p| p.n_atoms = 1,
            |p| p.gamma = 0.0,
            |p| p.kappa_l = -1.0,
            |p| p.d_theta = -0.1,
            |p| p.temperature = -1.0,
            |p| p.delta = f64::NAN,
        ];
        for f in cases {
            let mut p = good;
            f(&mut p);
            assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
        }
    }

    #[test]
    fn default_damping_is_one_percent_of_trap() {
        let p = PhysicalParams::figure1();
        let inertia = p.n() / p.c2;
        let omega = (2.0 * p.q * p.c2 * p.bracket()).sqrt();
        assert!((p.d_theta / inertia / omega - 0.01).abs() < 1e-15);
    }
}
