//! Second-moment dynamics of the rotor and the roton occupation number.

use crate::error::{Error, Result};
use crate::linear::{build_drift, stable_routh_hurwitz};
use crate::params::{thermal_frequency, PhysicalParams};
use crate::rotor::RotorModel;
use crate::steady::SteadyState;

/// Largest allowed dt·max(ω_eff, D_θ/I) for fixed-step integration.
pub const MAX_STEP_FRACTION: f64 = 0.05;

/// ⟨θ²⟩, ⟨L_z²⟩ and ⟨L_zθ + θL_z⟩ at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub theta2: f64,
    pub l2: f64,
    pub sym: f64,
    pub t: f64,
}

impl MomentState {
    pub fn zero() -> Self {
        MomentState {
            theta2: 0.0,
            l2: 0.0,
            sym: 0.0,
            t: 0.0,
        }
    }
}

/// Time derivatives of the three moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRates {
    pub theta2: f64,
    pub l2: f64,
    pub sym: f64,
}

/// Coefficients of the closed linear moment system.
#[derive(Debug, Clone, Copy)]
struct MomentSystem {
    inertia: f64,
    /// I ω_θ² + 2ξ_θ|a_s|² = I ω_eff².
    stiffness: f64,
    damping_rate: f64,
    diffusion: f64,
}

impl MomentSystem {
    fn new(params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> Result<Self> {
        let n = thermal_occupation(rotor.omega_theta, params.temperature)?;
        Ok(MomentSystem {
            inertia: rotor.inertia_i,
            stiffness: rotor.inertia_i * rotor.omega_theta * rotor.omega_theta
                + 2.0 * rotor.xi_theta * steady.photon_number,
            damping_rate: params.d_theta / rotor.inertia_i,
            diffusion: 2.0 * params.d_theta * (n + 0.5) * rotor.omega_theta,
        })
    }

    fn rates(&self, theta2: f64, l2: f64, sym: f64) -> [f64; 3] {
        [
            sym / self.inertia,
            -self.stiffness * sym - 2.0 * self.damping_rate * l2 + self.diffusion,
            2.0 / self.inertia * l2 - 2.0 * self.stiffness * theta2 - self.damping_rate * sym,
        ]
    }
}

pub fn moment_rhs(state: &MomentState, params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> Result<MomentRates> {
    let sys = MomentSystem::new(params, rotor, steady)?;
    let [theta2, l2, sym] = sys.rates(state.theta2, state.l2, state.sym);
    Ok(MomentRates { theta2, l2, sym })
}

/// Fixed point of the moment equations: sym = 0, ⟨L_z²⟩ = Iω_θ(n + ½),
/// ⟨θ²⟩ = (n + ½)ω_θ/(I ω_eff²).
pub fn steady_moments(params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> Result<MomentState> {
    if !stable_routh_hurwitz(&build_drift(params, rotor, &steady.field())) {
        return Err(Error::Unstable);
    }
    let sys = MomentSystem::new(params, rotor, steady)?;
    let l2 = sys.diffusion / (2.0 * sys.damping_rate);
    Ok(MomentState {
        theta2: l2 / (sys.inertia * sys.stiffness),
        l2,
        sym: 0.0,
        t: f64::INFINITY,
    })
}

/// Largest step accepted by [`integrate_moments`].
pub fn max_moment_step(params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> f64 {
    MAX_STEP_FRACTION / steady.omega_eff.max(params.d_theta / rotor.inertia_i)
}

/// Classical fourth-order Runge–Kutta with a fixed step. The returned series
/// starts with `initial` and holds every step up to `t_end`.
pub fn integrate_moments(
    initial: &MomentState,
    params: &PhysicalParams,
    rotor: &RotorModel,
    steady: &SteadyState,
    t_end: f64,
    dt: f64,
) -> Result<Vec<MomentState>> {
    integrate_moments_strided(initial, params, rotor, steady, t_end, dt, 1)
}

/// As [`integrate_moments`] but keeps only every `stride`-th state (the
/// final state is always kept).
pub fn integrate_moments_strided(
    initial: &MomentState,
    params: &PhysicalParams,
    rotor: &RotorModel,
    steady: &SteadyState,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<MomentState>> {
    let limit = max_moment_step(params, rotor, steady);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "moment step dt = {dt:e} s must be in (0, {limit:e}]"
        )));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::Config(format!("t_end must be finite and >= 0, got {t_end}")));
    }
    let stride = stride.max(1);
    let sys = MomentSystem::new(params, rotor, steady)?;
    let steps = (t_end / dt).round() as u64;
    let mut out = Vec::with_capacity((steps as usize / stride) + 2);
    let mut x = [initial.theta2, initial.l2, initial.sym];
    let t0 = initial.t;
    out.push(*initial);
    let f = |y: &[f64; 3]| sys.rates(y[0], y[1], y[2]);
    let axpy = |y: &[f64; 3], k: &[f64; 3], h: f64| [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]];
    for step in 1..=steps {
        let k1 = f(&x);
        let k2 = f(&axpy(&x, &k1, 0.5 * dt));
        let k3 = f(&axpy(&x, &k2, 0.5 * dt));
        let k4 = f(&axpy(&x, &k3, dt));
        for i in 0..3 {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!("moment integration overflow at step {step}")));
        }
        if step % stride as u64 == 0 || step == steps {
            out.push(MomentState {
                theta2: x[0],
                l2: x[1],
                sym: x[2],
                t: t0 + step as f64 * dt,
            });
        }
    }
    Ok(out)
}

/// Bose occupation n = 1/(exp(ω/k_BT) − 1); zero at T = 0.
pub fn thermal_occupation(omega_theta: f64, temperature: f64) -> Result<f64> {
    if !(omega_theta > 0.0) {
        return Err(Error::Domain(format!("omega_theta must be > 0, got {omega_theta}")));
    }
    let kt = thermal_frequency(temperature)?;
    if kt == 0.0 {
        return Ok(0.0);
    }
    // exp_m1 keeps full precision for ω/kT down to the subnormal range
    Ok((omega_theta / kt).exp_m1().recip())
}

/// E_Q = ⟨L_z²⟩/2I + I ω_θ²⟨θ²⟩/2 with the bare trap frequency.
pub fn rotor_energy(state: &MomentState, rotor: &RotorModel) -> f64 {
    state.l2 / (2.0 * rotor.inertia_i) + 0.5 * rotor.inertia_i * rotor.omega_theta * rotor.omega_theta * state.theta2
}

/// n̄ = (n + ½)(η² + 1)/(2η³).
pub fn roton_occupation(n: f64, eta: f64) -> Result<f64> {
    if !(eta >= 1.0) {
        return Err(Error::Domain(format!("eta must be >= 1, got {eta}")));
    }
    Ok((n + 0.5) * (eta * eta + 1.0) / (2.0 * eta * eta * eta))
}

/// Everything needed to report the roton occupation at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationReport {
    pub n_thermal: f64,
    pub eta: f64,
    pub omega_eff: f64,
    pub energy: f64,
    pub nbar: f64,
}

/// n̄ via steady moments → E_Q → E_Q/ω_eff.
pub fn occupation_report(params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> Result<OccupationReport> {
    let moments = steady_moments(params, rotor, steady)?;
    let energy = rotor_energy(&moments, rotor);
    Ok(OccupationReport {
        n_thermal: thermal_occupation(rotor.omega_theta, params.temperature)?,
        eta: steady.eta,
        omega_eff: steady.omega_eff,
        energy,
        nbar: energy / steady.omega_eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotor::build_rotor;
    use crate::steady::solve_steady_state;

    fn setup(p: &PhysicalParams) -> (RotorModel, SteadyState) {
        let rotor = build_rotor(p).unwrap();
        let steady = solve_steady_state(p, &rotor).unwrap();
        (rotor, steady)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn thermal_occupation_values() {
        assert_eq!(thermal_occupation(5.623, 0.0).unwrap(), 0.0);
        let n = thermal_occupation(5.623, 5e-10).unwrap();
        assert!((n - 11.15).abs() < 0.01, "{n}");
        let n = thermal_occupation(5.623, 2e-6).unwrap();
        assert!((n / 4.66e4 - 1.0).abs() < 1e-3, "{n}");
        // classical limit kT/ω − ½ holds far below the series threshold
        let kt = thermal_frequency(1.0).unwrap();
        let w = 1e-12 * kt;
        let n = thermal_occupation(w, 1.0).unwrap();
        assert!(rel(n, kt / w - 0.5) < 1e-12);
        assert!(thermal_occupation(0.0, 1.0).is_err());
    }

    #[test]
    fn steady_moments_ground_state() {
        let mut p = PhysicalParams::figure1();
        p.kappa_l = 0.0;
        p.temperature = 0.0;
        let (rotor, steady) = setup(&p);
        let m = steady_moments(&p, &rotor, &steady).unwrap();
        let (i, w) = (rotor.inertia_i, rotor.omega_theta);
        assert!(rel(m.theta2, 1.0 / (2.0 * i * w)) < 1e-12);
        assert!(rel(m.l2, i * w / 2.0) < 1e-12);
        assert!(rel(m.theta2 * m.l2, 0.25) < 1e-12);
        assert!(rel(rotor_energy(&m, &rotor), w / 2.0) < 1e-12);
    }

    #[test]
    fn figure_steady_moments() {
        let p = PhysicalParams::figure1();
        let (rotor, steady) = setup(&p);
        let m = steady_moments(&p, &rotor, &steady).unwrap();
        assert!(rel(m.l2, 5.21e4) < 2e-3, "{}", m.l2);
        assert!(rel(m.theta2, 1.45e-10) < 5e-3, "{}", m.theta2);
        assert_eq!(m.sym, 0.0);
        let rates = moment_rhs(&m, &p, &rotor, &steady).unwrap();
        assert!(rates.theta2 == 0.0);
        assert!(rates.l2.abs() < 1e-10 * (2.0 * p.d_theta / rotor.inertia_i * m.l2));
        assert!(rates.sym.abs() < 1e-10 * (2.0 / rotor.inertia_i * m.l2));
        // ⟨θ²⟩⟨L²⟩ = (n+½)²/η², far below ¼ once η ≫ n
        let n = thermal_occupation(rotor.omega_theta, p.temperature).unwrap();
        assert!(rel(m.theta2 * m.l2, (n + 0.5).powi(2) / steady.eta.powi(2)) < 1e-12);
    }

    #[test]
    fn rhs_examples() {
        let p = PhysicalParams { temperature: 0.0, ..PhysicalParams::figure1() };
        let (rotor, steady) = setup(&p);
        let r = moment_rhs(&MomentState::zero(), &p, &rotor, &steady).unwrap();
        assert!(rel(r.l2, 2.0 * p.d_theta * rotor.omega_theta * 0.5) < 1e-15);
        let s = MomentState { theta2: 1e-9, l2: 3.0, sym: 0.7, t: 0.0 };
        let r = moment_rhs(&s, &p, &rotor, &steady).unwrap();
        assert_eq!(r.theta2, 0.7 / rotor.inertia_i);
    }

    #[test]
    fn energy_identity_at_figure_point() {
        let p = PhysicalParams::figure1();
        let (rotor, steady) = setup(&p);
        let m = steady_moments(&p, &rotor, &steady).unwrap();
        let n = thermal_occupation(rotor.omega_theta, p.temperature).unwrap();
        let e = rotor_energy(&m, &rotor);
        let omega_prime = rotor.omega_theta / 2.0 * (1.0 + steady.eta.powi(-2));
        assert!(rel(e, (n + 0.5) * omega_prime) < 1e-10);
        assert!(steady.eta.powi(-2) < 6e-8);
        let nbar = roton_occupation(n, steady.eta).unwrap();
        assert!(rel(nbar * steady.omega_eff, e) < 1e-10);
        assert!(rel(nbar, 1.373e-3) < 2e-3, "{nbar}");
    }

    #[test]
    fn roton_occupation_limits() {
        assert_eq!(roton_occupation(3.0, 1.0).unwrap(), 3.5);
        let eta = 1e6;
        assert!(rel(roton_occupation(0.0, eta).unwrap(), 1.0 / (4.0 * eta)) < 1e-11);
        assert!(roton_occupation(1.0, 0.5).is_err());
    }

    #[test]
    fn unstable_parameters_rejected() {
        let mut p = PhysicalParams::figure1();
        p.d_theta = 0.0;
        let (rotor, steady) = setup(&p);
        assert_eq!(steady_moments(&p, &rotor, &steady), Err(Error::Unstable));
    }

    #[test]
    fn step_size_precondition() {
        let p = PhysicalParams::figure1();
        let (rotor, steady) = setup(&p);
        let limit = max_moment_step(&p, &rotor, &steady);
        let r = integrate_moments(&MomentState::zero(), &p, &rotor, &steady, 1e-3, 2.0 * limit);
        assert!(matches!(r, Err(Error::Config(_))));
        assert!(integrate_moments(&MomentState::zero(), &p, &rotor, &steady, 1e-4, limit).is_ok());
    }

    #[test]
    fn steady_state_is_a_fixed_point_of_the_integrator() {
        let p = PhysicalParams::figure1();
        let (rotor, steady) = setup(&p);
        let mut m = steady_moments(&p, &rotor, &steady).unwrap();
        m.t = 0.0;
        let dt = max_moment_step(&p, &rotor, &steady);
        let series = integrate_moments(&m, &p, &rotor, &steady, 1e4 * dt, dt).unwrap();
        assert_eq!(series.len(), 10_001);
        let scale = (m.theta2 * m.l2).sqrt();
        for s in &series {
            assert!(rel(s.theta2, m.theta2) < 1e-9);
            assert!(rel(s.l2, m.l2) < 1e-9);
            assert!(s.sym.abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn undamped_energy_conserved() {
        let mut p = PhysicalParams::figure1();
        p.d_theta = 0.0;
        p.kappa_l = 1e-3 * p.kappa_l;
        let (rotor, steady) = setup(&p);
        let w2 = steady.omega_eff.powi(2);
        let i = rotor.inertia_i;
        let start = MomentState { theta2: 1e-6, l2: 0.0, sym: 0.0, t: 0.0 };
        let dt = max_moment_step(&p, &rotor, &steady);
        let series = integrate_moments(&start, &p, &rotor, &steady, 2e4 * dt, dt).unwrap();
        let energy = |s: &MomentState| s.l2 / (2.0 * i) + i * w2 * s.theta2 / 2.0;
        let e0 = energy(&start);
        let mut swing: f64 = 0.0;
        for s in &series {
            assert!(rel(energy(s), e0) < 1e-8, "{}", rel(energy(s), e0));
            swing = swing.max(rel(s.theta2, start.theta2));
        }
        assert!(swing > 0.5, "theta2 should oscillate");
    }

    #[test]
    fn envelope_relaxes_at_twice_the_amplitude_rate() {
        // strongly damped enough for a short run
        let mut p = PhysicalParams::figure1();
        let (rotor, steady) = setup(&p);
        p.d_theta = 0.05 * steady.omega_eff * rotor.inertia_i;
        let alpha = p.d_theta / rotor.inertia_i;
        let ss = steady_moments(&p, &rotor, &steady).unwrap();
        let dt = max_moment_step(&p, &rotor, &steady);
        let t_end = 3.0 * std::f64::consts::LN_10 / alpha;
        let series = integrate_moments(&MomentState::zero(), &p, &rotor, &steady, t_end, dt).unwrap();
        // all three moment modes share the real part -α, so the envelope
        // of the deviation from steady state decays at α = D_θ/I
        let i = rotor.inertia_i;
        let w2 = steady.omega_eff.powi(2);
        let dev = |s: &MomentState| {
            ((s.l2 - ss.l2) / (2.0 * i) + i * w2 * (s.theta2 - ss.theta2) / 2.0).abs()
        };
        let t1 = 0.5 / alpha;
        let t2 = t1 + std::f64::consts::LN_10 / alpha;
        let at = |t: f64| {
            let k = (t / dt).round() as usize;
            // envelope: max over one oscillation period
            let period = (std::f64::consts::PI / steady.omega_eff / dt).ceil() as usize;
            series[k..k + period].iter().map(dev).fold(0.0, f64::max)
        };
        let rate = (at(t1) / at(t2)).ln() / (t2 - t1);
        assert!(rel(rate, alpha) < 0.05, "rate {rate} vs {alpha}");
    }
}
