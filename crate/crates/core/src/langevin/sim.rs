//! Semiclassical trajectories of the nonlinear rotor–cavity equations
//!
//!   θ̇  = L_z/I
//!   L̇_z = −Iω_θ²θ − 2ξ_θ|a|²θ − (D_θ/I)L_z + ε(t)  [+ 4βθ³]
//!   ȧ  = −i(−Δ + ξ_θθ²)a − γa + κ_L  [+ √(2γ) ζ(t)]
//!
//! stepped with Heun's predictor–corrector scheme and additive noise.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::noise::{generate_colored_noise_with, trajectory_rng};
use super::psd::{require_two_segments, PsdEstimate, Welch, Window};
use crate::error::{Error, Result};
use crate::linear::noise_spectrum_epsilon_sym;
use crate::params::{thermal_frequency, PhysicalParams};
use crate::rotor::{build_rotor, quartic_beta, RotorModel};
use crate::steady::{cavity_steady_field, enhancement_radicand};

/// Largest allowed dt·max(γ, ω_eff, D_θ/I).
pub const MAX_SIM_STEP_FRACTION: f64 = 0.05;
pub const MAX_SIM_STEPS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// No noise at all.
    Deterministic,
    /// White rotor force with density 2D_θk_BT/ħ.
    #[default]
    ClassicalWhite,
    /// Rotor force with the symmetrized spectrum D_θω coth(ω/2k_BT).
    QuantumColored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub theta: f64,
    pub l_z: f64,
    /// Starting cavity amplitude; the steady field a_s when `None`.
    pub a: Option<Complex64>,
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition {
            theta: 0.0,
            l_z: 0.0,
            a: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub noise_mode: NoiseMode,
    pub include_vacuum_input: bool,
    pub include_quartic: bool,
    pub n_trajectories: usize,
    /// Keep every `record_stride`-th step.
    pub record_stride: usize,
    /// Statistics ignore t < transient; 10·I/D_θ when `None`.
    pub transient: Option<f64>,
    pub initial: InitialCondition,
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        SimConfig {
            dt,
            t_end,
            seed: 0,
            noise_mode: NoiseMode::default(),
            include_vacuum_input: false,
            include_quartic: false,
            n_trajectories: 1,
            record_stride: 1,
            transient: None,
            initial: InitialCondition::default(),
        }
    }

    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }
}

/// One sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub theta: f64,
    pub l_z: f64,
    pub a_re: f64,
    pub a_im: f64,
}

/// Fastest rate in the problem: max(γ, ω_eff, D_θ/I). Beyond the
/// anti-trapping threshold |radicand| still sets the rotor frequency scale.
pub fn fastest_rate(params: &PhysicalParams, rotor: &RotorModel) -> f64 {
    let omega = rotor.omega_theta * enhancement_radicand(params).abs().sqrt().max(1.0);
    params.gamma.max(omega).max(params.d_theta / rotor.inertia_i)
}

pub fn max_sim_step(params: &PhysicalParams, rotor: &RotorModel) -> f64 {
    MAX_SIM_STEP_FRACTION / fastest_rate(params, rotor)
}

/// Transient discarded before statistics.
pub fn transient_time(params: &PhysicalParams, rotor: &RotorModel, config: &SimConfig) -> f64 {
    config.transient.unwrap_or_else(|| {
        if params.d_theta > 0.0 {
            10.0 * rotor.inertia_i / params.d_theta
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, Copy)]
struct State {
    theta: f64,
    l_z: f64,
    a: Complex64,
}

/// Precomputed coefficients for one parameter set.
pub struct Simulator {
    params: PhysicalParams,
    rotor: RotorModel,
    a_s: Complex64,
    config: SimConfig,
    white_force: f64,
}

impl Simulator {
    pub fn new(params: &PhysicalParams, config: &SimConfig) -> Result<Self> {
        let rotor = build_rotor(params)?;
        let limit = max_sim_step(params, &rotor);
        if !(config.dt > 0.0) || config.dt > limit * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "dt = {:e} s must be in (0, {limit:e}] (0.05 / fastest rate)",
                config.dt
            )));
        }
        if !(config.t_end > 0.0) || config.t_end / config.dt > MAX_SIM_STEPS {
            return Err(Error::Config(format!(
                "t_end/dt must be in (0, 1e8], got {:e}",
                config.t_end / config.dt
            )));
        }
        if config.n_trajectories == 0 || config.record_stride == 0 {
            return Err(Error::Config("n_trajectories and record_stride must be >= 1".into()));
        }
        let kt = thermal_frequency(params.temperature)?;
        Ok(Simulator {
            params: *params,
            rotor,
            a_s: cavity_steady_field(params).a_s,
            config: *config,
            white_force: (2.0 * params.d_theta * kt).sqrt(),
        })
    }

    pub fn rotor(&self) -> &RotorModel {
        &self.rotor
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    fn drift(&self, s: &State) -> State {
        let p = &self.params;
        let r = &self.rotor;
        let photons = s.a.norm_sqr();
        let mut torque = -r.inertia_i * r.omega_theta * r.omega_theta * s.theta
            - 2.0 * r.xi_theta * photons * s.theta
            - p.d_theta / r.inertia_i * s.l_z;
        if self.config.include_quartic {
            let beta = (p.q - p.u0 * photons) * p.n() / 3.0;
            torque += 4.0 * beta * s.theta * s.theta * s.theta;
        }
        let detuning = -p.delta + r.xi_theta * s.theta * s.theta;
        State {
            theta: s.l_z / r.inertia_i,
            l_z: torque,
            a: Complex64::new(0.0, -detuning) * s.a - p.gamma * s.a + p.kappa_l,
        }
    }

    /// Runs trajectory `index`, handing every recorded sample to `sink`.
    pub fn run<F>(&self, index: u64, mut sink: F) -> Result<()>
    where
        F: FnMut(&TrajectoryRecord),
    {
        let cfg = &self.config;
        let dt = cfg.dt;
        let steps = cfg.steps();
        let mut rng = trajectory_rng(cfg.seed, index);
        let noisy = cfg.noise_mode != NoiseMode::Deterministic;

        let colored = if cfg.noise_mode == NoiseMode::QuantumColored {
            let n = (steps.max(2) as usize).next_power_of_two();
            let (d, t) = (self.params.d_theta, self.params.temperature);
            // temperature was validated in `new`
            let spectrum = |w: f64| noise_spectrum_epsilon_sym(w, d, t).unwrap_or(0.0);
            Some(generate_colored_noise_with(spectrum, dt, n, &mut rng)?)
        } else {
            None
        };
        let white_scale = self.white_force / dt.sqrt();
        let vacuum_scale = if noisy && cfg.include_vacuum_input {
            (2.0 * self.params.gamma).sqrt() * dt.sqrt() * 0.5
        } else {
            0.0
        };

        let mut s = State {
            theta: cfg.initial.theta,
            l_z: cfg.initial.l_z,
            a: cfg.initial.a.unwrap_or(self.a_s),
        };
        let record = |s: &State, step: u64| TrajectoryRecord {
            t: step as f64 * dt,
            theta: s.theta,
            l_z: s.l_z,
            a_re: s.a.re,
            a_im: s.a.im,
        };
        sink(&record(&s, 0));
        for step in 1..=steps {
            let force = match (&colored, cfg.noise_mode) {
                (Some(seq), _) => seq[(step - 1) as usize],
                (None, NoiseMode::ClassicalWhite) => white_scale * rng.sample::<f64, _>(StandardNormal),
                _ => 0.0,
            };
            let kick = if vacuum_scale > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * vacuum_scale
            } else {
                Complex64::new(0.0, 0.0)
            };
            let f0 = self.drift(&s);
            let pred = State {
                theta: s.theta + f0.theta * dt,
                l_z: s.l_z + f0.l_z * dt + force * dt,
                a: s.a + f0.a * dt + kick,
            };
            let f1 = self.drift(&pred);
            s = State {
                theta: s.theta + 0.5 * (f0.theta + f1.theta) * dt,
                l_z: s.l_z + 0.5 * (f0.l_z + f1.l_z) * dt + force * dt,
                a: s.a + (f0.a + f1.a) * (0.5 * dt) + kick,
            };
            if !(s.theta.is_finite() && s.l_z.is_finite() && s.a.re.is_finite() && s.a.im.is_finite()) {
                return Err(Error::Divergence { step });
            }
            if step % cfg.record_stride as u64 == 0 {
                sink(&record(&s, step));
            }
        }
        Ok(())
    }
}

/// Integrates one trajectory and returns its recorded samples.
pub fn integrate_trajectory(params: &PhysicalParams, config: &SimConfig, index: u64) -> Result<Vec<TrajectoryRecord>> {
    let sim = Simulator::new(params, config)?;
    let mut out = Vec::with_capacity((config.steps() / config.record_stride as u64) as usize + 1);
    sim.run(index, |r| out.push(*r))?;
    Ok(out)
}

/// All `n_trajectories` trajectories, run in parallel, in index order.
pub fn simulate_ensemble(params: &PhysicalParams, config: &SimConfig) -> Result<Vec<Vec<TrajectoryRecord>>> {
    let sim = Simulator::new(params, config)?;
    (0..config.n_trajectories as u64)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            sim.run(i, |r| out.push(*r))?;
            Ok(out)
        })
        .collect()
}

/// Welch estimate of the θ spectrum over an ensemble of recorded
/// trajectories. Samples with t < `discard_time` are dropped.
pub fn ensemble_theta_psd(
    trajectories: &[Vec<TrajectoryRecord>],
    segment_len: usize,
    window: Window,
    discard_time: f64,
) -> Result<PsdEstimate> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::Config("no trajectories".into()))?;
    if first.len() < 2 {
        return Err(Error::Config("trajectories need at least two samples".into()));
    }
    let dt = first[1].t - first[0].t;
    let mut welch = Welch::new(segment_len, dt, window);
    for traj in trajectories {
        let theta: Vec<f64> = traj.iter().filter(|r| r.t >= discard_time).map(|r| r.theta).collect();
        require_two_segments(theta.len(), segment_len)?;
        welch.add_series(&theta);
    }
    Ok(welch.estimate())
}

/// Runs trajectories in ordered chunks so that reductions are independent
/// of thread scheduling.
fn chunked<T, F>(n: usize, per_traj: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let chunk = (rayon::current_num_threads() * 4).max(1);
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let part: Result<Vec<T>> = (start as u64..end as u64).into_par_iter().map(&per_traj).collect();
        out.extend(part?);
        start = end;
    }
    Ok(out)
}

/// θ samples of one trajectory after the transient, spaced by dt·stride.
fn late_theta(sim: &Simulator, index: u64, discard: f64) -> Result<Vec<f64>> {
    let mut theta = Vec::new();
    sim.run(index, |r| {
        if r.t >= discard {
            theta.push(r.theta);
        }
    })?;
    Ok(theta)
}

/// Ensemble θ spectrum computed on the fly without storing trajectories.
/// The sample spacing is dt·record_stride.
pub fn simulate_theta_psd(params: &PhysicalParams, config: &SimConfig, segment_len: usize, window: Window) -> Result<PsdEstimate> {
    let sim = Simulator::new(params, config)?;
    let discard = transient_time(params, sim.rotor(), config);
    let spacing = config.dt * config.record_stride as f64;
    let parts = chunked(config.n_trajectories, |i| {
        let theta = late_theta(&sim, i, discard)?;
        require_two_segments(theta.len(), segment_len)?;
        let mut w = Welch::new(segment_len, spacing, window);
        w.add_series(&theta);
        Ok(w)
    })?;
    let mut iter = parts.into_iter();
    let first = iter.next().expect("n_trajectories >= 1");
    Ok(iter.fold(first, Welch::merge).estimate())
}

/// Late-time ensemble mean of θ², averaged over time after the transient.
pub fn simulate_theta_variance(params: &PhysicalParams, config: &SimConfig) -> Result<f64> {
    let sim = Simulator::new(params, config)?;
    let discard = transient_time(params, sim.rotor(), config);
    let sums = chunked(config.n_trajectories, |i| {
        let theta = late_theta(&sim, i, discard)?;
        if theta.is_empty() {
            return Err(Error::Config("no samples after the transient".into()));
        }
        Ok((theta.iter().map(|v| v * v).sum::<f64>(), theta.len()))
    })?;
    let (total, count) = sums.iter().fold((0.0, 0usize), |(s, c), &(a, b)| (s + a, c + b));
    Ok(total / count as f64)
}

/// Quartic coefficient the simulator uses at a given photon number.
pub fn simulated_beta(params: &PhysicalParams, photon_number: f64) -> Result<f64> {
    quartic_beta(params, photon_number)
}
