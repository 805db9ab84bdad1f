//! Parameter sweeps of the roton occupation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linear::{build_drift, stable_routh_hurwitz};
use crate::moments::{roton_occupation, rotor_energy, steady_moments, thermal_occupation};
use crate::params::{hz, validate_regime, PhysicalParams, DEFAULT_REGIME_MARGIN};
use crate::rotor::build_rotor;
use crate::steady::solve_steady_state;

pub const MAX_SWEEP_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    /// Static detuning in units of γ ("scaled static detuning").
    DeltaOverGamma,
    QOverC2,
    KappaLHz,
    TemperatureK,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::DeltaOverGamma => "delta_over_gamma",
            SweepAxis::QOverC2 => "q_over_c2",
            SweepAxis::KappaLHz => "kappa_l_hz",
            SweepAxis::TemperatureK => "temperature_k",
        }
    }

    fn apply(self, params: &mut PhysicalParams, x: f64) {
        match self {
            SweepAxis::DeltaOverGamma => params.delta = x * params.gamma,
            SweepAxis::QOverC2 => params.q = x * params.c2,
            SweepAxis::KappaLHz => params.kappa_l = hz(x),
            SweepAxis::TemperatureK => params.temperature = x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// One curve per temperature; ignored when sweeping the temperature.
    pub temperatures: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            axis: SweepAxis::DeltaOverGamma,
            start: -10.0,
            stop: 10.0,
            points: 401,
            temperatures: vec![2e-6, 5e-10],
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.start < self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!("sweep needs start < stop, got [{}, {}]", self.start, self.stop)));
        }
        if self.points < 2 || self.points > MAX_SWEEP_POINTS {
            return Err(Error::Config(format!("sweep points must be in [2, 1e6], got {}", self.points)));
        }
        if self.axis != SweepAxis::TemperatureK && self.temperatures.is_empty() {
            return Err(Error::Config("at least one temperature is required".into()));
        }
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    self.start
                } else if i == n {
                    self.stop
                } else {
                    // symmetric ranges give exactly mirrored points
                    (self.start * (n - i) as f64 + self.stop * i as f64) / n as f64
                }
            })
            .collect()
    }
}

/// One sweep point. Physics columns are NaN where the point has no trapped
/// steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub temperature_k: f64,
    pub eta: f64,
    pub omega_eff: f64,
    pub n_thermal: f64,
    pub nbar: f64,
    pub stable: bool,
    pub regime_ok: bool,
}

impl SweepRow {
    pub fn usable(&self) -> bool {
        self.stable && self.nbar.is_finite()
    }
}

fn evaluate(params: &PhysicalParams, axis_value: f64) -> Result<SweepRow> {
    params.validate()?;
    let rotor = build_rotor(params)?;
    let regime_ok = validate_regime(params, DEFAULT_REGIME_MARGIN).ok();
    let n_thermal = thermal_occupation(rotor.omega_theta, params.temperature)?;
    let mut row = SweepRow {
        axis_value,
        temperature_k: params.temperature,
        eta: f64::NAN,
        omega_eff: f64::NAN,
        n_thermal,
        nbar: f64::NAN,
        stable: false,
        regime_ok,
    };
    let steady = match solve_steady_state(params, &rotor) {
        Ok(s) => s,
        Err(Error::AntiTrapping { .. }) => return Ok(row),
        Err(e) => return Err(e),
    };
    row.eta = steady.eta;
    row.omega_eff = steady.omega_eff;
    row.stable = stable_routh_hurwitz(&build_drift(params, &rotor, &steady.field()));
    if !row.stable {
        return Ok(row);
    }
    let moments = steady_moments(params, &rotor, &steady)?;
    row.nbar = rotor_energy(&moments, &rotor) / steady.omega_eff;
    // the closed form must agree with the moment route
    let closed = roton_occupation(n_thermal, steady.eta)?;
    if (row.nbar - closed).abs() > 1e-8 * closed.abs() {
        return Err(Error::Numerical(format!("n̄ mismatch: {} vs {closed}", row.nbar)));
    }
    Ok(row)
}

/// Rows ordered by temperature (outer) and axis value (inner).
pub fn run_sweep(params: &PhysicalParams, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let temps: Vec<Option<f64>> = if spec.axis == SweepAxis::TemperatureK {
        vec![None]
    } else {
        spec.temperatures.iter().map(|&t| Some(t)).collect()
    };
    let xs = spec.axis_values();
    let jobs: Vec<(Option<f64>, f64)> = temps.iter().flat_map(|&t| xs.iter().map(move |&x| (t, x))).collect();
    jobs.par_iter()
        .map(|&(t, x)| {
            let mut p = *params;
            if let Some(t) = t {
                p.temperature = t;
            }
            spec.axis.apply(&mut p, x);
            evaluate(&p, x)
        })
        .collect()
}
