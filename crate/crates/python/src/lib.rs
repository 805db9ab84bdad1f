//! Python bindings for the rotor–cavity model.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::afm_optomech::cli::{run_sweep as core_sweep, SweepAxis, SweepSpec};
use ::afm_optomech::error::Error;
use ::afm_optomech::langevin::{integrate_trajectory as core_trajectory, max_sim_step, InitialCondition, NoiseMode, SimConfig};
use ::afm_optomech::{linear, moments, params, rotor, spinor, steady};

create_exception!(afm_optomech, PhysicsError, PyException, "Anti-trapping, unstable or out-of-regime parameters.");
create_exception!(afm_optomech, NumericalError, PyException, "Susceptibility pole, overflow or divergence.");

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PhysicsError::new_err(e.to_string()),
        3 => NumericalError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Physical parameters in rad/s (ħ = 1); temperature in kelvin.
#[pyclass(name = "PhysicalParams", get_all, set_all, from_py_object)]
#[derive(Clone, Copy)]
struct PyParams {
    c2: f64,
    q: f64,
    n_atoms: u64,
    u0: f64,
    gamma: f64,
    kappa_l: f64,
    delta: f64,
    d_theta: f64,
    temperature: f64,
}

impl From<params::PhysicalParams> for PyParams {
    fn from(p: params::PhysicalParams) -> Self {
        PyParams {
            c2: p.c2,
            q: p.q,
            n_atoms: p.n_atoms,
            u0: p.u0,
            gamma: p.gamma,
            kappa_l: p.kappa_l,
            delta: p.delta,
            d_theta: p.d_theta,
            temperature: p.temperature,
        }
    }
}

impl PyParams {
    fn core(&self) -> params::PhysicalParams {
        params::PhysicalParams {
            c2: self.c2,
            q: self.q,
            n_atoms: self.n_atoms,
            u0: self.u0,
            gamma: self.gamma,
            kappa_l: self.kappa_l,
            delta: self.delta,
            d_theta: self.d_theta,
            temperature: self.temperature,
        }
    }
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (c2, q, n_atoms, u0, gamma, kappa_l, delta=0.0, d_theta=None, temperature=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        c2: f64,
        q: f64,
        n_atoms: u64,
        u0: f64,
        gamma: f64,
        kappa_l: f64,
        delta: f64,
        d_theta: Option<f64>,
        temperature: f64,
    ) -> PyResult<Self> {
        let mut p = params::PhysicalParams { c2, q, n_atoms, u0, gamma, kappa_l, delta, d_theta: 0.0, temperature };
        p.d_theta = match d_theta {
            Some(d) => d,
            None => p.default_d_theta(),
        };
        p.validate().map_err(to_py)?;
        Ok(p.into())
    }

    /// Preset used for the occupation-versus-detuning figure.
    #[staticmethod]
    fn figure1() -> Self {
        params::PhysicalParams::figure1().into()
    }

    fn validate(&self) -> PyResult<()> {
        self.core().validate().map_err(to_py)
    }

    /// (ratio c2/q, lower bound, upper bound, ok)
    #[pyo3(signature = (margin=params::DEFAULT_REGIME_MARGIN))]
    fn regime(&self, margin: f64) -> (f64, f64, f64, bool) {
        let r = params::validate_regime(&self.core(), margin);
        (r.ratio_c2_q, r.margin, r.bound_2n2 / r.margin, r.ok())
    }

    fn __repr__(&self) -> String {
        format!(
            "PhysicalParams(c2={}, q={}, n_atoms={}, u0={}, gamma={}, kappa_l={}, delta={}, d_theta={}, temperature={})",
            self.c2, self.q, self.n_atoms, self.u0, self.gamma, self.kappa_l, self.delta, self.d_theta, self.temperature
        )
    }
}

#[pyclass(name = "RotorModel", get_all, frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyRotor {
    inertia_i: f64,
    omega_theta: f64,
    theta_bar: f64,
    xi_theta: f64,
    bracket: f64,
}

impl From<rotor::RotorModel> for PyRotor {
    fn from(r: rotor::RotorModel) -> Self {
        PyRotor {
            inertia_i: r.inertia_i,
            omega_theta: r.omega_theta,
            theta_bar: r.theta_bar,
            xi_theta: r.xi_theta,
            bracket: r.bracket,
        }
    }
}

#[pyclass(name = "SteadyState", get_all, frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySteady {
    a_s: Complex64,
    photon_number: f64,
    eta: f64,
    omega_eff: f64,
    theta_s: f64,
    l_z_s: f64,
}

fn setup(p: &PyParams) -> PyResult<(params::PhysicalParams, rotor::RotorModel, steady::SteadyState)> {
    let core = p.core();
    let r = rotor::build_rotor(&core).map_err(to_py)?;
    let s = steady::solve_steady_state(&core, &r).map_err(to_py)?;
    Ok((core, r, s))
}

#[pyfunction]
fn build_rotor(p: &PyParams) -> PyResult<PyRotor> {
    rotor::build_rotor(&p.core()).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn solve_steady_state(p: &PyParams) -> PyResult<PySteady> {
    let (_, _, s) = setup(p)?;
    Ok(PySteady {
        a_s: s.a_s,
        photon_number: s.photon_number,
        eta: s.eta,
        omega_eff: s.omega_eff,
        theta_s: s.theta_s,
        l_z_s: s.l_z_s,
    })
}

#[pyfunction]
fn enhancement_factor(p: &PyParams) -> PyResult<f64> {
    steady::enhancement_factor(&p.core()).map_err(to_py)
}

/// Routh–Hurwitz verdict and characteristic coefficients [a3, a2, a1, a0].
#[pyfunction]
fn routh_hurwitz(p: &PyParams) -> PyResult<(bool, Vec<f64>)> {
    let core = p.core();
    let r = rotor::build_rotor(&core).map_err(to_py)?;
    let drift = linear::build_drift(&core, &r, &steady::cavity_steady_field(&core));
    let report = linear::routh_hurwitz(&drift);
    Ok((report.stable, report.coefficients.to_vec()))
}

#[pyfunction]
fn drift_eigenvalues(p: &PyParams) -> PyResult<Vec<Complex64>> {
    let core = p.core();
    let r = rotor::build_rotor(&core).map_err(to_py)?;
    let drift = linear::build_drift(&core, &r, &steady::cavity_steady_field(&core));
    linear::eigenvalues(&drift).map(|e| e.to_vec()).map_err(to_py)
}

#[pyfunction]
fn susceptibility(omega: f64, p: &PyParams) -> PyResult<Complex64> {
    let (c, r, s) = setup(p)?;
    linear::susceptibility(omega, &c, &r, &s).map_err(to_py)
}

#[pyfunction]
fn theta_spectrum(omega: f64, p: &PyParams) -> PyResult<f64> {
    let (c, r, s) = setup(p)?;
    linear::theta_spectrum(omega, &c, &r, &s).map_err(to_py)
}

/// Steady (⟨θ²⟩, ⟨L_z²⟩, ⟨{θ, L_z}⟩/2).
#[pyfunction]
fn steady_moments(p: &PyParams) -> PyResult<(f64, f64, f64)> {
    let (c, r, s) = setup(p)?;
    let m = moments::steady_moments(&c, &r, &s).map_err(to_py)?;
    Ok((m.theta2, m.l2, m.sym))
}

/// RK4 moment trajectory from zero as (t, θ², L_z², sym) rows.
#[pyfunction]
#[pyo3(signature = (p, t_end, dt=None, stride=1))]
fn integrate_moments(p: &PyParams, t_end: f64, dt: Option<f64>, stride: usize) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let (c, r, s) = setup(p)?;
    let dt = dt.unwrap_or_else(|| moments::max_moment_step(&c, &r, &s));
    let series = moments::integrate_moments_strided(&moments::MomentState::zero(), &c, &r, &s, t_end, dt, stride)
        .map_err(to_py)?;
    Ok(series.iter().map(|m| (m.t, m.theta2, m.l2, m.sym)).collect())
}

#[pyfunction]
fn occupation<'py>(py: Python<'py>, p: &PyParams) -> PyResult<Bound<'py, PyDict>> {
    let (c, r, s) = setup(p)?;
    let o = moments::occupation_report(&c, &r, &s).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("n_thermal", o.n_thermal)?;
    d.set_item("eta", o.eta)?;
    d.set_item("omega_eff", o.omega_eff)?;
    d.set_item("energy", o.energy)?;
    d.set_item("nbar", o.nbar)?;
    Ok(d)
}

/// (levels relative to the ground state, ⟨n₀⟩ in the ground state)
#[pyfunction]
fn exact_spinor_spectrum(n_atoms: u64, c2: f64, q: f64, k: usize) -> PyResult<(Vec<f64>, f64)> {
    let s = spinor::exact_spinor_spectrum(n_atoms, c2, q, k).map_err(to_py)?;
    Ok((s.eigenvalues, s.ground_n0_expectation))
}

/// Sweep rows as (axis, temperature, eta, omega_eff, n_thermal, nbar, stable, regime_ok).
#[pyfunction]
#[pyo3(signature = (p, axis="delta_over_gamma", start=-10.0, stop=10.0, points=401, temperatures=vec![2e-6, 5e-10]))]
#[allow(clippy::type_complexity)]
fn run_sweep(
    p: &PyParams,
    axis: &str,
    start: f64,
    stop: f64,
    points: usize,
    temperatures: Vec<f64>,
) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64, bool, bool)>> {
    let axis = match axis {
        "delta_over_gamma" => SweepAxis::DeltaOverGamma,
        "q_over_c2" => SweepAxis::QOverC2,
        "kappa_l_hz" => SweepAxis::KappaLHz,
        "temperature_k" => SweepAxis::TemperatureK,
        other => return Err(PyValueError::new_err(format!("unknown axis '{other}'"))),
    };
    let spec = SweepSpec { axis, start, stop, points, temperatures };
    let rows = core_sweep(&p.core(), &spec).map_err(to_py)?;
    Ok(rows
        .iter()
        .map(|r| (r.axis_value, r.temperature_k, r.eta, r.omega_eff, r.n_thermal, r.nbar, r.stable, r.regime_ok))
        .collect())
}

/// One Langevin trajectory as (t, θ, L_z, Re a, Im a) rows.
#[pyfunction]
#[pyo3(signature = (p, t_end, dt=None, seed=0, index=0, noise="classical_white", vacuum=false, quartic=false, stride=1, theta0=0.0, lz0=0.0))]
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn integrate_trajectory(
    p: &PyParams,
    t_end: f64,
    dt: Option<f64>,
    seed: u64,
    index: u64,
    noise: &str,
    vacuum: bool,
    quartic: bool,
    stride: usize,
    theta0: f64,
    lz0: f64,
) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let core = p.core();
    let noise_mode = match noise {
        "deterministic" => NoiseMode::Deterministic,
        "classical_white" => NoiseMode::ClassicalWhite,
        "quantum_colored" => NoiseMode::QuantumColored,
        other => return Err(PyValueError::new_err(format!("unknown noise mode '{other}'"))),
    };
    let dt = match dt {
        Some(d) => d,
        None => max_sim_step(&core, &rotor::build_rotor(&core).map_err(to_py)?),
    };
    let mut cfg = SimConfig::new(dt, t_end);
    cfg.seed = seed;
    cfg.noise_mode = noise_mode;
    cfg.include_vacuum_input = vacuum;
    cfg.include_quartic = quartic;
    cfg.record_stride = stride;
    cfg.initial = InitialCondition { theta: theta0, l_z: lz0, a: None };
    let traj = core_trajectory(&core, &cfg, index).map_err(to_py)?;
    Ok(traj.iter().map(|r| (r.t, r.theta, r.l_z, r.a_re, r.a_im)).collect())
}

#[pymodule]
#[pyo3(name = "afm_optomech")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyRotor>()?;
    m.add_class::<PySteady>()?;
    m.add("PhysicsError", m.py().get_type::<PhysicsError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(build_rotor, m)?)?;
    m.add_function(wrap_pyfunction!(solve_steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(enhancement_factor, m)?)?;
    m.add_function(wrap_pyfunction!(routh_hurwitz, m)?)?;
    m.add_function(wrap_pyfunction!(drift_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(susceptibility, m)?)?;
    m.add_function(wrap_pyfunction!(theta_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(steady_moments, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_moments, m)?)?;
    m.add_function(wrap_pyfunction!(occupation, m)?)?;
    m.add_function(wrap_pyfunction!(exact_spinor_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_trajectory, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
