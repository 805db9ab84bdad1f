//! Command-line driver.
//!
//! Every subcommand reads an optional `--config` file, applies per-key
//! overrides (`--q-hz 0.05`, `--delta-over-gamma 1` ...), and writes CSV
//! with `#`-prefixed metadata lines echoing the effective parameters.
//! Numbers are printed with 17 significant digits.
//!
//! Exit codes: 0 success, 1 configuration error, 2 physics-regime error
//! (anti-trapping, unstable, or out of regime with `--strict`),
//! 3 numerical failure.

pub mod plot;
pub mod sweep;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::config::ParamSpec;
use crate::error::{Error, Result};
use crate::langevin::{
    ensemble_theta_psd, max_sim_step, simulate_ensemble, transient_time, InitialCondition, NoiseMode, SimConfig,
    Window,
};
use crate::linear::{build_drift, routh_hurwitz, spectrum_point};
use crate::moments::{integrate_moments_strided, max_moment_step, occupation_report, MomentState};
use crate::params::{validate_regime, PhysicalParams, DEFAULT_REGIME_MARGIN};
use crate::rotor::{build_rotor, harmonic_depletion};
use crate::spinor::exact_spinor_spectrum;
use crate::steady::{cavity_steady_field, enhancement_radicand, solve_steady_state};

pub use plot::emit_plot;
pub use sweep::{run_sweep, SweepAxis, SweepRow, SweepSpec};

pub const JOBS_ENV: &str = "AFM_OPTOMECH_JOBS";

#[derive(Debug, Parser)]
#[command(name = "afm-optomech", version, about = "Cavity optomechanics of a spin-1 rotor condensate")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Parameter overrides; values use the config-file units.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// `key = value` parameter file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for sweeps and trajectory ensembles.
    #[arg(long, global = true, env = JOBS_ENV)]
    pub jobs: Option<usize>,
    /// Treat parameters outside the harmonic-rotor window as an error.
    #[arg(long, global = true)]
    pub strict: bool,

    #[arg(long, global = true, value_name = "HZ", allow_hyphen_values = true)]
    pub c2_hz: Option<String>,
    #[arg(long, global = true, value_name = "HZ", allow_hyphen_values = true)]
    pub q_hz: Option<String>,
    #[arg(long, global = true, value_name = "GAUSS", allow_hyphen_values = true)]
    pub b_field_gauss: Option<String>,
    #[arg(long, global = true, value_name = "HZ", allow_hyphen_values = true)]
    pub delta_hf_hz: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub n_atoms: Option<String>,
    #[arg(long, global = true, value_name = "HZ", allow_hyphen_values = true)]
    pub u0_hz: Option<String>,
    #[arg(long, global = true, value_name = "HZ", allow_hyphen_values = true)]
    pub gamma_hz: Option<String>,
    #[arg(long, global = true, value_name = "HZ", allow_hyphen_values = true)]
    pub kappa_l_hz: Option<String>,
    #[arg(long, global = true, value_name = "HZ", allow_hyphen_values = true)]
    pub delta_hz: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta_over_gamma: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub d_theta: Option<String>,
    #[arg(long, global = true, value_name = "KELVIN", allow_hyphen_values = true)]
    pub temperature_k: Option<String>,
}

impl CommonArgs {
    pub fn param_spec(&self) -> Result<ParamSpec> {
        let mut spec = match &self.config {
            Some(path) => ParamSpec::from_file(path)?,
            None => ParamSpec::default(),
        };
        let overrides = [
            ("c2_hz", &self.c2_hz),
            ("q_hz", &self.q_hz),
            ("b_field_gauss", &self.b_field_gauss),
            ("delta_hf_hz", &self.delta_hf_hz),
            ("n_atoms", &self.n_atoms),
            ("u0_hz", &self.u0_hz),
            ("gamma_hz", &self.gamma_hz),
            ("kappa_l_hz", &self.kappa_l_hz),
            ("delta_hz", &self.delta_hz),
            ("delta_over_gamma", &self.delta_over_gamma),
            ("d_theta", &self.d_theta),
            ("temperature_k", &self.temperature_k),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                spec.set(key, v)?;
            }
        }
        Ok(spec)
    }

    pub fn params(&self) -> Result<PhysicalParams> {
        self.param_spec()?.resolve()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the parameter set and report the regime window.
    Validate,
    /// Steady state, enhancement factor and roton occupation.
    Steady,
    /// Susceptibility and fluctuation spectra on a frequency grid.
    Spectrum(SpectrumArgs),
    /// Second-moment dynamics from an initial state.
    Moments(MomentsArgs),
    /// n̄ along a parameter axis, one curve per temperature.
    Sweep(SweepArgs),
    /// Nonlinear Langevin trajectories.
    Simulate(SimulateArgs),
    /// Exact low-lying spectrum of the spinor Hamiltonian.
    Exactdiag(ExactdiagArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Lowest frequency in rad/s.
    #[arg(long, default_value_t = 0.0)]
    pub omega_min: f64,
    /// Highest frequency in rad/s; 3·ω_eff when omitted.
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    /// End time in seconds; 20·I/D_θ when omitted.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// RK4 step in seconds; the largest stable step when omitted.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Rows kept; every stride-th step is printed.
    #[arg(long, default_value_t = 1000)]
    pub rows: usize,
    #[arg(long, default_value_t = 0.0)]
    pub theta2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub l2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sym: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepAxis::DeltaOverGamma)]
    pub axis: SweepAxis,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Comma-separated temperatures in kelvin.
    #[arg(long, value_delimiter = ',', default_values_t = [2e-6, 5e-10])]
    pub temperatures: Vec<f64>,
    /// Also write an SVG plot of n̄.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Deterministic,
    ClassicalWhite,
    QuantumColored,
}

impl From<NoiseArg> for NoiseMode {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Deterministic => NoiseMode::Deterministic,
            NoiseArg::ClassicalWhite => NoiseMode::ClassicalWhite,
            NoiseArg::QuantumColored => NoiseMode::QuantumColored,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Step in seconds; 0.05 over the fastest rate when omitted.
    #[arg(long)]
    pub dt: Option<f64>,
    /// End time in seconds; min(20·I/D_θ, 1e6·dt) when omitted.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NoiseArg::ClassicalWhite)]
    pub noise: NoiseArg,
    /// Add vacuum noise at the cavity input.
    #[arg(long)]
    pub vacuum: bool,
    /// Keep the quartic correction to the rotor potential.
    #[arg(long)]
    pub quartic: bool,
    #[arg(long, default_value_t = 1)]
    pub trajectories: usize,
    /// Keep every stride-th step.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lz0: f64,
    /// Initial cavity amplitude as `re,im`; the steady field when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<String>,
    /// Write the ensemble θ spectrum to this file.
    #[arg(long)]
    pub psd: Option<PathBuf>,
    /// Welch segment length (power of two).
    #[arg(long, default_value_t = 4096)]
    pub segment_len: usize,
    /// Transient dropped before the spectrum, in seconds; 10·I/D_θ when omitted.
    #[arg(long)]
    pub transient: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ExactdiagArgs {
    /// Number of levels to report.
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
}

/// Formats a number with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(out: &mut String, command: &str, params: &PhysicalParams) {
    let _ = writeln!(out, "# afm-optomech {command}");
    for (k, v) in ParamSpec::describe(params) {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

fn meta(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "# {key} = {value}");
}

/// Result of one command: the text for `--output` and any side files.
#[derive(Debug, Default)]
pub struct Outcome {
    pub output: String,
    pub files: Vec<(PathBuf, String)>,
    /// Set when the output was produced but the run still counts as failed.
    pub error: Option<Error>,
}

fn regime_check(params: &PhysicalParams, strict: bool) -> Result<()> {
    let r = validate_regime(params, DEFAULT_REGIME_MARGIN);
    if strict && !r.ok() {
        return Err(Error::Regime(format!(
            "c2/q = {:e} outside [{}, 2N²/{}] = [{}, {:e}]",
            r.ratio_c2_q,
            r.margin,
            r.margin,
            r.margin,
            r.bound_2n2 / r.margin
        )));
    }
    Ok(())
}

pub fn cmd_validate(params: &PhysicalParams, strict: bool) -> Result<Outcome> {
    let mut out = String::new();
    header(&mut out, "validate", params);
    let r = validate_regime(params, DEFAULT_REGIME_MARGIN);
    let rotor = build_rotor(params)?;
    let radicand = enhancement_radicand(params);
    out.push_str("quantity,value\n");
    let mut row = |k: &str, v: String| {
        let _ = writeln!(out, "{k},{v}");
    };
    row("ratio_c2_q", num(r.ratio_c2_q));
    row("regime_lower", num(r.margin));
    row("regime_upper", num(r.bound_2n2 / r.margin));
    row("regime_ok", (r.ok() as u8).to_string());
    row("omega_theta_rad_s", num(rotor.omega_theta));
    row("enhancement_radicand", num(radicand));
    row("trapping", ((radicand >= 0.0) as u8).to_string());
    let error = if radicand < 0.0 {
        Some(Error::AntiTrapping { radicand })
    } else {
        regime_check(params, strict).err()
    };
    Ok(Outcome { output: out, files: Vec::new(), error })
}

pub fn cmd_steady(params: &PhysicalParams, strict: bool) -> Result<Outcome> {
    regime_check(params, strict)?;
    let rotor = build_rotor(params)?;
    let steady = solve_steady_state(params, &rotor)?;
    let hurwitz = routh_hurwitz(&build_drift(params, &rotor, &steady.field()));
    let occ = occupation_report(params, &rotor, &steady)?;
    let mut out = String::new();
    header(&mut out, "steady", params);
    out.push_str("quantity,value\n");
    let rows = [
        ("inertia_s", num(rotor.inertia_i)),
        ("omega_theta_rad_s", num(rotor.omega_theta)),
        ("xi_theta_rad_s", num(rotor.xi_theta)),
        ("theta_bar", num(rotor.theta_bar)),
        ("a_s_re", num(steady.a_s.re)),
        ("a_s_im", num(steady.a_s.im)),
        ("photon_number", num(steady.photon_number)),
        ("theta_s", num(steady.theta_s)),
        ("l_z_s", num(steady.l_z_s)),
        ("eta", num(steady.eta)),
        ("omega_eff_rad_s", num(steady.omega_eff)),
        ("stable", (hurwitz.stable as u8).to_string()),
        ("n_thermal", num(occ.n_thermal)),
        ("energy_rad_s", num(occ.energy)),
        ("nbar", num(occ.nbar)),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    let error = (!hurwitz.stable).then_some(Error::Unstable);
    Ok(Outcome { output: out, files: Vec::new(), error })
}

pub fn cmd_spectrum(params: &PhysicalParams, strict: bool, args: &SpectrumArgs) -> Result<Outcome> {
    regime_check(params, strict)?;
    let rotor = build_rotor(params)?;
    let steady = solve_steady_state(params, &rotor)?;
    let hi = args.omega_max.unwrap_or(3.0 * steady.omega_eff);
    if args.points < 2 || !(hi > args.omega_min) {
        return Err(Error::Config("spectrum needs points >= 2 and omega_max > omega_min".into()));
    }
    let mut out = String::new();
    header(&mut out, "spectrum", params);
    out.push_str("omega_rad_s,chi_re,chi_im,s_theta,s_x1,s_x2\n");
    let n = args.points - 1;
    for i in 0..=n {
        let w = args.omega_min + (hi - args.omega_min) * i as f64 / n as f64;
        let p = spectrum_point(w, params, &rotor, &steady)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(p.omega),
            num(p.chi.re),
            num(p.chi.im),
            num(p.s_theta),
            num(p.s_x1),
            num(p.s_x2)
        );
    }
    Ok(Outcome { output: out, ..Default::default() })
}

pub fn cmd_moments(params: &PhysicalParams, strict: bool, args: &MomentsArgs) -> Result<Outcome> {
    regime_check(params, strict)?;
    let rotor = build_rotor(params)?;
    let steady = solve_steady_state(params, &rotor)?;
    let dt = args.dt.unwrap_or_else(|| max_moment_step(params, &rotor, &steady));
    let t_end = match args.t_end {
        Some(t) => t,
        None if params.d_theta > 0.0 => 20.0 * rotor.inertia_i / params.d_theta,
        None => return Err(Error::Config("t_end is required when d_theta = 0".into())),
    };
    let steps = (t_end / dt).round().max(1.0);
    let stride = ((steps / args.rows.max(1) as f64).ceil() as usize).max(1);
    let initial = MomentState { theta2: args.theta2, l2: args.l2, sym: args.sym, t: 0.0 };
    let series = integrate_moments_strided(&initial, params, &rotor, &steady, t_end, dt, stride)?;
    let mut out = String::new();
    header(&mut out, "moments", params);
    meta(&mut out, "dt_s", num(dt));
    out.push_str("t_s,theta2,l2,sym\n");
    for m in &series {
        let _ = writeln!(out, "{},{},{},{}", num(m.t), num(m.theta2), num(m.l2), num(m.sym));
    }
    Ok(Outcome { output: out, ..Default::default() })
}

pub fn sweep_csv(params: &PhysicalParams, spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    header(&mut out, "sweep", params);
    meta(&mut out, "axis", spec.axis.column());
    out.push_str(spec.axis.column());
    out.push_str(",temperature_k,eta,omega_eff_rad_s,n_thermal,nbar,stable,regime_ok\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.axis_value),
            num(r.temperature_k),
            num(r.eta),
            num(r.omega_eff),
            num(r.n_thermal),
            num(r.nbar),
            r.stable as u8,
            r.regime_ok as u8
        );
    }
    out
}

pub fn cmd_sweep(params: &PhysicalParams, strict: bool, args: &SweepArgs) -> Result<Outcome> {
    let spec = SweepSpec {
        axis: args.axis,
        start: args.start,
        stop: args.stop,
        points: args.points,
        temperatures: args.temperatures.clone(),
    };
    let rows = run_sweep(params, &spec)?;
    let mut outcome = Outcome { output: sweep_csv(params, &spec, &rows), ..Default::default() };
    if let Some(path) = &args.plot {
        outcome.files.push((path.clone(), emit_plot(&rows, spec.axis.column())?));
    }
    if rows.iter().all(|r| !r.usable()) {
        outcome.error = Some(Error::Regime("no sweep point has a stable trapped steady state".into()));
    } else if strict && rows.iter().any(|r| !r.regime_ok) {
        outcome.error = Some(Error::Regime("some sweep points are outside the harmonic-rotor window".into()));
    }
    Ok(outcome)
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Config(format!("expected 're,im', got '{s}'"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    Ok(Complex64::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn cmd_simulate(params: &PhysicalParams, strict: bool, args: &SimulateArgs) -> Result<Outcome> {
    regime_check(params, strict)?;
    let rotor = build_rotor(params)?;
    let dt = args.dt.unwrap_or_else(|| max_sim_step(params, &rotor));
    let t_end = args.t_end.unwrap_or_else(|| {
        let relax = if params.d_theta > 0.0 { 20.0 * rotor.inertia_i / params.d_theta } else { f64::INFINITY };
        relax.min(1e6 * dt)
    });
    let mut cfg = SimConfig::new(dt, t_end);
    cfg.seed = args.seed;
    cfg.noise_mode = args.noise.into();
    cfg.include_vacuum_input = args.vacuum;
    cfg.include_quartic = args.quartic;
    cfg.n_trajectories = args.trajectories;
    cfg.record_stride = args.stride;
    cfg.transient = args.transient;
    cfg.initial = InitialCondition {
        theta: args.theta0,
        l_z: args.lz0,
        a: args.a0.as_deref().map(parse_complex).transpose()?,
    };
    let trajectories = simulate_ensemble(params, &cfg)?;

    let mut out = String::new();
    header(&mut out, "simulate", params);
    meta(&mut out, "seed", cfg.seed);
    meta(&mut out, "noise", format!("{:?}", cfg.noise_mode));
    meta(&mut out, "vacuum_input", cfg.include_vacuum_input as u8);
    meta(&mut out, "quartic", cfg.include_quartic as u8);
    meta(&mut out, "dt_s", num(dt));
    meta(&mut out, "t_end_s", num(t_end));
    meta(&mut out, "stride", cfg.record_stride);
    meta(&mut out, "trajectories", cfg.n_trajectories);
    meta(&mut out, "a_s", format!("{},{}", num(cavity_steady_field(params).a_s.re), num(cavity_steady_field(params).a_s.im)));
    out.push_str("t_s,theta,l_z,a_re,a_im\n");
    for (k, traj) in trajectories.iter().enumerate() {
        if trajectories.len() > 1 {
            meta(&mut out, "trajectory", k);
        }
        for r in traj {
            let _ = writeln!(out, "{},{},{},{},{}", num(r.t), num(r.theta), num(r.l_z), num(r.a_re), num(r.a_im));
        }
    }

    let mut files = Vec::new();
    if let Some(path) = &args.psd {
        let discard = transient_time(params, &rotor, &cfg);
        let est = ensemble_theta_psd(&trajectories, args.segment_len, Window::CosineTaper, discard)?;
        let mut psd = String::new();
        header(&mut psd, "simulate psd", params);
        meta(&mut psd, "seed", cfg.seed);
        meta(&mut psd, "segments", est.segments);
        meta(&mut psd, "segment_len", est.seg_len);
        meta(&mut psd, "transient_s", num(discard));
        psd.push_str("omega_rad_s,s_theta\n");
        for (w, s) in est.omega.iter().zip(&est.psd) {
            let _ = writeln!(psd, "{},{}", num(*w), num(*s));
        }
        files.push((path.clone(), psd));
    }
    Ok(Outcome { output: out, files, error: None })
}

pub fn cmd_exactdiag(params: &PhysicalParams, args: &ExactdiagArgs) -> Result<Outcome> {
    let spectrum = exact_spinor_spectrum(params.n_atoms, params.c2, params.q, args.levels)?;
    let mut out = String::new();
    let _ = writeln!(out, "# afm-optomech exactdiag");
    meta(&mut out, "n_atoms", params.n_atoms);
    meta(&mut out, "c2_rad_s", num(params.c2));
    meta(&mut out, "q_rad_s", num(params.q));
    meta(&mut out, "basis_dimension", spectrum.basis_dimension);
    meta(&mut out, "ground_n0", num(spectrum.ground_n0_expectation));
    meta(&mut out, "depletion", num(params.n() - spectrum.ground_n0_expectation));
    meta(&mut out, "harmonic_depletion", num(harmonic_depletion(params)));
    if let Ok(rotor) = build_rotor(params) {
        meta(&mut out, "omega_theta_rad_s", num(rotor.omega_theta));
    }
    out.push_str("index,energy_rad_s\n");
    for (i, e) in spectrum.eigenvalues.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", num(*e));
    }
    Ok(Outcome { output: out, ..Default::default() })
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let common = &cli.common;
    let params = common.params()?;
    let strict = common.strict;
    let go = || match &cli.command {
        Command::Validate => cmd_validate(&params, strict),
        Command::Steady => cmd_steady(&params, strict),
        Command::Spectrum(a) => cmd_spectrum(&params, strict, a),
        Command::Moments(a) => cmd_moments(&params, strict, a),
        Command::Sweep(a) => cmd_sweep(&params, strict, a),
        Command::Simulate(a) => cmd_simulate(&params, strict, a),
        Command::Exactdiag(a) => cmd_exactdiag(&params, a),
    };
    match common.jobs {
        Some(0) => Err(Error::Config("--jobs must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?
            .install(go),
        None => go(),
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Parses `args`, runs the command and writes its outputs. Returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.common.output {
        Some(path) => write_file(path, &outcome.output),
        None => stdout
            .write_all(outcome.output.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write output: {e}"))),
    };
    let written = written.and_then(|_| outcome.files.iter().try_for_each(|(p, t)| write_file(p, t)));
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    match outcome.error {
        Some(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
        None => 0,
    }
}
