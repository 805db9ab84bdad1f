//! Linearized fluctuations about the steady state: drift matrix, stability,
//! susceptibility and noise spectra.
//!
//! Spectra follow the two-sided convention ⟨x²⟩ = ∫ S(ω) dω/2π over the
//! whole real line.

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{thermal_frequency, PhysicalParams};
use crate::rotor::RotorModel;
use crate::steady::{CavityField, SteadyState};

/// Relative size below which a Routh–Hurwitz condition counts as marginal.
pub const MARGINAL_TOLERANCE: f64 = 1e-12;

/// Drift matrix R acting on (δθ, δL_z, δX₁, δX₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    pub r: Matrix4<f64>,
}

pub fn build_drift(params: &PhysicalParams, rotor: &RotorModel, field: &CavityField) -> DriftMatrix {
    let i = rotor.inertia_i;
    let mut r = Matrix4::zeros();
    r[(0, 1)] = 1.0 / i;
    r[(1, 0)] = -i * rotor.omega_theta * rotor.omega_theta - 2.0 * rotor.xi_theta * field.photon_number;
    r[(1, 1)] = -params.d_theta / i;
    r[(2, 2)] = -params.gamma;
    r[(3, 3)] = -params.gamma;
    r[(2, 3)] = -params.delta;
    r[(3, 2)] = params.delta;
    DriftMatrix { r }
}

/// Coefficients [a₃, a₂, a₁, a₀] of det(λ − R) = λ⁴ + a₃λ³ + a₂λ² + a₁λ + a₀.
pub fn characteristic_polynomial(drift: &DriftMatrix) -> [f64; 4] {
    expand_minors(&drift.r).0
}

/// a_k as the sum of the principal k-minors of −R, each by Leibniz
/// expansion, together with the sum of |terms| (the rounding scale of a_k).
fn expand_minors(r: &Matrix4<f64>) -> ([f64; 4], [f64; 4]) {
    let mut coeffs = [0.0; 4];
    let mut scales = [0.0; 4];
    for mask in 1u32..16 {
        let idx: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            let mut term = if inversions(&perm) % 2 == 0 { 1.0 } else { -1.0 };
            for (row, &col) in perm.iter().enumerate() {
                term *= -r[(idx[row], idx[col])];
            }
            coeffs[k - 1] += term;
            scales[k - 1] += term.abs();
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    (coeffs, scales)
}

fn inversions(p: &[usize]) -> usize {
    (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[j] < p[i]).count()).sum()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Outcome of the Routh–Hurwitz test with the margins it was decided on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzReport {
    pub coefficients: [f64; 4],
    /// a₃a₂a₁ − a₁² − a₃²a₀.
    pub hurwitz_det: f64,
    /// a₃, a₁, a₀ and the Hurwitz determinant, each divided by the sum of
    /// the magnitudes of the terms it is built from; all must exceed the
    /// marginal tolerance for a stable verdict.
    pub relative_margins: [f64; 4],
    pub stable: bool,
}

pub fn routh_hurwitz(drift: &DriftMatrix) -> HurwitzReport {
    let (c, scales) = expand_minors(&drift.r);
    let [a3, a2, a1, a0] = c;
    let det = a3 * a2 * a1 - a1 * a1 - a3 * a3 * a0;
    let det_scale = (a3 * a2 * a1).abs() + a1 * a1 + (a3 * a3 * a0).abs();
    let rel = |v: f64, scale: f64| if scale > 0.0 { v / scale } else { 0.0 };
    let margins = [rel(a3, scales[0]), rel(a1, scales[2]), rel(a0, scales[3]), rel(det, det_scale)];
    let stable = margins.iter().all(|&m| m > MARGINAL_TOLERANCE);
    HurwitzReport {
        coefficients: c,
        hurwitz_det: det,
        relative_margins: margins,
        stable,
    }
}

/// True iff every eigenvalue of R has a strictly negative real part.
/// Marginal cases report unstable.
pub fn stable_routh_hurwitz(drift: &DriftMatrix) -> bool {
    routh_hurwitz(drift).stable
}

/// Diagonal similarity that equalizes row and column norms (powers of two,
/// so the scaling is exact).
fn balance(mut a: Matrix4<f64>) -> Matrix4<f64> {
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..4 {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..4 {
                if j != i {
                    col += a[(j, i)].abs();
                    row += a[(i, j)].abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = col + row;
            let mut c = col;
            let mut r = row;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < 0.95 * s {
                done = false;
                for j in 0..4 {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}

/// Eigenvalues of R sorted by real part, largest first.
pub fn eigenvalues(drift: &DriftMatrix) -> Result<[Complex64; 4]> {
    let balanced = balance(drift.r);
    let schur = Schur::try_new(balanced, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let ev = schur.complex_eigenvalues();
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (o, e) in out.iter_mut().zip(ev.iter()) {
        *o = Complex64::new(e.re, e.im);
    }
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(out)
}

/// χ(ω) = 1/(I(ω_eff² − ω²) − i D_θ ω).
pub fn susceptibility(omega: f64, params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> Result<Complex64> {
    let inv = Complex64::new(
        rotor.inertia_i * (steady.omega_eff * steady.omega_eff - omega * omega),
        -params.d_theta * omega,
    );
    if inv.norm_sqr() == 0.0 {
        return Err(Error::Pole { omega });
    }
    Ok(inv.inv())
}

/// Thermal noise spectrum S_ε(ω) = D_θ ω [1 + coth(ω/2k_BT)].
pub fn noise_spectrum_epsilon(omega: f64, d_theta: f64, temperature: f64) -> Result<f64> {
    let kt = thermal_frequency(temperature)?;
    if kt == 0.0 {
        return Ok(if omega > 0.0 { 2.0 * d_theta * omega } else { 0.0 });
    }
    Ok(d_theta * omega + d_theta * omega_coth(omega, kt))
}

/// Even part [S_ε(ω) + S_ε(−ω)]/2 = D_θ ω coth(ω/2k_BT).
pub fn noise_spectrum_epsilon_sym(omega: f64, d_theta: f64, temperature: f64) -> Result<f64> {
    let kt = thermal_frequency(temperature)?;
    if kt == 0.0 {
        return Ok(d_theta * omega.abs());
    }
    Ok(d_theta * omega_coth(omega, kt))
}

/// ω coth(ω/2kT), continued to 2kT at ω = 0.
fn omega_coth(omega: f64, kt: f64) -> f64 {
    let x = omega / (2.0 * kt);
    if x.abs() < 1e-4 {
        // ω coth x = 2kT (1 + x²/3 − x⁴/45)
        2.0 * kt * (1.0 + x * x / 3.0 - x.powi(4) / 45.0)
    } else {
        omega / x.tanh()
    }
}

/// S_θθ(ω) = |χ(ω)|² S_ε(ω).
pub fn theta_spectrum(omega: f64, params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> Result<f64> {
    let chi = susceptibility(omega, params, rotor, steady)?;
    Ok(chi.norm_sqr() * noise_spectrum_epsilon(omega, params.d_theta, params.temperature)?)
}

/// Output quadrature transfer functions and spectra for vacuum input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResponse {
    /// Coefficient of X_{1,2}^in in δX_{1,2}.
    pub t_self: Complex64,
    /// Coefficient of X_{2,1}^in in δX₁ (δX₂ takes the opposite sign).
    pub t_cross: Complex64,
    pub s_x1: f64,
    pub s_x2: f64,
}

/// Vacuum input quadratures carry a symmetrized spectral density of 1/2.
pub const VACUUM_QUADRATURE_DENSITY: f64 = 0.5;

pub fn quadrature_response(omega: f64, params: &PhysicalParams) -> QuadratureResponse {
    let g = params.gamma;
    let z = Complex64::new(g, -omega);
    let denom = z * z + params.delta * params.delta;
    let amp = (2.0 * g).sqrt();
    let t_self = amp * z / denom;
    let t_cross = amp * params.delta / denom;
    let s = VACUUM_QUADRATURE_DENSITY * (t_self.norm_sqr() + t_cross.norm_sqr());
    QuadratureResponse {
        t_self,
        t_cross,
        s_x1: s,
        s_x2: s,
    }
}

/// One row of the linear-response table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub chi: Complex64,
    pub s_theta: f64,
    pub s_x1: f64,
    pub s_x2: f64,
}

pub fn spectrum_point(omega: f64, params: &PhysicalParams, rotor: &RotorModel, steady: &SteadyState) -> Result<SpectrumPoint> {
    let chi = susceptibility(omega, params, rotor, steady)?;
    let s_eps = noise_spectrum_epsilon(omega, params.d_theta, params.temperature)?;
    let quad = quadrature_response(omega, params);
    Ok(SpectrumPoint {
        omega,
        chi,
        s_theta: chi.norm_sqr() * s_eps,
        s_x1: quad.s_x1,
        s_x2: quad.s_x2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::hz;
    use crate::rotor::build_rotor;
    use crate::steady::{cavity_steady_field, solve_steady_state};

    struct Fixture {
        p: PhysicalParams,
        rotor: RotorModel,
        steady: SteadyState,
    }

    fn fixture(p: PhysicalParams) -> Fixture {
        let rotor = build_rotor(&p).unwrap();
        let steady = solve_steady_state(&p, &rotor).unwrap();
        Fixture { p, rotor, steady }
    }

    fn drift_of(p: &PhysicalParams) -> DriftMatrix {
        let rotor = build_rotor(p).unwrap();
        build_drift(p, &rotor, &cavity_steady_field(p))
    }

    #[test]
    fn drift_entries() {
        let f = fixture(PhysicalParams::figure1());
        let d = build_drift(&f.p, &f.rotor, &f.steady.field());
        let r = d.r;
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(r[(i, j)], 0.0);
                assert_eq!(r[(j, i)], 0.0);
            }
        }
        assert_eq!(r[(0, 1)], 1.0 / f.rotor.inertia_i);
        assert_eq!(r[(2, 3)], -f.p.delta);
        // -r10/I = ω_eff²
        let w2 = -r[(1, 0)] / f.rotor.inertia_i;
        assert!((w2 - f.steady.omega_eff.powi(2)).abs() < 1e-12 * w2);
        assert!((r[(1, 0)] / -4.53e11 - 1.0).abs() < 2e-3, "{}", r[(1, 0)]);

        let mut bare = f.p;
        bare.kappa_l = 0.0;
        let d = drift_of(&bare);
        let expect = -f.rotor.inertia_i * f.rotor.omega_theta.powi(2);
        assert!((d.r[(1, 0)] - expect).abs() < 1e-14 * expect.abs());
    }

    #[test]
    fn characteristic_polynomial_of_blocks() {
        let f = fixture(PhysicalParams::figure1());
        let d = build_drift(&f.p, &f.rotor, &f.steady.field());
        let [a3, a2, a1, a0] = characteristic_polynomial(&d);
        let alpha = f.p.d_theta / f.rotor.inertia_i;
        let w2 = f.steady.omega_eff.powi(2);
        let (c, e) = (2.0 * f.p.gamma, f.p.gamma.powi(2) + f.p.delta.powi(2));
        assert!((a3 - (c + alpha)).abs() < 1e-12 * a3);
        assert!((a2 - (e + w2 + c * alpha)).abs() < 1e-12 * a2);
        assert!((a1 - (c * w2 + e * alpha)).abs() < 1e-12 * a1);
        assert!((a0 - e * w2).abs() < 1e-12 * a0);
    }

    #[test]
    fn stable_with_widely_separated_rates() {
        // undriven rotor at a few rad/s next to a cavity at ~10⁷ rad/s
        let mut p = PhysicalParams::figure1();
        p.kappa_l = 0.0;
        p.delta = 20.0 * p.gamma;
        p.d_theta *= 0.1;
        let report = routh_hurwitz(&drift_of(&p));
        assert!(report.stable, "{:?}", report.relative_margins);
        p.d_theta = 0.0;
        assert!(!stable_routh_hurwitz(&drift_of(&p)));
    }

    #[test]
    fn stability_examples() {
        let p = PhysicalParams::figure1();
        assert!(stable_routh_hurwitz(&drift_of(&p)));
        let mut undamped = p;
        undamped.d_theta = 0.0;
        assert!(!stable_routh_hurwitz(&drift_of(&undamped)));
        let mut anti = p;
        anti.u0 = -hz(100.0);
        assert!(!stable_routh_hurwitz(&drift_of(&anti)));
    }

    #[test]
    fn eigenvalue_examples() {
        let mut p = PhysicalParams::figure1();
        p.kappa_l = 0.0;
        p.d_theta = 0.0;
        let rotor = build_rotor(&p).unwrap();
        let ev = eigenvalues(&drift_of(&p)).unwrap();
        // ±iω_θ first (real part 0), then the doubly degenerate -γ
        assert!(ev[0].re.abs() < 1e-9 && ev[1].re.abs() < 1e-9);
        let mut ims = [ev[0].im, ev[1].im];
        ims.sort_by(f64::total_cmp);
        assert!((ims[1] - rotor.omega_theta).abs() < 1e-9 * rotor.omega_theta);
        assert!((ims[0] + rotor.omega_theta).abs() < 1e-9 * rotor.omega_theta);
        for e in &ev[2..] {
            assert!((e.re + p.gamma).abs() < 1e-9 * p.gamma && e.im.abs() < 1e-6);
        }

        let mut p = PhysicalParams::figure1();
        p.delta = 1.7 * p.gamma;
        let f = fixture(p);
        let ev = eigenvalues(&build_drift(&f.p, &f.rotor, &f.steady.field())).unwrap();
        let alpha = p.d_theta / f.rotor.inertia_i;
        // rotor pair: -α/2 ± i sqrt(ω_eff² - α²/4)
        let wd = (f.steady.omega_eff.powi(2) - alpha * alpha / 4.0).sqrt();
        let rotor_pair: Vec<_> = ev.iter().filter(|e| e.re > -1.0).collect();
        assert_eq!(rotor_pair.len(), 2);
        for e in rotor_pair {
            assert!((e.re + alpha / 2.0).abs() < 1e-9 * f.steady.omega_eff, "{e}");
            assert!((e.im.abs() - wd).abs() < 1e-9 * wd);
        }
        let cavity: Vec<_> = ev.iter().filter(|e| e.re < -1.0).collect();
        for e in cavity {
            assert!((e.re + p.gamma).abs() < 1e-9 * p.gamma);
            assert!((e.im.abs() - p.delta).abs() < 1e-9 * p.delta);
        }
    }

    #[test]
    fn susceptibility_limits() {
        let f = fixture(PhysicalParams::figure1());
        let (i, w) = (f.rotor.inertia_i, f.steady.omega_eff);
        let chi0 = susceptibility(0.0, &f.p, &f.rotor, &f.steady).unwrap();
        assert!((chi0.re - 1.0 / (i * w * w)).abs() < 1e-15 * chi0.re && chi0.im == 0.0);
        let res = susceptibility(w, &f.p, &f.rotor, &f.steady).unwrap();
        assert!((res.norm() - 1.0 / (f.p.d_theta * w)).abs() < 1e-6 * res.norm());
        let far = susceptibility(100.0 * w, &f.p, &f.rotor, &f.steady).unwrap();
        let asym = -1.0 / (i * (100.0 * w).powi(2));
        assert!(((far.re - asym) / asym).abs() < 1e-3);

        let mut undamped = f.p;
        undamped.d_theta = 0.0;
        assert!(matches!(
            susceptibility(w, &undamped, &f.rotor, &f.steady),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn chi_squared_is_even() {
        let f = fixture(PhysicalParams::figure1());
        for k in 0..50 {
            let w = k as f64 * 1234.5;
            let a = susceptibility(w, &f.p, &f.rotor, &f.steady).unwrap().norm_sqr();
            let b = susceptibility(-w, &f.p, &f.rotor, &f.steady).unwrap().norm_sqr();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn epsilon_spectrum_values() {
        let kt = thermal_frequency(5e-10).unwrap();
        assert!((noise_spectrum_epsilon(0.0, 0.7, 5e-10).unwrap() - 1.4 * kt).abs() < 1e-12 * kt);
        assert_eq!(noise_spectrum_epsilon(-3.0, 0.7, 0.0).unwrap(), 0.0);
        assert!((noise_spectrum_epsilon(3.0, 0.7, 0.0).unwrap() - 4.2).abs() < 1e-15);
        // ω = k_BT/ħ: ω(1 + coth ½) = 207.1
        let s = noise_spectrum_epsilon(kt, 1.0, 5e-10).unwrap();
        let expect = kt * (1.0 + 1.0 / 0.5f64.tanh());
        assert!((s - expect).abs() < 1e-12 * expect);
        assert!((s - 207.1).abs() < 0.1, "{s}");
    }

    #[test]
    fn epsilon_detailed_balance_identity() {
        for t in [0.0, 1e-10, 5e-10, 2e-6] {
            for w in [1e-9, 1e-3, 0.3, 17.0, 4e4, 1e7] {
                let d = 0.37;
                let diff = noise_spectrum_epsilon(w, d, t).unwrap() - noise_spectrum_epsilon(-w, d, t).unwrap();
                assert!((diff - 2.0 * d * w).abs() <= 1e-9 * (2.0 * d * w).max(noise_spectrum_epsilon(w, d, t).unwrap()));
            }
        }
    }

    #[test]
    fn coth_series_joins_smoothly() {
        let kt = 10.0;
        let x = 1e-4 * 2.0 * kt;
        let below = omega_coth(x * 0.999_999, kt);
        let above = omega_coth(x * 1.000_001, kt);
        assert!((below - above).abs() < 1e-12 * below);
    }

    #[test]
    fn theta_spectrum_vanishes_with_damping() {
        let f = fixture(PhysicalParams::figure1());
        let w = 0.5 * f.steady.omega_eff;
        let mut prev = f64::INFINITY;
        for d in [1e-2, 1e-3, 1e-4] {
            let mut p = f.p;
            p.d_theta = d;
            let s = theta_spectrum(w, &p, &f.rotor, &f.steady).unwrap();
            assert!(s < prev);
            prev = s;
        }
        let mut p = f.p;
        p.d_theta = 1e-4;
        let s1 = theta_spectrum(w, &p, &f.rotor, &f.steady).unwrap();
        p.d_theta = 1e-5;
        let s2 = theta_spectrum(w, &p, &f.rotor, &f.steady).unwrap();
        assert!((s1 / s2 - 10.0).abs() < 1e-3);
    }

    #[test]
    fn quadrature_examples() {
        let mut p = PhysicalParams::figure1();
        let g = p.gamma;
        let q = quadrature_response(0.0, &p);
        assert!((q.t_self.re - (2.0 / g).sqrt()).abs() < 1e-15 && q.t_cross.norm() == 0.0);
        for w in [0.0, 0.3 * g, g, 7.0 * g] {
            let q = quadrature_response(w, &p);
            let expect = g / (g * g + w * w);
            assert!((q.s_x1 - expect).abs() < 1e-12 * expect);
            assert_eq!(q.s_x1, q.s_x2);
        }
        p.delta = 2.0 * g;
        let a = quadrature_response(1e3 * g, &p).s_x1;
        let b = quadrature_response(2e3 * g, &p).s_x1;
        assert!((a / b - 4.0).abs() < 1e-2);
    }
}
