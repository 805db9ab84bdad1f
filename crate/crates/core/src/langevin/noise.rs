//! Gaussian noise with a prescribed spectral density, synthesized by shaping
//! white noise in the frequency domain.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Independent, reproducible random stream for trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Real stationary Gaussian sequence of `n_samples` values spaced by `dt`
/// whose two-sided spectral density is S_sym(ω) = [S(ω) + S(−ω)]/2 on the
/// resolved band |ω| ≤ π/dt.
///
/// The sequence is one period of a circular process: sample k of the
/// spectrum gets variance S_sym(ω_k)·n/dt, so the per-sample variance equals
/// ∫ S_sym dω/2π over the band.
pub fn generate_colored_noise<F>(spectrum: F, dt: f64, n_samples: usize, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_colored_noise_with(spectrum, dt, n_samples, &mut rng)
}

pub fn generate_colored_noise_with<F, R>(spectrum: F, dt: f64, n_samples: usize, rng: &mut R) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    if n_samples < 2 || !n_samples.is_power_of_two() {
        return Err(Error::Config(format!("n_samples must be a power of two >= 2, got {n_samples}")));
    }
    if !(dt > 0.0) {
        return Err(Error::Config(format!("dt must be > 0, got {dt}")));
    }
    let n = n_samples;
    let d_omega = std::f64::consts::TAU / (n as f64 * dt);
    let scale = n as f64 / dt;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..=n / 2 {
        let w = k as f64 * d_omega;
        let s = 0.5 * (spectrum(w) + spectrum(-w));
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("spectrum must be finite and >= 0, got {s} at omega = {w}")));
        }
        let amp = (s * scale).sqrt();
        if k == 0 || k == n / 2 {
            let g: f64 = rng.sample(StandardNormal);
            buf[k] = Complex64::new(amp * g, 0.0);
        } else {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re, im) * (amp * std::f64::consts::FRAC_1_SQRT_2);
            buf[k] = z;
            buf[n - k] = z.conj();
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf.iter().map(|z| z.re / n as f64).collect())
}
