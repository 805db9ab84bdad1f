//! Segment-averaged periodograms (Welch's method).
//!
//! Estimates are two-sided densities in the ∫ S dω/2π = variance convention,
//! reported for 0 ≤ ω ≤ π/dt.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    None,
    /// Raised-cosine (Hann) taper.
    #[default]
    CosineTaper,
}

impl Window {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::None => vec![1.0; n],
            Window::CosineTaper => (0..n)
                .map(|i| {
                    let s = (std::f64::consts::PI * i as f64 / n as f64).sin();
                    s * s
                })
                .collect(),
        }
    }
}

/// Mergeable accumulator of windowed periodograms.
#[derive(Clone)]
pub struct Welch {
    seg_len: usize,
    dt: f64,
    window: Vec<f64>,
    window_power: f64,
    fft: Arc<dyn Fft<f64>>,
    sum: Vec<f64>,
    segments: usize,
}

impl std::fmt::Debug for Welch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Welch")
            .field("seg_len", &self.seg_len)
            .field("dt", &self.dt)
            .field("segments", &self.segments)
            .finish()
    }
}

impl Welch {
    pub fn new(seg_len: usize, dt: f64, window: Window) -> Self {
        let window = window.coefficients(seg_len);
        let window_power = window.iter().map(|w| w * w).sum();
        Welch {
            seg_len,
            dt,
            window,
            window_power,
            fft: FftPlanner::new().plan_fft_forward(seg_len),
            sum: vec![0.0; seg_len / 2 + 1],
            segments: 0,
        }
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    /// Adds one segment; `x` must hold exactly `seg_len` samples.
    pub fn add_segment(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.seg_len, "segment length mismatch");
        let mut buf: Vec<Complex64> = x
            .iter()
            .zip(&self.window)
            .map(|(&v, &w)| Complex64::new(v * w, 0.0))
            .collect();
        self.fft.process(&mut buf);
        let norm = self.dt / self.window_power;
        for (acc, z) in self.sum.iter_mut().zip(&buf) {
            *acc += norm * z.norm_sqr();
        }
        self.segments += 1;
    }

    /// Adds all half-overlapping segments of `x`; returns how many fit.
    pub fn add_series(&mut self, x: &[f64]) -> usize {
        let hop = (self.seg_len / 2).max(1);
        let mut added = 0;
        let mut start = 0;
        while start + self.seg_len <= x.len() {
            self.add_segment(&x[start..start + self.seg_len]);
            start += hop;
            added += 1;
        }
        added
    }

    /// Number of half-overlapping segments a series of `len` samples yields.
    pub fn segment_count(&self, len: usize) -> usize {
        if len < self.seg_len {
            0
        } else {
            (len - self.seg_len) / (self.seg_len / 2).max(1) + 1
        }
    }

    pub fn merge(mut self, other: Welch) -> Welch {
        assert_eq!(self.seg_len, other.seg_len);
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        self.segments += other.segments;
        self
    }

    pub fn estimate(&self) -> PsdEstimate {
        let n = self.seg_len;
        let d_omega = std::f64::consts::TAU / (n as f64 * self.dt);
        let denom = self.segments.max(1) as f64;
        PsdEstimate {
            omega: (0..=n / 2).map(|k| k as f64 * d_omega).collect(),
            psd: self.sum.iter().map(|s| s / denom).collect(),
            segments: self.segments,
            seg_len: n,
            dt: self.dt,
        }
    }
}

/// Averaged periodogram on the non-negative frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub omega: Vec<f64>,
    pub psd: Vec<f64>,
    pub segments: usize,
    pub seg_len: usize,
    pub dt: f64,
}

impl PsdEstimate {
    /// ∫ S dω/2π over the two-sided band, using the evenness of the estimate.
    pub fn variance(&self) -> f64 {
        let n = self.psd.len();
        let inner: f64 = self.psd[1..n - 1].iter().sum();
        (self.psd[0] + 2.0 * inner + self.psd[n - 1]) / (self.seg_len as f64 * self.dt)
    }

    /// Index of the largest value, ignoring ω = 0.
    pub fn peak_index(&self) -> usize {
        (1..self.psd.len())
            .max_by(|&a, &b| self.psd[a].total_cmp(&self.psd[b]))
            .unwrap_or(0)
    }
}

/// Checks that a series of `len` samples supports at least two segments.
pub fn require_two_segments(len: usize, seg_len: usize) -> Result<()> {
    if seg_len < 4 || !seg_len.is_power_of_two() {
        return Err(Error::Config(format!("segment length must be a power of two >= 4, got {seg_len}")));
    }
    let hop = seg_len / 2;
    if len < seg_len + hop {
        return Err(Error::Config(format!(
            "{len} samples after the transient give fewer than 2 segments of {seg_len}"
        )));
    }
    Ok(())
}
