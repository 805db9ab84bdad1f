//! Line-oriented `key = value` parameter files.
//!
//! Frequencies are given in plain Hz (keys ending in `_hz`) and converted to
//! rad/s once, in [`ParamSpec::resolve`]. Keys that are not set fall back to
//! [`PhysicalParams::figure1`]; an unset `d_theta` falls back to the default
//! damping of the resolved parameter set.

use crate::error::{Error, Result};
use crate::params::{hz, quadratic_zeeman, PhysicalParams, GAUSS_PER_TESLA};

pub const KNOWN_KEYS: [&str; 12] = [
    "c2_hz",
    "q_hz",
    "b_field_gauss",
    "delta_hf_hz",
    "n_atoms",
    "u0_hz",
    "gamma_hz",
    "kappa_l_hz",
    "delta_hz",
    "delta_over_gamma",
    "d_theta",
    "temperature_k",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeemanSpec {
    Hz(f64),
    Field {
        b_field_gauss: Option<f64>,
        delta_hf_hz: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetuningSpec {
    Hz(f64),
    OverGamma(f64),
}

/// Partially specified parameters as read from a file and the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSpec {
    pub c2_hz: Option<f64>,
    pub zeeman: Option<ZeemanSpec>,
    pub n_atoms: Option<u64>,
    pub u0_hz: Option<f64>,
    pub gamma_hz: Option<f64>,
    pub kappa_l_hz: Option<f64>,
    pub detuning: Option<DetuningSpec>,
    pub d_theta: Option<f64>,
    pub temperature_k: Option<f64>,
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}' as a number")))
}

impl ParamSpec {
    /// Parses a whole config file. Unknown keys, duplicate keys and mixed
    /// alternatives (`q_hz` with a field, `delta_hz` with `delta_over_gamma`)
    /// are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ParamSpec::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
            let clash = match key {
                "q_hz" => seen.iter().any(|k| k == "b_field_gauss" || k == "delta_hf_hz"),
                "b_field_gauss" | "delta_hf_hz" => seen.iter().any(|k| k == "q_hz"),
                "delta_hz" => seen.iter().any(|k| k == "delta_over_gamma"),
                "delta_over_gamma" => seen.iter().any(|k| k == "delta_hz"),
                _ => false,
            };
            if clash {
                return Err(Error::Config(format!(
                    "line {}: '{key}' conflicts with an alternative key already given",
                    lineno + 1
                )));
            }
            spec.set(key, value.trim())
                .map_err(|e| match e {
                    Error::Config(m) => Error::Config(format!("line {}: {m}", lineno + 1)),
                    other => other,
                })?;
            seen.push(key.to_string());
        }
        Ok(spec)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key. Setting one alternative of a group replaces the other,
    /// which is what command-line overrides need.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "c2_hz" => self.c2_hz = Some(parse_f64(key, value)?),
            "q_hz" => self.zeeman = Some(ZeemanSpec::Hz(parse_f64(key, value)?)),
            "b_field_gauss" | "delta_hf_hz" => {
                let v = parse_f64(key, value)?;
                let (mut b, mut d) = match self.zeeman {
                    Some(ZeemanSpec::Field {
                        b_field_gauss,
                        delta_hf_hz,
                    }) => (b_field_gauss, delta_hf_hz),
                    _ => (None, None),
                };
                if key == "b_field_gauss" {
                    b = Some(v);
                } else {
                    d = Some(v);
                }
                self.zeeman = Some(ZeemanSpec::Field {
                    b_field_gauss: b,
                    delta_hf_hz: d,
                });
            }
            "n_atoms" => {
                let n = value.trim().parse::<u64>().map_err(|_| {
                    Error::Config(format!("n_atoms: cannot parse '{value}' as a positive integer"))
                })?;
                self.n_atoms = Some(n);
            }
            "u0_hz" => self.u0_hz = Some(parse_f64(key, value)?),
            "gamma_hz" => self.gamma_hz = Some(parse_f64(key, value)?),
            "kappa_l_hz" => self.kappa_l_hz = Some(parse_f64(key, value)?),
            "delta_hz" => self.detuning = Some(DetuningSpec::Hz(parse_f64(key, value)?)),
            "delta_over_gamma" => {
                self.detuning = Some(DetuningSpec::OverGamma(parse_f64(key, value)?))
            }
            "d_theta" => self.d_theta = Some(parse_f64(key, value)?),
            "temperature_k" => self.temperature_k = Some(parse_f64(key, value)?),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies every key set in `other` on top of `self`.
    pub fn merge(&mut self, other: &ParamSpec) {
        macro_rules! take {
            ($($f:ident),*) => {$( if other.$f.is_some() { self.$f = other.$f; } )*};
        }
        take!(c2_hz, zeeman, n_atoms, u0_hz, gamma_hz, kappa_l_hz, detuning, d_theta, temperature_k);
    }

    /// Converts to canonical units, filling gaps from the figure preset.
    pub fn resolve(&self) -> Result<PhysicalParams> {
        let base = PhysicalParams::figure1();
        let mut p = base;
        if let Some(c2) = self.c2_hz {
            p.c2 = hz(c2);
            // keep the preset q/c2 ratio when only c2 is given
            p.q = p.c2 * (base.q / base.c2);
        }
        match self.zeeman {
            Some(ZeemanSpec::Hz(q)) => p.q = hz(q),
            Some(ZeemanSpec::Field {
                b_field_gauss: Some(b),
                delta_hf_hz: Some(d),
            }) => p.q = quadratic_zeeman(b / GAUSS_PER_TESLA, hz(d))?,
            Some(ZeemanSpec::Field { .. }) => {
                return Err(Error::Config(
                    "b_field_gauss and delta_hf_hz must be given together".into(),
                ))
            }
            None => {}
        }
        if let Some(n) = self.n_atoms {
            p.n_atoms = n;
        }
        if let Some(u0) = self.u0_hz {
            p.u0 = hz(u0);
        }
        if let Some(g) = self.gamma_hz {
            p.gamma = hz(g);
        }
        if let Some(k) = self.kappa_l_hz {
            p.kappa_l = hz(k);
        }
        match self.detuning {
            Some(DetuningSpec::Hz(d)) => p.delta = hz(d),
            Some(DetuningSpec::OverGamma(r)) => p.delta = r * p.gamma,
            None => {}
        }
        if let Some(t) = self.temperature_k {
            p.temperature = t;
        }
        // the default damping depends on c2, q and N, so resolve it last
        p.d_theta = 0.0;
        if p.n_atoms >= 2 && p.c2 > 0.0 && p.q > 0.0 {
            p.d_theta = p.default_d_theta();
        }
        if let Some(d) = self.d_theta {
            p.d_theta = d;
        }
        p.validate()?;
        Ok(p)
    }

    /// `key = value` lines describing `params` in the file's own units.
    pub fn describe(params: &PhysicalParams) -> Vec<(String, String)> {
        let f = |x: f64| format!("{x:.16e}");
        vec![
            ("c2_hz".into(), f(params.c2 / crate::params::TWO_PI)),
            ("q_hz".into(), f(params.q / crate::params::TWO_PI)),
            ("n_atoms".into(), params.n_atoms.to_string()),
            ("u0_hz".into(), f(params.u0 / crate::params::TWO_PI)),
            ("gamma_hz".into(), f(params.gamma / crate::params::TWO_PI)),
            ("kappa_l_hz".into(), f(params.kappa_l / crate::params::TWO_PI)),
            ("delta_hz".into(), f(params.delta / crate::params::TWO_PI)),
            ("d_theta".into(), f(params.d_theta)),
            ("temperature_k".into(), f(params.temperature)),
        ]
    }
}
