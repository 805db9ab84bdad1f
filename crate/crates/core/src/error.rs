use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Negative radicand in the enhancement factor: the intracavity light
    /// pushes the rotor away from the pole instead of trapping it.
    #[error("anti-trapping: enhancement radicand {radicand:.6e} is negative")]
    AntiTrapping { radicand: f64 },

    #[error("susceptibility pole at omega = {omega:.6e} rad/s")]
    Pole { omega: f64 },

    #[error("unstable: drift matrix fails the Routh-Hurwitz test")]
    Unstable,

    /// Outside the harmonic-rotor window; raised only on request.
    #[error("out of regime: {0}")]
    Regime(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("trajectory diverged at step {step}")]
    Divergence { step: u64 },
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParams(_) | Error::Domain(_) | Error::Resource(_) => 1,
            Error::AntiTrapping { .. } | Error::Unstable | Error::Regime(_) => 2,
            Error::Pole { .. } | Error::Numerical(_) | Error::Divergence { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
