//! Cavity optomechanics of the spin-nematic rotor in a spin-1 antiferromagnetic
//! condensate: the rotor mapping, steady states, linear stability and
//! fluctuation spectra, second-moment dynamics, and nonlinear Langevin
//! trajectories.
//!
//! Units: ħ = 1 and every frequency, rate or energy is in rad/s. The moment
//! of inertia I = N/c₂ is in seconds; θ and L_z are dimensionless.

pub mod error;
pub mod params;
pub mod config;
pub mod rotor;
pub mod spinor;
pub mod steady;
pub mod linear;
pub mod moments;
pub mod langevin;
pub mod cli;

pub use error::{Error, Result};
pub use params::PhysicalParams;
pub use rotor::{build_rotor, RotorModel};
pub use steady::{solve_steady_state, CavityField, SteadyState};
