//! Stochastic trajectories, colored-noise synthesis and spectral estimation.

pub mod noise;
pub mod psd;
pub mod sim;

pub use noise::{generate_colored_noise, generate_colored_noise_with, trajectory_rng};
pub use psd::{require_two_segments, PsdEstimate, Welch, Window};
pub use sim::{
    ensemble_theta_psd, integrate_trajectory, max_sim_step, simulate_ensemble, simulate_theta_psd,
    simulate_theta_variance, transient_time, InitialCondition, NoiseMode, SimConfig, Simulator,
    TrajectoryRecord,
};
