//! Radial wave evolution on ℍ³ and ℝ³ in the substituted variable
//! `w = warp(r) u`, by velocity Verlet with Dirichlet walls at both ends.

mod energy;
mod equation;
mod evolve;
mod reduced;
mod state;
mod strichartz;

pub use energy::{energy, energy_norm, energy_norm_distance, spectral_constant, EnergyRecord};
pub use equation::{EquationSpec, Nonlinearity, PotentialProfile, PotentialSpec};
pub use evolve::{
    channel, evolve, evolve_with, free_evolve, required_radius, step, Diagnostics, SolverOptions,
    Trajectory, DEFAULT_CFL, SUPPORT_TOLERANCE,
};
pub use state::{make_state, DataSpec, Generator, State, EDGE_TOLERANCE};
pub use strichartz::{
    admissible_gamma, duhamel_tail, equation_residual, scattering_data, scattering_defect,
    strichartz_accumulate, strichartz_running, trajectory_compare, Admissible, AdmissibleBranch,
    CompareRecord,
};

pub(crate) use evolve::{propagate, propagate_steps};
