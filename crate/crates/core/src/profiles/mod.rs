//! Concentration and translation operators, profile data, the ν functional
//! and the profile experiments.

mod concentrate;
mod decomposition;
mod experiments;
mod extraction;

pub use concentrate::{companion_grid, q_m_regularize, rescale_to, t_lambda, MIN_BUMP_NODES};
pub use decomposition::{
    orthogonal_superposition, orthogonality, pythagorean_check, scale_ratio_measure,
    space_time_measure, superpose, Alternative, Orthogonality, ProfileKind, ProfileSequence,
    ProfileSpec, Superposition,
};
pub use experiments::{
    euclidean_approx_row, euclidean_reference, translated_potential_sq_norm, traveling_forcing,
    EuclideanApproxConfig, EuclideanApproxRow, TravelingForcingConfig, FORCING_MAX_H,
    FORCING_MAX_SAMPLE_DT,
};
pub use extraction::{extract_profiles, nu_functional, nu_over_states, NuRecord, BAND_FACTOR};
