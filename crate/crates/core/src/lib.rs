//! Numerical lab for radial waves on hyperbolic 3-space.
//!
//! The crate is organised bottom-up: [`geom`] (grids, norms, distances),
//! [`heatlp`] (heat flow and Littlewood–Paley pieces), [`solver`] (radial
//! wave evolution), [`diagnostics`] (multipliers, Morawetz and decay
//! measurements) and [`profiles`] (concentration operators and profile
//! experiments). [`experiments`] wraps them into named, reportable runs and
//! [`acceptance`] groups those into the acceptance criteria.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod geom;
pub mod heatlp;
pub mod profiles;
pub mod quad;
pub mod report;
pub mod solver;
pub mod tridiag;

pub use error::{HypError, Result};
pub use geom::{
    geodesic_distance, lp_norm, make_radial_grid, radial_laplacian, translate_eval, volume_weight,
    Curvature, Geometry, RadialField, RadialGrid, Representation,
};
