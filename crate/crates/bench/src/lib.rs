//! Shared fixtures for the benchmarks.

use hypwave_core::solver::{make_state, DataSpec, EquationSpec, Generator, State};
use hypwave_core::{make_radial_grid, Geometry, RadialField, RadialGrid};

pub fn hyperbolic_grid(r_max: f64, h: f64) -> RadialGrid {
    make_radial_grid(Geometry::hyperbolic(), r_max, h).expect("valid grid")
}

pub fn gaussian(grid: RadialGrid, width: f64) -> RadialField {
    RadialField::from_fn(grid, |r| (-(r / width).powi(2)).exp())
}

/// Unit gaussian position data on `grid` for `equation`.
pub fn gaussian_state(grid: &RadialGrid, equation: &EquationSpec) -> State {
    make_state(
        &DataSpec::position(Generator::gaussian(1.0, 1.0)),
        equation,
        grid,
    )
    .expect("valid data")
}
