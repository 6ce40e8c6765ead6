use crate::error::{invalid, HypError, Result};
use crate::geom::{smooth_cutoff, Curvature, Geometry, RadialField, RadialGrid};
use crate::heatlp::heat_evolve_euclidean;
use crate::solver::{EquationSpec, State};

/// Minimum number of hyperbolic nodes across a concentrated bump.
pub const MIN_BUMP_NODES: f64 = 64.0;

/// Relative level defining the extent of a bump for the resolution guard.
const BUMP_LEVEL: f64 = 1e-3;

/// Euclidean grid with spacing `λh` and the node count of `grid`, so that
/// node `j` of the result sits at `λ` times node `j` of `grid`.
pub fn companion_grid(grid: &RadialGrid, lambda: f64) -> Result<RadialGrid> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("{lambda} must be >= 1")));
    }
    let h = lambda * grid.h;
    Ok(RadialGrid {
        geometry: Geometry::euclidean(),
        r_max: grid.intervals as f64 * h,
        h,
        intervals: grid.intervals,
    })
}

/// `𝒬_M(f, g) = (χ_√M e^{Δ/M} f, χ_√M e^{Δ/M} g)` with `χ_√M(r) = χ(r/√M)`.
pub fn q_m_regularize(data: &State, m: f64) -> Result<State> {
    if data.grid().geometry.kind != Curvature::Euclidean {
        return Err(invalid("data", "expected a euclidean pair"));
    }
    if !(m >= 1.0 && m.is_finite()) {
        return Err(invalid("M", format!("{m} must be >= 1")));
    }
    let root = m.sqrt();
    let cut = |f: &RadialField| -> Result<RadialField> {
        let mut smooth = heat_evolve_euclidean(f, 1.0 / m)?;
        let grid = *smooth.grid();
        for (j, v) in smooth.values_mut().iter_mut().enumerate() {
            *v *= smooth_cutoff(grid.r(j) / root);
        }
        Ok(smooth)
    };
    State::new(
        cut(data.u())?,
        cut(data.ut())?,
        data.time(),
        data.equation().clone(),
    )
}

/// `𝒯_λ(f, g)(r) = (λ^{1/2} (𝒬_λ f)(λr), λ^{3/2} (𝒬_λ g)(λr))` sampled on the
/// hyperbolic `grid`.
pub fn t_lambda(
    data: &State,
    lambda: f64,
    grid: &RadialGrid,
    equation: &EquationSpec,
) -> Result<State> {
    if grid.geometry.kind != Curvature::Hyperbolic {
        return Err(invalid("grid", "the target grid must be hyperbolic"));
    }
    let q = q_m_regularize(data, lambda)?;
    let extent = q.support_radius(BUMP_LEVEL) / lambda;
    let nodes = extent / grid.h;
    if nodes < MIN_BUMP_NODES {
        return Err(HypError::Resolution(format!(
            "bump of radius {extent:.3e} spans {nodes:.1} nodes at h = {:.3e}; need {MIN_BUMP_NODES}",
            grid.h
        )));
    }
    let sample = |f: &RadialField, power: f64| {
        let c = lambda.powf(power);
        RadialField::from_fn(*grid, |r| c * f.eval(lambda * r))
    };
    State::new(
        sample(q.u(), 0.5),
        sample(q.ut(), 1.5),
        0.0,
        equation.clone(),
    )
}

/// Rescaled sampling without regularization:
/// `(λ^{1/2} f(λr), λ^{3/2} g(λr))`. Used for euclidean solutions that were
/// already regularized at time zero.
pub fn rescale_to(
    state: &State,
    lambda: f64,
    grid: &RadialGrid,
    equation: &EquationSpec,
) -> Result<State> {
    let a = lambda.sqrt();
    let b = lambda * a;
    let u = RadialField::from_fn(*grid, |r| a * state.u().eval(lambda * r));
    let ut = RadialField::from_fn(*grid, |r| b * state.ut().eval(lambda * r));
    State::new(u, ut, state.time() / lambda, equation.clone())
}
