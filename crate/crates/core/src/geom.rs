//! Radial geometry: grids, fields, weights, norms, distances and the radial
//! Laplacian on hyperbolic 3-space and on euclidean 3-space.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, HypError, Result};
use crate::quad::gl32_composite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Hyperbolic,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub kind: Curvature,
    pub dimension: u32,
    /// Constant added to -Δ; shifts the bottom of the spectrum.
    pub mass_shift: f64,
}

impl Geometry {
    pub fn hyperbolic() -> Self {
        Self {
            kind: Curvature::Hyperbolic,
            dimension: 3,
            mass_shift: 0.0,
        }
    }

    pub fn euclidean() -> Self {
        Self {
            kind: Curvature::Euclidean,
            dimension: 3,
            mass_shift: 0.0,
        }
    }

    pub fn with_mass_shift(mut self, mu: f64) -> Self {
        self.mass_shift = mu;
        self
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kind == Curvature::Hyperbolic
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(invalid("dimension", "must be at least 2"));
        }
        if !self.mass_shift.is_finite() {
            return Err(invalid("mass_shift", "must be finite"));
        }
        let gap = 0.25 * ((self.dimension - 1) as f64).powi(2);
        match self.kind {
            Curvature::Hyperbolic if self.mass_shift <= -gap => Err(invalid(
                "mass_shift",
                format!("must exceed -(d-1)²/4 = {}", -gap),
            )),
            Curvature::Euclidean if self.mass_shift < 0.0 => {
                Err(invalid("mass_shift", "must be >= 0 on euclidean space"))
            }
            _ => Ok(()),
        }
    }

    /// Time-dependent solvers run in three dimensions only.
    pub fn require_solver_dimension(&self) -> Result<()> {
        self.validate()?;
        if self.dimension != 3 {
            return Err(invalid("dimension", "time-dependent solvers need d = 3"));
        }
        Ok(())
    }

    /// The radial warp `sinh r` (hyperbolic) or `r` (euclidean).
    #[inline]
    pub fn warp(&self, r: f64) -> f64 {
        match self.kind {
            Curvature::Hyperbolic => r.sinh(),
            Curvature::Euclidean => r,
        }
    }

    /// `warp'(r) / warp(r)`, i.e. `coth r` or `1/r`.
    #[inline]
    pub fn log_warp_derivative(&self, r: f64) -> f64 {
        match self.kind {
            Curvature::Hyperbolic => 1.0 / r.tanh(),
            Curvature::Euclidean => 1.0 / r,
        }
    }

    /// Mass felt by `w = warp * u` in the one dimensional reduction (d = 3).
    #[inline]
    pub fn reduced_mass(&self) -> f64 {
        match self.kind {
            Curvature::Hyperbolic => 1.0 + self.mass_shift,
            Curvature::Euclidean => self.mass_shift,
        }
    }
}

/// Radial volume density: the measure is `volume_weight(r) dr`. In three
/// dimensions the sphere area 4π is included; otherwise the bare
/// `sinh^{d-1} r` (or `r^{d-1}`) is returned.
pub fn volume_weight(geometry: &Geometry, r: f64) -> f64 {
    let s = geometry.warp(r);
    if geometry.dimension == 3 {
        4.0 * PI * s * s
    } else {
        s.powi(geometry.dimension as i32 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub geometry: Geometry,
    pub r_max: f64,
    pub h: f64,
    /// Number of intervals; the grid has `intervals + 1` nodes.
    pub intervals: usize,
}

pub const MIN_INTERVALS: usize = 16;

pub fn make_radial_grid(geometry: Geometry, r_max: f64, h: f64) -> Result<RadialGrid> {
    geometry.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(HypError::InvalidGrid(format!(
            "spacing h = {h} must be positive"
        )));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(HypError::InvalidGrid(format!(
            "r_max = {r_max} must be positive"
        )));
    }
    let n = (r_max / h).round();
    if (n * h - r_max).abs() > 1e-9 * r_max.max(1.0) {
        return Err(HypError::InvalidGrid(format!(
            "r_max / h = {} is not an integer",
            r_max / h
        )));
    }
    let n = n as usize;
    if n < MIN_INTERVALS {
        return Err(HypError::InvalidGrid(format!(
            "{n} intervals, need at least {MIN_INTERVALS}"
        )));
    }
    Ok(RadialGrid {
        geometry,
        r_max: n as f64 * h,
        h,
        intervals: n,
    })
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn r(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.r(j)).collect()
    }

    pub fn volume_weight(&self, j: usize) -> f64 {
        volume_weight(&self.geometry, self.r(j))
    }

    pub fn warps(&self) -> Vec<f64> {
        (0..self.len())
            .map(|j| self.geometry.warp(self.r(j)))
            .collect()
    }

    /// Trapezoid weights for `∫ g dμ`, including the volume density.
    pub fn measure_weights(&self) -> Vec<f64> {
        let mut w: Vec<f64> = (0..self.len())
            .map(|j| volume_weight(&self.geometry, self.r(j)) * self.h)
            .collect();
        w[0] *= 0.5;
        w[self.intervals] *= 0.5;
        w
    }

    /// Same geometry with the mass shift replaced.
    pub fn with_geometry(&self, geometry: Geometry) -> RadialGrid {
        RadialGrid { geometry, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Values of `u` itself.
    Physical,
    /// Values of `w = warp(r) u`.
    Substituted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
    repr: Representation,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>, repr: Representation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "non-finite sample"));
        }
        if repr == Representation::Substituted && values[0] != 0.0 {
            return Err(invalid("values", "substituted field must vanish at r = 0"));
        }
        Ok(Self { grid, values, repr })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.r(j))).collect();
        Self {
            grid,
            values,
            repr: Representation::Physical,
        }
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            repr: Representation::Physical,
        }
    }

    pub(crate) fn from_raw(grid: RadialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid,
            values,
            repr: Representation::Physical,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn to_substituted(&self) -> RadialField {
        match self.repr {
            Representation::Substituted => self.clone(),
            Representation::Physical => {
                let mut values: Vec<f64> = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(j, u)| self.grid.geometry.warp(self.grid.r(j)) * u)
                    .collect();
                values[0] = 0.0;
                RadialField {
                    grid: self.grid,
                    values,
                    repr: Representation::Substituted,
                }
            }
        }
    }

    /// Recovers `u` from `w`; the origin value uses the even extension,
    /// `u0 = (4 u1 - u2) / 3`.
    pub fn to_physical(&self) -> RadialField {
        match self.repr {
            Representation::Physical => self.clone(),
            Representation::Substituted => RadialField {
                grid: self.grid,
                values: physical_from_substituted(&self.grid, &self.values),
                repr: Representation::Physical,
            },
        }
    }

    /// Linear interpolation of the physical field; zero beyond `r_max`.
    pub fn eval(&self, r: f64) -> f64 {
        let u = if self.repr == Representation::Physical {
            &self.values
        } else {
            return self.to_physical().eval(r);
        };
        interpolate(&self.grid, u, r)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> RadialField {
        RadialField {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
            repr: self.repr,
        }
    }

    /// Pointwise `self + c * other`; both fields must share grid and representation.
    pub fn axpy(&self, c: f64, other: &RadialField) -> Result<RadialField> {
        if self.grid != other.grid {
            return Err(invalid("other", "grid mismatch"));
        }
        let other = match (self.repr, other.repr) {
            (a, b) if a == b => other.clone(),
            (Representation::Physical, _) => other.to_physical(),
            (Representation::Substituted, _) => other.to_substituted(),
        };
        Ok(RadialField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
            repr: self.repr,
        })
    }

    /// Largest radius where `|u|` exceeds `rel_tol * max |u|`.
    pub fn support_radius(&self, rel_tol: f64) -> f64 {
        let u = self.to_physical();
        let cut = rel_tol * u.max_abs();
        u.values
            .iter()
            .rposition(|v| v.abs() > cut)
            .map_or(0.0, |j| self.grid.r(j))
    }
}

pub(crate) fn physical_from_substituted(grid: &RadialGrid, w: &[f64]) -> Vec<f64> {
    let mut u = vec![0.0; w.len()];
    for j in 1..w.len() {
        u[j] = w[j] / grid.geometry.warp(grid.r(j));
    }
    u[0] = (4.0 * u[1] - u[2]) / 3.0;
    u
}

pub(crate) fn interpolate(grid: &RadialGrid, u: &[f64], r: f64) -> f64 {
    if !(0.0..=grid.r_max).contains(&r) {
        return 0.0;
    }
    let x = r / grid.h;
    let j = (x.floor() as usize).min(grid.intervals - 1);
    let t = x - j as f64;
    (1.0 - t) * u[j] + t * u[j + 1]
}

/// `(∫ |u|^q dμ)^{1/q}` by the trapezoid rule; `q = ∞` gives the max norm.
pub fn lp_norm(field: &RadialField, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(invalid("q", format!("exponent {q} must be >= 1")));
    }
    let u = field.to_physical();
    if q.is_infinite() {
        return Ok(u.max_abs());
    }
    let w = u.grid.measure_weights();
    let s: f64 = u
        .values
        .iter()
        .zip(&w)
        .map(|(v, wi)| wi * v.abs().powf(q))
        .sum();
    Ok(s.powf(1.0 / q))
}

/// Geodesic distance between points at radii `r1`, `r2` separated by angle θ.
///
/// Uses `cosh d - 1 = 2 sinh²((r1-r2)/2) + sinh r1 sinh r2 (1 - cos θ)`,
/// which avoids the cancellation of the plain law of cosines. `cos θ` is
/// clamped to [-1, 1].
pub fn geodesic_distance(r1: f64, r2: f64, cos_theta: f64) -> f64 {
    debug_assert!(r1 >= 0.0 && r2 >= 0.0);
    hyperbolic_distance_unchecked(r1, r2, cos_theta.clamp(-1.0, 1.0))
}

/// Distance in either geometry.
pub fn distance(geometry: &Geometry, r1: f64, r2: f64, cos_theta: f64) -> Result<f64> {
    check_polar(r1, r2, cos_theta)?;
    Ok(match geometry.kind {
        Curvature::Hyperbolic => hyperbolic_distance_unchecked(r1, r2, cos_theta),
        Curvature::Euclidean => euclidean_distance_unchecked(r1, r2, cos_theta),
    })
}

fn check_polar(r1: f64, r2: f64, c: f64) -> Result<()> {
    if !(r1 >= 0.0 && r2 >= 0.0) {
        return Err(invalid("r", "radii must be nonnegative"));
    }
    if !(-1.0..=1.0).contains(&c) {
        return Err(invalid("cos_theta", format!("{c} outside [-1, 1]")));
    }
    Ok(())
}

#[inline]
pub(crate) fn hyperbolic_distance_unchecked(r1: f64, r2: f64, c: f64) -> f64 {
    let a = (0.5 * (r1 - r2)).sinh();
    let x = 2.0 * a * a + r1.sinh() * r2.sinh() * (1.0 - c);
    2.0 * (0.5 * x).max(0.0).sqrt().asinh()
}

#[inline]
fn euclidean_distance_unchecked(r1: f64, r2: f64, c: f64) -> f64 {
    let d = r1 - r2;
    (d * d + 2.0 * r1 * r2 * (1.0 - c)).max(0.0).sqrt()
}

/// Value of the translate `τ_ρ f` at the point `(r, θ)`, where the origin is
/// moved a distance `ρ` along the polar axis. Linear interpolation; zero
/// beyond the grid.
pub fn translate_eval(field: &RadialField, rho: f64, r: f64, cos_theta: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(invalid(
            "rho",
            format!("translation distance {rho} must be >= 0"),
        ));
    }
    let d = distance(&field.grid.geometry, r, rho, cos_theta)?;
    Ok(field.eval(d))
}

/// `∫_{-1}^{1} g(d(r, ρ, c)) dc`, computed in the distance variable. Values
/// of `g` beyond `s_max` are treated as zero.
pub fn axis_shell_integral(
    geometry: &Geometry,
    g: impl Fn(f64) -> f64,
    r: f64,
    rho: f64,
    s_max: f64,
) -> f64 {
    if r == 0.0 || rho == 0.0 {
        let s = r.max(rho);
        return if s <= s_max { 2.0 * g(s) } else { 0.0 };
    }
    let lo = (r - rho).abs();
    let hi = (r + rho).min(s_max);
    if hi <= lo {
        return 0.0;
    }
    let panels = ((hi - lo) / 0.25).ceil() as usize;
    let integral = gl32_composite(|s| g(s) * geometry.warp(s), lo, hi, panels);
    integral / (geometry.warp(r) * geometry.warp(rho))
}

/// `‖τ_ρ f‖²_{L²}` for a radial `f` supported in `r <= support`, by
/// Gauss–Legendre quadrature in the radius and in the distance variable.
pub fn translated_sq_norm(
    geometry: &Geometry,
    f: impl Fn(f64) -> f64,
    rho: f64,
    support: f64,
) -> f64 {
    let lo = (rho - support).max(0.0);
    let hi = rho + support;
    let panels = ((hi - lo) / 0.25).ceil() as usize;
    let sq = |s: f64| {
        let v = f(s);
        v * v
    };
    2.0 * PI
        * gl32_composite(
            |r| {
                let w = geometry.warp(r);
                w * w * axis_shell_integral(geometry, sq, r, rho, support)
            },
            lo,
            hi,
            panels,
        )
}

/// Finite-difference radial Laplacian `f'' + (d-1) coth(r) f'` (or `(d-1)/r`).
/// At the origin the regularized limit `d f''(0)` is used; at `r_max` the
/// stencils are one sided.
pub fn radial_laplacian(field: &RadialField) -> RadialField {
    let u = field.to_physical();
    let grid = u.grid;
    let f = &u.values;
    let n = grid.intervals;
    let h = grid.h;
    let h2 = h * h;
    let dm1 = (grid.geometry.dimension - 1) as f64;
    let mut out = vec![0.0; n + 1];
    out[0] = grid.geometry.dimension as f64 * 2.0 * (f[1] - f[0]) / h2;
    for j in 1..n {
        let c = grid.geometry.log_warp_derivative(grid.r(j));
        out[j] =
            (f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2 + dm1 * c * (f[j + 1] - f[j - 1]) / (2.0 * h);
    }
    let c = grid.geometry.log_warp_derivative(grid.r(n));
    let d2 = (2.0 * f[n] - 5.0 * f[n - 1] + 4.0 * f[n - 2] - f[n - 3]) / h2;
    let d1 = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    out[n] = d2 + dm1 * c * d1;
    RadialField::from_raw(grid, out)
}

/// `Δ f - μ f` with `μ` the geometry's mass shift.
pub fn shifted_laplacian(field: &RadialField) -> RadialField {
    let mu = field.grid.geometry.mass_shift;
    let u = field.to_physical();
    let mut lap = radial_laplacian(&u);
    for (l, v) in lap.values.iter_mut().zip(&u.values) {
        *l -= mu * v;
    }
    lap
}

/// Centered first derivative with one-sided ends; zero at the origin for
/// even fields.
pub fn radial_derivative(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    let n = grid.intervals;
    let h = grid.h;
    let mut d = vec![0.0; n + 1];
    for j in 1..n {
        d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    }
    d[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    d
}

/// Smooth even cutoff: 1 on |x| <= 1, 0 on |x| >= 2, with a quintic
/// smoothstep in between (C² at both joins).
pub fn smooth_cutoff(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let t = 2.0 - a;
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// Derivative of [`smooth_cutoff`].
pub fn smooth_cutoff_derivative(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 || a >= 2.0 {
        0.0
    } else {
        let t = 2.0 - a;
        -x.signum() * 30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}
