//! Heat flow, heat kernels and Littlewood–Paley projections on ℍ³.

mod kernel;
mod projection;

pub use kernel::{
    concpp_norms, fit_kernel_envelope, heat_kernel_bound_dm, heat_kernel_closed_form_d3,
    kernel_convolution, lp_kernel, ConcNorms, KernelEnvelope, LPKernelSpec,
};
pub use projection::{
    dyadic_lambdas, lp_project, lp_project_many, lp_reconstruct, refined_sobolev_b,
    refined_sobolev_check, ReconstructionReport, SobolevRecord,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::{Curvature, RadialField, RadialGrid};
use crate::tridiag::Toeplitz3;

pub const MIN_HEAT_STEPS: usize = 8;
const SMOOTHING_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatScheme {
    CrankNicolson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatParams {
    pub s: f64,
    pub steps: usize,
    pub scheme: HeatScheme,
}

impl HeatParams {
    /// Default step count `max(8, ceil(s / h))`.
    pub fn for_grid(s: f64, grid: &RadialGrid) -> Self {
        Self {
            s,
            steps: default_steps(s, grid.h),
            scheme: HeatScheme::CrankNicolson,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(invalid(
                "s",
                format!("heat time {} must be positive", self.s),
            ));
        }
        if self.steps < MIN_HEAT_STEPS {
            return Err(invalid("steps", format!("need at least {MIN_HEAT_STEPS}")));
        }
        Ok(())
    }
}

fn default_steps(s: f64, h: f64) -> usize {
    ((s / h).ceil() as usize).max(MIN_HEAT_STEPS)
}

/// `e^{sΔ} f` on ℍ³ by Crank–Nicolson on `W = f sinh r`.
pub fn heat_evolve(f: &RadialField, s: f64) -> Result<RadialField> {
    if f.grid().geometry.kind != Curvature::Hyperbolic {
        return Err(invalid(
            "geometry",
            "heat_evolve is hyperbolic; use heat_evolve_euclidean",
        ));
    }
    evolve_checked(f, s)
}

/// `e^{sΔ} f` on ℝ³ by Crank–Nicolson on `W = r f`.
pub fn heat_evolve_euclidean(f: &RadialField, s: f64) -> Result<RadialField> {
    if f.grid().geometry.kind != Curvature::Euclidean {
        return Err(invalid("geometry", "expected a euclidean grid"));
    }
    evolve_checked(f, s)
}

fn evolve_checked(f: &RadialField, s: f64) -> Result<RadialField> {
    f.grid().geometry.require_solver_dimension()?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid("s", format!("heat time {s} must be >= 0")));
    }
    if s == 0.0 {
        return Ok(f.to_physical());
    }
    heat_evolve_with(f, &HeatParams::for_grid(s, f.grid()))
}

/// Heat flow with an explicit step count.
pub fn heat_evolve_with(f: &RadialField, params: &HeatParams) -> Result<RadialField> {
    params.validate()?;
    f.grid().geometry.require_solver_dimension()?;
    let mut m = HeatMarcher::new(f);
    m.advance(params.s, params.steps);
    Ok(m.field())
}

/// Marches one datum through increasing heat times so that many targets
/// share a single evolution.
pub(crate) struct HeatMarcher {
    grid: RadialGrid,
    /// Interior values of `Z = e^{s} W` (hyperbolic) or `W` (euclidean).
    z: Vec<f64>,
    s: f64,
    rhs: Vec<f64>,
    started: bool,
}

impl HeatMarcher {
    pub(crate) fn new(f: &RadialField) -> Self {
        let w = f.to_substituted();
        let n = f.grid().intervals;
        Self {
            grid: *f.grid(),
            z: w.values()[1..n].to_vec(),
            s: 0.0,
            rhs: vec![0.0; n - 1],
            started: false,
        }
    }

    pub(crate) fn time(&self) -> f64 {
        self.s
    }

    /// Advances to heat time `target` with the default step rule.
    pub(crate) fn advance_to(&mut self, target: f64) {
        let ds = target - self.s;
        if ds > 0.0 {
            self.advance(ds, default_steps(ds, self.grid.h));
        }
    }

    /// Crank–Nicolson. The first two steps of the march are taken as four
    /// backward Euler half steps, and each output is preceded by a few
    /// backward Euler steps of size `h²`. Both damp the grid-scale modes
    /// (data roughness, roundoff) that CN carries with amplification close
    /// to -1 and that the Laplacians in `P_λ` would otherwise magnify.
    fn advance(&mut self, ds: f64, steps: usize) {
        debug_assert!(steps >= MIN_HEAT_STEPS);
        let h2 = self.grid.h * self.grid.h;
        let n = self.z.len();
        let smooth_steps = if ds > 4.0 * SMOOTHING_STEPS as f64 * h2 {
            SMOOTHING_STEPS
        } else {
            0
        };
        let smooth_time = smooth_steps as f64 * h2;
        let dt = (ds - smooth_time) / steps as f64;
        let a = 0.5 * dt / h2;
        let solver = Toeplitz3::new(n, 1.0 + 2.0 * a, -a);
        let mut cn_steps = steps;
        if !self.started {
            for _ in 0..4 {
                solver.solve(&mut self.z);
            }
            cn_steps -= 2;
            self.started = true;
        }
        for _ in 0..cn_steps {
            let z = &self.z;
            let rhs = &mut self.rhs;
            rhs[0] = (1.0 - 2.0 * a) * z[0] + a * z[1];
            for i in 1..n - 1 {
                rhs[i] = (1.0 - 2.0 * a) * z[i] + a * (z[i - 1] + z[i + 1]);
            }
            rhs[n - 1] = (1.0 - 2.0 * a) * z[n - 1] + a * z[n - 2];
            solver.solve(rhs);
            std::mem::swap(&mut self.z, &mut self.rhs);
        }
        if smooth_steps > 0 {
            let euler = Toeplitz3::new(n, 3.0, -1.0);
            for _ in 0..smooth_steps {
                euler.solve(&mut self.z);
            }
        }
        self.s += ds;
    }

    /// Current physical field.
    pub(crate) fn field(&self) -> RadialField {
        let decay = match self.grid.geometry.kind {
            Curvature::Hyperbolic => (-self.s).exp(),
            Curvature::Euclidean => 1.0,
        };
        let mut u = vec![0.0; self.grid.len()];
        for (i, z) in self.z.iter().enumerate() {
            let j = i + 1;
            u[j] = decay * z / self.grid.geometry.warp(self.grid.r(j));
        }
        u[0] = (4.0 * u[1] - u[2]) / 3.0;
        RadialField::from_raw(self.grid, u)
    }
}
