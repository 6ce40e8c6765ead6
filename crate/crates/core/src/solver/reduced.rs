//! The one dimensional system for `w = warp(r) u`.

use std::f64::consts::PI;

use super::energy::EnergyRecord;
use super::equation::EquationSpec;
use crate::geom::RadialGrid;

pub(crate) struct Reduced {
    pub grid: RadialGrid,
    pub n: usize,
    pub h: f64,
    inv_h2: f64,
    /// `reduced_mass + V` at the nodes.
    mass: Vec<f64>,
    /// `μ + V` at the nodes.
    shift: Vec<f64>,
    pub warp: Vec<f64>,
    pub inv_warp: Vec<f64>,
    quintic: bool,
    curvature_term: f64,
}

impl Reduced {
    pub fn new(equation: &EquationSpec, grid: &RadialGrid) -> Self {
        let n = grid.intervals;
        let base = grid.geometry.reduced_mass();
        let mu = grid.geometry.mass_shift;
        let pot: Vec<f64> = (0..=n).map(|j| equation.potential_at(grid.r(j))).collect();
        let warp = grid.warps();
        let mut inv_warp: Vec<f64> = warp.iter().map(|s| 1.0 / s).collect();
        inv_warp[0] = 0.0;
        Self {
            grid: *grid,
            n,
            h: grid.h,
            inv_h2: 1.0 / (grid.h * grid.h),
            mass: pot.iter().map(|v| base + v).collect(),
            shift: pot.iter().map(|v| mu + v).collect(),
            warp,
            inv_warp,
            quintic: equation.is_quintic(),
            curvature_term: if grid.geometry.is_hyperbolic() {
                1.0
            } else {
                0.0
            },
        }
    }

    pub fn accel(&self, w: &[f64], a: &mut [f64]) {
        let n = self.n;
        a[0] = 0.0;
        a[n] = 0.0;
        for j in 1..n {
            let wj = w[j];
            let mut acc = (w[j + 1] - 2.0 * wj + w[j - 1]) * self.inv_h2 - self.mass[j] * wj;
            if self.quintic {
                // w⁵ / warp⁴ = u⁴ w, with u = w / warp regular at the origin
                let u = wj * self.inv_warp[j];
                let u2 = u * u;
                acc -= u2 * u2 * wj;
            }
            a[j] = acc;
        }
    }

    /// One velocity-Verlet step; `a` holds the acceleration at `w` on entry
    /// and at the new `w` on exit.
    pub fn verlet(&self, w: &mut [f64], v: &mut [f64], a: &mut [f64], dt: f64) {
        let half = 0.5 * dt;
        for j in 1..self.n {
            v[j] += half * a[j];
            w[j] += dt * v[j];
        }
        self.accel(w, a);
        for j in 1..self.n {
            v[j] += half * a[j];
        }
    }

    pub fn energy(&self, w: &[f64], v: &[f64]) -> EnergyRecord {
        let h = self.h;
        let n = self.n;
        let mut kin = 0.0;
        let mut grad = 0.0;
        let mut zero_order = 0.0;
        let mut pot = 0.0;
        let mut sext = 0.0;
        for j in 0..n {
            let d = w[j + 1] - w[j];
            grad += d * d;
        }
        for j in 1..n {
            let wj = w[j];
            kin += v[j] * v[j];
            zero_order += wj * wj;
            pot += self.shift[j] * wj * wj;
            if self.quintic {
                let u = wj * self.inv_warp[j];
                let u2 = u * u;
                sext += u2 * u2 * wj * wj;
            }
        }
        let c = 2.0 * PI * h;
        let kinetic = c * kin;
        let gradient = c * (grad * self.inv_h2 + self.curvature_term * zero_order);
        let potential_term = c * pot;
        let sextic = 4.0 * PI / 6.0 * h * sext;
        let e_v = kinetic + gradient + potential_term;
        EnergyRecord {
            e_v,
            e_nl: e_v + sextic,
            kinetic,
            gradient,
            potential_term,
            sextic,
        }
    }

    /// `‖(u, u_t)‖²_𝓗 = ∫ u_r² + u_t² dμ`.
    pub fn h_norm_sq(&self, w: &[f64], v: &[f64]) -> f64 {
        let mut grad = 0.0;
        let mut zero = 0.0;
        let mut kin = 0.0;
        for j in 0..self.n {
            let d = w[j + 1] - w[j];
            grad += d * d;
        }
        for j in 1..self.n {
            zero += w[j] * w[j];
            kin += v[j] * v[j];
        }
        4.0 * PI * self.h * (grad * self.inv_h2 + self.curvature_term * zero + kin)
    }

    /// `Σ h |a|²` weighted like the kinetic energy.
    pub fn accel_sq(&self, a: &[f64]) -> f64 {
        2.0 * PI * self.h * a[1..self.n].iter().map(|x| x * x).sum::<f64>()
    }

    pub fn to_physical(&self, w: &[f64]) -> Vec<f64> {
        let mut u: Vec<f64> = w.iter().zip(&self.inv_warp).map(|(a, b)| a * b).collect();
        u[0] = (4.0 * u[1] - u[2]) / 3.0;
        u
    }

    pub fn to_substituted(&self, u: &[f64]) -> Vec<f64> {
        let mut w: Vec<f64> = u.iter().zip(&self.warp).map(|(a, b)| a * b).collect();
        w[0] = 0.0;
        w[self.n] = 0.0;
        w
    }
}
