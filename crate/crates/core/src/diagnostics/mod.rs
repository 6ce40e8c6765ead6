//! Multipliers, Morawetz and local energy functionals, decay fits.

pub(crate) mod multiplier;

pub use multiplier::{
    multiplier_a_r, multiplier_b_r, multiplier_c2, multiplier_m, MultiplierTable,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HypError, Result};
use crate::quad::trapezoid_xy;
use crate::solver::{channel, energy, State, Trajectory};
use multiplier::a_r_d3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MorawetzRecord {
    /// `∬ ⅓ u⁶`.
    pub sextic_sixth: f64,
    /// `∬ c² u_r²`.
    pub grad_weighted: f64,
    /// `∬ tanh r (-V_r) u²`.
    pub potential_term: f64,
}

pub fn morawetz_accumulate(traj: &Trajectory) -> Result<MorawetzRecord> {
    Ok(MorawetzRecord {
        sextic_sixth: traj.time_integral(channel::MORAWETZ_SEXTIC)?,
        grad_weighted: traj.time_integral(channel::MORAWETZ_GRAD)?,
        potential_term: traj.time_integral(channel::POTENTIAL_TANH)?,
    })
}

/// `∫ a_r u_t u_r + ½ u u_t dμ` for a single state.
pub fn morawetz_boundary(state: &State) -> f64 {
    let grid = state.grid();
    let hyperbolic = grid.geometry.is_hyperbolic();
    let u = state.u().values();
    let ut = state.ut().values();
    let ur = crate::geom::radial_derivative(grid, u);
    grid.measure_weights()
        .iter()
        .enumerate()
        .map(|(j, wt)| {
            let r = grid.r(j);
            let a_r = if hyperbolic { a_r_d3(r) } else { r / 3.0 };
            wt * (a_r * ut[j] * ur[j] + 0.5 * u[j] * ut[j])
        })
        .sum()
}

/// Pieces of the integrated identity
/// `-[∫ a_r u_t u_r + ½ u u_t]_{t1}^{t2} = ∬ a_rr u_r² + angular + ½ a_r (-V_r) u² + (½ u F - G)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityBalance {
    pub boundary: f64,
    pub bulk_grad: f64,
    pub bulk_angular: f64,
    pub bulk_potential: f64,
    pub bulk_nonlinear: f64,
    pub energy: f64,
    pub duration: f64,
    /// `|LHS - RHS| / (energy · duration)`.
    pub residual: f64,
}

/// Balance of the integrated identity between the first and last snapshots.
pub fn morawetz_identity_balance(traj: &Trajectory) -> Result<IdentityBalance> {
    let first = traj
        .snapshots
        .first()
        .ok_or_else(|| invalid("traj", "no snapshots"))?;
    let last = traj.final_state();
    let (t1, t2) = (first.time(), last.time());
    let k1 = traj.times.partition_point(|t| *t < t1 - 0.5 * traj.dt);
    let k2 = traj.times.partition_point(|t| *t <= t2 + 0.5 * traj.dt);
    let integral = |name: &'static str| -> Result<f64> {
        let y = traj.channel(name)?;
        Ok(trapezoid_xy(&traj.times[k1..k2], &y[k1..k2]))
    };
    let boundary = -(morawetz_boundary(last) - morawetz_boundary(first));
    let bulk_grad = integral(channel::MORAWETZ_GRAD)?;
    let bulk_angular = integral(channel::MORAWETZ_ANGULAR)?;
    let bulk_potential = integral(channel::MORAWETZ_POTENTIAL)?;
    let bulk_nonlinear = integral(channel::MORAWETZ_SEXTIC)?;
    let e = energy(first);
    let e0 = e.conserved(traj.equation.is_quintic());
    let duration = t2 - t1;
    let rhs = bulk_grad + bulk_angular + bulk_potential + bulk_nonlinear;
    let scale = e0 * duration;
    Ok(IdentityBalance {
        boundary,
        bulk_grad,
        bulk_angular,
        bulk_potential,
        bulk_nonlinear,
        energy: e0,
        duration,
        residual: if scale > 0.0 {
            (boundary - rhs).abs() / scale
        } else {
            0.0
        },
    })
}

pub fn morawetz_identity_residual(traj: &Trajectory) -> Result<f64> {
    Ok(morawetz_identity_balance(traj)?.residual)
}

/// `∬ sech² r (u_t² + u_r²) dμ dt` for a linear run.
pub fn led_weighted_norm(traj: &Trajectory) -> Result<f64> {
    if traj.equation.is_quintic() {
        return Err(HypError::Unsupported(
            "local energy decay is measured on linear runs only".into(),
        ));
    }
    if let Some(p) = &traj.equation.potential {
        if !(p.nonnegative && p.repulsive) {
            return Err(invalid(
                "potential",
                "local energy decay needs a nonnegative repulsive V",
            ));
        }
    }
    traj.time_integral(channel::LED)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedRecord {
    pub integral: f64,
    /// Increment over the last tenth of the run, relative to the total.
    pub final_increment: f64,
    /// `integral / E_V(0)`.
    pub ratio: f64,
}

pub fn led_saturation(traj: &Trajectory) -> Result<LedRecord> {
    let integral = led_weighted_norm(traj)?;
    let running = traj.running_integral(channel::LED)?;
    let t0 = traj.times[0];
    let t_end = *traj.times.last().unwrap();
    let cut = t_end - 0.1 * (t_end - t0);
    let k = traj.times.partition_point(|t| *t < cut);
    let ev = energy(&traj.snapshots[0]).e_v;
    Ok(LedRecord {
        integral,
        final_increment: if integral > 0.0 {
            (integral - running[k]) / integral
        } else {
            0.0
        },
        ratio: if ev > 0.0 { integral / ev } else { 0.0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r2: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares slope of `log y` against `log t` over samples in `[t0, t1]`.
pub fn decay_fit(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if t.len() != y.len() {
        return Err(invalid("series", "times and values differ in length"));
    }
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid(
            "window",
            format!("[{lo}, {hi}] must satisfy 0 < t0 < t1"),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (ti, yi) in t.iter().zip(y) {
        if *ti >= lo && *ti <= hi {
            if !(*yi > 0.0) {
                return Err(invalid(
                    "series",
                    format!("nonpositive sample {yi} at t = {ti}"),
                ));
            }
            xs.push(ti.ln());
            ys.push(yi.ln());
        }
    }
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(invalid(
            "window",
            format!("{} samples in window, need {MIN_FIT_SAMPLES}", xs.len()),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Ok(DecayFit {
        exponent: slope,
        prefactor: (my - slope * mx).exp(),
        r2,
        samples: xs.len(),
    })
}
