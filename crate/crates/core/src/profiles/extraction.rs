use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::heatlp::{lp_project_many, lp_reconstruct};
use crate::solver::{propagate_steps, EquationSpec, Nonlinearity, State, Trajectory};

/// Maximizer of `λ^{-1/2} |P_λ u(t)(r)|` over the search grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuRecord {
    pub nu: f64,
    pub t_star: f64,
    pub r_star: f64,
    pub lambda_star: f64,
}

/// Half-width (as a factor) of the band removed around `λ*` between passes.
pub const BAND_FACTOR: f64 = 8.0;
const BAND_NODES: usize = 33;

/// `ν = sup λ^{-1/2} |P_λ u(t)(r)|` over `lambdas`, the snapshots of `traj`
/// at `t_samples`, and all grid nodes. Ties resolve to the smallest λ, then
/// the smallest t, then the smallest r.
pub fn nu_functional(traj: &Trajectory, lambdas: &[f64], t_samples: &[f64]) -> Result<NuRecord> {
    let states = sample_states(traj, t_samples)?;
    nu_over_states(&states, lambdas)
}

/// [`nu_functional`] over explicit states, each labelled by its own time.
pub fn nu_over_states(states: &[State], lambdas: &[f64]) -> Result<NuRecord> {
    if lambdas.is_empty() {
        return Err(invalid("lambda_grid", "empty"));
    }
    if states.is_empty() {
        return Err(invalid("t_samples", "empty"));
    }
    let mut by_time: Vec<&State> = states.iter().collect();
    by_time.sort_by(|a, b| a.time().total_cmp(&b.time()));
    let pieces = by_time
        .iter()
        .map(|s| lp_project_many(s.u(), lambdas))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    // lexicographic scan in (λ, t, r) keeping only strict improvements
    let mut best: Option<NuRecord> = None;
    for &i in &order {
        let lambda = lambdas[i];
        let scale = lambda.powf(-0.5);
        for (state, p) in by_time.iter().zip(&pieces) {
            for (j, v) in p[i].values().iter().enumerate() {
                let val = scale * v.abs();
                if best.is_none_or(|b| val > b.nu) {
                    best = Some(NuRecord {
                        nu: val,
                        t_star: state.time(),
                        r_star: state.grid().r(j),
                        lambda_star: lambda,
                    });
                }
            }
        }
    }
    Ok(best.expect("nonempty grids"))
}

/// Repeated ν extraction. After each pass the band `[λ*/8, 8λ*]` of the
/// snapshot at `t*` is evolved linearly to every sampled time and
/// subtracted before the next maximization.
pub fn extract_profiles(
    traj: &Trajectory,
    lambdas: &[f64],
    t_samples: &[f64],
    passes: usize,
) -> Result<Vec<NuRecord>> {
    if passes == 0 {
        return Err(invalid("passes", "must be >= 1"));
    }
    if !(traj.dt > 0.0) {
        return Err(invalid("traj", "needs a positive time step"));
    }
    let mut states = sample_states(traj, t_samples)?;
    let linear = EquationSpec {
        nonlinearity: Nonlinearity::None,
        ..traj.equation.clone()
    };
    let mut found = Vec::with_capacity(passes);
    for pass in 0..passes {
        let rec = nu_over_states(&states, lambdas)?;
        found.push(rec);
        if pass + 1 == passes {
            break;
        }
        let source = states
            .iter()
            .find(|s| s.time() == rec.t_star)
            .expect("t* is a sample time");
        let band = band_component(source, rec.lambda_star)?.with_equation(linear.clone())?;
        for state in states.iter_mut() {
            let shift = state.time() - rec.t_star;
            let n = (shift.abs() / traj.dt).round() as usize;
            let dt = if shift < 0.0 { -traj.dt } else { traj.dt };
            let moved = propagate_steps(&band, n, dt);
            *state = state.difference(&moved)?;
        }
    }
    Ok(found)
}

/// `∫_{λ*/8}^{8λ*} P_λ (u, u_t) dλ/λ`.
fn band_component(state: &State, lambda_star: f64) -> Result<State> {
    let lo = lambda_star / BAND_FACTOR;
    let hi = lambda_star * BAND_FACTOR;
    let (u, _) = lp_reconstruct(state.u(), lo, hi, BAND_NODES)?;
    let (ut, _) = lp_reconstruct(state.ut(), lo, hi, BAND_NODES)?;
    State::new(u, ut, state.time(), state.equation().clone())
}

fn sample_states(traj: &Trajectory, t_samples: &[f64]) -> Result<Vec<State>> {
    if t_samples.is_empty() {
        return Err(invalid("t_samples", "empty"));
    }
    t_samples
        .iter()
        .map(|&t| {
            traj.snapshot_index(t)
                .map(|k| traj.snapshots[k].clone())
                .ok_or_else(|| invalid("t_samples", format!("{t} is not a retained snapshot")))
        })
        .collect()
}
