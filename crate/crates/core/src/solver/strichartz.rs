use serde::{Deserialize, Serialize};

use super::energy::energy_norm_distance;
use super::evolve::{propagate_steps, running_trapezoid, Trajectory};
use super::state::State;
use crate::error::{invalid, HypError, Result};
use crate::geom::{lp_norm, radial_laplacian, RadialField};
use crate::quad::trapezoid_xy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibleBranch {
    /// `γ = (d+1)/2 (1/2 - 1/q)`, used when `2/p + (d-1)/q >= (d-1)/2`.
    SchrodingerLike,
    /// `γ = d (1/2 - 1/q) - 1/p`, used when `2/p + (d-1)/q < (d-1)/2`.
    WaveLike,
    /// `(p, q) = (∞, 2)`, `γ = 0`.
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissible {
    pub gamma: f64,
    pub branch: AdmissibleBranch,
}

/// Regularity `γ` of the admissible pair `(p, q)` on `ℍ^d`.
pub fn admissible_gamma(p: f64, q: f64, d: u32) -> Result<Admissible> {
    if d < 2 {
        return Err(invalid("d", "dimension must be >= 2"));
    }
    if p.is_infinite() && p > 0.0 && q == 2.0 {
        return Ok(Admissible {
            gamma: 0.0,
            branch: AdmissibleBranch::Energy,
        });
    }
    if !(p >= 2.0) {
        return Err(invalid("p", format!("{p} must be >= 2")));
    }
    if !(q > 2.0) || q.is_infinite() {
        return Err(invalid("q", format!("{q} must be finite and > 2")));
    }
    let d = d as f64;
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    // single-division forms keep integer inputs exact
    Ok(if 2.0 * inv_p + (d - 1.0) / q >= 0.5 * (d - 1.0) {
        Admissible {
            gamma: (d + 1.0) * (q - 2.0) / (4.0 * q),
            branch: AdmissibleBranch::SchrodingerLike,
        }
    } else {
        let gamma = if p.is_infinite() {
            d * (q - 2.0) / (2.0 * q)
        } else {
            (d * (q - 2.0) * p - 2.0 * q) / (2.0 * q * p)
        };
        Admissible {
            gamma,
            branch: AdmissibleBranch::WaveLike,
        }
    })
}

/// `(∫ ‖u(t)‖_q^p dt)^{1/p}` from the dense `l{q}` channel; `p = ∞` gives the sup.
pub fn strichartz_accumulate(traj: &Trajectory, p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("p", format!("{p} must be >= 1")));
    }
    let norms = traj.lq_channel(q)?;
    if p.is_infinite() {
        return Ok(norms.iter().fold(0.0, |m: f64, x| m.max(*x)));
    }
    let y: Vec<f64> = norms.iter().map(|x| x.powf(p)).collect();
    Ok(trapezoid_xy(&traj.times, &y).powf(1.0 / p))
}

/// Running version of [`strichartz_accumulate`], aligned with `traj.times`.
pub fn strichartz_running(traj: &Trajectory, p: f64, q: f64) -> Result<Vec<f64>> {
    let norms = traj.lq_channel(q)?;
    let y: Vec<f64> = norms.iter().map(|x| x.powf(p)).collect();
    Ok(running_trapezoid(&traj.times, &y)
        .into_iter()
        .map(|x| x.powf(1.0 / p))
        .collect())
}

/// Free (linear, `V = 0`) state with the same data as `state`.
fn freed(state: &State) -> State {
    State::from_parts(
        state.u().clone(),
        state.ut().clone(),
        state.time(),
        state.equation().free(),
    )
}

fn steps_between(traj: &Trajectory, t0: f64, t1: f64) -> usize {
    ((t1 - t0) / traj.dt).round().max(0.0) as usize
}

/// Candidate scattering data: the snapshot at `t` pulled back to time 0 by
/// the free flow.
pub fn scattering_data(traj: &Trajectory, t: f64) -> Result<State> {
    let k = traj
        .snapshot_index(t)
        .ok_or_else(|| invalid("t", format!("{t} is not a snapshot time")))?;
    let snap = freed(&traj.snapshots[k]);
    let t0 = traj.snapshots[0].time();
    Ok(propagate_steps(
        &snap,
        steps_between(traj, t0, snap.time()),
        -traj.dt,
    ))
}

/// `sup_{t' > t} ‖u(t') - S(t') u_L(0)‖_𝓗` over later snapshots, where
/// `u_L(0)` is the free pull-back of the snapshot at `t`. The comparison wave
/// at `t'` is computed by free-evolving the snapshot from `t` to `t'`
/// directly, which equals `S(t') u_L(0)` by the group property of the scheme.
pub fn scattering_defect(traj: &Trajectory, t: f64) -> Result<f64> {
    let k = traj
        .snapshot_index(t)
        .ok_or_else(|| invalid("t", format!("{t} is not a snapshot time")))?;
    let later = &traj.snapshots[k + 1..];
    if later.len() < 2 {
        return Err(invalid("t", "need at least 2 snapshots after t"));
    }
    let mut current = freed(&traj.snapshots[k]);
    let mut worst = 0.0f64;
    for snap in later {
        let n = steps_between(traj, current.time(), snap.time());
        current = propagate_steps(&current, n, traj.dt).with_time(snap.time());
        let d = energy_norm_distance(snap, &current)?;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// `∫_t^T ‖u⁵‖_{L²} dt'` from the dense `n_l2` channel.
pub fn duhamel_tail(traj: &Trajectory, t: f64) -> Result<f64> {
    let n = traj.channel(super::evolve::channel::N_L2)?;
    let k = traj.times.partition_point(|s| *s < t - 0.5 * traj.dt);
    Ok(trapezoid_xy(&traj.times[k..], &n[k..]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub sup_h_diff: f64,
    pub s_diff: f64,
    pub eq_residual_b: f64,
}

/// Differences between two runs on one grid and snapshot schedule, and the
/// `L¹_t L²` residual of `b` in the equation of `a`.
pub fn trajectory_compare(a: &Trajectory, b: &Trajectory) -> Result<CompareRecord> {
    if a.grid != b.grid {
        return Err(invalid("b", "grids differ"));
    }
    let ta = a.snapshot_times();
    let tb = b.snapshot_times();
    if ta.len() != tb.len()
        || ta
            .iter()
            .zip(&tb)
            .any(|(x, y)| (x - y).abs() > 1e-9 * x.abs().max(1.0))
    {
        return Err(invalid("b", "snapshot schedules differ"));
    }
    let mut sup = 0.0f64;
    let mut s_y = Vec::with_capacity(ta.len());
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        let d = sa.difference(sb)?;
        sup = sup.max(super::energy::energy_norm(&d));
        s_y.push(lp_norm(d.u(), 10.0)?.powi(5));
    }
    let s_diff = trapezoid_xy(&ta, &s_y).powf(0.2);
    let eq_residual_b = equation_residual(a, b)?;
    Ok(CompareRecord {
        sup_h_diff: sup,
        s_diff,
        eq_residual_b,
    })
}

/// `∫ ‖v_tt - Δv + (μ + V) v + v⁵‖_{L²} dt` over interior snapshots of `b`
/// with `v_tt` from centered differences of `v_t`; `a` supplies the equation.
pub fn equation_residual(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let snaps = &b.snapshots;
    if snaps.len() < 3 {
        return Err(HypError::Resolution("need at least 3 snapshots".into()));
    }
    let eq = &a.equation;
    let grid = b.grid;
    let mu = grid.geometry.mass_shift;
    let pot: Vec<f64> = grid.nodes().iter().map(|&r| eq.potential_at(r)).collect();
    let mut times = Vec::new();
    let mut norms = Vec::new();
    for k in 1..snaps.len() - 1 {
        let (prev, cur, next) = (&snaps[k - 1], &snaps[k], &snaps[k + 1]);
        let span = next.time() - prev.time();
        let lap = radial_laplacian(cur.u());
        let u = cur.u().values();
        let res: Vec<f64> = (0..grid.len())
            .map(|j| {
                let vtt = (next.ut().values()[j] - prev.ut().values()[j]) / span;
                let nl = if eq.is_quintic() { u[j].powi(5) } else { 0.0 };
                vtt - lap.values()[j] + (mu + pot[j]) * u[j] + nl
            })
            .collect();
        times.push(cur.time());
        norms.push(lp_norm(&RadialField::from_raw(grid, res), 2.0)?);
    }
    Ok(trapezoid_xy(&times, &norms))
}
