use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::equation::EquationSpec;
use super::reduced::Reduced;
use super::state::State;
use crate::diagnostics::multiplier::{a_r_d3, a_rr_d3};
use crate::error::{invalid, HypError, Result};
use crate::geom::{RadialField, RadialGrid};

pub const DEFAULT_CFL: f64 = 0.9;
/// Relative level below which data count as vanished for the domain guard.
pub const SUPPORT_TOLERANCE: f64 = 1e-10;

/// Names of the dense diagnostic channels.
pub mod channel {
    pub const TIME: &str = "t";
    pub const ENERGY_V: &str = "energy_EV";
    pub const ENERGY_NL: &str = "energy_nl";
    /// Conserved energy with the leapfrog correction `-(dt²/8)|a|²` per unit
    /// mass; exactly invariant for linear equations.
    pub const ENERGY_SCHEME: &str = "energy_scheme";
    pub const H_NORM_SQ: &str = "h_norm_sq";
    /// `‖u⁵‖_{L²}`.
    pub const N_L2: &str = "n_l2";
    /// `∫ a_r u_t u_r + ½ u u_t dμ`.
    pub const MORAWETZ_BOUNDARY: &str = "morawetz_boundary";
    /// `∫ a_rr u_r² dμ`.
    pub const MORAWETZ_GRAD: &str = "morawetz_grad";
    /// Angular term; zero for radial data.
    pub const MORAWETZ_ANGULAR: &str = "morawetz_angular";
    /// `∫ ½ a_r (-V_r) u² dμ`.
    pub const MORAWETZ_POTENTIAL: &str = "morawetz_potential";
    /// `∫ (½ u F - G) dμ = ⅓ ∫ u⁶ dμ` for the quintic.
    pub const MORAWETZ_SEXTIC: &str = "morawetz_sextic";
    /// `∫ tanh r (-V_r) u² dμ`.
    pub const POTENTIAL_TANH: &str = "potential_tanh";
    /// `∫ sech² r (u_t² + u_r²) dμ`.
    pub const LED: &str = "led_density";

    pub fn lq(q: f64) -> String {
        format!("l{q}")
    }
}

/// Which dense channels to record at every step.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default)]
    pub energy: bool,
    #[serde(default)]
    pub lq: Vec<f64>,
    #[serde(default)]
    pub nonlinear_l2: bool,
    #[serde(default)]
    pub morawetz: bool,
    #[serde(default)]
    pub led: bool,
}

impl Diagnostics {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn energy_only() -> Self {
        Self {
            energy: true,
            ..Self::default()
        }
    }

    pub fn all() -> Self {
        Self {
            energy: true,
            lq: vec![2.0, 6.0, 10.0],
            nonlinear_l2: true,
            morawetz: true,
            led: true,
        }
    }

    pub fn with_lq(mut self, q: f64) -> Self {
        if !self.lq.contains(&q) {
            self.lq.push(q);
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if let Some(q) = self.lq.iter().find(|q| !(**q >= 1.0)) {
            return Err(invalid(
                "diagnostics.lq",
                format!("exponent {q} must be >= 1"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub cfl: f64,
    /// Steps between full finiteness scans.
    pub nan_check_every: usize,
    /// Skip the finite-speed domain guard (internal propagations).
    #[serde(skip)]
    pub unguarded: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            cfl: DEFAULT_CFL,
            nan_check_every: 16,
            unguarded: false,
        }
    }
}

/// Snapshots every `stride` steps (plus the final state) and dense channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub equation: EquationSpec,
    pub grid: RadialGrid,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub channels: BTreeMap<String, Vec<f64>>,
    pub snapshots: Vec<State>,
}

impl Trajectory {
    /// A trajectory with snapshots only (no dense channels).
    pub fn from_snapshots(snapshots: Vec<State>) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| invalid("snapshots", "need at least one snapshot"))?;
        if snapshots.windows(2).any(|p| !(p[1].time() > p[0].time())) {
            return Err(invalid("snapshots", "times must increase strictly"));
        }
        if snapshots.iter().any(|s| s.grid() != first.grid()) {
            return Err(invalid("snapshots", "grids differ"));
        }
        let dt = if snapshots.len() > 1 {
            snapshots[1].time() - snapshots[0].time()
        } else {
            0.0
        };
        Ok(Self {
            equation: first.equation().clone(),
            grid: *first.grid(),
            dt,
            steps: snapshots.len().saturating_sub(1),
            times: Vec::new(),
            channels: BTreeMap::new(),
            snapshots,
        })
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time()).collect()
    }

    pub fn final_state(&self) -> &State {
        self.snapshots.last().expect("trajectory has snapshots")
    }

    pub fn channel(&self, name: &'static str) -> Result<&[f64]> {
        self.channels
            .get(name)
            .map(|v| v.as_slice())
            .ok_or(HypError::MissingChannel(name))
    }

    pub fn lq_channel(&self, q: f64) -> Result<&[f64]> {
        self.channels
            .get(&channel::lq(q))
            .map(|v| v.as_slice())
            .ok_or(HypError::MissingChannel("lq"))
    }

    /// Trapezoid integral of a dense channel over the whole run.
    pub fn time_integral(&self, name: &'static str) -> Result<f64> {
        Ok(crate::quad::trapezoid_xy(&self.times, self.channel(name)?))
    }

    /// Running trapezoid integral of a dense channel, aligned with `times`.
    pub fn running_integral(&self, name: &'static str) -> Result<Vec<f64>> {
        Ok(running_trapezoid(&self.times, self.channel(name)?))
    }

    /// Index of the snapshot at time `t` (within half a step).
    pub fn snapshot_index(&self, t: f64) -> Option<usize> {
        let tol = 0.5 * self.dt.abs().max(1e-12);
        self.snapshots
            .iter()
            .position(|s| (s.time() - t).abs() <= tol)
    }

    /// Largest relative deviation of the leapfrog-corrected energy from its
    /// initial value.
    pub fn energy_drift(&self) -> Result<f64> {
        relative_drift(self.channel(channel::ENERGY_SCHEME)?)
    }

    /// Same for the uncorrected energy (`E_nl` or `E_V`), which oscillates
    /// at `O(dt²)`.
    pub fn raw_energy_drift(&self) -> Result<f64> {
        let name = if self.equation.is_quintic() {
            channel::ENERGY_NL
        } else {
            channel::ENERGY_V
        };
        relative_drift(self.channel(name)?)
    }
}

fn relative_drift(e: &[f64]) -> Result<f64> {
    let e0 = e[0];
    let scale = e0.abs().max(f64::MIN_POSITIVE);
    Ok(e.iter().fold(0.0f64, |m, x| m.max((x - e0).abs())) / scale)
}

pub(crate) fn running_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..y.len().min(t.len()) {
        acc += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
        out.push(acc);
    }
    out
}

/// One leapfrog step of size `dt` (which may be negative).
pub fn step(state: &State, dt: f64) -> Result<State> {
    let grid = *state.grid();
    let limit = DEFAULT_CFL * grid.h;
    if !(dt.abs() <= limit * (1.0 + 1e-12)) {
        return Err(HypError::Cfl { dt, limit });
    }
    let red = Reduced::new(state.equation(), &grid);
    let mut w = red.to_substituted(state.u().values());
    let mut v = red.to_substituted(state.ut().values());
    if dt < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let mut a = vec![0.0; grid.len()];
    red.accel(&w, &mut a);
    red.verlet(&mut w, &mut v, &mut a, dt.abs());
    if dt < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    if w.iter().chain(&v).any(|x| !x.is_finite()) {
        return Err(HypError::SolverAbort {
            t: state.time() + dt,
            reason: "non-finite values".into(),
        });
    }
    Ok(build_state(
        &red,
        &w,
        &v,
        state.time() + dt,
        state.equation(),
    ))
}

fn build_state(red: &Reduced, w: &[f64], v: &[f64], time: f64, equation: &EquationSpec) -> State {
    State::from_parts(
        RadialField::from_raw(red.grid, red.to_physical(w)),
        RadialField::from_raw(red.grid, red.to_physical(v)),
        time,
        equation.clone(),
    )
}

/// `r_max` needed so that the Dirichlet wall is not reached before `t_span`.
pub fn required_radius(state: &State, t_span: f64) -> f64 {
    state.support_radius(SUPPORT_TOLERANCE) + t_span.abs() + state.equation().potential_support()
}

pub fn evolve(
    state: &State,
    t_final: f64,
    stride: usize,
    diagnostics: &Diagnostics,
) -> Result<Trajectory> {
    evolve_with(
        state,
        t_final,
        stride,
        diagnostics,
        &SolverOptions::default(),
    )
}

/// Evolves over `[t0, t0 + t_final]` with `dt = t_final / ceil(t_final / (cfl h))`.
pub fn evolve_with(
    state: &State,
    t_final: f64,
    stride: usize,
    diagnostics: &Diagnostics,
    options: &SolverOptions,
) -> Result<Trajectory> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(invalid(
            "T",
            format!("final time {t_final} must be positive"),
        ));
    }
    if stride == 0 {
        return Err(invalid("snapshot_stride", "must be >= 1"));
    }
    if !(options.cfl > 0.0 && options.cfl <= DEFAULT_CFL) {
        return Err(invalid(
            "time.cfl",
            format!("cfl {} must lie in (0, 0.9]", options.cfl),
        ));
    }
    diagnostics.validate()?;
    let grid = *state.grid();
    state.equation().validate_on(&grid)?;
    if !options.unguarded {
        let needed = required_radius(state, t_final);
        if needed > grid.r_max {
            return Err(HypError::DomainTooSmall {
                needed,
                have: grid.r_max,
            });
        }
    }
    let steps = (t_final / (options.cfl * grid.h)).ceil() as usize;
    let dt = t_final / steps as f64;
    march(
        state,
        steps,
        dt,
        stride,
        diagnostics,
        options.nan_check_every.max(1),
    )
}

fn march(
    state: &State,
    steps: usize,
    dt: f64,
    stride: usize,
    diagnostics: &Diagnostics,
    nan_every: usize,
) -> Result<Trajectory> {
    let grid = *state.grid();
    let equation = state.equation().clone();
    let red = Reduced::new(&equation, &grid);
    let mut w = red.to_substituted(state.u().values());
    let mut v = red.to_substituted(state.ut().values());
    let mut a = vec![0.0; grid.len()];
    red.accel(&w, &mut a);
    let mut rec = Recorder::new(&red, &equation, diagnostics, steps + 1);
    let t0 = state.time();
    let mut times = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::new();
    times.push(t0);
    rec.record(&red, &w, &v, &a, dt);
    snapshots.push(build_state(&red, &w, &v, t0, &equation));
    for k in 1..=steps {
        red.verlet(&mut w, &mut v, &mut a, dt);
        let t = t0 + k as f64 * dt;
        if (k % nan_every == 0 || k == steps) && w.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(HypError::SolverAbort {
                t,
                reason: format!("non-finite values after step {k}"),
            });
        }
        times.push(t);
        rec.record(&red, &w, &v, &a, dt);
        if k % stride == 0 || k == steps {
            snapshots.push(build_state(&red, &w, &v, t, &equation));
        }
    }
    let mut channels = rec.finish();
    if !channels.is_empty() {
        channels.insert(channel::TIME.to_string(), times.clone());
    }
    Ok(Trajectory {
        equation,
        grid,
        dt,
        steps,
        times,
        channels,
        snapshots,
    })
}

/// Linear evolution without potential by `t` (either sign).
pub fn free_evolve(state: &State, t: f64) -> Result<State> {
    if !state.equation().is_free() {
        return Err(invalid(
            "equation",
            "free evolution needs V = 0 and no nonlinearity",
        ));
    }
    propagate(state, t, false)
}

/// Evolution by `t` of either sign under the state's own equation;
/// negative times reverse the velocity.
pub(crate) fn propagate(state: &State, t: f64, unguarded: bool) -> Result<State> {
    if t == 0.0 {
        return Ok(state.clone());
    }
    if !t.is_finite() {
        return Err(invalid("t", "must be finite"));
    }
    let options = SolverOptions {
        unguarded,
        ..SolverOptions::default()
    };
    let start = if t < 0.0 {
        reversed(state)
    } else {
        state.clone()
    };
    let traj = evolve_with(&start, t.abs(), usize::MAX, &Diagnostics::none(), &options)?;
    let end = traj.final_state().clone();
    Ok(if t < 0.0 {
        reversed(&end).with_time(state.time() + t)
    } else {
        end
    })
}

/// Evolution by `n` steps of size `dt` (either sign), skipping the guard.
pub(crate) fn propagate_steps(state: &State, n: usize, dt: f64) -> State {
    if n == 0 {
        return state.clone();
    }
    let start = if dt < 0.0 {
        reversed(state)
    } else {
        state.clone()
    };
    let traj = march(
        &start,
        n,
        dt.abs(),
        usize::MAX,
        &Diagnostics::none(),
        usize::MAX,
    )
    .expect("march without channels");
    let end = traj.final_state().clone();
    if dt < 0.0 {
        reversed(&end).with_time(state.time() + n as f64 * dt)
    } else {
        end
    }
}

fn reversed(state: &State) -> State {
    State::from_parts(
        state.u().clone(),
        state.ut().scaled(-1.0),
        state.time(),
        state.equation().clone(),
    )
}

struct Recorder {
    diagnostics: Diagnostics,
    quintic: bool,
    weights: Vec<f64>,
    a_r: Vec<f64>,
    a_rr: Vec<f64>,
    neg_vr: Vec<f64>,
    tanh: Vec<f64>,
    sech2: Vec<f64>,
    series: BTreeMap<String, Vec<f64>>,
    u: Vec<f64>,
    ut: Vec<f64>,
}

impl Recorder {
    fn new(red: &Reduced, equation: &EquationSpec, diagnostics: &Diagnostics, cap: usize) -> Self {
        let grid = red.grid;
        let hyperbolic = grid.geometry.is_hyperbolic();
        let nodes = grid.nodes();
        let mut names: Vec<String> = Vec::new();
        if diagnostics.energy {
            for n in [
                channel::ENERGY_V,
                channel::ENERGY_NL,
                channel::ENERGY_SCHEME,
                channel::H_NORM_SQ,
            ] {
                names.push(n.into());
            }
        }
        names.extend(diagnostics.lq.iter().map(|q| channel::lq(*q)));
        if diagnostics.nonlinear_l2 {
            names.push(channel::N_L2.into());
        }
        if diagnostics.morawetz {
            for n in [
                channel::MORAWETZ_BOUNDARY,
                channel::MORAWETZ_GRAD,
                channel::MORAWETZ_ANGULAR,
                channel::MORAWETZ_POTENTIAL,
                channel::MORAWETZ_SEXTIC,
                channel::POTENTIAL_TANH,
            ] {
                names.push(n.into());
            }
        }
        if diagnostics.led {
            names.push(channel::LED.into());
        }
        let series = names
            .into_iter()
            .map(|n| (n, Vec::with_capacity(cap)))
            .collect();
        Self {
            diagnostics: diagnostics.clone(),
            quintic: equation.is_quintic(),
            weights: grid.measure_weights(),
            a_r: nodes
                .iter()
                .map(|&r| if hyperbolic { a_r_d3(r) } else { r / 3.0 })
                .collect(),
            a_rr: nodes
                .iter()
                .map(|&r| if hyperbolic { a_rr_d3(r) } else { 1.0 / 3.0 })
                .collect(),
            neg_vr: nodes
                .iter()
                .map(|&r| -equation.potential_derivative_at(r))
                .collect(),
            tanh: nodes.iter().map(|r| r.tanh()).collect(),
            sech2: nodes
                .iter()
                .map(|r| {
                    let c = r.cosh();
                    1.0 / (c * c)
                })
                .collect(),
            series,
            u: vec![0.0; grid.len()],
            ut: vec![0.0; grid.len()],
        }
    }

    fn push(&mut self, name: &str, value: f64) {
        self.series
            .get_mut(name)
            .expect("registered channel")
            .push(value);
    }

    fn record(&mut self, red: &Reduced, w: &[f64], v: &[f64], a: &[f64], dt: f64) {
        if self.series.is_empty() {
            return;
        }
        if self.diagnostics.energy {
            let e = red.energy(w, v);
            let base = if self.quintic { e.e_nl } else { e.e_v };
            self.push(channel::ENERGY_V, e.e_v);
            self.push(channel::ENERGY_NL, e.e_nl);
            self.push(
                channel::ENERGY_SCHEME,
                base - 0.25 * dt * dt * red.accel_sq(a),
            );
            self.push(channel::H_NORM_SQ, red.h_norm_sq(w, v));
        }
        let needs_u = !self.diagnostics.lq.is_empty()
            || self.diagnostics.nonlinear_l2
            || self.diagnostics.morawetz
            || self.diagnostics.led;
        if !needs_u {
            return;
        }
        for j in 0..w.len() {
            self.u[j] = w[j] * red.inv_warp[j];
            self.ut[j] = v[j] * red.inv_warp[j];
        }
        self.u[0] = (4.0 * self.u[1] - self.u[2]) / 3.0;
        self.ut[0] = (4.0 * self.ut[1] - self.ut[2]) / 3.0;
        let lq = self.diagnostics.lq.clone();
        for q in lq {
            let s: f64 = if q.is_infinite() {
                self.u.iter().fold(0.0, |m, x| m.max(x.abs()))
            } else {
                let s: f64 = self
                    .u
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, wt)| wt * x.abs().powf(q))
                    .sum();
                s.powf(1.0 / q)
            };
            self.push(&channel::lq(q), s);
        }
        if self.diagnostics.nonlinear_l2 {
            let s: f64 = self
                .u
                .iter()
                .zip(&self.weights)
                .map(|(x, wt)| {
                    let x2 = x * x;
                    wt * x2 * x2 * x2 * x2 * x2
                })
                .sum();
            self.push(channel::N_L2, s.sqrt());
        }
        if self.diagnostics.morawetz || self.diagnostics.led {
            let n = w.len() - 1;
            let h = red.h;
            let mut bnd = 0.0;
            let mut grad = 0.0;
            let mut pot = 0.0;
            let mut sext = 0.0;
            let mut tanh_pot = 0.0;
            let mut led = 0.0;
            for j in 0..=n {
                let ur = if j == 0 {
                    0.0
                } else if j == n {
                    (3.0 * self.u[n] - 4.0 * self.u[n - 1] + self.u[n - 2]) / (2.0 * h)
                } else {
                    (self.u[j + 1] - self.u[j - 1]) / (2.0 * h)
                };
                let (u, ut, wt) = (self.u[j], self.ut[j], self.weights[j]);
                bnd += wt * (self.a_r[j] * ut * ur + 0.5 * u * ut);
                grad += wt * self.a_rr[j] * ur * ur;
                pot += wt * 0.5 * self.a_r[j] * self.neg_vr[j] * u * u;
                tanh_pot += wt * self.tanh[j] * self.neg_vr[j] * u * u;
                if self.quintic {
                    let u2 = u * u;
                    sext += wt * u2 * u2 * u2 / 3.0;
                }
                led += wt * self.sech2[j] * (ut * ut + ur * ur);
            }
            if self.diagnostics.morawetz {
                self.push(channel::MORAWETZ_BOUNDARY, bnd);
                self.push(channel::MORAWETZ_GRAD, grad);
                self.push(channel::MORAWETZ_ANGULAR, 0.0);
                self.push(channel::MORAWETZ_POTENTIAL, pot);
                self.push(channel::MORAWETZ_SEXTIC, sext);
                self.push(channel::POTENTIAL_TANH, tanh_pot);
            }
            if self.diagnostics.led {
                self.push(channel::LED, led);
            }
        }
    }

    fn finish(self) -> BTreeMap<String, Vec<f64>> {
        self.series
    }
}
