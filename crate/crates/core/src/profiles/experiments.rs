use serde::{Deserialize, Serialize};

use super::concentrate::{companion_grid, q_m_regularize, rescale_to, t_lambda};
use crate::error::{invalid, HypError, Result};
use crate::geom::{axis_shell_integral, lp_norm, Geometry, RadialField, RadialGrid};
use crate::quad::{gl32_composite, trapezoid_xy};
use crate::solver::{
    energy_norm, energy_norm_distance, evolve, make_state, DataSpec, Diagnostics, EquationSpec,
    Generator, PotentialSpec, State, DEFAULT_CFL,
};

/// Evolution over `[-t, t]` with every step retained, in increasing time.
pub(crate) fn two_sided(state: &State, t: f64) -> Result<Vec<State>> {
    let forward = evolve(state, t, 1, &Diagnostics::none())?;
    let flipped = State::new(
        state.u().clone(),
        state.ut().scaled(-1.0),
        state.time(),
        state.equation().clone(),
    )?;
    let backward = evolve(&flipped, t, 1, &Diagnostics::none())?;
    let mut out: Vec<State> = backward.snapshots[1..]
        .iter()
        .rev()
        .map(|s| {
            State::new(
                s.u().clone(),
                s.ut().scaled(-1.0),
                2.0 * state.time() - s.time(),
                s.equation().clone(),
            )
        })
        .collect::<Result<_>>()?;
    out.extend(forward.snapshots);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanApproxConfig {
    /// Euclidean generator.
    pub base: DataSpec,
    pub lambdas: Vec<f64>,
    pub t0: f64,
    /// Hyperbolic equation (its potential is the `V` of `S_V`).
    pub equation: EquationSpec,
    /// Euclidean grid spacing; the hyperbolic spacing is `h_e / λ`.
    pub h_euclidean: f64,
    /// End of the window for the tail Strichartz norms.
    pub tail_end: f64,
}

impl Default for EuclideanApproxConfig {
    fn default() -> Self {
        Self {
            base: DataSpec::position(Generator::SmoothCutoffPolynomial {
                amplitude: 1.0,
                radius: 1.0,
                power: 6,
            }),
            lambdas: vec![8.0, 32.0, 128.0],
            t0: 1.0,
            equation: EquationSpec::linear(Geometry::hyperbolic())
                .with_potential(PotentialSpec::repulsive_bump(1.0, 1.0)),
            h_euclidean: 1.0 / 128.0,
            tail_end: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanApproxRow {
    pub lambda: f64,
    /// `sup_I ‖u(t) - 𝒯_λ v(λt)‖_𝓗`.
    pub sup_h_error: f64,
    /// `‖u - 𝒯_λ v(λ·)‖_{L⁵(I; L¹⁰)}`.
    pub s_error: f64,
    /// `sup_I ‖u_V(t) - u_0(t)‖_𝓗` between the evolutions with and without `V`.
    pub potential_gap: f64,
    /// `‖(𝒯_λ f, 𝒯_λ g)‖_𝓗 - ‖(f, g)‖_{𝓗_euc}`, absolute.
    pub energy_norm_defect: f64,
    /// `‖u‖_{S((T₀/2λ, T_end))}` and `‖u‖_{S((T₀/λ, T_end))}`.
    pub tail_s_half: f64,
    pub tail_s_full: f64,
}

/// Margin added to the euclidean domain beyond `supp + T₀`.
const EUCLIDEAN_MARGIN: f64 = 6.0;

/// Euclidean solution `v` on `(-T₀, T₀)` from the unregularized base, every
/// step retained. Shared by all λ of a sweep.
pub fn euclidean_reference(cfg: &EuclideanApproxConfig) -> Result<Vec<State>> {
    if !(cfg.t0 > 0.0) {
        return Err(invalid("t0", "must be positive"));
    }
    let reach = base_support(&cfg.base) + cfg.t0 + EUCLIDEAN_MARGIN;
    let egrid = grid_with(Geometry::euclidean(), reach, cfg.h_euclidean)?;
    let eq = EquationSpec {
        geometry: egrid.geometry,
        potential: None,
        nonlinearity: cfg.equation.nonlinearity,
    };
    two_sided(&make_state(&cfg.base, &eq, &egrid)?, cfg.t0)
}

/// Compares `S_V(t) 𝒯_λ(f, g)` with `𝒯_λ v(λt)` on `I = [-T₀/λ, T₀/λ]`.
/// The hyperbolic spacing is `h_e / λ`, so nodes and time steps of both
/// evolutions coincide after rescaling.
pub fn euclidean_approx_row(
    cfg: &EuclideanApproxConfig,
    reference: &[State],
    lambda: f64,
    with_tail: bool,
) -> Result<EuclideanApproxRow> {
    if !(lambda >= 1.0) {
        return Err(invalid("lambda", "must be >= 1"));
    }
    let eq = &cfg.equation;
    if !eq.geometry.is_hyperbolic() {
        return Err(invalid("equation.geometry", "must be hyperbolic"));
    }
    let first = reference
        .first()
        .ok_or_else(|| invalid("reference", "empty euclidean solution"))?;
    let h = cfg.h_euclidean / lambda;
    let r_h = first.grid().r_max / lambda + eq.potential_support();
    let grid = grid_with(eq.geometry, r_h, h)?;
    let egrid = companion_grid(&grid, lambda)?;
    let embed = |s: &State| -> Result<State> {
        State::new(
            RadialField::from_fn(egrid, |r| s.u().eval(r)),
            RadialField::from_fn(egrid, |r| s.ut().eval(r)),
            s.time(),
            s.equation().clone(),
        )
    };
    let base = embed(first_at_zero(reference)?)?;
    let data = t_lambda(&base, lambda, &grid, eq)?;
    let energy_norm_defect = (energy_norm(&data) - energy_norm(&base)).abs();

    let hyper = two_sided(&data, cfg.t0 / lambda)?;
    let hyper_free = two_sided(
        &data.with_equation(eq.without_potential())?,
        cfg.t0 / lambda,
    )?;
    if reference.len() != hyper.len() {
        return Err(invalid("h_euclidean", "time grids did not match"));
    }
    let mut sup = 0.0f64;
    let mut gap = 0.0f64;
    let mut times = Vec::with_capacity(hyper.len());
    let mut s_y = Vec::with_capacity(hyper.len());
    for ((u, v), u0) in hyper.iter().zip(reference).zip(&hyper_free) {
        let model = rescale_to(&q_m_regularize(&embed(v)?, lambda)?, lambda, &grid, eq)?;
        let d = u.difference(&model)?;
        sup = sup.max(energy_norm(&d));
        gap = gap.max(energy_norm_distance(u, &u0.with_equation(eq.clone())?)?);
        times.push(u.time());
        s_y.push(lp_norm(d.u(), 10.0)?.powi(5));
    }
    let s_error = trapezoid_xy(&times, &s_y).powf(0.2);

    let (tail_s_half, tail_s_full) = if with_tail {
        tail_norms(&data, cfg, lambda)?
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(EuclideanApproxRow {
        lambda,
        sup_h_error: sup,
        s_error,
        potential_gap: gap,
        energy_norm_defect,
        tail_s_half,
        tail_s_full,
    })
}

fn first_at_zero(reference: &[State]) -> Result<&State> {
    reference
        .iter()
        .find(|s| s.time() == 0.0)
        .ok_or_else(|| invalid("reference", "no state at t = 0"))
}

fn tail_norms(data: &State, cfg: &EuclideanApproxConfig, lambda: f64) -> Result<(f64, f64)> {
    let g = data.grid();
    let r = data.support_radius(1e-10) + cfg.tail_end + cfg.equation.potential_support() + 1.0;
    let big = grid_with(g.geometry, r, g.h)?;
    let moved = State::new(
        RadialField::from_fn(big, |s| data.u().eval(s)),
        RadialField::from_fn(big, |s| data.ut().eval(s)),
        0.0,
        cfg.equation.clone(),
    )?;
    let traj = evolve(
        &moved,
        cfg.tail_end,
        usize::MAX,
        &Diagnostics::none().with_lq(10.0),
    )?;
    let l10 = traj.lq_channel(10.0)?;
    let tail = |t: f64| {
        let k = traj.times.partition_point(|s| *s < t);
        let y: Vec<f64> = l10[k..].iter().map(|x| x.powi(5)).collect();
        trapezoid_xy(&traj.times[k..], &y).powf(0.2)
    };
    Ok((tail(0.5 * cfg.t0 / lambda), tail(cfg.t0 / lambda)))
}

fn grid_with(geometry: Geometry, r_max: f64, h: f64) -> Result<RadialGrid> {
    let n = (r_max / h).ceil();
    crate::geom::make_radial_grid(geometry, n * h, h)
}

/// Radius beyond which a generator vanishes (or is below `1e-12`).
pub(crate) fn base_support(data: &DataSpec) -> f64 {
    fn one(g: &Generator) -> f64 {
        match g {
            Generator::Zero => 0.0,
            Generator::GaussianBump { width, center, .. } => center + 5.3 * width,
            Generator::SmoothCutoffPolynomial { radius, .. } => *radius,
            Generator::SechProfile { radius, .. } => *radius,
            Generator::Sampled { radii, .. } => radii.last().copied().unwrap_or(0.0),
        }
    }
    one(&data.u0).max(one(&data.u1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelingForcingConfig {
    /// Hyperbolic generator.
    pub base: DataSpec,
    pub rhos: Vec<f64>,
    pub potential: PotentialSpec,
    pub t_end: f64,
    pub h: f64,
    /// Spacing of the snapshots entering the time quadrature.
    pub sample_dt: f64,
}

impl Default for TravelingForcingConfig {
    fn default() -> Self {
        Self {
            base: DataSpec::position(Generator::SmoothCutoffPolynomial {
                amplitude: 1.0,
                radius: 2.0,
                power: 4,
            }),
            rhos: vec![0.0, 2.0, 4.0, 8.0],
            potential: PotentialSpec::repulsive_bump(1.0, 1.0),
            t_end: 20.0,
            h: 0.01,
            sample_dt: 0.05,
        }
    }
}

/// Largest spacing accepted by the forcing quadrature, in space and time.
pub const FORCING_MAX_H: f64 = 0.02;
pub const FORCING_MAX_SAMPLE_DT: f64 = 0.1;

/// `‖V τ_ρ u‖²_{L²(ℍ³)} = 2π ∫ V(r)² sinh²r ∫_{-1}^{1} u(d(r, ρ, c))² dc dr`.
pub fn translated_potential_sq_norm(u: &RadialField, potential: &PotentialSpec, rho: f64) -> f64 {
    let geometry = u.grid().geometry;
    let support = potential.support_radius;
    let s_max = u.grid().r_max;
    let sq = |s: f64| {
        let v = u.eval(s);
        v * v
    };
    let panels = ((support / 0.125).ceil() as usize).max(1);
    2.0 * std::f64::consts::PI
        * gl32_composite(
            |r| {
                let v = potential.value(r);
                if v == 0.0 {
                    return 0.0;
                }
                let w = geometry.warp(r);
                v * v * w * w * axis_shell_integral(&geometry, sq, r, rho, s_max)
            },
            0.0,
            support,
            panels,
        )
}

/// `F(ρ) = ∫₀^{T_end} ‖V τ_ρ u(s)‖_{L²} ds` for each ρ, with `u` the free
/// evolution of the base.
pub fn traveling_forcing(cfg: &TravelingForcingConfig) -> Result<Vec<(f64, f64)>> {
    if !(cfg.h > 0.0 && cfg.h <= FORCING_MAX_H) {
        return Err(HypError::Resolution(format!(
            "forcing quadrature needs h <= {FORCING_MAX_H}, got {}",
            cfg.h
        )));
    }
    if !(cfg.sample_dt > 0.0 && cfg.sample_dt <= FORCING_MAX_SAMPLE_DT) {
        return Err(HypError::Resolution(format!(
            "forcing quadrature needs sample_dt <= {FORCING_MAX_SAMPLE_DT}, got {}",
            cfg.sample_dt
        )));
    }
    if cfg.rhos.is_empty() {
        return Err(invalid("rhos", "schedule is empty"));
    }
    if let Some(r) = cfg.rhos.iter().find(|r| !(**r >= 0.0)) {
        return Err(invalid("rhos", format!("{r} must be >= 0")));
    }
    let eq = EquationSpec::linear(Geometry::hyperbolic());
    let r_max = base_support(&cfg.base) + cfg.t_end + 1.0;
    let grid = grid_with(eq.geometry, r_max, cfg.h)?;
    let state = make_state(&cfg.base, &eq, &grid)?;
    let dt_guess = DEFAULT_CFL * cfg.h;
    let stride = ((cfg.sample_dt / dt_guess).floor() as usize).max(1);
    let traj = evolve(&state, cfg.t_end, stride, &Diagnostics::none())?;
    let times = traj.snapshot_times();
    cfg.rhos
        .iter()
        .map(|&rho| {
            let y: Vec<f64> = traj
                .snapshots
                .iter()
                .map(|s| translated_potential_sq_norm(s.u(), &cfg.potential, rho).sqrt())
                .collect();
            Ok((rho, trapezoid_xy(&times, &y)))
        })
        .collect()
}
