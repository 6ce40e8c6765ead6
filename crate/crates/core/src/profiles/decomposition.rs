use serde::{Deserialize, Serialize};

use super::concentrate::{companion_grid, t_lambda};
use crate::error::{invalid, Result};
use crate::geom::{axis_shell_integral, Curvature, RadialField, RadialGrid};
use crate::solver::{energy, make_state, propagate, DataSpec, EquationSpec, Nonlinearity, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Perturbed hyperbolic profile, evolved by `S_V`.
    Stationary,
    /// Free hyperbolic profile translated a distance `ρ` from the origin.
    Traveling,
    /// Euclidean profile concentrated at scale `1/λ` by `𝒯_λ`.
    Concentrating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    #[serde(default)]
    pub t_shift: f64,
    #[serde(default)]
    pub translation: f64,
    #[serde(default = "one")]
    pub scale: f64,
    /// Euclidean generator for concentrating profiles, hyperbolic otherwise.
    pub base: DataSpec,
}

fn one() -> f64 {
    1.0
}

impl ProfileSpec {
    pub fn stationary(base: DataSpec) -> Self {
        Self {
            kind: ProfileKind::Stationary,
            t_shift: 0.0,
            translation: 0.0,
            scale: 1.0,
            base,
        }
    }

    pub fn traveling(base: DataSpec, rho: f64) -> Self {
        Self {
            kind: ProfileKind::Traveling,
            translation: rho,
            ..Self::stationary(base)
        }
    }

    pub fn concentrating(base: DataSpec, lambda: f64) -> Self {
        Self {
            kind: ProfileKind::Concentrating,
            scale: lambda,
            ..Self::stationary(base)
        }
    }

    pub fn with_t_shift(mut self, t: f64) -> Self {
        self.t_shift = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t_shift.is_finite() {
            return Err(invalid("t_shift", "must be finite"));
        }
        if !(self.translation >= 0.0 && self.translation.is_finite()) {
            return Err(invalid("translation", "must be finite and >= 0"));
        }
        if !(self.scale >= 1.0 && self.scale.is_finite()) {
            return Err(invalid("scale", "must be finite and >= 1"));
        }
        match self.kind {
            ProfileKind::Stationary if self.translation != 0.0 || self.scale != 1.0 => Err(
                invalid("kind", "stationary profiles have translation 0 and scale 1"),
            ),
            ProfileKind::Traveling if self.translation <= 0.0 => {
                Err(invalid("translation", "traveling profiles need ρ > 0"))
            }
            ProfileKind::Concentrating if self.scale <= 1.0 => {
                Err(invalid("scale", "concentrating profiles need λ > 1"))
            }
            _ => Ok(()),
        }
    }

    /// Data of the profile at time zero on the hyperbolic `grid`, carrying
    /// `equation`. The time shift is applied with the linear flow (`S_V` for
    /// stationary profiles, the free flow otherwise).
    pub fn build(&self, grid: &RadialGrid, equation: &EquationSpec) -> Result<State> {
        self.validate()?;
        if grid.geometry.kind != Curvature::Hyperbolic {
            return Err(invalid("grid", "profiles live on ℍ³"));
        }
        let free = equation.free();
        let (data, flow) = match self.kind {
            ProfileKind::Stationary => {
                let linear = EquationSpec {
                    nonlinearity: Nonlinearity::None,
                    ..equation.clone()
                };
                (make_state(&self.base, &linear, grid)?, linear)
            }
            ProfileKind::Traveling => (self.translated(grid, &free)?, free),
            ProfileKind::Concentrating => {
                let egrid = companion_grid(grid, self.scale)?;
                let eq = EquationSpec::linear(egrid.geometry);
                let base = make_state(&self.base, &eq, &egrid)?;
                (t_lambda(&base, self.scale, grid, &free)?, free)
            }
        };
        let shifted = propagate(&data.with_equation(flow)?, -self.t_shift, true)?;
        shifted.with_time(0.0).with_equation(equation.clone())
    }

    /// Spherical mean over the sphere of radius `r` of the base translated a
    /// distance `ρ`: `½ ∫_{-1}^{1} f(d(r, ρ, c)) dc`.
    fn translated(&self, grid: &RadialGrid, equation: &EquationSpec) -> Result<State> {
        let rho = self.translation;
        let geometry = grid.geometry;
        let mean = |g: &crate::solver::Generator| -> Result<RadialField> {
            g.validate(grid)?;
            let f = |s: f64| g.value(&geometry, s);
            Ok(RadialField::from_fn(*grid, |r| {
                0.5 * axis_shell_integral(&geometry, f, r, rho, grid.r_max)
            }))
        };
        State::new(
            mean(&self.base.u0)?,
            mean(&self.base.u1)?,
            0.0,
            equation.clone(),
        )
    }
}

/// A profile indexed by `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSequence {
    pub profiles: Vec<ProfileSpec>,
}

impl ProfileSequence {
    /// Validates every entry and that all entries share one kind and the
    /// diverging parameter (λ, ρ or |t|) is nondecreasing.
    pub fn new(profiles: Vec<ProfileSpec>) -> Result<Self> {
        let first = profiles
            .first()
            .ok_or_else(|| invalid("profiles", "schedule is empty"))?;
        for p in &profiles {
            p.validate()?;
            if p.kind != first.kind {
                return Err(invalid("kind", "a schedule has one profile kind"));
            }
        }
        let key = |p: &ProfileSpec| match p.kind {
            ProfileKind::Concentrating => p.scale,
            ProfileKind::Traveling => p.translation,
            ProfileKind::Stationary => p.t_shift.abs(),
        };
        if profiles.windows(2).any(|w| key(&w[1]) < key(&w[0])) {
            return Err(invalid("profiles", "schedule is not monotone"));
        }
        Ok(Self { profiles })
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> ProfileSpec) -> Result<Self> {
        Self::new((0..len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// `|log(λ₁/λ₂)| → ∞`.
    ScaleRatio,
    /// `λ|t₁ - t₂| + λ|ρ₁ - ρ₂| → ∞` at comparable scales.
    SpaceTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orthogonality {
    pub alternative: Alternative,
    /// The diverging quantity along the schedule.
    pub measures: Vec<f64>,
}

pub fn scale_ratio_measure(a: &ProfileSpec, b: &ProfileSpec) -> f64 {
    (a.scale / b.scale).ln().abs()
}

pub fn space_time_measure(a: &ProfileSpec, b: &ProfileSpec) -> f64 {
    let lambda = (a.scale * b.scale).sqrt();
    lambda * ((a.t_shift - b.t_shift).abs() + (a.translation - b.translation).abs())
}

/// Which orthogonality alternative diverges along the two schedules: the
/// measure must increase strictly over at least two indices.
pub fn orthogonality(a: &ProfileSequence, b: &ProfileSequence) -> Result<Orthogonality> {
    let len = a.len().min(b.len());
    if len < 2 {
        return Err(invalid(
            "schedule",
            "need at least two indices to judge divergence",
        ));
    }
    let pairs: Vec<(&ProfileSpec, &ProfileSpec)> = a.profiles.iter().zip(&b.profiles).collect();
    for (alt, m) in [
        (
            Alternative::ScaleRatio,
            scale_ratio_measure as fn(&ProfileSpec, &ProfileSpec) -> f64,
        ),
        (Alternative::SpaceTime, space_time_measure),
    ] {
        let measures: Vec<f64> = pairs.iter().map(|(x, y)| m(x, y)).collect();
        if measures.windows(2).all(|w| w[1] > w[0]) {
            return Ok(Orthogonality {
                alternative: alt,
                measures,
            });
        }
    }
    Err(invalid(
        "schedule",
        "parameters are not orthogonal: neither the scale ratio nor λ(|Δt| + |Δρ|) diverges",
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    pub state: State,
    pub parts: Vec<State>,
    pub orthogonality: Orthogonality,
}

/// Sum of the two profiles at index `n` on `grid`.
pub fn orthogonal_superposition(
    a: &ProfileSequence,
    b: &ProfileSequence,
    n: usize,
    grid: &RadialGrid,
    equation: &EquationSpec,
) -> Result<Superposition> {
    let orthogonality = orthogonality(a, b)?;
    let (pa, pb) = match (a.profiles.get(n), b.profiles.get(n)) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(invalid("n", format!("index {n} is beyond the schedule"))),
    };
    let parts = vec![pa.build(grid, equation)?, pb.build(grid, equation)?];
    Ok(Superposition {
        state: superpose(&parts)?,
        parts,
        orthogonality,
    })
}

/// Pointwise sum of states on one grid; the first state's equation is kept.
pub fn superpose(parts: &[State]) -> Result<State> {
    let first = parts.first().ok_or_else(|| invalid("parts", "empty"))?;
    let mut u = first.u().clone();
    let mut ut = first.ut().clone();
    for p in &parts[1..] {
        u = u.axpy(1.0, p.u())?;
        ut = ut.axpy(1.0, p.ut())?;
    }
    State::new(u, ut, first.time(), first.equation().clone())
}

/// `|E_V(state) - Σ E_V(part)| / Σ E_V(part)`.
pub fn pythagorean_check(state: &State, parts: &[State]) -> Result<f64> {
    let sum = superpose(parts)?;
    let diff = state.difference(&sum)?;
    let scale = state.u().max_abs().max(state.ut().max_abs());
    if diff.u().max_abs().max(diff.ut().max_abs()) > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(invalid("parts", "parts do not sum to the state"));
    }
    let total = energy(state).e_v;
    let pieces: f64 = parts.iter().map(|p| energy(p).e_v).sum();
    Ok(if pieces > 0.0 {
        (total - pieces).abs() / pieces
    } else {
        (total - pieces).abs()
    })
}
