use serde::{Deserialize, Serialize};

use super::equation::EquationSpec;
use crate::error::{invalid, Result};
use crate::geom::{smooth_cutoff, Geometry, RadialField, RadialGrid};

/// Radial data generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    #[default]
    Zero,
    /// `A exp(-((r - c)/w)²)`.
    GaussianBump {
        amplitude: f64,
        width: f64,
        center: f64,
    },
    /// `A (1 - (r/a)²)^p` on `r < a`.
    SmoothCutoffPolynomial {
        amplitude: f64,
        radius: f64,
        power: u32,
    },
    /// `A (r / warp r) sech(κ r) χ(2r / a)`, supported in `r <= a`; its
    /// substituted form `w = A r sech(κ r) χ` is the same in both geometries.
    SechProfile {
        amplitude: f64,
        rate: f64,
        radius: f64,
    },
    /// Linear interpolation of samples, zero beyond the last radius.
    Sampled { radii: Vec<f64>, values: Vec<f64> },
}

impl Generator {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        Self::GaussianBump {
            amplitude,
            width,
            center: 0.0,
        }
    }

    pub fn validate(&self, grid: &RadialGrid) -> Result<()> {
        match *self {
            Self::Zero => Ok(()),
            Self::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                if !(width > 0.0) || !amplitude.is_finite() || !(center >= 0.0) {
                    return Err(invalid("gaussian_bump", "need width > 0, center >= 0"));
                }
                if center >= grid.r_max {
                    return Err(invalid(
                        "gaussian_bump.center",
                        format!("center {center} lies outside r_max = {}", grid.r_max),
                    ));
                }
                Ok(())
            }
            Self::SmoothCutoffPolynomial {
                amplitude,
                radius,
                power,
            } => {
                if !(radius > 0.0) || !amplitude.is_finite() || power < 2 {
                    return Err(invalid(
                        "smooth_cutoff_polynomial",
                        "need radius > 0, power >= 2",
                    ));
                }
                Ok(())
            }
            Self::SechProfile {
                amplitude,
                rate,
                radius,
            } => {
                if !(radius > 0.0) || !(rate >= 0.0) || !amplitude.is_finite() {
                    return Err(invalid("sech_profile", "need radius > 0, rate >= 0"));
                }
                Ok(())
            }
            Self::Sampled {
                ref radii,
                ref values,
            } => {
                if radii.len() != values.len() || radii.len() < 2 {
                    return Err(invalid("sampled", "radii and values must match (>= 2)"));
                }
                if radii.windows(2).any(|w| w[1] <= w[0]) || values.iter().any(|v| !v.is_finite()) {
                    return Err(invalid(
                        "sampled",
                        "radii must increase and values be finite",
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, geometry: &Geometry, r: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                let x = (r - center) / width;
                amplitude * (-x * x).exp()
            }
            Self::SmoothCutoffPolynomial {
                amplitude,
                radius,
                power,
            } => {
                let x = r / radius;
                if x < 1.0 {
                    amplitude * (1.0 - x * x).powi(power as i32)
                } else {
                    0.0
                }
            }
            Self::SechProfile {
                amplitude,
                rate,
                radius,
            } => {
                let ratio = if r < 1e-8 { 1.0 } else { r / geometry.warp(r) };
                amplitude * ratio / (rate * r).cosh() * smooth_cutoff(2.0 * r / radius)
            }
            Self::Sampled {
                ref radii,
                ref values,
            } => {
                if r < radii[0] || r > radii[radii.len() - 1] {
                    return 0.0;
                }
                let k = radii.partition_point(|x| *x <= r).clamp(1, radii.len() - 1);
                let t = (r - radii[k - 1]) / (radii[k] - radii[k - 1]);
                (1.0 - t) * values[k - 1] + t * values[k]
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self.clone() {
            Self::Zero => Self::Zero,
            Self::GaussianBump {
                amplitude,
                width,
                center,
            } => Self::GaussianBump {
                amplitude: c * amplitude,
                width,
                center,
            },
            Self::SmoothCutoffPolynomial {
                amplitude,
                radius,
                power,
            } => Self::SmoothCutoffPolynomial {
                amplitude: c * amplitude,
                radius,
                power,
            },
            Self::SechProfile {
                amplitude,
                rate,
                radius,
            } => Self::SechProfile {
                amplitude: c * amplitude,
                rate,
                radius,
            },
            Self::Sampled { radii, values } => Self::Sampled {
                radii,
                values: values.into_iter().map(|v| c * v).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DataSpec {
    #[serde(default)]
    pub u0: Generator,
    #[serde(default)]
    pub u1: Generator,
}

impl DataSpec {
    pub fn position(u0: Generator) -> Self {
        Self {
            u0,
            u1: Generator::Zero,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            u0: self.u0.scaled(c),
            u1: self.u1.scaled(c),
        }
    }
}

/// Solution snapshot `(u, u_t)` at a time, in physical representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    u: RadialField,
    ut: RadialField,
    time: f64,
    equation: EquationSpec,
}

impl State {
    pub fn new(u: RadialField, ut: RadialField, time: f64, equation: EquationSpec) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(invalid("ut", "u and ut must share one grid"));
        }
        if !time.is_finite() {
            return Err(invalid("time", "must be finite"));
        }
        equation.validate_on(u.grid())?;
        Ok(Self {
            u: u.to_physical(),
            ut: ut.to_physical(),
            time,
            equation,
        })
    }

    pub(crate) fn from_parts(
        u: RadialField,
        ut: RadialField,
        time: f64,
        equation: EquationSpec,
    ) -> Self {
        Self {
            u,
            ut,
            time,
            equation,
        }
    }

    pub fn zero(grid: RadialGrid, equation: EquationSpec) -> Result<Self> {
        Self::new(
            RadialField::zeros(grid),
            RadialField::zeros(grid),
            0.0,
            equation,
        )
    }

    pub fn u(&self) -> &RadialField {
        &self.u
    }

    pub fn ut(&self) -> &RadialField {
        &self.ut
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn equation(&self) -> &EquationSpec {
        &self.equation
    }

    pub fn grid(&self) -> &RadialGrid {
        self.u.grid()
    }

    /// Same data, different equation (grids must agree in geometry).
    pub fn with_equation(&self, equation: EquationSpec) -> Result<Self> {
        Self::new(self.u.clone(), self.ut.clone(), self.time, equation)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            u: self.u.scaled(c),
            ut: self.ut.scaled(c),
            ..self.clone()
        }
    }

    /// Largest radius where `u` or `u_t` exceeds `rel_tol` times its maximum.
    pub fn support_radius(&self, rel_tol: f64) -> f64 {
        self.u
            .support_radius(rel_tol)
            .max(self.ut.support_radius(rel_tol))
    }

    /// `self - other` as a state carrying `self`'s equation.
    pub fn difference(&self, other: &State) -> Result<State> {
        Ok(Self {
            u: self.u.axpy(-1.0, &other.u)?,
            ut: self.ut.axpy(-1.0, &other.ut)?,
            ..self.clone()
        })
    }
}

/// Relative size of the data allowed in the outer strip of the grid.
pub const EDGE_TOLERANCE: f64 = 1e-8;

pub fn make_state(data: &DataSpec, equation: &EquationSpec, grid: &RadialGrid) -> Result<State> {
    data.u0.validate(grid)?;
    data.u1.validate(grid)?;
    let u = RadialField::from_fn(*grid, |r| data.u0.value(&grid.geometry, r));
    let ut = RadialField::from_fn(*grid, |r| data.u1.value(&grid.geometry, r));
    let strip = grid.r_max - (10.0 * grid.h).max(0.05 * grid.r_max);
    for (name, f) in [("u0", &u), ("u1", &ut)] {
        let peak = f.max_abs();
        let edge = f
            .values()
            .iter()
            .enumerate()
            .filter(|(j, _)| grid.r(*j) >= strip)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if edge > EDGE_TOLERANCE * peak {
            return Err(invalid(
                if name == "u0" { "data.u0" } else { "data.u1" },
                format!(
                    "data does not vanish near r_max = {}; it reaches r = {:.3}",
                    grid.r_max,
                    f.support_radius(EDGE_TOLERANCE)
                ),
            ));
        }
    }
    State::new(u, ut, 0.0, equation.clone())
}
