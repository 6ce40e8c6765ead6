use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::{Geometry, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    None,
    /// `F(u) = u⁵`, `G(u) = u⁶/6`, entering as `u_tt - Δu + Vu = -u⁵`.
    DefocusingQuintic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialProfile {
    /// `A (1 - (r/R)²)^p` on `r < R`.
    Bump {
        amplitude: f64,
        radius: f64,
        power: u32,
    },
    /// `A (1 - ((r-c)/w)²)^p` on `|r - c| < w`; not monotone when `c > 0`.
    Shell {
        amplitude: f64,
        center: f64,
        width: f64,
        power: u32,
    },
    /// Linear interpolation of samples, zero beyond the last radius.
    Sampled { radii: Vec<f64>, values: Vec<f64> },
}

impl PotentialProfile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Self::Bump {
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
            Self::Shell {
                amplitude,
                center,
                width,
                power,
            } => {
                let x = (r - center) / width;
                if x.abs() < 1.0 {
                    amplitude * (1.0 - x * x).powi(power as i32)
                } else {
                    0.0
                }
            }
            Self::Sampled {
                ref radii,
                ref values,
            } => sample(radii, values, r),
        }
    }

    pub fn radial_derivative(&self, r: f64) -> f64 {
        match *self {
            Self::Bump {
                amplitude,
                radius,
                power,
            } => {
                let x = r / radius;
                if x < 1.0 && power > 0 {
                    -2.0 * power as f64 * amplitude * x / radius
                        * (1.0 - x * x).powi(power as i32 - 1)
                } else {
                    0.0
                }
            }
            Self::Shell {
                amplitude,
                center,
                width,
                power,
            } => {
                let x = (r - center) / width;
                if x.abs() < 1.0 && power > 0 {
                    -2.0 * power as f64 * amplitude * x / width
                        * (1.0 - x * x).powi(power as i32 - 1)
                } else {
                    0.0
                }
            }
            Self::Sampled {
                ref radii,
                ref values,
            } => {
                let d = 1e-6 * radii.last().copied().unwrap_or(1.0).max(1e-3);
                (sample(radii, values, r + d) - sample(radii, values, (r - d).max(0.0)))
                    / (r + d - (r - d).max(0.0))
            }
        }
    }

    fn natural_support(&self) -> f64 {
        match *self {
            Self::Bump { radius, .. } => radius,
            Self::Shell { center, width, .. } => center + width,
            Self::Sampled { ref radii, .. } => radii.last().copied().unwrap_or(0.0),
        }
    }
}

fn sample(radii: &[f64], values: &[f64], r: f64) -> f64 {
    if radii.is_empty() || r > *radii.last().unwrap() || r < radii[0] {
        return 0.0;
    }
    let k = radii.partition_point(|x| *x <= r);
    if k == 0 {
        return values[0];
    }
    if k == radii.len() {
        return values[k - 1];
    }
    let t = (r - radii[k - 1]) / (radii[k] - radii[k - 1]);
    (1.0 - t) * values[k - 1] + t * values[k]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub profile: PotentialProfile,
    pub support_radius: f64,
    /// Exponential decay rate α₁ (recorded; solvers rely on the support radius).
    pub decay_rate: f64,
    pub nonnegative: bool,
    pub repulsive: bool,
}

impl PotentialSpec {
    /// Nonnegative, radially decreasing bump `A (1 - (r/R)²)³`.
    pub fn repulsive_bump(amplitude: f64, radius: f64) -> Self {
        Self {
            profile: PotentialProfile::Bump {
                amplitude,
                radius,
                power: 3,
            },
            support_radius: radius,
            decay_rate: 1.0,
            nonnegative: amplitude >= 0.0,
            repulsive: amplitude >= 0.0,
        }
    }

    pub fn from_profile(
        profile: PotentialProfile,
        nonnegative: bool,
        repulsive: bool,
    ) -> Result<Self> {
        if let PotentialProfile::Sampled { radii, values } = &profile {
            if radii.len() != values.len() || radii.len() < 2 {
                return Err(invalid(
                    "potential",
                    "sampled radii and values must match (>= 2)",
                ));
            }
            if radii.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("potential", "sampled radii must increase"));
            }
        }
        Ok(Self {
            support_radius: profile.natural_support(),
            profile,
            decay_rate: 1.0,
            nonnegative,
            repulsive,
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        if r > self.support_radius {
            0.0
        } else {
            self.profile.value(r)
        }
    }

    pub fn radial_derivative(&self, r: f64) -> f64 {
        if r > self.support_radius {
            0.0
        } else {
            self.profile.radial_derivative(r)
        }
    }

    /// Checks the flags on the grid nodes: nonnegative means `min V >= -1e-12`,
    /// repulsive means one-sided differences of `V` are `<= 1e-12`.
    pub fn validate_on(&self, grid: &RadialGrid) -> Result<()> {
        if !(self.support_radius >= 0.0) || !(self.decay_rate >= 0.0) {
            return Err(invalid(
                "potential",
                "support radius and decay rate must be >= 0",
            ));
        }
        let v: Vec<f64> = (0..grid.len()).map(|j| self.value(grid.r(j))).collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(invalid("potential", "non-finite values"));
        }
        if self.nonnegative && v.iter().any(|x| *x < -1e-12) {
            return Err(invalid(
                "potential.nonnegative",
                "V takes negative values on the grid",
            ));
        }
        if self.repulsive && v.windows(2).any(|w| (w[1] - w[0]) / grid.h > 1e-12) {
            return Err(invalid(
                "potential.repulsive",
                "V increases somewhere on the grid",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationSpec {
    pub geometry: Geometry,
    pub potential: Option<PotentialSpec>,
    pub nonlinearity: Nonlinearity,
}

impl EquationSpec {
    pub fn linear(geometry: Geometry) -> Self {
        Self {
            geometry,
            potential: None,
            nonlinearity: Nonlinearity::None,
        }
    }

    pub fn quintic(geometry: Geometry) -> Self {
        Self {
            geometry,
            potential: None,
            nonlinearity: Nonlinearity::DefocusingQuintic,
        }
    }

    pub fn with_potential(mut self, potential: PotentialSpec) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn without_potential(&self) -> Self {
        Self {
            potential: None,
            ..self.clone()
        }
    }

    pub fn free(&self) -> Self {
        Self::linear(self.geometry)
    }

    pub fn mass_shift(&self) -> f64 {
        self.geometry.mass_shift
    }

    pub fn is_free(&self) -> bool {
        self.potential.is_none() && self.nonlinearity == Nonlinearity::None
    }

    pub fn is_quintic(&self) -> bool {
        self.nonlinearity == Nonlinearity::DefocusingQuintic
    }

    pub fn potential_at(&self, r: f64) -> f64 {
        self.potential.as_ref().map_or(0.0, |p| p.value(r))
    }

    pub fn potential_derivative_at(&self, r: f64) -> f64 {
        self.potential
            .as_ref()
            .map_or(0.0, |p| p.radial_derivative(r))
    }

    pub fn potential_support(&self) -> f64 {
        self.potential.as_ref().map_or(0.0, |p| p.support_radius)
    }

    pub fn validate_on(&self, grid: &RadialGrid) -> Result<()> {
        if grid.geometry != self.geometry {
            return Err(invalid("geometry", "equation and grid geometries differ"));
        }
        self.geometry.require_solver_dimension()?;
        if let Some(p) = &self.potential {
            p.validate_on(grid)?;
        }
        Ok(())
    }
}
