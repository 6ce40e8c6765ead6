use serde::{Deserialize, Serialize};

use super::reduced::Reduced;
use super::state::State;
use crate::error::Result;
use crate::geom::Geometry;

/// Energy pieces; `E_V = kinetic + gradient + potential_term` and
/// `E_nl = E_V + sextic`. The mass shift enters `potential_term` as `½μ∫u²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub e_v: f64,
    pub e_nl: f64,
    pub kinetic: f64,
    pub gradient: f64,
    pub potential_term: f64,
    pub sextic: f64,
}

impl EnergyRecord {
    /// The conserved quantity of the equation: `E_nl` when quintic, else `E_V`.
    pub fn conserved(&self, quintic: bool) -> f64 {
        if quintic {
            self.e_nl
        } else {
            self.e_v
        }
    }
}

/// Energies by summation over the substituted variable, with the gradient
/// taken by forward differences (the discrete energy of the solver).
pub fn energy(state: &State) -> EnergyRecord {
    let red = Reduced::new(state.equation(), state.grid());
    let w = red.to_substituted(state.u().values());
    let v = red.to_substituted(state.ut().values());
    red.energy(&w, &v)
}

/// `‖(u, u_t)‖_𝓗` with `‖·‖²_𝓗 = ∫ u_r² + u_t² dμ`.
pub fn energy_norm(state: &State) -> f64 {
    let red = Reduced::new(state.equation(), state.grid());
    let w = red.to_substituted(state.u().values());
    let v = red.to_substituted(state.ut().values());
    red.h_norm_sq(&w, &v).sqrt()
}

/// `‖a - b‖_𝓗`.
pub fn energy_norm_distance(a: &State, b: &State) -> Result<f64> {
    Ok(energy_norm(&a.difference(b)?))
}

/// Constant `κ` with `∫ u_r² + μ u² >= κ ∫ u_r²`.
pub fn spectral_constant(geometry: &Geometry) -> f64 {
    if geometry.is_hyperbolic() {
        1.0 + geometry.mass_shift.min(0.0)
    } else {
        1.0
    }
}
