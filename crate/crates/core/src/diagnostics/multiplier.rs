use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quad::adaptive_gk;

fn check(r: f64, d: u32) -> Result<()> {
    if d < 2 {
        return Err(invalid("d", format!("dimension {d} must be >= 2")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("radius {r} must be finite and >= 0")));
    }
    Ok(())
}

// ∫₀^r (sinh s / sinh r)^{d-1} g(s) ds, kept ≤ r to avoid overflow. The
// tolerance is purely relative since b_r falls like r e^{-2r}.
fn normalized_integral(r: f64, d: u32, g: impl Fn(f64) -> f64) -> f64 {
    let sr = r.sinh();
    let k = d as i32 - 1;
    adaptive_gk(|s| (s.sinh() / sr).powi(k) * g(s), 0.0, r, 0.0, 1e-13)
}

/// `a_r = sinh^{1-d} r ∫₀^r sinh^{d-1}`, the radial derivative of the
/// solution of `Δa = 1` with `a_r ~ r/d` at the origin.
pub fn multiplier_a_r(r: f64, d: u32) -> Result<f64> {
    check(r, d)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    if d == 3 {
        return Ok(a_r_d3(r));
    }
    Ok(normalized_integral(r, d, |_| 1.0))
}

/// `b_r = sinh^{1-d} r ∫₀^r sinh^{d-1} / cosh²`, from `Δb = 1/cosh² r`.
pub fn multiplier_b_r(r: f64, d: u32) -> Result<f64> {
    check(r, d)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(normalized_integral(r, d, |s| {
        let c = s.cosh();
        1.0 / (c * c)
    }))
}

/// `c² = coth r · b_r`, which coincides with `a_rr`; bounded below by
/// `1/(d cosh² r)`.
pub fn multiplier_c2(r: f64, d: u32) -> Result<f64> {
    check(r, d)?;
    if r == 0.0 {
        return Ok(1.0 / d as f64);
    }
    Ok(multiplier_b_r(r, d)? / r.tanh())
}

/// `M(r) = ∫₀^r sinh^{d-1} / cosh²`.
pub fn multiplier_m(r: f64, d: u32) -> Result<f64> {
    check(r, d)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(multiplier_b_r(r, d)? * r.sinh().powi(d as i32 - 1))
}

/// Closed form in three dimensions: `(sinh r cosh r - r) / (2 sinh² r)`.
pub(crate) fn a_r_d3(r: f64) -> f64 {
    if r < 1e-2 {
        let r2 = r * r;
        return r * (1.0 / 3.0 - r2 * (2.0 / 45.0 - r2 * 2.0 / 315.0));
    }
    let s = r.sinh();
    (s * r.cosh() - r) / (2.0 * s * s)
}

/// `a_rr = 1 - 2 coth(r) a_r` in three dimensions.
pub(crate) fn a_rr_d3(r: f64) -> f64 {
    if r < 1e-2 {
        let r2 = r * r;
        return 1.0 / 3.0 - r2 * (2.0 / 15.0 - r2 * 2.0 / 63.0);
    }
    1.0 - 2.0 * a_r_d3(r) / r.tanh()
}

/// Tabulated multipliers on a set of nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierTable {
    pub d: u32,
    pub r: Vec<f64>,
    pub a_r: Vec<f64>,
    pub b_r: Vec<f64>,
    pub c2: Vec<f64>,
    pub m: Vec<f64>,
}

impl MultiplierTable {
    pub fn build(nodes: &[f64], d: u32) -> Result<Self> {
        let mut t = Self {
            d,
            r: nodes.to_vec(),
            a_r: Vec::with_capacity(nodes.len()),
            b_r: Vec::with_capacity(nodes.len()),
            c2: Vec::with_capacity(nodes.len()),
            m: Vec::with_capacity(nodes.len()),
        };
        for &r in nodes {
            let b = multiplier_b_r(r, d)?;
            t.a_r.push(multiplier_a_r(r, d)?);
            t.b_r.push(b);
            t.c2.push(if r == 0.0 {
                1.0 / d as f64
            } else {
                b / r.tanh()
            });
            t.m.push(b * r.sinh().powi(d as i32 - 1));
        }
        Ok(t)
    }

    /// Nodes (r > 0) where `tanh(r)/d <= a_r <= tanh r` or
    /// `c² = coth(r) b_r` fail.
    pub fn violations(&self) -> Vec<f64> {
        let d = self.d as f64;
        (0..self.r.len())
            .filter(|&j| {
                let r = self.r[j];
                if r == 0.0 {
                    return false;
                }
                let th = r.tanh();
                let a = self.a_r[j];
                let bound = a > 0.0 && a <= th * (1.0 + 1e-12) && a >= th / d * (1.0 - 1e-12);
                let c2 = self.b_r[j] / th;
                let ident = (self.c2[j] - c2).abs() <= 1e-10 * c2.abs();
                !(bound && ident)
            })
            .map(|j| self.r[j])
            .collect()
    }
}
