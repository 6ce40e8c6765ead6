use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::geom::{smooth_cutoff, Curvature, RadialField};

/// `r / sinh r`, stable near zero and for large `r`.
fn r_over_sinh(r: f64) -> f64 {
    if r < 1e-4 {
        1.0 - r * r / 6.0
    } else if r > 20.0 {
        2.0 * r * (-r).exp() / (1.0 - (-2.0 * r).exp())
    } else {
        r / r.sinh()
    }
}

/// `p_s(r) = (4πs)^{-3/2} (r / sinh r) e^{-s - r²/(4s)}`, the heat kernel of ℍ³.
pub fn heat_kernel_closed_form_d3(r: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid("s", format!("heat time {s} must be positive")));
    }
    if !(r >= 0.0) {
        return Err(invalid("r", "must be nonnegative"));
    }
    Ok(p_unchecked(r, s))
}

#[inline]
fn p_unchecked(r: f64, s: f64) -> f64 {
    (4.0 * PI * s).powf(-1.5) * r_over_sinh(r) * (-s - r * r / (4.0 * s)).exp()
}

/// Davies–Mandouvalos envelope with unit constant:
/// `s^{-d/2} e^{-(d-1)²s/4 - r²/4s - (d-1)r/2} (1+r+s)^{(d-3)/2} (1+r)`.
pub fn heat_kernel_bound_dm(r: f64, s: f64, d: u32) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid("s", format!("heat time {s} must be positive")));
    }
    if d < 2 {
        return Err(invalid("d", "must be at least 2"));
    }
    let dm1 = (d - 1) as f64;
    let expo = -dm1 * dm1 * s / 4.0 - r * r / (4.0 * s) - dm1 * r / 2.0;
    Ok(s.powf(-(d as f64) / 2.0)
        * expo.exp()
        * (1.0 + r + s).powf((d as f64 - 3.0) / 2.0)
        * (1.0 + r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LPKernelSpec {
    pub k: u32,
    pub lambda: f64,
    pub d: u32,
}

impl LPKernelSpec {
    pub fn new(k: u32, lambda: f64) -> Self {
        Self { k, lambda, d: 3 }
    }

    fn validate(&self) -> Result<()> {
        if self.k > 2 {
            return Err(invalid("k", "must be 0, 1 or 2"));
        }
        if !(self.lambda >= 1.0) {
            return Err(invalid("lambda", format!("{} must be >= 1", self.lambda)));
        }
        if self.d != 3 {
            return Err(invalid("d", "closed-form kernels exist for d = 3 only"));
        }
        Ok(())
    }
}

/// `2 (s^k ∂_s^k p_s)(r)` at `s = λ^{-2}`; for `k = 2` this is the
/// convolution kernel of `P_λ`.
pub fn lp_kernel(spec: LPKernelSpec, r: f64) -> Result<f64> {
    spec.validate()?;
    Ok(lp_kernel_unchecked(spec.k, spec.lambda, r))
}

pub(crate) fn lp_kernel_unchecked(k: u32, lambda: f64, r: f64) -> f64 {
    let s = 1.0 / (lambda * lambda);
    let p = p_unchecked(r, s);
    // with g = log p: s g' and s² g''
    let g1 = -1.5 - s + r * r / (4.0 * s);
    match k {
        0 => 2.0 * p,
        1 => 2.0 * p * g1,
        _ => {
            let g2 = 1.5 - r * r / (2.0 * s);
            2.0 * p * (g2 + g1 * g1)
        }
    }
}

/// Convolution `K * f` on ℍ³ for radial `K` and `f`:
/// `(K*f)(r) = (2π / sinh r) ∫ f(r') sinh r' ∫_{|r-r'|}^{r+r'} K(s) sinh s ds dr'`.
///
/// The inner integral is tabulated exactly per grid cell (8-point
/// Gauss–Legendre), the outer one is the trapezoid rule. `K` is taken to
/// vanish beyond `k_support`.
pub fn kernel_convolution(
    f: &RadialField,
    kernel: impl Fn(f64) -> f64,
    k_support: f64,
) -> Result<RadialField> {
    let grid = *f.grid();
    if grid.geometry.kind != Curvature::Hyperbolic {
        return Err(invalid(
            "geometry",
            "kernel convolution is implemented on ℍ³",
        ));
    }
    let u = f.to_physical();
    let fv = u.values();
    let n = grid.intervals;
    let h = grid.h;
    let m_cut = ((k_support / h).ceil() as usize).min(2 * n);
    // Φ_m = ∫_0^{m h} K(s) sinh s ds
    let (x8, w8) = crate::quad::gauss_legendre(8);
    let mut phi = vec![0.0; 2 * n + 1];
    for m in 0..2 * n {
        if m >= m_cut {
            phi[m + 1] = phi[m];
            continue;
        }
        let mid = (m as f64 + 0.5) * h;
        let cell: f64 = x8
            .iter()
            .zip(&w8)
            .map(|(x, w)| {
                let s = mid + 0.5 * h * x;
                w * kernel(s) * s.sinh()
            })
            .sum();
        phi[m + 1] = phi[m] + 0.5 * h * cell;
    }
    let last = fv.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    let sinh: Vec<f64> = (0..=n).map(|j| grid.r(j).sinh()).collect();
    let mut out = vec![0.0; n + 1];
    out[0] = 4.0
        * PI
        * h
        * (1..=last.min(m_cut))
            .map(|j| {
                let wt = if j == n { 0.5 } else { 1.0 };
                wt * kernel(grid.r(j)) * fv[j] * sinh[j] * sinh[j]
            })
            .sum::<f64>();
    for i in 1..=n {
        let lo = i.saturating_sub(m_cut).max(1);
        let hi = (i + m_cut).min(last);
        let mut acc = 0.0;
        for j in lo..=hi {
            let wt = if j == n { 0.5 } else { 1.0 };
            acc += wt * fv[j] * sinh[j] * (phi[i + j] - phi[i.abs_diff(j)]);
        }
        out[i] = 2.0 * PI * h * acc / sinh[i];
    }
    Ok(RadialField::from_raw(grid, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEnvelope {
    pub k: u32,
    /// Fitted polynomial exponent.
    pub n_k: u32,
    /// Fitted constant in `|K| <= C λ³ (1+λ²r²)^{N_k} e^{-λ²r²/4}`.
    pub constant: f64,
}

/// Fits the exponent and constant of the pointwise kernel envelope on a
/// `(λ, r)` sample grid. `N_k` is the least exponent for which the ratio
/// `|K| / envelope` is not larger in the tail `λr > 4` than in the core.
pub fn fit_kernel_envelope(k: u32, lambdas: &[f64], lambda_r: &[f64]) -> Result<KernelEnvelope> {
    if lambdas.is_empty() || lambda_r.is_empty() {
        return Err(invalid("samples", "empty sample grid"));
    }
    for n_k in 0..=8u32 {
        let (mut core, mut tail) = (0.0f64, 0.0f64);
        for &lam in lambdas {
            let spec = LPKernelSpec::new(k, lam);
            for &x in lambda_r {
                let r = x / lam;
                let env = lam.powi(3) * (1.0 + x * x).powi(n_k as i32) * (-x * x / 4.0).exp();
                let ratio = lp_kernel(spec, r)?.abs() / env;
                if x > 4.0 {
                    tail = tail.max(ratio);
                } else {
                    core = core.max(ratio);
                }
            }
        }
        if tail <= core {
            return Ok(KernelEnvelope {
                k,
                n_k,
                constant: core,
            });
        }
    }
    Err(invalid("samples", "no exponent up to 8 fits the envelope"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcNorms {
    pub lambda: f64,
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
    pub tail_h1: f64,
}

/// Scaled Sobolev norms of the `k = 1` kernel and the H¹ norm of its tail
/// `(1 - η(λr/R)) K`, all on ℍ³.
pub fn concpp_norms(lambda: f64, cutoff_radius: f64) -> Result<ConcNorms> {
    let spec = LPKernelSpec::new(1, lambda);
    spec.validate()?;
    if !(cutoff_radius > 0.0) {
        return Err(invalid("R", "must be positive"));
    }
    let x_max = 14.0f64.max(2.0 * cutoff_radius + 14.0);
    let h = 1.0 / (256.0 * lambda);
    let n = (x_max / lambda / h).ceil() as usize;
    let rs: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let k1: Vec<f64> = rs
        .iter()
        .map(|&r| lp_kernel_unchecked(1, lambda, r))
        .collect();
    let lap: Vec<f64> = rs
        .iter()
        .map(|&r| lambda * lambda * lp_kernel_unchecked(2, lambda, r))
        .collect();
    let tail: Vec<f64> = rs
        .iter()
        .zip(&k1)
        .map(|(&r, k)| (1.0 - smooth_cutoff(lambda * r / cutoff_radius)) * k)
        .collect();
    let weights: Vec<f64> = rs
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let s = r.sinh();
            let end = if j == 0 || j == n { 0.5 } else { 1.0 };
            4.0 * PI * s * s * h * end
        })
        .collect();
    let sq = |v: &[f64]| v.iter().zip(&weights).map(|(a, w)| w * a * a).sum::<f64>();
    let deriv = |v: &[f64]| {
        let mut d = vec![0.0; v.len()];
        for j in 1..v.len() - 1 {
            d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
        }
        d
    };
    let l2 = sq(&k1);
    let g2 = sq(&deriv(&k1));
    let d2 = sq(&lap);
    let t1 = sq(&tail) + sq(&deriv(&tail));
    Ok(ConcNorms {
        lambda,
        h0: lambda.powf(-1.5) * l2.sqrt(),
        h1: lambda.powf(-2.5) * (l2 + g2).sqrt(),
        h2: lambda.powf(-3.5) * (l2 + g2 + d2).sqrt(),
        tail_h1: lambda.powf(-2.5) * t1.sqrt(),
    })
}
