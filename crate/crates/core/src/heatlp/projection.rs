use serde::{Deserialize, Serialize};

use super::HeatMarcher;
use crate::error::{invalid, Result};
use crate::geom::{lp_norm, radial_derivative, radial_laplacian, Curvature, RadialField};

/// `P_λ f = 2 λ^{-4} Δ² e^{λ^{-2} Δ} f`.
pub fn lp_project(f: &RadialField, lambda: f64) -> Result<RadialField> {
    check_lambda(lambda)?;
    Ok(lp_project_many(f, &[lambda])?.pop().unwrap())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("{lambda} must be >= 1")));
    }
    Ok(())
}

/// `P_λ f` for every λ in `lambdas` (returned in input order), sharing one
/// heat evolution.
pub fn lp_project_many(f: &RadialField, lambdas: &[f64]) -> Result<Vec<RadialField>> {
    for &l in lambdas {
        check_lambda(l)?;
    }
    project_unchecked(f, lambdas)
}

pub(crate) fn project_unchecked(f: &RadialField, lambdas: &[f64]) -> Result<Vec<RadialField>> {
    if f.grid().geometry.kind != Curvature::Hyperbolic {
        return Err(invalid("geometry", "projections are defined on ℍ³"));
    }
    f.grid().geometry.require_solver_dimension()?;
    if lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(invalid("lambda", "must be positive"));
    }
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    // increasing heat time = decreasing λ
    order.sort_by(|&a, &b| lambdas[b].total_cmp(&lambdas[a]));
    let mut marcher = HeatMarcher::new(f);
    let mut out: Vec<Option<RadialField>> = vec![None; lambdas.len()];
    for idx in order {
        let lambda = lambdas[idx];
        marcher.advance_to(lambda.powi(-2));
        debug_assert!(marcher.time() > 0.0);
        let u = marcher.field();
        let mut lap2 = radial_laplacian(&radial_laplacian(&u)).scaled(2.0 * lambda.powi(-4));
        // the origin stencil applied twice is inconsistent; use the even extension
        let v = lap2.values_mut();
        v[0] = (4.0 * v[1] - v[2]) / 3.0;
        out[idx] = Some(lap2);
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

/// Dyadic grid `2^0, ..., 2^{max_exp}`.
pub fn dyadic_lambdas(max_exp: u32) -> Vec<f64> {
    (0..=max_exp).map(|k| 2f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    /// `‖f - Σ P_λ f Δlog λ‖₂ / ‖f‖₂` (absolute when `f = 0`).
    pub relative_l2_defect: f64,
}

/// Approximates `f = ∫ P_λ f dλ/λ` over `[λ_min, λ_max]` with the trapezoid
/// rule in `log λ`. The semigroup formula is used unchanged for λ < 1.
pub fn lp_reconstruct(
    f: &RadialField,
    lambda_min: f64,
    lambda_max: f64,
    n_lambda: usize,
) -> Result<(RadialField, ReconstructionReport)> {
    if !(lambda_min > 0.0 && lambda_max > lambda_min && lambda_max.is_finite()) {
        return Err(invalid(
            "window",
            format!("[{lambda_min}, {lambda_max}] is malformed"),
        ));
    }
    if n_lambda < 16 {
        return Err(invalid("n_lambda", "need at least 16 nodes"));
    }
    let step = (lambda_max / lambda_min).ln() / (n_lambda - 1) as f64;
    let lambdas: Vec<f64> = (0..n_lambda)
        .map(|i| lambda_min * (step * i as f64).exp())
        .collect();
    let pieces = project_unchecked(f, &lambdas)?;
    let grid = *f.grid();
    let mut acc = vec![0.0; grid.len()];
    for (i, p) in pieces.iter().enumerate() {
        let w = if i == 0 || i == n_lambda - 1 {
            0.5 * step
        } else {
            step
        };
        for (a, v) in acc.iter_mut().zip(p.values()) {
            *a += w * v;
        }
    }
    let approx = RadialField::from_raw(grid, acc);
    let diff = approx.axpy(-1.0, &f.to_physical())?;
    let norm_f = lp_norm(f, 2.0)?;
    let defect = lp_norm(&diff, 2.0)?;
    let relative = if norm_f > 0.0 {
        defect / norm_f
    } else {
        defect
    };
    Ok((
        approx,
        ReconstructionReport {
            lambda_min,
            lambda_max,
            n_lambda,
            relative_l2_defect: relative,
        },
    ))
}

/// `B = max_λ max_r λ^{-1/2} |P_λ f(r)|` over the given λ grid.
pub fn refined_sobolev_b(f: &RadialField, lambdas: &[f64]) -> Result<f64> {
    if lambdas.is_empty() {
        return Err(invalid("lambda_grid", "empty"));
    }
    let pieces = lp_project_many(f, lambdas)?;
    Ok(pieces
        .iter()
        .zip(lambdas)
        .map(|(p, l)| p.max_abs() / l.sqrt())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevRecord {
    pub l6: f64,
    pub grad_l2: f64,
    pub b: f64,
    pub ratio: f64,
}

/// `‖f‖₆ / (‖∇f‖₂^{1/3} B^{2/3})` together with its ingredients.
pub fn refined_sobolev_check(f: &RadialField, lambdas: &[f64]) -> Result<SobolevRecord> {
    let u = f.to_physical();
    let l6 = lp_norm(&u, 6.0)?;
    let grad = RadialField::from_raw(*u.grid(), radial_derivative(u.grid(), u.values()));
    let grad_l2 = lp_norm(&grad, 2.0)?;
    let b = refined_sobolev_b(&u, lambdas)?;
    if l6 == 0.0 {
        return Ok(SobolevRecord {
            l6,
            grad_l2,
            b,
            ratio: 0.0,
        });
    }
    if b == 0.0 {
        return Err(invalid(
            "lambda_grid",
            "B vanishes for nonzero f; grid too coarse",
        ));
    }
    Ok(SobolevRecord {
        l6,
        grad_l2,
        b,
        ratio: l6 / (grad_l2.cbrt() * b.powf(2.0 / 3.0)),
    })
}
