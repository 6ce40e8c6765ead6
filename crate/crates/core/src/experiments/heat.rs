use std::time::Instant;

use super::{grid_up, table, Settings};
use crate::error::Result;
use crate::geom::{lp_norm, Geometry, RadialField};
use crate::heatlp::{
    heat_evolve, heat_kernel_closed_form_d3, kernel_convolution, lp_kernel, lp_project,
    lp_reconstruct, refined_sobolev_check, LPKernelSpec,
};
use crate::profiles::t_lambda;
use crate::report::{loglog_slope, Check, ExperimentReport, MetricRow, PlotKind, Threshold};
use crate::solver::{make_state, DataSpec, EquationSpec, Generator};

fn rel_l2(a: &RadialField, b: &RadialField) -> Result<f64> {
    Ok(lp_norm(&a.axpy(-1.0, b)?, 2.0)? / lp_norm(b, 2.0)?)
}

fn mass(f: &RadialField) -> f64 {
    let w = f.grid().measure_weights();
    f.values().iter().zip(&w).map(|(v, w)| v * w).sum()
}

/// Heat flow of the narrow kernel `p_ε` against the closed form `p_{1/2}`.
pub fn heat_kernel(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("heat_kernel");
    let hs = settings.schedule_or(&[4e-3, 2e-3, 1e-3])?;
    let r_max = settings.r_max.unwrap_or(10.0);
    let s = settings.t_or(0.5);
    let eps = 5e-3;
    report.param("r_max", r_max);
    report.param("s", s);
    report.param("epsilon", eps);
    let mut errors = Vec::new();
    let mut slowest = 0.0f64;
    for &h in &hs {
        let start = Instant::now();
        let grid = grid_up(Geometry::hyperbolic(), r_max, h)?;
        let f = RadialField::from_fn(grid, |r| heat_kernel_closed_form_d3(r, eps).unwrap_or(0.0));
        let out = heat_evolve(&f, s - eps)?;
        let exact = RadialField::from_fn(grid, |r| heat_kernel_closed_form_d3(r, s).unwrap_or(0.0));
        let err = rel_l2(&out, &exact)?;
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        errors.push(err);
        report.rows.push(
            MetricRow::new(format!("h={h}"))
                .with("h", h)
                .with("rel_l2_error", err)
                .with("mass", mass(&out))
                .with("seconds", secs),
        );
    }
    let order = loglog_slope(&hs, &errors);
    let finest = hs
        .iter()
        .zip(&errors)
        .min_by(|a, b| a.0.total_cmp(b.0))
        .map(|p| *p.1)
        .unwrap_or(f64::NAN);
    let mut series = table(
        "heat_kernel_error",
        &["h", "rel_l2_error"],
        &[&hs, &errors],
        PlotKind::LogLog,
    );
    series.fit = Some((
        finest / hs.iter().cloned().fold(f64::MAX, f64::min).powf(order),
        order,
    ));
    report.series.push(series);
    report.check(Check::new(
        "rel_l2_error_finest",
        finest,
        Threshold::at_most(settings.tol("rel_l2_error_finest", 1e-2)),
    ));
    report.check(Check::new(
        "order",
        order,
        Threshold::at_least(settings.tol("order", 1.5)),
    ));
    report.check(Check::new(
        "seconds",
        slowest,
        Threshold::at_most(settings.tol("seconds", 10.0)),
    ));
    Ok(report)
}

/// Five smooth bumps `(amplitude, width, center)` used as generic heat data.
const HEAT_DATA: [(f64, f64, f64); 5] = [
    (1.0, 1.0, 0.0),
    (1.0, 0.5, 0.0),
    (2.0, 0.7, 1.5),
    (0.5, 1.2, 3.0),
    (1.0, 0.4, 5.0),
];

/// `‖e^{sΔ} f‖₂ / ‖f‖₂` against the spectral-gap bound `e^{-s}`.
pub fn spectral_gap(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("spectral_gap");
    let times = settings.schedule_or(&[1.0, 2.0, 4.0])?;
    let h = settings.h_or(0.01);
    let grid = grid_up(Geometry::hyperbolic(), settings.r_max.unwrap_or(30.0), h)?;
    let slack = settings.tol("relative_slack", 1e-3);
    report.param("h", h);
    report.param("r_max", grid.r_max);
    let mut worst = f64::NEG_INFINITY;
    for (i, &(a, w, c)) in HEAT_DATA.iter().enumerate() {
        let f = RadialField::from_fn(grid, |r| a * (-((r - c) / w).powi(2)).exp());
        let n0 = lp_norm(&f, 2.0)?;
        let m0 = mass(&f);
        for &s in &times {
            let out = heat_evolve(&f, s)?;
            let ratio = lp_norm(&out, 2.0)? / n0;
            let bound = (-s).exp();
            worst = worst.max(ratio / bound - 1.0);
            report.rows.push(
                MetricRow::new(format!("datum={i},s={s}"))
                    .with("s", s)
                    .with("l2_ratio", ratio)
                    .with("bound", bound)
                    .with("l1_mass_ratio", mass(&out) / m0),
            );
        }
    }
    report
        .notes
        .push("the L¹ mass ratio is reported only; the heat semigroup preserves mass on ℍ³".into());
    report.check(Check::new(
        "max_excess_over_bound",
        worst,
        Threshold::at_most(slack),
    ));
    Ok(report)
}

/// Semigroup `P_λ` against kernel convolution, and the reconstruction window.
pub fn littlewood_paley(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("littlewood_paley");
    let lambdas = settings.schedule_or(&[2.0, 8.0, 32.0])?;
    let h = settings.h_or(2e-3);
    let grid = grid_up(Geometry::hyperbolic(), settings.r_max.unwrap_or(10.0), h)?;
    report.param("h", h);
    report.param("r_max", grid.r_max);
    let f = RadialField::from_fn(grid, |r| (-(r / 0.5).powi(2)).exp() * (1.0 + 0.3 * r * r));
    let mut worst = 0.0f64;
    for &lambda in &lambdas {
        let a = lp_project(&f, lambda)?;
        let spec = LPKernelSpec::new(2, lambda);
        let k = move |r: f64| lp_kernel(spec, r).unwrap_or(0.0);
        let b = kernel_convolution(&f, k, 14.0 / lambda)?;
        let err = rel_l2(&a, &b)?;
        worst = worst.max(err);
        report.rows.push(
            MetricRow::new(format!("lambda={lambda}"))
                .with("lambda", lambda)
                .with("rel_l2_disagreement", err),
        );
    }
    let bump = RadialField::from_fn(grid, |r| {
        if r < 1.5 {
            (1.0 - (r / 1.5).powi(2)).powi(6)
        } else {
            0.0
        }
    });
    let (_, rec) = lp_reconstruct(&bump, 1.0 / 16.0, 256.0, 64)?;
    report.rows.push(
        MetricRow::new("reconstruction")
            .with("lambda_min", rec.lambda_min)
            .with("lambda_max", rec.lambda_max)
            .with("relative_l2_defect", rec.relative_l2_defect),
    );
    report.check(Check::new(
        "max_disagreement",
        worst,
        Threshold::at_most(settings.tol("max_disagreement", 0.02)),
    ));
    report.check(Check::new(
        "reconstruction_defect",
        rec.relative_l2_defect,
        Threshold::at_most(settings.tol("reconstruction_defect", 0.05)),
    ));
    Ok(report)
}

/// Centered gaussians spread over scales. Radial shells `exp(-((r - c)/w)²)`
/// are spherical means of translates, not translates, and are left out.
const SPREAD_WIDTHS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Nodes across the concentrated bump when sampling `𝒯_λ g`.
const SOBOLEV_NODES: f64 = 128.0;

/// The refined Sobolev ratio over `𝒯_λ g` and five spread bumps.
pub fn refined_sobolev(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("refined_sobolev");
    let lambdas = settings.schedule_or(&[1.0, 4.0, 16.0, 64.0, 256.0])?;
    let base = settings.data_or(DataSpec::position(Generator::SmoothCutoffPolynomial {
        amplitude: 1.0,
        radius: 1.0,
        power: 6,
    }));
    let mut ratios = Vec::new();
    for &lambda in &lambdas {
        // B is a supremum over λ' ≥ 1; pieces far below λ carry no mass
        let lo = (lambda / 16.0).max(1.0);
        let probe: Vec<f64> = dyadic_between(lo, 16.0 * lambda);
        let h = 1.0 / (lambda * SOBOLEV_NODES);
        let r_max = (2.0 + 12.0 / lo).max(4.0 / lambda);
        let grid = grid_up(Geometry::hyperbolic(), r_max, h)?;
        let egrid = crate::profiles::companion_grid(&grid, lambda)?;
        let eq = EquationSpec::linear(Geometry::euclidean());
        let g = make_state(&base, &eq, &egrid)?;
        let f = t_lambda(
            &g,
            lambda,
            &grid,
            &EquationSpec::linear(Geometry::hyperbolic()),
        )?;
        let rec = refined_sobolev_check(f.u(), &probe)?;
        ratios.push(rec.ratio);
        report.rows.push(
            MetricRow::new(format!("T_lambda,lambda={lambda}"))
                .with("lambda", lambda)
                .with("l6", rec.l6)
                .with("grad_l2", rec.grad_l2)
                .with("b", rec.b)
                .with("ratio", rec.ratio),
        );
    }
    let grid = grid_up(Geometry::hyperbolic(), 24.0, settings.h_or(2e-3))?;
    let probe = dyadic_between(1.0, 256.0);
    for w in SPREAD_WIDTHS {
        let f = RadialField::from_fn(grid, |r| (-(r / w).powi(2)).exp());
        let rec = refined_sobolev_check(&f, &probe)?;
        ratios.push(rec.ratio);
        report.rows.push(
            MetricRow::new(format!("bump,width={w}"))
                .with("width", w)
                .with("l6", rec.l6)
                .with("grad_l2", rec.grad_l2)
                .with("b", rec.b)
                .with("ratio", rec.ratio),
        );
    }
    let finite = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    report.check(Check::holds("finite", finite));
    report.check(Check::new(
        "max_over_min",
        hi / lo,
        Threshold::at_most(settings.tol("max_over_min", 2.0)),
    ));
    Ok(report)
}

fn dyadic_between(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut l = lo;
    while l <= hi * (1.0 + 1e-12) {
        out.push(l);
        l *= 2.0;
    }
    out
}
