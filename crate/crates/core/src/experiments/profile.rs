use std::time::Instant;

use super::{diagnostic_series, grid_up, nearest_snapshot, table, Settings};
use crate::error::Result;
use crate::geom::Geometry;
use crate::heatlp::dyadic_lambdas;
use crate::profiles::{
    self, euclidean_approx_row, euclidean_reference, extract_profiles, nu_functional,
    orthogonal_superposition, pythagorean_check, superpose, EuclideanApproxConfig, ProfileSequence,
    ProfileSpec, TravelingForcingConfig,
};
use crate::report::{
    loglog_slope, strictly_decreasing, Check, ExperimentReport, MetricRow, PlotKind, Threshold,
};
use crate::solver::{
    channel, energy, energy_norm, evolve, evolve_with, make_state, scattering_defect,
    spectral_constant, strichartz_running, DataSpec, Diagnostics, EquationSpec, Generator,
    PotentialSpec, SolverOptions, State, Trajectory,
};

fn hyp() -> Geometry {
    Geometry::hyperbolic()
}

fn bump(radius: f64) -> DataSpec {
    DataSpec::position(Generator::SmoothCutoffPolynomial {
        amplitude: 1.0,
        radius,
        power: 6,
    })
}

/// `S_V 𝒯_λ(f, g)` against the rescaled euclidean solution along λ.
pub fn euclidean_approx(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("euclidean_approx");
    let start = Instant::now();
    let mut cfg = EuclideanApproxConfig::default();
    cfg.lambdas = settings.schedule_or(&cfg.lambdas)?;
    cfg.t0 = settings.t_or(cfg.t0);
    if let Some(eq) = &settings.equation {
        cfg.equation = eq.clone();
    }
    if let Some(d) = &settings.data {
        cfg.base = d.clone();
    }
    if let Some(h) = settings.h {
        cfg.h_euclidean = h;
    }
    report.param("t0", cfg.t0);
    report.param("h_euclidean", cfg.h_euclidean);
    report.param("quintic", cfg.equation.is_quintic());
    let reference = euclidean_reference(&cfg)?;
    let mut lambdas = Vec::new();
    let mut errors = Vec::new();
    for &lambda in &cfg.lambdas {
        let row = euclidean_approx_row(&cfg, &reference, lambda, false)?;
        lambdas.push(lambda);
        errors.push(row.sup_h_error);
        report.rows.push(
            MetricRow::new(format!("lambda={lambda}"))
                .with("lambda", lambda)
                .with("sup_h_error", row.sup_h_error)
                .with("s_error", row.s_error)
                .with("potential_gap", row.potential_gap)
                .with("energy_norm_defect", row.energy_norm_defect),
        );
    }
    let order = loglog_slope(&lambdas, &errors);
    let secs = start.elapsed().as_secs_f64();
    let mut series = table(
        "euclidean_approx_error",
        &["lambda", "sup_h_error"],
        &[&lambdas, &errors],
        PlotKind::LogLog,
    );
    if lambdas.len() < 2 {
        report.series.push(series);
        report
            .notes
            .push("a single scale: no monotonicity or order check".into());
    } else {
        series.fit = Some((errors[0] / lambdas[0].powf(order), order));
        report.series.push(series);
        report.check(Check::holds(
            "strictly_decreasing",
            strictly_decreasing(&errors),
        ));
        report.check(Check::new(
            "lambda_order",
            order,
            Threshold::within(
                settings.tol("lambda_order_min", -1.0),
                settings.tol("lambda_order_max", -0.25),
            ),
        ));
    }
    report.check(Check::new(
        "seconds",
        secs,
        Threshold::at_most(settings.tol("seconds", 300.0)),
    ));
    Ok(report)
}

/// Forcing integral `F(ρ)` of a translated free wave against `V`.
pub fn traveling_forcing(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("traveling_forcing");
    let mut cfg = TravelingForcingConfig::default();
    cfg.rhos = settings.schedule_or(&cfg.rhos)?;
    cfg.h = settings.h_or(cfg.h);
    cfg.t_end = settings.t_or(cfg.t_end);
    if let Some(d) = &settings.data {
        cfg.base = d.clone();
    }
    if let Some(p) = settings.equation.as_ref().and_then(|e| e.potential.clone()) {
        cfg.potential = p;
    }
    report.param("h", cfg.h);
    report.param("t_end", cfg.t_end);
    let values = profiles::traveling_forcing(&cfg)?;
    let (rhos, f): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
    for (rho, v) in rhos.iter().zip(&f) {
        report.rows.push(
            MetricRow::new(format!("rho={rho}"))
                .with("rho", *rho)
                .with("forcing", *v),
        );
    }
    report.series.push(table(
        "forcing",
        &["rho", "F"],
        &[&rhos, &f],
        PlotKind::SemiLogY,
    ));
    report.check(Check::holds("strictly_decreasing", strictly_decreasing(&f)));
    let ratio = f.last().copied().unwrap_or(f64::NAN) / f[0];
    report.check(Check::new(
        "last_over_first",
        ratio,
        Threshold::at_most(settings.tol("last_over_first", 0.1)),
    ));
    Ok(report)
}

/// Energy splitting for orthogonal pairs (scale ratio, translation) and for
/// a colliding pair.
pub fn pythagorean(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("pythagorean");
    let eq = EquationSpec::linear(hyp());
    let base = settings.data_or(bump(1.5));
    let limit = settings.tol("orthogonal_defect", 0.05);

    let grid = grid_up(hyp(), 2.0, 1.0 / 8192.0)?;
    let lambdas = [8.0, 32.0, 128.0];
    let a = ProfileSequence::from_fn(lambdas.len(), |_| {
        ProfileSpec::concentrating(base.clone(), 2.0)
    })?;
    let b = ProfileSequence::from_fn(lambdas.len(), |n| {
        ProfileSpec::concentrating(base.clone(), lambdas[n])
    })?;
    let sup = orthogonal_superposition(&a, &b, lambdas.len() - 1, &grid, &eq)?;
    let scale_defect = pythagorean_check(&sup.state, &sup.parts)?;
    report.rows.push(
        MetricRow::new("scale_ratio=64")
            .with("defect", scale_defect)
            .with(
                "measure",
                *sup.orthogonality.measures.last().unwrap_or(&f64::NAN),
            ),
    );
    report.check(Check::new(
        "scale_ratio_64",
        scale_defect,
        Threshold::at_most(limit),
    ));

    let collide = superpose(&[sup.parts[1].clone(), sup.parts[1].clone()])?;
    let collide_defect =
        pythagorean_check(&collide, &[sup.parts[1].clone(), sup.parts[1].clone()])?;
    report
        .rows
        .push(MetricRow::new("colliding").with("defect", collide_defect));
    report.check(Check::new(
        "colliding",
        collide_defect,
        Threshold::at_least(settings.tol("colliding_defect", 0.2)),
    ));

    let grid = grid_up(hyp(), 14.0, 0.005)?;
    let seps = [2.0, 4.0, 8.0];
    let a = ProfileSequence::from_fn(seps.len(), |_| ProfileSpec::traveling(base.clone(), 2.0))?;
    let b = ProfileSequence::from_fn(seps.len(), |n| {
        ProfileSpec::traveling(base.clone(), 2.0 + seps[n])
    })?;
    let sup = orthogonal_superposition(&a, &b, seps.len() - 1, &grid, &eq)?;
    let sep_defect = pythagorean_check(&sup.state, &sup.parts)?;
    report.rows.push(
        MetricRow::new("separation=8")
            .with("defect", sep_defect)
            .with("energy_near", energy(&sup.parts[0]).e_v)
            .with("energy_far", energy(&sup.parts[1]).e_v),
    );
    report.check(Check::new(
        "separation_8",
        sep_defect,
        Threshold::at_most(limit),
    ));
    Ok(report)
}

/// Synthetic ground truth for the ν functional: one concentrating profile,
/// then two scales separated by two extraction passes.
pub fn profile_extraction(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("profile_extraction");
    let eq = EquationSpec::linear(hyp());
    let base = settings.data_or(bump(3.0));
    let probe = dyadic_lambdas(10);

    let lambda0 = settings
        .schedule
        .as_ref()
        .and_then(|s| s.first().copied())
        .unwrap_or(32.0);
    let grid = grid_up(hyp(), 1.5, 1.0 / 4096.0)?;
    let data = ProfileSpec::concentrating(base.clone(), lambda0).build(&grid, &eq)?;
    let traj = sampled_run(&data, 0.5, 0.125)?;
    let times = traj.snapshot_times();
    let rec = nu_functional(&traj, &probe, &times)?;
    let factor = (rec.lambda_star / lambda0).max(lambda0 / rec.lambda_star);
    report.rows.push(
        MetricRow::new(format!("single,lambda0={lambda0}"))
            .with("nu", rec.nu)
            .with("lambda_star", rec.lambda_star)
            .with("t_star", rec.t_star)
            .with("r_star", rec.r_star),
    );
    report.check(Check::new(
        "lambda_factor",
        factor,
        Threshold::at_most(settings.tol("lambda_factor", 2.0)),
    ));
    report.check(Check::holds("t_exact", rec.t_star == 0.0));

    let grid = grid_up(hyp(), 2.0, 1.0 / 8192.0)?;
    let parts = [
        ProfileSpec::concentrating(base.clone(), 4.0).build(&grid, &eq)?,
        ProfileSpec::concentrating(base, 128.0).build(&grid, &eq)?,
    ];
    let traj = evolve(&superpose(&parts)?, 0.25, usize::MAX, &Diagnostics::none())?;
    let times = traj.snapshot_times();
    let found = extract_profiles(&traj, &probe, &times, 2)?;
    for (i, r) in found.iter().enumerate() {
        report.rows.push(
            MetricRow::new(format!("pass={}", i + 1))
                .with("nu", r.nu)
                .with("lambda_star", r.lambda_star)
                .with("t_star", r.t_star),
        );
    }
    let within = |got: f64, want: f64| got / want <= 2.0 && want / got <= 2.0;
    let mut scales: Vec<f64> = found.iter().map(|r| r.lambda_star).collect();
    scales.sort_by(f64::total_cmp);
    report.check(Check::holds(
        "two_pass_separates_4_and_128",
        scales.len() == 2 && within(scales[0], 4.0) && within(scales[1], 128.0),
    ));
    Ok(report)
}

/// Run with snapshots every `every` time units.
fn sampled_run(data: &State, t: f64, every: f64) -> Result<Trajectory> {
    let dt = crate::solver::DEFAULT_CFL * data.grid().h;
    let stride = ((every / dt).ceil() as usize).max(1);
    evolve(data, t, stride, &Diagnostics::none())
}

struct ScatterRun {
    traj: Trajectory,
    s: f64,
    increment: f64,
    defects: Vec<(f64, f64)>,
}

/// Quintic run recording `l10`, energy and the scattering defects at the
/// snapshots nearest `compare`.
fn scatter_run(
    state: &State,
    t: f64,
    settings: &Settings,
    diagnostics: &Diagnostics,
    compare: &[f64],
) -> Result<ScatterRun> {
    let options = SolverOptions {
        cfl: settings.cfl.unwrap_or(crate::solver::DEFAULT_CFL),
        ..SolverOptions::default()
    };
    let dt = options.cfl * state.grid().h;
    let stride = ((1.0 / dt).round() as usize).max(1);
    let traj = evolve_with(state, t, stride, diagnostics, &options)?;
    let running = strichartz_running(&traj, 5.0, 10.0)?;
    let s = *running.last().unwrap_or(&0.0);
    let k = traj.times.partition_point(|x| *x < 0.9 * t);
    let increment = if s > 0.0 {
        (s.powi(5) - running[k].powi(5)) / s.powi(5)
    } else {
        0.0
    };
    let defects = compare
        .iter()
        .map(|&c| {
            let at = nearest_snapshot(&traj, c);
            Ok((at, scattering_defect(&traj, at)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScatterRun {
        traj,
        s,
        increment,
        defects,
    })
}

const SCATTER_T: f64 = 20.0;
const SCATTER_R: f64 = 30.0;
const COMPARE_TIMES: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

fn scatter_diagnostics() -> Diagnostics {
    let mut d = Diagnostics::all();
    d.led = false;
    d
}

/// Gaussian datum of width 1 scaled to `‖·‖_𝓗 = delta`.
fn at_norm(delta: f64, eq: &EquationSpec, h: f64) -> Result<State> {
    let grid = grid_up(hyp(), SCATTER_R, h)?;
    let unit = make_state(
        &DataSpec::position(Generator::gaussian(1.0, 1.0)),
        eq,
        &grid,
    )?;
    let a = delta / energy_norm(&unit);
    make_state(&DataSpec::position(Generator::gaussian(a, 1.0)), eq, &grid)
}

/// Small data: `S = ‖u‖_{L⁵L¹⁰}` along the δ schedule.
pub fn small_data_scattering(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("small_data_scattering");
    let deltas = settings.schedule_or(&[1.0, 0.5, 0.25, 0.125])?;
    let h = settings.h_or(0.005);
    let t = settings.t_or(SCATTER_T);
    let eq = EquationSpec::quintic(hyp());
    report.param("h", h);
    report.param("T", t);
    let mut s_values = Vec::new();
    let mut worst_increment = 0.0f64;
    for (i, &delta) in deltas.iter().enumerate() {
        let state = at_norm(delta, &eq, h)?;
        let run = scatter_run(&state, t, settings, &scatter_diagnostics(), &COMPARE_TIMES)?;
        let mut row = MetricRow::new(format!("delta={delta}"))
            .with("delta", delta)
            .with("energy", energy(&state).e_nl)
            .with("s_norm", run.s)
            .with("final_increment", run.increment);
        for (at, d) in &run.defects {
            row = row.with(&format!("defect_t={at:.3}"), *d);
        }
        report.rows.push(row);
        if i == 0 {
            let every = (1.0 / (0.9 * h)).round() as usize / 10;
            report
                .series
                .push(diagnostic_series("largest_delta", &run.traj, every));
            let d: Vec<f64> = run.defects.iter().map(|p| p.1).collect();
            report.check(Check::holds(
                "defect_decreasing_largest",
                strictly_decreasing(&d),
            ));
        }
        worst_increment = worst_increment.max(run.increment);
        s_values.push(run.s);
    }
    for (k, w) in s_values.windows(2).enumerate() {
        let ratio = w[1] / w[0];
        let expected = deltas[k + 1] / deltas[k];
        report.rows.push(
            MetricRow::new(format!("halving={}", k + 1))
                .with("s_ratio", ratio)
                .with("delta_ratio", expected),
        );
        report.check(Check::new(
            format!("s_ratio_{}", k + 1),
            ratio,
            Threshold::within(
                settings.tol("s_ratio_min", 0.4),
                settings.tol("s_ratio_max", 0.6),
            ),
        ));
    }
    report.series.push(table(
        "s_vs_delta",
        &["delta", "s_norm"],
        &[&deltas, &s_values],
        PlotKind::LogLog,
    ));
    report.check(Check::new(
        "saturation",
        worst_increment,
        Threshold::at_most(settings.tol("saturation", 1e-2)),
    ));
    Ok(report)
}

/// Amplitude of the width-1 gaussian whose quintic energy is `target`.
fn amplitude_for_energy(target: f64, eq: &EquationSpec, h: f64) -> Result<f64> {
    let grid = grid_up(hyp(), SCATTER_R, h)?;
    let e = |a: f64| -> Result<f64> {
        let st = make_state(&DataSpec::position(Generator::gaussian(a, 1.0)), eq, &grid)?;
        Ok(energy(&st).e_nl)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while e(hi)? < target {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if e(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Large data at a multiple of the small-data threshold energy, with and
/// without a repulsive potential.
pub fn large_data(settings: &Settings) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("large_data");
    let h = settings.h_or(0.0025);
    let t = settings.t_or(SCATTER_T);
    let multiple = settings.tol("energy_multiple", 50.0);
    let free = EquationSpec::quintic(hyp());
    let threshold = energy(&at_norm(1.0, &free, h)?).e_nl;
    let amplitude = amplitude_for_energy(multiple * threshold, &free, h)?;
    report.param("h", h);
    report.param("T", t);
    report.param("threshold_energy", threshold);
    report.param("amplitude", amplitude);
    for (label, eq) in [
        ("free", free.clone()),
        (
            "v",
            free.clone()
                .with_potential(PotentialSpec::repulsive_bump(1.0, 2.0)),
        ),
    ] {
        let grid = grid_up(hyp(), SCATTER_R, h)?;
        let state = make_state(
            &DataSpec::position(Generator::gaussian(amplitude, 1.0)),
            &eq,
            &grid,
        )?;
        let e0 = energy(&state).e_nl;
        let run = scatter_run(&state, t, settings, &scatter_diagnostics(), &COMPARE_TIMES)?;
        let drift = run.traj.energy_drift()?;
        let sup_h = run
            .traj
            .channel(channel::H_NORM_SQ)?
            .iter()
            .fold(0.0f64, |a, b| a.max(*b));
        let bound = 2.0 * e0 / spectral_constant(&eq.geometry).min(1.0);
        let mut row = MetricRow::new(label)
            .with("energy", e0)
            .with("energy_drift", drift)
            .with("sup_h_norm_sq", sup_h)
            .with("a_priori_bound", bound)
            .with("s_norm", run.s)
            .with("final_increment", run.increment);
        for (at, d) in &run.defects {
            row = row.with(&format!("defect_t={at:.3}"), *d);
        }
        report.rows.push(row);
        let every = (1.0 / (0.9 * h)).round() as usize / 10;
        report.series.push(diagnostic_series(
            &format!("large_{label}"),
            &run.traj,
            every,
        ));
        report.check(Check::new(
            format!("energy_drift_{label}"),
            drift,
            Threshold::at_most(settings.tol("energy_drift", 1e-4)),
        ));
        report.check(Check::new(
            format!("bounded_{label}"),
            sup_h / bound,
            Threshold::at_most(1.0 + settings.tol("bound_slack", 1e-3)),
        ));
        report.check(Check::new(
            format!("saturation_{label}"),
            run.increment,
            Threshold::at_most(settings.tol("saturation", 1e-2)),
        ));
    }
    Ok(report)
}
