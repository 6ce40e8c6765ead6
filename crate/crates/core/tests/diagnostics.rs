use hypwave_core::diagnostics::*;
use hypwave_core::solver::*;
use hypwave_core::*;
use proptest::prelude::*;

fn hyp() -> Geometry {
    Geometry::hyperbolic()
}

#[test]
fn multiplier_spot_values() {
    // closed antiderivatives evaluated at 30 digits
    assert!((multiplier_a_r(1.0, 3).unwrap() - 0.2944868122665104).abs() < 1e-12);
    assert!((multiplier_c2(1.0, 3).unwrap() - 0.22665684875970903).abs() < 1e-12);
    assert!((multiplier_b_r(1.0, 3).unwrap() - 0.17262053142274405).abs() < 1e-12);
    assert!((multiplier_a_r(1.0, 4).unwrap() - 0.21461088420196886).abs() < 1e-12);
    assert!((multiplier_b_r(1.0, 5).unwrap() - 0.08823870172352434).abs() < 1e-12);
    assert!((multiplier_m(2.0, 3).unwrap() - 1.035_972_419_924_183).abs() < 1e-12);
    assert!(multiplier_a_r(1.0, 1).is_err());
    assert!(multiplier_c2(-1.0, 3).is_err());
    assert_eq!(multiplier_a_r(0.0, 3).unwrap(), 0.0);
}

#[test]
fn multiplier_origin_slope() {
    for d in [3u32, 4, 5] {
        let r = 1e-3;
        let slope = multiplier_a_r(r, d).unwrap() / r;
        assert!((slope - 1.0 / d as f64).abs() < 1e-4);
        assert!((multiplier_c2(r, d).unwrap() - 1.0 / d as f64).abs() < 1e-4);
    }
}

#[test]
fn multiplier_table_invariants() {
    let nodes: Vec<f64> = (1..=600).map(|k| k as f64 * 0.05).collect();
    for d in [3u32, 4, 5] {
        let t = MultiplierTable::build(&nodes, d).unwrap();
        assert!(t.violations().is_empty(), "d={d}: {:?}", t.violations());
        for (j, &r) in nodes.iter().enumerate() {
            let c2 = t.c2[j];
            assert!(c2 >= 1.0 / (d as f64 * r.cosh().powi(2)) * (1.0 - 1e-12));
            assert!(c2 <= 1.0);
            assert!(
                (t.m[j] - t.b_r[j] * r.sinh().powi(d as i32 - 1)).abs() <= 1e-12 * t.m[j].max(1.0)
            );
        }
    }
}

#[test]
fn c2_is_derivative_of_a_r() {
    for d in [3u32, 4, 5] {
        for k in 0..=99 {
            let r = 0.1 + k as f64 * 0.1;
            let e = 0.01;
            let a = |x: f64| multiplier_a_r(x, d).unwrap();
            let fd = (8.0 * (a(r + e) - a(r - e)) - (a(r + 2.0 * e) - a(r - 2.0 * e))) / (12.0 * e);
            let c2 = multiplier_c2(r, d).unwrap();
            assert!((fd - c2).abs() <= 1e-4 * c2, "d={d} r={r}: {fd} vs {c2}");
        }
    }
}

#[test]
fn b_r_is_bounded_with_monotone_tail() {
    let vals: Vec<f64> = (0..=400)
        .map(|k| multiplier_b_r(k as f64 * 0.05, 3).unwrap())
        .collect();
    assert!(vals.iter().all(|v| v.is_finite() && *v <= 1.0));
    let tail = &vals[100..];
    assert!(tail.windows(2).all(|w| w[1] <= w[0]));
}

fn laplacian_defect(h: f64) -> f64 {
    // Δb = b_rr + 2 coth(r) b_r should equal sech² r
    (1..=40)
        .map(|k| {
            let r = 0.25 * k as f64;
            let b = |x: f64| multiplier_b_r(x, 3).unwrap();
            let b_rr = (b(r + h) - b(r - h)) / (2.0 * h);
            let lap = b_rr + 2.0 / r.tanh() * b(r);
            (lap - 1.0 / r.cosh().powi(2)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn b_solves_its_poisson_equation() {
    let (a, b) = (laplacian_defect(0.02), laplacian_defect(0.01));
    assert!(b < 1e-4);
    assert!(a / b > 3.5, "{a} {b}");
}

fn run(eq: EquationSpec, amp: f64, h: f64, t: f64, diag: &Diagnostics) -> Trajectory {
    let r_max = ((8.0 + t) / h).ceil() * h;
    let grid = make_radial_grid(eq.geometry, r_max, h).unwrap();
    let st = make_state(
        &DataSpec::position(Generator::gaussian(amp, 1.0)),
        &eq,
        &grid,
    )
    .unwrap();
    evolve(&st, t, 100, diag).unwrap()
}

#[test]
fn morawetz_of_zero_is_zero() {
    let grid = make_radial_grid(hyp(), 8.0, 0.02).unwrap();
    let st = State::zero(grid, EquationSpec::quintic(hyp())).unwrap();
    let tr = evolve(&st, 1.0, 10, &Diagnostics::all()).unwrap();
    assert_eq!(morawetz_accumulate(&tr).unwrap(), MorawetzRecord::default());
    assert_eq!(morawetz_identity_residual(&tr).unwrap(), 0.0);
}

#[test]
fn morawetz_linear_has_no_sextic() {
    let tr = run(
        EquationSpec::linear(hyp()),
        1.0,
        0.01,
        4.0,
        &Diagnostics::all(),
    );
    let m = morawetz_accumulate(&tr).unwrap();
    assert_eq!(m.sextic_sixth, 0.0);
    assert!(m.grad_weighted.is_finite() && m.grad_weighted > 0.0);
    assert!(matches!(
        morawetz_accumulate(&run(
            EquationSpec::linear(hyp()),
            1.0,
            0.02,
            1.0,
            &Diagnostics::energy_only()
        )),
        Err(HypError::MissingChannel(_))
    ));
}

#[test]
fn morawetz_identity_residual_small_and_convergent() {
    let pot = PotentialSpec::repulsive_bump(1.0, 2.0);
    for eq in [
        EquationSpec::linear(hyp()),
        EquationSpec::quintic(hyp()),
        EquationSpec::quintic(hyp()).with_potential(pot),
    ] {
        let coarse =
            morawetz_identity_residual(&run(eq.clone(), 1.5, 0.01, 10.0, &Diagnostics::all()))
                .unwrap();
        let fine =
            morawetz_identity_residual(&run(eq.clone(), 1.5, 0.005, 10.0, &Diagnostics::all()))
                .unwrap();
        assert!(fine <= 5e-3, "{fine}");
        assert!(coarse / fine >= 2.0, "order: {coarse} {fine}");
    }
}

#[test]
fn sextic_morawetz_bounded_by_energy_norm() {
    for pot in [None, Some(PotentialSpec::repulsive_bump(2.0, 1.5))] {
        let mut eq = EquationSpec::quintic(hyp());
        eq.potential = pot;
        let tr = run(eq, 2.0, 0.01, 20.0, &Diagnostics::all());
        let m = morawetz_accumulate(&tr).unwrap();
        let sup = tr
            .channel(channel::H_NORM_SQ)
            .unwrap()
            .iter()
            .fold(0.0f64, |a, b| a.max(*b));
        assert!(m.sextic_sixth > 0.0 && m.sextic_sixth <= 4.0 * sup);
    }
}

#[test]
fn led_saturates_on_free_and_repulsive_runs() {
    let mut diag = Diagnostics::energy_only();
    diag.led = true;
    let free = led_saturation(&run(EquationSpec::linear(hyp()), 1.0, 0.02, 40.0, &diag)).unwrap();
    assert!(free.final_increment < 0.02, "{free:?}");
    let eq = EquationSpec::linear(hyp()).with_potential(PotentialSpec::repulsive_bump(2.0, 1.5));
    let with_v = led_saturation(&run(eq, 1.0, 0.02, 40.0, &diag)).unwrap();
    assert!(with_v.final_increment < 0.02, "{with_v:?}");
    assert!(with_v.ratio <= 3.0 * free.ratio);
    let q = run(EquationSpec::quintic(hyp()), 1.0, 0.02, 1.0, &diag);
    assert!(led_weighted_norm(&q).is_err());
}

#[test]
fn decay_fit_synthetic_and_errors() {
    let t: Vec<f64> = (1..=200).map(|k| k as f64 * 0.2).collect();
    let y: Vec<f64> = t.iter().map(|s| 3.0 * s.powf(-1.5)).collect();
    let f = decay_fit(&t, &y, (2.0, 40.0)).unwrap();
    assert!((f.exponent + 1.5).abs() < 1e-6);
    assert!((f.prefactor - 3.0).abs() < 1e-6 && f.r2 > 0.999999);
    assert!(decay_fit(&t, &y, (2.0, 3.0)).is_err());
    let mut bad = y.clone();
    bad[50] = 0.0;
    assert!(decay_fit(&t, &bad, (2.0, 40.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a_r_between_tanh_bounds(r in 1e-3f64..30.0, d in 3u32..=5) {
        let a = multiplier_a_r(r, d).unwrap();
        let th = r.tanh();
        prop_assert!(a > 0.0 && a <= th * (1.0 + 1e-12) && a >= th / d as f64 * (1.0 - 1e-12));
    }

    #[test]
    fn decay_fit_recovers_power(p in 0.2f64..3.0, c in 0.1f64..10.0) {
        let t: Vec<f64> = (1..=50).map(|k| k as f64).collect();
        let y: Vec<f64> = t.iter().map(|s| c * s.powf(-p)).collect();
        let f = decay_fit(&t, &y, (1.0, 50.0)).unwrap();
        prop_assert!((f.exponent + p).abs() < 1e-9);
    }
}
