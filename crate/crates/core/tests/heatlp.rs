use hypwave_core::heatlp::*;
use hypwave_core::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn hgrid(r_max: f64, h: f64) -> RadialGrid {
    make_radial_grid(Geometry::hyperbolic(), r_max, h).unwrap()
}

fn rel_l2(a: &RadialField, b: &RadialField) -> f64 {
    lp_norm(&a.axpy(-1.0, b).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
}

fn mass(f: &RadialField) -> f64 {
    let w = f.grid().measure_weights();
    f.values().iter().zip(&w).map(|(v, w)| v * w).sum()
}

fn kernel(s: f64) -> impl Fn(f64) -> f64 {
    move |r| heat_kernel_closed_form_d3(r, s).unwrap()
}

#[test]
fn zero_time_is_identity() {
    let g = hgrid(5.0, 0.01);
    let f = RadialField::from_fn(g, |r| (-r * r).exp());
    assert_eq!(heat_evolve(&f, 0.0).unwrap(), f);
    assert!(heat_evolve(&f, -1.0).is_err());
    let e = make_radial_grid(Geometry::euclidean(), 5.0, 0.01).unwrap();
    assert!(heat_evolve(&RadialField::zeros(e), 1.0).is_err());
}

#[test]
fn narrow_kernel_evolves_to_closed_form() {
    let g = hgrid(10.0, 2e-3);
    let eps = 5e-3;
    let f = RadialField::from_fn(g, kernel(eps));
    assert!((mass(&f) - 1.0).abs() < 1e-6);
    let out = heat_evolve(&f, 0.5 - eps).unwrap();
    let exact = RadialField::from_fn(g, kernel(0.5));
    assert!(rel_l2(&out, &exact) < 1e-2);
    assert!((out.values()[0] - 0.038_510_836_890_748_94).abs() < 1e-5);
}

#[test]
fn closed_form_values() {
    let v = heat_kernel_closed_form_d3(0.0, 0.5).unwrap();
    assert!((v - 0.038_510_836_890_748_94).abs() < 1e-15);
    assert!(heat_kernel_closed_form_d3(1.0, 0.0).is_err());
    // series branch agrees with the direct formula
    let r = 0.99e-4f64;
    let a = heat_kernel_closed_form_d3(r, 0.3).unwrap();
    let direct = (1.2 * PI).powf(-1.5) * (r / r.sinh()) * (-0.3 - r * r / 1.2).exp();
    assert!((a - direct).abs() < 1e-14 * a);
    // total mass over [0, 40] at s = 1
    let m = hypwave_core::quad::gl32_composite(
        |r| heat_kernel_closed_form_d3(r, 1.0).unwrap() * 4.0 * PI * r.sinh().powi(2),
        0.0,
        40.0,
        80,
    );
    assert!((m - 1.0).abs() < 1e-6, "{m}");
}

#[test]
fn closed_form_sits_under_envelope() {
    for s in [0.1, 0.5, 1.0, 3.0] {
        for i in 0..120 {
            let r = i as f64 * 0.1;
            let p = heat_kernel_closed_form_d3(r, s).unwrap();
            let env = heat_kernel_bound_dm(r, s, 3).unwrap();
            // calibrated constant: p / envelope = (4π)^{-3/2} 2r / ((1 - e^{-2r})(1 + r)) < 2 (4π)^{-3/2}
            assert!(p <= env * (4.0 * PI).powf(-1.5) * 2.0, "r={r} s={s}");
        }
    }
}

#[test]
fn envelope_values() {
    assert!((heat_kernel_bound_dm(0.0, 1.0, 3).unwrap() - (-1f64).exp()).abs() < 1e-15);
    // (1+r+s)^0 = 1 for d = 3
    let a = heat_kernel_bound_dm(2.0, 0.7, 3).unwrap();
    let manual = 0.7f64.powf(-1.5) * (-0.7f64 - 4.0 / 2.8 - 2.0).exp() * 3.0;
    assert!((a - manual).abs() < 1e-14 * manual);
    assert!((heat_kernel_bound_dm(1.0, 1.0, 2).unwrap() - 0.424_790_588_779_322_6).abs() < 1e-14);
    assert!(heat_kernel_bound_dm(1.0, 0.0, 3).is_err());
}

#[test]
fn l1_mass_of_kernel_is_one() {
    // The L¹ norm does not decay with s; only the L² instance of the decay
    // estimate is asserted elsewhere.
    for s in [0.5, 2.0] {
        let m = hypwave_core::quad::gl32_composite(
            |r| heat_kernel_closed_form_d3(r, s).unwrap() * 4.0 * PI * r.sinh().powi(2),
            0.0,
            60.0,
            120,
        );
        assert!((m - 1.0).abs() < 1e-8);
    }
}

#[test]
fn kernel_values() {
    let spec = |k, l| LPKernelSpec::new(k, l);
    let p = heat_kernel_closed_form_d3(0.7, 1.0 / 9.0).unwrap();
    assert!((lp_kernel(spec(0, 3.0), 0.7).unwrap() - 2.0 * p).abs() < 1e-15);
    // central difference in s with step 1e-4, times 2s: -0.3135466180493992 (mpmath)
    let fd = -0.313_546_618_049_399_2;
    let k1 = lp_kernel(spec(1, 2.0), 0.5).unwrap();
    assert!((k1 - fd).abs() < 1e-6, "{k1}");
    assert!((k1 + 0.313_546_565_791_632).abs() < 1e-12);
    let k2 = lp_kernel(spec(2, 2.0), 0.5).unwrap();
    assert!((k2 - 0.679_350_892_548_535_9).abs() < 1e-12);
    assert!(lp_kernel(spec(1, 0.5), 0.5).is_err());
    assert!(lp_kernel(spec(3, 2.0), 0.5).is_err());
    assert!(lp_kernel(
        LPKernelSpec {
            k: 1,
            lambda: 2.0,
            d: 4
        },
        0.5
    )
    .is_err());
}

#[test]
fn envelope_exponents_are_fitted() {
    let lams = [1.0, 2.0, 4.0, 16.0, 64.0, 256.0];
    let xs: Vec<f64> = (0..240).map(|i| i as f64 * 0.05).collect();
    let fits: Vec<_> = (0..3)
        .map(|k| fit_kernel_envelope(k, &lams, &xs).unwrap())
        .collect();
    assert_eq!(
        fits.iter().map(|f| f.n_k).collect::<Vec<_>>(),
        vec![0, 1, 2]
    );
    for fit in &fits {
        for &l in &lams {
            for &x in &xs {
                let kv = lp_kernel(LPKernelSpec::new(fit.k, l), x / l).unwrap().abs();
                let env = fit.constant
                    * l.powi(3)
                    * (1.0 + x * x).powi(fit.n_k as i32)
                    * (-x * x / 4.0).exp();
                assert!(kv <= env * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn projection_of_zero_and_guards() {
    let g = hgrid(4.0, 0.01);
    let z = lp_project(&RadialField::zeros(g), 4.0).unwrap();
    assert_eq!(z.max_abs(), 0.0);
    assert!(lp_project(&RadialField::zeros(g), 0.5).is_err());
    let (rec, rep) = lp_reconstruct(&RadialField::zeros(g), 0.5, 16.0, 32).unwrap();
    assert_eq!(rec.max_abs(), 0.0);
    assert_eq!(rep.relative_l2_defect, 0.0);
    assert!(lp_reconstruct(&RadialField::zeros(g), 4.0, 2.0, 32).is_err());
    assert!(lp_reconstruct(&RadialField::zeros(g), 1.0, 2.0, 8).is_err());
}

#[test]
fn projection_matches_time_derivative() {
    // P_λ e^{σΔ} g = 2 λ^{-4} ∂_s² e^{sΔ} g at s = σ + λ^{-2}
    let g = hgrid(10.0, 2e-3);
    let base = RadialField::from_fn(g, |r| (-(r / 0.6).powi(2)).exp());
    let sigma = 0.05;
    let f = heat_evolve(&base, sigma).unwrap();
    for lambda in [1.0, 2.0, 4.0] {
        let p = lp_project(&f, lambda).unwrap();
        let s = sigma + lambda.powi(-2);
        let ds = 0.05 * s;
        let step = |u: &RadialField| {
            let params = HeatParams {
                s: ds,
                steps: 64,
                scheme: HeatScheme::CrankNicolson,
            };
            heat_evolve_with(u, &params).unwrap()
        };
        let um = heat_evolve(&base, s - ds).unwrap();
        let u0 = step(&um);
        let up = step(&u0);
        let second: Vec<f64> = (0..g.len())
            .map(|j| {
                2.0 * lambda.powi(-4) * (up.values()[j] - 2.0 * u0.values()[j] + um.values()[j])
                    / (ds * ds)
            })
            .collect();
        let oracle = RadialField::new(g, second, Representation::Physical).unwrap();
        let e = rel_l2(&p, &oracle);
        assert!(e < 1e-2, "lambda {lambda}: {e}");
    }
}

#[test]
fn reconstruction_window() {
    let g = hgrid(10.0, 2e-3);
    let f = RadialField::from_fn(g, |r| {
        if r < 1.5 {
            (1.0 - (r / 1.5).powi(2)).powi(6)
        } else {
            0.0
        }
    });
    let windows = [
        (1.0, 4.0),
        (0.5, 8.0),
        (0.25, 16.0),
        (0.125, 32.0),
        (1.0 / 16.0, 256.0),
    ];
    let defects: Vec<f64> = windows
        .iter()
        .map(|&(lo, hi)| lp_reconstruct(&f, lo, hi, 64).unwrap().1.relative_l2_defect)
        .collect();
    assert!(defects.windows(2).all(|w| w[1] < w[0]), "{defects:?}");
    assert!(*defects.last().unwrap() <= 0.05);
}

#[test]
fn refined_sobolev_gaussian() {
    let g = hgrid(8.0, 1e-3);
    let f = RadialField::from_fn(g, |r| (-r * r).exp());
    let lambdas = dyadic_lambdas(10);
    let rec = refined_sobolev_check(&f, &lambdas).unwrap();
    // oracles: ‖f‖₆, ‖∇f‖₂ and sup_λ λ^{-1/2} |P_λ f(0)| by mpmath quadrature
    assert!((rec.l6 - 0.862_710_889_538_308).abs() < 1e-5);
    assert!((rec.grad_l2 - 3.007_649_576_486_732).abs() < 1e-4);
    assert!(
        (rec.b - 0.525_706_162_672_464).abs() < 2e-3 * 0.5257,
        "{}",
        rec.b
    );
    assert!(
        (rec.ratio - 0.917_545_246_355_241).abs() < 2e-3,
        "{}",
        rec.ratio
    );

    let z = refined_sobolev_check(&RadialField::zeros(g), &lambdas).unwrap();
    assert_eq!((z.l6, z.b, z.ratio), (0.0, 0.0, 0.0));
    assert!(refined_sobolev_b(&f, &[]).is_err());
}

#[test]
fn scaled_kernel_norms() {
    let norms: Vec<_> = [1.0, 4.0, 16.0, 64.0, 256.0]
        .iter()
        .map(|&l| concpp_norms(l, 2.0).unwrap())
        .collect();
    for pick in [
        |n: &ConcNorms| n.h0,
        |n: &ConcNorms| n.h1,
        |n: &ConcNorms| n.h2,
    ] {
        let v: Vec<f64> = norms.iter().map(pick).collect();
        let (lo, hi) = v
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
        assert!(lo > 0.0 && hi / lo <= 4.0, "{v:?}");
    }
    let tails: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&r| concpp_norms(4.0, r).unwrap().tail_h1)
        .collect();
    assert!(tails.windows(2).all(|w| w[1] < w[0]), "{tails:?}");
    let one = concpp_norms(1.0, 2.0).unwrap();
    assert!(one.h0.is_finite() && one.h2.is_finite());
}

#[test]
fn convolution_agrees_with_semigroup() {
    let g = hgrid(10.0, 2e-3);
    let f = RadialField::from_fn(g, |r| (-(r / 0.5).powi(2)).exp() * (1.0 + 0.3 * r * r));
    for lambda in [2.0, 8.0, 32.0] {
        let a = lp_project(&f, lambda).unwrap();
        let k = move |r: f64| lp_kernel(LPKernelSpec::new(2, lambda), r).unwrap();
        let b = kernel_convolution(&f, k, 14.0 / lambda).unwrap();
        assert!(rel_l2(&a, &b) < 0.02);
    }
}

fn bump(center: f64, width: f64, amp: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        let x = (r - center) / width;
        if x.abs() < 1.0 {
            amp * (1.0 - x * x).powi(4)
        } else {
            0.0
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn l2_spectral_gap(center in 0.0..3.0f64, width in 0.3..1.5f64, s in prop::sample::select(vec![0.25, 1.0, 2.0, 4.0])) {
        let g = hgrid(12.0, 5e-3);
        let f = RadialField::from_fn(g, bump(center, width, 1.0));
        let out = heat_evolve(&f, s).unwrap();
        let n0 = lp_norm(&f, 2.0).unwrap();
        prop_assert!(lp_norm(&out, 2.0).unwrap() <= (-s).exp() * n0 + 1e-6 * n0);
    }

    #[test]
    fn semigroup_and_mass(center in 0.0..2.0f64, width in 0.4..1.2f64, s in 0.05..0.6f64, t in 0.05..0.6f64) {
        let g = hgrid(14.0, 5e-3);
        let f = RadialField::from_fn(g, bump(center, width, 1.0));
        let two = heat_evolve(&heat_evolve(&f, s).unwrap(), t).unwrap();
        let one = heat_evolve(&f, s + t).unwrap();
        prop_assert!(rel_l2(&two, &one) < 1e-3);
        prop_assert!((mass(&one) / mass(&f) - 1.0).abs() < 1e-3);
        let min = one.values().iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(min >= -1e-10);
    }
}
