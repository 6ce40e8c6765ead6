use hypwave_core::geom::{axis_shell_integral, distance, shifted_laplacian, translated_sq_norm};
use hypwave_core::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn hgrid(r_max: f64, h: f64) -> RadialGrid {
    make_radial_grid(Geometry::hyperbolic(), r_max, h).unwrap()
}

#[test]
fn grid_node_counts() {
    assert_eq!(hgrid(10.0, 0.01).len(), 1001);
    let e = make_radial_grid(Geometry::euclidean(), 60.0, 0.005).unwrap();
    assert_eq!(e.len(), 12001);
    assert!(make_radial_grid(Geometry::hyperbolic(), 1.0, 0.5).is_err());
    assert!(make_radial_grid(Geometry::hyperbolic(), 1.0, 0.03).is_err());
    assert!(make_radial_grid(Geometry::hyperbolic(), -1.0, 0.01).is_err());
    assert!(make_radial_grid(Geometry::hyperbolic(), 1.0, 0.0).is_err());
}

#[test]
fn mass_shift_guards() {
    assert!(make_radial_grid(Geometry::hyperbolic().with_mass_shift(-1.0), 1.0, 0.01).is_err());
    assert!(make_radial_grid(Geometry::hyperbolic().with_mass_shift(-0.5), 1.0, 0.01).is_ok());
    assert!(make_radial_grid(Geometry::euclidean().with_mass_shift(-0.5), 1.0, 0.01).is_err());
}

#[test]
fn volume_weights() {
    let h = Geometry::hyperbolic();
    assert_eq!(volume_weight(&h, 0.0), 0.0);
    assert!((volume_weight(&Geometry::euclidean(), 2.0) - 16.0 * PI).abs() < 1e-12);
    // 4π sinh²(1), 30-digit reference
    assert!((volume_weight(&h, 1.0) - 17.355_387_381_771_437).abs() < 1e-12);
    let g = hgrid(2.0, 0.01);
    assert!((g.volume_weight(100) - 17.355_387_381_771_437).abs() < 1e-9);
}

#[test]
fn lp_norm_examples() {
    let g = hgrid(3.0, 0.001);
    assert_eq!(lp_norm(&RadialField::zeros(g), 2.0).unwrap(), 0.0);
    let gauss = RadialField::from_fn(g, |r| (-r * r).exp());
    assert_eq!(lp_norm(&gauss, f64::INFINITY).unwrap(), 1.0);
    assert!(lp_norm(&gauss, 0.5).is_err());

    // smooth cut of the indicator of the unit ball, bracketed by the balls of radius 1 and 1.1
    let cut = RadialField::from_fn(g, |r| {
        let t = ((r - 1.0) / 0.1).clamp(0.0, 1.0);
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    });
    let sq = lp_norm(&cut, 2.0).unwrap().powi(2);
    let ball = |a: f64| PI * ((2.0 * a).sinh() - 2.0 * a);
    assert!((ball(1.0) - 5.110_932_705_708_289).abs() < 1e-12);
    assert!(sq > ball(1.0) && sq < ball(1.1), "{sq}");

    // L² of e^{-r²} on ℍ³: 1.598210481837454 (mpmath)
    assert!((lp_norm(&gauss, 2.0).unwrap() - 1.598_210_481_837_454).abs() < 1e-6);
}

#[test]
fn geodesic_examples() {
    assert!(geodesic_distance(1.3, 1.3, 1.0).abs() < 1e-12);
    assert!((geodesic_distance(0.7, 2.1, -1.0) - 2.8).abs() < 1e-12);
    assert!((geodesic_distance(1.0, 1.0, 0.0) - 1.513_374_006_596_504).abs() < 1e-12);
    // rounding beyond [-1, 1] is clamped
    assert!(geodesic_distance(1.0, 1.0, 1.0 + 1e-15).abs() < 1e-6);
    assert!((distance(&Geometry::euclidean(), 3.0, 4.0, 0.0).unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn translate_examples() {
    let g = hgrid(12.0, 0.001);
    let gauss = RadialField::from_fn(g, |r| (-r * r).exp());
    for c in [-1.0, 0.0, 0.3, 1.0] {
        assert!((translate_eval(&gauss, 0.0, 0.8, c).unwrap() - (-0.64f64).exp()).abs() < 1e-6);
    }
    let bump = RadialField::from_fn(g, |r| if r < 1.0 { (1.0 - r * r).powi(3) } else { 0.0 });
    assert_eq!(translate_eval(&bump, 10.0, 1.0, 0.5).unwrap(), 0.0);
    let v = translate_eval(&gauss, 1.0, 1.0, 0.0).unwrap();
    assert!((v - 0.101_235_996_995_201_3).abs() < 1e-6, "{v}");
    assert!(translate_eval(&gauss, -1.0, 1.0, 0.0).is_err());
}

#[test]
fn laplacian_examples() {
    let g = hgrid(6.0, 0.01);
    let c = RadialField::from_fn(g, |_| 2.5);
    assert!(radial_laplacian(&c).values().iter().all(|v| *v == 0.0));

    let e = make_radial_grid(Geometry::euclidean(), 8.0, 0.01).unwrap();
    let r2 = RadialField::from_fn(e, |r| r * r);
    for (j, v) in radial_laplacian(&r2).values().iter().enumerate().take(700) {
        assert!((v - 6.0).abs() < 1e-8, "node {j}: {v}");
    }

    // f = sech r at r = 1: f'' + 2 coth r f' = -1.1923866074881777 (mpmath)
    let sech = RadialField::from_fn(g, |r| 1.0 / r.cosh());
    let lap = radial_laplacian(&sech);
    assert!((lap.values()[100] + 1.192_386_607_488_177_7).abs() < 1e-4);

    let shifted_grid = g.with_geometry(Geometry::hyperbolic().with_mass_shift(0.5));
    let f = RadialField::from_fn(shifted_grid, |r| 1.0 / r.cosh());
    let s = shifted_laplacian(&f);
    assert!((s.values()[100] - (lap.values()[100] - 0.5 / 1f64.cosh())).abs() < 1e-12);
}

#[test]
fn laplacian_second_order() {
    let exact = |r: f64| {
        let (s, c) = (r.sinh(), r.cosh());
        let fp = -s / (c * c);
        let fpp = -1.0 / c + 2.0 * s * s / (c * c * c);
        fpp + 2.0 * c / s * fp
    };
    let err = |h: f64| {
        let g = hgrid(6.0, h);
        let lap = radial_laplacian(&RadialField::from_fn(g, |r| 1.0 / r.cosh()));
        (1..g.intervals)
            .filter(|j| g.r(*j) >= 0.5 && g.r(*j) <= 3.0)
            .map(|j| (lap.values()[j] - exact(g.r(j))).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err(0.02) / err(0.01);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
    // origin uses the regularized limit 3 f''(0) = -3
    let g = hgrid(6.0, 0.001);
    let lap = radial_laplacian(&RadialField::from_fn(g, |r| 1.0 / r.cosh()));
    assert!((lap.values()[0] + 3.0).abs() < 1e-5);
}

#[test]
fn substitution_round_trip() {
    let g = hgrid(5.0, 0.01);
    let f = RadialField::from_fn(g, |r| (-r * r).exp());
    let w = f.to_substituted();
    assert_eq!(w.values()[0], 0.0);
    let back = w.to_physical();
    for (a, b) in back.values().iter().zip(f.values()) {
        assert!((a - b).abs() < 1e-6);
    }
    assert!(RadialField::new(g, vec![1.0; g.len()], Representation::Substituted).is_err());
    let mut bad = vec![0.0; g.len()];
    bad[3] = f64::NAN;
    assert!(RadialField::new(g, bad, Representation::Physical).is_err());
}

#[test]
fn translation_preserves_l2() {
    let f = |r: f64| if r < 1.0 { (1.0 - r * r).powi(4) } else { 0.0 };
    let geometry = Geometry::hyperbolic();
    let base = translated_sq_norm(&geometry, f, 0.0, 1.0);
    for rho in [0.5, 2.0, 3.0, 6.0] {
        let moved = translated_sq_norm(&geometry, f, rho, 1.0);
        assert!(
            (moved / base - 1.0).abs() < 1e-8,
            "rho {rho}: {moved} vs {base}"
        );
    }
}

#[test]
fn shell_integral_of_constant() {
    let g = Geometry::hyperbolic();
    assert!((axis_shell_integral(&g, |_| 1.0, 1.3, 2.2, 10.0) - 2.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn triangle_inequality(r1 in 0.0..6.0f64, r2 in 0.0..6.0f64, r3 in 0.0..6.0f64,
                           c12 in -1.0..1.0f64, phi in 0.0..std::f64::consts::TAU,
                           t3 in 0.0..std::f64::consts::PI) {
        // points on the unit sphere: p1 on the axis, p2 in the x-z plane, p3 anywhere
        let t2 = c12.acos();
        let p2 = [t2.sin(), 0.0, t2.cos()];
        let p3 = [t3.sin() * phi.cos(), t3.sin() * phi.sin(), t3.cos()];
        let dot = |a: [f64; 3], b: [f64; 3]| (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
        let d12 = geodesic_distance(r1, r2, p2[2]);
        let d13 = geodesic_distance(r1, r3, p3[2]);
        let d23 = geodesic_distance(r2, r3, dot(p2, p3));
        prop_assert!(d13 <= d12 + d23 + 1e-9);
        prop_assert!((geodesic_distance(r2, r1, c12) - d12).abs() < 1e-12);
    }

    #[test]
    fn norm_homogeneity(c in -5.0..5.0f64, q in prop::sample::select(vec![1.0, 2.0, 3.5, 6.0, 10.0, f64::INFINITY])) {
        let g = hgrid(4.0, 0.02);
        let f = RadialField::from_fn(g, |r| (-r * r).exp() * (1.0 + r).cos());
        let lhs = lp_norm(&f.scaled(c), q).unwrap();
        let rhs = c.abs() * lp_norm(&f, q).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn zero_translation_is_identity(j in 0usize..400, c in -1.0..1.0f64) {
        let g = hgrid(4.0, 0.01);
        let f = RadialField::from_fn(g, |r| (-r * r).exp());
        let v = translate_eval(&f, 0.0, g.r(j), c).unwrap();
        prop_assert!((v - f.values()[j]).abs() < 1e-12);
    }
}
