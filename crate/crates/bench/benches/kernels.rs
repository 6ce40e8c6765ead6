use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hypwave_bench::{gaussian, gaussian_state, hyperbolic_grid};
use hypwave_core::heatlp::{heat_evolve, lp_project};
use hypwave_core::solver::{energy, evolve, step, Diagnostics, EquationSpec, DEFAULT_CFL};
use hypwave_core::Geometry;

fn heat(c: &mut Criterion) {
    let mut g = c.benchmark_group("heat_evolve");
    for h in [0.01, 0.005] {
        let f = gaussian(hyperbolic_grid(20.0, h), 1.0);
        g.bench_with_input(BenchmarkId::from_parameter(h), &f, |b, f| {
            b.iter(|| heat_evolve(black_box(f), 0.5).unwrap())
        });
    }
    g.finish();
    let f = gaussian(hyperbolic_grid(10.0, 0.005), 0.5);
    c.bench_function("lp_project_lambda_8", |b| {
        b.iter(|| lp_project(black_box(&f), 8.0).unwrap())
    });
}

fn waves(c: &mut Criterion) {
    let grid = hyperbolic_grid(20.0, 0.005);
    let dt = DEFAULT_CFL * grid.h;
    let mut g = c.benchmark_group("wave_step");
    for (name, eq) in [
        ("linear", EquationSpec::linear(Geometry::hyperbolic())),
        ("quintic", EquationSpec::quintic(Geometry::hyperbolic())),
    ] {
        let s = gaussian_state(&grid, &eq);
        g.bench_function(name, |b| b.iter(|| step(black_box(&s), dt).unwrap()));
    }
    g.finish();

    let s = gaussian_state(&grid, &EquationSpec::quintic(Geometry::hyperbolic()));
    c.bench_function("energy", |b| b.iter(|| energy(black_box(&s))));
    let mut g = c.benchmark_group("evolve_t1");
    g.sample_size(10);
    g.bench_function("energy_only", |b| {
        b.iter(|| evolve(&s, 1.0, usize::MAX, &Diagnostics::energy_only()).unwrap())
    });
    g.bench_function("all_channels", |b| {
        b.iter(|| evolve(&s, 1.0, usize::MAX, &Diagnostics::all()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, heat, waves);
criterion_main!(benches);
