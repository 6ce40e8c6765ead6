use hypwave_cli::config::{DEFAULT_H, DEFAULT_T_FINAL, R_MARGIN};
use hypwave_cli::{parse_config, parse_config_str, CliError, EXIT_CONFIG};
use hypwave_core::solver::{Generator, Nonlinearity};

fn err_key(text: &str) -> String {
    let e = parse_config_str(text).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
    e.key()
        .unwrap_or_else(|| panic!("not a config error: {e}"))
        .to_string()
}

#[test]
fn minimal_config_gets_defaults() {
    let c = parse_config_str("experiment = \"dispersive_decay\"\n").unwrap();
    assert_eq!(c.h, DEFAULT_H);
    assert_eq!(c.cfl, 0.9);
    assert_eq!(c.t_final, DEFAULT_T_FINAL);
    assert_eq!(c.seed, 0);
    assert!(c.schedule.is_none());
    // gaussian of width 1 drops below 1e-12 near r = 5.26
    let supp = c.r_max - DEFAULT_T_FINAL - R_MARGIN;
    assert!((5.0..5.6).contains(&supp), "support {supp}");
    assert!(((c.r_max / c.h).round() * c.h - c.r_max).abs() < 1e-9);
    // nothing set explicitly, so the experiment keeps its own defaults
    assert!(c.settings.h.is_none());
    assert!(c.settings.equation.is_none());
    assert!(c.settings.data.is_none());
    assert_eq!(
        c.output,
        std::path::Path::new("hypwave-out/dispersive_decay")
    );
}

#[test]
fn cfl_guard_names_key() {
    assert_eq!(
        err_key("experiment = \"heat_kernel\"\n[time]\ncfl = 1.5\n"),
        "time.cfl"
    );
    assert_eq!(
        err_key("experiment = \"heat_kernel\"\n[time]\ncfl = -0.1\n"),
        "time.cfl"
    );
}

#[test]
fn unknown_keys_are_named() {
    assert_eq!(
        err_key("experiment = \"heat_kernel\"\n[time]\nfoo = 1\n"),
        "time.foo"
    );
    assert_eq!(
        err_key("experiment = \"heat_kernel\"\nbogus = 1\n"),
        "bogus"
    );
    assert_eq!(
        err_key("experiment = \"heat_kernel\"\n[gird]\nh = 0.1\n"),
        "gird"
    );
}

#[test]
fn type_errors_are_named() {
    assert_eq!(
        err_key("experiment = \"heat_kernel\"\n[grid]\nh = \"small\"\n"),
        "grid.h"
    );
    assert_eq!(
        err_key("experiment = \"heat_kernel\"\n[data]\ngenerator = \"blob\"\n"),
        "data.generator"
    );
}

#[test]
fn guard_violations_are_named() {
    let base = "experiment = \"heat_kernel\"\n";
    assert_eq!(err_key(""), "experiment");
    assert_eq!(err_key("experiment = \"nope\"\n"), "experiment");
    assert_eq!(err_key(&format!("{base}[grid]\nh = 0\n")), "grid.h");
    assert_eq!(err_key(&format!("{base}[grid]\nr_max = 3\n")), "grid.r_max");
    assert_eq!(
        err_key(&format!("{base}[time]\nt_final = -1\n")),
        "time.t_final"
    );
    assert_eq!(
        err_key(&format!("{base}[schedule]\nvalues = []\n")),
        "schedule.values"
    );
    assert_eq!(
        err_key(&format!("{base}[equation]\npotential_amplitude = 1.0\n")),
        "equation.potential_radius"
    );
    assert_eq!(
        err_key(&format!(
            "{base}[equation]\npotential_amplitude = -1.0\npotential_radius = 1.0\n"
        )),
        "equation.potential_amplitude"
    );
    assert_eq!(
        err_key(&format!(
            "{base}[data]\ngenerator = \"polynomial\"\nwidth = 1.0\n"
        )),
        "data.width"
    );
    assert_eq!(
        err_key(&format!(
            "{base}[data]\ngenerator = \"gaussian\"\nwidth = 0.0\n"
        )),
        "data.width"
    );
    assert_eq!(
        err_key(&format!("{base}[tolerances]\norder = nan\n")),
        "tolerances.order"
    );
}

#[test]
fn full_sweep_config_materializes() {
    let text = r#"
experiment = "euclidean_approx"
output = "out/sweep"
seed = 7

[geometry]
kind = "hyperbolic"
mass_shift = 0.0

[equation]
nonlinearity = "quintic"
potential_amplitude = 1.0
potential_radius = 2.0

[grid]
h = 0.01

[time]
t_final = 4.0
cfl = 0.5

[data]
generator = "polynomial"
amplitude = 0.5
radius = 2.0
power = 6

[schedule]
values = [8.0, 32.0, 128.0]

[tolerances]
lambda_order_min = -3.0
"#;
    let c = parse_config_str(text).unwrap();
    assert_eq!(c.schedule.as_deref(), Some(&[8.0, 32.0, 128.0][..]));
    assert_eq!(c.settings.schedule, c.schedule);
    assert_eq!(c.settings.seed, 7);
    assert_eq!(c.settings.h, Some(0.01));
    assert_eq!(c.settings.cfl, Some(0.5));
    assert_eq!(c.settings.t_final, Some(4.0));
    assert_eq!(c.settings.tolerances["lambda_order_min"], -3.0);
    let eq = c.settings.equation.as_ref().unwrap();
    assert_eq!(eq.nonlinearity, Nonlinearity::DefocusingQuintic);
    assert_eq!(eq.potential_support(), 2.0);
    assert_eq!(
        c.settings.data.as_ref().unwrap().u0,
        Generator::SmoothCutoffPolynomial {
            amplitude: 0.5,
            radius: 2.0,
            power: 6
        }
    );
    // supp(data) + supp(V) + T + margin
    assert!(
        (c.r_max - (2.0 + 2.0 + 4.0 + R_MARGIN)).abs() < 0.06,
        "{}",
        c.r_max
    );
}

#[test]
fn hash_tracks_content_not_output() {
    let a = parse_config_str("experiment = \"heat_kernel\"\n").unwrap();
    let b = parse_config_str("experiment = \"heat_kernel\"\noutput = \"elsewhere\"\n").unwrap();
    let c = parse_config_str("experiment = \"heat_kernel\"\nseed = 1\n").unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn missing_file_is_a_config_error() {
    let e = parse_config(std::path::Path::new("/nonexistent/hypwave.toml")).unwrap_err();
    assert!(matches!(e, CliError::Read { .. }));
    assert_eq!(e.exit_code(), EXIT_CONFIG);
}
