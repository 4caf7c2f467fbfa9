use ttprep_cli::config::parse_config;
use ttprep_cli::error::AppError;

const MINIMAL: &str = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 8
"#;

#[test]
fn minimal_config_gets_documented_defaults() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.distribution.kind, "lognormal");
    assert_eq!(cfg.distribution.mu, Some(0.0));
    assert_eq!(cfg.distribution.sigma, Some(0.25));
    assert_eq!(cfg.grid.qubits, 8);
    assert!(cfg.grid.bounds.is_none());
    assert_eq!(cfg.ordering.scheme, "sequential");
    assert_eq!(cfg.cross.max_rank, 8);
    assert_eq!(cfg.cross.rel_tol, 1e-10);
    assert_eq!(cfg.cross.max_sweeps, 10);
    assert_eq!(cfg.cross.seed, 0);
    assert_eq!(cfg.chi_cap(), 8);
    assert!(!cfg.compile.merge);
    assert!(!cfg.compile.baseline);
    assert_eq!(cfg.simulate.shots, 10_000);
    assert_eq!(cfg.simulate.seed, 0);
    assert!(cfg.sweep.is_none());
    assert!(cfg.output.is_none());
    assert_eq!(cfg.dims(), 1);
}

#[test]
fn unknown_keys_are_hard_errors_listing_every_offender() {
    let text = r#"
[distribution]
kind = "lognormal"
sigma = 0.3
typo_one = 1

[grid]
qubits = 6
typo_two = "x"
"#;
    let err = parse_config(text).unwrap_err();
    let AppError::Config(msg) = &err else {
        panic!("expected config error, got {err:?}")
    };
    assert!(msg.contains("distribution.typo_one"), "{msg}");
    assert!(msg.contains("grid.typo_two"), "{msg}");
}

#[test]
fn unknown_top_level_section_is_reported() {
    let text = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6

[plotting]
backend = "x"
"#;
    let err = parse_config(text).unwrap_err();
    let AppError::Config(msg) = &err else {
        panic!("expected config error")
    };
    assert!(msg.contains("plotting"), "{msg}");
}

#[test]
fn mirrored_requires_exactly_two_dims() {
    let univariate = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6

[ordering]
scheme = "mirrored"
"#;
    assert!(matches!(
        parse_config(univariate),
        Err(AppError::Config(_))
    ));

    let trivariate = r#"
[distribution]
kind = "lognormal_nd"
mean = [0.0, 0.0, 0.0]
cov = [[0.0625, 0.0, 0.0], [0.0, 0.0625, 0.0], [0.0, 0.0, 0.0625]]

[grid]
qubits = 4

[ordering]
scheme = "mirrored"
"#;
    assert!(matches!(
        parse_config(trivariate),
        Err(AppError::Config(_))
    ));

    let bivariate = r#"
[distribution]
kind = "lognormal_nd"
mean = [0.0, 0.0]
cov = [[0.0625, 0.01875], [0.01875, 0.0625]]

[grid]
qubits = 4

[ordering]
scheme = "mirrored"
"#;
    let cfg = parse_config(bivariate).unwrap();
    assert_eq!(cfg.dims(), 2);
    assert_eq!(cfg.ordering.scheme, "mirrored");
}

#[test]
fn unknown_scheme_is_rejected() {
    let text = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6

[ordering]
scheme = "zigzag"
"#;
    assert!(matches!(parse_config(text), Err(AppError::Config(_))));
}

#[test]
fn chi_cap_must_cover_the_padded_rank() {
    let text = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 8

[cross]
max_rank = 5

[compile]
chi_cap = 4
"#;
    // padding rounds rank 5 up to 8, which chi_cap = 4 cannot hold
    let err = parse_config(text).unwrap_err();
    let AppError::Config(msg) = &err else {
        panic!("expected config error")
    };
    assert!(msg.contains("chi_cap"), "{msg}");

    let ok = text.replace("chi_cap = 4", "chi_cap = 8");
    assert_eq!(parse_config(&ok).unwrap().chi_cap(), 8);
}

#[test]
fn chi_cap_defaults_to_the_padded_max_rank() {
    let text = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 8

[cross]
max_rank = 6
"#;
    assert_eq!(parse_config(text).unwrap().chi_cap(), 8);
}

#[test]
fn round_trip_preserves_the_resolved_config() {
    let cfg = parse_config(MINIMAL).unwrap();
    let text = cfg.to_toml_string();
    let reparsed = parse_config(&text).unwrap();
    assert_eq!(cfg, reparsed);

    let full = r#"
[distribution]
kind = "lognormal_nd"
mean = [0.1, -0.2]
cov = [[0.0625, 0.01875], [0.01875, 0.0625]]

[grid]
qubits = 5
bounds = [[0.5, 2.0], [0.4, 2.5]]

[ordering]
scheme = "interleaved"

[cross]
max_rank = 4
rel_tol = 1e-8
max_sweeps = 6
rank_increment = 2
seed = 11
validation_samples = 128

[compile]
chi_cap = 8
merge = true
baseline = false

[simulate]
shots = 500
seed = 9

[sweep]
qubits = [4, 5]
repeats = 2

[output]
path = "out.csv"
format = "csv"
"#;
    let cfg = parse_config(full).unwrap();
    let reparsed = parse_config(&cfg.to_toml_string()).unwrap();
    assert_eq!(cfg, reparsed);
}

#[test]
fn univariate_params_and_nd_params_do_not_mix() {
    let text = r#"
[distribution]
kind = "lognormal"
mean = [0.0, 0.0]

[grid]
qubits = 6
"#;
    assert!(matches!(parse_config(text), Err(AppError::Config(_))));

    let nd_missing_cov = r#"
[distribution]
kind = "lognormal_nd"
mean = [0.0, 0.0]

[grid]
qubits = 6
"#;
    assert!(matches!(
        parse_config(nd_missing_cov),
        Err(AppError::Config(_))
    ));

    let ragged_cov = r#"
[distribution]
kind = "lognormal_nd"
mean = [0.0, 0.0]
cov = [[0.0625, 0.0], [0.0]]

[grid]
qubits = 6
"#;
    assert!(matches!(parse_config(ragged_cov), Err(AppError::Config(_))));

    let unknown_kind = r#"
[distribution]
kind = "cauchy"

[grid]
qubits = 6
"#;
    assert!(matches!(
        parse_config(unknown_kind),
        Err(AppError::Config(_))
    ));
}

#[test]
fn bounds_must_match_dims_and_be_ordered() {
    let wrong_count = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6
bounds = [[0.5, 2.0], [0.5, 2.0]]
"#;
    assert!(matches!(
        parse_config(wrong_count),
        Err(AppError::Config(_))
    ));

    let inverted = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6
bounds = [[2.0, 0.5]]
"#;
    assert!(matches!(parse_config(inverted), Err(AppError::Config(_))));
}

#[test]
fn sweep_needs_at_least_one_point_and_defaults_repeats() {
    let empty = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6

[sweep]
qubits = []
"#;
    assert!(matches!(parse_config(empty), Err(AppError::Config(_))));

    let ok = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6

[sweep]
qubits = [4, 6, 8]
"#;
    let cfg = parse_config(ok).unwrap();
    let sweep = cfg.sweep.as_ref().unwrap();
    assert_eq!(sweep.qubits, vec![4, 6, 8]);
    assert_eq!(sweep.repeats, 5);
}

#[test]
fn output_format_is_validated() {
    let text = r#"
[distribution]
kind = "lognormal"

[grid]
qubits = 6

[output]
format = "yaml"
"#;
    assert!(matches!(parse_config(text), Err(AppError::Config(_))));
}

#[test]
fn baseline_is_univariate_only() {
    let text = r#"
[distribution]
kind = "lognormal_nd"
mean = [0.0, 0.0]
cov = [[0.0625, 0.01875], [0.01875, 0.0625]]

[grid]
qubits = 4

[compile]
baseline = true
"#;
    assert!(matches!(parse_config(text), Err(AppError::Config(_))));
}
