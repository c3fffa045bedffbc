use labor_panel::estimators::Method;
use labor_panel::panel::validate;
use labor_panel::synth::{generate, monte_carlo, SynthError, SyntheticConfig, PUBLISHED_RE_PHI};
use proptest::prelude::*;

#[test]
fn same_seed_same_panel_different_seed_different_panel() {
    let config = SyntheticConfig { seed: 99, ..Default::default() };
    assert_eq!(generate(&config).unwrap(), generate(&config).unwrap());
    let other = generate(&SyntheticConfig { seed: 100, ..config }).unwrap();
    assert_ne!(generate(&SyntheticConfig { seed: 99, ..Default::default() }).unwrap(), other);
}

#[test]
fn json_config_fills_in_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"seed": 5, "sigma_u": 0.01, "true_phi": [-1.878, 0.112, 0.022, 0.979, 0.549, -0.581], "intercept": true}"#,
    )
    .unwrap();
    let config = SyntheticConfig::from_json_file(&path).unwrap();
    assert_eq!(config.seed, 5);
    assert_eq!(config.n_regions, 5);
    assert_eq!(config.true_phi, PUBLISHED_RE_PHI.to_vec());
    assert_eq!(config.effective_intercept(), -1.878);
    std::fs::write(&path, r#"{"n_regions": "five"}"#).unwrap();
    assert!(matches!(SyntheticConfig::from_json_file(&path), Err(SynthError::Config { .. })));
}

#[test]
fn invalid_configurations_are_rejected() {
    for bad in [
        SyntheticConfig { n_years: 2, ..Default::default() },
        SyntheticConfig { sigma_e: -1.0, ..Default::default() },
        SyntheticConfig { coverage: 1.5, ..Default::default() },
        SyntheticConfig { effect_correlation: 2.0, ..Default::default() },
        SyntheticConfig { true_phi: vec![0.1, 0.2], ..Default::default() },
    ] {
        assert!(matches!(generate(&bad), Err(SynthError::InvalidConfig(_))), "{bad:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_panels_are_valid_or_reported_as_degenerate(
        seed in any::<u64>(),
        regions in 2usize..7,
        industries in 2usize..10,
        years in 3usize..12,
        sigma_e in 0.0f64..0.05,
        sigma_u in 0.0f64..0.05,
    ) {
        let config = SyntheticConfig { n_regions: regions, n_industries: industries, n_years: years, sigma_e, sigma_u, seed, ..Default::default() };
        match generate(&config) {
            Ok(data) => {
                prop_assert_eq!(data.len(), regions * industries * years);
                prop_assert!(validate(&data).is_empty());
            }
            Err(SynthError::DegenerateState { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}

#[test]
fn estimation_error_grows_with_the_noise_level() {
    let rmse: Vec<f64> = [0.001, 0.005, 0.02]
        .iter()
        .map(|&sigma_e| {
            let config = SyntheticConfig { sigma_e, ..Default::default() };
            let summary = monte_carlo(&config, 30).unwrap();
            let lsdv = summary.estimator(Method::Lsdv).unwrap();
            lsdv.coefficients.iter().map(|c| c.rmse).sum::<f64>()
        })
        .collect();
    assert!(rmse[0] < rmse[1] && rmse[1] < rmse[2], "{rmse:?}");
}

#[test]
fn monte_carlo_is_reproducible() {
    let config = SyntheticConfig { seed: 11, ..Default::default() };
    let a = monte_carlo(&config, 8).unwrap();
    let b = monte_carlo(&config, 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.completed + a.degenerate, 8);
    assert_eq!(a.estimators.len(), 3);
}

#[test]
fn a_single_replication_reproduces_a_direct_fit() {
    use labor_panel::estimators::estimate_lsdv;
    use labor_panel::features::{assemble_design, build_features, ModelSpec};

    let config = SyntheticConfig { seed: 21, ..Default::default() };
    let summary = monte_carlo(&config, 1).unwrap();
    assert_eq!(summary.completed, 1);

    let spec = ModelSpec::default();
    let features = build_features(&generate(&config).unwrap(), &spec.feature_options()).unwrap();
    let direct = estimate_lsdv(&assemble_design(&features, &spec.within()).unwrap()).unwrap();
    for c in &summary.estimator(Method::Lsdv).unwrap().coefficients {
        assert_eq!(c.mean, direct.estimate(&c.symbol).unwrap(), "{}", c.symbol);
        assert_eq!(c.sd, 0.0);
        assert_eq!(c.bias, c.mean - c.truth);
    }
}
