mod common;

use labor_panel::features::{
    assemble_design, build_features, ColumnKind, FeatureError, FeatureOptions, FeatureSet, FlowMode, ModelSpec,
    OmegaMode,
};
use labor_panel::panel::{IndustryId, PanelDataset, PanelObservation, PanelParts, RegionId};
use labor_panel::synth::{generate, SyntheticConfig};
use proptest::prelude::*;

use common::{assert_close, micro_panel};

// Values from an independent calculator working directly from the fixture
// numbers: (region, industry, year, [dep, x1, x2, x3, x4, x5]).
const LAGGED_SHARE: [(&str, &str, i32, [f64; 6]); 12] = [
    (
        "1",
        "A",
        2002,
        [
            0.00716671793509327,
            0.08569923055265916,
            0.40313336354347,
            -0.4328941452782282,
            0.7668847979072615,
            -0.24049175838896308,
        ],
    ),
    (
        "1",
        "B",
        2002,
        [
            0.05352898072195056,
            -0.03831013163103099,
            -0.06134172475143168,
            0.45423653182351453,
            -0.12024587919448154,
            1.5337695958145228,
        ],
    ),
    (
        "2",
        "A",
        2002,
        [
            0.0578634603751067,
            -0.09198194668479315,
            -0.7795620423351812,
            0.3203704290882913,
            -0.044749395810861715,
            0.8902768914895287,
        ],
    ),
    (
        "2",
        "B",
        2002,
        [
            -0.06098501619475116,
            0.03806284715354308,
            0.16180182656277808,
            -0.16951741246733482,
            0.44513844574476436,
            -0.08949879162172325,
        ],
    ),
    (
        "3",
        "A",
        2002,
        [
            0.044237208663341576,
            -0.16097481817174464,
            -1.3261057487032513,
            0.35043542285598794,
            -0.09110440855782971,
            0.8820068623593443,
        ],
    ),
    (
        "3",
        "B",
        2002,
        [
            0.02926612015245955,
            -0.03303307453018717,
            -0.2689810895296761,
            -0.18167241688151384,
            0.44100343117967217,
            -0.18220881711565923,
        ],
    ),
    (
        "1",
        "A",
        2003,
        [
            -0.04615657750623303,
            0.09907130240833555,
            0.4183852285184573,
            -0.412933257846595,
            0.7666139373267973,
            -0.14830895397617674,
        ],
    ),
    (
        "1",
        "B",
        2003,
        [
            0.0374427974837761,
            -0.06672941215138833,
            -0.050042733571274506,
            0.42783515646829057,
            -0.07415447698808834,
            1.5332278746535943,
        ],
    ),
    (
        "2",
        "A",
        2003,
        [
            0.011192540432278575,
            -0.10856806236990887,
            -0.8245897336107478,
            0.2368645380998469,
            0.016779170771380844,
            0.7756370715142976,
        ],
    ),
    (
        "2",
        "B",
        2003,
        [
            0.050174100090535356,
            0.04228932551140673,
            0.20778637573082534,
            -0.13417482688592133,
            0.38781853575714875,
            0.03355834154276169,
        ],
    ),
    (
        "3",
        "A",
        2003,
        [
            0.06231876439925821,
            -0.17091119294404428,
            -1.2075819858668535,
            0.33854304122965795,
            -0.047164289354879436,
            0.9399449237434803,
        ],
    ),
    (
        "3",
        "B",
        2003,
        [
            -0.04105407590450194,
            -0.010735142796813594,
            -0.3575274333192351,
            -0.17859370999696175,
            0.4699724618717401,
            -0.0943285787097589,
        ],
    ),
];

const STATIC_UNIFORM: [(&str, &str, i32, [f64; 6]); 18] = [
    (
        "1",
        "A",
        2001,
        [
            0.016000341346441016,
            0.09293205739935732,
            0.7156200364120039,
            -0.4054651081081643,
            0.7514160886839212,
            -0.11902825506481557,
        ],
    ),
    (
        "1",
        "B",
        2001,
        [
            -0.060200119538972974,
            -0.07280504037330585,
            -0.06453852113757118,
            0.4054651081081644,
            -0.05951412753240772,
            1.5028321773678424,
        ],
    ),
    (
        "2",
        "A",
        2001,
        [
            0.03174869831458027,
            -0.08938949939459727,
            -0.48835276791393206,
            0.3364722366212129,
            -0.07526248450054686,
            0.8711262785308876,
        ],
    ),
    (
        "2",
        "B",
        2001,
        [
            0.010810916104215806,
            0.03255547528452031,
            0.27193371548364176,
            -0.1743533871447779,
            0.4355631392654437,
            -0.15052496900109363,
        ],
    ),
    (
        "3",
        "A",
        2001,
        [
            -0.0840831172105414,
            -0.1790016580842843,
            -1.076139432816051,
            0.26236426446749106,
            -0.010723963362975611,
            0.7894822894903774,
        ],
    ),
    (
        "3",
        "B",
        2001,
        [
            0.042559614418795855,
            0.007237667300230603,
            -0.2876820724517809,
            -0.14310084364067344,
            0.3947411447451887,
            -0.02144792672595123,
        ],
    ),
    (
        "1",
        "A",
        2002,
        [
            0.00716671793509327,
            0.08569923055265916,
            0.7156200364120039,
            -0.4328941452782282,
            0.7668847979072615,
            -0.24049175838896308,
        ],
    ),
    (
        "1",
        "B",
        2002,
        [
            0.05352898072195056,
            -0.03831013163103099,
            -0.06453852113757118,
            0.45423653182351453,
            -0.12024587919448154,
            1.5337695958145228,
        ],
    ),
    (
        "2",
        "A",
        2002,
        [
            0.0578634603751067,
            -0.09198194668479315,
            -0.48835276791393206,
            0.3203704290882913,
            -0.044749395810861715,
            0.8902768914895287,
        ],
    ),
    (
        "2",
        "B",
        2002,
        [
            -0.06098501619475116,
            0.03806284715354308,
            0.27193371548364176,
            -0.16951741246733482,
            0.44513844574476436,
            -0.08949879162172325,
        ],
    ),
    (
        "3",
        "A",
        2002,
        [
            0.044237208663341576,
            -0.16097481817174464,
            -1.076139432816051,
            0.35043542285598794,
            -0.09110440855782971,
            0.8820068623593443,
        ],
    ),
    (
        "3",
        "B",
        2002,
        [
            0.02926612015245955,
            -0.03303307453018717,
            -0.2876820724517809,
            -0.18167241688151384,
            0.44100343117967217,
            -0.18220881711565923,
        ],
    ),
    (
        "1",
        "A",
        2003,
        [
            -0.04615657750623303,
            0.09907130240833555,
            0.7156200364120039,
            -0.412933257846595,
            0.7666139373267973,
            -0.14830895397617674,
        ],
    ),
    (
        "1",
        "B",
        2003,
        [
            0.0374427974837761,
            -0.06672941215138833,
            -0.06453852113757118,
            0.42783515646829057,
            -0.07415447698808834,
            1.5332278746535943,
        ],
    ),
    (
        "2",
        "A",
        2003,
        [
            0.011192540432278575,
            -0.10856806236990887,
            -0.48835276791393206,
            0.2368645380998469,
            0.016779170771380844,
            0.7756370715142976,
        ],
    ),
    (
        "2",
        "B",
        2003,
        [
            0.050174100090535356,
            0.04228932551140673,
            0.27193371548364176,
            -0.13417482688592133,
            0.38781853575714875,
            0.03355834154276169,
        ],
    ),
    (
        "3",
        "A",
        2003,
        [
            0.06231876439925821,
            -0.17091119294404428,
            -1.076139432816051,
            0.33854304122965795,
            -0.047164289354879436,
            0.9399449237434803,
        ],
    ),
    (
        "3",
        "B",
        2003,
        [
            -0.04105407590450194,
            -0.010735142796813594,
            -0.2876820724517809,
            -0.17859370999696175,
            0.4699724618717401,
            -0.0943285787097589,
        ],
    ),
];

fn check_against(features: &FeatureSet, expected: &[(&str, &str, i32, [f64; 6])]) {
    assert_eq!(features.rows.len(), expected.len());
    for (region, industry, year, want) in expected {
        let row = features
            .rows
            .iter()
            .find(|r| r.region.as_str() == *region && r.industry.as_str() == *industry && r.year == *year)
            .unwrap_or_else(|| panic!("no row for {region}/{industry}/{year}"));
        let got = [row.dep, row.x1_wage, row.x2_transport, row.x3_linkages, row.x4_agglomeration, row.x5_concentration];
        for k in 0..6 {
            assert_close(got[k], want[k], 1e-12, &format!("{region}/{industry}/{year} column {k}"));
        }
    }
}

#[test]
fn micro_panel_lagged_flows_match_independent_values() {
    let features = build_features(&micro_panel(), &FeatureOptions::default()).unwrap();
    check_against(&features, &LAGGED_SHARE);
}

#[test]
fn micro_panel_static_flows_uniform_weights_match_independent_values() {
    let options = FeatureOptions { flow_mode: FlowMode::Static, omega: OmegaMode::Uniform, ..Default::default() };
    let features = build_features(&micro_panel(), &options).unwrap();
    check_against(&features, &STATIC_UNIFORM);
}

#[test]
fn rows_are_sorted_by_region_industry_year() {
    let features = build_features(&micro_panel(), &FeatureOptions::default()).unwrap();
    let keys: Vec<_> = features.rows.iter().map(|r| (r.region.clone(), r.industry.clone(), r.year)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by_key(|(r, i, y)| (r.as_str().parse::<u32>().unwrap(), i.as_str().to_string(), *y));
    assert_eq!(keys, sorted);
}

/// Every region has the same industry mix, wages and flows, and the regions
/// make up the whole nation.
fn identical_regions(n_regions: usize, n_industries: usize, n_years: usize) -> PanelDataset {
    let mut parts = PanelParts::default();
    for r in 0..n_regions {
        for j in 0..n_industries {
            for t in 0..n_years {
                let employment = 100.0 + 17.0 * j as f64 + 3.0 * t as f64;
                parts.observations.push(PanelObservation {
                    region: RegionId::new((r + 1).to_string()),
                    industry: IndustryId::new((j + 1).to_string()),
                    year: 2000 + t as i32,
                    employment,
                    wage_bill: employment * (15.0 + j as f64 + 0.5 * t as f64),
                    goods_flow: 40.0 + 5.0 * j as f64 + t as f64,
                    extras: Default::default(),
                });
            }
        }
    }
    let manufacturing = |t: usize| (0..n_industries).map(|j| 100.0 + 17.0 * j as f64 + 3.0 * t as f64).sum::<f64>();
    for t in 0..n_years {
        let total = 4.0 * manufacturing(t);
        for r in 0..n_regions {
            parts.region_totals.push((RegionId::new((r + 1).to_string()), 2000 + t as i32, total));
        }
        parts.national_totals.push((2000 + t as i32, n_regions as f64 * total));
    }
    PanelDataset::new(parts).unwrap()
}

#[test]
fn identical_regions_give_zero_regressors() {
    let data = identical_regions(3, 4, 4);
    for options in [
        FeatureOptions::default(),
        FeatureOptions { flow_mode: FlowMode::Static, omega: OmegaMode::Uniform, ..Default::default() },
    ] {
        for row in build_features(&data, &options).unwrap().rows {
            assert!(row.dep.abs() < 1e-13, "dep = {} at {}/{}/{}", row.dep, row.region, row.industry, row.year);
            for (k, x) in row.regressors().iter().enumerate() {
                assert!(x.abs() < 1e-13, "x{} = {x} at {}/{}/{}", k + 1, row.region, row.industry, row.year);
            }
        }
    }
}

#[test]
fn row_counts_for_the_default_panel() {
    let data = generate(&SyntheticConfig::default()).unwrap();
    let lagged = build_features(&data, &FeatureOptions::default()).unwrap();
    let fixed = build_features(&data, &FeatureOptions { flow_mode: FlowMode::Static, ..Default::default() }).unwrap();
    assert_eq!((lagged.rows.len(), lagged.periods()), (315, 7));
    assert_eq!((fixed.rows.len(), fixed.periods()), (360, 8));
    assert_eq!(lagged.rows[0].year, 1988);
    assert_eq!(fixed.rows[0].year, 1987);
}

#[test]
fn fewer_than_three_years_is_rejected() {
    let data = identical_regions(2, 3, 2);
    assert!(matches!(
        build_features(&data, &FeatureOptions::default()),
        Err(FeatureError::InsufficientYears { years: 2, .. })
    ));
}

#[test]
fn published_design_has_39_dummies_each_summing_to_the_period_count() {
    let data = generate(&SyntheticConfig::default()).unwrap();
    let spec = ModelSpec::published_lsdv();
    let features = build_features(&data, &spec.feature_options()).unwrap();
    let design = assemble_design(&features, &spec).unwrap();
    let dummies: Vec<usize> =
        (0..design.columns.len()).filter(|&c| matches!(design.columns[c].kind, ColumnKind::Dummy { .. })).collect();
    assert_eq!(dummies.len(), 39);
    assert_eq!(design.x.ncols(), 44);
    for excluded in ["D5", "D26", "D27", "D28", "D29", "D30"] {
        assert!(design.column_index(excluded).is_none(), "{excluded} should be excluded");
    }
    for &c in &dummies {
        assert_eq!(design.x.column(c).sum(), 7.0, "{}", design.columns[c].symbol);
    }
    // Each row has at most one dummy set; rows of excluded units have none.
    let per_row: Vec<f64> = (0..design.n_obs()).map(|r| dummies.iter().map(|&c| design.x[(r, c)]).sum()).collect();
    assert_eq!(per_row.iter().filter(|&&s| s == 1.0).count(), 39 * 7);
    assert_eq!(per_row.iter().filter(|&&s| s == 0.0).count(), 6 * 7);
    // D-number = industry · R + region + 1 (zero-based positions).
    let k = design.column_index("D35").unwrap();
    assert_eq!(design.columns[k].kind, ColumnKind::Dummy { region: 4, industry: 6 });
}

#[test]
fn unknown_exclusion_is_rejected() {
    let data = generate(&SyntheticConfig::default()).unwrap();
    let spec = ModelSpec { dummy_exclusions: vec!["D46".into()], ..ModelSpec::default() };
    let features = build_features(&data, &spec.feature_options()).unwrap();
    assert!(assemble_design(&features, &spec).is_err());
}

fn rescaled(data: &PanelDataset, employment: f64, wages: f64, flows: f64) -> PanelDataset {
    let mut parts = PanelParts {
        observations: data.observations().to_vec(),
        region_totals: data.region_totals().iter().map(|((r, y), v)| (r.clone(), *y, v * employment)).collect(),
        national_totals: data.national_totals().iter().map(|(y, v)| (*y, v * employment)).collect(),
        national_industry_totals: data
            .national_industry_totals()
            .map(|m| m.iter().map(|((j, y), v)| (j.clone(), *y, v * employment)).collect()),
        core_region: Some(data.core_region().clone()),
        ..Default::default()
    };
    for o in &mut parts.observations {
        o.employment *= employment;
        o.wage_bill *= employment * wages;
        o.goods_flow *= flows;
    }
    PanelDataset::new(parts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn regressors_are_invariant_to_units_of_measurement(
        employment in 0.01f64..100.0,
        wages in 0.01f64..100.0,
        flows in 0.01f64..100.0,
        seed in 0u64..1000,
    ) {
        let config = SyntheticConfig { n_regions: 3, n_industries: 5, n_years: 4, seed, ..Default::default() };
        let data = generate(&config);
        prop_assume!(data.is_ok());
        let data = data.unwrap();
        let base = build_features(&data, &FeatureOptions::default()).unwrap();
        let scaled = build_features(&rescaled(&data, employment, wages, flows), &FeatureOptions::default()).unwrap();
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            prop_assert!((a.dep - b.dep).abs() < 1e-10);
            for (x, y) in a.regressors().iter().zip(b.regressors()) {
                prop_assert!((x - y).abs() < 1e-10, "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn wage_regressor_is_zero_on_average_when_weighted_by_employment(seed in 0u64..1000) {
        // Σ_i L_ij · (w_ij / w_j) = Σ_i L_ij, i.e. exp(x1) averages to 1 with employment weights.
        let config = SyntheticConfig { n_regions: 4, n_industries: 5, n_years: 4, seed, ..Default::default() };
        let data = generate(&config);
        prop_assume!(data.is_ok());
        let data = data.unwrap();
        let cube = data.cube().unwrap();
        let features = build_features(&data, &FeatureOptions::default()).unwrap();
        for row in &features.rows {
            let j = data.industries().iter().position(|x| *x == row.industry).unwrap();
            let t = data.years().iter().position(|y| *y == row.year).unwrap() - 1;
            let mut weighted = 0.0;
            let mut total = 0.0;
            for other in features.rows.iter().filter(|r| r.industry == row.industry && r.year == row.year) {
                let i = data.regions().iter().position(|x| *x == other.region).unwrap();
                let l = cube.employment(i, j, t);
                weighted += l * other.x1_wage.exp();
                total += l;
            }
            prop_assert!((weighted / total - 1.0).abs() < 1e-12);
        }
    }
}
