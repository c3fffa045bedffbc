// Fixed effects, first differences and random effects on the same panel,
// followed by the Hausman comparison of fixed and random effects.
//
// Run it twice in your head: once with unit effects independent of the
// regressors (Hausman should not reject) and once with effects tied to
// initial employment (it should).

use std::error::Error;

use labor_panel::diagnostics::hausman_test;
use labor_panel::estimators::{estimate_fd, estimate_lsdv, estimate_re};
use labor_panel::features::{assemble_design, build_features, ModelSpec};
use labor_panel::synth::{generate, SyntheticConfig};

fn compare(label: &str, config: &SyntheticConfig) -> Result<(), Box<dyn Error>> {
    let data = generate(config)?;
    let spec = ModelSpec::default();
    let features = build_features(&data, &spec.feature_options())?;

    let fe = estimate_lsdv(&assemble_design(&features, &spec.within())?)?;
    let fd = estimate_fd(&features, &spec)?;
    let re = estimate_re(&assemble_design(&features, &spec.pooled())?, &spec)?;

    println!("{label}");
    println!("  {:<6}{:>10}{:>10}{:>10}{:>10}", "", "truth", "LSDV", "FD", "RE");
    for (s, truth) in spec.slope_symbols().iter().zip(config.slopes()) {
        let get = |r: &labor_panel::estimators::EstimationResult| r.estimate(s).unwrap_or(f64::NAN);
        println!("  {:<6}{:>10.3}{:>10.3}{:>10.3}{:>10.3}", s, truth, get(&fe), get(&fd), get(&re));
    }
    if let Some(vc) = &re.variance_components {
        println!("  RE: sigma2_u {:.3e}, sigma2_e {:.3e}, theta {:.3}", vc.sigma2_u, vc.sigma2_e, vc.theta);
    }
    let h = hausman_test(&fe, &re, &spec.slope_symbols())?;
    println!("  Hausman chi2({}) = {:.3}, p = {:.4}\n", h.dof, h.statistic, h.p_value);
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let base = SyntheticConfig { sigma_e: 0.002, sigma_u: 0.001, seed: 7, ..Default::default() };
    compare("unit effects uncorrelated with the regressors", &base)?;
    let correlated = SyntheticConfig { sigma_e: 0.005, sigma_u: 0.02, effect_correlation: 0.8, ..base };
    compare("unit effects correlated with initial employment", &correlated)?;
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
