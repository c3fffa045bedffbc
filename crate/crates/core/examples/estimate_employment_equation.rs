// Fixed-effects (dummy-variable) estimation of the employment equation, with
// the same unit dummies excluded as in the published specification.

use std::error::Error;

use labor_panel::estimators::estimate_lsdv;
use labor_panel::features::{assemble_design, build_features, ModelSpec};
use labor_panel::synth::{generate, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = SyntheticConfig::default();
    let data = generate(&config)?;

    let spec = ModelSpec::published_lsdv();
    let features = build_features(&data, &spec.feature_options())?;
    let design = assemble_design(&features, &spec)?;
    println!("design: {} rows x {} columns", design.n_obs(), design.x.ncols());

    let fit = estimate_lsdv(&design)?;
    println!("{:<6}{:>10}{:>10}{:>10}", "", "truth", "estimate", "t");
    for (c, truth) in fit.structural().zip(config.slopes()) {
        println!("{:<6}{:>10.3}{:>10.3}{:>10.2}", c.symbol, truth, c.estimate, c.t_stat);
    }
    println!("unit dummies kept: {}", fit.dummies().count());
    println!("adjusted R2 {:.4}, Durbin-Watson {:.3}", fit.r2_adjusted, fit.durbin_watson);
    for w in &fit.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
