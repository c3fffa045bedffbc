// Compute the lagged regressors for every cell and print a few rows.

use std::error::Error;

use labor_panel::features::{build_features, FeatureOptions, FlowMode};
use labor_panel::synth::{generate, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = generate(&SyntheticConfig::default())?;

    let lagged = build_features(&data, &FeatureOptions::default())?;
    let fixed = build_features(&data, &FeatureOptions { flow_mode: FlowMode::Static, ..Default::default() })?;
    println!(
        "{} units, {} rows with lagged flows, {} rows with first-year flows",
        lagged.n_units(),
        lagged.rows.len(),
        fixed.rows.len()
    );

    println!(
        "{:>6} {:>8} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "region", "industry", "year", "dep", "x1", "x2", "x3", "x4", "x5"
    );
    for row in lagged.rows.iter().take(6) {
        let x = row.regressors();
        println!(
            "{:>6} {:>8} {:>5} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            row.region, row.industry, row.year, row.dep, x[0], x[1], x[2], x[3], x[4]
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
