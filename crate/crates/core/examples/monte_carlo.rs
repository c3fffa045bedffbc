// Repeated simulation and estimation: bias, spread and interval coverage of
// each estimator, and how often the Hausman test rejects.

use std::error::Error;

use labor_panel::synth::{monte_carlo, SyntheticConfig};

fn report(reps: usize) -> Result<(), Box<dyn Error>> {
    let summary = monte_carlo(&SyntheticConfig::default(), reps)?;
    println!("{} of {} replications completed", summary.completed, summary.replications);
    for est in &summary.estimators {
        println!("{}", est.method);
        for c in &est.coefficients {
            println!(
                "  {:<6} truth {:>7.3}  bias {:>10.2e}  sd {:>9.2e}  coverage {:.2}",
                c.symbol, c.truth, c.bias, c.sd, c.coverage
            );
        }
    }
    println!("Hausman rejects at 5% in {:.0}% of replications", 100.0 * summary.hausman.rejection_rate_5);
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    report(50)
}

/// `cargo run --release --example monte_carlo -- 500` for more replications.
fn main() {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    if let Err(e) = report(reps) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
