// Write a small panel to CSV, load it back, and show what the validator
// reports when a file is broken.

use std::error::Error;

use labor_panel::panel::{load_panel, validate, write_panel, PanelError, PanelSchema};
use labor_panel::synth::{generate, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let panel_csv = dir.path().join("panel.csv");
    let totals_csv = dir.path().join("totals.csv");

    let config = SyntheticConfig { n_regions: 3, n_industries: 4, n_years: 5, ..Default::default() };
    write_panel(&generate(&config)?, &panel_csv, &totals_csv)?;

    let data = load_panel(&panel_csv, &totals_csv, &PanelSchema::default())?;
    println!(
        "loaded {} cells: {} regions, {} industries, years {:?}",
        data.len(),
        data.regions().len(),
        data.industries().len(),
        data.years()
    );
    assert!(validate(&data).is_empty());

    // Drop one observation row and the loader names the missing cell.
    let text = std::fs::read_to_string(&panel_csv)?;
    let broken: Vec<&str> = text.lines().enumerate().filter(|(k, _)| *k != 7).map(|(_, l)| l).collect();
    std::fs::write(&panel_csv, broken.join("\n"))?;
    match load_panel(&panel_csv, &totals_csv, &PanelSchema::default()) {
        Err(e @ PanelError::UnbalancedPanel { .. }) => println!("rejected: {e}"),
        Ok(_) => return Err("a panel with a missing cell was accepted".into()),
        Err(other) => return Err(other.into()),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
