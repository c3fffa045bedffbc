// Generate a synthetic panel from a JSON configuration and save it in the
// two-file CSV format the loader reads.

use std::error::Error;

use labor_panel::panel::{load_panel, write_panel, PanelSchema};
use labor_panel::synth::{generate, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // Every field is optional; omitted ones take their defaults.
    let config: SyntheticConfig =
        serde_json::from_str(r#"{ "n_regions": 4, "n_industries": 6, "n_years": 8, "sigma_e": 0.01, "seed": 2024 }"#)?;
    let data = generate(&config)?;

    let dir = tempfile::tempdir()?;
    let (p, t) = (dir.path().join("panel.csv"), dir.path().join("totals.csv"));
    write_panel(&data, &p, &t)?;
    println!("{}", std::fs::read_to_string(&p)?.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("...");
    println!("{}", std::fs::read_to_string(&t)?.lines().take(3).collect::<Vec<_>>().join("\n"));

    let back = load_panel(&p, &t, &PanelSchema::default())?;
    assert_eq!(back, data);
    println!("round trip ok: {} observations; same seed, same panel", back.len());
    assert_eq!(generate(&config)?, data);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
