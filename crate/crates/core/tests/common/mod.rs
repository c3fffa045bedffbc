#![allow(dead_code)]

use std::path::PathBuf;

use labor_panel::panel::{load_panel, PanelDataset, PanelSchema};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// 3 regions × 2 industries × 2000–2003, with national industry totals that
/// exceed the panel's regions.
pub fn micro_panel() -> PanelDataset {
    load_panel(fixture("micro_panel.csv"), fixture("micro_totals.csv"), &PanelSchema::default())
        .expect("micro fixture loads")
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    let scale = 1.0_f64.max(a.abs()).max(b.abs());
    assert!((a - b).abs() <= tol * scale, "{what}: {a} vs {b} (tol {tol})");
}
