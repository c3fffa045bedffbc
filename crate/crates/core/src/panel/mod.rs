//! Region × industry × year panel: domain types, CSV ingestion and validation.
//!
//! A [`PanelDataset`] is immutable once built. It holds one [`PanelObservation`]
//! per (region, industry, year) cell together with the economy-wide totals the
//! regressors are normalised by: total employment per region-year, national
//! total employment per year, and optionally national employment per
//! industry-year.
//!
//! When national industry totals are omitted they are taken to be the sum of
//! the panel's regions, and the national total must equal the sum of region
//! totals. When they are supplied, the panel's regions may cover only part of
//! the national territory and the national figures must be at least the
//! regional sums.

mod dataset;
mod io;
mod validate;

pub use dataset::{natural_order, IndustryId, PanelCube, PanelDataset, PanelObservation, PanelParts, RegionId};
pub use io::{load_panel, write_panel, ColumnMap, FlowKind, PanelSchema, TotalsColumnMap};
pub use validate::{validate, Violation};

use thiserror::Error;

/// Errors raised while loading or constructing a panel.
#[derive(Debug, Error)]
pub enum PanelError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("invalid schema file {path}: {source}")]
    Schema {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{file}: missing column `{column}`")]
    MissingColumn { file: String, column: String },
    #[error("{file} line {line}: cannot parse `{value}` in column `{column}`")]
    Parse { file: String, line: u64, column: String, value: String },
    #[error("non-positive employment {value} at region {region}, industry {industry}, year {year}")]
    NonPositiveEmployment { region: String, industry: String, year: i32, value: f64 },
    #[error("unbalanced panel: {} missing cell(s): {}", missing.len(), format_triples(missing))]
    UnbalancedPanel { missing: Vec<(String, String, i32)> },
    #[error("years are not contiguous: {years:?}")]
    NonContiguousYears { years: Vec<i32> },
    #[error("totals inconsistent: {}", details.join("; "))]
    TotalsInconsistent { details: Vec<String> },
    #[error("goods flow is not time-invariant for region {region}, industry {industry}")]
    FlowNotTimeInvariant { region: String, industry: String },
    #[error("core region `{0}` is not a region of the panel")]
    UnknownCoreRegion(String),
    #[error("region/industry order list does not match the data: {0}")]
    BadOrder(String),
    #[error("invalid panel: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid { violations: Vec<Violation> },
    #[error("panel is empty")]
    Empty,
}

fn format_triples(cells: &[(String, String, i32)]) -> String {
    cells.iter().map(|(r, i, y)| format!("({r}, {i}, {y})")).collect::<Vec<_>>().join(", ")
}
