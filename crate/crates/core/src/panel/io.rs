//! CSV ingestion and export.
//!
//! Observation file (long format, one row per region-industry-year):
//! `region,industry,year,employment,wage_bill,goods_flow[,extra...]`.
//!
//! Totals file: `region,industry,year,total_employment`. A row whose region is
//! the national label (default `NATIONAL`) and whose industry is empty is the
//! national total for that year; with an industry it is the national
//! employment of that industry. The `industry` column may be omitted entirely
//! when no national industry totals are given.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::{IndustryId, PanelDataset, PanelObservation, PanelParts, RegionId};
use super::PanelError;

/// Whether the goods-flow column varies by year or repeats a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    #[default]
    PerYear,
    TimeInvariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub region: String,
    pub industry: String,
    pub year: String,
    pub employment: String,
    pub wage_bill: String,
    pub goods_flow: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            region: "region".into(),
            industry: "industry".into(),
            year: "year".into(),
            employment: "employment".into(),
            wage_bill: "wage_bill".into(),
            goods_flow: "goods_flow".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TotalsColumnMap {
    pub region: String,
    pub industry: String,
    pub year: String,
    pub total_employment: String,
}

impl Default for TotalsColumnMap {
    fn default() -> Self {
        Self {
            region: "region".into(),
            industry: "industry".into(),
            year: "year".into(),
            total_employment: "total_employment".into(),
        }
    }
}

/// Column mapping and loading options, usually read from a JSON file.
///
/// ```json
/// { "columns": { "region": "nuts2" }, "flows": "time_invariant", "core_region": "LVT" }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PanelSchema {
    pub columns: ColumnMap,
    pub totals_columns: TotalsColumnMap,
    pub national_label: String,
    pub flows: FlowKind,
    pub core_region: Option<String>,
    pub region_order: Option<Vec<String>>,
    pub industry_order: Option<Vec<String>>,
    pub extra_columns: Vec<String>,
}

impl Default for PanelSchema {
    fn default() -> Self {
        Self {
            columns: ColumnMap::default(),
            totals_columns: TotalsColumnMap::default(),
            national_label: "NATIONAL".into(),
            flows: FlowKind::PerYear,
            core_region: None,
            region_order: None,
            industry_order: None,
            extra_columns: Vec::new(),
        }
    }
}

impl PanelSchema {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, PanelError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| PanelError::Io { path: path.display().to_string(), source })?;
        serde_json::from_reader(file).map_err(|source| PanelError::Schema { path: path.display().to_string(), source })
    }
}

struct Table {
    name: String,
    headers: HashMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, PanelError> {
        let name = path.display().to_string();
        let file = File::open(path).map_err(|source| PanelError::Io { path: name.clone(), source })?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = reader
            .headers()
            .map_err(|source| PanelError::Csv { path: name.clone(), source })?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim_start_matches('\u{feff}').to_string(), i))
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|source| PanelError::Csv { path: name.clone(), source })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record));
        }
        Ok(Self { name, headers, rows })
    }

    fn column(&self, name: &str) -> Result<usize, PanelError> {
        self.headers
            .get(name)
            .copied()
            .ok_or_else(|| PanelError::MissingColumn { file: self.name.clone(), column: name.to_string() })
    }

    fn parse<T: std::str::FromStr>(
        &self,
        line: u64,
        record: &csv::StringRecord,
        col: usize,
        column: &str,
    ) -> Result<T, PanelError> {
        let raw = record.get(col).unwrap_or("");
        raw.parse().map_err(|_| PanelError::Parse {
            file: self.name.clone(),
            line,
            column: column.to_string(),
            value: raw.to_string(),
        })
    }
}

/// Loads and validates a panel from an observation CSV and a totals CSV.
/// Row order in either file is irrelevant.
pub fn load_panel(
    panel_path: impl AsRef<Path>,
    totals_path: impl AsRef<Path>,
    schema: &PanelSchema,
) -> Result<PanelDataset, PanelError> {
    let panel = Table::read(panel_path.as_ref())?;
    let c = &schema.columns;
    let (ci, cj, cy, cl, cw, cf) = (
        panel.column(&c.region)?,
        panel.column(&c.industry)?,
        panel.column(&c.year)?,
        panel.column(&c.employment)?,
        panel.column(&c.wage_bill)?,
        panel.column(&c.goods_flow)?,
    );
    let extra_cols = schema
        .extra_columns
        .iter()
        .map(|name| Ok((name.clone(), panel.column(name)?)))
        .collect::<Result<Vec<_>, PanelError>>()?;

    let mut observations = Vec::with_capacity(panel.rows.len());
    for (line, rec) in &panel.rows {
        let mut extras = BTreeMap::new();
        for (name, col) in &extra_cols {
            extras.insert(name.clone(), panel.parse(*line, rec, *col, name)?);
        }
        observations.push(PanelObservation {
            region: RegionId::new(rec.get(ci).unwrap_or("")),
            industry: IndustryId::new(rec.get(cj).unwrap_or("")),
            year: panel.parse(*line, rec, cy, &c.year)?,
            employment: panel.parse(*line, rec, cl, &c.employment)?,
            wage_bill: panel.parse(*line, rec, cw, &c.wage_bill)?,
            goods_flow: panel.parse(*line, rec, cf, &c.goods_flow)?,
            extras,
        });
    }

    let totals = Table::read(totals_path.as_ref())?;
    let tc = &schema.totals_columns;
    let (ti, ty, tv) = (totals.column(&tc.region)?, totals.column(&tc.year)?, totals.column(&tc.total_employment)?);
    let tj = totals.headers.get(&tc.industry).copied();

    let mut region_totals = BTreeMap::new();
    let mut national_totals = BTreeMap::new();
    let mut national_industry = BTreeMap::new();
    let mut duplicates = Vec::new();
    for (line, rec) in &totals.rows {
        let region = rec.get(ti).unwrap_or("");
        let industry = tj.and_then(|k| rec.get(k)).unwrap_or("");
        let year: i32 = totals.parse(*line, rec, ty, &tc.year)?;
        let value: f64 = totals.parse(*line, rec, tv, &tc.total_employment)?;
        let fresh = if region == schema.national_label {
            if industry.is_empty() {
                national_totals.insert(year, value).is_none()
            } else {
                national_industry.insert((IndustryId::new(industry), year), value).is_none()
            }
        } else {
            region_totals.insert((RegionId::new(region), year), value).is_none()
        };
        if !fresh {
            duplicates.push(format!("duplicate total row at line {line} ({region}, {industry}, {year})"));
        }
    }
    if !duplicates.is_empty() {
        return Err(PanelError::TotalsInconsistent { details: duplicates });
    }

    let parts = PanelParts {
        observations,
        region_totals: region_totals.into_iter().map(|((r, y), v)| (r, y, v)).collect(),
        national_totals: national_totals.into_iter().collect(),
        national_industry_totals: (!national_industry.is_empty())
            .then(|| national_industry.into_iter().map(|((j, y), v)| (j, y, v)).collect()),
        core_region: schema.core_region.clone().map(RegionId),
        region_order: schema.region_order.clone().map(|v| v.into_iter().map(RegionId).collect()),
        industry_order: schema.industry_order.clone().map(|v| v.into_iter().map(IndustryId).collect()),
        flows_time_invariant: schema.flows == FlowKind::TimeInvariant,
    };
    let dataset = PanelDataset::new(parts)?;
    let core = dataset.core_region().clone();
    for o in dataset.observations().iter().filter(|o| o.region == core && o.goods_flow == 0.0) {
        log::warn!(
            "core region {} has zero internal goods flow for industry {} in {}; the transport term needs a positive value",
            core,
            o.industry,
            o.year
        );
    }
    Ok(dataset)
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> PanelError + '_ {
    move |source| PanelError::Csv { path: path.display().to_string(), source }
}

/// Writes a dataset in the default-schema CSV layout. Values are written in
/// shortest round-trip form so reloading yields an identical dataset.
pub fn write_panel(
    dataset: &PanelDataset,
    panel_path: impl AsRef<Path>,
    totals_path: impl AsRef<Path>,
) -> Result<(), PanelError> {
    let panel_path = panel_path.as_ref();
    let mut w = csv::Writer::from_path(panel_path).map_err(csv_err(panel_path))?;
    let mut header = vec!["region", "industry", "year", "employment", "wage_bill", "goods_flow"];
    header.extend(dataset.extra_columns().iter().map(String::as_str));
    w.write_record(&header).map_err(csv_err(panel_path))?;
    for o in dataset.observations() {
        let mut rec = vec![
            o.region.0.clone(),
            o.industry.0.clone(),
            o.year.to_string(),
            o.employment.to_string(),
            o.wage_bill.to_string(),
            o.goods_flow.to_string(),
        ];
        rec.extend(
            dataset.extra_columns().iter().map(|name| o.extras.get(name).map(f64::to_string).unwrap_or_default()),
        );
        w.write_record(&rec).map_err(csv_err(panel_path))?;
    }
    w.flush().map_err(|source| PanelError::Io { path: panel_path.display().to_string(), source })?;

    let totals_path = totals_path.as_ref();
    let mut w = csv::Writer::from_path(totals_path).map_err(csv_err(totals_path))?;
    w.write_record(["region", "industry", "year", "total_employment"]).map_err(csv_err(totals_path))?;
    for r in dataset.regions() {
        for &y in dataset.years() {
            if let Some(v) = dataset.region_totals().get(&(r.clone(), y)) {
                w.write_record([r.0.as_str(), "", &y.to_string(), &v.to_string()]).map_err(csv_err(totals_path))?;
            }
        }
    }
    for (y, v) in dataset.national_totals() {
        w.write_record(["NATIONAL", "", &y.to_string(), &v.to_string()]).map_err(csv_err(totals_path))?;
    }
    if let Some(nat) = dataset.national_industry_totals() {
        for ind in dataset.industries() {
            for &y in dataset.years() {
                if let Some(v) = nat.get(&(ind.clone(), y)) {
                    w.write_record(["NATIONAL", ind.as_str(), &y.to_string(), &v.to_string()])
                        .map_err(csv_err(totals_path))?;
                }
            }
        }
    }
    w.flush().map_err(|source| PanelError::Io { path: totals_path.display().to_string(), source })?;
    Ok(())
}
