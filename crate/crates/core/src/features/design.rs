use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DummyMode, FeatureRow, FeatureSet, FlowMode, ModelSpec, Regressor};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    Constant,
    Regressor,
    Extra,
    /// Indicator of unit `(region, industry)`, as 0-based positions.
    Dummy {
        region: usize,
        industry: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub symbol: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum DesignError {
    #[error("a constant together with the complete dummy set is collinear; drop the constant or exclude a dummy")]
    RankDeficientByConstruction,
    #[error("dummy exclusion `{label}` does not name a unit (valid: D1..D{max})")]
    UnknownUnitInExclusionList { label: String, max: usize },
    #[error("extra regressor `{0}` was not built into the feature rows")]
    UnknownExtraRegressor(String),
    #[error("no feature rows")]
    Empty,
}

/// Regression design: `y`, `x` and per-column / per-row metadata.
///
/// Columns are ordered: constant, `x1..x5` (as selected), extras, then one
/// dummy per retained unit in ascending D-index, where
/// `D = industry·R + region + 1` with 0-based positions, i.e. industries run
/// down the rows of a grid whose columns are regions.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub rows: Vec<FeatureRow>,
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub columns: Vec<Column>,
    /// Per row, the unit ordinal in row order (region-major); rows of a unit
    /// are contiguous and ascending in year.
    pub unit_index: Vec<usize>,
    pub n_regions: usize,
    pub n_industries: usize,
    pub warnings: Vec<String>,
}

impl DesignMatrix {
    pub fn n_obs(&self) -> usize {
        self.y.len()
    }

    pub fn n_units(&self) -> usize {
        self.unit_index.last().map_or(0, |u| u + 1)
    }

    pub fn column_index(&self, symbol: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.symbol == symbol)
    }

    pub fn has_constant(&self) -> bool {
        self.columns.iter().any(|c| c.kind == ColumnKind::Constant)
    }

    pub fn has_dummies(&self) -> bool {
        self.columns.iter().any(|c| matches!(c.kind, ColumnKind::Dummy { .. }))
    }

    /// Indices of regressor and extra columns.
    pub fn slope_columns(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.kind, ColumnKind::Regressor | ColumnKind::Extra))
            .map(|(k, _)| k)
            .collect()
    }

    /// Contiguous row ranges, one per unit.
    pub fn unit_ranges(&self) -> Vec<Range<usize>> {
        unit_ranges(&self.unit_index)
    }
}

pub(crate) fn unit_ranges(unit_index: &[usize]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=unit_index.len() {
        if k == unit_index.len() || unit_index[k] != unit_index[start] {
            out.push(start..k);
            start = k;
        }
    }
    out
}

fn parse_dummy(label: &str, max: usize) -> Option<usize> {
    let n: usize = label.trim().strip_prefix(['D', 'd'])?.trim().parse().ok()?;
    (1..=max).contains(&n).then_some(n)
}

/// Expands labels like `"D5"` and `"D26-D30"` into D-indices.
fn parse_exclusions(labels: &[String], max: usize) -> Result<Vec<usize>, DesignError> {
    let bad = |label: &str| DesignError::UnknownUnitInExclusionList { label: label.to_string(), max };
    let mut out = Vec::new();
    for label in labels {
        match label.split_once(['-', '–']) {
            Some((a, b)) => {
                let (a, b) =
                    (parse_dummy(a, max).ok_or_else(|| bad(label))?, parse_dummy(b, max).ok_or_else(|| bad(label))?);
                if a > b {
                    return Err(bad(label));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_dummy(label, max).ok_or_else(|| bad(label))?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn assemble_design(features: &FeatureSet, spec: &ModelSpec) -> Result<DesignMatrix, DesignError> {
    if features.rows.is_empty() {
        return Err(DesignError::Empty);
    }
    let (nr, nj) = (features.regions.len(), features.industries.len());
    let n_units = nr * nj;
    let excluded = parse_exclusions(&spec.dummy_exclusions, n_units)?;
    let with_dummies = spec.dummies == DummyMode::All;
    if spec.intercept && with_dummies && excluded.is_empty() {
        return Err(DesignError::RankDeficientByConstruction);
    }
    let extra_pos = spec
        .extra_regressors
        .iter()
        .map(|name| {
            features
                .extra_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| DesignError::UnknownExtraRegressor(name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns = Vec::new();
    if spec.intercept {
        columns.push(Column { symbol: "const".into(), kind: ColumnKind::Constant });
    }
    for r in &spec.regressors {
        columns.push(Column { symbol: r.symbol().into(), kind: ColumnKind::Regressor });
    }
    for name in &spec.extra_regressors {
        columns.push(Column { symbol: name.clone(), kind: ColumnKind::Extra });
    }
    let n_fixed = columns.len();
    // D-index → column position, for retained dummies
    let mut dummy_col = vec![None; n_units + 1];
    if with_dummies {
        for (d, slot) in dummy_col.iter_mut().enumerate().skip(1) {
            if excluded.binary_search(&d).is_err() {
                let (industry, region) = ((d - 1) / nr, (d - 1) % nr);
                *slot = Some(columns.len());
                columns.push(Column { symbol: format!("D{d}"), kind: ColumnKind::Dummy { region, industry } });
            }
        }
    }

    let region_pos = |id| features.regions.iter().position(|r| r == id).expect("row region is in the feature set");
    let industry_pos =
        |id| features.industries.iter().position(|j| j == id).expect("row industry is in the feature set");

    let n = features.rows.len();
    let mut x = DMatrix::<f64>::zeros(n, columns.len());
    let mut y = DVector::<f64>::zeros(n);
    let mut unit_index = Vec::with_capacity(n);
    for (k, row) in features.rows.iter().enumerate() {
        let (i, j) = (region_pos(&row.region), industry_pos(&row.industry));
        y[k] = row.dep;
        let mut c = 0;
        if spec.intercept {
            x[(k, 0)] = 1.0;
            c = 1;
        }
        let regs = row.regressors();
        for r in &spec.regressors {
            x[(k, c)] = regs[r.index()];
            c += 1;
        }
        for &e in &extra_pos {
            x[(k, c)] = row.extras[e];
            c += 1;
        }
        debug_assert_eq!(c, n_fixed);
        if let Some(col) = dummy_col[j * nr + i + 1] {
            x[(k, col)] = 1.0;
        }
        unit_index.push(i * nj + j);
    }

    let mut warnings = Vec::new();
    if features.options.flow_mode == FlowMode::Static && with_dummies {
        if let Some(c) = columns.iter().position(|c| c.symbol == Regressor::X2.symbol()) {
            let constant = unit_ranges(&unit_index).into_iter().all(|range| {
                let first = x[(range.start, c)];
                range.clone().all(|k| (x[(k, c)] - first).abs() <= 1e-12 * first.abs().max(1.0))
            });
            if constant {
                let msg =
                    "x2 is constant within every unit under static flows and is collinear with the unit dummies; \
                           rank detection will drop it"
                        .to_string();
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }

    Ok(DesignMatrix {
        rows: features.rows.clone(),
        y,
        x,
        columns,
        unit_index,
        n_regions: nr,
        n_industries: nj,
        warnings,
    })
}
