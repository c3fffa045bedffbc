//! Construction of the employment-growth regression variables.
//!
//! For region `i`, industry `j` and year `t` the dependent variable is the
//! growth of the region's share of national industry employment,
//!
//! ```text
//! dep = ln(L_ijt / L_jt) − ln(L_ij,t−1 / L_j,t−1)
//! ```
//!
//! and every regressor is measured one year earlier:
//!
//! | symbol | meaning                         | definition (all at t−1)                               |
//! |--------|---------------------------------|-------------------------------------------------------|
//! | `x1`   | relative wage per worker        | ln[(W_ij/L_ij) / (Σ_i W_ij / Σ_i L_ij)]               |
//! | `x2`   | relative goods flow to the core | ln[T_ij / Σ_i ω_ij T_ij]                              |
//! | `x3`   | input-output linkages           | ln[(L_ik/L_ij) / (L_k/L_j)], k = all manufacturing    |
//! | `x4`   | agglomeration (location quotient)| ln[(L_ij/L_i) / (L_j/L)]                             |
//! | `x5`   | concentration of other industries| ln[Σ_{h≠j}(L_ih/L_i)² / Σ_{h≠j}(L_h/L)²]             |
//!
//! `L_i` and `L` are whole-economy totals, `L_j` national industry employment.

mod design;
mod model;

pub(crate) use design::unit_ranges;
pub use design::{assemble_design, Column, ColumnKind, DesignError, DesignMatrix};
pub use model::{DummyMode, ModelSpec, Regressor};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::panel::{IndustryId, PanelCube, PanelDataset, PanelError, RegionId};

/// Which goods-flow value enters `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMode {
    /// Flow of year t−1, like every other regressor.
    #[default]
    Lagged,
    /// One flow per unit (the first year's value), constant over time.
    Static,
}

/// Weights of the national mean flow in the `x2` denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaMode {
    /// Region's share of the panel's employment in the industry at t−1.
    #[default]
    EmploymentShare,
    /// 1/R for every region.
    Uniform,
}

/// Dependent variable definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepMode {
    /// Growth of the relative employment share.
    #[default]
    DeltaLn,
    /// Level of the log relative employment share at t.
    LevelLn,
}

impl DepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DeltaLn => "delta_ln",
            Self::LevelLn => "level_ln",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureOptions {
    pub flow_mode: FlowMode,
    pub omega: OmegaMode,
    pub dep_mode: DepMode,
    /// Extra dataset columns entered as additional regressors (raw, at t−1).
    pub extra_regressors: Vec<String>,
}

impl FeatureOptions {
    /// Index of the first year (0-based) that yields a feature row.
    ///
    /// Lagged-flow mode starts one year later than static mode: a nine-year
    /// panel yields seven periods per unit with lagged flows and eight with
    /// static flows.
    pub fn first_row_year(&self) -> usize {
        match self.flow_mode {
            FlowMode::Lagged => 2,
            FlowMode::Static => 1,
        }
    }
}

/// One (region, industry, year) row of the regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub region: RegionId,
    pub industry: IndustryId,
    /// Year of the dependent variable.
    pub year: i32,
    pub dep: f64,
    pub x1_wage: f64,
    pub x2_transport: f64,
    pub x3_linkages: f64,
    pub x4_agglomeration: f64,
    pub x5_concentration: f64,
    /// Values of [`FeatureSet::extra_names`], in order.
    pub extras: Vec<f64>,
}

impl FeatureRow {
    pub fn regressors(&self) -> [f64; 5] {
        [self.x1_wage, self.x2_transport, self.x3_linkages, self.x4_agglomeration, self.x5_concentration]
    }
}

/// Feature rows plus the panel layout needed to number units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub regions: Vec<RegionId>,
    pub industries: Vec<IndustryId>,
    pub extra_names: Vec<String>,
    pub options: FeatureOptions,
    /// Sorted by (region, industry, year).
    pub rows: Vec<FeatureRow>,
}

impl FeatureSet {
    pub fn n_units(&self) -> usize {
        self.regions.len() * self.industries.len()
    }

    /// Rows per unit; every unit has the same count.
    pub fn periods(&self) -> usize {
        if self.n_units() == 0 {
            0
        } else {
            self.rows.len() / self.n_units()
        }
    }
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("log argument of {term} is {value} at region {region}, industry {industry}, year {year}")]
    NonPositiveLogArgument { term: &'static str, region: String, industry: String, year: i32, value: f64 },
    #[error("need at least {required} years, panel has {years}")]
    InsufficientYears { years: usize, required: usize },
    #[error("extra regressor `{0}` is not a column of the panel")]
    UnknownExtraColumn(String),
    #[error("extra regressor `{name}` is not finite at region {region}, industry {industry}, year {year}")]
    NonFiniteExtra { name: String, region: String, industry: String, year: i32 },
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// A logarithm whose argument was not strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BadLog {
    pub term: &'static str,
    pub value: f64,
}

fn checked_ln(term: &'static str, value: f64) -> Result<f64, BadLog> {
    if value > 0.0 && value.is_finite() {
        Ok(value.ln())
    } else {
        Err(BadLog { term, value })
    }
}

/// Regressors `x1..x5` of cell `(i, j)` measured at year index `lag_t`, with
/// goods flows read at year index `flow_t`.
pub fn cell_regressors(
    cube: &PanelCube,
    i: usize,
    j: usize,
    lag_t: usize,
    flow_t: usize,
    omega: OmegaMode,
) -> Result<[f64; 5], BadLog> {
    let (nr, nj) = (cube.n_regions, cube.n_industries);
    let l_ij = cube.employment(i, j, lag_t);

    let (wage_sum, emp_sum) = (0..nr).fold((0.0, 0.0), |(w, l), r| {
        let c = cube.cell(r, j, lag_t);
        (w + cube.wage_bill[c], l + cube.employment[c])
    });
    let x1 = checked_ln("x1", (cube.wage_bill[cube.cell(i, j, lag_t)] / l_ij) / (wage_sum / emp_sum))?;

    let flow = |r: usize| cube.goods_flow[cube.cell(r, j, flow_t)];
    let mean_flow: f64 = match omega {
        OmegaMode::EmploymentShare => (0..nr).map(|r| cube.employment(r, j, lag_t) / emp_sum * flow(r)).sum(),
        OmegaMode::Uniform => (0..nr).map(flow).sum::<f64>() / nr as f64,
    };
    let x2 = checked_ln("x2", flow(i) / mean_flow)?;

    let l_j = cube.national_industry(j, lag_t);
    let l_ik = cube.regional_manufacturing(i, lag_t);
    let l_k: f64 = (0..nj).map(|h| cube.national_industry(h, lag_t)).sum();
    let x3 = checked_ln("x3", (l_ik / l_ij) / (l_k / l_j))?;

    let l_i = cube.region_total(i, lag_t);
    let l = cube.national_totals[lag_t];
    let x4 = checked_ln("x4", (l_ij / l_i) / (l_j / l))?;

    let (mut num, mut den) = (0.0, 0.0);
    for h in (0..nj).filter(|&h| h != j) {
        num += (cube.employment(i, h, lag_t) / l_i).powi(2);
        den += (cube.national_industry(h, lag_t) / l).powi(2);
    }
    let x5 = checked_ln("x5", num / den)?;

    Ok([x1, x2, x3, x4, x5])
}

/// Dependent variable of cell `(i, j)` at year index `t ≥ 1`.
pub fn cell_dependent(cube: &PanelCube, i: usize, j: usize, t: usize, mode: DepMode) -> Result<f64, BadLog> {
    let now = checked_ln("dep", cube.employment(i, j, t) / cube.national_industry(j, t))?;
    match mode {
        DepMode::LevelLn => Ok(now),
        DepMode::DeltaLn => {
            Ok(now - checked_ln("dep", cube.employment(i, j, t - 1) / cube.national_industry(j, t - 1))?)
        }
    }
}

/// Builds one [`FeatureRow`] per (region, industry, year) from the first
/// usable year onward (see [`FeatureOptions::first_row_year`]).
pub fn build_features(dataset: &PanelDataset, options: &FeatureOptions) -> Result<FeatureSet, FeatureError> {
    let cube = dataset.cube()?;
    let years = dataset.years();
    if years.len() < 3 {
        return Err(FeatureError::InsufficientYears { years: years.len(), required: 3 });
    }
    let extra_idx = options
        .extra_regressors
        .iter()
        .map(|name| {
            cube.extra_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| FeatureError::UnknownExtraColumn(name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let (nr, nj, nt) = (cube.n_regions, cube.n_industries, cube.n_years);
    let first = options.first_row_year();
    let mut rows = Vec::with_capacity(nr * nj * (nt - first));
    for i in 0..nr {
        for j in 0..nj {
            for (t, &year) in years.iter().enumerate().take(nt).skip(first) {
                let region = &dataset.regions()[i];
                let industry = &dataset.industries()[j];
                let wrap = |e: BadLog| FeatureError::NonPositiveLogArgument {
                    term: e.term,
                    region: region.0.clone(),
                    industry: industry.0.clone(),
                    year,
                    value: e.value,
                };
                let flow_t = match options.flow_mode {
                    FlowMode::Lagged => t - 1,
                    FlowMode::Static => 0,
                };
                let x = cell_regressors(&cube, i, j, t - 1, flow_t, options.omega).map_err(wrap)?;
                let dep = cell_dependent(&cube, i, j, t, options.dep_mode).map_err(wrap)?;
                let extras = extra_idx
                    .iter()
                    .zip(&options.extra_regressors)
                    .map(|(&e, name)| {
                        let v = cube.extras[e][cube.cell(i, j, t - 1)];
                        if v.is_finite() {
                            Ok(v)
                        } else {
                            Err(FeatureError::NonFiniteExtra {
                                name: name.clone(),
                                region: region.0.clone(),
                                industry: industry.0.clone(),
                                year,
                            })
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(FeatureRow {
                    region: region.clone(),
                    industry: industry.clone(),
                    year,
                    dep,
                    x1_wage: x[0],
                    x2_transport: x[1],
                    x3_linkages: x[2],
                    x4_agglomeration: x[3],
                    x5_concentration: x[4],
                    extras,
                });
            }
        }
    }
    Ok(FeatureSet {
        regions: dataset.regions().to_vec(),
        industries: dataset.industries().to_vec(),
        extra_names: options.extra_regressors.clone(),
        options: options.clone(),
        rows,
    })
}
