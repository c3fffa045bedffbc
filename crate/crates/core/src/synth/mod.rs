//! Synthetic panels with a known employment equation.
//!
//! Generation runs forward in feature space. At each year the regressors of
//! the previous year are computed from the simulated levels, the growth of
//! every cell's share of national industry employment is set to
//!
//! ```text
//! Δln(L_ijt / L_jt) = φ0·[intercept] + Σ φk·xk,ij,t−1 + u_ij + e_ijt
//! ```
//!
//! and employment levels are rolled forward so that the realised panel
//! satisfies the relation exactly. Wages per worker, goods flows to the core
//! region and non-manufacturing employment follow exogenous AR(1) paths in
//! logs. The panel's regions cover only part of each national industry
//! (`coverage`); the rest of the nation absorbs the difference, so national
//! industry employment can follow its own growth path.
//!
//! The generator is ChaCha8 seeded from a `u64`, so a given configuration
//! yields the same panel on every platform.

mod montecarlo;

pub use montecarlo::{monte_carlo, CoefficientSummary, EstimatorSummary, HausmanSummary, MonteCarloSummary};

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{cell_regressors, OmegaMode};
use crate::panel::{IndustryId, PanelCube, PanelDataset, PanelError, PanelObservation, PanelParts, RegionId};

/// Coefficients of the published fixed-effects column (φ0 is not reported).
pub const PUBLISHED_LSDV_PHI: [f64; 6] = [0.0, 0.119, 0.018, 1.301, 0.731, -0.759];
/// Coefficients of the published first-difference column.
pub const PUBLISHED_FD_PHI: [f64; 6] = [0.0, 0.122, 0.012, 1.127, 0.661, -0.744];
/// Coefficients of the published random-effects column, intercept included.
pub const PUBLISHED_RE_PHI: [f64; 6] = [-1.878, 0.112, 0.022, 0.979, 0.549, -0.581];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Baseline {
    /// Mean initial employment of a cell.
    pub employment: f64,
    /// Mean wage per worker.
    pub wage: f64,
    /// Mean goods flow of a cell to the core region.
    pub flow: f64,
}

impl Default for Baseline {
    fn default() -> Self {
        Self { employment: 1000.0, wage: 20.0, flow: 100.0 }
    }
}

/// Standard deviations (log scale) and persistence of the exogenous paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Dispersion {
    pub region_size: f64,
    pub industry_size: f64,
    /// Cell-level deviation of initial employment; unit effects correlate with it.
    pub unit: f64,
    pub wage_persistent: f64,
    pub wage_innovation: f64,
    pub flow_persistent: f64,
    pub flow_innovation: f64,
    /// Extra log flow of the core region's internal shipments.
    pub core_flow_premium: f64,
    pub remainder_innovation: f64,
    /// AR(1) coefficient shared by wages, flows and the remainder.
    pub persistence: f64,
    pub national_growth_mean: f64,
    pub national_growth_sd: f64,
}

impl Default for Dispersion {
    fn default() -> Self {
        Self {
            region_size: 0.5,
            industry_size: 0.2,
            unit: 0.1,
            wage_persistent: 0.2,
            wage_innovation: 0.6,
            flow_persistent: 0.5,
            flow_innovation: 0.3,
            core_flow_premium: 1.0,
            remainder_innovation: 0.1,
            persistence: 0.5,
            national_growth_mean: 0.01,
            national_growth_sd: 0.02,
        }
    }
}

/// Everything the generator needs; serialisable as JSON with every field
/// optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub n_regions: usize,
    pub n_industries: usize,
    pub n_years: usize,
    pub first_year: i32,
    /// φ0..φ5; φ0 is used only when `intercept` is set.
    pub true_phi: Vec<f64>,
    pub intercept: bool,
    pub sigma_e: f64,
    pub sigma_u: f64,
    /// Correlation of the unit effect with the cell's initial log-employment
    /// deviation, which drives `x3` and `x4`.
    pub effect_correlation: f64,
    pub seed: u64,
    pub baseline: Baseline,
    /// Share of each national industry located in the panel's regions.
    pub coverage: f64,
    /// Non-manufacturing employment as a multiple of manufacturing.
    pub remainder_multiple: f64,
    pub dispersion: Dispersion,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_regions: 5,
            n_industries: 9,
            n_years: 9,
            first_year: 1986,
            true_phi: PUBLISHED_LSDV_PHI.to_vec(),
            intercept: false,
            sigma_e: 0.005,
            sigma_u: 0.0,
            effect_correlation: 0.0,
            seed: 1,
            baseline: Baseline::default(),
            coverage: 0.7,
            remainder_multiple: 3.0,
            dispersion: Dispersion::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate state in year {year} at region {region}, industry {industry}: {reason}")]
    DegenerateState { year: i32, region: usize, industry: usize, reason: String },
    #[error("cannot read {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Panel(#[from] PanelError),
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl SyntheticConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, SynthError> {
        let path = path.as_ref();
        let err = |message: String| SynthError::Config { path: path.display().to_string(), message };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let config: Self = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    /// φ1..φ5.
    pub fn slopes(&self) -> &[f64] {
        &self.true_phi[1..]
    }

    /// The intercept the data actually contain (0 without intercept mode).
    pub fn effective_intercept(&self) -> f64 {
        if self.intercept {
            self.true_phi[0]
        } else {
            0.0
        }
    }

    pub fn check(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.to_string()));
        if self.n_regions < 2 || self.n_industries < 2 {
            return bad("need at least 2 regions and 2 industries");
        }
        if self.n_years < 3 {
            return bad("need at least 3 years");
        }
        if self.true_phi.len() != 6 || self.true_phi.iter().any(|v| !v.is_finite()) {
            return bad("true_phi must hold 6 finite values (phi0..phi5)");
        }
        if !positive(self.sigma_e) {
            return bad("sigma_e must be positive");
        }
        if !(positive(self.sigma_u) || self.sigma_u == 0.0) {
            return bad("sigma_u must be non-negative");
        }
        if !(-1.0..=1.0).contains(&self.effect_correlation) {
            return bad("effect_correlation must lie in [-1, 1]");
        }
        if !positive(self.coverage) || self.coverage >= 1.0 {
            return bad("coverage must lie strictly between 0 and 1");
        }
        if !positive(self.remainder_multiple) {
            return bad("remainder_multiple must be positive");
        }
        let b = &self.baseline;
        if !(b.employment > 0.0 && b.wage > 0.0 && b.flow > 0.0) {
            return bad("baseline levels must be positive");
        }
        Ok(())
    }
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Generates a validated panel from `config`.
pub fn generate(config: &SyntheticConfig) -> Result<PanelDataset, SynthError> {
    config.check()?;
    let (nr, nj, nt) = (config.n_regions, config.n_industries, config.n_years);
    let d = &config.dispersion;
    let b = &config.baseline;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cells = nr * nj;
    let at = |i: usize, j: usize| i * nj + j;

    // time-invariant draws
    let a = normals(&mut rng, cells);
    let xi = normals(&mut rng, cells);
    let rho = config.effect_correlation;
    let u: Vec<f64> = (0..cells).map(|c| config.sigma_u * (rho * a[c] + (1.0 - rho * rho).sqrt() * xi[c])).collect();
    let region_size: Vec<f64> = normals(&mut rng, nr).iter().map(|z| (d.region_size * z).exp()).collect();
    let industry_size: Vec<f64> = normals(&mut rng, nj).iter().map(|z| (d.industry_size * z).exp()).collect();
    let wage_level: Vec<f64> = normals(&mut rng, cells).iter().map(|z| d.wage_persistent * z).collect();
    let mut flow_level: Vec<f64> = normals(&mut rng, cells).iter().map(|z| d.flow_persistent * z).collect();
    for j in 0..nj {
        flow_level[at(0, j)] += d.core_flow_premium;
    }

    // exogenous log paths
    let mut log_rem = vec![0.0; nr * nt];
    let mut log_wage = vec![0.0; cells * nt];
    let mut log_flow = vec![0.0; cells * nt];
    for c in 0..cells {
        log_wage[c * nt] = wage_level[c];
        log_flow[c * nt] = flow_level[c];
    }
    for t in 1..nt {
        let e_rem = normals(&mut rng, nr);
        let e_wage = normals(&mut rng, cells);
        let e_flow = normals(&mut rng, cells);
        for i in 0..nr {
            log_rem[i * nt + t] = d.persistence * log_rem[i * nt + t - 1] + d.remainder_innovation * e_rem[i];
        }
        for c in 0..cells {
            let (k, p) = (c * nt + t, c * nt + t - 1);
            log_wage[k] = wage_level[c] + d.persistence * (log_wage[p] - wage_level[c]) + d.wage_innovation * e_wage[c];
            log_flow[k] = flow_level[c] + d.persistence * (log_flow[p] - flow_level[c]) + d.flow_innovation * e_flow[c];
        }
    }

    let mut cube = PanelCube::zeros(nr, nj, nt, Vec::new());
    for i in 0..nr {
        for j in 0..nj {
            let idx = cube.cell(i, j, 0);
            cube.employment[idx] = b.employment * region_size[i] * industry_size[j] * (d.unit * a[at(i, j)]).exp();
        }
    }
    for j in 0..nj {
        let covered: f64 = (0..nr).map(|i| cube.employment(i, j, 0)).sum();
        cube.national_industry[j * nt] = covered / config.coverage;
    }
    let base_remainder: Vec<f64> =
        (0..nr).map(|i| config.remainder_multiple * cube.regional_manufacturing(i, 0)).collect();
    let rest_remainder: f64 = config.remainder_multiple
        * (0..nj)
            .map(|j| cube.national_industry(j, 0) - (0..nr).map(|i| cube.employment(i, j, 0)).sum::<f64>())
            .sum::<f64>();

    let fill = |cube: &mut PanelCube, t: usize| {
        for i in 0..nr {
            for j in 0..nj {
                let (idx, c) = (cube.cell(i, j, t), at(i, j) * nt + t);
                cube.wage_bill[idx] = b.wage * log_wage[c].exp() * cube.employment[idx];
                cube.goods_flow[idx] = b.flow * log_flow[c].exp();
            }
            cube.region_totals[i * nt + t] =
                cube.regional_manufacturing(i, t) + base_remainder[i] * log_rem[i * nt + t].exp();
        }
        let rest_manufacturing: f64 = (0..nj)
            .map(|j| cube.national_industry(j, t) - (0..nr).map(|i| cube.employment(i, j, t)).sum::<f64>())
            .sum();
        cube.national_totals[t] =
            (0..nr).map(|i| cube.region_total(i, t)).sum::<f64>() + rest_manufacturing + rest_remainder;
    };
    fill(&mut cube, 0);

    let phi = &config.true_phi;
    for t in 1..nt {
        let year = config.first_year + t as i32;
        let noise = normals(&mut rng, cells);
        let growth = normals(&mut rng, nj);
        let mut dep = vec![0.0; cells];
        for i in 0..nr {
            for j in 0..nj {
                let x = cell_regressors(&cube, i, j, t - 1, t - 1, OmegaMode::EmploymentShare).map_err(|e| {
                    SynthError::DegenerateState {
                        year,
                        region: i,
                        industry: j,
                        reason: format!("{} has log argument {}", e.term, e.value),
                    }
                })?;
                let c = at(i, j);
                dep[c] = config.effective_intercept()
                    + x.iter().zip(&phi[1..]).map(|(x, p)| x * p).sum::<f64>()
                    + u[c]
                    + config.sigma_e * noise[c];
            }
        }
        for j in 0..nj {
            let g = (d.national_growth_mean + d.national_growth_sd * growth[j]).exp();
            cube.national_industry[j * nt + t] = cube.national_industry(j, t - 1) * g;
            let mut covered = 0.0;
            for i in 0..nr {
                let (now, before) = (cube.cell(i, j, t), cube.cell(i, j, t - 1));
                let level = cube.employment[before] * g * dep[at(i, j)].exp();
                if !(level.is_finite() && level > 0.0) {
                    return Err(SynthError::DegenerateState {
                        year,
                        region: i,
                        industry: j,
                        reason: format!("employment became {level}"),
                    });
                }
                cube.employment[now] = level;
                covered += level;
            }
            if covered >= cube.national_industry(j, t) {
                return Err(SynthError::DegenerateState {
                    year,
                    region: 0,
                    industry: j,
                    reason: format!(
                        "panel regions hold {covered} of {} national employment in the industry",
                        cube.national_industry(j, t)
                    ),
                });
            }
        }
        fill(&mut cube, t);
    }

    Ok(cube_to_dataset(&cube, config.first_year)?)
}

fn cube_to_dataset(cube: &PanelCube, first_year: i32) -> Result<PanelDataset, PanelError> {
    let (nr, nj, nt) = (cube.n_regions, cube.n_industries, cube.n_years);
    let region = |i: usize| RegionId::new((i + 1).to_string());
    let industry = |j: usize| IndustryId::new((j + 1).to_string());
    let year = |t: usize| first_year + t as i32;
    let mut parts = PanelParts { core_region: Some(region(0)), ..PanelParts::default() };
    for i in 0..nr {
        for j in 0..nj {
            for t in 0..nt {
                let idx = cube.cell(i, j, t);
                parts.observations.push(PanelObservation {
                    region: region(i),
                    industry: industry(j),
                    year: year(t),
                    employment: cube.employment[idx],
                    wage_bill: cube.wage_bill[idx],
                    goods_flow: cube.goods_flow[idx],
                    extras: Default::default(),
                });
            }
        }
        for t in 0..nt {
            parts.region_totals.push((region(i), year(t), cube.region_total(i, t)));
        }
    }
    parts.national_totals = (0..nt).map(|t| (year(t), cube.national_totals[t])).collect();
    parts.national_industry_totals = Some(
        (0..nj)
            .flat_map(|j| (0..nt).map(move |t| (j, t)))
            .map(|(j, t)| (industry(j), year(t), cube.national_industry(j, t)))
            .collect(),
    );
    PanelDataset::new(parts)
}
