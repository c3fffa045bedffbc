use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate, SynthError, SyntheticConfig};
use crate::diagnostics::{hausman_test, HausmanResult};
use crate::estimators::{estimate_fd, estimate_lsdv, estimate_re, EstimationResult, Method};
use crate::features::{assemble_design, build_features, ModelSpec};

/// Two-sided 95% normal critical value used for interval coverage.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSummary {
    pub symbol: String,
    pub truth: f64,
    pub mean: f64,
    /// Sample standard deviation across replications (0 for one replication).
    pub sd: f64,
    pub bias: f64,
    pub rmse: f64,
    /// Share of replications whose 95% interval covers the truth.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub method: Method,
    pub coefficients: Vec<CoefficientSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausmanSummary {
    pub mean_statistic: f64,
    pub rejection_rate_5: f64,
    pub rejection_rate_1: f64,
    /// Share of replications whose covariance difference needed clipping.
    pub psd_corrected_rate: f64,
    /// Replications where the statistic could not be computed.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub replications: usize,
    pub completed: usize,
    /// Replications whose generated panel degenerated (skipped).
    pub degenerate: usize,
    pub estimators: Vec<EstimatorSummary>,
    pub hausman: HausmanSummary,
}

impl MonteCarloSummary {
    pub fn estimator(&self, method: Method) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.method == method)
    }
}

struct Replication {
    results: [EstimationResult; 3],
    hausman: Option<HausmanResult>,
}

fn replicate(config: &SyntheticConfig, seed: u64) -> Result<Option<Replication>, SynthError> {
    let cfg = SyntheticConfig { seed, ..config.clone() };
    let data = match generate(&cfg) {
        Ok(d) => d,
        Err(SynthError::DegenerateState { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let spec = ModelSpec::default();
    let features =
        build_features(&data, &spec.feature_options()).map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    let run = || -> Result<Replication, String> {
        let within = assemble_design(&features, &spec.within()).map_err(|e| e.to_string())?;
        let pooled = assemble_design(&features, &spec.pooled()).map_err(|e| e.to_string())?;
        let lsdv = estimate_lsdv(&within).map_err(|e| e.to_string())?;
        let fd = estimate_fd(&features, &spec).map_err(|e| e.to_string())?;
        let re = estimate_re(&pooled, &spec).map_err(|e| e.to_string())?;
        let hausman = hausman_test(&lsdv, &re, &spec.slope_symbols()).ok();
        Ok(Replication { results: [lsdv, fd, re], hausman })
    };
    run().map(Some).map_err(|e| SynthError::InvalidConfig(format!("replication with seed {seed}: {e}")))
}

fn summarise(symbol: &str, truth: f64, draws: &[(f64, f64)]) -> CoefficientSummary {
    let n = draws.len() as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let sd = if draws.len() > 1 {
        (draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let rmse = (draws.iter().map(|d| (d.0 - truth).powi(2)).sum::<f64>() / n).sqrt();
    let coverage = draws.iter().filter(|(b, se)| (b - truth).abs() <= Z95 * se).count() as f64 / n;
    CoefficientSummary { symbol: symbol.to_string(), truth, mean, sd, bias: mean - truth, rmse, coverage }
}

/// Runs `replications` independent generate → features → LSDV/FD/RE →
/// Hausman cycles with seeds `config.seed + r`, in parallel.
///
/// LSDV uses the full dummy set; RE a constant and no dummies. Replications
/// whose panel degenerates are skipped and counted.
pub fn monte_carlo(config: &SyntheticConfig, replications: usize) -> Result<MonteCarloSummary, SynthError> {
    config.check()?;
    if replications == 0 {
        return Err(SynthError::InvalidConfig("replications must be at least 1".into()));
    }
    let outcomes: Vec<Option<Replication>> = (0..replications as u64)
        .into_par_iter()
        .map(|r| replicate(config, config.seed.wrapping_add(r)))
        .collect::<Result<_, _>>()?;
    let done: Vec<&Replication> = outcomes.iter().flatten().collect();
    if done.is_empty() {
        return Err(SynthError::InvalidConfig("every replication degenerated".into()));
    }

    let slopes = ModelSpec::default().slope_symbols();
    let mut estimators = Vec::new();
    for (k, method) in [Method::Lsdv, Method::Fd, Method::Re].into_iter().enumerate() {
        let mut symbols: Vec<(String, f64)> = Vec::new();
        if method == Method::Re {
            symbols.push(("const".into(), config.effective_intercept()));
        }
        symbols.extend(slopes.iter().cloned().zip(config.slopes().iter().copied()));
        let coefficients = symbols
            .iter()
            .map(|(s, truth)| {
                let draws: Vec<(f64, f64)> = done
                    .iter()
                    .filter_map(|rep| rep.results[k].coefficient(s).map(|c| (c.estimate, c.std_error)))
                    .collect();
                summarise(s, *truth, &draws)
            })
            .collect();
        estimators.push(EstimatorSummary { method, coefficients });
    }

    let stats: Vec<&HausmanResult> = done.iter().filter_map(|r| r.hausman.as_ref()).collect();
    let m = stats.len().max(1) as f64;
    let hausman = HausmanSummary {
        mean_statistic: stats.iter().map(|h| h.statistic).sum::<f64>() / m,
        rejection_rate_5: stats.iter().filter(|h| h.rejects_at(0.05)).count() as f64 / m,
        rejection_rate_1: stats.iter().filter(|h| h.rejects_at(0.01)).count() as f64 / m,
        psd_corrected_rate: stats.iter().filter(|h| h.psd_corrected).count() as f64 / m,
        failures: done.len() - stats.len(),
    };
    Ok(MonteCarloSummary {
        replications,
        completed: done.len(),
        degenerate: replications - done.len(),
        estimators,
        hausman,
    })
}
