//! Fit and specification statistics: adjusted R², the within-unit panel
//! Durbin–Watson statistic, and the Hausman fixed-versus-random-effects test.

use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::estimators::result::nan_as_null;
use crate::estimators::EstimationResult;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("{n} observations leave no degrees of freedom for {p} parameters")]
    DegreesOfFreedomExhausted { n: usize, p: usize },
    #[error("residual and label vectors have lengths {residuals} and {labels}")]
    LengthMismatch { residuals: usize, labels: usize },
    #[error("no residuals")]
    EmptyUnit,
    #[error("rows of unit {0} are not contiguous")]
    NonContiguousUnit(usize),
    #[error("residuals have no variation within units; the statistic is undefined")]
    ZeroResiduals,
    #[error("coefficient `{symbol}` is missing from the {method} result")]
    MissingSymbol { symbol: String, method: String },
    #[error("covariance difference has no positive eigenvalue")]
    SingularCovarianceDifference,
}

/// `1 − [SSR/(n−p)] / [SST/(n−1)]`, SST taken about the mean of `y`.
pub fn adjusted_r2(residuals: &[f64], y: &[f64], p: usize) -> Result<f64, DiagnosticsError> {
    let n = y.len();
    if residuals.len() != n {
        return Err(DiagnosticsError::LengthMismatch { residuals: residuals.len(), labels: n });
    }
    if n <= p || n < 2 {
        return Err(DiagnosticsError::DegreesOfFreedomExhausted { n, p });
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    if ssr == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - (ssr / (n - p) as f64) / (sst / (n - 1) as f64))
}

/// Panel Durbin–Watson statistic in the within-unit form of Bhargava,
/// Franzini and Narendranathan: residuals are centred on their unit means and
/// differences are taken only within units,
///
/// `d = Σ_i Σ_{t≥2} (ẽ_it − ẽ_i,t−1)² / Σ_i Σ_t ẽ_it²`,  `ẽ_it = e_it − ē_i`.
///
/// Centring leaves fixed-effects residuals unchanged (they already have zero
/// unit means) and puts the statistic near 2 for independent residuals.
/// `unit_index` labels each residual; a unit's rows must be contiguous and
/// ordered by year. The result lies in `[0, 4]`.
pub fn durbin_watson_panel(residuals: &[f64], unit_index: &[usize]) -> Result<f64, DiagnosticsError> {
    if residuals.len() != unit_index.len() {
        return Err(DiagnosticsError::LengthMismatch { residuals: residuals.len(), labels: unit_index.len() });
    }
    if residuals.is_empty() {
        return Err(DiagnosticsError::EmptyUnit);
    }
    let mut seen = std::collections::HashSet::new();
    let mut centred = Vec::with_capacity(residuals.len());
    let mut start = 0;
    for k in 1..=residuals.len() {
        if k < residuals.len() && unit_index[k] == unit_index[start] {
            continue;
        }
        if !seen.insert(unit_index[start]) {
            return Err(DiagnosticsError::NonContiguousUnit(unit_index[start]));
        }
        let block = &residuals[start..k];
        let mean = block.iter().sum::<f64>() / block.len() as f64;
        centred.extend(block.iter().map(|e| e - mean));
        start = k;
    }
    let mut num = 0.0;
    for k in 1..centred.len() {
        if unit_index[k] == unit_index[k - 1] {
            let d = centred[k] - centred[k - 1];
            num += d * d;
        }
    }
    let den: f64 = centred.iter().map(|e| e * e).sum();
    if den == 0.0 {
        return Err(DiagnosticsError::ZeroResiduals);
    }
    Ok((num / den).clamp(0.0, 4.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausmanResult {
    pub statistic: f64,
    pub dof: usize,
    #[serde(with = "nan_as_null")]
    pub p_value: f64,
    pub comparison: Vec<String>,
    /// Negative or tiny eigenvalues of `V_FE − V_RE` were raised to the floor.
    pub psd_corrected: bool,
}

impl HausmanResult {
    pub fn rejects_at(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// Relative eigenvalue floor for the covariance difference.
pub const HAUSMAN_EIGEN_FLOOR: f64 = 1e-12;

/// `(b_FE − b_RE)ᵀ [V_FE − V_RE]⁻¹ (b_FE − b_RE)` over `symbols`.
///
/// The inverse is taken through an eigendecomposition; eigenvalues below
/// `1e-12 · λ_max` are raised to that floor and `psd_corrected` is set. A
/// zero difference vector gives a statistic of exactly 0.
pub fn hausman_test(
    fe: &EstimationResult,
    re: &EstimationResult,
    symbols: &[String],
) -> Result<HausmanResult, DiagnosticsError> {
    let missing = |symbol: &str, r: &EstimationResult| DiagnosticsError::MissingSymbol {
        symbol: symbol.to_string(),
        method: r.method.to_string(),
    };
    let mut d = DVector::zeros(symbols.len());
    for (k, s) in symbols.iter().enumerate() {
        let b_fe = fe.estimate(s).ok_or_else(|| missing(s, fe))?;
        let b_re = re.estimate(s).ok_or_else(|| missing(s, re))?;
        d[k] = b_fe - b_re;
    }
    let v_fe = fe.cov.submatrix(symbols).ok_or_else(|| first_missing(fe, symbols))?;
    let v_re = re.cov.submatrix(symbols).ok_or_else(|| first_missing(re, symbols))?;
    let dof = symbols.len();
    let chi = ChiSquared::new(dof as f64).ok();
    let finish = |statistic: f64, psd_corrected: bool| HausmanResult {
        statistic,
        dof,
        p_value: chi.as_ref().map_or(f64::NAN, |c| c.sf(statistic)),
        comparison: symbols.to_vec(),
        psd_corrected,
    };
    if d.iter().all(|v| *v == 0.0) {
        return Ok(finish(0.0, false));
    }

    let diff = v_fe - v_re;
    let diff = (&diff + diff.transpose()) * 0.5;
    let eig = SymmetricEigen::new(diff);
    let lambda_max = eig.eigenvalues.max();
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(DiagnosticsError::SingularCovarianceDifference);
    }
    let floor = HAUSMAN_EIGEN_FLOOR * lambda_max;
    let mut corrected = false;
    let mut statistic = 0.0;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let lambda = if lambda < floor {
            corrected = true;
            floor
        } else {
            lambda
        };
        let proj = eig.eigenvectors.column(k).dot(&d);
        statistic += proj * proj / lambda;
    }
    Ok(finish(statistic, corrected))
}

fn first_missing(r: &EstimationResult, symbols: &[String]) -> DiagnosticsError {
    let symbol = symbols.iter().find(|s| !r.cov.symbols.contains(s)).cloned().unwrap_or_default();
    DiagnosticsError::MissingSymbol { symbol, method: r.method.to_string() }
}
