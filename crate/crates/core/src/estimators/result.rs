use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::features::{Column, ColumnKind};
use crate::solver::LsqSolution;

/// Serialises NaN as `null` and reads `null` back as NaN, so results with
/// undefined statistics survive a JSON round trip.
pub(crate) mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "LSDV")]
    Lsdv,
    #[serde(rename = "FD")]
    Fd,
    #[serde(rename = "RE")]
    Re,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Self::Lsdv => "LSDV",
            Self::Fd => "FD",
            Self::Re => "RE",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub symbol: String,
    pub estimate: f64,
    #[serde(with = "nan_as_null")]
    pub std_error: f64,
    /// `estimate / std_error`, NaN when the standard error is zero.
    #[serde(with = "nan_as_null")]
    pub t_stat: f64,
}

impl Coefficient {
    pub fn new(symbol: impl Into<String>, estimate: f64, std_error: f64) -> Self {
        let t_stat = if std_error > 0.0 { estimate / std_error } else { f64::NAN };
        Self { symbol: symbol.into(), estimate, std_error, t_stat }
    }

    pub fn is_dummy(&self) -> bool {
        is_dummy_symbol(&self.symbol)
    }
}

pub(crate) fn is_dummy_symbol(symbol: &str) -> bool {
    symbol.len() > 1 && symbol.starts_with('D') && symbol[1..].bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponents {
    pub sigma2_u: f64,
    pub sigma2_e: f64,
    /// θ of the modal unit length (all units share it in a balanced panel).
    pub theta: f64,
    pub unit_theta: Vec<f64>,
    /// The between-regression estimate of σ²_u was negative and set to 0.
    pub truncated: bool,
    /// θ was supplied rather than estimated.
    pub forced: bool,
}

/// Covariance of the non-dummy coefficients.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CovBlock {
    pub symbols: Vec<String>,
    /// Row-major, `symbols.len()²` entries.
    pub values: Vec<f64>,
}

impl CovBlock {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.symbols.iter().position(|s| s == a)?;
        let j = self.symbols.iter().position(|s| s == b)?;
        Some(self.values[i * self.symbols.len() + j])
    }

    pub fn submatrix(&self, symbols: &[String]) -> Option<DMatrix<f64>> {
        let idx = symbols.iter().map(|s| self.symbols.iter().position(|x| x == s)).collect::<Option<Vec<_>>>()?;
        let k = self.symbols.len();
        Some(DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.values[idx[r] * k + idx[c]]))
    }
}

/// Output of one estimator run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub method: Method,
    /// In design-column order; dropped columns are absent.
    pub coefficients: Vec<Coefficient>,
    #[serde(with = "nan_as_null")]
    pub r2_adjusted: f64,
    #[serde(with = "nan_as_null")]
    pub durbin_watson: f64,
    pub n_obs: usize,
    pub n_params: usize,
    #[serde(with = "nan_as_null")]
    pub sigma2: f64,
    #[serde(with = "nan_as_null")]
    pub ssr: f64,
    pub variance_components: Option<VarianceComponents>,
    pub cov: CovBlock,
    /// Symbols removed by rank detection.
    pub dropped: Vec<String>,
    pub warnings: Vec<String>,
    pub metadata: BTreeMap<String, String>,
    /// Residuals of the estimated system, in row order.
    pub residuals: Vec<f64>,
    /// Unit ordinal of each residual.
    pub unit_index: Vec<usize>,
}

impl EstimationResult {
    pub fn coefficient(&self, symbol: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.symbol == symbol)
    }

    pub fn estimate(&self, symbol: &str) -> Option<f64> {
        self.coefficient(symbol).map(|c| c.estimate)
    }

    /// Coefficients other than unit dummies.
    pub fn structural(&self) -> impl Iterator<Item = &Coefficient> {
        self.coefficients.iter().filter(|c| !c.is_dummy())
    }

    pub fn dummies(&self) -> impl Iterator<Item = &Coefficient> {
        self.coefficients.iter().filter(|c| c.is_dummy())
    }
}

/// Coefficients, covariance block and dropped symbols from a solve.
pub(crate) fn collect_coefficients(columns: &[Column], sol: &LsqSolution) -> (Vec<Coefficient>, CovBlock, Vec<String>) {
    let coefficients = sol
        .retained
        .iter()
        .enumerate()
        .map(|(k, &c)| Coefficient::new(columns[c].symbol.clone(), sol.beta[k], sol.cov[(k, k)].max(0.0).sqrt()))
        .collect();
    let keep: Vec<usize> = sol
        .retained
        .iter()
        .enumerate()
        .filter(|(_, &c)| !matches!(columns[c].kind, ColumnKind::Dummy { .. }))
        .map(|(k, _)| k)
        .collect();
    let cov = CovBlock {
        symbols: keep.iter().map(|&k| columns[sol.retained[k]].symbol.clone()).collect(),
        values: keep.iter().flat_map(|&a| keep.iter().map(move |&b| (a, b))).map(|(a, b)| sol.cov[(a, b)]).collect(),
    };
    let dropped = sol.dropped_columns.iter().map(|&c| columns[c].symbol.clone()).collect();
    (coefficients, cov, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_stat_and_dummy_detection() {
        let c = Coefficient::new("x1", 0.5, 0.25);
        assert_eq!(c.t_stat, 2.0);
        assert!(Coefficient::new("x1", 0.5, 0.0).t_stat.is_nan());
        assert!(is_dummy_symbol("D17"));
        assert!(!is_dummy_symbol("D"));
        assert!(!is_dummy_symbol("Dx"));
        assert!(!is_dummy_symbol("x1"));
    }

    #[test]
    fn nan_round_trips_through_json() {
        let c = Coefficient::new("x1", 1.0, 0.0);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("null"));
        let back: Coefficient = serde_json::from_str(&json).unwrap();
        assert!(back.t_stat.is_nan());
    }
}
