use serde::{Deserialize, Serialize};

use super::{DepMode, FeatureOptions, FlowMode, OmegaMode};

/// One of the five structural regressors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regressor {
    X1,
    X2,
    X3,
    X4,
    X5,
}

impl Regressor {
    pub const ALL: [Regressor; 5] = [Self::X1, Self::X2, Self::X3, Self::X4, Self::X5];

    pub fn symbol(self) -> &'static str {
        match self {
            Self::X1 => "x1",
            Self::X2 => "x2",
            Self::X3 => "x3",
            Self::X4 => "x4",
            Self::X5 => "x5",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DummyMode {
    /// One indicator per (region, industry) unit, minus exclusions.
    #[default]
    All,
    None,
}

/// Declarative description of a model run, normally read from JSON:
///
/// ```json
/// {
///   "regressors": ["x1", "x2", "x3", "x4", "x5"],
///   "intercept": false,
///   "dummies": "all",
///   "dummy_exclusions": ["D5", "D26-D30"],
///   "flow_mode": "lagged",
///   "omega": "employment_share",
///   "extra_regressors": []
/// }
/// ```
///
/// Missing fields take the values of [`ModelSpec::default`]: all five
/// regressors, a full dummy set, no intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub regressors: Vec<Regressor>,
    pub intercept: bool,
    pub dummies: DummyMode,
    /// Dummy labels such as `"D5"` or ranges such as `"D26-D30"`.
    pub dummy_exclusions: Vec<String>,
    pub flow_mode: FlowMode,
    pub omega: OmegaMode,
    pub dep_mode: DepMode,
    pub extra_regressors: Vec<String>,
    /// Keep a constant in the first-difference regression (a common trend).
    pub fd_intercept: bool,
    /// Fix the random-effects quasi-demeaning fraction instead of estimating it.
    pub re_theta: Option<f64>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            regressors: Regressor::ALL.to_vec(),
            intercept: false,
            dummies: DummyMode::All,
            dummy_exclusions: Vec::new(),
            flow_mode: FlowMode::Lagged,
            omega: OmegaMode::EmploymentShare,
            dep_mode: DepMode::DeltaLn,
            extra_regressors: Vec::new(),
            fd_intercept: false,
            re_theta: None,
        }
    }
}

impl ModelSpec {
    pub fn from_json_str(json: &str) -> serde_json::Result<Self> {
        serde_json::from_str(json)
    }

    /// The published fixed-effects layout on the 5 × 9 grid: all unit dummies
    /// except D5 and the sixth industry's row D26–D30.
    pub fn published_lsdv() -> Self {
        Self { dummy_exclusions: vec!["D5".into(), "D26-D30".into()], ..Self::default() }
    }

    pub fn feature_options(&self) -> FeatureOptions {
        FeatureOptions {
            flow_mode: self.flow_mode,
            omega: self.omega,
            dep_mode: self.dep_mode,
            extra_regressors: self.extra_regressors.clone(),
        }
    }

    /// The same regressors with a constant and no dummies, as the
    /// random-effects estimator expects.
    pub fn pooled(&self) -> Self {
        Self { intercept: true, dummies: DummyMode::None, dummy_exclusions: Vec::new(), ..self.clone() }
    }

    /// The same regressors with a full dummy set and no constant.
    pub fn within(&self) -> Self {
        Self { intercept: false, dummies: DummyMode::All, dummy_exclusions: Vec::new(), ..self.clone() }
    }

    /// Symbols of the slope coefficients (regressors then extras).
    pub fn slope_symbols(&self) -> Vec<String> {
        self.regressors.iter().map(|r| r.symbol().to_string()).chain(self.extra_regressors.iter().cloned()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_and_names() {
        let spec = ModelSpec::from_json_str(
            r#"{"regressors":["x1","x4"],"intercept":true,"dummies":"none","omega":"uniform","flow_mode":"static"}"#,
        )
        .unwrap();
        assert_eq!(spec.regressors, vec![Regressor::X1, Regressor::X4]);
        assert!(spec.intercept);
        assert_eq!(spec.dummies, DummyMode::None);
        assert_eq!(spec.omega, OmegaMode::Uniform);
        assert_eq!(spec.flow_mode, FlowMode::Static);
        assert_eq!(spec.dep_mode, DepMode::DeltaLn);
        assert!(ModelSpec::from_json_str(r#"{"regressors":["x6"]}"#).is_err());
    }

    #[test]
    fn slope_symbols_include_extras() {
        let spec = ModelSpec { extra_regressors: vec!["productivity".into()], ..ModelSpec::default() };
        assert_eq!(spec.slope_symbols(), ["x1", "x2", "x3", "x4", "x5", "productivity"]);
    }
}
