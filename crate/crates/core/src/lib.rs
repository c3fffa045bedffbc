//! Estimation of a regional labour-demand equation on a region × industry ×
//! year panel.
//!
//! The pipeline is: load and validate a [`panel::PanelDataset`], build the
//! lagged regressors with [`features::build_features`], assemble a
//! [`features::DesignMatrix`], and estimate by fixed effects
//! ([`estimators::estimate_lsdv`]), first differences
//! ([`estimators::estimate_fd`]) or random effects
//! ([`estimators::estimate_re`]). [`diagnostics`] supplies adjusted R², the
//! panel Durbin–Watson statistic and the Hausman test, and [`report`] renders
//! the results as a table. [`synth`] generates panels with known coefficients.
//!
//! ```no_run
//! use labor_panel::prelude::*;
//!
//! let data = generate(&SyntheticConfig::default())?;
//! let spec = ModelSpec::default();
//! let features = build_features(&data, &spec.feature_options())?;
//! let fe = estimate_lsdv(&assemble_design(&features, &spec)?)?;
//! println!("x4 = {:.3}", fe.estimate("x4").unwrap());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cli;
pub mod diagnostics;
pub mod estimators;
pub mod features;
pub mod panel;
pub mod report;
pub mod solver;
pub mod synth;

pub mod prelude {
    pub use crate::diagnostics::{adjusted_r2, durbin_watson_panel, hausman_test, HausmanResult};
    pub use crate::estimators::{estimate_fd, estimate_lsdv, estimate_re, EstimationResult, Method};
    pub use crate::features::{assemble_design, build_features, DesignMatrix, FeatureOptions, FeatureSet, ModelSpec};
    pub use crate::panel::{load_panel, validate, write_panel, PanelDataset, PanelSchema};
    pub use crate::report::{render, Format, Report};
    pub use crate::synth::{generate, monte_carlo, SyntheticConfig};
}
