//! The three panel estimators: least-squares dummy variables (fixed
//! effects), first differences, and random-effects feasible GLS.
//!
//! All three return an [`EstimationResult`] with classical standard errors,
//! adjusted R² and the within-unit Durbin–Watson statistic.

pub(crate) mod result;

pub use result::{Coefficient, CovBlock, EstimationResult, Method, VarianceComponents};

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::diagnostics::{adjusted_r2, durbin_watson_panel, DiagnosticsError};
use crate::features::{unit_ranges, Column, ColumnKind, DesignMatrix, FeatureSet, ModelSpec};
use crate::solver::{solve_gls_transformed, solve_ols, GlsTransform, LsqSolution, SolverError, DEFAULT_RTOL};
use result::collect_coefficients;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("unit {unit} has {periods} consecutive period(s); first differences need at least 2")]
    InsufficientConsecutiveYears { unit: String, periods: usize },
    #[error("random effects need a design with a constant and no unit dummies")]
    RequiresPooledDesign,
    #[error("forced theta {0} is outside [0, 1]")]
    BadTheta(f64),
    #[error("extra regressor `{0}` was not built into the feature rows")]
    UnknownExtraRegressor(String),
}

/// Fit statistics shared by all estimators. A perfect fit leaves the
/// Durbin–Watson statistic undefined; it is reported as NaN with a warning.
fn fit_statistics(
    sol: &LsqSolution,
    y: &DVector<f64>,
    unit_index: &[usize],
    warnings: &mut Vec<String>,
) -> Result<(f64, f64), EstimateError> {
    let r2 = adjusted_r2(sol.residuals.as_slice(), y.as_slice(), sol.p)?;
    let dw = match durbin_watson_panel(sol.residuals.as_slice(), unit_index) {
        Ok(dw) => dw,
        Err(DiagnosticsError::ZeroResiduals) => {
            warnings.push("residuals have no variation within units; Durbin-Watson is undefined".into());
            f64::NAN
        }
        Err(e) => return Err(e.into()),
    };
    Ok((r2, dw))
}

fn dropped_warnings(dropped: &[String], warnings: &mut Vec<String>) {
    if !dropped.is_empty() {
        let msg = format!("dropped for rank deficiency: {}", dropped.join(", "));
        log::warn!("{msg}");
        warnings.push(msg);
    }
}

fn build_result(
    method: Method,
    columns: &[Column],
    sol: &LsqSolution,
    y: &DVector<f64>,
    unit_index: &[usize],
    mut warnings: Vec<String>,
    metadata: BTreeMap<String, String>,
) -> Result<EstimationResult, EstimateError> {
    let (coefficients, cov, dropped) = collect_coefficients(columns, sol);
    dropped_warnings(&dropped, &mut warnings);
    let (r2_adjusted, durbin_watson) = fit_statistics(sol, y, unit_index, &mut warnings)?;
    Ok(EstimationResult {
        method,
        coefficients,
        r2_adjusted,
        durbin_watson,
        n_obs: sol.n,
        n_params: sol.p,
        sigma2: sol.sigma2,
        ssr: sol.ssr,
        variance_components: None,
        cov,
        dropped,
        warnings,
        metadata,
        residuals: sol.residuals.iter().copied().collect(),
        unit_index: unit_index.to_vec(),
    })
}

fn base_metadata() -> BTreeMap<String, String> {
    BTreeMap::from([("durbin_watson".to_string(), "unit-centred residuals, within-unit differences only".to_string())])
}

/// OLS on the full design, unit dummies included. Every retained column,
/// dummies too, counts as a parameter in the adjusted R².
pub fn estimate_lsdv(design: &DesignMatrix) -> Result<EstimationResult, EstimateError> {
    let sol = solve_ols(&design.x, &design.y, DEFAULT_RTOL)?;
    build_result(
        Method::Lsdv,
        &design.columns,
        &sol,
        &design.y,
        &design.unit_index,
        design.warnings.clone(),
        base_metadata(),
    )
}

/// First differences within each unit, regressing Δdep on Δx.
///
/// Whatever dependent variable the features hold (growth or level) is
/// differenced once more; this is recorded in the result metadata.
pub fn estimate_fd(features: &FeatureSet, spec: &ModelSpec) -> Result<EstimationResult, EstimateError> {
    let extra_pos = spec
        .extra_regressors
        .iter()
        .map(|name| {
            features
                .extra_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| EstimateError::UnknownExtraRegressor(name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns = Vec::new();
    if spec.fd_intercept {
        columns.push(Column { symbol: "const".into(), kind: ColumnKind::Constant });
    }
    columns.extend(spec.regressors.iter().map(|r| Column { symbol: r.symbol().into(), kind: ColumnKind::Regressor }));
    columns.extend(spec.extra_regressors.iter().map(|n| Column { symbol: n.clone(), kind: ColumnKind::Extra }));

    let row_values = |k: usize| -> Vec<f64> {
        let row = &features.rows[k];
        let regs = row.regressors();
        spec.regressors.iter().map(|r| regs[r.index()]).chain(extra_pos.iter().map(|&e| row.extras[e])).collect()
    };

    // units: consecutive rows sharing (region, industry)
    let labels: Vec<usize> = {
        let mut out = Vec::with_capacity(features.rows.len());
        let mut unit = 0;
        for (k, row) in features.rows.iter().enumerate() {
            if k > 0 {
                let prev = &features.rows[k - 1];
                if prev.region != row.region || prev.industry != row.industry {
                    unit += 1;
                }
            }
            out.push(unit);
        }
        out
    };

    let mut dy = Vec::new();
    let mut dx: Vec<Vec<f64>> = Vec::new();
    let mut unit_index = Vec::new();
    for range in unit_ranges(&labels) {
        let first = &features.rows[range.start];
        let label = format!("({}, {})", first.region, first.industry);
        let mut run = 1;
        for k in range.start + 1..range.end {
            if features.rows[k].year != features.rows[k - 1].year + 1 {
                return Err(EstimateError::InsufficientConsecutiveYears { unit: label, periods: run });
            }
            run += 1;
            let (now, before) = (row_values(k), row_values(k - 1));
            dy.push(features.rows[k].dep - features.rows[k - 1].dep);
            let mut r: Vec<f64> = if spec.fd_intercept { vec![1.0] } else { Vec::new() };
            r.extend(now.iter().zip(&before).map(|(a, b)| a - b));
            dx.push(r);
            unit_index.push(labels[range.start]);
        }
        if run < 2 {
            return Err(EstimateError::InsufficientConsecutiveYears { unit: label, periods: run });
        }
    }

    let n = dy.len();
    let x = DMatrix::from_fn(n, columns.len(), |r, c| dx[r][c]);
    let y = DVector::from_vec(dy);
    let sol = solve_ols(&x, &y, DEFAULT_RTOL)?;
    let mut metadata = base_metadata();
    metadata.insert(
        "dependent".into(),
        format!("first difference of the {} dependent variable", features.options.dep_mode.as_str()),
    );
    metadata.insert("intercept".into(), if spec.fd_intercept { "common trend" } else { "none" }.into());
    build_result(Method::Fd, &columns, &sol, &y, &unit_index, Vec::new(), metadata)
}

fn unit_means(x: &DMatrix<f64>, y: &DVector<f64>, ranges: &[std::ops::Range<usize>]) -> (DMatrix<f64>, DVector<f64>) {
    let xb = DMatrix::from_fn(ranges.len(), x.ncols(), |u, c| {
        let r = &ranges[u];
        x.view((r.start, c), (r.len(), 1)).sum() / r.len() as f64
    });
    let yb = DVector::from_fn(ranges.len(), |u, _| {
        let r = &ranges[u];
        y.rows(r.start, r.len()).sum() / r.len() as f64
    });
    (xb, yb)
}

/// Swamy–Arora variance components: σ²_e from the within regression,
/// σ²_u from the between regression net of σ²_e / T̄ (harmonic mean of unit
/// lengths), truncated at zero.
fn swamy_arora(design: &DesignMatrix, ranges: &[std::ops::Range<usize>]) -> Result<(f64, f64, bool), EstimateError> {
    let n = design.n_obs();
    let n_units = ranges.len();
    let slopes = design.slope_columns();

    let x_slopes = design.x.select_columns(&slopes);
    let within = GlsTransform::common(design.unit_index.clone(), 1.0);
    let w = solve_gls_transformed(&x_slopes, &design.y, &within, DEFAULT_RTOL);
    let sigma2_e = match w {
        Ok(sol) => {
            let df = n as f64 - n_units as f64 - sol.p as f64;
            if df <= 0.0 {
                return Err(SolverError::DegreesOfFreedomExhausted { n, p: n_units + sol.p }.into());
            }
            sol.ssr / df
        }
        // every slope is constant within units: the within SSR is the total within variation
        Err(SolverError::AllColumnsDropped | SolverError::Empty) => {
            let (_, yt) = within.apply(&x_slopes, &design.y)?;
            yt.norm_squared() / (n - n_units).max(1) as f64
        }
        Err(e) => return Err(e.into()),
    };

    let (xb, yb) = unit_means(&design.x, &design.y, ranges);
    let b = solve_ols(&xb, &yb, DEFAULT_RTOL)?;
    if b.n <= b.p {
        return Err(SolverError::DegreesOfFreedomExhausted { n: b.n, p: b.p }.into());
    }
    let sigma2_b = b.ssr / (b.n - b.p) as f64;
    let t_harmonic = n_units as f64 / ranges.iter().map(|r| 1.0 / r.len() as f64).sum::<f64>();
    let raw = sigma2_b - sigma2_e / t_harmonic;
    Ok((sigma2_e, raw.max(0.0), raw < 0.0))
}

/// Random-effects feasible GLS on a pooled design (constant, no dummies).
///
/// θ_i = 1 − √(σ²_e / (T_i σ²_u + σ²_e)); each unit's rows are quasi-demeaned
/// by θ_i and OLS is run on the result. Standard errors use σ²_e, the
/// variance the transformed errors have under the model. When
/// `spec.re_theta` fixes θ, standard errors use the transformed residual
/// variance instead. Adjusted R² and Durbin–Watson refer to the transformed
/// system.
pub fn estimate_re(design: &DesignMatrix, spec: &ModelSpec) -> Result<EstimationResult, EstimateError> {
    if !design.has_constant() || design.has_dummies() {
        return Err(EstimateError::RequiresPooledDesign);
    }
    let ranges = design.unit_ranges();
    let mut warnings = design.warnings.clone();
    let (sigma2_e, sigma2_u, truncated) = swamy_arora(design, &ranges)?;
    if truncated {
        let msg = "between-regression estimate of the unit-effect variance was negative and was set to 0".to_string();
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let (unit_theta, forced) = match spec.re_theta {
        Some(theta) if (0.0..=1.0).contains(&theta) => (vec![theta; ranges.len()], true),
        Some(theta) => return Err(EstimateError::BadTheta(theta)),
        None => (
            ranges
                .iter()
                .map(|r| {
                    let denom = r.len() as f64 * sigma2_u + sigma2_e;
                    if denom > 0.0 {
                        1.0 - (sigma2_e / denom).sqrt()
                    } else {
                        0.0
                    }
                })
                .collect(),
            false,
        ),
    };
    let labels: Vec<usize> = ranges.iter().enumerate().flat_map(|(u, r)| std::iter::repeat_n(u, r.len())).collect();
    let transform = GlsTransform::QuasiDemean { unit_index: labels, theta: unit_theta.clone() };
    let (xt, yt) = transform.apply(&design.x, &design.y)?;
    let mut sol = solve_ols(&xt, &yt, DEFAULT_RTOL)?;
    if !forced {
        sol.cov = &sol.xtx_inv * sigma2_e;
    }

    let mut metadata = base_metadata();
    metadata.insert("variance_components".into(), "Swamy-Arora".into());
    metadata.insert("fit_statistics".into(), "quasi-demeaned system".into());
    let mut result = build_result(Method::Re, &design.columns, &sol, &yt, &design.unit_index, warnings, metadata)?;
    let theta = modal(&ranges, &unit_theta);
    result.variance_components = Some(VarianceComponents { sigma2_u, sigma2_e, theta, unit_theta, truncated, forced });
    Ok(result)
}

/// θ of the most common unit length.
fn modal(ranges: &[std::ops::Range<usize>], theta: &[f64]) -> f64 {
    let mut counts: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for (r, &t) in ranges.iter().zip(theta) {
        counts.entry(r.len()).or_insert((0, t)).0 += 1;
    }
    counts.values().max_by_key(|(c, _)| *c).map_or(f64::NAN, |(_, t)| *t)
}
