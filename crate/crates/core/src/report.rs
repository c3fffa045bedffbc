//! Table rendering of estimation results in text, CSV and JSON.
//!
//! The text layout has one column per estimator and one row per coefficient
//! `φ0..φ5`; each cell is the estimate to three decimals, a significance
//! marker, and the t-statistic in parentheses, e.g. `0.119* (2.086)`. Unit
//! dummies follow in a grid (industries down, regions across), then adjusted
//! R², Durbin–Watson and the Hausman statistic.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::diagnostics::HausmanResult;
use crate::estimators::{Coefficient, EstimationResult, Method};

pub const LEGEND: &str =
    "* coefficient statistically significant at the 5% level, ** coefficient statistically significant at 10%";
pub const FOOTER: &str =
    "Significance uses normal critical values: 1.960 (5%) and 1.645 (10%), two-sided. t-statistics in parentheses.";

const Z05: f64 = 1.96;
const Z10: f64 = 1.645;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected text, csv or json)")),
        }
    }
}

/// Row and column labels for the dummy block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DummyGrid {
    pub regions: Vec<String>,
    pub industries: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub results: Vec<EstimationResult>,
    pub hausman: Option<HausmanResult>,
    pub dummy_grid: Option<DummyGrid>,
}

/// `*` for |t| ≥ 1.96, `**` for 1.645 ≤ |t| < 1.96, nothing otherwise.
pub fn stars(t: f64) -> &'static str {
    let a = t.abs();
    if a >= Z05 {
        "*"
    } else if a >= Z10 {
        "**"
    } else {
        ""
    }
}

/// Fixed three-decimal formatting without a negative zero.
pub fn fmt3(v: f64) -> String {
    if !v.is_finite() {
        return "n/a".into();
    }
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

pub fn format_cell(estimate: f64, t_stat: f64) -> String {
    if t_stat.is_finite() {
        format!("{}{} ({})", fmt3(estimate), stars(t_stat), fmt3(t_stat))
    } else {
        fmt3(estimate)
    }
}

fn coefficient_cell(c: &Coefficient) -> String {
    format_cell(c.estimate, c.t_stat)
}

/// Star for a chi-square statistic from its p-value.
fn chi_stars(h: &HausmanResult) -> &'static str {
    if h.p_value < 0.05 {
        "*"
    } else if h.p_value < 0.10 {
        "**"
    } else {
        ""
    }
}

fn row_label(symbol: &str) -> String {
    match symbol {
        "const" => "phi0 (constant)".into(),
        s if s.len() == 2 && s.starts_with('x') => format!("phi{} ({s})", &s[1..]),
        s => s.to_string(),
    }
}

fn structural_symbols(results: &[EstimationResult]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |s: &str| {
        if !out.iter().any(|o| o == s) {
            out.push(s.to_string());
        }
    };
    // constant first, then x1..x5, then anything else in first-seen order
    for r in results {
        if r.coefficient("const").is_some() {
            push("const");
        }
    }
    for x in ["x1", "x2", "x3", "x4", "x5"] {
        if results.iter().any(|r| r.coefficient(x).is_some() || r.dropped.iter().any(|d| d == x)) {
            push(x);
        }
    }
    for r in results {
        for c in r.structural() {
            push(&c.symbol);
        }
    }
    out
}

pub fn render_text(report: &Report) -> String {
    const LABEL: usize = 22;
    const CELL: usize = 20;
    let mut out = String::new();
    let _ = writeln!(out, "{}", report.title);
    let mut header = format!("{:<LABEL$}", "");
    for r in &report.results {
        let _ = write!(header, "{:>CELL$}", r.method.label());
    }
    let _ = writeln!(out, "{}", header.trim_end());
    let width = LABEL + CELL * report.results.len();
    let _ = writeln!(out, "{}", "-".repeat(width));

    for symbol in structural_symbols(&report.results) {
        let mut line = format!("{:<LABEL$}", row_label(&symbol));
        for r in &report.results {
            let cell = match r.coefficient(&symbol) {
                Some(c) => coefficient_cell(c),
                None if r.dropped.contains(&symbol) => "dropped".into(),
                None => String::new(),
            };
            let _ = write!(line, "{cell:>CELL$}");
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }

    if let Some(grid) = &report.dummy_grid {
        for r in report.results.iter().filter(|r| r.dummies().next().is_some()) {
            let _ = writeln!(out);
            let _ = writeln!(out, "Unit dummies ({}): rows are industries, columns are regions", r.method.label());
            let mut head = format!("{:<LABEL$}", "");
            for region in &grid.regions {
                let _ = write!(head, "{region:>CELL$}");
            }
            let _ = writeln!(out, "{}", head.trim_end());
            let nr = grid.regions.len();
            for (j, industry) in grid.industries.iter().enumerate() {
                let mut line = format!("{:<LABEL$}", industry);
                for i in 0..nr {
                    let d = format!("D{}", j * nr + i + 1);
                    let cell = match r.coefficient(&d) {
                        Some(c) => coefficient_cell(c),
                        None if r.dropped.contains(&d) => format!("{d} dropped"),
                        None => format!("{d} excl."),
                    };
                    let _ = write!(line, "{cell:>CELL$}");
                }
                let _ = writeln!(out, "{}", line.trim_end());
            }
        }
    }

    let _ = writeln!(out, "{}", "-".repeat(width));
    let mut r2 = format!("{:<LABEL$}", "R2 adjusted");
    let mut dw = format!("{:<LABEL$}", "Durbin-Watson");
    let mut nobs = format!("{:<LABEL$}", "Observations");
    for r in &report.results {
        let _ = write!(r2, "{:>CELL$}", fmt3(r.r2_adjusted));
        let _ = write!(dw, "{:>CELL$}", fmt3(r.durbin_watson));
        let n = if r.n_obs > 0 { r.n_obs.to_string() } else { "n/a".into() };
        let _ = write!(nobs, "{n:>CELL$}");
    }
    for line in [r2, dw, nobs] {
        let _ = writeln!(out, "{}", line.trim_end());
    }
    if let Some(h) = &report.hausman {
        let cell = format!("{}{}", fmt3(h.statistic), chi_stars(h));
        let _ = writeln!(out, "{:<LABEL$}{:>CELL$}", format!("Hausman chi2({})", h.dof), cell);
        if h.psd_corrected {
            let _ = writeln!(out, "(covariance difference was not positive definite; eigenvalues clipped)");
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{LEGEND}");
    let _ = writeln!(out, "{FOOTER}");
    out
}

/// Long format `section,item,field,value` at full precision.
pub fn render_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut put = |section: &str, item: &str, field: &str, value: String| {
        w.write_record([section, item, field, value.as_str()]).expect("writing to memory");
    };
    put("section", "item", "field", "value".into());
    for r in &report.results {
        let m = r.method.label();
        for c in &r.coefficients {
            put(m, &c.symbol, "estimate", c.estimate.to_string());
            put(m, &c.symbol, "std_error", c.std_error.to_string());
            put(m, &c.symbol, "t_stat", c.t_stat.to_string());
        }
        for d in &r.dropped {
            put(m, d, "dropped", "true".into());
        }
        put(m, "fit", "r2_adjusted", r.r2_adjusted.to_string());
        put(m, "fit", "durbin_watson", r.durbin_watson.to_string());
        put(m, "fit", "n_obs", r.n_obs.to_string());
        put(m, "fit", "n_params", r.n_params.to_string());
        put(m, "fit", "sigma2", r.sigma2.to_string());
        if let Some(vc) = &r.variance_components {
            put(m, "variance_components", "sigma2_u", vc.sigma2_u.to_string());
            put(m, "variance_components", "sigma2_e", vc.sigma2_e.to_string());
            put(m, "variance_components", "theta", vc.theta.to_string());
            put(m, "variance_components", "truncated", vc.truncated.to_string());
        }
    }
    if let Some(h) = &report.hausman {
        put("hausman", "test", "statistic", h.statistic.to_string());
        put("hausman", "test", "dof", h.dof.to_string());
        put("hausman", "test", "p_value", h.p_value.to_string());
        put("hausman", "test", "psd_corrected", h.psd_corrected.to_string());
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

pub fn render_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialises")
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

fn published_result(method: Method, rows: &[(&str, f64, f64)], r2: f64, dw: f64) -> EstimationResult {
    EstimationResult {
        method,
        coefficients: rows
            .iter()
            .map(|&(s, b, t)| Coefficient { symbol: s.into(), estimate: b, std_error: b / t, t_stat: t })
            .collect(),
        r2_adjusted: r2,
        durbin_watson: dw,
        n_obs: 0,
        n_params: rows.len(),
        sigma2: f64::NAN,
        ssr: f64::NAN,
        variance_components: None,
        cov: Default::default(),
        dropped: Vec::new(),
        warnings: Vec::new(),
        metadata: Default::default(),
        residuals: Vec::new(),
        unit_index: Vec::new(),
    }
}

/// The published employment-equation table as a rendering fixture. Only
/// estimates, t-statistics, fit statistics and the Hausman value are
/// populated.
pub fn published_table() -> Report {
    let mut lsdv_rows = vec![
        ("x1", 0.119, 2.086),
        ("x2", 0.018, 1.879),
        ("x3", 1.301, 3.241),
        ("x4", 0.731, 1.989),
        ("x5", -0.759, -4.357),
    ];
    lsdv_rows.extend(PUBLISHED_DUMMIES);
    let mut lsdv = published_result(Method::Lsdv, &lsdv_rows, 0.987, 2.298);
    lsdv.metadata.insert("excluded_dummies".into(), "D5, D26-D30".into());
    let fd = published_result(
        Method::Fd,
        &[
            ("x1", 0.122, 2.212),
            ("x2", 0.012, 1.286),
            ("x3", 1.127, 2.918),
            ("x4", 0.661, 1.867),
            ("x5", -0.744, -4.525),
        ],
        0.217,
        2.086,
    );
    let re = published_result(
        Method::Re,
        &[
            ("const", -1.878, -4.424),
            ("x1", 0.112, 1.973),
            ("x2", 0.022, 2.179),
            ("x3", 0.979, 2.443),
            ("x4", 0.549, 1.492),
            ("x5", -0.581, -3.401),
        ],
        0.683,
        2.068,
    );
    let statistic = 7777.548;
    let p_value = ChiSquared::new(5.0).map_or(f64::NAN, |c| c.sf(statistic));
    Report {
        title: "Estimation of the equation for employment".into(),
        results: vec![lsdv, fd, re],
        hausman: Some(HausmanResult {
            statistic,
            dof: 5,
            p_value,
            comparison: ["x1", "x2", "x3", "x4", "x5"].map(String::from).to_vec(),
            psd_corrected: false,
        }),
        dummy_grid: Some(DummyGrid {
            regions: (1..=5).map(|i| format!("R{i}")).collect(),
            industries: (1..=9).map(|j| format!("I{j}")).collect(),
        }),
    }
}

/// Published unit-dummy estimates and t-statistics; D5 and D26–D30 were
/// left out of the regression.
const PUBLISHED_DUMMIES: [(&str, f64, f64); 39] = [
    ("D1", -0.970, -0.379),
    ("D2", -1.575, -0.616),
    ("D3", -1.470, -0.575),
    ("D4", 6.782, 2.579),
    ("D6", -0.620, -0.242),
    ("D7", -0.576, -0.225),
    ("D8", -1.910, -0.748),
    ("D9", -8.344, -3.229),
    ("D10", -4.204, -1.634),
    ("D11", 1.967, 0.768),
    ("D12", -3.757, -1.465),
    ("D13", -1.344, -0.526),
    ("D14", -0.100, -0.039),
    ("D15", -10.038, -2.553),
    ("D16", 0.658, 0.257),
    ("D17", 0.792, 0.310),
    ("D18", -3.394, -1.327),
    ("D19", -4.587, -1.763),
    ("D20", -2.234, -0.868),
    ("D21", 0.986, 0.385),
    ("D22", -0.780, -0.305),
    ("D23", -2.052, -0.803),
    ("D24", 0.149, 0.058),
    ("D25", -1.317, -0.512),
    ("D31", 0.223, 0.087),
    ("D32", -2.587, -1.009),
    ("D33", -3.329, -1.303),
    ("D34", -8.367, -3.240),
    ("D35", -13.384, -3.314),
    ("D36", -0.073, -0.029),
    ("D37", -0.685, -0.268),
    ("D38", -1.420, -0.556),
    ("D39", -5.311, -2.049),
    ("D40", -1.921, -0.747),
    ("D41", 0.881, 0.344),
    ("D42", -1.352, -0.529),
    ("D43", -3.327, -1.302),
    ("D44", -6.699, -2.591),
    ("D45", -7.784, -3.025),
];
