//! Command-line front end.
//!
//! ```text
//! labor-panel estimate   --panel P --totals T [--schema S] [--spec M] [--estimators lsdv,fd,re] [--format text|csv|json] [--out F]
//! labor-panel simulate   [--config C] --panel P --totals T [--seed N]
//! labor-panel montecarlo [--config C] [--reps N] [--seed N] [--format text|json]
//! labor-panel validate   --panel P --totals T [--schema S]
//! ```
//!
//! Exit status: 0 on success, 1 for load, validation or configuration
//! failures, 2 when an estimator fails. Reports go to stdout (or `--out`),
//! diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::hausman_test;
use crate::estimators::{estimate_fd, estimate_lsdv, estimate_re, EstimationResult, Method};
use crate::features::{assemble_design, build_features, DesignError, ModelSpec};
use crate::panel::{load_panel, write_panel, PanelError, PanelSchema};
use crate::report::{fmt3, render, DummyGrid, Format, Report};
use crate::synth::{generate, monte_carlo, MonteCarloSummary, SyntheticConfig};

#[derive(Debug, Parser)]
#[command(name = "labor-panel", version, about = "Regional employment panel estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a panel, estimate the employment equation and print a report.
    Estimate(EstimateArgs),
    /// Write a synthetic panel with known coefficients.
    Simulate(SimulateArgs),
    /// Repeat simulate + estimate and summarise coefficient recovery.
    Montecarlo(MonteCarloArgs),
    /// Check a panel against every dataset invariant.
    Validate(InputArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    panel: PathBuf,
    #[arg(long)]
    totals: PathBuf,
    /// JSON column mapping.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    Lsdv,
    Fd,
    Re,
}

impl EstimatorArg {
    fn label(self) -> &'static str {
        match self {
            Self::Lsdv => "LSDV",
            Self::Fd => "FD",
            Self::Re => "RE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// JSON model specification.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [EstimatorArg::Lsdv, EstimatorArg::Fd, EstimatorArg::Re])]
    estimators: Vec<EstimatorArg>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON synthetic configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path of the observation CSV.
    #[arg(long)]
    panel: PathBuf,
    /// Output path of the totals CSV.
    #[arg(long)]
    totals: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct MonteCarloArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

/// A failure with its exit status.
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl std::fmt::Display) -> Failure {
    Failure { code, message: message.to_string() }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let text = e.render().to_string();
            if informational {
                let _ = write!(stdout, "{text}");
                return 0;
            }
            let _ = write!(stderr, "{text}");
            return 1;
        }
    };
    let outcome = match cli.command {
        Command::Estimate(a) => cmd_estimate(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Montecarlo(a) => cmd_montecarlo(a, stdout),
        Command::Validate(a) => cmd_validate(a, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn read_schema(path: &Option<PathBuf>) -> Result<PanelSchema, Failure> {
    match path {
        Some(p) => PanelSchema::from_json_file(p).map_err(|e| fail(1, e)),
        None => Ok(PanelSchema::default()),
    }
}

fn panel_failure(e: PanelError) -> Failure {
    match e {
        PanelError::Invalid { violations } => {
            fail(1, violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\nerror: "))
        }
        other => fail(1, other),
    }
}

/// Bad exclusion labels are configuration mistakes; a design that cannot be
/// estimated at all is an estimation failure.
fn design_failure(e: DesignError) -> Failure {
    match e {
        DesignError::UnknownUnitInExclusionList { .. } | DesignError::UnknownExtraRegressor(_) => fail(1, e),
        _ => fail(2, e),
    }
}

fn read_spec(path: &Option<PathBuf>) -> Result<ModelSpec, Failure> {
    let Some(p) = path else { return Ok(ModelSpec::default()) };
    let text = std::fs::read_to_string(p).map_err(|e| fail(1, format!("cannot read {}: {e}", p.display())))?;
    ModelSpec::from_json_str(&text).map_err(|e| fail(1, format!("invalid model spec {}: {e}", p.display())))
}

fn cmd_estimate(a: EstimateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let schema = read_schema(&a.input.schema)?;
    let data = load_panel(&a.input.panel, &a.input.totals, &schema).map_err(panel_failure)?;
    let spec = read_spec(&a.spec)?;
    let features = build_features(&data, &spec.feature_options()).map_err(|e| fail(1, e))?;

    let mut results: Vec<EstimationResult> = Vec::new();
    let mut selected = a.estimators.clone();
    selected.sort_by_key(|e| *e as u8);
    selected.dedup();
    for est in selected {
        let result = match est {
            EstimatorArg::Lsdv => {
                let design = assemble_design(&features, &spec).map_err(design_failure)?;
                estimate_lsdv(&design)
            }
            EstimatorArg::Fd => estimate_fd(&features, &spec),
            EstimatorArg::Re => {
                let design = assemble_design(&features, &spec.pooled()).map_err(design_failure)?;
                estimate_re(&design, &spec)
            }
        }
        .map_err(|e| fail(2, format!("{} estimation failed: {e}", est.label())))?;
        for w in &result.warnings {
            let _ = writeln!(stderr, "warning ({}): {w}", result.method);
        }
        results.push(result);
    }

    let fe = results.iter().find(|r| r.method == Method::Lsdv);
    let re = results.iter().find(|r| r.method == Method::Re);
    let hausman = match (fe, re) {
        (Some(fe), Some(re)) => {
            let symbols: Vec<String> = spec
                .slope_symbols()
                .into_iter()
                .filter(|s| fe.cov.symbols.contains(s) && re.cov.symbols.contains(s))
                .collect();
            match hausman_test(fe, re, &symbols) {
                Ok(h) => Some(h),
                Err(e) => {
                    let _ = writeln!(stderr, "warning: Hausman test skipped: {e}");
                    None
                }
            }
        }
        _ => None,
    };

    let report = Report {
        title: "Estimation of the equation for employment".into(),
        results,
        hausman,
        dummy_grid: Some(DummyGrid {
            regions: data.regions().iter().map(|r| r.to_string()).collect(),
            industries: data.industries().iter().map(|j| j.to_string()).collect(),
        }),
    };
    let text = render(&report, a.format.into());
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(|e| fail(1, format!("cannot write {}: {e}", path.display()))),
        None => write!(stdout, "{text}").map_err(|e| fail(1, e)),
    }
}

fn read_config(path: &Option<PathBuf>, seed: Option<u64>) -> Result<SyntheticConfig, Failure> {
    let mut config = match path {
        Some(p) => SyntheticConfig::from_json_file(p).map_err(|e| fail(1, e))?,
        None => SyntheticConfig::default(),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config.check().map_err(|e| fail(1, e))?;
    Ok(config)
}

fn cmd_simulate(a: SimulateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = read_config(&a.config, a.seed)?;
    let data = generate(&config).map_err(|e| fail(1, e))?;
    write_panel(&data, &a.panel, &a.totals).map_err(|e| fail(1, e))?;
    let _ = writeln!(
        stdout,
        "wrote {} observations ({} regions x {} industries x {} years), seed {}",
        data.len(),
        data.regions().len(),
        data.industries().len(),
        data.years().len(),
        config.seed
    );
    let _ = writeln!(stdout, "true coefficients:");
    for (k, phi) in config.true_phi.iter().enumerate() {
        let note = if k == 0 && !config.intercept { " (unused: no intercept)" } else { "" };
        let _ = writeln!(stdout, "  phi{k} = {phi}{note}");
    }
    let _ = writeln!(
        stdout,
        "  sigma_e = {}, sigma_u = {}, effect_correlation = {}",
        config.sigma_e, config.sigma_u, config.effect_correlation
    );
    Ok(())
}

fn montecarlo_text(s: &MonteCarloSummary) -> String {
    let mut out = format!(
        "Monte Carlo: {} replications ({} completed, {} degenerate)\n",
        s.replications, s.completed, s.degenerate
    );
    for e in &s.estimators {
        out += &format!(
            "\n{}\n{:<8}{:>12}{:>12}{:>12}{:>12}{:>12}{:>10}\n",
            e.method, "coef", "truth", "mean", "bias", "sd", "rmse", "cover95"
        );
        for c in &e.coefficients {
            out += &format!(
                "{:<8}{:>12.6}{:>12.6}{:>12.3e}{:>12.3e}{:>12.3e}{:>10.3}\n",
                c.symbol, c.truth, c.mean, c.bias, c.sd, c.rmse, c.coverage
            );
        }
    }
    let h = &s.hausman;
    out += &format!(
        "\nHausman: mean statistic {}, rejection rate 5% {}, 1% {}, clipped {}, failed {}\n",
        fmt3(h.mean_statistic),
        fmt3(h.rejection_rate_5),
        fmt3(h.rejection_rate_1),
        fmt3(h.psd_corrected_rate),
        h.failures
    );
    out
}

fn cmd_montecarlo(a: MonteCarloArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = read_config(&a.config, a.seed)?;
    if a.reps == 0 {
        return Err(fail(1, "--reps must be at least 1"));
    }
    let summary = monte_carlo(&config, a.reps).map_err(|e| fail(2, e))?;
    let text = match a.format {
        FormatArg::Json => serde_json::to_string_pretty(&summary).map_err(|e| fail(1, e))? + "\n",
        _ => montecarlo_text(&summary),
    };
    write!(stdout, "{text}").map_err(|e| fail(1, e))
}

fn cmd_validate(a: InputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let schema = read_schema(&a.schema)?;
    let data = load_panel(&a.panel, &a.totals, &schema).map_err(panel_failure)?;
    let _ = writeln!(
        stdout,
        "ok: {} observations ({} regions x {} industries x {} years, {}-{})",
        data.len(),
        data.regions().len(),
        data.industries().len(),
        data.years().len(),
        data.years()[0],
        data.years()[data.years().len() - 1]
    );
    Ok(())
}
