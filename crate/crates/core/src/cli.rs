//! Command-line front end.
//!
//! Exit codes: 0 on success (including inconclusive labels), 2 for invalid
//! input, 3 for numerical failures. Outputs go to `--out` (written atomically)
//! or to standard output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::carleson::{self, CarlesonParams, ClassifyConfig, Variant};
use crate::catalog;
use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::norms::{self, NormEstimate, NormGrid};
use crate::quad::Tolerance;
use crate::report::{self, fmt17};
use crate::series::{self, FunctionSpec, PowerSeries};
use crate::verify::{self, Theorem, VerifyConfig};

#[derive(Debug, Parser)]
#[command(
    name = "cesaro",
    version,
    about = "Cesaro-like operators, analytic function space norms and logarithmic Carleson criteria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moments mu_0..mu_{n-max} as CSV (n, mu_n, tolerance).
    #[command(allow_negative_numbers = true)]
    Moments(MomentsArgs),
    /// Classify a measure against an (s, alpha) Carleson condition; JSON verdict.
    #[command(allow_negative_numbers = true)]
    Classify(ClassifyArgs),
    /// Coefficients of C_mu f as CSV (n, re, im).
    #[command(allow_negative_numbers = true)]
    Apply(ApplyArgs),
    /// Bloch, Besov or mean Lipschitz norm of a function; JSON estimate.
    #[command(allow_negative_numbers = true)]
    Norm(NormArgs),
    /// Boundedness or compactness experiment; JSON report.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Tail against moment labels over the builtin catalog; JSON matrix.
    #[command(allow_negative_numbers = true)]
    Agreement(AgreementArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    /// Fail (exit 3) when a moment's error estimate exceeds this.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub alpha: f64,
    /// Integral probe exponent t; with --r-exp restricts the probes to one.
    #[arg(long)]
    pub t_exp: Option<f64>,
    #[arg(long)]
    pub r_exp: Option<f64>,
    /// Restrict integral criteria to one variant.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    #[arg(long, default_value_t = carleson::DEFAULT_LADDER_DEPTH)]
    pub ladder_depth: u32,
    #[arg(long, default_value_t = carleson::DEFAULT_MOMENT_ORDER)]
    pub n_max: usize,
    /// Also write every ladder as CSV (criterion, j, x, value).
    #[arg(long)]
    pub ladders: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub function: PathBuf,
    /// Output degree; defaults to the function's degree, at least 64.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Bloch,
    Besov,
    Lipschitz,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long, value_enum)]
    pub kind: NormKind,
    /// Exponent p (Besov) or s (mean Lipschitz).
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Mean Lipschitz order; defaults to 1/p.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 12)]
    pub ladder_depth: u32,
    /// Degree for builtin functions without one.
    #[arg(long, default_value_t = series::DEFAULT_DEGREE)]
    pub n_max: usize,
    /// Relative tolerance of the Besov radial quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write the mean Lipschitz profile as CSV (r, weighted_mean).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: Theorem,
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 12)]
    pub ladder_depth: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    #[arg(long, default_value_t = carleson::DEFAULT_LADDER_DEPTH)]
    pub ladder_depth: u32,
    #[arg(long, default_value_t = carleson::DEFAULT_MOMENT_ORDER)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: Output,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_theorem(s: &str) -> std::result::Result<Theorem, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_measure(path: &Path) -> Result<RadialMeasure> {
    RadialMeasure::from_json(&read(path)?)
}

fn load_function(path: &Path, default_degree: usize) -> Result<PowerSeries> {
    FunctionSpec::from_json(&read(path)?)?.build(default_degree)
}

/// Writes `text` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_moments(args: &MomentsArgs) -> Result<()> {
    let m = load_measure(&args.measure)?;
    let mu = m.moments(args.n_max)?;
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(Error::invalid("--tol must be positive"));
        }
        if let Some((n, e)) = mu.errors().iter().enumerate().find(|(_, e)| **e > tol) {
            return Err(Error::Numerical(format!(
                "moment {n} has error estimate {} above --tol {}",
                fmt17(*e),
                fmt17(tol)
            )));
        }
    }
    emit(&args.output, &mu.to_csv())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let m = load_measure(&args.measure)?;
    let params =
        CarlesonParams::with_exponents(args.s, args.alpha, args.t_exp.unwrap_or(1.0), args.r_exp.unwrap_or(0.0))?;
    let probes = (args.t_exp.is_some() || args.r_exp.is_some()).then(|| vec![(params.t_exp, params.r_exp)]);
    let config = ClassifyConfig {
        ladder_depth: args.ladder_depth,
        n_max: args.n_max,
        probes,
        variants: args.variant.map_or_else(|| Variant::ALL.to_vec(), |v| vec![v]),
    };
    let verdict = carleson::classify(&m, &params, &config)?;
    if let Some(path) = &args.ladders {
        write_atomic(path, &verdict.ladders_csv())?;
    }
    emit(&args.output, &report::to_json(&verdict))
}

fn coefficients_csv(g: &PowerSeries) -> String {
    let mut out = String::from("n,re,im\n");
    for (n, c) in g.coeffs().iter().enumerate() {
        out.push_str(&format!("{n},{},{}\n", fmt17(c.re), fmt17(c.im)));
    }
    out
}

fn cmd_apply(args: &ApplyArgs) -> Result<()> {
    let m = load_measure(&args.measure)?;
    let f = load_function(&args.function, series::DEFAULT_DEGREE)?;
    let degree = args.n_max.unwrap_or_else(|| f.degree().max(64));
    let f = f.with_degree(degree);
    let mu = m.moments(degree)?;
    let g = series::cesaro_like(&mu, &f)?;
    emit(&args.output, &coefficients_csv(&g))
}

#[derive(Serialize)]
struct NormReport {
    kind: NormKind,
    p: f64,
    alpha: Option<f64>,
    degree: usize,
    estimate: NormEstimate,
}

fn cmd_norm(args: &NormArgs) -> Result<()> {
    let f = load_function(&args.function, args.n_max)?;
    let grid = NormGrid {
        ladder_depth: args.ladder_depth,
        ..NormGrid::default()
    };
    let (estimate, alpha) = match args.kind {
        NormKind::Bloch => (norms::bloch_norm_with(&f, &grid)?, None),
        NormKind::Besov => {
            let tol = match args.tol {
                Some(t) if t > 0.0 => Tolerance::new(1e-300, t),
                Some(_) => return Err(Error::invalid("--tol must be positive")),
                None => Tolerance::new(1e-300, 1e-10),
            };
            (norms::besov_norm_with(&f, args.p, tol)?, None)
        }
        NormKind::Lipschitz => {
            let alpha = args.alpha.unwrap_or(1.0 / args.p);
            if let Some(path) = &args.profile {
                let profile = norms::lipschitz_profile(&f, args.p, alpha, &grid)?;
                write_atomic(path, &profile.to_csv())?;
            }
            (norms::mean_lipschitz_norm_with(&f, args.p, alpha, &grid)?, Some(alpha))
        }
    };
    let report = NormReport {
        kind: args.kind,
        p: args.p,
        alpha,
        degree: f.degree(),
        estimate,
    };
    emit(&args.output, &report::to_json(&report))
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let m = load_measure(&args.measure)?;
    let config = VerifyConfig {
        ladder_depth: args.ladder_depth,
        ..VerifyConfig::default()
    };
    let report = verify::run_theorem(args.theorem, &m, args.p, args.s, &config)?;
    emit(&args.output, &report::to_json(&report))
}

fn cmd_agreement(args: &AgreementArgs) -> Result<()> {
    let measures: Vec<(String, RadialMeasure)> = catalog::measures()
        .into_iter()
        .map(|(n, m)| (n.to_string(), m))
        .collect();
    let matrix =
        verify::criterion_agreement_experiment(&measures, &catalog::parameter_grid(), args.ladder_depth, args.n_max)?;
    emit(&args.output, &report::to_json(&matrix))
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Moments(a) => cmd_moments(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Agreement(a) => cmd_agreement(a),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
