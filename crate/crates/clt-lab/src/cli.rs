//! Batch command-line surface: one subcommand per verification artifact,
//! human-readable tables on stdout, machine-readable CSV/JSON behind
//! `--out`, deterministic for a fixed seed.

use crate::asymptotics::{self, LimitBranch, SQRT_2PI};
use crate::convolve;
use crate::deviation;
use crate::extremal::{self, ObjectiveKind, SearchMode};
use crate::gamma;
use crate::law::{self, Law, LawError};
use crate::lawfile::{self, LawFileError};
use crate::rational;
use crate::vonmises;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Environment variable capping internal parallelism (thread count).
pub const THREADS_ENV: &str = "CLT_LAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input: law files, flags, preconditions. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Scale or resource limits: support caps, oracle bounds. Exit code 3.
    #[error("{0}")]
    Scale(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Scale(_) => 3,
        }
    }
}

impl From<LawFileError> for CliError {
    fn from(e: LawFileError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LawError> for CliError {
    fn from(e: LawError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<convolve::ConvolveError> for CliError {
    fn from(e: convolve::ConvolveError) -> Self {
        match e {
            convolve::ConvolveError::SupportOverflow { .. }
            | convolve::ConvolveError::OracleScaleExceeded { .. } => CliError::Scale(e.to_string()),
            convolve::ConvolveError::DegenerateLaw => CliError::Input(e.to_string()),
        }
    }
}

impl From<asymptotics::AsymptoticsError> for CliError {
    fn from(e: asymptotics::AsymptoticsError) -> Self {
        match e {
            asymptotics::AsymptoticsError::Convolve(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<gamma::ScaleExceeded> for CliError {
    fn from(e: gamma::ScaleExceeded) -> Self {
        CliError::Scale(e.to_string())
    }
}

impl From<extremal::ExtremalError> for CliError {
    fn from(e: extremal::ExtremalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<vonmises::InvalidS> for CliError {
    fn from(e: vonmises::InvalidS) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Moments,
    Span,
    Distance,
    Converge,
    Limit,
    Edgeworth,
    Vonmises,
    Extremal,
    GammaConverge,
    Constants,
}

/// Fully resolved run configuration; the clap layer flattens into this.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub law_path: Option<PathBuf>,
    pub n: u32,
    pub n_start: u32,
    pub n_factor: u32,
    pub steps: u32,
    pub s: Option<u32>,
    pub x: Option<f64>,
    pub objective: ObjectiveKind,
    pub mode: SearchMode,
    pub k: usize,
    pub restarts: usize,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    pub exact: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: CommandKind::Constants,
            law_path: None,
            n: 16,
            n_start: 4,
            n_factor: 2,
            steps: 8,
            s: None,
            x: None,
            objective: ObjectiveKind::Interval,
            mode: SearchMode::TwoPoint,
            k: 4,
            restarts: 16,
            seed: 0,
            out_path: None,
            exact: false,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "clt-lab",
    version,
    about = "Exact distances between standardized i.i.d. sums and the normal law, \
             their asymptotic limits, and extremal-law searches"
)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Interval,
    Kolmogorov,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    TwoPoint,
    Lattice,
    ContinuousH0,
}

#[derive(Subcommand)]
pub enum CliCommand {
    /// Moments, lattice span and minimal gap of a law
    Moments {
        law: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lattice span and minimal atom gap
    Span {
        law: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kolmogorov and interval distance of the standardized n-fold sum
    Distance {
        law: PathBuf,
        #[arg(long)]
        n: u32,
        /// Cross-check the convolution against the exact rational oracle
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance table along a geometric n-sequence (CSV behind --out)
    Converge {
        law: PathBuf,
        #[arg(long = "n-start", default_value_t = 4)]
        n_start: u32,
        #[arg(long = "n-factor", default_value_t = 2)]
        n_factor: u32,
        #[arg(long, default_value_t = 8)]
        steps: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form limits of sqrt(n) times both distances
    Limit {
        law: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sawtooth-corrected expansion: residual sup, or the value at a point
    Edgeworth {
        law: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separation inequality eta*beta_s <= 2*beta_{s+1} with classification
    Vonmises {
        law: PathBuf,
        /// Check a single s in {1,2,3} instead of all three
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for extremal laws of the normalized asymptotic objectives
    Extremal {
        #[arg(long, value_enum, default_value = "interval")]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value = "two-point")]
        mode: ModeArg,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smooth-family distance table along a geometric n-sequence
    GammaConverge {
        #[arg(long = "n-start", default_value_t = 4)]
        n_start: u32,
        #[arg(long = "n-factor", default_value_t = 2)]
        n_factor: u32,
        #[arg(long, default_value_t = 6)]
        steps: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The named asymptotic constants and published bounds
    Constants {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl CliArgs {
    pub fn into_config(self) -> RunConfig {
        let mut c = RunConfig::default();
        match self.command {
            CliCommand::Moments { law, out } => {
                c.command = CommandKind::Moments;
                c.law_path = Some(law);
                c.out_path = out;
            }
            CliCommand::Span { law, out } => {
                c.command = CommandKind::Span;
                c.law_path = Some(law);
                c.out_path = out;
            }
            CliCommand::Distance { law, n, exact, out } => {
                c.command = CommandKind::Distance;
                c.law_path = Some(law);
                c.n = n;
                c.exact = exact;
                c.out_path = out;
            }
            CliCommand::Converge {
                law,
                n_start,
                n_factor,
                steps,
                out,
            } => {
                c.command = CommandKind::Converge;
                c.law_path = Some(law);
                c.n_start = n_start;
                c.n_factor = n_factor;
                c.steps = steps;
                c.out_path = out;
            }
            CliCommand::Limit { law, out } => {
                c.command = CommandKind::Limit;
                c.law_path = Some(law);
                c.out_path = out;
            }
            CliCommand::Edgeworth { law, n, x, out } => {
                c.command = CommandKind::Edgeworth;
                c.law_path = Some(law);
                c.n = n;
                c.x = x;
                c.out_path = out;
            }
            CliCommand::Vonmises { law, s, out } => {
                c.command = CommandKind::Vonmises;
                c.law_path = Some(law);
                c.s = s;
                c.out_path = out;
            }
            CliCommand::Extremal {
                objective,
                mode,
                k,
                restarts,
                seed,
                out,
            } => {
                c.command = CommandKind::Extremal;
                c.objective = match objective {
                    ObjectiveArg::Interval => ObjectiveKind::Interval,
                    ObjectiveArg::Kolmogorov => ObjectiveKind::Kolmogorov,
                };
                c.mode = match mode {
                    ModeArg::TwoPoint => SearchMode::TwoPoint,
                    ModeArg::Lattice => SearchMode::Lattice,
                    ModeArg::ContinuousH0 => SearchMode::ContinuousH0,
                };
                c.k = k;
                c.restarts = restarts;
                c.seed = seed;
                c.out_path = out;
            }
            CliCommand::GammaConverge {
                n_start,
                n_factor,
                steps,
                out,
            } => {
                c.command = CommandKind::GammaConverge;
                c.n_start = n_start;
                c.n_factor = n_factor;
                c.steps = steps;
                c.out_path = out;
            }
            CliCommand::Constants { out } => {
                c.command = CommandKind::Constants;
                c.out_path = out;
            }
        }
        c
    }
}

/// Applies the `CLT_LAB_THREADS` cap to the global thread pool. Repeated
/// calls after the pool exists are no-ops.
fn init_threads() -> Result<(), CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(()),
        Ok(raw) => {
            let threads: usize = raw.parse().map_err(|_| {
                CliError::Input(format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))
            })?;
            if threads == 0 {
                return Err(CliError::Input(format!(
                    "{THREADS_ENV} must be a positive integer, got 0"
                )));
            }
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
            Ok(())
        }
    }
}

/// Runs one command; errors map to exit codes in `main`.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    init_threads()?;
    match config.command {
        CommandKind::Moments => cmd_moments(config),
        CommandKind::Span => cmd_span(config),
        CommandKind::Distance => cmd_distance(config),
        CommandKind::Converge => cmd_converge(config),
        CommandKind::Limit => cmd_limit(config),
        CommandKind::Edgeworth => cmd_edgeworth(config),
        CommandKind::Vonmises => cmd_vonmises(config),
        CommandKind::Extremal => cmd_extremal(config),
        CommandKind::GammaConverge => cmd_gamma_converge(config),
        CommandKind::Constants => cmd_constants(config),
    }
}

fn load_document(config: &RunConfig) -> Result<lawfile::LawDocument, CliError> {
    let path = config
        .law_path
        .as_ref()
        .ok_or_else(|| CliError::Input("this command needs a law file".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(lawfile::parse_law_document(&text)?)
}

fn load_law(config: &RunConfig) -> Result<Law, CliError> {
    Ok(load_document(config)?.to_law()?)
}

fn write_out(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(contents.as_bytes())?;
    Ok(())
}

fn emit(out_path: &Option<PathBuf>, machine: &str) -> Result<(), CliError> {
    if let Some(path) = out_path {
        write_out(path, machine)?;
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

/// `%.15g`-style rendering: 15 significant digits, decimal point, trailing
/// zeros trimmed, scientific notation outside [1e-5, 1e15).
pub fn format_sig15(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let sci = format!("{:.14e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("valid exponent");
    if !(-5..15).contains(&exp) {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut positional = if exp >= 0 {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{digits}{}", "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if positional.contains('.') {
        positional = positional
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string();
    }
    format!("{sign}{positional}")
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MomentsOut {
    mu: f64,
    sigma2: f64,
    sigma: f64,
    alpha: f64,
    beta1: f64,
    beta2: f64,
    beta3: f64,
    beta4: f64,
    lattice_span: Option<String>,
    min_gap: Option<String>,
}

fn cmd_moments(config: &RunConfig) -> Result<(), CliError> {
    let law = load_law(config)?;
    let m = law::moments(&law);
    let span = law::lattice_span(&law).ok().map(|r| r.to_string());
    let gap = law::min_gap(&law).ok().map(|r| r.to_string());
    println!("atoms             {}", law.len());
    println!("mu                {}", format_sig15(m.mu));
    println!("sigma2            {}", format_sig15(m.sigma2));
    println!("sigma             {}", format_sig15(m.sigma));
    println!("alpha             {}", format_sig15(m.alpha));
    for s in 1..=4 {
        println!("beta{s}             {}", format_sig15(m.beta(s)));
    }
    println!("lattice_span      {}", span.as_deref().unwrap_or("unbounded"));
    println!("min_gap           {}", gap.as_deref().unwrap_or("unbounded"));
    emit(
        &config.out_path,
        &to_json(&MomentsOut {
            mu: m.mu,
            sigma2: m.sigma2,
            sigma: m.sigma,
            alpha: m.alpha,
            beta1: m.beta(1),
            beta2: m.beta(2),
            beta3: m.beta(3),
            beta4: m.beta(4),
            lattice_span: span,
            min_gap: gap,
        }),
    )
}

#[derive(Serialize)]
struct SpanOut {
    lattice_span: String,
    lattice_span_f64: f64,
    min_gap: String,
    min_gap_f64: f64,
}

fn cmd_span(config: &RunConfig) -> Result<(), CliError> {
    let law = load_law(config)?;
    let span = law::lattice_span(&law)?;
    let gap = law::min_gap(&law)?;
    println!("lattice_span      {} ({})", span, format_sig15(rational::to_f64(&span)));
    println!("min_gap           {} ({})", gap, format_sig15(rational::to_f64(&gap)));
    emit(
        &config.out_path,
        &to_json(&SpanOut {
            lattice_span: span.to_string(),
            lattice_span_f64: rational::to_f64(&span),
            min_gap: gap.to_string(),
            min_gap_f64: rational::to_f64(&gap),
        }),
    )
}

#[derive(Serialize)]
struct DistanceOut {
    n: u32,
    d_kolm: f64,
    d_interval: f64,
    sqrtn_d_kolm: f64,
    sqrtn_d_interval: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_max_mass_deviation: Option<f64>,
}

fn cmd_distance(config: &RunConfig) -> Result<(), CliError> {
    let doc = load_document(config)?;
    let law = doc.to_law()?;
    let m = law::moments(&law);
    let sum = convolve::self_convolve(&law, config.n)?;
    let pmf = convolve::standardize(&sum, &m)?;
    let ext = deviation::deviation_extrema(&pmf);
    let sqrt_n = (config.n as f64).sqrt();
    let exact_dev = if config.exact {
        let exact = convolve::exact_self_convolve(doc.pairs(), config.n)?;
        let dev = sum
            .masses()
            .iter()
            .zip(exact.masses_f64())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        Some(dev)
    } else {
        None
    };
    println!("n                 {}", config.n);
    println!("d_kolm            {}", format_sig15(ext.kolmogorov()));
    println!("d_interval        {}", format_sig15(ext.interval()));
    println!("sqrtn_d_kolm      {}", format_sig15(sqrt_n * ext.kolmogorov()));
    println!("sqrtn_d_interval  {}", format_sig15(sqrt_n * ext.interval()));
    if let Some(dev) = exact_dev {
        println!("exact_max_mass_deviation  {}", format_sig15(dev));
    }
    emit(
        &config.out_path,
        &to_json(&DistanceOut {
            n: config.n,
            d_kolm: ext.kolmogorov(),
            d_interval: ext.interval(),
            sqrtn_d_kolm: sqrt_n * ext.kolmogorov(),
            sqrtn_d_interval: sqrt_n * ext.interval(),
            exact_max_mass_deviation: exact_dev,
        }),
    )
}

pub(crate) const CSV_HEADER: &str =
    "n,d_kolm,d_interval,sqrtn_d_kolm,sqrtn_d_interval,limit_kolm,limit_interval";

struct ConvergeRow {
    n: u64,
    d_kolm: f64,
    d_interval: f64,
    limit_kolm: f64,
    limit_interval: f64,
}

impl ConvergeRow {
    fn csv_line(&self) -> String {
        let sqrt_n = (self.n as f64).sqrt();
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            format_sig15(self.d_kolm),
            format_sig15(self.d_interval),
            format_sig15(sqrt_n * self.d_kolm),
            format_sig15(sqrt_n * self.d_interval),
            format_sig15(self.limit_kolm),
            format_sig15(self.limit_interval),
        )
    }
}

fn print_converge_table(rows: &[ConvergeRow]) {
    println!(
        "{:>8}  {:>20}  {:>20}  {:>20}  {:>20}",
        "n", "d_kolm", "d_interval", "sqrtn_d_kolm", "sqrtn_d_interval"
    );
    for row in rows {
        let sqrt_n = (row.n as f64).sqrt();
        println!(
            "{:>8}  {:>20}  {:>20}  {:>20}  {:>20}",
            row.n,
            format_sig15(row.d_kolm),
            format_sig15(row.d_interval),
            format_sig15(sqrt_n * row.d_kolm),
            format_sig15(sqrt_n * row.d_interval),
        );
    }
    if let Some(row) = rows.first() {
        println!("limit_kolm        {}", format_sig15(row.limit_kolm));
        println!("limit_interval    {}", format_sig15(row.limit_interval));
    }
}

fn csv_document(rows: &[ConvergeRow]) -> String {
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    csv
}

fn n_sequence(config: &RunConfig) -> Result<Vec<u64>, CliError> {
    if config.n_factor < 2 {
        return Err(CliError::Input("--n-factor must be at least 2".into()));
    }
    if config.steps < 1 {
        return Err(CliError::Input("--steps must be at least 1".into()));
    }
    if config.n_start < 1 {
        return Err(CliError::Input("--n-start must be at least 1".into()));
    }
    let mut ns = Vec::with_capacity(config.steps as usize);
    let mut n = config.n_start as u64;
    for _ in 0..config.steps {
        ns.push(n);
        n = n.checked_mul(config.n_factor as u64).ok_or_else(|| {
            CliError::Scale("n sequence overflows the supported range".into())
        })?;
    }
    Ok(ns)
}

fn cmd_converge(config: &RunConfig) -> Result<(), CliError> {
    let law = load_law(config)?;
    let m = law::moments(&law);
    let limit_kolm = asymptotics::kolmogorov_limit(&law)?;
    let limit_interval = asymptotics::interval_limit(&law)?.value;
    let mut rows = Vec::new();
    for n in n_sequence(config)? {
        if n > u32::MAX as u64 {
            return Err(CliError::Scale(
                "n sequence overflows the supported range".into(),
            ));
        }
        let pmf = convolve::standardize(&convolve::self_convolve(&law, n as u32)?, &m)?;
        let ext = deviation::deviation_extrema(&pmf);
        rows.push(ConvergeRow {
            n,
            d_kolm: ext.kolmogorov(),
            d_interval: ext.interval(),
            limit_kolm,
            limit_interval,
        });
    }
    print_converge_table(&rows);
    emit(&config.out_path, &csv_document(&rows))
}

fn cmd_gamma_converge(config: &RunConfig) -> Result<(), CliError> {
    // Standardized Erlang sums: h = 0, sigma = 1, alpha = 2.
    let limit_kolm = 1.0 / (3.0 * SQRT_2PI);
    let limit_interval = (1.0 / 3.0 + 2.0 / 3.0 * (-1.5f64).exp()) / SQRT_2PI;
    let mut rows = Vec::new();
    for n in n_sequence(config)? {
        if n > gamma::MAX_N as u64 {
            return Err(CliError::Scale(format!(
                "gamma family limited to n <= {}, got {n}",
                gamma::MAX_N
            )));
        }
        let ext = gamma::smooth_deviation_extrema(n as u32)?;
        rows.push(ConvergeRow {
            n,
            d_kolm: ext.kolmogorov(),
            d_interval: ext.interval(),
            limit_kolm,
            limit_interval,
        });
    }
    print_converge_table(&rows);
    emit(&config.out_path, &csv_document(&rows))
}

#[derive(Serialize)]
struct LimitOut {
    branch: &'static str,
    interval_limit: f64,
    h_term: f64,
    alpha_term: f64,
    exp_term: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    y0: Option<f64>,
    kolmogorov_limit: f64,
    interval_objective: f64,
    kolmogorov_objective: f64,
}

fn cmd_limit(config: &RunConfig) -> Result<(), CliError> {
    let law = load_law(config)?;
    let report = asymptotics::interval_limit(&law)?;
    let kolm = asymptotics::kolmogorov_limit(&law)?;
    let int_obj = extremal::interval_objective(&law)?;
    let kolm_obj = extremal::kolmogorov_objective(&law)?;
    let branch = match report.branch {
        LimitBranch::LatticeDominant => "lattice_dominant",
        LimitBranch::SkewDominant => "skew_dominant",
    };
    println!("branch            {branch}");
    println!("interval_limit    {}", format_sig15(report.value));
    println!("  h_term          {}", format_sig15(report.h_term));
    println!("  alpha_term      {}", format_sig15(report.alpha_term));
    println!("  exp_term        {}", format_sig15(report.exp_term));
    if let Some(y0) = report.y0 {
        println!("  y0              {}", format_sig15(y0));
    }
    println!("kolmogorov_limit  {}", format_sig15(kolm));
    println!("interval_objective    {}", format_sig15(int_obj));
    println!("kolmogorov_objective  {}", format_sig15(kolm_obj));
    emit(
        &config.out_path,
        &to_json(&LimitOut {
            branch,
            interval_limit: report.value,
            h_term: report.h_term,
            alpha_term: report.alpha_term,
            exp_term: report.exp_term,
            y0: report.y0,
            kolmogorov_limit: kolm,
            interval_objective: int_obj,
            kolmogorov_objective: kolm_obj,
        }),
    )
}

#[derive(Serialize)]
struct EdgeworthPointOut {
    n: u32,
    x: f64,
    f_n: f64,
    edgeworth: f64,
    psi: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct EdgeworthResidualOut {
    n: u32,
    residual_sup: f64,
    sqrtn_residual_sup: f64,
}

fn cmd_edgeworth(config: &RunConfig) -> Result<(), CliError> {
    let law = load_law(config)?;
    match config.x {
        Some(x) => {
            if !x.is_finite() {
                return Err(CliError::Input("--x must be finite".into()));
            }
            let m = law::moments(&law);
            let pmf = convolve::standardize(&convolve::self_convolve(&law, config.n)?, &m)?;
            let mut f_n = 0.0;
            let mut acc = 0.0;
            for k in 0..pmf.len() {
                acc += pmf.masses()[k];
                if pmf.position(k) <= x {
                    f_n = acc;
                }
            }
            let value = asymptotics::edgeworth_cdf(&law, config.n, x)?;
            let psi = asymptotics::psi_n(&law, config.n, x)?;
            println!("n                 {}", config.n);
            println!("x                 {}", format_sig15(x));
            println!("F_n(x)            {}", format_sig15(f_n));
            println!("edgeworth(x)      {}", format_sig15(value));
            println!("psi_n(x)          {}", format_sig15(psi));
            println!("deviation         {}", format_sig15(f_n - value));
            emit(
                &config.out_path,
                &to_json(&EdgeworthPointOut {
                    n: config.n,
                    x,
                    f_n,
                    edgeworth: value,
                    psi,
                    deviation: f_n - value,
                }),
            )
        }
        None => {
            let residual = asymptotics::expansion_residual_sup(&law, config.n)?;
            let sqrt_n = (config.n as f64).sqrt();
            println!("n                  {}", config.n);
            println!("residual_sup       {}", format_sig15(residual));
            println!("sqrtn_residual_sup {}", format_sig15(sqrt_n * residual));
            emit(
                &config.out_path,
                &to_json(&EdgeworthResidualOut {
                    n: config.n,
                    residual_sup: residual,
                    sqrtn_residual_sup: sqrt_n * residual,
                }),
            )
        }
    }
}

#[derive(Serialize)]
struct VonMisesRowOut {
    s: u32,
    eta: String,
    lhs: f64,
    rhs: f64,
    holds: bool,
    equality: bool,
    predicted_equality: bool,
}

#[derive(Serialize)]
struct VonMisesOut {
    checks: Vec<VonMisesRowOut>,
    log_moment_convexity: bool,
    pair_identity: bool,
}

fn cmd_vonmises(config: &RunConfig) -> Result<(), CliError> {
    let law = load_law(config)?;
    let ss: Vec<u32> = match config.s {
        Some(s) => vec![s],
        None => vec![1, 2, 3],
    };
    let mut rows = Vec::new();
    println!(
        "{:>2}  {:>10}  {:>20}  {:>20}  {:>6}  {:>9}  {:>9}",
        "s", "eta", "eta*beta_s", "2*beta_{s+1}", "holds", "equality", "predicted"
    );
    for s in ss {
        let r = vonmises::vonmises_check(&law, s)?;
        println!(
            "{:>2}  {:>10}  {:>20}  {:>20}  {:>6}  {:>9}  {:>9}",
            r.s,
            r.eta.to_string(),
            format_sig15(r.lhs),
            format_sig15(r.rhs),
            r.holds,
            r.equality,
            r.predicted_equality
        );
        rows.push(VonMisesRowOut {
            s: r.s,
            eta: r.eta.to_string(),
            lhs: r.lhs,
            rhs: r.rhs,
            holds: r.holds,
            equality: r.equality,
            predicted_equality: r.predicted_equality,
        });
    }
    let convexity = vonmises::log_moment_convexity(&law);
    let pair = vonmises::pair_identity_check(&law);
    println!("log_moment_convexity  {convexity}");
    println!("pair_identity         {pair}");
    emit(
        &config.out_path,
        &to_json(&VonMisesOut {
            checks: rows,
            log_moment_convexity: convexity,
            pair_identity: pair,
        }),
    )
}

#[derive(Serialize)]
struct ExtremalOut {
    objective: &'static str,
    mode: &'static str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_star: Option<f64>,
    atoms: Vec<(String, f64)>,
    trace: Vec<(u64, f64)>,
}

fn cmd_extremal(config: &RunConfig) -> Result<(), CliError> {
    let result = match config.mode {
        SearchMode::TwoPoint => extremal::two_point_scan(config.objective, 4096),
        mode => extremal::search_k_atoms(
            config.k,
            mode,
            config.objective,
            config.restarts,
            config.seed,
        )?,
    };
    let objective = match config.objective {
        ObjectiveKind::Interval => "interval",
        ObjectiveKind::Kolmogorov => "kolmogorov",
    };
    let mode = match config.mode {
        SearchMode::TwoPoint => "two-point",
        SearchMode::Lattice => "lattice",
        SearchMode::ContinuousH0 => "continuous-h0",
    };
    let t_star = match config.mode {
        SearchMode::TwoPoint => Some(
            (result.best_law.atoms()[0].mass - result.best_law.atoms()[1].mass).abs(),
        ),
        _ => None,
    };
    println!("objective         {objective}");
    println!("mode              {mode}");
    println!("value             {}", format_sig15(result.objective_value));
    if let Some(t) = t_star {
        println!("t_star            {}", format_sig15(t));
    }
    println!("best law:");
    for atom in result.best_law.atoms() {
        println!("  x = {:<10}  p = {}", atom.pos.to_string(), format_sig15(atom.mass));
    }
    println!("improvements      {}", result.trace.len());
    emit(
        &config.out_path,
        &to_json(&ExtremalOut {
            objective,
            mode,
            value: result.objective_value,
            t_star,
            atoms: result
                .best_law
                .atoms()
                .iter()
                .map(|a| (a.pos.to_string(), a.mass))
                .collect(),
            trace: result.trace,
        }),
    )
}

#[derive(Serialize)]
struct ConstantsOut {
    c_inf_be: f64,
    c_inf_be_intervals: f64,
    c_be_lower: f64,
    c_be_upper: f64,
}

fn cmd_constants(config: &RunConfig) -> Result<(), CliError> {
    let c = asymptotics::constants();
    println!("c_inf_be             {}", format_sig15(c.c_inf_be));
    println!("c_inf_be_intervals   {}", format_sig15(c.c_inf_be_intervals));
    println!("c_be_lower           {}", format_sig15(c.c_be_lower));
    println!("c_be_upper           {}", format_sig15(c.c_be_upper));
    emit(
        &config.out_path,
        &to_json(&ConstantsOut {
            c_inf_be: c.c_inf_be,
            c_inf_be_intervals: c.c_inf_be_intervals,
            c_be_lower: c.c_be_lower,
            c_be_upper: c.c_be_upper,
        }),
    )
}
