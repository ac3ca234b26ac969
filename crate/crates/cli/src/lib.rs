//! Command-line front end: load an edge list, compute exact or sampled
//! moments, and turn them into spectral-radius bounds.
//!
//! Reports go to the writer handed to [`run`]; the binary routes that to
//! stdout and prints errors on stderr. Exit codes: 1 for input errors, 2 for
//! numerical failures, 3 for configuration errors.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use egospec::bounds::{robust_bounds, spectral_bounds, BoundOptions, BoundReport};
use egospec::laplacian::exact_moments;
use egospec::sampling::{
    estimate_moments_with, plan_sample_size, sample_nodes, EstimateConfig, IntervalSpec, SampleMode, SamplePlan,
};
use egospec::{Graph, MomentSequence};
use serde_json::Value;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] egospec::Error),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("failed to write report: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use egospec::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Io(_)
                | E::Parse { .. }
                | E::SelfLoop { .. }
                | E::DuplicateEdge { .. }
                | E::IsolatedNode(_)
                | E::NonPositiveWeight { .. } => 1,
                E::OrderOutOfRange { .. }
                | E::SampleTooLarge { .. }
                | E::ConfidenceRange(_)
                | E::Range(_)
                | E::Index { .. } => 3,
                _ => 2,
            },
            CliError::Output(_) => 1,
            CliError::Config(_) => 3,
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) => 3,
        }
    }
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

#[derive(Debug, Parser)]
#[command(name = "egospec", version, about = "Normalized-Laplacian spectral moments and spectral-radius bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact or sampled spectral moments.
    Moments(RunArgs),
    /// Lower and upper bounds on the spectral radius.
    Bounds(RunArgs),
    /// Sample size for a target error and failure probability.
    Plan(PlanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Whitespace-separated edge list `u v [w]`.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Sweep every node instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Number of egonet centers drawn with replacement
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
    /// Normalized error per moment; sizes the sample with `--delta`
    #[arg(long, value_name = "X")]
    pub epsilon: Option<f64>,
    /// Failure probability per moment; sizes the sample with `--epsilon`
    #[arg(long, value_name = "Y")]
    pub delta: Option<f64>,
    /// Egonet radius r; moments run up to order 2r+1.
    #[arg(long, value_name = "R")]
    pub radius: Option<usize>,
    /// Highest moment order to report.
    #[arg(long, value_name = "K")]
    pub k: Option<usize>,
    /// Compute orders up to K0 exactly when sampling.
    #[arg(long = "exact-up-to", value_name = "K0")]
    pub exact_up_to: Option<usize>,
    /// Joint confidence for `--samples`.
    #[arg(long, value_name = "D")]
    pub confidence: Option<f64>,
    /// Seed for center sampling
    #[arg(long, value_name = "S", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Relative PSD tolerance for the moment-matrix test.
    #[arg(long = "psd-tol", value_name = "T")]
    pub psd_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Normalized error per moment, in (0, 1]
    #[arg(long, value_name = "X")]
    pub epsilon: f64,
    /// Failure probability per moment, in (0, 1)
    #[arg(long, value_name = "Y")]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sizing {
    Exact,
    Samples { count: usize, confidence: f64 },
    Planned { epsilon: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Moments,
    Bounds,
}

/// Validated settings for `moments` and `bounds`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub command: CommandKind,
    pub sizing: Sizing,
    pub radius: Option<usize>,
    pub k: Option<usize>,
    pub exact_up_to: Option<usize>,
    pub seed: u64,
    pub format: Format,
    pub options: BoundOptions,
}

impl RunConfig {
    pub fn from_args(command: CommandKind, args: RunArgs) -> Result<RunConfig, CliError> {
        if let Some(r) = args.radius {
            if r < 1 {
                return Err(config_error("--radius must be at least 1"));
            }
            if let Some(k) = args.k {
                if k > 2 * r + 1 {
                    return Err(egospec::Error::OrderOutOfRange { k, radius: r, max: 2 * r + 1 }.into());
                }
            }
        }
        if args.k == Some(0) {
            return Err(config_error("--k must be at least 1"));
        }

        let planned = match (args.epsilon, args.delta) {
            (Some(epsilon), Some(delta)) => Some((epsilon, delta)),
            (None, None) => None,
            _ => return Err(config_error("--epsilon and --delta must be given together")),
        };
        let modes = args.exact as usize + args.samples.is_some() as usize + planned.is_some() as usize;
        if modes != 1 {
            return Err(config_error("choose exactly one of --exact, --samples N, or --epsilon X --delta Y"));
        }
        if args.confidence.is_some() && args.samples.is_none() {
            return Err(config_error("--confidence only applies with --samples"));
        }
        let sizing = if args.exact {
            Sizing::Exact
        } else if let Some(count) = args.samples {
            Sizing::Samples { count, confidence: args.confidence.unwrap_or(DEFAULT_CONFIDENCE) }
        } else {
            let (epsilon, delta) = planned.expect("one mode is set");
            Sizing::Planned { epsilon, delta }
        };

        let needs_radius = command == CommandKind::Bounds || sizing != Sizing::Exact;
        if needs_radius && args.radius.is_none() {
            return Err(config_error("--radius is required for this command"));
        }
        if sizing == Sizing::Exact && args.radius.is_none() && args.k.is_none() {
            return Err(config_error("exact moments need --k or --radius"));
        }

        let mut options = BoundOptions::default();
        if let Some(t) = args.psd_tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(config_error("--psd-tol must be a finite nonnegative number"));
            }
            options.psd_scale = t;
        }

        Ok(RunConfig {
            input: args.input,
            command,
            sizing,
            radius: args.radius,
            k: args.k,
            exact_up_to: args.exact_up_to,
            seed: args.seed,
            format: args.format,
            options,
        })
    }

    fn max_order(&self) -> usize {
        match (self.radius, self.k) {
            (_, Some(k)) if self.command == CommandKind::Moments => k,
            (Some(r), _) => 2 * r + 1,
            (None, Some(k)) => k,
            (None, None) => unreachable!("validated in from_args"),
        }
    }
}

pub fn load_graph(path: &std::path::Path) -> Result<Graph, CliError> {
    let file = File::open(path).map_err(|e| egospec::Error::Io(format!("{}: {e}", path.display())))?;
    Ok(Graph::load_edge_list(BufReader::new(file))?)
}

fn compute_moments(g: &Graph, config: &RunConfig) -> Result<MomentSequence, CliError> {
    let order = config.max_order();
    match config.sizing {
        Sizing::Exact => Ok(exact_moments(g, order)?),
        Sizing::Samples { count, confidence } => {
            sampled_moments(g, config, count, IntervalSpec::Joint { confidence }, order)
        }
        Sizing::Planned { epsilon, delta } => {
            let plan = plan_sample_size(epsilon, delta)?;
            sampled_moments(g, config, plan.samples, IntervalSpec::PerMoment { epsilon, delta }, order)
        }
    }
}

fn sampled_moments(
    g: &Graph,
    config: &RunConfig,
    count: usize,
    intervals: IntervalSpec,
    order: usize,
) -> Result<MomentSequence, CliError> {
    let radius = config.radius.expect("validated in from_args");
    let sample = sample_nodes(g, count, config.seed, SampleMode::WithReplacement)?;
    let estimate = EstimateConfig { radius, intervals, exact_up_to: config.exact_up_to };
    let m = estimate_moments_with(g, &sample, &estimate)?;
    if order < m.max_order() {
        Ok(m.truncated(order)?)
    } else {
        Ok(m)
    }
}

pub fn cmd_moments(config: &RunConfig) -> Result<MomentSequence, CliError> {
    let g = load_graph(&config.input)?;
    compute_moments(&g, config)
}

pub fn cmd_bounds(config: &RunConfig) -> Result<BoundReport, CliError> {
    let g = load_graph(&config.input)?;
    let m = compute_moments(&g, config)?;
    let r = config.radius.expect("validated in from_args");
    let report = if m.is_exact() {
        spectral_bounds(&m, r, &config.options)?
    } else {
        robust_bounds(&m, r, &config.options)?
    };
    Ok(report)
}

pub fn cmd_plan(epsilon: f64, delta: f64) -> Result<SamplePlan, CliError> {
    Ok(plan_sample_size(epsilon, delta)?)
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report to `out`.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let text = match cli.command {
        Command::Moments(args) => {
            let config = RunConfig::from_args(CommandKind::Moments, args)?;
            let m = cmd_moments(&config)?;
            match config.format {
                Format::Json => to_json(&m),
                Format::Csv => moments_csv(&m)?,
            }
        }
        Command::Bounds(args) => {
            let config = RunConfig::from_args(CommandKind::Bounds, args)?;
            let report = cmd_bounds(&config)?;
            match config.format {
                Format::Json => to_json(&report),
                Format::Csv => bounds_csv(&report)?,
            }
        }
        Command::Plan(args) => {
            let plan = cmd_plan(args.epsilon, args.delta)?;
            match args.format {
                Format::Json => to_json(&plan),
                Format::Csv => plan_csv(&plan)?,
            }
        }
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report types serialize to JSON");
    let mut s = String::new();
    write_value(&value, 0, &mut s);
    s.push('\n');
    s
}

fn write_value(v: &Value, indent: usize, s: &mut String) {
    match v {
        Value::Null => s.push_str("null"),
        Value::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => s.push_str(&u.to_string()),
            (None, Some(i), _) => s.push_str(&i.to_string()),
            (None, None, Some(x)) => s.push_str(&format_float(x)),
            _ => s.push_str(&n.to_string()),
        },
        Value::String(text) => s.push_str(&Value::String(text.clone()).to_string()),
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                s.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    write_value(item, indent, s);
                }
                s.push(']');
                return;
            }
            s.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                push_indent(indent + 1, s);
                write_value(item, indent + 1, s);
                s.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            push_indent(indent, s);
            s.push(']');
        }
        Value::Object(map) => {
            s.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                push_indent(indent + 1, s);
                s.push_str(&Value::String(key.clone()).to_string());
                s.push_str(": ");
                write_value(item, indent + 1, s);
                s.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            push_indent(indent, s);
            s.push('}');
        }
    }
}

fn push_indent(level: usize, s: &mut String) {
    for _ in 0..level {
        s.push_str("  ");
    }
}

/// Shortest-trailing-zero rendering with 17 significant digits: positional
/// for decimal exponents in `[-5, 17)`, scientific otherwise. Non-finite
/// values become `null`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };

    if !(-5..17).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() { "0" } else { tail };
        return format!("{sign}{head}.{tail}e{exp}");
    }
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let point = exp as usize + 1;
        if digits.len() > point {
            format!("{}.{}", &digits[..point], &digits[point..])
        } else {
            format!("{}{}.0", digits, "0".repeat(point - digits.len()))
        }
    };
    format!("{sign}{body}")
}

fn csv_text(rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

fn moments_csv(m: &MomentSequence) -> Result<String, CliError> {
    let mut rows = vec![vec!["k".into(), "value".into(), "half_width".into(), "provenance".into()]];
    for k in 0..=m.max_order() {
        let provenance = serde_json::to_value(m.provenance()[k]).expect("provenance serializes");
        rows.push(vec![
            k.to_string(),
            format_float(m.value(k)),
            format_float(m.half_widths()[k]),
            provenance.as_str().unwrap_or_default().to_string(),
        ]);
    }
    csv_text(rows)
}

fn bounds_csv(report: &BoundReport) -> Result<String, CliError> {
    csv_text(vec![
        vec!["lower".into(), "upper".into(), "r".into(), "confidence".into(), "status".into()],
        vec![
            format_float(report.lower),
            format_float(report.upper),
            report.r.to_string(),
            format_float(report.confidence),
            report.diagnostics.status.clone(),
        ],
    ])
}

fn plan_csv(plan: &SamplePlan) -> Result<String, CliError> {
    csv_text(vec![
        vec!["epsilon".into(), "delta".into(), "samples".into()],
        vec![format_float(plan.epsilon), format_float(plan.delta), plan.samples.to_string()],
    ])
}
