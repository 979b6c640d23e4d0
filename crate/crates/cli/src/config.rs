use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use pqapprox_core::convergence::DEFAULT_GRID;
use pqapprox_core::{corpus, Mode, PQParams, Rational, VERSION};
use serde::Deserialize;

use crate::table::format_f64;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eval,
    Moments,
    RecurrenceCheck,
    Converge,
    Voronovskaja,
    Constants,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Moments => "moments",
            Command::RecurrenceCheck => "recurrence-check",
            Command::Converge => "converge",
            Command::Voronovskaja => "voronovskaja",
            Command::Constants => "constants",
        }
    }

    fn default_n_list(self) -> Vec<u32> {
        match self {
            Command::Eval => vec![10],
            Command::Moments => vec![5],
            Command::RecurrenceCheck => (2..=6).collect(),
            Command::Voronovskaja => vec![16, 64, 256],
            Command::Converge | Command::Constants => vec![16, 32, 64, 128, 256],
        }
    }

    fn default_m(self) -> u32 {
        match self {
            Command::RecurrenceCheck | Command::Constants => 4,
            _ => 2,
        }
    }

    fn float_only(self) -> bool {
        matches!(self, Command::Converge | Command::Voronovskaja | Command::Constants)
    }

    fn rational_only(self) -> bool {
        matches!(self, Command::Moments | Command::RecurrenceCheck)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Fixed,
    OneMinusReciprocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Float,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Revised (p,q)-Bernstein operator experiments.
///
/// Exit codes: 0 success, 1 computation failure, 2 usage error.
#[derive(Debug, Parser)]
#[command(name = "pqapprox", version, about)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Operator degree(s), comma separated
    #[arg(long, value_name = "N[,N...]")]
    pub n: Option<String>,

    /// Alias of --n
    #[arg(long = "n-list", value_name = "N[,N...]", conflicts_with = "n")]
    pub n_list: Option<String>,

    /// p as num/den, an integer, or (float mode only) a decimal
    #[arg(long)]
    pub p: Option<String>,

    /// q as num/den, an integer, or (float mode only) a decimal
    #[arg(long)]
    pub q: Option<String>,

    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,

    /// Order of the Taylor-corrected operator
    #[arg(long)]
    pub r: Option<usize>,

    /// Moment order (an upper bound for recurrence-check and constants)
    #[arg(long)]
    pub m: Option<u32>,

    /// Corpus function: one, t, t2, t3, sin, exp, abs, sqrt-abs
    #[arg(long)]
    pub function: Option<String>,

    /// Number of grid cells on [0, 1]
    #[arg(long)]
    pub grid: Option<usize>,

    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,

    #[arg(long, value_enum)]
    pub output: Option<Format>,

    /// Write the table here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Also write a gnuplot script next to the CSV
    #[arg(long)]
    pub plot: bool,

    /// TOML file with defaults for any of the flags above
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NListInput {
    One(u32),
    Many(Vec<u32>),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumberInput {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    n: Option<NListInput>,
    n_list: Option<NListInput>,
    p: Option<NumberInput>,
    q: Option<NumberInput>,
    scheme: Option<SchemeArg>,
    r: Option<usize>,
    m: Option<u32>,
    function: Option<String>,
    grid: Option<usize>,
    mode: Option<ModeArg>,
    output: Option<Format>,
    out: Option<PathBuf>,
    plot: Option<bool>,
}

/// A parameter value as typed: exact when given as an integer or `num/den`.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(Rational),
    Decimal(f64),
}

impl Number {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        let bad = || CliError::Usage(format!("cannot parse number {text:?}"));
        if let Some((num, den)) = text.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(CliError::Usage(format!("zero denominator in {text:?}")));
            }
            return Ok(Number::Exact(Rational::new(num, den)));
        }
        if let Ok(int) = text.parse::<BigInt>() {
            return Ok(Number::Exact(Rational::from_integer(int)));
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Number::Decimal(v)),
            _ => Err(bad()),
        }
    }

    fn from_input(input: NumberInput) -> Result<Self, CliError> {
        match input {
            NumberInput::Int(i) => Ok(Number::Exact(Rational::from_integer(i.into()))),
            NumberInput::Float(v) => Ok(Number::Decimal(v)),
            NumberInput::Text(s) => Number::parse(&s),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
            Number::Decimal(v) => *v,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Decimal(v) => f.write_str(&format_f64(*v)),
        }
    }
}

/// Where `(p, q)` comes from for each degree `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamPlan {
    Fixed { p: Number, q: Number },
    /// `p_n = 1 - 1/(n+1)`, `q_n = 1 - 1/n`
    OneMinusReciprocal,
}

impl ParamPlan {
    pub fn float_at(&self, n: u32) -> pqapprox_core::Result<PQParams<f64>> {
        match self {
            ParamPlan::Fixed { p, q } => PQParams::new(p.to_f64(), q.to_f64()),
            ParamPlan::OneMinusReciprocal => {
                let n = f64::from(n);
                PQParams::new(1.0 - 1.0 / (n + 1.0), 1.0 - 1.0 / n)
            }
        }
    }

    /// Only valid for exact inputs; [`resolve`] rejects decimals up front.
    pub fn rational_at(&self, n: u32) -> pqapprox_core::Result<PQParams<Rational>> {
        match self {
            ParamPlan::Fixed {
                p: Number::Exact(p),
                q: Number::Exact(q),
            } => PQParams::new(p.clone(), q.clone()),
            ParamPlan::Fixed { p, q } => Err(pqapprox_core::Error::InvalidParams {
                p: p.to_string(),
                q: q.to_string(),
            }),
            ParamPlan::OneMinusReciprocal => {
                let n = i64::from(n);
                PQParams::new(
                    Rational::new(n.into(), (n + 1).into()),
                    Rational::new((n - 1).into(), n.into()),
                )
            }
        }
    }

    pub fn scheme_name(&self) -> &'static str {
        match self {
            ParamPlan::Fixed { .. } => "fixed",
            ParamPlan::OneMinusReciprocal => "one-minus-reciprocal",
        }
    }
}

/// The validated, fully defaulted plan for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n_list: Vec<u32>,
    pub params: ParamPlan,
    pub r: usize,
    pub m: u32,
    pub function: String,
    pub grid: usize,
    pub mode: Mode,
    pub output: Format,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

impl RunConfig {
    /// The effective configuration as it appears in table metadata. Output
    /// destinations are left out so that the same plan written to two
    /// places produces identical bytes.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut meta = BTreeMap::new();
        let n_list: Vec<String> = self.n_list.iter().map(u32::to_string).collect();
        meta.insert("command".into(), self.command.name().into());
        meta.insert("n".into(), n_list.join(","));
        meta.insert("scheme".into(), self.params.scheme_name().into());
        if let ParamPlan::Fixed { p, q } = &self.params {
            meta.insert("p".into(), p.to_string());
            meta.insert("q".into(), q.to_string());
        }
        meta.insert("r".into(), self.r.to_string());
        meta.insert("m".into(), self.m.to_string());
        meta.insert("function".into(), self.function.clone());
        meta.insert("grid".into(), self.grid.to_string());
        meta.insert("mode".into(), self.mode.to_string());
        meta.insert("output".into(), self.output.name().into());
        meta.insert("version".into(), VERSION.into());
        meta
    }
}

/// Parse argv (program name first) without exiting the process.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    resolve(cli)
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

fn parse_n_list(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("bad degree {s:?} in n list {text:?}")))
        })
        .collect()
}

fn n_from_input(input: NListInput) -> Result<Vec<u32>, CliError> {
    match input {
        NListInput::One(n) => Ok(vec![n]),
        NListInput::Many(v) => Ok(v),
        NListInput::Text(s) => parse_n_list(&s),
    }
}

/// Merge flags over the config file, inject defaults and validate
/// everything that can be checked before computing.
pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => read_file(path)?,
        None => FileConfig::default(),
    };
    let command = cli.command;
    let usage = |msg: String| CliError::Usage(msg);

    let n_list = match (cli.n.or(cli.n_list), file.n.or(file.n_list)) {
        (Some(flag), _) => parse_n_list(&flag)?,
        (None, Some(from_file)) => n_from_input(from_file)?,
        (None, None) => command.default_n_list(),
    };
    let mut n_list = n_list;
    n_list.sort_unstable();
    n_list.dedup();
    if n_list.is_empty() {
        return Err(usage("the n list is empty".into()));
    }
    if n_list[0] == 0 {
        return Err(usage("degrees must be at least 1".into()));
    }

    let mode = match cli.mode.or(file.mode) {
        _ if command.rational_only() => Mode::Rational,
        Some(ModeArg::Rational) if command.float_only() => {
            return Err(usage(format!("{} runs in float mode only", command.name())));
        }
        Some(ModeArg::Rational) => Mode::Rational,
        Some(ModeArg::Float) | None => Mode::Float,
    };

    let p = cli.p.map(|s| Number::parse(&s)).or_else(|| file.p.map(Number::from_input)).transpose()?;
    let q = cli.q.map(|s| Number::parse(&s)).or_else(|| file.q.map(Number::from_input)).transpose()?;
    let scheme = cli.scheme.or(file.scheme);
    let params = match (scheme, p, q) {
        (Some(SchemeArg::OneMinusReciprocal), None, None) => ParamPlan::OneMinusReciprocal,
        (Some(SchemeArg::OneMinusReciprocal), _, _) => {
            return Err(usage("--p/--q cannot be combined with --scheme one-minus-reciprocal".into()));
        }
        (_, Some(p), Some(q)) => ParamPlan::Fixed { p, q },
        (None, None, None) if matches!(command, Command::Converge | Command::Voronovskaja) => {
            ParamPlan::OneMinusReciprocal
        }
        _ => return Err(usage("both --p and --q are required for a fixed scheme".into())),
    };
    if mode == Mode::Rational {
        if let ParamPlan::Fixed { p, q } = &params {
            for (name, v) in [("p", p), ("q", q)] {
                if let Number::Decimal(_) = v {
                    return Err(usage(format!(
                        "--{name} {v} is a decimal; rational mode needs num/den input"
                    )));
                }
            }
        }
    }
    for &n in &n_list {
        let checked = match mode {
            Mode::Float => params.float_at(n).map(|_| ()),
            Mode::Rational => params.rational_at(n).map(|_| ()),
        };
        checked.map_err(|e| usage(format!("n={n}: {e}")))?;
    }

    let function = cli.function.or(file.function).unwrap_or_else(|| "sin".into());
    let bundle = corpus::lookup(&function).ok_or_else(|| {
        usage(format!(
            "unknown function {function:?}; expected one of {}",
            corpus::NAMES.join(", ")
        ))
    })?;
    let r = cli.r.or(file.r).unwrap_or(0);
    if matches!(command, Command::Eval | Command::Converge) && r > bundle.r_max() {
        return Err(usage(format!(
            "--r {r} exceeds the {} derivatives available for {function}",
            bundle.r_max()
        )));
    }
    if command == Command::Voronovskaja && bundle.r_max() < 2 {
        return Err(usage(format!("voronovskaja needs a twice differentiable function, {function} is not")));
    }
    if command == Command::Eval && mode == Mode::Rational && corpus::polynomial(&function).is_none() {
        return Err(usage(format!("{function} has no exact form; use --mode float")));
    }

    let m = cli.m.or(file.m).unwrap_or_else(|| command.default_m());
    if m == 0 {
        return Err(usage("--m must be at least 1".into()));
    }
    let grid = cli.grid.or(file.grid).unwrap_or(DEFAULT_GRID);
    if grid == 0 {
        return Err(usage("--grid must be at least 1".into()));
    }

    let output = cli.output.or(file.output).unwrap_or(Format::Csv);
    let out = cli.out.or(file.out);
    let plot = cli.plot || file.plot.unwrap_or(false);
    if plot {
        if output != Format::Csv || out.is_none() {
            return Err(usage("--plot needs --output csv and --out PATH".into()));
        }
        if matches!(command, Command::Moments | Command::RecurrenceCheck) {
            return Err(usage(format!("--plot is not available for {}", command.name())));
        }
    }

    Ok(RunConfig {
        command,
        n_list,
        params,
        r,
        m,
        function,
        grid,
        mode,
        output,
        out,
        plot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunConfig, CliError> {
        parse_config(std::iter::once("pqapprox").chain(args.split_whitespace()))
    }

    #[test]
    fn converge_example_maps_directly() {
        let c = parse("converge --function sin --r 1 --scheme one-minus-reciprocal --n 16,32,64").unwrap();
        assert_eq!(c.command, Command::Converge);
        assert_eq!(c.n_list, vec![16, 32, 64]);
        assert_eq!(c.params, ParamPlan::OneMinusReciprocal);
        assert_eq!((c.r, c.grid, c.mode), (1, 1024, Mode::Float));
    }

    #[test]
    fn q_not_below_p_is_a_usage_error() {
        let err = parse("eval --q 0.9 --p 0.8").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn identity_commands_force_rational() {
        let c = parse("recurrence-check --n 5 --m 3 --p 3/4 --q 1/2").unwrap();
        assert_eq!(c.mode, Mode::Rational);
        let c = parse("moments --n 5 --m 3 --p 3/4 --q 1/2 --mode float").unwrap();
        assert_eq!(c.mode, Mode::Rational);
    }

    #[test]
    fn decimals_rejected_in_rational_mode() {
        assert!(parse("moments --p 0.75 --q 1/2").is_err());
        assert!(parse("eval --function t2 --mode rational --p 1 --q 0.5").is_err());
        assert!(parse("eval --function t2 --mode float --p 1 --q 0.5").is_ok());
    }

    #[test]
    fn number_parsing() {
        assert_eq!(Number::parse("3/4").unwrap().to_string(), "3/4");
        assert_eq!(Number::parse("6/8").unwrap().to_string(), "3/4");
        assert_eq!(Number::parse("1").unwrap().to_string(), "1/1");
        assert_eq!(Number::parse("0.5").unwrap(), Number::Decimal(0.5));
        assert!(Number::parse("1/0").is_err());
        assert!(Number::parse("half").is_err());
    }

    #[test]
    fn n_lists_sorted_and_deduplicated() {
        let c = parse("converge --n 64,16,64,32").unwrap();
        assert_eq!(c.n_list, vec![16, 32, 64]);
        assert!(parse("converge --n 0,4").is_err());
        assert!(parse("converge --n 4 --n-list 8").is_err());
    }

    #[test]
    fn reciprocal_scheme_needs_n_at_least_two() {
        assert!(parse("converge --n 1,4").is_err());
    }

    #[test]
    fn plot_constraints() {
        assert!(parse("converge --plot").is_err());
        assert!(parse("converge --plot --out x.csv --output json").is_err());
        assert!(parse("converge --plot --out x.csv").is_ok());
    }
}
