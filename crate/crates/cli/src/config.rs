use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use quintiq::scalar::{default_mp_digits, parse_decimal_ratio, MIN_MP_DIGITS};
use quintiq::{Method, SearchStrategy, DEFAULT_N_MAX};

use crate::error::CliError;

pub const PRECISION_ENV: &str = "QUINTIQ_PRECISION";

/// Scalar mode for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    DoubleDouble,
    /// Arbitrary precision with this many significant decimal digits.
    Mp(usize),
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" | "f64" => Ok(Precision::Double),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            "mp" => Ok(Precision::Mp(default_mp_digits())),
            other => {
                let digits = other
                    .strip_prefix("mp:")
                    .ok_or_else(|| format!("unknown precision `{s}` (expected double, dd or mp:DIGITS)"))?;
                let digits: usize = digits.parse().map_err(|_| format!("invalid digit count in `{s}`"))?;
                if digits < MIN_MP_DIGITS {
                    return Err(format!("mp precision needs at least {MIN_MP_DIGITS} digits, got {digits}"));
                }
                Ok(Precision::Mp(digits))
            }
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Double => f.write_str("double"),
            Precision::DoubleDouble => f.write_str("dd"),
            Precision::Mp(d) => write!(f, "mp:{d}"),
        }
    }
}

impl Serialize for Precision {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    /// Gauss3/Lobatto4, for 5-convex or 5-concave integrands.
    #[default]
    Quintic,
    /// Chebyshev3/Simpson, for 3-convex or 3-concave integrands.
    Cubic,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Quintic => Method::Quintic,
            MethodArg::Cubic => Method::Cubic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    /// n = 1, 2, 3, ...
    #[default]
    Linear,
    /// Double n, then bisect the last step.
    Doubling,
}

impl From<StrategyArg> for SearchStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Linear => SearchStrategy::LinearMinimal,
            StrategyArg::Doubling => SearchStrategy::DoublingBisect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Human,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "quintiq", version, about = "Adaptive Gauss/Lobatto quadrature with a guaranteed stopping rule")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate an expression until |L_n - G_n| <= 4 eps.
    Integrate(IntegrateArgs),
    /// Sampled n-convexity check of an expression.
    Check(CheckArgs),
    /// Subdivisions needed for the integral of 1/x over [1, 2], eps = 1e-1 .. 1e-16.
    Experiment1(ExperimentArgs),
    /// Subdivisions needed for the integral of exp(x) over [0, b], b = 1 .. 10, eps = 1e-8.
    Experiment2(ExperimentArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// double, dd or mp:DIGITS.
    #[arg(long, env = PRECISION_ENV)]
    pub precision: Option<Precision>,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct IntegrateArgs {
    /// Integrand in x, e.g. "plus(x-0.6)^7".
    #[arg(long = "fn", allow_hyphen_values = true)]
    pub fn_text: String,
    /// Left endpoint, decimal
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Right endpoint, decimal
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    /// Absolute tolerance, decimal
    #[arg(long)]
    pub eps: String,
    #[arg(long, value_enum, default_value_t)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t)]
    pub strategy: StrategyArg,
    /// Largest subdivision count to try
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Attach a sampled convexity report for the method's class.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long = "fn", allow_hyphen_values = true)]
    pub fn_text: String,
    /// Left endpoint, decimal
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Right endpoint, decimal
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    /// Convexity order; defaults to 5 for quintic and 3 for cubic.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Grid intervals for the symbolic derivative scan.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum, default_value_t)]
    pub strategy: StrategyArg,
    /// Largest subdivision count to try
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Integrate,
    Check,
    Experiment1,
    Experiment2,
}

/// Options that only apply to `check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckOptions {
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    pub grid: usize,
}

/// A validated run. Integrand fields are empty for the experiment commands,
/// whose problems are fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(rename = "fn")]
    pub fn_text: String,
    pub a: String,
    pub b: String,
    pub eps: String,
    pub method: MethodArg,
    pub strategy: StrategyArg,
    pub precision: Precision,
    pub output: OutputFormat,
    pub n_max: usize,
    pub verify: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckOptions>,
}

/// Exact endpoints and tolerance parsed from a [`RunConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub a: BigRational,
    pub b: BigRational,
    pub eps: Option<BigRational>,
}

fn parse_real(name: &str, text: &str) -> Result<BigRational, CliError> {
    parse_decimal_ratio(text).ok_or_else(|| CliError::Usage(format!("--{name}: `{text}` is not a decimal number")))
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self, CliError> {
        let config = match command {
            Command::Integrate(args) => RunConfig {
                command: CommandKind::Integrate,
                fn_text: args.fn_text.clone(),
                a: args.a.clone(),
                b: args.b.clone(),
                eps: args.eps.clone(),
                method: args.method,
                strategy: args.strategy,
                precision: args.out.precision.unwrap_or(Precision::Double),
                output: args.out.output,
                n_max: args.n_max,
                verify: args.verify,
                check: None,
            },
            Command::Check(args) => RunConfig {
                command: CommandKind::Check,
                fn_text: args.fn_text.clone(),
                a: args.a.clone(),
                b: args.b.clone(),
                eps: String::new(),
                method: args.method,
                strategy: StrategyArg::default(),
                precision: args.out.precision.unwrap_or(Precision::Double),
                output: args.out.output,
                n_max: DEFAULT_N_MAX,
                verify: false,
                check: Some(CheckOptions {
                    order: args.order.unwrap_or_else(|| Method::from(args.method).convexity_order()),
                    samples: args.samples,
                    seed: args.seed,
                    grid: args.grid,
                }),
            },
            Command::Experiment1(args) | Command::Experiment2(args) => RunConfig {
                command: if matches!(command, Command::Experiment1(_)) {
                    CommandKind::Experiment1
                } else {
                    CommandKind::Experiment2
                },
                fn_text: String::new(),
                a: String::new(),
                b: String::new(),
                eps: String::new(),
                method: MethodArg::default(),
                strategy: args.strategy,
                precision: args.out.precision.unwrap_or(Precision::DoubleDouble),
                output: args.out.output,
                n_max: args.n_max,
                verify: false,
                check: None,
            },
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Precision::Mp(d) = self.precision {
            if d < MIN_MP_DIGITS {
                return Err(CliError::Usage(format!("mp precision needs at least {MIN_MP_DIGITS} digits")));
            }
        }
        if self.n_max == 0 {
            return Err(CliError::Usage("--n-max must be at least 1".to_string()));
        }
        if let Some(c) = &self.check {
            if c.order == 0 || c.samples == 0 || c.grid == 0 {
                return Err(CliError::Usage("--order, --samples and --grid must be positive".to_string()));
            }
        }
        match self.command {
            CommandKind::Integrate | CommandKind::Check => self.problem().map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Parses the endpoints and tolerance exactly.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let a = parse_real("a", &self.a)?;
        let b = parse_real("b", &self.b)?;
        if a >= b {
            return Err(CliError::Usage(format!("need a < b, got a = {}, b = {}", self.a, self.b)));
        }
        let eps = if self.command == CommandKind::Integrate {
            let eps = parse_real("eps", &self.eps)?;
            if eps <= BigRational::zero() {
                return Err(CliError::Usage(format!("--eps must be positive, got {}", self.eps)));
            }
            Some(eps)
        } else {
            None
        };
        Ok(Problem { a, b, eps })
    }
}
