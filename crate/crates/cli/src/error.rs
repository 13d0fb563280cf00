use thiserror::Error;

use quintiq::expr::ParseError;
use quintiq::QuadError;

use crate::config::Precision;

pub const EXIT_PARSE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_IO: u8 = 74;
/// Usage and configuration errors; clap's own default (2) would collide
/// with the domain-error code.
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot parse --fn: {}\n  {text}\n  {}", error.message, caret(text, error))]
    Parse { text: String, error: ParseError },

    #[error("{0}")]
    Domain(QuadError),

    #[error("{0}")]
    Budget(QuadError),

    #[error(
        "tolerance {eps} is below what {precision} precision can resolve (smallest eps about {floor}); \
         try --precision dd or --precision mp:DIGITS"
    )]
    BelowFloor { eps: String, floor: String, precision: Precision },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn caret(text: &str, error: &ParseError) -> String {
    let start = text.get(..error.span.start).map_or(error.span.start, |s| s.chars().count());
    let width = text.get(error.span.start..error.span.end).map_or(1, |s| s.chars().count()).max(1);
    format!("{}{}", " ".repeat(start), "^".repeat(width))
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Budget(_) | CliError::BelowFloor { .. } => EXIT_BUDGET,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::Integrand { .. } | QuadError::NotDifferentiable(_) => CliError::Domain(e),
            QuadError::BudgetExceeded { .. } => CliError::Budget(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}
