use thiserror::Error;

use tactical_lp::LpError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("pair (due day {due_day}, work day {work_day}) is outside the pull-forward window")]
    PairOutOfWindow { due_day: usize, work_day: usize },
    #[error("intake {value} on day {day} outside [0, {max}]")]
    IntakeOutOfRange { day: usize, value: u32, max: u32 },
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("size of {what} overflows")]
    Overflow { what: &'static str },
    #[error("{what} has {size} elements, above the cap of {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },
    #[error("no samples supplied")]
    EmptySamples,
    #[error("estimate {value} on day {day} lies on the boundary; clamp it into (0, 1) first")]
    BoundaryEstimate { day: usize, value: f64 },
    #[error("ambiguity set is empty")]
    EmptyAmbiguitySet,
    #[error("no intake has probability above beta = {beta}")]
    EmptyReducedSet { beta: f64 },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("{context}: {source}")]
    Csv { context: String, source: csv::Error },
    #[error("schema mismatch: {0}")]
    Schema(String),
}

impl Error {
    /// Validation problems (bad input) as opposed to solver failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Solver(_) | Error::Lp(_) | Error::Io { .. } | Error::Csv { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
