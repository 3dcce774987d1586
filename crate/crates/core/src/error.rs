use thiserror::Error;

/// Errors raised by the energy model and the trace pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid duty cycle: {0}")]
    InvalidDutyCycle(String),

    #[error("invalid power profile: {0}")]
    InvalidProfile(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("negative idle gap: {0} ms")]
    NegativeGap(f64),

    /// The phases of one cycle do not fit in the application period.
    #[error("period overrun: cycle exceeds the application period by {deficit_ms:.3} ms")]
    PeriodOverrun { deficit_ms: f64 },

    #[error("edge and cloud scenarios differ in `{0}`; only `rtt` may differ")]
    ScenarioMismatch(&'static str),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid cost specification: {0}")]
    InvalidCost(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("incomplete exchange: {0}")]
    IncompleteExchange(String),

    #[error("events are not sorted by timestamp (index {index})")]
    UnsortedEvents { index: usize },

    #[error("event at index {index} lies outside the accounting window")]
    OutsideWindow { index: usize },

    #[error("mismatched iterations: {0}")]
    MismatchedIterations(String),

    #[error("empty group: {0}")]
    EmptyGroup(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
