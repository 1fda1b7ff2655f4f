use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distributions live on different supports")]
    SupportMismatch,

    #[error("not absolutely continuous: q[{index}] = 0 where p[{index}] > 0")]
    AbsoluteContinuity { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Expectation target outside the closed support range. `min` and `max`
    /// are the only attainable boundary values (both realized by point masses).
    #[error("expectation {epsilon} is infeasible on a support spanning [{min}, {max}]; boundary values are attained only by point masses at {min} and {max}")]
    ConstraintInfeasible { epsilon: f64, min: f64, max: f64 },

    #[error("sum table for n = {n} would need {entries} entries")]
    TableTooLarge { n: usize, entries: usize },

    #[error("conditioning on a measure-zero event: sum {target_sum} is not attainable with n = {n}")]
    EmptyConditioningEvent { n: usize, target_sum: i64 },

    #[error("no sequence out of {draws} draws hit the window; the event is too rare for rejection, use the tilted conditioner")]
    NoSurvivors { draws: u64 },

    #[error("importance weights degenerate: effective sample size {ess:.3} < {min}")]
    UnstableEstimate { ess: f64, min: f64 },

    #[error("evidence grids differ")]
    GridMismatch,

    #[error("linear system is infeasible (phase-one residual {residual:e})")]
    Infeasible { residual: f64, certificate: Vec<f64> },

    #[error("numerical failure: {message}")]
    NumericalFailure { message: String, trace: Vec<String> },
}

impl Error {
    pub(crate) fn numerical(message: impl Into<String>) -> Self {
        Error::NumericalFailure { message: message.into(), trace: Vec::new() }
    }
}
