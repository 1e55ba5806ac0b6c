use thiserror::Error;

/// Errors raised by the numerical core and the run orchestration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:e} exceeds {tolerance:e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },

    #[error("non-finite derivative at t = {time}")]
    NonFiniteDerivative { time: f64 },

    #[error("Simpson quadrature needs at least 3 samples, got {0}")]
    TooFewSamples(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state layout mismatch: expected {expected} elements, got {actual}")]
    LayoutMismatch { expected: usize, actual: usize },

    #[error("coupling table is not symmetric at ({row}, {col})")]
    AsymmetricTable { row: usize, col: usize },

    #[error("all {0} trajectories failed")]
    AllTrajectoriesFailed(usize),

    #[error("{failed} of {total} trajectories failed (limit {limit}); reduce the time step")]
    TooManyFailures { failed: usize, total: usize, limit: usize },

    #[error("frequency quadrature did not converge: last change {change:e} after {n_omega} points")]
    QuadratureNotConverged { change: f64, n_omega: usize },

    #[error("kernel table covers t <= {covered}, propagation requires t = {requested}")]
    KernelRangeExceeded { covered: f64, requested: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("time {time} is not a point of the series grid")]
    OffGrid { time: f64 },

    #[error("time-averaged norm rate vanishes; the state is frozen and the QSL time is undefined")]
    ZeroDenominator,

    #[error("coupling table override has shape {rows}x{cols}, expected 7x7")]
    OverrideShapeMismatch { rows: usize, cols: usize },

    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{coordinate}: {source}")]
    AtSweepPoint {
        coordinate: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for configuration problems (as opposed to numerical failures).
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::OverrideShapeMismatch { .. }
            | Error::AsymmetricTable { .. } => true,
            Error::AtSweepPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
