use std::path::PathBuf;

/// Everything that can go wrong between reading prices and writing a report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown ticker: {0}")]
    UnknownTicker(String),
    #[error("malformed price at row {row}, column {column}: {value:?}")]
    MalformedPrice { row: usize, column: String, value: String },
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
    #[error("dates not strictly increasing at {0}")]
    DuplicateDate(String),
    #[error("insufficient history: need at least 2 rows, got {0}")]
    InsufficientHistory(usize),
    #[error("insufficient data for covariance: need at least 2 return rows, got {0}")]
    InsufficientData(usize),
    #[error("negative volatility: {0}")]
    NegativeVolatility(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible budget: {budget} not in 0..={n}")]
    InfeasibleBudget { budget: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("problem too large for exact solver: {0} variables (limit {limit})", limit = crate::encoding::EXACT_SOLVER_MAX_VARS)]
    ProblemTooLarge(usize),

    #[error("qubit count {0} out of range 1..={max}", max = crate::simulator::MAX_QUBITS)]
    QubitCount(usize),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("entanglement needs ≥2 qubits, got {0}")]
    EntanglementTooSmall(usize),
    #[error("unknown config label: {0}")]
    UnknownConfig(String),

    #[error("empty parameter vector")]
    EmptyParameters,
    #[error("parameter index {index} out of range for {len} parameters")]
    ParameterIndex { index: usize, len: usize },

    #[error("risk not in sweep: {0}")]
    RiskNotInSweep(f64),
    #[error("empty report")]
    EmptyReport,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
