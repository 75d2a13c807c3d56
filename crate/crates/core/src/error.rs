use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{requested} qubits exceeds the simulator cap of {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("qubit or bit index {index} out of range (size {size})")]
    Index { index: usize, size: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("no ({n}, {m}) code exists: n must not exceed 2^(2^m) - 1 = {limit}")]
    Existence { n: usize, m: usize, limit: usize },

    #[error("codebook optimization failed: best worst-bit success {best} does not exceed 1/2")]
    OptimizationFailure { best: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("objective became non-finite at iteration {iteration}")]
    Divergence { iteration: usize, trace: Vec<f64> },

    #[error("data error: {0}")]
    Data(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
