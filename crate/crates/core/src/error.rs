use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: a repertoire needs at least one entry")]
    Empty,
    #[error("zero total frequency: at least one entry must have frequency > 0")]
    ZeroTotalFrequency,
    #[error("nonpositive magnitude {magnitude} for entry `{id}`")]
    NonpositiveMagnitude { id: String, magnitude: f64 },
    #[error("non-finite magnitude for entry `{id}`")]
    NonFiniteMagnitude { id: String },
    #[error("invalid frequency {frequency} for entry `{id}` (must be finite and >= 0)")]
    InvalidFrequency { id: String, frequency: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("need at least {required} types, got {actual}")]
    TooFewTypes { required: usize, actual: usize },
    #[error("index {index} out of range for a repertoire of {len} types")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("swap indices must differ (got {0} twice)")]
    SameIndex(usize),
    #[error("{0} contain ties; the closed-form swap derivative needs tie-free input, use swap_delta_nc_general")]
    TiesPresent(&'static str),
    #[error("exhaustive enumeration needs V <= {cap}, got V = {v}")]
    ExhaustiveCapExceeded { v: usize, cap: usize },
    #[error("statistic {0} is undefined for the observed data (zero variance)")]
    UndefinedStatistic(&'static str),
    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
