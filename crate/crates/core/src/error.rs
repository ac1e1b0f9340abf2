use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid density evaluation: {0}")]
    InvalidDensity(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("layout mismatch: {0}")]
    Layout(String),
    #[error("fixed-point iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("non-finite gradient at {0:?}")]
    NonFiniteGradient(Vec<f64>),
    #[error("state space too large: {0} states (limit {1})")]
    StateSpaceTooLarge(usize, usize),
    #[error("successor outside the enumerated state space: {0}")]
    UnknownState(String),
    #[error("auxiliary conditional `{0}` cannot be enumerated")]
    NotEnumerable(String),
    #[error("degenerate series: {0}")]
    Degenerate(String),
    #[error("guaranteed acceptance violated in `{kernel}`: probability {prob}")]
    AcceptanceGuarantee { kernel: String, prob: f64 },
    #[error("data error at row {row}: {msg}")]
    Data { row: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
