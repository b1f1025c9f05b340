//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violated its domain (range, finiteness, sign).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The design matrix is rank deficient.
    #[error("singular design matrix: {0}")]
    SingularDesign(String),

    /// Fewer observations than the operation requires.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An operation required a 0/1 group column and did not get one.
    #[error("covariate `{0}` is not a 0/1 group indicator")]
    NonBinaryCovariate(String),

    /// A covariance matrix failed its positive semi-definiteness check.
    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    /// A resampling estimator could not be computed; carries the cause.
    #[error("estimation failed ({context})")]
    EstimationFailed {
        context: String,
        #[source]
        source: Box<Error>,
    },

    /// Malformed input data (CSV schema, missing cells, bad columns).
    #[error("data error: {0}")]
    Data(String),

    /// Malformed scenario or study configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap a failure that happened while computing an estimate.
    pub fn estimation_failed(context: impl Into<String>, source: Error) -> Self {
        Error::EstimationFailed {
            context: context.into(),
            source: Box::new(source),
        }
    }
}
