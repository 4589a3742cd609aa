use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("tested column `{0}` is constant")]
    ConstantTestedColumn(String),
    #[error("nuisance block is rank deficient")]
    RankDeficient,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("response value {value} at row {row} is invalid for the {family} family")]
    InvalidResponse {
        row: usize,
        value: f64,
        family: &'static str,
    },
    #[error("family {0} cannot be used as a fitting target")]
    UnsupportedFamily(&'static str),
    #[error("IRLS did not converge after {0} iterations")]
    NotConverged(usize),
    #[error("fitted mean left the valid range")]
    InvalidMean,
    #[error("matrix is numerically singular (condition estimate {0:.3e})")]
    Singular(f64),
    #[error("matrix is not positive semi-definite")]
    NotPsd,
    #[error("flip plan: {0}")]
    Plan(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Numerical failures (as opposed to bad user input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged(_)
                | Error::InvalidMean
                | Error::Singular(_)
                | Error::NotPsd
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
