use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("input does not match the {dialect} dialect: {reason}")]
    DialectMismatch { dialect: String, reason: String },

    #[error("nodes {a} and {b} are not connected on level {level}")]
    IllegalPair { a: usize, b: usize, level: u8 },

    #[error("illegal position {position} in route {route}")]
    IllegalPosition { route: usize, position: usize },

    #[error("customer {0} is not routed")]
    NotRouted(usize),

    #[error("customer {0} is already routed")]
    AlreadyRouted(usize),

    #[error("repair could not place customer {customer} even with demand-sorted insertion")]
    Unrepairable { customer: usize },

    #[error("first level cannot carry the satellite throughput with the available trucks")]
    LevelOneInfeasible,

    #[error("instance is infeasible: {0}")]
    InfeasibleInstance(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("invalid parameter: {0}")]
    Params(String),

    #[error("unknown operator toggle `{0}`")]
    UnknownToggle(String),

    #[error("solution file: {0}")]
    SolutionFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn malformed(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            line,
            column,
            message: message.into(),
        }
    }
}
