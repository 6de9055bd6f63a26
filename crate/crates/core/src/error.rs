use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("relation has dimension {dim}, expected {n}")]
    NotDimN { dim: usize, n: usize },
    #[error("pencil is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("pencil is singular")]
    Singular,
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    #[error("unknown example id `{0}`")]
    UnknownExample(String),
    #[error("unknown assumption combination: {0}")]
    UnknownAssumptions(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("value {0} is not rational within the rationalization tolerance")]
    NonRational(String),
}

impl Error {
    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Shape(_) | Error::Schema(_) | Error::UnknownExample(_) => 1,
            Error::NonRational(_) => 3,
            _ => 2,
        }
    }
}
