use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rotation matrix: {0}")]
    InvalidRotation(String),

    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),

    #[error("ray direction is not unit length (|d| = {0})")]
    NonUnitDirection(f64),

    #[error("pixel ({0}, {1}) outside image bounds")]
    PixelOutOfRange(usize, usize),

    #[error("non-finite density encountered during compositing")]
    NonFiniteDensity,

    #[error("invalid camera: {0}")]
    InvalidCamera(String),

    #[error("not enough recovered poses for {0}")]
    NotEnoughPoses(String),

    #[error("degenerate pose geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid field definition: {0}")]
    InvalidField(String),

    #[error("unknown blend strategy '{0}'")]
    UnknownStrategy(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config { line, msg: msg.into() }
    }
}
