use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("depth {requested} exceeds the depth cap {cap}")]
    DepthCap { requested: u32, cap: u32 },

    #[error("sequence truncated: block {block} is not materialized")]
    Truncated { block: u32 },

    #[error("no nonempty block in the estimation window")]
    UndefinedEstimate,

    #[error("nesting property {property} fails at level {level}, prefix {prefix:?}")]
    Nesting { property: u8, level: u32, prefix: Vec<u8> },

    #[error("conditioning event never observed in {trials} trials")]
    InsufficientSamples { trials: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("target set is empty at depth {depth}")]
    DegenerateTarget { depth: u32 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("out of theory: {0}")]
    OutOfTheory(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }

    /// Whether the error stems from user input rather than execution.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidArgument(_) | Error::OutOfTheory(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
