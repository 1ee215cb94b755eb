use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates the invariants of its type.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested sampling range or grid is empty or malformed.
    #[error("invalid range: {0}")]
    InvalidRange(String),

    /// A = B: the running component vanishes and the operation has no
    /// well-defined value. Use the standing-wave diagnostics instead.
    #[error("degenerate amplitudes: operation requires A != B")]
    DegenerateAmplitudes,

    #[error("empty phase-shift family")]
    EmptyFamily,

    #[error("invalid probe point: {0}")]
    InvalidProbe(String),

    #[error("reduced-action gradient vanishes at ({x}, {y})")]
    ZeroGradient { x: f64, y: f64 },

    #[error("nothing to plot: table is empty")]
    EmptyTable,

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad input rather than by the computation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter(_) | Error::InvalidRange(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
