use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Momentum outside the propagating window `|p| <= k`.
    #[error("momentum {p} lies outside the propagating range [-{k}, {k}]")]
    Domain { p: f64, k: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// An input is well formed but lacks something an operation needs,
    /// e.g. a second derivative from a table that is too short.
    #[error("capability: {0}")]
    Capability(String),

    #[error("angle {theta} is within the grazing margin |cos(theta)| < {margin}")]
    Grazing { theta: f64, margin: f64 },

    #[error("integration produced non-finite values after {step} of {slices} slices")]
    Integration { step: usize, slices: usize },

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {estimate:e} after {subdivisions} subdivisions")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        subdivisions: usize,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Integration { .. } | Error::Quadrature { .. })
    }
}
