use thiserror::Error;

/// Errors raised by the wboot library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("sample value at position {index} is not finite ({value})")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("weight vector has length {weights} but the sample has {sample} observations")]
    LengthMismatch { weights: usize, sample: usize },

    #[error("grid is not sorted ascending (position {index})")]
    UnsortedGrid { index: usize },

    #[error("cdf returned {value} at t = {at}, outside [0, 1]")]
    CdfOutOfRange { at: f64, value: f64 },

    #[error("weight scheme `{scheme}` is not supported here: {reason}")]
    UnsupportedScheme { scheme: String, reason: String },

    #[error("weight generator produced a non-positive draw Z = {value}")]
    NonPositiveDraw { value: f64 },

    #[error("two-point scheme violates E(Z^2) = 2: support {{{a}, {b}}} gives p = {p} and E(Z^2) = {second_moment}")]
    MomentViolation { a: f64, b: f64, p: f64, second_moment: f64 },

    #[error("custom weight generator `{name}` failed moment validation: mean {mean} (se {se_mean}), second moment {second_moment} (se {se_second})")]
    CustomMomentsRejected {
        name: String,
        mean: f64,
        se_mean: f64,
        second_moment: f64,
        se_second: f64,
    },

    #[error("grid is malformed: {0}")]
    MalformedGrid(String),

    #[error("grid too coarse: spacing {spacing} exceeds the required {required}")]
    CoarseGrid { spacing: f64, required: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed data at line {line}: {reason}")]
    MalformedData { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
