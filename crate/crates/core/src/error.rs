use core::fmt;

/// Errors raised by the solvers. Rank deficiency of an operator is data,
/// not an error, and is reported through [`crate::OpResolution`].
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A quaternion that must be inverted has modulus at or below the
    /// inversion threshold.
    NearZeroQuaternion { modulus: f64, at: Option<f64> },
    /// `e^{qx}` does not solve `Ψ'' = aΨ' + bΨ`; carries `|q² − aq − b|`.
    NotASolution { defect: f64 },
    /// The pair has vanishing Wronskian modulus where independence is needed.
    DependentPair { modulus_squared: f64, at: f64 },
    /// The RK4 state overflowed or became NaN.
    NonFiniteState { at: f64 },
    /// A sampled function was evaluated outside the interval it was built on.
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    /// Caller supplied an argument that cannot be used (e.g. a zero step).
    InvalidArgument(&'static str),
}

impl Error {
    /// Stable name used for CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NearZeroQuaternion { .. } => "NearZeroQuaternion",
            Error::NotASolution { .. } => "NotASolution",
            Error::DependentPair { .. } => "DependentPair",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NearZeroQuaternion { modulus, at: Some(x) } => {
                write!(f, "quaternion with modulus {modulus:e} is not invertible (at x = {x})")
            }
            Error::NearZeroQuaternion { modulus, at: None } => {
                write!(f, "quaternion with modulus {modulus:e} is not invertible")
            }
            Error::NotASolution { defect } => {
                write!(f, "e^(qx) is not a solution: |q^2 - a q - b| = {defect:e}")
            }
            Error::DependentPair { modulus_squared, at } => write!(
                f,
                "solution pair is linearly dependent: |W|^2 = {modulus_squared:e} at x = {at}"
            ),
            Error::NonFiniteState { at } => write!(f, "integration state became non-finite at x = {at}"),
            Error::OutOfDomain { x, lo, hi } => {
                write!(f, "x = {x} lies outside the sampled interval [{lo}, {hi}]")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
