use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain of an operation (e.g. projecting the origin).
    Domain(&'static str),
    /// A documented precondition does not hold.
    Precondition {
        what: &'static str,
        /// Offending node, when the input is a field.
        node: Option<usize>,
        value: f64,
    },
    /// Right-hand side of a periodic Poisson problem has nonzero mean.
    Compatibility { mean: f64, tolerance: f64 },
    /// Constraint drift before restoration exceeded the abort threshold.
    Instability { time: f64, drift: f64, threshold: f64 },
    /// A non-finite value appeared in the state.
    NonFinite { time: f64, node: usize },
    /// Invalid solver or grid configuration.
    Config(&'static str),
    /// Two fields live on different grids.
    GridMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precondition { what, node: Some(i), value } => {
                write!(f, "precondition failed at node {i}: {what} (value {value:e})")
            }
            Error::Precondition { what, node: None, value } => {
                write!(f, "precondition failed: {what} (value {value:e})")
            }
            Error::Compatibility { mean, tolerance } => {
                write!(f, "incompatible right-hand side: mean {mean:e} exceeds tolerance {tolerance:e}")
            }
            Error::Instability { time, drift, threshold } => {
                write!(f, "constraint drift {drift:e} exceeds {threshold:e} at t = {time}; reduce dt")
            }
            Error::NonFinite { time, node } => {
                write!(f, "non-finite value at node {node}, t = {time}")
            }
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::GridMismatch => f.write_str("fields live on different grids"),
        }
    }
}

impl core::error::Error for Error {}
