use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid parameters outside their admissible range.
    InvalidGrid(&'static str),
    /// Contact angle not in `(0, π)` (equivalently `cos θ ∉ (−1, 1)`).
    InvalidAngle(f64),
    /// A field value or intermediate quantity is NaN or infinite.
    NonFinite {
        /// Flat node index where the value was found.
        node: usize,
    },
    /// The radial graph representation broke down: `ρ ≤ 0` or
    /// `ḡ(X_{n+1}, ν) ≤ 0` at some node.
    StarShapednessLost {
        /// Flat node index.
        node: usize,
        /// Polar angle of the node.
        beta: f64,
        /// Offending value (`ρ` or the support function).
        value: f64,
    },
    /// The operation needs axisymmetric data.
    AxisymmetricOnly(&'static str),
    /// Generic argument range violation.
    InvalidArgument(&'static str),
    /// An iterative routine did not reach its tolerance.
    NoConvergence(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidAngle(c) => {
                write!(
                    f,
                    "contact angle out of range: cos(theta) = {c} not in (-1, 1)"
                )
            }
            Error::NonFinite { node } => write!(f, "non-finite value at node {node}"),
            Error::StarShapednessLost { node, beta, value } => write!(
                f,
                "star-shapedness lost at node {node} (beta = {beta:.6}): value {value:e}"
            ),
            Error::AxisymmetricOnly(op) => write!(f, "{op} requires an axisymmetric grid"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
