use std::fmt;

/// Failure classes. The CLI maps them onto exit codes, so the split between
/// input problems, regime problems and numerical breakdown matters.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("outside the model's regime: {0}")]
    Regime(String),

    #[error("divergent radial moment <r^{k}> for n={n}, l={l}: requires k >= {bound}")]
    DivergentMoment { n: u32, l: u32, k: i32, bound: i32 },

    #[error("potential is singular on the quiver segment at {point:?}; use the regularized dipole kick integral")]
    SingularPotential { point: [f64; 3] },

    #[error("no open channel: n_max = {n_max} is below the cutoff index n0 = {n0}")]
    EmptyChannels { n_max: u32, n0: u32 },

    #[error("harmonic index n = {n} is below the cutoff index n0 = {n0}")]
    BelowThreshold { n: u32, n0: u32 },

    #[error("near-degenerate shifted levels {a} and {b}: gap {gap:e} below tolerance {tol:e}")]
    Degenerate { a: String, b: String, gap: f64, tol: f64 },

    #[error("eigenvalue crossing: relative gap {gap:e} at t = {time}")]
    Crossing { gap: f64, time: f64 },

    #[error("matrix is not Hermitian at t = {time} (deviation {deviation:e})")]
    NonHermitian { time: f64, deviation: f64 },

    #[error("step size underflow at t = {time}; the problem is too stiff, try a larger epsilon")]
    Stiff { time: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (last estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("eigenvector continuation failed near t = {time}")]
    Continuation { time: f64 },
}

/// Coarse grouping used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// malformed input or parameters
    Validation,
    /// inputs are well formed but outside the model's hypotheses
    Regime,
    /// a numerical method broke down
    Numerical,
}

impl Error {
    #[must_use]
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidInput(_) | Error::NonHermitian { .. } => ErrorClass::Validation,
            Error::Regime(_)
            | Error::DivergentMoment { .. }
            | Error::SingularPotential { .. }
            | Error::EmptyChannels { .. }
            | Error::BelowThreshold { .. }
            | Error::Degenerate { .. }
            | Error::Crossing { .. } => ErrorClass::Regime,
            Error::Stiff { .. } | Error::Quadrature { .. } | Error::Continuation { .. } => ErrorClass::Numerical,
        }
    }

    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidInput(msg.to_string())
    }

    pub(crate) fn regime(msg: impl fmt::Display) -> Self {
        Error::Regime(msg.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
