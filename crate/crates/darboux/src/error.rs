//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside non-periodic axis range [{lo}, {hi}] on axis {axis}")]
    OutOfDomain { axis: char, value: f64, lo: f64, hi: f64 },

    #[error("degenerate chart at (u={u}, v={v}): |x_u x x_v| = {cross_norm} <= {epsilon}")]
    DegenerateChart { u: f64, v: f64, cross_norm: f64, epsilon: f64 },

    #[error("degenerate curve: speed {speed} at sample {index}")]
    DegenerateCurve { index: usize, speed: f64 },

    #[error("tangent not orthogonal to surface normal at sample {index}: <T,n> = {dot} (tolerance {tolerance}); sampling is inconsistent with the chart")]
    NonTangentCurve { index: usize, dot: f64, tolerance: f64 },

    #[error("curvature below {epsilon} at sample {index}: Frenet data undefined there")]
    VanishingCurvature { index: usize, epsilon: f64 },

    #[error("family normal map not adapted at (u={u}, t={t}): relative <du alpha, n> = {dot}")]
    AdaptednessViolation { u: f64, t: f64, dot: f64 },

    #[error("operation requires a unit-speed family; '{family}' does not claim arclength-uniform sampling")]
    RequiresUnitSpeed { family: String },

    #[error("closed-curve compatibility violated: loop integral of the tangential speed source is {loop_integral} (limit {limit})")]
    ClosureIncompatible { loop_integral: f64, limit: f64 },

    #[error("cannot balance the side speed: loop integral of v*k_g is {denominator}, too close to zero")]
    BalanceImpossible { denominator: f64 },

    #[error("velocity is not tangent to the surface: relative normal component {dot}")]
    NonTangentialVelocity { dot: f64 },

    #[error("arclength drift {drift} exceeded tolerance {tolerance} at step {step}")]
    DriftExceeded { step: usize, drift: f64, tolerance: f64 },

    #[error("no snapshots to render")]
    EmptyTrajectory,

    #[error("verification failed: {failures} of {total} checks off expectation")]
    VerificationFailed { failures: usize, total: usize },

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid config field '{field}': {message}")]
    Validation { field: String, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code contract: 2 validation, 3 numeric failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation { .. } | Error::Usage(_) => 2,
            Error::Io(_) => 4,
            _ => 3,
        }
    }
}
