//! Composite conditional-gradient (Frank-Wolfe) solver for problems of the
//! form `min f(x) + Ψ(x)`, where `f` is smooth convex and `Ψ` is closed convex
//! with an available linear minimization oracle.
//!
//! The crate is organized around the quantities the method certifies:
//!
//! * [`model`] — problem data types, oracle interfaces, and validation.
//! * [`gap`] — the duality gap, Wolfe gap, Bregman distance, the curve
//!   function `D(x,s,θ)`, and the per-step gap-reduction identity.
//! * [`stepsize`] — exact line search, Armijo backtracking, and an open-loop
//!   baseline schedule.
//! * [`solver`] — the iteration driver with best-gap tracking.
//! * [`problems`] — an instance library with closed-form oracles and known
//!   regularity constants.
//! * [`analysis`] — growth certificates, curvature constants, and
//!   per-iteration convergence envelopes.
//! * [`invariance`] — affine reparametrization harness for paired runs.
//!
//! All numeric code is generic over the scalar type via [`Real`]; concrete
//! `f32`/`f64` aliases live at the crate root.

pub mod analysis;
pub mod gap;
pub mod invariance;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod real;
pub mod solver;
pub mod stepsize;

pub use real::Real;

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A precondition on user-supplied arguments was violated.
    #[error("invalid argument: {0}")]
    Usage(String),
    /// A value was requested outside the domain of `f` or `Ψ`.
    #[error("domain error: {0}")]
    Domain(String),
    /// An oracle returned something analytically impossible (e.g. a strongly
    /// negative Wolfe gap), indicating a broken problem definition.
    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),
    #[error("missing metadata: {0}")]
    MissingMetadata(&'static str),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Vectors are plain dense slices of scalars; see [`linalg`] for operations.
pub type Vector<S> = Vec<S>;

pub type Problem32 = model::Problem<f32>;
pub type Problem64 = model::Problem<f64>;
pub type Trajectory32 = solver::Trajectory<f32>;
pub type Trajectory64 = solver::Trajectory<f64>;
pub type GrowthCertificate64 = analysis::GrowthCertificate<f64>;
pub type RateEnvelope64 = analysis::RateEnvelope<f64>;
