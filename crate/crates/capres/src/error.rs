//! Error type shared by every module of the crate.

use num_complex::Complex64;

/// Errors raised by numerical routines and by input validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An adaptive scheme exhausted its budget without meeting the tolerance.
    #[error("quadrature did not converge: |estimate| = {estimate:.3e}, error bound {error:.3e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    /// A test function was requested with an inadmissible support.
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    /// A configuration value violates its documented invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    DomainError(String),
    /// The evaluation point lies too close to an integration contour.
    #[error("evaluation point {point} lies within {distance:.3e} of the integration contour {contour}")]
    ContourCollision {
        point: Complex64,
        distance: f64,
        contour: String,
    },
    /// The evaluation point lies too close to a pole of a meromorphic function.
    #[error("evaluation point {point} lies within {distance:.3e} of the pole {pole}")]
    PoleProximity {
        point: Complex64,
        pole: Complex64,
        distance: f64,
    },
    /// Two independent computations of the same quantity disagree.
    #[error("cross-check failure: {first} vs {second} (relative difference {relative:.3e})")]
    CrossCheckFailure {
        first: Complex64,
        second: Complex64,
        relative: f64,
    },
    /// A sampling grid cannot resolve the requested transform.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    /// A group element is too close to the singular set of the torus.
    #[error("singular element: |t| = {0:.3e} is below the regularity threshold")]
    SingularElement(f64),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
