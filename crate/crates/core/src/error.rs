use thiserror::Error;

/// Errors raised by geometry, integration, frame and polarization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-extreme Kerr requires M > a >= 0 (got M = {mass}, a = {spin})")]
    InvalidKerrParams { mass: f64, spin: f64 },

    #[error("point r = {r} is not outside the outer horizon r+ = {r_plus}")]
    InsideHorizon { r: f64, r_plus: f64 },

    #[error("polar angle {theta} outside [0, pi]")]
    PolarAngleOutOfRange { theta: f64 },

    #[error("nonzero axial angular momentum Phi = {phi} on the symmetry axis")]
    AxisWithAngularMomentum { phi: f64 },

    #[error("operation requires 0 < theta < pi (got theta = {theta})")]
    OnAxis { theta: f64 },

    #[error("state outside the allowed region: {which} = {value}")]
    ForbiddenRegion { which: &'static str, value: f64 },

    #[error("Carter constant kappa = {kappa} too small for frame construction")]
    DegenerateCarter { kappa: f64 },

    #[error("measurement basis undefined at s = {s}: {reason}")]
    BasisUndefined { s: f64, reason: &'static str },

    #[error("critical-point residual indeterminate near a turning point ({which} = {value})")]
    TurningPointProximity { which: &'static str, value: f64 },

    #[error("integration stalled at s = {s} (step size {step})")]
    StalledOrbit { s: f64, step: f64 },

    #[error("non-finite value encountered at s = {s}")]
    NonFinite { s: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trajectory is not axial: {0}")]
    NotAxial(String),

    #[error("affine parameter {s} outside trajectory span [{start}, {end}]")]
    OutsideTrajectory { s: f64, start: f64, end: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
