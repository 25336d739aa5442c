use thiserror::Error;

use crate::rational::Rational;

/// Failures while reading exact numbers from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational {0:?} (expected an integer, p/q, or a finite decimal)")]
    Rational(String),
    #[error("malformed complex rational {0:?} (expected a, bi, a+bi or a-bi)")]
    Complex(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("series exponents differ: alpha {left} vs {right}")]
    AlphaMismatch { left: Box<Rational>, right: Box<Rational> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grade constraint kα ≤ 1 < (k+1)α violated: k = {k}, alpha = {alpha}")]
    GradeConstraint { k: usize, alpha: Box<Rational> },

    #[error("evaluation requires t > 0, got {0}")]
    NonPositiveTime(f64),

    #[error("grade 0 of the transform must be the identity polynomial")]
    GradeZeroNotIdentity,

    #[error("constant matrix is not diagonal; reduce it to diagonal form before removing the rotation")]
    NotDiagonal,

    #[error(
        "resonant homological equation at frequency {frequency}: eigenvalues {mu_p} and {mu_q} of the constant matrix satisfy iλ = μp − μq (the constant matrix must have a real spectrum)"
    )]
    Resonance { frequency: Box<Rational>, mu_p: String, mu_q: String },

    #[error("homological right-hand side has a nonzero mean")]
    NonzeroMean,

    #[error("all averaged matrices vanish; use the remainder-dominated classification")]
    AllAveragedZero,

    #[error("leading averaged matrix has nearly repeated eigenvalues (gap {gap:.3e} < threshold {threshold:.3e})")]
    RepeatedEigenvalues { gap: f64, threshold: f64 },

    #[error("eigenvalue curve tracking is ambiguous near t = {0}")]
    TrackingAmbiguous(f64),

    #[error("adaptive quadrature did not reach the requested accuracy on [{lo}, {hi}]")]
    QuadratureFailed { lo: f64, hi: f64 },

    #[error("integration step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("non-finite state encountered at t = {0}")]
    NonFiniteState(f64),

    #[error("insufficient data for a fit: {0}")]
    InsufficientSpan(String),

    #[error("prediction and fit use different models: {0}")]
    ModelMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
