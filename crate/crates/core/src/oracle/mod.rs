//! Independent numerical checks: direct integration, envelope fits, verdicts.

pub mod envelope;
pub mod fit;
pub mod rk;
pub mod verify;

pub use envelope::{amplitude_envelope, spectral_envelope, Envelope, ZeroCrossings};
pub use fit::{compare_prediction, fit_growth, fit_phase_drift, Comparison, FitModel, OracleFit, PredictedValue, Verdict};
pub use rk::{integrate_complex_system, integrate_observed, integrate_system, IntegrateOptions, IntegrationResult, Recording, StepStats};
pub use verify::{oscillator_coefficient, verify_oscillator, VerifyOutcome, VerifySettings};
