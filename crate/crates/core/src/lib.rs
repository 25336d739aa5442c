//! Averaging transforms for linear systems with oscillatory decreasing coefficients.
//!
//! A system `x' = (A0 + Σ_j t^{-jα} A_j(t)) x + t^{-(1+δ)} F(t) x`, whose
//! `A_j(t)` are matrix trigonometric polynomials, is reduced by a near-identity
//! change of variables to one whose principal part has constant matrices only.
//! The constant system is then read off for Levinson-type asymptotics, and
//! everything can be checked against direct numerical integration.

pub mod asymptotics;
pub mod averaging;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod oscillator;
mod quad;
pub mod rational;
pub mod series;
pub mod trigpoly;

pub use asymptotics::{AsymptoticPrediction, GrowthClass};
pub use averaging::{average_system, AveragedSystem, Perturbation, SystemSpec};
pub use error::{Error, ParseError, Result};
pub use matrix::QMatrix;
pub use oscillator::{analyze_case, OscillatorCase, ResonanceTag};
pub use rational::{ComplexRational, Rational};
pub use trigpoly::{Frequency, TrigPolyMatrix, TrigPolyTerm};
pub use series::{GradedOscSeries, GradedTerm, RemainderBundle};
