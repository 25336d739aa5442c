//! Direct integration of the oscillator checked against its predicted asymptotics.

use serde::{Deserialize, Serialize};

use super::envelope::{amplitude_envelope, spectral_envelope, Envelope, ZeroCrossings};
use super::fit::{fit_growth, fit_phase_drift, verdict_for, Comparison, FitModel, OracleFit, PredictedValue, Verdict};
use super::rk::{integrate_observed, IntegrateOptions, Recording, StepStats};
use crate::asymptotics::GrowthClass;
use crate::error::Result;
use crate::oscillator::{OscillatorCase, Phase};
use crate::rational::Rational;

/// `(y, y')` coefficient of `y'' + (1 + t^{-α} sin λt) y = 0`, row-major.
pub fn oscillator_coefficient(lambda: f64, alpha: f64) -> impl FnMut(f64, &mut [f64]) + Clone {
    move |t, c| {
        c[0] = 0.0;
        c[1] = 1.0;
        c[2] = -(1.0 + t.powf(-alpha) * (lambda * t).sin());
        c[3] = 0.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifySettings {
    pub rtol: f64,
    pub atol: f64,
    pub t0: f64,
    /// End of integration; model default when `None`.
    pub horizon: Option<f64>,
    /// Fit window; model default when `None`.
    pub window: Option<(f64, f64)>,
    /// Acceptance tolerance; model default when `None`.
    pub tolerance: Option<f64>,
    /// Envelope samples per decade.
    pub per_decade: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings { rtol: 1e-10, atol: 1e-12, t0: 1.0, horizon: None, window: None, tolerance: None, per_decade: 400 }
    }
}

/// What the oracle should measure for a case, with its default tolerance.
pub fn predicted_target(case: &OscillatorCase) -> PredictedValue {
    let classes = case.prediction.growth_classes();
    let growing = classes
        .iter()
        .filter(|c| !c.is_bounded())
        .max_by(|a, b| a.parameter().total_cmp(&b.parameter()));
    match growing {
        Some(GrowthClass::Polynomial { exponent }) => {
            PredictedValue { model: FitModel::Polynomial, value: *exponent, tolerance: 0.03 }
        }
        Some(GrowthClass::StretchedExponential { coeff, power }) => {
            let p = power.to_f64();
            let value = coeff / p;
            PredictedValue { model: FitModel::StretchedExponential { power: p }, value, tolerance: 0.1 * value.abs() }
        }
        _ => {
            let drift = case.solution_forms.iter().find_map(|f| match f.phase {
                Phase::LogDrift { gamma } => Some(gamma),
                _ => None,
            });
            match drift {
                Some(g) => PredictedValue { model: FitModel::LogPhase, value: g, tolerance: 0.05 * g.abs() },
                None => PredictedValue { model: FitModel::Bounded, value: 0.0, tolerance: 0.1 },
            }
        }
    }
}

/// Integration horizon by model: long for slow polynomial growth, short for
/// stretched exponentials, which leave floating range quickly.
pub fn default_horizon(target: &PredictedValue) -> f64 {
    match target.model {
        FitModel::Polynomial if target.value < 0.15 => 1e6,
        FitModel::StretchedExponential { .. } => 1e4,
        _ => 1e5,
    }
}

/// Fit window ending at the horizon and spanning at least two decades,
/// skipping the first decade after `t0`.
pub fn default_window(target: &PredictedValue, horizon: f64, t0: f64) -> (f64, f64) {
    let preferred = match target.model {
        FitModel::Polynomial => 1e3 * t0,
        _ => 1e2 * t0,
    };
    (preferred.min(horizon / 100.0).max(10.0 * t0), horizon)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub lambda: Rational,
    pub alpha: Rational,
    pub target: PredictedValue,
    pub horizon: f64,
    pub window: (f64, f64),
    pub fit: Option<OracleFit>,
    pub comparison: Option<Comparison>,
    pub verdict: Verdict,
    pub stats: StepStats,
    /// `max |det X − 1| / max(1, ‖X‖²)` over recorded states.
    pub wronskian_drift: f64,
    #[serde(skip)]
    pub envelope: Envelope,
}

/// Integrates the case from `X(t0) = I` and compares the fitted envelope or
/// phase drift against the prediction.
pub fn verify_oscillator(case: &OscillatorCase, settings: &VerifySettings) -> Result<VerifyOutcome> {
    let mut target = predicted_target(case);
    if let Some(tol) = settings.tolerance {
        target.tolerance = tol;
    }
    let horizon = settings.horizon.unwrap_or_else(|| default_horizon(&target));
    let window = settings.window.unwrap_or_else(|| default_window(&target, horizon, settings.t0));
    let opts = IntegrateOptions {
        rtol: settings.rtol,
        atol: settings.atol,
        recording: Recording::LogSpaced { per_decade: settings.per_decade },
        ..IntegrateOptions::default()
    };
    let coefficient = oscillator_coefficient(case.lambda.to_f64(), case.alpha.to_f64());
    let mut crossings = ZeroCrossings::new(0, window.0);
    let track_phase = target.model == FitModel::LogPhase;
    let result = integrate_observed(coefficient, 2, settings.t0, horizon, &opts, |step| {
        if track_phase {
            crossings.observe(step);
        }
    })?;
    let envelope = amplitude_envelope(&result);
    let fit = match target.model {
        FitModel::LogPhase => fit_phase_drift(&crossings.times, window),
        FitModel::Bounded => bounded_fit(&envelope, window),
        model => fit_growth(&envelope.t, &spectral_envelope(&result), model, window),
    };
    let comparison = verdict_for(&target, &fit)?;
    let verdict = comparison.as_ref().map_or(Verdict::Inconclusive, |c| c.verdict);
    let wronskian_drift = result
        .states
        .iter()
        .map(|x| (x.determinant() - 1.0).abs() / x.norm_squared().max(1.0))
        .fold(0.0, f64::max);
    Ok(VerifyOutcome {
        lambda: case.lambda.clone(),
        alpha: case.alpha.clone(),
        target,
        horizon,
        window,
        fit: fit.ok(),
        comparison,
        verdict,
        stats: result.stats,
        wronskian_drift,
        envelope,
    })
}

/// Boundedness of every column: the widest band wins.
fn bounded_fit(envelope: &Envelope, window: (f64, f64)) -> Result<OracleFit> {
    let mut worst: Option<OracleFit> = None;
    for c in &envelope.columns {
        let f = fit_growth(&envelope.t, c, FitModel::Bounded, window)?;
        if worst.as_ref().is_none_or(|w| f.estimate > w.estimate) {
            worst = Some(f);
        }
    }
    Ok(worst.expect("at least one column"))
}
