//! Growth-model fits on envelopes and verdicts against predictions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples in a fit window.
pub const MIN_SAMPLES: usize = 50;
/// Minimum ratio `t_hi / t_lo` of a fit window (two decades).
pub const MIN_SPAN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitModel {
    /// `ln r ≈ c·ln t`
    Polynomial,
    /// `ln r ≈ c·t^power`
    StretchedExponential { power: f64 },
    /// Zero crossings drift as `c·ln t`.
    LogPhase,
    /// `r` stays within a band around its median; the estimate is the band half-width.
    Bounded,
}

impl FitModel {
    pub fn label(&self) -> &'static str {
        match self {
            FitModel::Polynomial => "polynomial",
            FitModel::StretchedExponential { .. } => "stretched_exponential",
            FitModel::LogPhase => "log_phase",
            FitModel::Bounded => "bounded",
        }
    }

    fn same_kind(&self, other: &FitModel) -> bool {
        match (self, other) {
            (FitModel::StretchedExponential { power: a }, FitModel::StretchedExponential { power: b }) => (a - b).abs() < 1e-12,
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFit {
    pub model: FitModel,
    pub estimate: f64,
    pub std_error: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`; returns `(slope, intercept, stderr(slope))`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, intercept, se)
}

fn windowed(t: &[f64], r: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("invalid fit window ({lo}, {hi})")));
    }
    if hi / lo < MIN_SPAN {
        return Err(Error::InsufficientSpan(format!("window ({lo}, {hi}) spans less than two decades")));
    }
    let (ts, rs): (Vec<f64>, Vec<f64>) = t.iter().zip(r).filter(|(t, _)| **t >= lo && **t <= hi).map(|(a, b)| (*a, *b)).unzip();
    if ts.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSpan(format!("{} samples in window, need {MIN_SAMPLES}", ts.len())));
    }
    // recorded times land on step ends, so allow a small shortfall at either edge
    let covered = ts[ts.len() - 1] / ts[0];
    if covered < 0.95 * MIN_SPAN {
        return Err(Error::InsufficientSpan(format!("samples cover only a factor {covered:.1} in t")));
    }
    Ok((ts, rs))
}

/// Fits an envelope `r(t)` over `window`.
pub fn fit_growth(t: &[f64], r: &[f64], model: FitModel, window: (f64, f64)) -> Result<OracleFit> {
    let (ts, rs) = windowed(t, r, window)?;
    if rs.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidParameter("envelope must be positive and finite".into()));
    }
    let samples = ts.len();
    let (estimate, std_error) = match model {
        FitModel::Polynomial => {
            let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
            let y: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
            let (s, _, se) = linear_regression(&x, &y);
            (s, se)
        }
        FitModel::StretchedExponential { power } => {
            let x: Vec<f64> = ts.iter().map(|t| t.powf(power)).collect();
            let y: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
            let (s, _, se) = linear_regression(&x, &y);
            (s, se)
        }
        FitModel::Bounded => {
            let mut sorted = rs.clone();
            sorted.sort_by(f64::total_cmp);
            let median = sorted[sorted.len() / 2];
            (rs.iter().map(|r| (r / median - 1.0).abs()).fold(0.0, f64::max), 0.0)
        }
        FitModel::LogPhase => {
            return Err(Error::ModelMismatch("log-phase drift is fitted from zero crossings".into()));
        }
    };
    Ok(OracleFit { model, estimate, std_error, window, samples })
}

/// Fits `d_n = π/2 + nπ − t_n ≈ γ·ln t_n + c` to consecutive zero crossings.
pub fn fit_phase_drift(crossings: &[f64], window: (f64, f64)) -> Result<OracleFit> {
    let dummy = vec![1.0; crossings.len()];
    let (ts, _) = windowed(crossings, &dummy, window)?;
    let pi = std::f64::consts::PI;
    // consecutive crossings are ~π apart; count them to keep the branch continuous
    let mut n = 0.0;
    let mut d = Vec::with_capacity(ts.len());
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            n += ((t - ts[i - 1]) / pi).round();
        }
        d.push(pi / 2.0 + n * pi - t);
    }
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let (s, _, se) = linear_regression(&x, &d);
    Ok(OracleFit { model: FitModel::LogPhase, estimate: s, std_error: se, window, samples: ts.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Confirmed,
    Rejected,
    Inconclusive,
}

/// A predicted model parameter and the tolerance it is held to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedValue {
    pub model: FitModel,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub predicted: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub deviation: f64,
    pub allowed: f64,
}

/// Confirmed when `|fit − predicted| ≤ max(3·stderr, tolerance)`; for
/// boundedness, when the envelope band stays within the tolerance.
pub fn compare_prediction(predicted: &PredictedValue, fit: &OracleFit) -> Result<Comparison> {
    if !predicted.model.same_kind(&fit.model) {
        return Err(Error::ModelMismatch(format!("predicted {:?}, fitted {:?}", predicted.model, fit.model)));
    }
    let (deviation, allowed) = match fit.model {
        FitModel::Bounded => (fit.estimate, predicted.tolerance),
        _ => ((fit.estimate - predicted.value).abs(), (3.0 * fit.std_error).max(predicted.tolerance)),
    };
    let verdict = if deviation <= allowed { Verdict::Confirmed } else { Verdict::Rejected };
    Ok(Comparison { verdict, predicted: predicted.value, estimate: fit.estimate, std_error: fit.std_error, deviation, allowed })
}

/// Comparison for a fit that may have failed for lack of data.
pub fn verdict_for(predicted: &PredictedValue, fit: &Result<OracleFit>) -> Result<Option<Comparison>> {
    match fit {
        Ok(f) => compare_prediction(predicted, f).map(Some),
        Err(Error::InsufficientSpan(_)) => Ok(None),
        Err(e) => Err(e.clone()),
    }
}
