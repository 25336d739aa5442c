//! Leading-order asymptotics of `y' = (Σ_{j=0}^k t^{-jα} A_j) y`.
//!
//! With `A_l` the first nonzero averaged matrix and distinct eigenvalues, the
//! fundamental matrix behaves like `(P + o(1)) exp ∫_{t*}^t Λ(s) ds`, where `P`
//! holds the eigenvectors of `A_l` and `Λ(t)` the eigenvalues of
//! `Σ_{j≥l} t^{-jα} A_j`. Only the leading envelope and phase are predicted;
//! the `o(1)` factor is not.
//!
//! Eigenvalue curves are tracked in the scaled variable
//! `t^{lα} Σ_{j≥l} t^{-jα} A_j = A_l + Σ_{j>l} t^{-(j-l)α} A_j`, which tends to
//! `A_l` as `t → ∞`; ordering is fixed by matching against the eigenvalues of
//! `A_l` and then carried by nearest-neighbour continuation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::AveragedSystem;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::matrix::QMatrix;
use crate::quad;
use crate::rational::Rational;

/// Relative eigenvalue gap below which the distinct-eigenvalue hypothesis is refused.
pub const DISTINCT_TOL: f64 = 1e-8;

/// Growth of one mode of the fundamental matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthClass {
    /// Envelope tends to a constant.
    Bounded,
    /// Envelope `t^exponent`.
    Polynomial { exponent: f64 },
    /// Envelope `exp(coeff · t^power / power)`.
    StretchedExponential { coeff: f64, power: Rational },
    /// Unit envelope with phase drift `gamma · ln t`.
    LogPhase { gamma: f64 },
}

impl GrowthClass {
    pub fn label(&self) -> &'static str {
        match self {
            GrowthClass::Bounded => "bounded",
            GrowthClass::Polynomial { .. } => "polynomial",
            GrowthClass::StretchedExponential { .. } => "stretched_exponential",
            GrowthClass::LogPhase { .. } => "log_phase",
        }
    }

    /// The characteristic number of the class (exponent, coefficient, drift rate; 0 if bounded).
    pub fn parameter(&self) -> f64 {
        match self {
            GrowthClass::Bounded => 0.0,
            GrowthClass::Polynomial { exponent } => *exponent,
            GrowthClass::StretchedExponential { coeff, .. } => *coeff,
            GrowthClass::LogPhase { gamma } => *gamma,
        }
    }

    /// Envelope stays bounded (includes pure phase drift).
    pub fn is_bounded(&self) -> bool {
        match self {
            GrowthClass::Bounded | GrowthClass::LogPhase { .. } => true,
            GrowthClass::Polynomial { exponent } => *exponent <= 0.0,
            GrowthClass::StretchedExponential { coeff, .. } => *coeff <= 0.0,
        }
    }
}

/// Index of the first nonzero averaged matrix.
pub fn leading_index(averaged: &[QMatrix]) -> Option<usize> {
    averaged.iter().position(|m| !m.is_zero())
}

/// Floating eigen-decomposition of `A_l`, refused when two eigenvalues are
/// closer than `tol · ‖A_l‖_F`.
///
/// Eigenvalues are ordered by decreasing real part, then decreasing imaginary
/// part; each eigenvector is scaled so its largest component is real positive.
pub fn eigen_decompose_leading(a_l: &QMatrix, tol: f64) -> Result<(Vec<Complex64>, CMatrix)> {
    let m = a_l.to_c64();
    let norm = m.norm();
    if norm == 0.0 {
        return Err(Error::AllAveragedZero);
    }
    let (values, vectors) = linalg::eigen(&m);
    let n = values.len();
    let gap = min_gap(&values);
    if n > 1 && gap < tol * norm {
        return Err(Error::RepeatedEigenvalues { gap, threshold: tol * norm });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (values[a], values[b]);
        y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im))
    });
    let mut p = CMatrix::zeros(n, n);
    let mut sorted = Vec::with_capacity(n);
    for (col, &i) in order.iter().enumerate() {
        let v = vectors.column(i);
        let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        p.set_column(col, &(v * phase));
        sorted.push(values[i]);
    }
    Ok((sorted, p))
}

fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

/// `A_l + Σ_{j>l} t^{-(j-l)α} A_j` in floating point.
fn scaled_sum(averaged: &[CMatrix], alpha: f64, l: usize, t: f64) -> CMatrix {
    let mut m = averaged[l].clone();
    for (j, a) in averaged.iter().enumerate().skip(l + 1) {
        m += a * Complex64::from(t.powf(-((j - l) as f64) * alpha));
    }
    m
}

/// Orders `candidates` against `reference` by nearest neighbour.
///
/// Every candidate must fall within half the smallest reference gap of a
/// distinct reference value; otherwise the match is ambiguous.
fn match_to(reference: &[Complex64], candidates: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = reference.len();
    if n == 1 {
        return Some(candidates.to_vec());
    }
    let radius = 0.5 * min_gap(reference);
    let mut out = vec![None; n];
    for c in candidates {
        let (best, d) = reference
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (c - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if d >= radius || out[best].is_some() {
            return None;
        }
        out[best] = Some(*c);
    }
    out.into_iter().collect()
}

/// Eigenvalues of `Σ_{j≥l} t^{-jα} A_j` at `t`.
///
/// With `previous` (the scaled curve values of a nearby earlier sample, i.e.
/// `t^{lα}Λ`), the result is ordered by continuity against it; otherwise
/// against the eigenvalue order of `A_l`.
pub fn lambda_curves(
    averaged: &[QMatrix],
    alpha: &Rational,
    l: usize,
    t: f64,
    previous: Option<&[Complex64]>,
) -> Result<Vec<Complex64>> {
    let Some(previous) = previous else {
        let pred = predict_from(averaged, alpha, 1.0)?;
        if pred.leading_index != l {
            return Err(Error::InvalidParameter(format!("grade {l} is not the leading nonzero average")));
        }
        return pred.curves_at(t);
    };
    let mats: Vec<CMatrix> = averaged.iter().map(QMatrix::to_c64).collect();
    let a = alpha.to_f64();
    let scaled = scaled_eigen(&mats, a, l, t, previous)?;
    let w = t.powf(-(l as f64) * a);
    Ok(scaled.into_iter().map(|z| z * w).collect())
}

fn scaled_eigen(mats: &[CMatrix], alpha: f64, l: usize, t: f64, reference: &[Complex64]) -> Result<Vec<Complex64>> {
    let values = linalg::eigenvalues(&scaled_sum(mats, alpha, l, t));
    match_to(reference, &values).ok_or(Error::TrackingAmbiguous(t))
}

/// Scaled eigenvalue curves tracked along an increasing time grid.
#[derive(Debug, Clone)]
pub struct TrackedCurves {
    pub ts: Vec<f64>,
    /// `values[i][m]`: scaled eigenvalue of mode `m` at `ts[i]`.
    pub values: Vec<Vec<Complex64>>,
}

impl TrackedCurves {
    /// Largest jump between consecutive samples, over all modes.
    pub fn max_jump(&self) -> f64 {
        self.values
            .windows(2)
            .flat_map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max)
    }
}

/// Everything Theorem-2-style prediction needs, plus the predicted classes.
#[derive(Debug, Clone)]
pub struct AsymptoticPrediction {
    pub leading_index: usize,
    pub alpha: Rational,
    /// Eigenvalues of `A_l`, in the order of the columns of `p_matrix`.
    pub eigenvalues: Vec<Complex64>,
    pub p_matrix: CMatrix,
    pub t_star: f64,
    pub growth: Vec<GrowthClass>,
    averaged: Vec<QMatrix>,
    mats: Vec<CMatrix>,
}

impl AsymptoticPrediction {
    /// `lα`.
    pub fn leading_power(&self) -> Rational {
        &self.alpha * &Rational::from_integer(self.leading_index as i64)
    }

    /// True when every `A_j` with `j > l` vanishes, so `Λ(t) = t^{-lα} eig(A_l)` exactly.
    pub fn is_single_grade(&self) -> bool {
        self.averaged.iter().skip(self.leading_index + 1).all(QMatrix::is_zero)
    }

    pub fn averaged(&self) -> &[QMatrix] {
        &self.averaged
    }

    /// `Λ(t)` in mode order.
    pub fn curves_at(&self, t: f64) -> Result<Vec<Complex64>> {
        let scaled = self.anchored(t)?;
        let w = t.powf(-(self.leading_index as f64) * self.alpha.to_f64());
        Ok(scaled.into_iter().map(|z| z * w).collect())
    }

    /// Time beyond which the corrections `Σ_{j>l} t^{-(j-l)α}‖A_j‖` stay
    /// below a quarter of the smallest eigenvalue gap of `A_l`, so that
    /// matching directly against `eig(A_l)` is unambiguous.
    fn anchor_time(&self) -> f64 {
        let gap = min_gap(&self.eigenvalues);
        let a = self.alpha.to_f64();
        let l = self.leading_index;
        let corr = |t: f64| -> f64 {
            self.mats.iter().enumerate().skip(l + 1).map(|(j, m)| t.powf(-((j - l) as f64) * a) * m.norm()).sum()
        };
        if self.eigenvalues.len() < 2 || corr(1.0) == 0.0 {
            return 0.0;
        }
        let mut t = 1.0;
        while corr(t) > 0.25 * gap && t < 1e300 {
            t *= 2.0;
        }
        t
    }

    /// Scaled eigenvalues at `t`, ordered by continuation from the anchor region.
    fn anchored(&self, t: f64) -> Result<Vec<Complex64>> {
        let a = self.alpha.to_f64();
        let l = self.leading_index;
        let t_anchor = self.anchor_time();
        if t >= t_anchor {
            return scaled_eigen(&self.mats, a, l, t, &self.eigenvalues);
        }
        let mut ts = vec![t_anchor];
        let mut vs = vec![scaled_eigen(&self.mats, a, l, t_anchor, &self.eigenvalues)?];
        // geometric steps of 2 toward t, refined where needed
        let mut s = t_anchor;
        while s > t {
            s = (s / 2.0).max(t);
            self.extend_to(&mut ts, &mut vs, s, 0)?;
        }
        Ok(vs.pop().expect("nonempty"))
    }

    /// Tracks the scaled curves over `ts` (increasing), inserting midpoints
    /// wherever continuation is ambiguous.
    pub fn track(&self, ts: &[f64]) -> Result<TrackedCurves> {
        let Some(&first) = ts.first() else {
            return Ok(TrackedCurves { ts: vec![], values: vec![] });
        };
        let mut out_t = vec![first];
        let mut out_v = vec![self.anchored(first)?];
        for &t in &ts[1..] {
            self.extend_to(&mut out_t, &mut out_v, t, 0)?;
        }
        Ok(TrackedCurves { ts: out_t, values: out_v })
    }

    fn extend_to(&self, ts: &mut Vec<f64>, vs: &mut Vec<Vec<Complex64>>, t: f64, depth: u32) -> Result<()> {
        let a = self.alpha.to_f64();
        let prev_t = *ts.last().expect("seeded");
        let prev = vs.last().expect("seeded").clone();
        match scaled_eigen(&self.mats, a, self.leading_index, t, &prev) {
            Ok(v) => {
                ts.push(t);
                vs.push(v);
                Ok(())
            }
            Err(_) if depth < 40 => {
                let mid = 0.5 * (prev_t + t);
                self.extend_to(ts, vs, mid, depth + 1)?;
                self.extend_to(ts, vs, t, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    /// `∫_{t*}^t Λ_ii(s) ds` per mode: closed form for single-grade systems,
    /// quadrature otherwise.
    pub fn phase(&self, t: f64) -> Result<Vec<Complex64>> {
        if self.is_single_grade() {
            Ok(self.phase_closed_form(t))
        } else {
            self.phase_quadrature(t)
        }
    }

    /// `μ_i ∫_{t*}^t s^{-lα} ds`; only exact for single-grade systems.
    pub fn phase_closed_form(&self, t: f64) -> Vec<Complex64> {
        let p = self.leading_power();
        let g = power_integral(&p, self.t_star, t);
        self.eigenvalues.iter().map(|mu| mu * g).collect()
    }

    /// Gauss–Kronrod quadrature of the tracked curves in `u = ln s`.
    pub fn phase_quadrature(&self, t: f64) -> Result<Vec<Complex64>> {
        if t < self.t_star {
            return Err(Error::InvalidParameter(format!("t = {t} lies below t* = {}", self.t_star)));
        }
        let n = self.eigenvalues.len();
        if t == self.t_star {
            return Ok(vec![Complex64::new(0.0, 0.0); n]);
        }
        let (u0, u1) = (self.t_star.ln(), t.ln());
        let per_decade = 32.0;
        let steps = (((u1 - u0) / std::f64::consts::LN_10) * per_decade).ceil().max(1.0) as usize;
        let grid: Vec<f64> = (0..=steps).map(|i| (u0 + (u1 - u0) * i as f64 / steps as f64).exp()).collect();
        let tracked = self.track(&grid)?;
        let a = self.alpha.to_f64();
        let l = self.leading_index;
        let log_ts: Vec<f64> = tracked.ts.iter().map(|t| t.ln()).collect();
        let integrand = |u: f64| -> Result<Vec<Complex64>> {
            let s = u.exp();
            let i = nearest(&log_ts, u);
            let scaled = scaled_eigen(&self.mats, a, l, s, &tracked.values[i])?;
            let w = s.powf(1.0 - l as f64 * a);
            Ok(scaled.into_iter().map(|z| z * w).collect())
        };
        quad::integrate(integrand, u0, u1, 1e-11, 0.0)
    }

    /// `P · diag(exp ∫_{t*}^t Λ)`.
    pub fn fundamental_matrix(&self, t: f64) -> Result<CMatrix> {
        let phase = self.phase(t)?;
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(phase.len(), phase.iter().map(|z| z.exp())));
        Ok(&self.p_matrix * d)
    }
}

fn nearest(sorted: &[f64], x: f64) -> usize {
    match sorted.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i >= sorted.len() => sorted.len() - 1,
        Err(i) => {
            if (sorted[i] - x).abs() < (x - sorted[i - 1]).abs() {
                i
            } else {
                i - 1
            }
        }
    }
}

/// `∫_{t0}^{t} s^{-p} ds` for `0 ≤ p ≤ 1`.
pub fn power_integral(p: &Rational, t0: f64, t: f64) -> f64 {
    if *p == Rational::one() {
        (t / t0).ln()
    } else {
        let q = 1.0 - p.to_f64();
        (t.powf(q) - t0.powf(q)) / q
    }
}

/// Builds the prediction for an averaged system whose averaged matrices do not all vanish.
pub fn predict(averaged: &AveragedSystem) -> Result<AsymptoticPrediction> {
    predict_from(&averaged.averaged, averaged.alpha(), averaged.t_star)
}

/// As [`predict`], from raw averaged matrices.
pub fn predict_from(averaged: &[QMatrix], alpha: &Rational, t_star: f64) -> Result<AsymptoticPrediction> {
    let l = leading_index(averaged).ok_or(Error::AllAveragedZero)?;
    let (eigenvalues, p_matrix) = eigen_decompose_leading(&averaged[l], DISTINCT_TOL)?;
    let mut pred = AsymptoticPrediction {
        leading_index: l,
        alpha: alpha.clone(),
        eigenvalues,
        p_matrix,
        t_star,
        growth: vec![],
        mats: averaged.iter().map(QMatrix::to_c64).collect(),
        averaged: averaged.to_vec(),
    };
    pred.growth = classify_growth(&pred);
    Ok(pred)
}

/// Per-mode growth class.
///
/// A mode whose leading eigenvalue has nonzero real part grows (or decays)
/// polynomially when `lα = 1` and as a stretched exponential when `lα < 1`.
/// For a purely imaginary leading eigenvalue the first-order corrections
/// `Re (P^{-1} A_j P)_ii`, `j > l`, decide: the first nonzero one with
/// `jα ≤ 1` sets the class the same way; if none exists the envelope is
/// bounded, with a logarithmic phase drift when `lα = 1`.
pub fn classify_growth(pred: &AsymptoticPrediction) -> Vec<GrowthClass> {
    let a = &pred.alpha;
    let l = pred.leading_index;
    let scale = pred.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let p_inv = pred.p_matrix.clone().try_inverse();
    let class_at = |j: usize, re: f64| {
        let power = a * &Rational::from_integer(j as i64);
        if power == Rational::one() {
            GrowthClass::Polynomial { exponent: re }
        } else {
            GrowthClass::StretchedExponential { coeff: re, power: Rational::one() - power }
        }
    };
    pred.eigenvalues
        .iter()
        .enumerate()
        .map(|(i, mu)| {
            if mu.re.abs() > tiny {
                return class_at(l, mu.re);
            }
            if let Some(p_inv) = &p_inv {
                for (j, m) in pred.mats.iter().enumerate().skip(l + 1) {
                    let d = (p_inv * m * &pred.p_matrix)[(i, i)];
                    if d.re.abs() > tiny {
                        return class_at(j, d.re);
                    }
                }
            }
            if pred.leading_power() == Rational::one() && mu.im.abs() > tiny {
                GrowthClass::LogPhase { gamma: mu.im }
            } else {
                GrowthClass::Bounded
            }
        })
        .collect()
}

/// All averaged matrices vanish: the system is an integrable perturbation of
/// `y' = 0`, so the fundamental matrix tends to a constant for every `ε > 0`.
pub fn classify_remainder_dominated(_epsilon: &Rational) -> GrowthClass {
    GrowthClass::Bounded
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn real2(rows: [[Rational; 2]; 2]) -> QMatrix {
        QMatrix::from_real_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn zero() -> Rational {
        q(0, 1)
    }

    #[test]
    fn leading_index_cases() {
        let z = QMatrix::zeros(2);
        let id = QMatrix::identity(2);
        assert_eq!(leading_index(&[id.clone(), z.clone()]), Some(0));
        assert_eq!(leading_index(&[z.clone(), z.clone(), id]), Some(2));
        assert_eq!(leading_index(&[z.clone(), z]), None);
    }

    #[test]
    fn diagonal_leading_matrix() {
        let a = real2([[q(1, 4), zero()], [zero(), q(-1, 4)]]);
        let (vals, p) = eigen_decompose_leading(&a, DISTINCT_TOL).unwrap();
        assert!((vals[0] - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert!((vals[1] - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
        assert!((p - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn lambda_one_leading_matrix() {
        let a = real2([[zero(), q(-5, 24)], [q(-1, 24), zero()]]);
        let (vals, _) = eigen_decompose_leading(&a, DISTINCT_TOL).unwrap();
        let rho = 5f64.sqrt() / 24.0;
        assert!((vals[0].re - rho).abs() < 1e-15 && (vals[1].re + rho).abs() < 1e-15);
    }

    #[test]
    fn rotation_generator_eigenvalues() {
        let c = q(3, 7);
        let a = real2([[zero(), c.clone()], [-c.clone(), zero()]]);
        let (vals, _) = eigen_decompose_leading(&a, DISTINCT_TOL).unwrap();
        let c = c.to_f64();
        assert!((vals[0] - Complex64::new(0.0, c)).norm() < 1e-15);
        assert!((vals[1] - Complex64::new(0.0, -c)).norm() < 1e-15);
    }

    #[test]
    fn repeated_eigenvalues_refused() {
        let a = QMatrix::identity(2);
        assert!(matches!(eigen_decompose_leading(&a, DISTINCT_TOL), Err(Error::RepeatedEigenvalues { .. })));
        // Jordan block
        let j = real2([[q(1, 1), q(1, 1)], [zero(), q(1, 1)]]);
        assert!(eigen_decompose_leading(&j, DISTINCT_TOL).is_err());
    }

    #[test]
    fn single_grade_curves_scale() {
        let a = real2([[q(1, 4), zero()], [zero(), q(-1, 8)]]);
        let averaged = vec![QMatrix::zeros(2), a];
        for t in [1.0, 10.0, 1e4] {
            let c = lambda_curves(&averaged, &q(1, 2), 1, t, None).unwrap();
            assert!((c[0].re - 0.25 / t.sqrt()).abs() < 1e-15);
            assert!((c[1].re + 0.125 / t.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn curve_sum_equals_trace() {
        let averaged = vec![
            QMatrix::zeros(2),
            real2([[q(1, 4), zero()], [zero(), q(-1, 4)]]),
            real2([[q(1, 10), q(-1, 64)], [q(1, 64), q(1, 3)]]),
        ];
        let pred = predict_from(&averaged, &q(1, 2), 1.0).unwrap();
        for t in [1.0, 3.3, 50.0, 1e3, 1e5] {
            let sum: Complex64 = pred.curves_at(t).unwrap().iter().sum();
            let trace = 0.0 / t.sqrt() + (0.1 + 1.0 / 3.0) / t;
            assert!((sum.re - trace).abs() < 1e-10 && sum.im.abs() < 1e-10);
        }
    }

    #[test]
    fn tracking_refinement_halves_jumps() {
        let averaged = vec![
            QMatrix::zeros(2),
            real2([[q(1, 4), zero()], [zero(), q(-1, 4)]]),
            real2([[zero(), q(-1, 64)], [q(1, 64), zero()]]),
        ];
        let pred = predict_from(&averaged, &q(1, 2), 1.0).unwrap();
        let coarse: Vec<f64> = (0..=8).map(|i| 10.0 + i as f64).collect();
        let fine: Vec<f64> = (0..=16).map(|i| 10.0 + 0.5 * i as f64).collect();
        let jc = pred.track(&coarse).unwrap().max_jump();
        let jf = pred.track(&fine).unwrap().max_jump();
        assert!(jf <= 0.6 * jc, "coarse {jc} fine {jf}");
    }

    #[test]
    fn closed_form_and_quadrature_agree_for_single_grade() {
        for (alpha, l) in [(q(1, 1), 1usize), (q(1, 2), 1), (q(1, 3), 2)] {
            let mut averaged = vec![QMatrix::zeros(2); l + 2];
            averaged[l] = real2([[q(1, 5), q(1, 1)], [zero(), q(-1, 3)]]);
            let pred = predict_from(&averaged, &alpha, 2.0).unwrap();
            for t in [2.0, 17.0, 1e3, 1e5] {
                let a = pred.phase_closed_form(t);
                let b = pred.phase_quadrature(t).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).norm() <= 1e-8 * x.norm().max(1e-300), "α={alpha} t={t}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn classes_follow_real_parts() {
        let diag = real2([[q(1, 4), zero()], [zero(), q(-1, 4)]]);
        let p = predict_from(&[QMatrix::zeros(2), diag.clone()], &q(1, 1), 1.0).unwrap();
        assert_eq!(p.growth, vec![GrowthClass::Polynomial { exponent: 0.25 }, GrowthClass::Polynomial { exponent: -0.25 }]);
        let p = predict_from(&[QMatrix::zeros(2), diag, QMatrix::zeros(2)], &q(1, 2), 1.0).unwrap();
        assert_eq!(
            p.growth,
            vec![
                GrowthClass::StretchedExponential { coeff: 0.25, power: q(1, 2) },
                GrowthClass::StretchedExponential { coeff: -0.25, power: q(1, 2) },
            ]
        );
        let rot = real2([[zero(), q(1, 20)], [q(-1, 20), zero()]]);
        let p = predict_from(&[QMatrix::zeros(2), QMatrix::zeros(2), rot], &q(1, 2), 1.0).unwrap();
        assert!(matches!(p.growth[0], GrowthClass::LogPhase { gamma } if (gamma - 0.05).abs() < 1e-15));
        assert!(p.growth.iter().all(GrowthClass::is_bounded));
    }

    #[test]
    fn remainder_dominated_is_bounded_for_any_epsilon() {
        for eps in [q(1, 100), q(1, 2), q(1, 1)] {
            assert_eq!(classify_remainder_dominated(&eps), GrowthClass::Bounded);
        }
    }
}
