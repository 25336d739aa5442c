//! Reduction of `x' = (A0 + Σ_{j=1}^k t^{-jα} A_j(t)) x + t^{-(1+δ)} F(t) x`
//! to `y' = (Σ_{j=0}^k t^{-jα} A_j) y + t^{-(1+ε)} G(t) y`.
//!
//! The change of variables `x = (Σ_j t^{-jα} Y_j(t)) y` is built grade by
//! grade. At grade `j` the constant `A_j` is the mean of
//! `Σ_{l<j} A_{j-l}(t) Y_l(t) − Σ_{0<l<j} Y_l(t) A_{j-l}`, and `Y_j` solves the
//! homological equation `Y_j' − A0 Y_j + Y_j A0 = (that sum) − A_j` one
//! frequency at a time. All of it runs in exact complex-rational arithmetic.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::matrix::QMatrix;
use crate::rational::{ComplexRational, Rational};
use crate::series::{eval_graded_terms, GradedOscSeries, GradedTerm, RemainderBundle};
use crate::trigpoly::{Frequency, TrigPolyMatrix};

/// Decay data of the `t^{-(1+δ)} F(t)` perturbation: only `δ` and `‖F‖ ≤ C` matter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub delta: Rational,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    a0: QMatrix,
    alpha: Rational,
    grades: Vec<TrigPolyMatrix>,
    perturbation: Option<Perturbation>,
}

impl SystemSpec {
    /// Validates dimensions and the grade constraint `0 < kα ≤ 1 < (k+1)α`
    /// with `k = grades.len()`.
    pub fn new(
        a0: QMatrix,
        alpha: Rational,
        grades: Vec<TrigPolyMatrix>,
        perturbation: Option<Perturbation>,
    ) -> Result<Self> {
        let n = a0.dim();
        if n == 0 {
            return Err(Error::InvalidParameter("system dimension must be positive".into()));
        }
        if let Some(bad) = grades.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch { left: n, right: bad.dim() });
        }
        if let Some(p) = &perturbation {
            if !p.delta.is_positive() {
                return Err(Error::InvalidParameter(format!("perturbation delta must be positive, got {}", p.delta)));
            }
            if !(p.bound.is_finite() && p.bound > 0.0) {
                return Err(Error::InvalidParameter(format!("perturbation bound must be positive, got {}", p.bound)));
            }
        }
        let (k, _) = choose_k(&alpha, None)?;
        if k != grades.len() {
            return Err(Error::GradeConstraint { k: grades.len(), alpha: Box::new(alpha) });
        }
        Ok(SystemSpec { a0, alpha, grades, perturbation })
    }

    pub fn a0(&self) -> &QMatrix {
        &self.a0
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    /// Oscillatory grades `A_1(t)..A_k(t)`.
    pub fn grades(&self) -> &[TrigPolyMatrix] {
        &self.grades
    }

    pub fn perturbation(&self) -> Option<&Perturbation> {
        self.perturbation.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.a0.dim()
    }

    pub fn k(&self) -> usize {
        self.grades.len()
    }

    /// Real `A0` and conjugate-symmetric grades.
    pub fn is_real(&self) -> bool {
        self.a0.is_real() && self.grades.iter().all(TrigPolyMatrix::is_real_valued)
    }

    /// The coefficient `A0 + Σ t^{-jα} A_j(t)` as a graded series.
    pub fn coefficient_series(&self) -> GradedOscSeries {
        let mut grades = Vec::with_capacity(self.k() + 1);
        grades.push(TrigPolyMatrix::constant(self.a0.clone()));
        grades.extend(self.grades.iter().cloned());
        GradedOscSeries::new(self.alpha.clone(), grades).expect("validated at construction")
    }

    /// Evaluates the principal coefficient (without `F`) at `t > 0`.
    pub fn eval_coefficient(&self, t: f64) -> Result<CMatrix> {
        self.coefficient_series().eval(t)
    }

    /// Applies [`remove_rotation`] to `A0` and conjugates the grades accordingly.
    pub fn with_rotation_removed(&self) -> Result<(SystemSpec, RotationRemoval)> {
        let rot = remove_rotation(&self.a0)?;
        let grades = self.grades.iter().map(|g| rot.apply(g)).collect();
        let spec = SystemSpec {
            a0: rot.transformed_a0.clone(),
            alpha: self.alpha.clone(),
            grades,
            perturbation: self.perturbation.clone(),
        };
        Ok((spec, rot))
    }
}

/// The unique `k` with `kα ≤ 1 < (k+1)α`, and `ε = min(α, δ, (k+1)α − 1)`.
pub fn choose_k(alpha: &Rational, delta: Option<&Rational>) -> Result<(usize, Rational)> {
    if !alpha.is_positive() || *alpha > Rational::one() {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let k = alpha.recip().floor();
    let k: usize = k.try_into().map_err(|_| Error::InvalidParameter(format!("alpha {alpha} is too small")))?;
    let surplus = alpha * &Rational::from_integer(k as i64 + 1) - Rational::one();
    let mut epsilon = alpha.clone().min(surplus);
    if let Some(d) = delta {
        epsilon = epsilon.min(d.clone());
    }
    Ok((k, epsilon))
}

/// Result of `y = e^{iRt} z` with `R` the imaginary parts of a diagonal `A0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationRemoval {
    /// Diagonal of `R`.
    pub r: Vec<Rational>,
    /// `A0 − iR`, which has a real spectrum.
    pub transformed_a0: QMatrix,
}

impl RotationRemoval {
    /// Frequency added to entry `(p, q)` of every grade: `R_qq − R_pp`.
    pub fn frequency_shift(&self, p: usize, q: usize) -> Rational {
        &self.r[q] - &self.r[p]
    }

    /// `e^{-iRt} M(t) e^{iRt}`.
    pub fn apply(&self, grade: &TrigPolyMatrix) -> TrigPolyMatrix {
        grade.shift_entries(|p, q| self.frequency_shift(p, q))
    }

    pub fn is_identity(&self) -> bool {
        self.r.iter().all(Rational::is_zero)
    }
}

/// Splits the imaginary parts off a diagonal `A0`.
pub fn remove_rotation(a0: &QMatrix) -> Result<RotationRemoval> {
    if !a0.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    let n = a0.dim();
    let r: Vec<Rational> = (0..n).map(|i| a0[(i, i)].im.clone()).collect();
    let mut transformed_a0 = a0.clone();
    for i in 0..n {
        transformed_a0[(i, i)].im = Rational::zero();
    }
    Ok(RotationRemoval { r, transformed_a0 })
}

/// Solves `iλ y − A0 y + y A0 = b` exactly for `λ ≠ 0`.
pub fn solve_sylvester(a0: &QMatrix, lambda: &Frequency, b: &QMatrix) -> Result<QMatrix> {
    if lambda.is_zero() {
        return Err(Error::InvalidParameter("Sylvester solve needs a nonzero frequency".into()));
    }
    a0.same_dim(b)?;
    if a0.is_diagonal() {
        solve_sylvester_diagonal(a0, lambda, b)
    } else {
        solve_sylvester_dense(a0, lambda, b)
    }
}

fn solve_sylvester_diagonal(a0: &QMatrix, lambda: &Frequency, b: &QMatrix) -> Result<QMatrix> {
    let n = a0.dim();
    let il = ComplexRational::imag(lambda.0.clone());
    let mut y = QMatrix::zeros(n);
    for p in 0..n {
        for q in 0..n {
            // iλ − μ_p + μ_q
            let d = &(&il - &a0[(p, p)]) + &a0[(q, q)];
            let inv = d.inv().ok_or_else(|| resonance(a0, lambda))?;
            y[(p, q)] = &b[(p, q)] * &inv;
        }
    }
    Ok(y)
}

/// Gaussian elimination on the `n²` system, unknowns ordered row-major.
pub(crate) fn solve_sylvester_dense(a0: &QMatrix, lambda: &Frequency, b: &QMatrix) -> Result<QMatrix> {
    let n = a0.dim();
    let m = n * n;
    let idx = |p: usize, q: usize| p * n + q;
    let il = ComplexRational::imag(lambda.0.clone());
    let mut k = vec![vec![ComplexRational::zero(); m + 1]; m];
    for p in 0..n {
        for q in 0..n {
            let row = &mut k[idx(p, q)];
            row[idx(p, q)] += &il;
            for r in 0..n {
                row[idx(r, q)] -= &a0[(p, r)];
                row[idx(p, r)] += &a0[(r, q)];
            }
            row[m] = b[(p, q)].clone();
        }
    }
    for col in 0..m {
        let pivot = (col..m).find(|&r| !k[r][col].is_zero()).ok_or_else(|| resonance(a0, lambda))?;
        k.swap(col, pivot);
        let inv = k[col][col].inv().expect("nonzero pivot");
        for c in col..=m {
            k[col][c] = &k[col][c] * &inv;
        }
        let pivot_row = k[col].clone();
        for (r, row) in k.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for c in col..=m {
                if !pivot_row[c].is_zero() {
                    row[c] -= &(&f * &pivot_row[c]);
                }
            }
        }
    }
    let mut y = QMatrix::zeros(n);
    for p in 0..n {
        for q in 0..n {
            y[(p, q)] = k[idx(p, q)][m].clone();
        }
    }
    Ok(y)
}

/// Names the eigenvalue pair of `a0` closest to satisfying `iλ = μ_p − μ_q`.
fn resonance(a0: &QMatrix, lambda: &Frequency) -> Error {
    let mu = linalg::eigenvalues(&a0.to_c64());
    let il = Complex64::new(0.0, lambda.0.to_f64());
    let mut best = (f64::INFINITY, 0, 0);
    for (p, mp) in mu.iter().enumerate() {
        for (q, mq) in mu.iter().enumerate() {
            let d = (il - mp + mq).norm();
            if d < best.0 {
                best = (d, p, q);
            }
        }
    }
    let fmt = |z: Complex64| format!("{:.6}{:+.6}i", z.re, z.im);
    Error::Resonance { frequency: Box::new(lambda.0.clone()), mu_p: fmt(mu[best.1]), mu_q: fmt(mu[best.2]) }
}

/// Solves `Y' − A0 Y + Y A0 = b(t)` for a zero-mean `b`; the solution has zero mean.
pub fn solve_homological(a0: &QMatrix, b: &TrigPolyMatrix) -> Result<TrigPolyMatrix> {
    if a0.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a0.dim(), right: b.dim() });
    }
    if b.coefficient(&Frequency::zero()).is_some() {
        return Err(Error::NonzeroMean);
    }
    let terms = b
        .terms()
        .map(|(f, m)| Ok((f.clone(), solve_sylvester(a0, f, m)?)))
        .collect::<Result<Vec<_>>>()?;
    TrigPolyMatrix::from_terms(a0.dim(), terms)
}

/// Right-hand side of the grade-`j` homological equation before the mean is removed:
/// `Σ_{l=0}^{j-1} A_{j-l}(t) Y_l(t) − Σ_{l=1}^{j-1} Y_l(t) A_{j-l}`.
pub fn homological_rhs(
    spec: &SystemSpec,
    j: usize,
    averaged: &[QMatrix],
    transforms: &[TrigPolyMatrix],
) -> Result<TrigPolyMatrix> {
    let mut rhs = TrigPolyMatrix::zero(spec.dim());
    for l in 0..j {
        let osc = &spec.grades[j - l - 1];
        rhs = rhs.checked_add(&osc.checked_mul(&transforms[l])?)?;
        if l > 0 {
            rhs = rhs.checked_sub(&transforms[l].right_mul_const(&averaged[j - l])?)?;
        }
    }
    Ok(rhs)
}

/// One grade of the averaging recursion.
///
/// `averaged` holds `A_0..A_{j-1}` and `transforms` holds `Y_0 = I, Y_1..Y_{j-1}`.
/// Returns `(A_j, Y_j)`.
pub fn averaging_step(
    spec: &SystemSpec,
    j: usize,
    averaged: &[QMatrix],
    transforms: &[TrigPolyMatrix],
) -> Result<(QMatrix, TrigPolyMatrix)> {
    if j == 0 || j > spec.k() || averaged.len() < j || transforms.len() < j {
        return Err(Error::InvalidParameter(format!("averaging step {j} needs grades 0..{j} of prior data")));
    }
    let rhs = homological_rhs(spec, j, averaged, transforms)?;
    let a_j = rhs.mean();
    let y_j = solve_homological(&spec.a0, &rhs.oscillating_part())?;
    Ok((a_j, y_j))
}

/// Output of the averaging transform.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedSystem {
    /// `A_0..A_k`; `A_0` is the input constant matrix.
    pub averaged: Vec<QMatrix>,
    /// `Σ_j t^{-jα} Y_j(t)` with `Y_0 = I` and zero-mean `Y_j`.
    pub transform: GradedOscSeries,
    pub remainder: RemainderBundle,
    /// Threshold beyond which the transform is certifiably invertible.
    pub t_star: f64,
}

impl AveragedSystem {
    pub fn alpha(&self) -> &Rational {
        self.transform.alpha()
    }

    pub fn k(&self) -> usize {
        self.averaged.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.transform.dim()
    }

    /// `Σ_j t^{-jα} A_j` as a (constant) graded series.
    pub fn principal_series(&self) -> GradedOscSeries {
        let grades = self.averaged.iter().cloned().map(TrigPolyMatrix::constant).collect();
        GradedOscSeries::new(self.alpha().clone(), grades).expect("same alpha as transform")
    }
}

/// Runs the averaging recursion for `j = 1..k` and assembles the remainder.
pub fn average_system(spec: &SystemSpec) -> Result<AveragedSystem> {
    let n = spec.dim();
    let k = spec.k();
    let mut averaged = vec![spec.a0.clone()];
    let mut transforms = vec![TrigPolyMatrix::identity(n)];
    for j in 1..=k {
        let (a_j, y_j) = averaging_step(spec, j, &averaged, &transforms)?;
        averaged.push(a_j);
        transforms.push(y_j);
    }
    let transform = GradedOscSeries::new(spec.alpha.clone(), transforms)?;
    let principal = GradedOscSeries::new(
        spec.alpha.clone(),
        averaged.iter().cloned().map(TrigPolyMatrix::constant).collect(),
    )?;

    // A(t)Y(t) − Y(t)B: grades up to k cancel against Y'_osc, the rest is S(t).
    let (_, over_ay) = spec.coefficient_series().mul(&transform, k)?;
    let (_, over_yb) = transform.mul(&principal, k)?;
    let s_term = subtract_graded(n, over_ay, over_yb)?;
    let (_, w_term) = transform.derivative();

    let delta = spec.perturbation.as_ref().map(|p| &p.delta);
    let (_, epsilon) = choose_k(&spec.alpha, delta)?;
    let t_star = transform.invertibility_threshold()?;

    let mut remainder = RemainderBundle {
        alpha: spec.alpha.clone(),
        s_term,
        w_term,
        u_exponent: delta.map(|d| Rational::one() + d),
        epsilon,
        bound_constant: 0.0,
    };
    remainder.bound_constant = remainder_bound(&remainder, &transform, spec.perturbation.as_ref(), t_star);
    Ok(AveragedSystem { averaged, transform, remainder, t_star })
}

fn subtract_graded(dim: usize, plus: Vec<GradedTerm>, minus: Vec<GradedTerm>) -> Result<Vec<GradedTerm>> {
    let top = plus.iter().chain(&minus).map(|t| t.grade).max().unwrap_or(0);
    let mut acc = vec![TrigPolyMatrix::zero(dim); top + 1];
    for t in plus {
        acc[t.grade] = acc[t.grade].checked_add(&t.poly)?;
    }
    for t in minus {
        acc[t.grade] = acc[t.grade].checked_sub(&t.poly)?;
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(grade, poly)| GradedTerm { grade, poly })
        .collect())
}

/// `C₂` with `‖R(t)‖ ≤ C₂` for `t ≥ t*`: every piece is bounded by its
/// coefficient norm times `t*` raised to its (non-positive) exponent surplus.
fn remainder_bound(
    rem: &RemainderBundle,
    transform: &GradedOscSeries,
    perturbation: Option<&Perturbation>,
    t_star: f64,
) -> f64 {
    let a = rem.alpha.to_f64();
    let lead = 1.0 + rem.epsilon.to_f64();
    let s: f64 = rem
        .s_term
        .iter()
        .map(|t| t.poly.coeff_norm().to_f64() * t_star.powf(lead - t.grade as f64 * a))
        .sum();
    let w: f64 = rem
        .w_term
        .iter()
        .map(|t| t.poly.coeff_norm().to_f64() * t_star.powf(lead - 1.0 - t.grade as f64 * a))
        .sum();
    let u = perturbation.map_or(0.0, |p| {
        let d = p.delta.to_f64();
        p.bound
            * transform
                .grades()
                .iter()
                .enumerate()
                .map(|(j, y)| y.coeff_norm().to_f64() * t_star.powf(lead - 1.0 - d - j as f64 * a))
                .sum::<f64>()
    });
    s + w + u
}

/// One sample of the substitution-identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSample {
    pub t: f64,
    /// `‖A(t)Y(t) − Y'(t) − Y(t)B(t)‖_F`.
    pub raw: f64,
    /// `raw · t^{1+ε}`.
    pub scaled: f64,
    /// Distance between the evaluated left side and the evaluated remainder pieces.
    pub identity_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub samples: Vec<ResidualSample>,
    pub max_scaled_residual: f64,
    pub max_identity_gap: f64,
}

/// Evaluates both sides of `Y (y' − B y) = (t^{-(k+1)α}S − t^{-(1+α)}W) y`
/// numerically at each sample (the `F(t)` term is excluded: it is only known
/// by its bound). Samples must lie at or beyond `t*`.
pub fn verify_transform_residual(
    spec: &SystemSpec,
    result: &AveragedSystem,
    t_samples: &[f64],
) -> Result<ResidualReport> {
    if let Some(t) = t_samples.iter().find(|t| **t < result.t_star) {
        return Err(Error::InvalidParameter(format!("sample t = {t} lies below t* = {}", result.t_star)));
    }
    let samples = t_samples.iter().map(|&t| transform_residual(spec, result, t)).collect::<Result<Vec<_>>>()?;
    let max_scaled_residual = samples.iter().map(|s| s.scaled).fold(0.0, f64::max);
    let max_identity_gap = samples.iter().map(|s| s.identity_gap).fold(0.0, f64::max);
    Ok(ResidualReport { samples, max_scaled_residual, max_identity_gap })
}

/// One residual sample at any `t > 0`. The identity is algebraic and holds
/// for every positive `t`; `t*` only certifies that the transform is invertible.
pub fn transform_residual(spec: &SystemSpec, result: &AveragedSystem, t: f64) -> Result<ResidualSample> {
    let n = spec.dim();
    let (osc_derivative, w) = result.transform.derivative();
    let eps = result.remainder.epsilon.to_f64();
    let a = spec.eval_coefficient(t)?;
    let y = result.transform.eval(t)?;
    let dy = osc_derivative.eval(t)? + eval_graded_terms(&w, spec.alpha(), 1.0, n, t);
    let b = result.principal_series().eval(t)?;
    let lhs: DMatrix<Complex64> = &a * &y - dy - &y * &b;
    let rhs = result.remainder.eval_sw(n, t);
    let raw = lhs.norm();
    Ok(ResidualSample { t, raw, scaled: raw * t.powf(1.0 + eps), identity_gap: (lhs - rhs).norm() })
}
