//! The adiabatic oscillator `y'' + (1 + t^{-α} sin λt) y = 0`.
//!
//! With `y = x1 cos t + x2 sin t`, `y' = −x1 sin t + x2 cos t` the equation
//! becomes `x' = t^{-α} A(t) x` where
//! `A(t) = sin λt · [[sin t cos t, sin² t], [−cos² t, −sin t cos t]]`.
//! In exponential form that is
//! `a1 e^{i(λ+2)t} + a2 e^{i(λ−2)t} + a3 e^{iλt}` plus conjugates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{self, AsymptoticPrediction, GrowthClass};
use crate::averaging::{average_system, choose_k, AveragedSystem, SystemSpec};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matrix::QMatrix;
use crate::rational::{cq, q, ComplexRational, Rational};
use crate::trigpoly::{Frequency, TrigPolyMatrix};

fn eighths(entries: [[(i64, i64); 2]; 2]) -> QMatrix {
    QMatrix::from_rows(
        entries
            .iter()
            .map(|row| row.iter().map(|&(re, im)| cq(q(re, 8), q(im, 8))).collect())
            .collect(),
    )
    .expect("2x2")
}

/// Coefficient of `e^{i(λ+2)t}`: `(1/8)[[−1, i], [i, 1]]`.
pub fn a1() -> QMatrix {
    eighths([[(-1, 0), (0, 1)], [(0, 1), (1, 0)]])
}

/// Coefficient of `e^{i(λ−2)t}`: `(1/8)[[1, i], [i, −1]]`.
pub fn a2() -> QMatrix {
    eighths([[(1, 0), (0, 1)], [(0, 1), (-1, 0)]])
}

/// Coefficient of `e^{iλt}`: `(1/8)[[0, −2i], [2i, 0]]`.
pub fn a3() -> QMatrix {
    eighths([[(0, 0), (0, -2)], [(0, 2), (0, 0)]])
}

/// The oscillatory coefficient `A(t)` of the first-order system.
pub fn coupling_matrix(lambda: &Rational) -> TrigPolyMatrix {
    let two = Rational::from_integer(2);
    let pairs = [(lambda + &two, a1()), (lambda - &two, a2()), (lambda.clone(), a3())];
    let terms = pairs.into_iter().flat_map(|(f, m)| {
        let conj = m.conj();
        [(Frequency(f.clone()), m), (Frequency(-f), conj)]
    });
    TrigPolyMatrix::from_terms(2, terms).expect("2x2 terms")
}

/// Builds `x' = t^{-α} A(t) x` as a system with `A0 = 0` and grades `A(t), 0, …, 0`.
pub fn build_oscillator_system(lambda: &Rational, alpha: &Rational) -> Result<SystemSpec> {
    if lambda.is_zero() {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    let (k, _) = choose_k(alpha, None)?;
    let mut grades = vec![TrigPolyMatrix::zero(2); k];
    grades[0] = coupling_matrix(lambda);
    SystemSpec::new(QMatrix::zeros(2), alpha.clone(), grades, None)
}

/// Exact classification of `λ` against the resonant values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceTag {
    Nonresonant,
    /// `λ = ±2`
    PlusMinusTwo,
    /// `λ = ±1`
    PlusMinusOne,
    /// `λ = ±2/3`
    PlusMinusTwoThirds,
}

impl ResonanceTag {
    pub fn of(lambda: &Rational) -> Self {
        let a = lambda.abs();
        if a == Rational::from_integer(2) {
            ResonanceTag::PlusMinusTwo
        } else if a == Rational::one() {
            ResonanceTag::PlusMinusOne
        } else if a == q(2, 3) {
            ResonanceTag::PlusMinusTwoThirds
        } else {
            ResonanceTag::Nonresonant
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ResonanceTag::Nonresonant => "nonresonant",
            ResonanceTag::PlusMinusTwo => "lambda=+-2",
            ResonanceTag::PlusMinusOne => "lambda=+-1",
            ResonanceTag::PlusMinusTwoThirds => "lambda=+-2/3",
        }
    }
}

/// `1/(4(λ² − 4))`, the rotation rate of the nonresonant second-grade average.
pub fn gamma(lambda: &Rational) -> Option<Rational> {
    let d = lambda * lambda - Rational::from_integer(4);
    (!d.is_zero()).then(|| (Rational::from_integer(4) * d).recip())
}

/// The closed form `i[(a1ā1 − ā1a1)/(λ+2) + (a2ā2 − ā2a2)/(λ−2) + (a3ā3 − ā3a3)/λ]`
/// for the second-grade average when `λ ∉ {0, ±1, ±2}`.
pub fn nonresonant_a2(lambda: &Rational) -> QMatrix {
    let two = Rational::from_integer(2);
    let comm = |a: &QMatrix| {
        let ab = a.conj();
        &(a * &ab) - &(&ab * a)
    };
    let sum = [(lambda + &two, a1()), (lambda - &two, a2()), (lambda.clone(), a3())]
        .iter()
        .map(|(d, a)| comm(a).scale_real(&d.recip()))
        .fold(QMatrix::zeros(2), |acc, m| &acc + &m);
    sum.scale(&ComplexRational::i())
}

/// Envelope of one fundamental solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    /// `1 + o(1)`
    Unit,
    /// `t^exponent`
    Power { exponent: f64 },
    /// `exp(coeff · t^power)`
    StretchedExp { coeff: f64, power: Rational },
}

/// Phase of one fundamental solution relative to `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phase {
    /// `t + shift`
    Shift { shift: f64 },
    /// `t + gamma·ln t`
    LogDrift { gamma: f64 },
    /// `t + coeff·t^power`
    PowerDrift { coeff: f64, power: Rational },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionForm {
    pub envelope: Envelope,
    pub phase: Phase,
}

/// Named constants of the closed-form fundamental systems.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OscillatorConstants {
    /// `1/(4(λ² − 4))`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rational>,
    /// `√5/24`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// `arctan √5`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// `φ(t) = coeff · t^power`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PowerLaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub coeff: Rational,
    pub power: Rational,
}

#[derive(Debug, Clone)]
pub struct OscillatorCase {
    pub lambda: Rational,
    pub alpha: Rational,
    pub resonance: ResonanceTag,
    pub system: SystemSpec,
    pub averaged: AveragedSystem,
    pub prediction: CasePrediction,
    pub constants: OscillatorConstants,
    pub solution_forms: Vec<SolutionForm>,
}

/// Either a Levinson-type prediction or the remainder-dominated outcome.
#[derive(Debug, Clone)]
pub enum CasePrediction {
    Leading(AsymptoticPrediction),
    RemainderDominated { class: GrowthClass },
}

impl CasePrediction {
    pub fn growth_classes(&self) -> Vec<GrowthClass> {
        match self {
            CasePrediction::Leading(p) => p.growth.clone(),
            CasePrediction::RemainderDominated { class } => vec![class.clone(); 2],
        }
    }

    pub fn leading_index(&self) -> Option<usize> {
        match self {
            CasePrediction::Leading(p) => Some(p.leading_index),
            CasePrediction::RemainderDominated { .. } => None,
        }
    }

    /// Predicted fundamental matrix of the averaged system at `t`, in `x` coordinates.
    pub fn fundamental_matrix(&self, t: f64) -> Result<CMatrix> {
        match self {
            CasePrediction::Leading(p) => p.fundamental_matrix(t),
            CasePrediction::RemainderDominated { .. } => Ok(CMatrix::identity(2, 2)),
        }
    }
}

/// Runs averaging and the asymptotic predictor for one `(λ, α)` pair.
pub fn analyze_case(lambda: &Rational, alpha: &Rational) -> Result<OscillatorCase> {
    let system = build_oscillator_system(lambda, alpha)?;
    let averaged = average_system(&system)?;
    let prediction = match asymptotics::leading_index(&averaged.averaged) {
        Some(_) => CasePrediction::Leading(asymptotics::predict(&averaged)?),
        None => CasePrediction::RemainderDominated {
            class: asymptotics::classify_remainder_dominated(&averaged.remainder.epsilon),
        },
    };
    let resonance = ResonanceTag::of(lambda);
    let constants = case_constants(lambda, alpha, resonance, prediction.leading_index());
    let solution_forms = solution_forms(&prediction);
    Ok(OscillatorCase {
        lambda: lambda.clone(),
        alpha: alpha.clone(),
        resonance,
        system,
        averaged,
        prediction,
        constants,
        solution_forms,
    })
}

fn case_constants(lambda: &Rational, alpha: &Rational, tag: ResonanceTag, l: Option<usize>) -> OscillatorConstants {
    let mut c = OscillatorConstants::default();
    match (tag, l) {
        (ResonanceTag::PlusMinusTwo, Some(1)) if *alpha < Rational::one() => {
            let power = Rational::one() - alpha;
            c.phi = Some(PowerLaw { coeff: (Rational::from_integer(4) * &power).recip(), power });
        }
        (ResonanceTag::PlusMinusOne, Some(2)) => {
            c.rho = Some(5f64.sqrt() / 24.0);
            c.beta = Some(5f64.sqrt().atan());
        }
        (ResonanceTag::Nonresonant | ResonanceTag::PlusMinusTwoThirds, Some(2)) => {
            c.gamma = gamma(lambda);
        }
        _ => {}
    }
    c
}

fn solution_forms(prediction: &CasePrediction) -> Vec<SolutionForm> {
    let unit = || SolutionForm { envelope: Envelope::Unit, phase: Phase::Shift { shift: 0.0 } };
    let CasePrediction::Leading(p) = prediction else {
        return vec![unit(), unit()];
    };
    p.growth
        .iter()
        .zip(&p.eigenvalues)
        .enumerate()
        .map(|(i, (class, mu))| {
            // y = Re((x1 − i x2) e^{it}); a complex mode v e^{iθ} contributes
            // c e^{i(t+θ)} + c' e^{i(t−θ)} with c = v1 − i v2, c' = v̄1 − i v̄2
            let v1 = p.p_matrix[(0, i)];
            let v2 = p.p_matrix[(1, i)];
            let c = v1 - Complex64::i() * v2;
            let c_conj = v1.conj() - Complex64::i() * v2.conj();
            let (sign, shift) = if c.norm() >= c_conj.norm() { (1.0, c.arg()) } else { (-1.0, c_conj.arg()) };
            let envelope = match class {
                GrowthClass::Polynomial { exponent } => Envelope::Power { exponent: *exponent },
                GrowthClass::StretchedExponential { coeff, power } => {
                    Envelope::StretchedExp { coeff: coeff / power.to_f64(), power: power.clone() }
                }
                _ => Envelope::Unit,
            };
            let phase = match class {
                GrowthClass::LogPhase { gamma } => Phase::LogDrift { gamma: sign * gamma },
                GrowthClass::Bounded if mu.im != 0.0 && p.leading_power() < Rational::one() => {
                    let power = Rational::one() - p.leading_power();
                    Phase::PowerDrift { coeff: sign * mu.im / power.to_f64(), power }
                }
                _ => Phase::Shift { shift },
            };
            SolutionForm { envelope, phase }
        })
        .collect()
}

/// Maps an `x`-space state through the variation-of-constants change to `(y, y')`.
pub fn to_y_coordinates(x1: f64, x2: f64, t: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    (x1 * c + x2 * s, -x1 * s + x2 * c)
}

/// Inverse of [`to_y_coordinates`].
pub fn to_x_coordinates(y: f64, dy: f64, t: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    (y * c - dy * s, y * s + dy * c)
}

/// Predicted fundamental system in `(y, y')` form at `t`: row 0 holds `y`
/// for each fundamental solution, row 1 holds `y'`. Complex conjugate pairs
/// of modes are recombined into real solutions.
pub fn back_transform(prediction: &CasePrediction, t: f64) -> Result<[[f64; 2]; 2]> {
    let x = real_fundamental(prediction, t)?;
    let mut out = [[0.0; 2]; 2];
    for col in 0..2 {
        let (y, dy) = to_y_coordinates(x[(0, col)], x[(1, col)], t);
        out[0][col] = y;
        out[1][col] = dy;
    }
    Ok(out)
}

fn real_fundamental(prediction: &CasePrediction, t: f64) -> Result<nalgebra::Matrix2<f64>> {
    let x = prediction.fundamental_matrix(t)?;
    let real = x.iter().all(|z| z.im.abs() <= 1e-12 * z.norm().max(1.0));
    if real {
        return Ok(nalgebra::Matrix2::from_fn(|i, j| x[(i, j)].re));
    }
    // conjugate pair: real and imaginary parts of one column span the real solutions
    Ok(nalgebra::Matrix2::from_fn(|i, j| if j == 0 { x[(i, 0)].re } else { x[(i, 0)].im }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real2(rows: [[Rational; 2]; 2]) -> QMatrix {
        QMatrix::from_real_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn coefficients_are_conjugate_symmetric() {
        for lambda in [q(2, 1), q(3, 1), q(1, 1), q(-2, 3), q(7, 5)] {
            assert!(coupling_matrix(&lambda).is_real_valued(), "λ = {lambda}");
        }
    }

    #[test]
    fn resonant_frequency_sets() {
        let f = |l: Rational| coupling_matrix(&l).frequencies().cloned().map(|f| f.0).collect::<Vec<_>>();
        assert_eq!(f(q(2, 1)), vec![q(-4, 1), q(-2, 1), q(0, 1), q(2, 1), q(4, 1)]);
        assert_eq!(f(q(3, 1)), vec![q(-5, 1), q(-3, 1), q(-1, 1), q(1, 1), q(3, 1), q(5, 1)]);
    }

    #[test]
    fn complex_form_matches_real_derivation() {
        // A(t) = sin λt [[sin t cos t, sin² t], [−cos² t, −sin t cos t]]
        for lambda in [q(2, 1), q(3, 1), q(1, 1), q(2, 3), q(5, 2), q(-7, 3)] {
            let l = lambda.to_f64();
            let t: f64 = 0.7;
            let (s, c) = t.sin_cos();
            let k = (l * t).sin();
            let expected = [[k * s * c, k * s * s], [-k * c * c, -k * s * c]];
            let got = coupling_matrix(&lambda).eval(t);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((got[(i, j)].re - expected[i][j]).abs() < 1e-14);
                    assert!(got[(i, j)].im.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn eval_at_zero_is_sum_of_six_coefficients() {
        let sum = [a1(), a1().conj(), a2(), a2().conj(), a3(), a3().conj()]
            .iter()
            .fold(QMatrix::zeros(2), |acc, m| &acc + m);
        let got = coupling_matrix(&q(2, 1)).eval(0.0);
        assert!((got - sum.to_c64()).norm() < 1e-15);
    }

    #[test]
    fn resonance_tags_are_exact() {
        assert_eq!(ResonanceTag::of(&q(2, 1)), ResonanceTag::PlusMinusTwo);
        assert_eq!(ResonanceTag::of(&q(-2, 1)), ResonanceTag::PlusMinusTwo);
        assert_eq!(ResonanceTag::of(&q(-1, 1)), ResonanceTag::PlusMinusOne);
        assert_eq!(ResonanceTag::of(&q(2, 3)), ResonanceTag::PlusMinusTwoThirds);
        assert_eq!(ResonanceTag::of(&q(1999, 1000)), ResonanceTag::Nonresonant);
        assert_eq!(ResonanceTag::of(&q(2001, 1000)), ResonanceTag::Nonresonant);
    }

    #[test]
    fn gamma_closed_form() {
        assert_eq!(gamma(&q(3, 1)), Some(q(1, 20)));
        assert_eq!(gamma(&q(5, 2)), Some(q(1, 9)));
        assert_eq!(gamma(&q(2, 1)), None);
        assert_eq!(nonresonant_a2(&q(3, 1)), real2([[q(0, 1), q(1, 20)], [q(-1, 20), q(0, 1)]]));
    }

    #[test]
    fn y_x_coordinates_are_inverse_rotations() {
        for (x1, x2, t) in [(1.0, 0.0, 0.3), (0.2, -1.7, 11.0), (3.0, 4.0, -2.0)] {
            let (y, dy) = to_y_coordinates(x1, x2, t);
            assert!(((y * y + dy * dy) - (x1 * x1 + x2 * x2)).abs() < 1e-12);
            let (a, b) = to_x_coordinates(y, dy, t);
            assert!((a - x1).abs() < 1e-12 && (b - x2).abs() < 1e-12);
        }
        let (y, _) = to_y_coordinates(1.0, 0.0, 1.234);
        assert!((y - 1.234f64.cos()).abs() < 1e-15);
    }

    fn averaged(lambda: Rational, alpha: Rational) -> Vec<QMatrix> {
        let a = average_system(&build_oscillator_system(&lambda, &alpha).unwrap()).unwrap().averaged;
        assert!(a[0].is_zero());
        a[1..].to_vec()
    }

    fn rotation(c: Rational) -> QMatrix {
        real2([[q(0, 1), c.clone()], [-c, q(0, 1)]])
    }

    #[test]
    fn first_grade_average_at_lambda_two() {
        let a = averaged(q(2, 1), q(1, 1));
        assert_eq!(a, vec![real2([[q(1, 4), q(0, 1)], [q(0, 1), q(-1, 4)]])]);
    }

    #[test]
    fn nonresonant_second_grade_average() {
        for (lambda, alpha, g) in [(q(3, 1), q(1, 2), q(1, 20)), (q(5, 2), q(2, 5), q(1, 9)), (q(7, 3), q(1, 2), q(9, 52))] {
            let a = averaged(lambda.clone(), alpha);
            assert!(a[0].is_zero());
            assert_eq!(a[1], rotation(g.clone()), "λ = {lambda}");
            assert_eq!(a[1], nonresonant_a2(&lambda));
            assert_eq!(gamma(&lambda), Some(g));
        }
    }

    #[test]
    fn lambda_one_second_grade_average() {
        let a = averaged(q(1, 1), q(1, 2));
        assert!(a[0].is_zero());
        assert_eq!(a[1], real2([[q(0, 1), q(-5, 24)], [q(-1, 24), q(0, 1)]]));
    }

    #[test]
    fn lambda_two_half_power_averages() {
        let a = averaged(q(2, 1), q(1, 2));
        assert_eq!(a[0], real2([[q(1, 4), q(0, 1)], [q(0, 1), q(-1, 4)]]));
        assert_eq!(a[1], rotation(q(-1, 64)));
    }

    #[test]
    fn lambda_two_thirds_third_grade_average() {
        let a = averaged(q(2, 3), q(1, 3));
        assert!(a[0].is_zero());
        assert_eq!(a[1], rotation(q(-9, 128)));
        // cross-checked by the floating-point Fourier oracle in tests/averaging_oracle.rs
        assert_eq!(a[2], real2([[q(-81, 1024), q(0, 1)], [q(0, 1), q(81, 1024)]]));
    }

    #[test]
    fn case_classes() {
        let classes = |l: Rational, a: Rational| analyze_case(&l, &a).unwrap().prediction.growth_classes();
        let c = classes(q(2, 1), q(1, 1));
        assert_eq!(c, vec![GrowthClass::Polynomial { exponent: 0.25 }, GrowthClass::Polynomial { exponent: -0.25 }]);
        let rho = 5f64.sqrt() / 24.0;
        match classes(q(1, 1), q(1, 2)).as_slice() {
            [GrowthClass::Polynomial { exponent: a }, GrowthClass::Polynomial { exponent: b }] => {
                assert!((a - rho).abs() < 1e-14 && (b + rho).abs() < 1e-14)
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(classes(q(2, 1), q(1, 2))[0], GrowthClass::StretchedExponential { coeff: 0.25, power: q(1, 2) });
        assert!(matches!(classes(q(3, 1), q(1, 2))[0], GrowthClass::LogPhase { gamma } if (gamma - 0.05).abs() < 1e-15));
        assert!(classes(q(3, 1), q(3, 4)).iter().all(|c| *c == GrowthClass::Bounded));
        assert!(classes(q(2, 3), q(1, 3)).iter().all(|c| *c == GrowthClass::Bounded));
    }

    #[test]
    fn log_phase_drift_is_positive_for_both_modes() {
        let case = analyze_case(&q(3, 1), &q(1, 2)).unwrap();
        for f in &case.solution_forms {
            assert!(matches!(f.phase, Phase::LogDrift { gamma } if (gamma - 0.05).abs() < 1e-14), "{f:?}");
        }
    }

    #[test]
    fn lambda_one_phase_shift() {
        // growing mode gives sin(t − arctan √5) up to sign
        let case = analyze_case(&q(1, 1), &q(1, 2)).unwrap();
        let beta = case.constants.beta.unwrap();
        let Phase::Shift { shift } = case.solution_forms[0].phase else { panic!() };
        let d = (shift + beta + std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::PI);
        assert!(d < 1e-12 || (std::f64::consts::PI - d) < 1e-12, "shift {shift}");
    }
}
