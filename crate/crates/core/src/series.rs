//! Graded oscillatory series `Σ_{j=0}^{k} t^{-jα} M_j(t)`.
//!
//! This is the shape of both the coefficient matrix of the input system and the
//! near-identity change of variables `x = (Σ_j t^{-jα} Y_j(t)) y`. Products
//! are truncated at a cutoff grade; everything above it is handed back as
//! overflow so the remainder can be accounted for exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::trigpoly::TrigPolyMatrix;

/// A trigonometric polynomial tagged with the grade `j` of its `t^{-jα}` weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedTerm {
    pub grade: usize,
    pub poly: TrigPolyMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedOscSeries {
    alpha: Rational,
    grades: Vec<TrigPolyMatrix>,
}

impl GradedOscSeries {
    /// Requires `alpha > 0`, at least one grade, and equal dimensions.
    pub fn new(alpha: Rational, grades: Vec<TrigPolyMatrix>) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        let Some(first) = grades.first() else {
            return Err(Error::InvalidParameter("a graded series needs at least grade 0".into()));
        };
        let dim = first.dim();
        if let Some(bad) = grades.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch { left: dim, right: bad.dim() });
        }
        Ok(GradedOscSeries { alpha, grades })
    }

    /// `I + 0·t^{-α} + … + 0·t^{-kα}`.
    pub fn identity(dim: usize, alpha: Rational, k: usize) -> Self {
        let mut grades = vec![TrigPolyMatrix::zero(dim); k + 1];
        grades[0] = TrigPolyMatrix::identity(dim);
        GradedOscSeries { alpha, grades }
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.grades[0].dim()
    }

    /// Highest grade index `k`.
    pub fn order(&self) -> usize {
        self.grades.len() - 1
    }

    pub fn grades(&self) -> &[TrigPolyMatrix] {
        &self.grades
    }

    pub fn grade(&self, j: usize) -> &TrigPolyMatrix {
        &self.grades[j]
    }

    /// Truncated product. Grade `g ≤ cutoff` of the result is `Σ_{i+j=g} X_i Y_j`;
    /// nonzero grades above the cutoff are returned as overflow, sorted by grade.
    pub fn mul(&self, other: &Self, cutoff: usize) -> Result<(Self, Vec<GradedTerm>)> {
        if self.alpha != other.alpha {
            return Err(Error::AlphaMismatch { left: Box::new(self.alpha.clone()), right: Box::new(other.alpha.clone()) });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        let top = self.order() + other.order();
        let mut acc = vec![TrigPolyMatrix::zero(self.dim()); top.max(cutoff) + 1];
        for (i, x) in self.grades.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.grades.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                acc[i + j] = acc[i + j].checked_add(&x.checked_mul(y)?)?;
            }
        }
        let overflow = acc
            .split_off(cutoff + 1)
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, poly)| GradedTerm { grade: cutoff + 1 + i, poly })
            .collect();
        Ok((GradedOscSeries { alpha: self.alpha.clone(), grades: acc }, overflow))
    }

    /// Splits `d/dt` of the series into its two parts.
    ///
    /// The first is the gradewise oscillatory derivative `Σ_j t^{-jα} Y_j'(t)`.
    /// The second holds the pieces `−jα·Y_j(t)`, each weighted by
    /// `t^{-(1+jα)}` (see [`w_exponent`](Self::w_exponent)); summed with
    /// `t^{-(j-1)α}` they form the `W(t)` that multiplies `t^{-(1+α)}`.
    pub fn derivative(&self) -> (Self, Vec<GradedTerm>) {
        let osc = self.grades.iter().map(TrigPolyMatrix::derivative).collect();
        let w = self
            .grades
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, y)| !y.is_zero())
            .map(|(j, y)| {
                let factor = -(&self.alpha * &Rational::from_integer(j as i64));
                GradedTerm { grade: j, poly: y.scale_real(&factor) }
            })
            .collect();
        (GradedOscSeries { alpha: self.alpha.clone(), grades: osc }, w)
    }

    /// Decay exponent `1 + jα` of the grade-`j` derivative piece.
    pub fn w_exponent(&self, j: usize) -> Rational {
        Rational::one() + &self.alpha * &Rational::from_integer(j as i64)
    }

    /// `Σ_j t^{-jα} X_j(t)`; requires `t > 0`.
    pub fn eval(&self, t: f64) -> Result<DMatrix<Complex64>> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        let a = self.alpha.to_f64();
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (j, g) in self.grades.iter().enumerate() {
            if !g.is_zero() {
                out += g.eval(t) * Complex64::from(t.powf(-(j as f64) * a));
            }
        }
        Ok(out)
    }

    /// Smallest `t = 2^m` (m ≥ 0) with `Σ_{j≥1} t^{-jα}‖Y_j‖ ≤ 1/2`.
    ///
    /// For `t` at or beyond the threshold the series is `I + E(t)` with
    /// `‖E(t)‖ ≤ 1/2`, so it is invertible with `‖(I + E)^{-1}‖ ≤ 2` and
    /// smallest singular value at least `1/2`. `‖·‖` is
    /// [`TrigPolyMatrix::coeff_norm`].
    pub fn invertibility_threshold(&self) -> Result<f64> {
        if self.grades[0] != TrigPolyMatrix::identity(self.dim()) {
            return Err(Error::GradeZeroNotIdentity);
        }
        let a = self.alpha.to_f64();
        let norms: Vec<(f64, f64)> = self
            .grades
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, y)| (j as f64 * a, y.coeff_norm().to_f64()))
            .filter(|&(_, n)| n > 0.0)
            .collect();
        for m in 0..1024 {
            let t = 2f64.powi(m);
            let bound: f64 = norms.iter().map(|&(e, n)| n * t.powf(-e)).sum();
            // relative slack absorbs rounding when the bound is hit exactly
            if bound <= 0.5 * (1.0 + 1e-12) {
                return Ok(t);
            }
        }
        Err(Error::InvalidParameter("transform coefficients too large for a finite threshold".into()))
    }
}

/// Evaluates `Σ_terms t^{-(offset + grade·α)} poly(t)`.
pub fn eval_graded_terms(
    terms: &[GradedTerm],
    alpha: &Rational,
    offset: f64,
    dim: usize,
    t: f64,
) -> DMatrix<Complex64> {
    let a = alpha.to_f64();
    let mut out = DMatrix::zeros(dim, dim);
    for term in terms {
        out += term.poly.eval(t) * Complex64::from(t.powf(-(offset + term.grade as f64 * a)));
    }
    out
}

/// The leftover pieces of the substitution identity.
///
/// With `Y(t)` the transform and `B(t) = Σ t^{-jα} A_j` the averaged principal
/// part, `Y (y' − B y) = [t^{-(k+1)α}S(t) − t^{-(1+α)}W(t) + t^{-(1+δ)}U(t)] y`.
/// `S` is stored as grade-tagged polynomials (grade `g > k` weighs
/// `t^{-gα}`), `W` as the derivative pieces of [`GradedOscSeries::derivative`],
/// and `U` only through its exponent since `F(t)` is known by its bound.
/// Collectively the three pieces equal `t^{-(1+ε)} R(t)` with `‖R‖ ≤ bound_constant`
/// for `t ≥ t*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderBundle {
    pub alpha: Rational,
    pub s_term: Vec<GradedTerm>,
    pub w_term: Vec<GradedTerm>,
    /// `1 + δ` when a perturbation is present.
    pub u_exponent: Option<Rational>,
    pub epsilon: Rational,
    pub bound_constant: f64,
}

impl RemainderBundle {
    /// `t^{-(k+1)α}S(t) − t^{-(1+α)}W(t)`, the computable part of the remainder.
    pub fn eval_sw(&self, dim: usize, t: f64) -> DMatrix<Complex64> {
        let s = eval_graded_terms(&self.s_term, &self.alpha, 0.0, dim, t);
        let w = eval_graded_terms(&self.w_term, &self.alpha, 1.0, dim, t);
        s - w
    }

    /// `W(t) = Σ_j t^{-(j-1)α} (−jα Y_j(t))`, in the grouping that multiplies `t^{-(1+α)}`.
    pub fn eval_w(&self, dim: usize, t: f64) -> DMatrix<Complex64> {
        eval_graded_terms(&self.w_term, &self.alpha, -self.alpha.to_f64(), dim, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::QMatrix;
    use crate::rational::{cq, q};
    use crate::trigpoly::Frequency;

    fn poly(entries: &[(i64, i64, [[(i64, i64); 2]; 2])]) -> TrigPolyMatrix {
        TrigPolyMatrix::from_terms(
            2,
            entries.iter().map(|&(fn_, fd, m)| {
                let qm = QMatrix::from_rows(
                    m.iter().map(|r| r.iter().map(|&(a, b)| cq(q(a, 5), q(b, 7))).collect()).collect(),
                )
                .unwrap();
                (Frequency(q(fn_, fd)), qm)
            }),
        )
        .unwrap()
    }

    #[test]
    fn identity_times_series() {
        let x = GradedOscSeries::new(
            q(1, 2),
            vec![
                poly(&[(0, 1, [[(1, 0), (2, 1)], [(0, 0), (3, 0)]])]),
                poly(&[(1, 1, [[(1, 1), (0, 0)], [(2, 0), (0, 3)]])]),
                poly(&[(-2, 3, [[(0, 1), (1, 0)], [(0, 0), (1, 1)]])]),
            ],
        )
        .unwrap();
        let id = GradedOscSeries::identity(2, q(1, 2), 0);
        let (prod, overflow) = id.mul(&x, 2).unwrap();
        assert_eq!(prod, x);
        assert!(overflow.is_empty());
    }

    #[test]
    fn binomial_overflow() {
        let y1 = poly(&[(1, 1, [[(1, 0), (0, 0)], [(1, 1), (0, 0)]])]);
        let z1 = poly(&[(-1, 2, [[(0, 0), (2, 0)], [(0, 1), (1, 0)]])]);
        let id = TrigPolyMatrix::identity(2);
        let a = GradedOscSeries::new(q(1, 1), vec![id.clone(), y1.clone()]).unwrap();
        let b = GradedOscSeries::new(q(1, 1), vec![id.clone(), z1.clone()]).unwrap();
        let (prod, overflow) = a.mul(&b, 1).unwrap();
        assert_eq!(prod.grades(), &[id, y1.checked_add(&z1).unwrap()]);
        assert_eq!(overflow, vec![GradedTerm { grade: 2, poly: y1.checked_mul(&z1).unwrap() }]);
    }

    #[test]
    fn mismatched_alpha_rejected() {
        let a = GradedOscSeries::identity(2, q(1, 2), 1);
        let b = GradedOscSeries::identity(2, q(1, 3), 1);
        assert!(matches!(a.mul(&b, 1), Err(Error::AlphaMismatch { .. })));
        let c = GradedOscSeries::identity(3, q(1, 2), 1);
        assert!(matches!(a.mul(&c, 1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn derivative_of_constant_series() {
        let c1 = QMatrix::identity(2).scale_real(&q(3, 1));
        let c2 = QMatrix::identity(2).scale_real(&q(-1, 2));
        let x = GradedOscSeries::new(
            q(1, 3),
            vec![TrigPolyMatrix::identity(2), TrigPolyMatrix::constant(c1.clone()), TrigPolyMatrix::constant(c2.clone())],
        )
        .unwrap();
        let (osc, w) = x.derivative();
        assert!(osc.grades().iter().all(TrigPolyMatrix::is_zero));
        assert_eq!(
            w,
            vec![
                GradedTerm { grade: 1, poly: TrigPolyMatrix::constant(c1.scale_real(&q(-1, 3))) },
                GradedTerm { grade: 2, poly: TrigPolyMatrix::constant(c2.scale_real(&q(-2, 3))) },
            ]
        );
        let (osc0, w0) = GradedOscSeries::identity(2, q(1, 1), 0).derivative();
        assert!(osc0.grade(0).is_zero() && w0.is_empty());
    }

    #[test]
    fn eval_rejects_nonpositive_time() {
        let x = GradedOscSeries::identity(2, q(1, 1), 1);
        assert!(x.eval(0.0).is_err());
        assert!(x.eval(-1.0).is_err());
        let v = x.eval(3.7).unwrap();
        assert!((v - DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn grade_zero_only_ignores_alpha() {
        let p = poly(&[(2, 1, [[(1, 1), (2, 0)], [(0, 3), (1, 0)]])]);
        for alpha in [q(1, 1), q(1, 3), q(2, 5)] {
            let x = GradedOscSeries::new(alpha, vec![p.clone()]).unwrap();
            assert!((x.eval(4.2).unwrap() - p.eval(4.2)).norm() < 1e-14);
        }
    }

    #[test]
    fn threshold_cases() {
        let zero = GradedOscSeries::identity(2, q(1, 2), 2);
        assert_eq!(zero.invertibility_threshold().unwrap(), 1.0);

        // ‖Y1‖ = 8 with α = 1/2: 8 t^{-1/2} ≤ 1/2 first holds at t = 256
        let y1 = TrigPolyMatrix::constant(
            QMatrix::from_real_rows(vec![vec![q(4, 1), q(0, 1)], vec![q(0, 1), q(4, 1)]]).unwrap(),
        );
        let x = GradedOscSeries::new(q(1, 2), vec![TrigPolyMatrix::identity(2), y1.clone()]).unwrap();
        assert_eq!(x.invertibility_threshold().unwrap(), 256.0);

        let doubled = GradedOscSeries::new(q(1, 2), vec![TrigPolyMatrix::identity(2), y1.scale_real(&q(2, 1))]).unwrap();
        assert!(doubled.invertibility_threshold().unwrap() >= 256.0);

        let not_id = GradedOscSeries::new(q(1, 2), vec![y1]).unwrap();
        assert_eq!(not_id.invertibility_threshold(), Err(Error::GradeZeroNotIdentity));
    }
}
