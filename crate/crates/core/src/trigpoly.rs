//! Matrix trigonometric polynomials `Σ_λ M_λ e^{iλt}` over a rational frequency lattice.
//!
//! Coefficients are exact complex rationals and frequencies exact rationals,
//! so a resonance (a combination frequency landing on zero) is detected by
//! equality, never by a tolerance. Terms are stored sorted by frequency and
//! all-zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::{ComplexRational, Rational};

/// Angular frequency of one term, in radians per unit time. Zero is the mean slot.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frequency(pub Rational);

impl Frequency {
    pub fn zero() -> Self {
        Frequency(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl From<Rational> for Frequency {
    fn from(r: Rational) -> Self {
        Frequency(r)
    }
}

impl Add<&Frequency> for &Frequency {
    type Output = Frequency;
    fn add(self, rhs: &Frequency) -> Frequency {
        Frequency(&self.0 + &rhs.0)
    }
}

impl Neg for &Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        Frequency(-&self.0)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One serialized term: `{frequency: "p/q", matrix: [[["re","im"], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolyTerm {
    pub frequency: Frequency,
    pub matrix: QMatrix,
}

/// A matrix of class Σ: finitely many `e^{iλt}` terms with exact matrix coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct TrigPolyMatrix {
    dim: usize,
    terms: BTreeMap<Frequency, QMatrix>,
}

impl TrigPolyMatrix {
    /// The zero polynomial of the given dimension.
    pub fn zero(dim: usize) -> Self {
        TrigPolyMatrix { dim, terms: BTreeMap::new() }
    }

    pub fn constant(m: QMatrix) -> Self {
        Self::single(Frequency::zero(), m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(QMatrix::identity(dim))
    }

    /// `m · e^{iλt}`.
    pub fn single(frequency: Frequency, m: QMatrix) -> Self {
        let mut p = Self::zero(m.dim());
        p.accumulate(frequency, m);
        p
    }

    /// Sums the given terms, merging equal frequencies and pruning zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Frequency, QMatrix)>,
    {
        let mut p = Self::zero(dim);
        for (f, m) in terms {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: m.dim() });
            }
            p.accumulate(f, m);
        }
        Ok(p)
    }

    fn accumulate(&mut self, frequency: Frequency, m: QMatrix) {
        if m.is_zero() {
            return;
        }
        match self.terms.remove(&frequency) {
            Some(prev) => {
                let sum = &prev + &m;
                if !sum.is_zero() {
                    self.terms.insert(frequency, sum);
                }
            }
            None => {
                self.terms.insert(frequency, m);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing frequency order.
    pub fn terms(&self) -> impl Iterator<Item = (&Frequency, &QMatrix)> {
        self.terms.iter()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &Frequency> {
        self.terms.keys()
    }

    pub fn coefficient(&self, frequency: &Frequency) -> Option<&QMatrix> {
        self.terms.get(frequency)
    }

    /// The zero-frequency coefficient (zero matrix if absent).
    pub fn mean(&self) -> QMatrix {
        self.terms.get(&Frequency::zero()).cloned().unwrap_or_else(|| QMatrix::zeros(self.dim))
    }

    /// The polynomial with its mean term removed.
    pub fn oscillating_part(&self) -> Self {
        let mut p = self.clone();
        p.terms.remove(&Frequency::zero());
        p
    }

    /// Conjugate symmetry: `coeff(−λ) == conj(coeff(λ))` for every λ.
    pub fn is_real_valued(&self) -> bool {
        self.terms.iter().all(|(f, m)| self.terms.get(&-f).is_some_and(|mirror| *mirror == m.conj()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (f, m) in &other.terms {
            out.accumulate(f.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    /// Term-pair products; the product frequency is the sum of the factor frequencies.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                out.accumulate(f + g, a * b);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|_, m| -m)
    }

    pub fn scale(&self, k: &ComplexRational) -> Self {
        self.map_coefficients(|_, m| m.scale(k))
    }

    pub fn scale_real(&self, k: &Rational) -> Self {
        self.map_coefficients(|_, m| m.scale_real(k))
    }

    /// `M · P(t)` for a constant matrix `M`.
    pub fn left_mul_const(&self, m: &QMatrix) -> Result<Self> {
        self.same_dim_matrix(m)?;
        Ok(self.map_coefficients(|_, c| m * c))
    }

    /// `P(t) · M` for a constant matrix `M`.
    pub fn right_mul_const(&self, m: &QMatrix) -> Result<Self> {
        self.same_dim_matrix(m)?;
        Ok(self.map_coefficients(|_, c| c * m))
    }

    /// `d/dt`: every coefficient is multiplied by `iλ`, so the mean term vanishes.
    pub fn derivative(&self) -> Self {
        self.map_coefficients(|f, m| m.scale(&ComplexRational::imag(f.0.clone())))
    }

    /// Sum of [`QMatrix::coeff_norm`] over all terms; bounds the sup-norm over t.
    pub fn coeff_norm(&self) -> Rational {
        self.terms.values().map(QMatrix::coeff_norm).sum()
    }

    /// Floating-point evaluation `Σ_λ coeff(λ) e^{iλt}`.
    pub fn eval(&self, t: f64) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (f, m) in &self.terms {
            let phase = Complex64::from_polar(1.0, f.0.to_f64() * t);
            out += m.to_c64() * phase;
        }
        out
    }

    /// Serializable term list in frequency order.
    pub fn to_terms(&self) -> Vec<TrigPolyTerm> {
        self.terms
            .iter()
            .map(|(f, m)| TrigPolyTerm { frequency: f.clone(), matrix: m.clone() })
            .collect()
    }

    fn map_coefficients(&self, mut f: impl FnMut(&Frequency, &QMatrix) -> QMatrix) -> Self {
        let mut out = Self::zero(self.dim);
        for (freq, m) in &self.terms {
            out.accumulate(freq.clone(), f(freq, m));
        }
        out
    }

    /// Applies an entrywise frequency shift: entry `(p, q)` of every term moves
    /// from `λ` to `λ + shift(p, q)`.
    pub(crate) fn shift_entries(&self, shift: impl Fn(usize, usize) -> Rational) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n);
        for (f, m) in &self.terms {
            for p in 0..n {
                for q in 0..n {
                    if m[(p, q)].is_zero() {
                        continue;
                    }
                    let mut single = QMatrix::zeros(n);
                    single[(p, q)] = m[(p, q)].clone();
                    out.accumulate(Frequency(&f.0 + &shift(p, q)), single);
                }
            }
        }
        out
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    fn same_dim_matrix(&self, m: &QMatrix) -> Result<()> {
        if self.dim != m.dim() {
            return Err(Error::DimensionMismatch { left: self.dim, right: m.dim() });
        }
        Ok(())
    }
}

impl fmt::Debug for TrigPolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl Serialize for TrigPolyMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_terms().serialize(serializer)
    }
}
