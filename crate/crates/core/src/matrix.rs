//! Small dense square matrices over [`ComplexRational`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{ComplexRational, Rational};

/// Exact `n × n` matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    n: usize,
    data: Vec<ComplexRational>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        QMatrix { n, data: vec![ComplexRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ComplexRational::one();
        }
        m
    }

    pub fn diagonal(entries: &[ComplexRational]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `rows.len()`.
    pub fn from_rows(rows: Vec<Vec<ComplexRational>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { left: n, right: bad.len() });
        }
        Ok(QMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor for real rational entries.
    pub fn from_real_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(ComplexRational::real).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<ComplexRational>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ComplexRational> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ComplexRational::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(ComplexRational::is_real)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn conj(&self) -> Self {
        QMatrix { n: self.n, data: self.data.iter().map(ComplexRational::conj).collect() }
    }

    pub fn scale(&self, k: &ComplexRational) -> Self {
        QMatrix { n: self.n, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn scale_real(&self, k: &Rational) -> Self {
        QMatrix { n: self.n, data: self.data.iter().map(|x| x.scale(k)).collect() }
    }

    /// Entrywise `|re| + |im|` summed over the matrix.
    ///
    /// Exact, and an upper bound for both the entrywise modulus sum and the
    /// spectral norm.
    pub fn coeff_norm(&self) -> Rational {
        self.data.iter().map(|x| x.re.abs() + x.im.abs()).sum()
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].to_c64())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(self + rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(self * rhs)
    }

    pub(crate) fn same_dim(&self, rhs: &Self) -> Result<()> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch { left: self.n, right: rhs.n });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = ComplexRational;
    fn index(&self, (i, j): (usize, usize)) -> &ComplexRational {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexRational {
        &mut self.data[i * self.n + j]
    }
}

// The unchecked operators assume equal dimensions; use the `checked_*`
// variants at API boundaries.
impl Add<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        debug_assert_eq!(self.n, rhs.n);
        QMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        debug_assert_eq!(self.n, rhs.n);
        QMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { n: self.n, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<ComplexRational>>::deserialize(deserializer)?;
        if rows.is_empty() {
            return Err(de::Error::custom("matrix must have at least one row"));
        }
        QMatrix::from_rows(rows).map_err(|_| de::Error::custom("matrix must be square"))
    }
}
