//! Floating-point helpers for complex matrices.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues from a complex Schur decomposition, in Schur order.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)]];
    }
    let t = Schur::new(m.clone()).unpack().1;
    (0..m.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigenvalues and unit eigenvectors (as columns).
///
/// Eigenvectors are obtained by back-substitution on the triangular Schur
/// factor, which is well defined when the eigenvalues are distinct.
pub fn eigen(m: &CMatrix) -> (Vec<Complex64>, CMatrix) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)]], CMatrix::identity(1, 1));
    }
    let (q, t) = Schur::new(m.clone()).unpack();
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut vectors = CMatrix::zeros(n, n);
    for k in 0..n {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * v[j]).sum();
            let mut d = t[(i, i)] - values[k];
            if d.norm() < 1e-300 {
                d = Complex64::new(f64::EPSILON * scale, 0.0);
            }
            v[i] = -s / d;
        }
        let col = &q * nalgebra::DVector::from_vec(v);
        let norm = col.norm();
        vectors.set_column(k, &(col / Complex64::from(norm)));
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.3, 0.3), c(0.5, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        );
        let (vals, vecs) = eigen(&m);
        for k in 0..3 {
            let v = vecs.column(k);
            let r = &m * v - v * vals[k];
            assert!(r.norm() < 1e-12, "residual {}", r.norm());
        }
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.3, 0.0), c(-0.3, 0.0), c(0.0, 0.0)]);
        let mut ims: Vec<f64> = eigenvalues(&m).iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 0.3).abs() < 1e-14 && (ims[1] - 0.3).abs() < 1e-14);
    }
}
