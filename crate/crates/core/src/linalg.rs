//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn from_real(n: usize, m: usize, entries: &[f64]) -> CMat {
    CMat::from_row_iterator(n, m, entries.iter().map(|&x| c(x)))
}

pub fn from_real_diag(d: &[f64]) -> CMat {
    let n = d.len();
    let mut m = CMat::zeros(n, n);
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = c(x);
    }
    m
}

pub fn re_trace(m: &CMat) -> f64 {
    m.trace().re
}

/// Frobenius norm.
pub fn frob(m: &CMat) -> f64 {
    m.norm()
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn imag_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
}

pub fn inverse(m: &CMat, context: &'static str) -> Result<CMat> {
    m.clone().try_inverse().ok_or(Error::Singular(context))
}

pub fn commutator(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

pub fn expm(x: &CMat) -> CMat {
    x.exp()
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Real coordinates of a complex matrix: real parts row-major, then imaginary parts.
pub fn to_real_vec(m: &CMat) -> DVector<f64> {
    let (r, cols) = m.shape();
    let mut v = DVector::zeros(2 * r * cols);
    for i in 0..r {
        for j in 0..cols {
            v[i * cols + j] = m[(i, j)].re;
            v[r * cols + i * cols + j] = m[(i, j)].im;
        }
    }
    v
}

pub fn from_real_vec(v: &DVector<f64>, rows: usize, cols: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = Complex64::new(v[i * cols + j], v[rows * cols + i * cols + j]);
        }
    }
    m
}

/// Orthonormal basis of the kernel of a real matrix, as columns.
pub fn kernel(a: &DMatrix<f64>, cols: usize, tol: f64) -> DMatrix<f64> {
    if a.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad to a square system so the SVD exposes the full right singular basis.
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let scale = svd.singular_values.max().max(1.0);
    let null: Vec<_> = (0..cols)
        .filter(|&k| svd.singular_values[k] <= tol * scale)
        .map(|k| v_t.row(k).transpose())
        .collect();
    if null.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&null)
    }
}

/// Minimum-norm least-squares solution of `a x = b`, dropping singular values
/// below `rel_tol` times the largest.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let eps = rel_tol * svd.singular_values.max().max(1e-300);
    svd.solve(b, eps).expect("both singular bases requested")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lstsq_wide_system_is_min_norm() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 3.0, -1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let x = lstsq(&a, &b, 1e-13);
        assert!((&a * &x - &b).norm() < 1e-12, "{x}");
        // Minimum norm: x lies in the row space.
        let k = kernel(&a, 4, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!((k.transpose() * &x).norm() < 1e-12);
    }

    #[test]
    fn expm_of_nilpotent() {
        let x = from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!((expm(&x) - from_real(2, 2, &[1.0, 1.0, 0.0, 1.0])).norm() < 1e-15);
    }
}
