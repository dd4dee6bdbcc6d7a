//! Dense complex matrix helpers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest one-norm the Taylor series is evaluated at after scaling.
const TAYLOR_NORM_BOUND: f64 = 0.5;
const TAYLOR_MAX_TERMS: usize = 60;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Maximum column sum of absolute values.
pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry-wise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Largest entry-wise modulus of `U†U - I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let dim = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(dim, dim))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part of `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The input is scaled by `2^-s` until its one-norm is at most 0.5, the
/// series is summed until the next term is below machine precision relative
/// to the partial sum, and the result is squared `s` times.
pub fn matrix_exponential(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix_exponential input"));
    }
    let dim = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > TAYLOR_NORM_BOUND {
        (norm / TAYLOR_NORM_BOUND).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(squarings as i32));

    let mut sum = CMatrix::identity(dim, dim);
    let mut term = CMatrix::identity(dim, dim);
    for k in 1..=TAYLOR_MAX_TERMS {
        term = (&term * &scaled).unscale(k as f64);
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * 1e-2 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}
