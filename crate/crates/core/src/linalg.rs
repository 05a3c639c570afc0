//! Dense complex matrix helpers over `nalgebra`.

use nalgebra::DMatrix;

pub use nalgebra::Complex;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;

/// Smallest eigenvalue accepted by [`hermitian_sqrt`].
pub const MIN_EIGENVALUE: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

pub fn abs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Real matrix from row-major entries.
pub fn real(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

/// Complex matrix from row-major `(re, im)` entries.
pub fn complex(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| {
        let (re, im) = entries[i * cols + j];
        c(re, im)
    })
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    Ok(norm_unchecked(m))
}

pub(crate) fn norm_unchecked(m: &CMatrix) -> f64 {
    match (m.nrows(), m.ncols()) {
        (0, _) | (_, 0) => 0.0,
        (1, 1) => abs(m[(0, 0)]),
        _ => m.clone().svd(false, false).singular_values.max(),
    }
}

/// `‖a − b‖`.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    norm_unchecked(&(a - b))
}

/// Largest entry modulus of `a − b`.
pub fn max_entry_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| abs(x - y)).fold(0.0, f64::max)
}

/// Inverse by LU with partial pivoting; `None` when singular.
pub fn invert(m: &CMatrix) -> Option<CMatrix> {
    if !m.is_square() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    m.clone().try_inverse().filter(is_finite)
}

/// `(H^{1/2}, H^{-1/2})` of a Hermitian positive definite matrix.
///
/// `h` is symmetrized first. Fails with the smallest eigenvalue when it is
/// below [`MIN_EIGENVALUE`].
pub fn hermitian_sqrt(h: &CMatrix) -> core::result::Result<(CMatrix, CMatrix), f64> {
    let n = h.nrows();
    if n == 0 {
        return Ok((h.clone(), h.clone()));
    }
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let min = eig.eigenvalues.min();
    if !(min >= MIN_EIGENVALUE) {
        return Err(min);
    }
    let v = &eig.eigenvectors;
    let scaled = |f: &dyn Fn(f64) -> f64| {
        let mut d = v.clone();
        for (j, mut col) in d.column_iter_mut().enumerate() {
            col *= c(f(eig.eigenvalues[j]), 0.0);
        }
        &d * v.adjoint()
    };
    Ok((scaled(&libm::sqrt), scaled(&|l| 1.0 / libm::sqrt(l))))
}

/// Smallest eigenvalue of the Hermitian part of `h`.
pub fn min_eigenvalue(h: &CMatrix) -> f64 {
    if h.nrows() == 0 {
        return f64::INFINITY;
    }
    ((h + h.adjoint()) * c(0.5, 0.0)).symmetric_eigen().eigenvalues.min()
}

/// `‖M*M − I‖`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    distance(&(m.adjoint() * m), &identity(m.nrows()))
}

/// Block diagonal matrix.
pub fn direct_sum(blocks: &[&CMatrix]) -> CMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut s) = (0, 0);
    for b in blocks {
        out.view_mut((r, s), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        s += b.ncols();
    }
    out
}
