//! Hermitian eigendecomposition, unitary propagators and Kronecker products.

use nalgebra::{DMatrix, Scalar};
use num_complex::Complex64;
use std::ops::Mul;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct Eigh {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

/// Relative Frobenius-norm asymmetry `‖H − H†‖ / ‖H‖`.
pub fn hermitian_defect(h: &CMatrix) -> f64 {
    let norm = h.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (h - h.adjoint()).norm() / norm
}

pub fn hermitian_eigh(h: &CMatrix) -> Result<Eigh> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("eigh input"));
    }
    let defect = hermitian_defect(h);
    if defect > 1e-10 {
        return Err(Error::NonHermitian(defect));
    }
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors =
        CMatrix::from_fn(h.nrows(), h.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigh {
        eigenvalues,
        eigenvectors,
    })
}

/// `e^{−iHt}` through the eigendecomposition of `H`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = hermitian_eigh(h)?;
    Ok(propagator_from_eigh(&eig, t))
}

pub fn propagator_from_eigh(eig: &Eigh, t: f64) -> CMatrix {
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        scaled.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    scaled * v.adjoint()
}

pub fn kron<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar + Copy + Mul<Output = T>,
{
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |r, c| {
        a[(r / rb, c / cb)] * b[(r % rb, c % cb)]
    })
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let g = u.adjoint() * u;
    (g - CMatrix::identity(n, n))
        .iter()
        .fold(0.0, |m, z| m.max(z.norm()))
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}
