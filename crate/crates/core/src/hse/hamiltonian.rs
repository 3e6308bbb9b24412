use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::Grid1D;
use crate::error::{require_power_of_two, Error, Result};
use crate::kernels::fft::wavenumber_index;
use crate::kernels::CMatrix;

use super::encode::quantum_potential_with;

/// Default prefactor in `Q = −c ν² (D₂√ρ)/√ρ`.
pub const DEFAULT_POTENTIAL_COEFF: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    /// Tridiagonal finite-difference kinetic term.
    Fd,
    /// Dense Fourier kinetic term.
    Spectral,
}

impl HamiltonianKind {
    pub fn build(
        self,
        grid: &Grid1D,
        nu: f64,
        rho: &[f64],
        potential_coeff: f64,
    ) -> Result<CMatrix> {
        match self {
            HamiltonianKind::Fd => fd_with(grid, nu, rho, potential_coeff),
            HamiltonianKind::Spectral => spectral_with(grid, nu, rho, potential_coeff),
        }
    }
}

fn check(grid: &Grid1D, nu: f64, rho: &[f64]) -> Result<usize> {
    let n = grid.n_points();
    require_power_of_two(n)?;
    if rho.len() != n {
        return Err(Error::GridMismatch {
            left: rho.len(),
            right: n,
        });
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::param(
            "viscosity",
            format!("must be positive, got {nu}"),
        ));
    }
    Ok(n)
}

fn add_potential(h: &mut CMatrix, grid: &Grid1D, nu: f64, rho: &[f64], coeff: f64) -> Result<()> {
    let q = quantum_potential_with(rho, nu, grid, coeff)?;
    for (i, qi) in q.iter().enumerate() {
        h[(i, i)] += Complex64::new(qi / nu, 0.0);
    }
    Ok(())
}

/// `Ĥ = −(ν/2) D₂ + diag(Q/ν)`, with `D₂` the `[1, −2, 1]/Δx²` stencil on
/// every row (zero outside the domain).
pub fn build_hamiltonian_fd(grid: &Grid1D, nu: f64, rho: &[f64]) -> Result<CMatrix> {
    fd_with(grid, nu, rho, DEFAULT_POTENTIAL_COEFF)
}

fn fd_with(grid: &Grid1D, nu: f64, rho: &[f64], coeff: f64) -> Result<CMatrix> {
    let n = check(grid, nu, rho)?;
    let c = nu / (2.0 * grid.spacing() * grid.spacing());
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(2.0 * c, 0.0);
        if i + 1 < n {
            h[(i, i + 1)] = Complex64::new(-c, 0.0);
            h[(i + 1, i)] = Complex64::new(-c, 0.0);
        }
    }
    add_potential(&mut h, grid, nu, rho, coeff)?;
    Ok(h)
}

/// `Ĥ = F† diag(ν k²/2) F + diag(Q/ν)` with `k = 2πm`, the samples taken as
/// one period of `[0, 1)`.
pub fn build_hamiltonian_spectral(grid: &Grid1D, nu: f64, rho: &[f64]) -> Result<CMatrix> {
    spectral_with(grid, nu, rho, DEFAULT_POTENTIAL_COEFF)
}

fn spectral_with(grid: &Grid1D, nu: f64, rho: &[f64], coeff: f64) -> Result<CMatrix> {
    let n = check(grid, nu, rho)?;
    // circulant: first column c_d = (1/N) Σ_m (ν k_m²/2) e^{2πi m d/N}
    let col: Vec<f64> = (0..n)
        .map(|d| {
            (0..n)
                .map(|j| {
                    let m = wavenumber_index(j, n) as f64;
                    let k = 2.0 * PI * m;
                    0.5 * nu * k * k * (2.0 * PI * m * d as f64 / n as f64).cos()
                })
                .sum::<f64>()
                / n as f64
        })
        .collect();
    let mut h = CMatrix::from_fn(n, n, |a, b| Complex64::new(col[(a + n - b) % n], 0.0));
    add_potential(&mut h, grid, nu, rho, coeff)?;
    Ok(h)
}
