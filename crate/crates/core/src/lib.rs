//! Solvers for the 1D viscous Burgers equation `u_t + u u_x = ν u_xx`:
//! a matrix-product-state (tensor network) integrator, a hydrodynamic
//! Schrödinger (Madelung) Hamiltonian-simulation solver, and classical
//! finite-difference and Fourier spectral baselines.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod domain;
pub mod error;
pub mod hse;
pub mod kernels;
pub mod mps;
pub mod qtn;

pub use error::{Error, Result};
