//! Classical Burgers solvers: finite differences (explicit RK4 and
//! semi-implicit GMRES), Fourier pseudo-spectral, and reference runs.

pub mod fd;
pub mod reference;
pub mod spectral;

pub use fd::{
    march, run_explicit_rk4, run_semi_implicit, Boundary, FdBurgers, FdOperators, RunOutput,
    SemiImplicitStep,
};
pub use reference::{
    downsample, reference_grid_size, reference_solution, reference_solution_with,
    REFERENCE_MIN_NODES,
};
pub use spectral::{spectral_run, spectral_step, SpectralBurgers, SpectralOptions};
