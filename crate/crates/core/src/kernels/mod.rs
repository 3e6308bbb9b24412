//! Dense linear-algebra and transform kernels shared by the solvers.

pub mod fft;
pub mod gmres;
pub mod linalg;
pub mod svd;

pub use fft::{fft, fft_in_place, Direction};
pub use gmres::{gmres_solve, thomas_solve, GmresOptions, GmresOutcome};
pub use linalg::{expm_hermitian, hermitian_eigh, kron, CMatrix, Eigh};
pub use svd::{thin_svd, truncated_svd, SvdResult};
