//! Matrix product states and operators over `L` binary sites.
//!
//! Site 0 carries the most significant bit of the grid index, so the MPS of
//! a length-`2^L` vector `v` satisfies `v[i₀ i₁ … i_{L−1}] = A⁽⁰⁾[i₀] ⋯ A⁽ᴸ⁻¹⁾[i_{L−1}]`.

mod dump;
mod mpo;
mod state;

pub use mpo::{mpo_apply, mpo_contract, mpo_from_matrix, Mpo, Tensor4, MPO_MAX_SITES};
pub use state::{
    direct_sum, entanglement_entropy, hadamard_product, mps_add, mps_from_vector, mps_hadamard,
    mps_to_vector, mps_truncate, schmidt_values, Mps, Tensor3, Truncated, TruncationPolicy,
    BOND_CAP, DENSE_MAX_SITES,
};
