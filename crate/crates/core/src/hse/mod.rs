//! Hydrodynamic Schrödinger solver: the velocity field is carried by the
//! phase of an `n`-qubit wavefunction and evolved under a Pauli-decomposed
//! Hamiltonian.

mod encode;
mod evolve;
mod hamiltonian;
mod noise;
mod pauli;
mod run;

pub use encode::{
    madelung_encode, phase_gradient_readout, quantum_potential, quantum_potential_with, Readout,
    Wavefunction, AMPLITUDE_FLOOR,
};
pub use evolve::{
    exact_step, trotter_step, variational_circuit, variational_loss, variational_trotter_fit,
    AdamSettings, TrotterPlan, VariationalFit, EXACT_MAX_QUBITS, VARIATIONAL_MAX_QUBITS,
};
pub use hamiltonian::{
    build_hamiltonian_fd, build_hamiltonian_spectral, HamiltonianKind, DEFAULT_POTENTIAL_COEFF,
};
pub use noise::{noisy_evolution, DensityMatrix, NoiseConfig, NOISE_MAX_QUBITS};
pub use pauli::{pauli_decompose, PauliString, PauliTerm, PauliTermSum, PAULI_MAX_QUBITS};
pub use run::{
    circuit_depth_estimate, hse_run, DepthEstimate, DepthMode, Evolution, HseOptions, HseRun,
    HseStep,
};
