use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{hermitian_eigh, CMatrix};

use super::encode::Wavefunction;
use super::evolve::trotter_step;
use super::pauli::PauliTermSum;

pub const NOISE_MAX_QUBITS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Per-qubit depolarising probability per step.
    pub p_depol: f64,
    /// Per-qubit amplitude-damping rate per step.
    pub gamma_ad: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            p_depol: 0.001,
            gamma_ad: 0.001,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            p_depol: 0.0,
            gamma_ad: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_depol", self.p_depol), ("gamma_ad", self.gamma_ad)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
    qubits: u32,
}

type Kraus = [[Complex64; 2]; 2];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl DensityMatrix {
    pub fn from_pure(psi: &Wavefunction) -> Self {
        let a = psi.amplitudes();
        let rho = CMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj());
        Self {
            rho,
            qubits: psi.qubits(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigh(&self.rho)?.eigenvalues[0])
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// `ρ ← Σ_K K_q ρ K_q†` for single-qubit Kraus operators on `qubit`
    /// (bit `n − 1 − qubit` of the index).
    fn apply_channel(&mut self, qubit: u32, kraus: &[Kraus]) {
        let dim = self.rho.nrows();
        let mask = 1usize << (self.qubits - 1 - qubit);
        let mut out = CMatrix::zeros(dim, dim);
        for k in kraus {
            // left multiply: (K ρ)[i, j] = Σ_s K[bit_i, s] ρ[i with bit s, j]
            let mut left = CMatrix::zeros(dim, dim);
            for i in 0..dim {
                let bi = (i & mask != 0) as usize;
                let i0 = i & !mask;
                for s in 0..2 {
                    let kv = k[bi][s];
                    if kv == c(0.0) {
                        continue;
                    }
                    let src = if s == 1 { i0 | mask } else { i0 };
                    for j in 0..dim {
                        left[(i, j)] += kv * self.rho[(src, j)];
                    }
                }
            }
            // right multiply by K†: (X K†)[i, j] = Σ_s X[i, j with bit s] conj(K[bit_j, s])
            for j in 0..dim {
                let bj = (j & mask != 0) as usize;
                let j0 = j & !mask;
                for s in 0..2 {
                    let kv = k[bj][s].conj();
                    if kv == c(0.0) {
                        continue;
                    }
                    let src = if s == 1 { j0 | mask } else { j0 };
                    for i in 0..dim {
                        out[(i, j)] += left[(i, src)] * kv;
                    }
                }
            }
        }
        self.rho = out;
    }

    pub fn depolarise(&mut self, qubit: u32, p: f64) {
        if p == 0.0 {
            return;
        }
        let a = (1.0 - 0.75 * p).sqrt();
        let b = (0.25 * p).sqrt();
        let i = Complex64::new(0.0, b);
        let kraus = [
            [[c(a), c(0.0)], [c(0.0), c(a)]],
            [[c(0.0), c(b)], [c(b), c(0.0)]],
            [[c(0.0), -i], [i, c(0.0)]],
            [[c(b), c(0.0)], [c(0.0), c(-b)]],
        ];
        self.apply_channel(qubit, &kraus);
    }

    pub fn amplitude_damp(&mut self, qubit: u32, gamma: f64) {
        if gamma == 0.0 {
            return;
        }
        let kraus = [
            [[c(1.0), c(0.0)], [c(0.0), c((1.0 - gamma).sqrt())]],
            [[c(0.0), c(gamma.sqrt())], [c(0.0), c(0.0)]],
        ];
        self.apply_channel(qubit, &kraus);
    }

    /// `ρ ← U ρ U†`.
    pub fn conjugate(&mut self, u: &CMatrix) {
        self.rho = u * &self.rho * u.adjoint();
    }
}

/// Dense unitary of one first-order Trotter step.
fn trotter_unitary(terms: &PauliTermSum, dt: f64) -> Result<CMatrix> {
    let dim = 1usize << terms.qubits();
    let mut u = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let mut e = vec![c(0.0); dim];
        e[b] = c(1.0);
        let col = trotter_step(&Wavefunction::from_raw(e), terms, dt)?;
        for (i, v) in col.amplitudes().iter().enumerate() {
            u[(i, b)] = *v;
        }
    }
    Ok(u)
}

/// Each step: Trotter unitary, then depolarising and amplitude-damping
/// channels on every qubit.
pub fn noisy_evolution(
    rho: &DensityMatrix,
    terms: &PauliTermSum,
    dt: f64,
    steps: usize,
    noise: NoiseConfig,
) -> Result<DensityMatrix> {
    noise.validate()?;
    if rho.qubits > NOISE_MAX_QUBITS {
        return Err(Error::GuardExceeded {
            what: "qubits for density-matrix evolution",
            value: rho.qubits as usize,
            limit: NOISE_MAX_QUBITS as usize,
        });
    }
    if terms.qubits() != rho.qubits {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit state with {}-qubit Hamiltonian",
            rho.qubits,
            terms.qubits()
        )));
    }
    let u = trotter_unitary(terms, dt)?;
    let mut out = rho.clone();
    for _ in 0..steps {
        out.conjugate(&u);
        for q in 0..out.qubits {
            out.depolarise(q, noise.p_depol);
            out.amplitude_damp(q, noise.gamma_ad);
        }
    }
    Ok(out)
}
