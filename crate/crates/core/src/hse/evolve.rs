use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{expm_hermitian, CMatrix};

use super::encode::Wavefunction;
use super::pauli::{PauliString, PauliTermSum};

pub const EXACT_MAX_QUBITS: u32 = 10;
pub const VARIATIONAL_MAX_QUBITS: u32 = 6;

/// `ψ ← exp(−iθP) ψ = cos θ ψ − i sin θ Pψ`.
fn rotate(psi: &mut [Complex64], p: &PauliString, theta: f64, scratch: &mut [Complex64]) {
    if theta == 0.0 {
        return;
    }
    let (s, c) = theta.sin_cos();
    if p.is_identity() {
        let ph = Complex64::new(c, -s);
        psi.iter_mut().for_each(|a| *a *= ph);
        return;
    }
    p.apply(psi, scratch);
    let mis = Complex64::new(0.0, -s);
    for (a, pa) in psi.iter_mut().zip(scratch.iter()) {
        *a = *a * c + mis * pa;
    }
}

/// First-order product `∏ⱼ exp(−i cⱼ Pⱼ dt)`, applied in term order.
pub fn trotter_step(psi: &Wavefunction, terms: &PauliTermSum, dt: f64) -> Result<Wavefunction> {
    check_register(psi, terms)?;
    let mut amps = psi.amplitudes().to_vec();
    let mut scratch = vec![Complex64::new(0.0, 0.0); amps.len()];
    for t in terms.terms() {
        rotate(&mut amps, &t.string, t.coeff * dt, &mut scratch);
    }
    Ok(Wavefunction::from_raw(amps))
}

fn check_register(psi: &Wavefunction, terms: &PauliTermSum) -> Result<()> {
    if psi.qubits() != terms.qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit state with {}-qubit Hamiltonian",
            psi.qubits(),
            terms.qubits()
        )));
    }
    Ok(())
}

/// `e^{−iH dt} ψ` by Hermitian eigendecomposition.
pub fn exact_step(psi: &Wavefunction, h: &CMatrix, dt: f64) -> Result<Wavefunction> {
    if psi.qubits() > EXACT_MAX_QUBITS {
        return Err(Error::GuardExceeded {
            what: "qubits for exact evolution",
            value: psi.qubits() as usize,
            limit: EXACT_MAX_QUBITS as usize,
        });
    }
    if h.nrows() != psi.len() || h.ncols() != psi.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} Hamiltonian for a length-{} state",
            h.nrows(),
            h.ncols(),
            psi.len()
        )));
    }
    if dt == 0.0 {
        return Ok(psi.clone());
    }
    let u = expm_hermitian(h, dt)?;
    let v = u * nalgebra::DVector::from_column_slice(psi.amplitudes());
    Ok(Wavefunction::from_raw(v.as_slice().to_vec()))
}

/// Time grid and (optionally) trained angles of a Trotter evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub dt: f64,
    pub steps: usize,
    pub layers: usize,
    /// `angles[l][j]` for layer `l`, term `j`; empty for fixed angles.
    pub angles: Vec<Vec<f64>>,
}

impl TrotterPlan {
    /// `steps = T / dt`, which must be an integer within 1e-12.
    pub fn new(total_time: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if !(total_time >= 0.0 && total_time.is_finite()) {
            return Err(Error::param("total_time", "must be >= 0"));
        }
        let steps = (total_time / dt).round() as usize;
        if (steps as f64 * dt - total_time).abs() > 1e-12 {
            return Err(Error::param(
                "dt",
                format!("T = {total_time} is not an integer multiple of dt = {dt}"),
            ));
        }
        Ok(Self {
            dt,
            steps,
            layers: 1,
            angles: Vec::new(),
        })
    }

    pub fn with_layers(mut self, layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::param("layers", "must be >= 1"));
        }
        self.layers = layers;
        Ok(self)
    }
}

/// `∏_l ∏_j exp(−i θ_{l,j} P_j) ψ₀`; `theta` is layer-major.
pub fn variational_circuit(
    psi0: &Wavefunction,
    terms: &PauliTermSum,
    theta: &[f64],
) -> Result<Wavefunction> {
    check_register(psi0, terms)?;
    let m = terms.len();
    if m == 0 || !theta.len().is_multiple_of(m) {
        return Err(Error::DimensionMismatch(format!(
            "{} angles for {m} terms",
            theta.len()
        )));
    }
    let mut amps = psi0.amplitudes().to_vec();
    let mut scratch = vec![Complex64::new(0.0, 0.0); amps.len()];
    for layer in theta.chunks(m) {
        for (t, th) in terms.terms().iter().zip(layer) {
            rotate(&mut amps, &t.string, *th, &mut scratch);
        }
    }
    Ok(Wavefunction::from_raw(amps))
}

/// `‖ψ(θ) − ψ_target‖²`.
pub fn variational_loss(
    psi0: &Wavefunction,
    terms: &PauliTermSum,
    theta: &[f64],
    target: &Wavefunction,
) -> Result<f64> {
    Ok(variational_circuit(psi0, terms, theta)?.distance_sq(target))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamSettings {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Central-difference step for the gradient.
    pub fd_step: f64,
    /// Half-width of the uniform perturbation added to the initial angles.
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for AdamSettings {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            fd_step: 1e-5,
            perturbation: 1e-3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariationalFit {
    /// Best angles seen, layer-major.
    pub theta: Vec<f64>,
    pub initial_theta: Vec<f64>,
    /// Loss at the initial angles followed by the loss after each update.
    pub loss_trace: Vec<f64>,
    pub best_loss: f64,
    /// No iterate improved on the initial loss.
    pub stagnated: bool,
}

impl VariationalFit {
    pub fn initial_loss(&self) -> f64 {
        self.loss_trace[0]
    }
}

/// Fits `layers` layers of per-term rotations to `e^{−iH dt} ψ₀` with Adam
/// and central-difference gradients. Initial angles are `cⱼ dt / L` plus a
/// seeded uniform perturbation.
pub fn variational_trotter_fit(
    psi0: &Wavefunction,
    terms: &PauliTermSum,
    h: &CMatrix,
    dt: f64,
    layers: usize,
    iters: usize,
    adam: AdamSettings,
) -> Result<VariationalFit> {
    if psi0.qubits() > VARIATIONAL_MAX_QUBITS {
        return Err(Error::GuardExceeded {
            what: "qubits for variational fit",
            value: psi0.qubits() as usize,
            limit: VARIATIONAL_MAX_QUBITS as usize,
        });
    }
    if layers == 0 {
        return Err(Error::param("layers", "must be >= 1"));
    }
    let target = exact_step(psi0, h, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(adam.seed);
    let mut theta: Vec<f64> = (0..layers)
        .flat_map(|_| terms.terms().iter().map(|t| t.coeff * dt / layers as f64))
        .collect();
    if adam.perturbation > 0.0 {
        for th in theta.iter_mut() {
            *th += rng.random_range(-adam.perturbation..adam.perturbation);
        }
    }
    let initial_theta = theta.clone();
    let loss = |th: &[f64]| variational_loss(psi0, terms, th, &target);

    let mut trace = vec![loss(&theta)?];
    let mut best = (trace[0], theta.clone());
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let h_fd = adam.fd_step;
    for it in 1..=iters {
        let grad: Vec<f64> = (0..theta.len())
            .into_par_iter()
            .map(|k| {
                let mut tp = theta.clone();
                tp[k] += h_fd;
                let lp = loss(&tp)?;
                tp[k] -= 2.0 * h_fd;
                let lm = loss(&tp)?;
                Ok((lp - lm) / (2.0 * h_fd))
            })
            .collect::<Result<_>>()?;
        let b1t = 1.0 - adam.beta1.powi(it as i32);
        let b2t = 1.0 - adam.beta2.powi(it as i32);
        for k in 0..theta.len() {
            m[k] = adam.beta1 * m[k] + (1.0 - adam.beta1) * grad[k];
            v[k] = adam.beta2 * v[k] + (1.0 - adam.beta2) * grad[k] * grad[k];
            theta[k] -= adam.learning_rate * (m[k] / b1t) / ((v[k] / b2t).sqrt() + adam.epsilon);
        }
        let l = loss(&theta)?;
        if l < best.0 {
            best = (l, theta.clone());
        }
        trace.push(l);
    }
    let stagnated = iters > 0 && best.0 >= trace[0];
    Ok(VariationalFit {
        theta: best.1,
        initial_theta,
        loss_trace: trace,
        best_loss: best.0,
        stagnated,
    })
}
