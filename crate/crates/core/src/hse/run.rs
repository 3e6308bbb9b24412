use crate::domain::{initial_condition, Grid1D, SimConfig, VelocityField};
use crate::error::{require_power_of_two, Error, Result};

use super::encode::{madelung_encode, phase_gradient_readout};
use super::evolve::{
    exact_step, trotter_step, variational_circuit, variational_trotter_fit, AdamSettings,
    TrotterPlan,
};
use super::hamiltonian::{HamiltonianKind, DEFAULT_POTENTIAL_COEFF};
use super::pauli::{pauli_decompose, PauliTermSum, PAULI_MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthMode {
    Trotter,
    Variational { layers: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthEstimate {
    pub per_step: usize,
    pub total: usize,
}

/// One Pauli rotation counts as one gate, identity included.
pub fn circuit_depth_estimate(
    terms: &PauliTermSum,
    steps: usize,
    mode: DepthMode,
) -> DepthEstimate {
    let per_step = match mode {
        DepthMode::Trotter => terms.len(),
        DepthMode::Variational { layers } => layers * terms.len(),
    };
    DepthEstimate {
        per_step,
        total: per_step * steps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    Trotter,
    Variational { layers: usize, iters: usize },
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HseOptions {
    pub method: HamiltonianKind,
    pub dt: f64,
    pub evolution: Evolution,
    pub potential_coeff: f64,
    pub seed: u64,
}

impl Default for HseOptions {
    fn default() -> Self {
        Self {
            method: HamiltonianKind::Fd,
            dt: 0.005,
            evolution: Evolution::Trotter,
            potential_coeff: DEFAULT_POTENTIAL_COEFF,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HseStep {
    pub t: f64,
    pub depth: usize,
    pub norm: f64,
    pub max_abs_u: f64,
    pub readout_flagged: bool,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct HseRun {
    pub field: VelocityField,
    pub steps: Vec<HseStep>,
    /// Readout `u` exceeded `10·max|u₀|` or became non-finite; the run
    /// stopped at that step.
    pub diverged: bool,
    /// Measurements charged to readout: `N` per step.
    pub readout_cost: usize,
    /// Largest per-step gate count over the run.
    pub depth_per_step: usize,
}

impl HseRun {
    /// Relative L2 error of every step's readout against `reference(t)`.
    pub fn l2_trace<F>(&self, mut reference: F) -> Result<Vec<f64>>
    where
        F: FnMut(f64) -> Result<VelocityField>,
    {
        self.steps
            .iter()
            .map(|s| {
                let r = reference(s.t)?;
                Ok(crate::domain::relative_l2_error_slices(&s.u, r.values())?.value)
            })
            .collect()
    }
}

/// Encode, then per step: rebuild `Ĥ` from the current density, decompose,
/// evolve by `dt`, read the velocity out.
pub fn hse_run(config: &SimConfig, n: usize, opts: HseOptions) -> Result<HseRun> {
    config.validate()?;
    let qubits = require_power_of_two(n)?;
    if qubits > PAULI_MAX_QUBITS {
        return Err(Error::GuardExceeded {
            what: "qubits for HSE",
            value: qubits as usize,
            limit: PAULI_MAX_QUBITS as usize,
        });
    }
    let plan = TrotterPlan::new(config.total_time, opts.dt)?;
    if let Evolution::Variational { layers, .. } = opts.evolution {
        if layers == 0 {
            return Err(Error::param("layers", "must be >= 1"));
        }
    }
    let grid = Grid1D::new(n)?;
    let nu = config.viscosity;
    let u0 = initial_condition(config.ic_kind, &grid, config);
    let limit = 10.0 * u0.max_abs().max(f64::MIN_POSITIVE);
    let mut psi = madelung_encode(&u0, nu)?;
    let mut field = u0;
    let mut steps = Vec::with_capacity(plan.steps);
    let mut diverged = false;
    let mut depth_per_step = 0;

    for step in 1..=plan.steps {
        let rho = psi.density();
        if rho.iter().any(|r| !(*r > 0.0)) {
            diverged = true;
            break;
        }
        let h = opts.method.build(&grid, nu, &rho, opts.potential_coeff)?;
        let terms = pauli_decompose(&h)?;
        let mode = match opts.evolution {
            Evolution::Variational { layers, .. } => DepthMode::Variational { layers },
            _ => DepthMode::Trotter,
        };
        let depth = circuit_depth_estimate(&terms, 1, mode).per_step;
        depth_per_step = depth_per_step.max(depth);
        psi = match opts.evolution {
            Evolution::Trotter => trotter_step(&psi, &terms, opts.dt)?,
            Evolution::Exact => exact_step(&psi, &h, opts.dt)?,
            Evolution::Variational { layers, iters } => {
                let adam = AdamSettings {
                    seed: opts.seed.wrapping_add(step as u64),
                    ..AdamSettings::default()
                };
                let fit = variational_trotter_fit(&psi, &terms, &h, opts.dt, layers, iters, adam)?;
                variational_circuit(&psi, &terms, &fit.theta)?
            }
        };
        let readout = match phase_gradient_readout(&psi, nu, &grid) {
            Ok(r) => r,
            Err(Error::NonFinite(_)) | Err(Error::Unsupported(_)) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let max_abs_u = readout.field.max_abs();
        steps.push(HseStep {
            t: step as f64 * opts.dt,
            depth,
            norm: psi.norm(),
            max_abs_u,
            readout_flagged: readout.flagged(),
            u: readout.field.values().to_vec(),
        });
        field = readout.field;
        if !(max_abs_u <= limit) {
            diverged = true;
            break;
        }
    }
    Ok(HseRun {
        field,
        readout_cost: steps.len() * n,
        steps,
        diverged,
        depth_per_step,
    })
}
