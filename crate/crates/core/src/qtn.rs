//! Burgers time stepping entirely in MPS form.

use nalgebra::DMatrix;

use crate::classical::{Boundary, FdOperators};
use crate::domain::{
    conservation_diagnostics, initial_condition, ConservationReport, Grid1D, SimConfig,
    StencilOrder, VelocityField,
};
use crate::error::{require_power_of_two, Error, Result};
use crate::mps::{
    direct_sum, entanglement_entropy, hadamard_product, mpo_contract, mpo_from_matrix,
    mps_from_vector, mps_to_vector, mps_truncate, Mpo, Mps, TruncationPolicy,
};

/// Tolerance of the TT-SVD that turns FD matrices into MPOs.
pub const MPO_TOLERANCE: f64 = 1e-12;

/// Derivative MPOs for one grid. The convective gradient has zero end rows
/// because the endpoint values are held fixed.
#[derive(Debug, Clone)]
pub struct QtnOperators {
    pub gradient: Mpo,
    pub laplacian: Mpo,
    pub viscosity: f64,
}

impl QtnOperators {
    pub fn new(grid: &Grid1D, order: StencilOrder, viscosity: f64) -> Result<Self> {
        grid.qubits()?;
        let ops = FdOperators::new(grid, order, Boundary::Dirichlet)?;
        let mut d1 = ops.gradient_matrix();
        zero_end_rows(&mut d1);
        Ok(Self {
            gradient: mpo_from_matrix(&d1, MPO_TOLERANCE)?,
            laplacian: mpo_from_matrix(&ops.laplacian_matrix(), MPO_TOLERANCE)?,
            viscosity,
        })
    }
}

fn zero_end_rows(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    m.row_mut(0).fill(0.0);
    m.row_mut(n - 1).fill(0.0);
}

/// Accumulates the discarded weight of every truncation.
struct Truncator {
    policy: TruncationPolicy,
    discarded: f64,
}

impl Truncator {
    fn apply(&mut self, raw: Mps) -> Mps {
        let t = mps_truncate(&raw, self.policy);
        self.discarded += t.discarded_weight;
        t.mps
    }

    fn add(&mut self, x: &Mps, y: &Mps, a: f64, b: f64) -> Result<Mps> {
        Ok(self.apply(direct_sum(x, y, a, b)?))
    }

    fn rhs(&mut self, u: &Mps, ops: &QtnOperators) -> Result<Mps> {
        let du = self.apply(mpo_contract(&ops.gradient, u)?);
        let conv = self.apply(hadamard_product(u, &du)?);
        let lap = self.apply(mpo_contract(&ops.laplacian, u)?);
        self.add(&conv, &lap, -1.0, ops.viscosity)
    }
}

/// `−u ⊙ (D₁u) + ν D₂u`, truncated under `policy`.
pub fn qtn_rhs(u: &Mps, ops: &QtnOperators, policy: TruncationPolicy) -> Result<Mps> {
    Truncator {
        policy,
        discarded: 0.0,
    }
    .rhs(u, ops)
}

/// One telemetry row; the first row describes the initial state.
#[derive(Debug, Clone)]
pub struct StepTelemetry {
    pub t: f64,
    /// Step that led to this state (zero for the initial row).
    pub dt: f64,
    pub bonds: Vec<usize>,
    pub max_bond: usize,
    /// Entropy across the central bond.
    pub entropy_mid: f64,
    pub conservation: ConservationReport,
    /// Boundary flux `F(u) = u²/2 − ν uₓ` entering at `x = 0` minus the flux
    /// leaving at `x = 1`.
    pub net_inflow: f64,
    pub discarded_weight_total: f64,
}

#[derive(Debug, Clone)]
pub struct QtnState {
    pub state: Mps,
    pub t: f64,
    pub policy: TruncationPolicy,
    pub telemetry: Vec<StepTelemetry>,
    grid: Grid1D,
    pins: Option<(f64, f64)>,
    discarded_total: f64,
}

impl QtnState {
    /// Encodes `field`; endpoint values are pinned to `pins` after each step.
    pub fn new(
        field: &VelocityField,
        policy: TruncationPolicy,
        pins: Option<(f64, f64)>,
        nu: f64,
    ) -> Result<Self> {
        policy.validate()?;
        let state = mps_truncate(&mps_from_vector(field.values(), policy)?, policy).mps;
        let mut qs = Self {
            state,
            t: 0.0,
            policy,
            telemetry: Vec::new(),
            grid: field.grid().clone(),
            pins,
            discarded_total: 0.0,
        };
        let row = qs.record(0.0, nu)?;
        qs.telemetry.push(row);
        Ok(qs)
    }

    pub fn field(&self) -> Result<VelocityField> {
        VelocityField::new(self.grid.clone(), mps_to_vector(&self.state)?)
    }

    fn record(&self, dt: f64, nu: f64) -> Result<StepTelemetry> {
        let field = self.field()?;
        let l = self.state.n_sites();
        let entropy_mid = if l >= 2 {
            entanglement_entropy(&self.state, l / 2)?
        } else {
            0.0
        };
        Ok(StepTelemetry {
            t: self.t,
            dt,
            bonds: self.state.bond_dims(),
            max_bond: self.state.max_bond(),
            entropy_mid,
            conservation: conservation_diagnostics(&field, self.t),
            net_inflow: net_inflow(&field, nu),
            discarded_weight_total: self.discarded_total,
        })
    }

    /// Relative defect of the integral mass balance
    /// `M(t) − M(0) = ∫ (F_in − F_out) dt`, trapezoid rule in time.
    pub fn mass_balance_defect(&self) -> f64 {
        let rows = &self.telemetry;
        let m0 = rows[0].conservation.mass;
        let m1 = rows[rows.len() - 1].conservation.mass;
        let inflow: f64 = rows
            .windows(2)
            .map(|w| 0.5 * (w[0].net_inflow + w[1].net_inflow) * (w[1].t - w[0].t))
            .sum();
        (m1 - m0 - inflow).abs() / m0.abs().max(f64::MIN_POSITIVE)
    }
}

fn net_inflow(field: &VelocityField, nu: f64) -> f64 {
    let u = field.values();
    let n = u.len();
    let dx = field.grid().spacing();
    let (ux0, ux1) = if n >= 3 {
        (
            (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx),
            (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx),
        )
    } else {
        let d = (u[1] - u[0]) / dx;
        (d, d)
    };
    let flux = |v: f64, ux: f64| 0.5 * v * v - nu * ux;
    flux(u[0], ux0) - flux(u[n - 1], ux1)
}

/// RK4 with truncation after each stage state and after the combination,
/// then endpoint pinning. Appends one telemetry row.
pub fn qtn_rk4_step(qs: &mut QtnState, ops: &QtnOperators, dt: f64) -> Result<()> {
    let mut tr = Truncator {
        policy: qs.policy,
        discarded: 0.0,
    };
    let u = &qs.state;
    let k1 = tr.rhs(u, ops)?;
    let s = tr.add(u, &k1, 1.0, 0.5 * dt)?;
    let k2 = tr.rhs(&s, ops)?;
    let s = tr.add(u, &k2, 1.0, 0.5 * dt)?;
    let k3 = tr.rhs(&s, ops)?;
    let s = tr.add(u, &k3, 1.0, dt)?;
    let k4 = tr.rhs(&s, ops)?;

    let acc = direct_sum(&k1, &k2, 1.0, 2.0)?;
    let acc = direct_sum(&acc, &k3, 1.0, 2.0)?;
    let acc = direct_sum(&acc, &k4, 1.0, 1.0)?;
    let mut next = tr.add(u, &acc, 1.0, dt / 6.0)?;

    if let Some((left, right)) = qs.pins {
        let n = next.len();
        let (a0, a1) = (next.amplitude(0), next.amplitude(n - 1));
        let l = next.n_sites();
        let pin = direct_sum(
            &Mps::basis_state(l, 0)?,
            &Mps::basis_state(l, n - 1)?,
            left - a0,
            right - a1,
        )?;
        next = tr.add(&next, &pin, 1.0, 1.0)?;
    }
    if !next.scale().is_finite()
        || next
            .sites()
            .iter()
            .any(|s| s.data().iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NonFinite("QTN step"));
    }

    qs.state = next;
    qs.t += dt;
    qs.discarded_total += tr.discarded;
    let row = qs.record(dt, ops.viscosity)?;
    qs.telemetry.push(row);
    Ok(())
}

#[derive(Debug, Clone)]
pub struct QtnRun {
    pub field: VelocityField,
    pub state: QtnState,
}

/// Solves the Dirichlet problem on `n = 2^L` nodes up to `config.total_time`.
pub fn qtn_run(config: &SimConfig, n: usize, policy: TruncationPolicy) -> Result<QtnRun> {
    config.validate()?;
    require_power_of_two(n)?;
    let grid = Grid1D::new(n)?;
    let ops = QtnOperators::new(&grid, config.stencil, config.viscosity)?;
    let u0 = initial_condition(config.ic_kind, &grid, config);
    let mut qs = QtnState::new(
        &u0,
        policy,
        Some((config.bc_left, config.bc_right)),
        config.viscosity,
    )?;
    if config.total_time == 0.0 {
        return Ok(QtnRun {
            field: u0,
            state: qs,
        });
    }
    let mut field = qs.field()?;
    while !config.is_finished(qs.t) {
        let dt = config.next_dt(&field, qs.t);
        qtn_rk4_step(&mut qs, &ops, dt)?;
        field = qs.field()?;
    }
    Ok(QtnRun { field, state: qs })
}

/// Linear gate-count model `D(N) = 11·N`, a labelled estimate for
/// comparison plots only.
pub fn qtn_depth_proxy(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "depth proxy needs N >= 2, got {n}"
        )));
    }
    require_power_of_two(n)?;
    Ok(11 * n)
}
