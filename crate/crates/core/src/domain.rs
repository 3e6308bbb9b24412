//! Grid, initial and boundary conditions, the CFL step policy, the error
//! metric and conservation diagnostics shared by every solver.
//!
//! The grid is node-centred on `[0, 1]` with both endpoints included, so
//! `Δx = 1/(N-1)` and Dirichlet values sit exactly on `x = 0` and `x = 1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Width of the Gaussian pulse initial condition.
pub const GAUSSIAN_SIGMA: f64 = 0.1;

/// Uniform node-centred grid on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    spacing: f64,
    coords: Vec<f64>,
}

impl Grid1D {
    pub fn new(n_points: usize) -> Result<Self> {
        make_grid(n_points)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of binary sites `log2(N)`; fails unless `N` is a power of two.
    pub fn qubits(&self) -> Result<u32> {
        crate::error::require_power_of_two(self.n_points)
    }
}

pub fn make_grid(n_points: usize) -> Result<Grid1D> {
    if n_points < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {n_points}"
        )));
    }
    let spacing = 1.0 / (n_points - 1) as f64;
    let mut coords: Vec<f64> = (0..n_points).map(|i| i as f64 * spacing).collect();
    // pin the right endpoint against accumulated rounding
    coords[n_points - 1] = 1.0;
    Ok(Grid1D {
        n_points,
        spacing,
        coords,
    })
}

/// Velocity samples `u_i` on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl VelocityField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch {
                left: grid.n_points(),
                right: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("velocity field"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        let values = vec![0.0; grid.n_points()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Replace the values, keeping the grid.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IcKind {
    Step,
    Sine,
    Gaussian,
}

impl IcKind {
    pub fn name(self) -> &'static str {
        match self {
            IcKind::Step => "step",
            IcKind::Sine => "sine",
            IcKind::Gaussian => "gaussian",
        }
    }

    /// Profile value at `x` for the given step levels.
    pub fn eval(self, x: f64, step_levels: (f64, f64)) -> f64 {
        match self {
            IcKind::Step => {
                if x <= 0.5 {
                    step_levels.0
                } else {
                    step_levels.1
                }
            }
            IcKind::Sine => (2.0 * PI * x).sin(),
            IcKind::Gaussian => {
                let d = x - 0.5;
                (-d * d / (2.0 * GAUSSIAN_SIGMA * GAUSSIAN_SIGMA)).exp()
            }
        }
    }
}

impl fmt::Display for IcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "step" => Ok(IcKind::Step),
            "sine" | "sin" => Ok(IcKind::Sine),
            "gaussian" | "gauss" => Ok(IcKind::Gaussian),
            other => Err(Error::param("ic_kind", format!("unknown kind `{other}`"))),
        }
    }
}

/// Finite-difference stencil order used by the Burgers operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StencilOrder {
    Second,
    #[default]
    Fourth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub viscosity: f64,
    pub total_time: f64,
    pub cfl_coefficient: f64,
    pub ic_kind: IcKind,
    pub bc_left: f64,
    pub bc_right: f64,
    pub step_levels: (f64, f64),
    /// Upper bound on any single time step; `None` leaves only the CFL bound.
    pub dt_max: Option<f64>,
    pub stencil: StencilOrder,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            viscosity: 0.01,
            total_time: 0.1,
            cfl_coefficient: 0.1,
            ic_kind: IcKind::Step,
            bc_left: 1.0,
            bc_right: 0.0,
            step_levels: (1.0, 0.0),
            dt_max: Some(0.005),
            stencil: StencilOrder::Fourth,
        }
    }
}

impl SimConfig {
    /// Default benchmark settings with boundary values taken from the
    /// initial profile at `x = 0` and `x = 1`.
    pub fn for_ic(kind: IcKind) -> Self {
        let mut cfg = Self {
            ic_kind: kind,
            ..Self::default()
        };
        cfg.bc_left = kind.eval(0.0, cfg.step_levels);
        cfg.bc_right = kind.eval(1.0, cfg.step_levels);
        if kind == IcKind::Sine {
            cfg.bc_left = 0.0;
            cfg.bc_right = 0.0;
        }
        cfg
    }

    pub fn with_viscosity(mut self, nu: f64) -> Self {
        self.viscosity = nu;
        self
    }

    pub fn with_total_time(mut self, t: f64) -> Self {
        self.total_time = t;
        self
    }

    pub fn with_dt_max(mut self, dt: Option<f64>) -> Self {
        self.dt_max = dt;
        self
    }

    pub fn with_stencil(mut self, stencil: StencilOrder) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.viscosity > 0.0 && self.viscosity.is_finite()) {
            return Err(Error::param("viscosity", "must be > 0"));
        }
        if !(self.total_time >= 0.0 && self.total_time.is_finite()) {
            return Err(Error::param("total_time", "must be >= 0"));
        }
        if !(self.cfl_coefficient > 0.0 && self.cfl_coefficient <= 1.0) {
            return Err(Error::param("cfl_coefficient", "must lie in (0, 1]"));
        }
        if let Some(dt) = self.dt_max {
            if !(dt > 0.0) {
                return Err(Error::param("dt_max", "must be > 0"));
            }
        }
        Ok(())
    }

    /// Next step size: CFL bound, capped by `dt_max` and the remaining horizon.
    pub fn next_dt(&self, field: &VelocityField, t: f64) -> f64 {
        let mut dt = cfl_timestep(field, self.viscosity, self.cfl_coefficient);
        if let Some(cap) = self.dt_max {
            dt = dt.min(cap);
        }
        dt.min(self.total_time - t)
    }

    /// True once `t` has reached the horizon (up to rounding).
    pub fn is_finished(&self, t: f64) -> bool {
        self.total_time - t <= 1e-13 * self.total_time.max(1.0)
    }
}

pub fn initial_condition(kind: IcKind, grid: &Grid1D, config: &SimConfig) -> VelocityField {
    let values = grid
        .coords()
        .iter()
        .map(|&x| kind.eval(x, config.step_levels))
        .collect();
    VelocityField {
        grid: grid.clone(),
        values,
    }
}

/// `Δt = C · min(Δx / max|u|, Δx² / ν)`; a zero field leaves the diffusive bound.
pub fn cfl_timestep(field: &VelocityField, nu: f64, cfl: f64) -> f64 {
    cfl_bound(field.grid().spacing(), field.max_abs(), nu, cfl)
}

/// [`cfl_timestep`] from raw spacing and peak speed.
pub fn cfl_bound(dx: f64, umax: f64, nu: f64, cfl: f64) -> f64 {
    let advective = if umax > 0.0 { dx / umax } else { f64::INFINITY };
    let diffusive = dx * dx / nu;
    cfl * advective.min(diffusive)
}

/// Result of [`relative_l2_error`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Error {
    pub value: f64,
    /// Set when the reference norm vanished and `value` is the absolute norm.
    pub absolute: bool,
}

pub fn relative_l2_error(pred: &VelocityField, reference: &VelocityField) -> Result<L2Error> {
    relative_l2_error_slices(pred.values(), reference.values())
}

pub fn relative_l2_error_slices(pred: &[f64], reference: &[f64]) -> Result<L2Error> {
    if pred.len() != reference.len() {
        return Err(Error::GridMismatch {
            left: pred.len(),
            right: reference.len(),
        });
    }
    let diff = pred
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        Ok(L2Error {
            value: diff,
            absolute: true,
        })
    } else {
        Ok(L2Error {
            value: diff / norm,
            absolute: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub time: f64,
}

fn trapezoid(values: impl Iterator<Item = f64>, n: usize, dx: f64) -> f64 {
    let mut sum = 0.0;
    for (i, v) in values.enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        sum += w * v;
    }
    sum * dx
}

/// Trapezoid-rule integrals of `u`, `u²/2` and `u²` over `[0, 1]`.
pub fn conservation_diagnostics(field: &VelocityField, t: f64) -> ConservationReport {
    let n = field.values.len();
    let dx = field.grid.spacing();
    let mass = trapezoid(field.values.iter().copied(), n, dx);
    let energy = trapezoid(field.values.iter().map(|u| u * u), n, dx);
    ConservationReport {
        mass,
        momentum: 0.5 * energy,
        energy,
        time: t,
    }
}

/// `Re = 1 / (2ν)`.
pub fn reynolds_number(nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::param("viscosity", "must be > 0"));
    }
    Ok(1.0 / (2.0 * nu))
}

/// Inverse of [`reynolds_number`].
pub fn viscosity_for_reynolds(re: f64) -> Result<f64> {
    if !(re > 0.0) {
        return Err(Error::param("reynolds", "must be > 0"));
    }
    Ok(1.0 / (2.0 * re))
}
