//! High-resolution reference solutions on grids nested with the target grid.

use crate::domain::{Grid1D, SimConfig, VelocityField};
use crate::error::{Error, Result};

use super::fd::run_explicit_rk4;

/// Minimum node count of a reference run.
pub const REFERENCE_MIN_NODES: usize = 2048;

/// Smallest `k(n − 1) + 1 ≥ min_nodes` with `k` odd, so every target node
/// is also a reference node and the reference has no node at `x = 0.5`
/// whenever the target has none.
pub fn reference_grid_size(n_target: usize, min_nodes: usize) -> Result<usize> {
    if n_target < 2 {
        return Err(Error::InvalidGrid(format!(
            "target grid needs at least 2 points, got {n_target}"
        )));
    }
    let intervals = n_target - 1;
    let mut k = min_nodes.saturating_sub(1).div_ceil(intervals).max(1);
    if k.is_multiple_of(2) {
        k += 1;
    }
    Ok(k * intervals + 1)
}

/// Restricts `field` onto the `n_target`-node grid by injection.
pub fn downsample(field: &VelocityField, n_target: usize) -> Result<VelocityField> {
    let n_ref = field.grid().n_points();
    if n_target < 2 || !(n_ref - 1).is_multiple_of(n_target - 1) {
        return Err(Error::InvalidGrid(format!(
            "{n_target}-point grid is not nested in the {n_ref}-point grid"
        )));
    }
    let stride = (n_ref - 1) / (n_target - 1);
    let values = field.values().iter().step_by(stride).copied().collect();
    VelocityField::new(Grid1D::new(n_target)?, values)
}

/// Explicit RK4 solution on a nested fine grid, restricted to `n_target`
/// nodes.
pub fn reference_solution(config: &SimConfig, n_target: usize) -> Result<VelocityField> {
    reference_solution_with(config, n_target, REFERENCE_MIN_NODES)
}

pub fn reference_solution_with(
    config: &SimConfig,
    n_target: usize,
    min_nodes: usize,
) -> Result<VelocityField> {
    let n_ref = reference_grid_size(n_target, min_nodes)?;
    let fine = run_explicit_rk4(config, n_ref)?;
    downsample(&fine.field, n_target)
}
