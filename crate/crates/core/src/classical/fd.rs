//! Finite-difference operators and time steppers on the node-centred grid.

use nalgebra::DMatrix;

use crate::domain::{initial_condition, Grid1D, SimConfig, StencilOrder, VelocityField};
use crate::error::{Error, Result};
use crate::kernels::{gmres_solve, GmresOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Endpoint values are data; derivative rows at the ends are one-sided.
    Dirichlet,
    /// The last node duplicates the first; the ring has `N − 1` unknowns.
    Periodic,
}

/// First- and second-derivative stencils for a fixed grid.
#[derive(Debug, Clone)]
pub struct FdOperators {
    n: usize,
    dx: f64,
    order: StencilOrder,
    boundary: Boundary,
    upwind: bool,
}

impl FdOperators {
    pub fn new(grid: &Grid1D, order: StencilOrder, boundary: Boundary) -> Result<Self> {
        let n = grid.n_points();
        if boundary == Boundary::Periodic && n < 4 {
            return Err(Error::InvalidGrid(format!(
                "periodic stencils need at least 4 points, got {n}"
            )));
        }
        Ok(Self {
            n,
            dx: grid.spacing(),
            order,
            boundary,
            upwind: false,
        })
    }

    /// Use first-order upwind differences for the convective term.
    pub fn with_upwind(mut self, upwind: bool) -> Self {
        self.upwind = upwind;
        self
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn order(&self) -> StencilOrder {
        self.order
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    fn fourth(&self) -> bool {
        self.order == StencilOrder::Fourth
    }

    /// `out ← D₁ u`.
    pub fn gradient(&self, u: &[f64], out: &mut [f64]) {
        let (n, dx) = (self.n, self.dx);
        match self.boundary {
            Boundary::Dirichlet => {
                if n == 2 {
                    let d = (u[1] - u[0]) / dx;
                    out[0] = d;
                    out[1] = d;
                    return;
                }
                out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx);
                out[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx);
                for i in 1..n - 1 {
                    out[i] = if self.fourth() && i >= 2 && i + 2 < n {
                        (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * dx)
                    } else {
                        (u[i + 1] - u[i - 1]) / (2.0 * dx)
                    };
                }
            }
            Boundary::Periodic => {
                let m = n - 1;
                let at = |i: isize| u[i.rem_euclid(m as isize) as usize];
                for i in 0..m {
                    let j = i as isize;
                    out[i] = if self.fourth() {
                        (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * dx)
                    } else {
                        (at(j + 1) - at(j - 1)) / (2.0 * dx)
                    };
                }
                out[m] = out[0];
            }
        }
    }

    /// `out ← 𝓛 u`. Dirichlet end rows are zero.
    pub fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let (n, dx2) = (self.n, self.dx * self.dx);
        match self.boundary {
            Boundary::Dirichlet => {
                out[0] = 0.0;
                out[n - 1] = 0.0;
                for i in 1..n - 1 {
                    out[i] = if self.fourth() && i >= 2 && i + 2 < n {
                        (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2])
                            / (12.0 * dx2)
                    } else {
                        (u[i - 1] - 2.0 * u[i] + u[i + 1]) / dx2
                    };
                }
            }
            Boundary::Periodic => {
                let m = n - 1;
                let at = |i: isize| u[i.rem_euclid(m as isize) as usize];
                for i in 0..m {
                    let j = i as isize;
                    out[i] = if self.fourth() {
                        (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1)
                            - at(j + 2))
                            / (12.0 * dx2)
                    } else {
                        (at(j - 1) - 2.0 * at(j) + at(j + 1)) / dx2
                    };
                }
                out[m] = out[0];
            }
        }
    }

    /// `out ← u ⊙ ∂ₓu`, central or upwind depending on configuration.
    pub fn convection(&self, u: &[f64], out: &mut [f64]) {
        if !self.upwind {
            self.gradient(u, out);
            for (o, ui) in out.iter_mut().zip(u) {
                *o *= ui;
            }
            return;
        }
        let (n, dx) = (self.n, self.dx);
        match self.boundary {
            Boundary::Dirichlet => {
                for i in 0..n {
                    let back = i > 0 && (u[i] >= 0.0 || i + 1 == n);
                    let d = if back {
                        u[i] - u[i - 1]
                    } else {
                        u[i + 1] - u[i]
                    };
                    out[i] = u[i] * d / dx;
                }
            }
            Boundary::Periodic => {
                let m = n - 1;
                for i in 0..m {
                    let (prev, next) = ((i + m - 1) % m, (i + 1) % m);
                    let d = if u[i] >= 0.0 {
                        u[i] - u[prev]
                    } else {
                        u[next] - u[i]
                    };
                    out[i] = u[i] * d / dx;
                }
                out[m] = out[0];
            }
        }
    }

    fn dense<F: Fn(&[f64], &mut [f64])>(&self, apply: F) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            if self.boundary == Boundary::Periodic && j == 0 {
                e[n - 1] = 1.0;
            }
            if self.boundary == Boundary::Periodic && j == n - 1 {
                continue;
            }
            apply(&e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// Dense `D₁`. For periodic grids the duplicated last column is zero.
    pub fn gradient_matrix(&self) -> DMatrix<f64> {
        self.dense(|u, out| self.gradient(u, out))
    }

    /// Dense `𝓛` with the same conventions as [`Self::gradient_matrix`].
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        self.dense(|u, out| self.laplacian(u, out))
    }
}

/// Viscous Burgers right-hand side `−𝓒(u) + ν 𝓛 u` plus boundary handling.
#[derive(Debug, Clone)]
pub struct FdBurgers {
    ops: FdOperators,
    nu: f64,
    dirichlet: Option<(f64, f64)>,
    convection: bool,
}

/// One semi-implicit step and its linear-solve diagnostics.
#[derive(Debug, Clone)]
pub struct SemiImplicitStep {
    pub field: VelocityField,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FdBurgers {
    /// Dirichlet problem with endpoint values taken from `config`.
    pub fn new(grid: &Grid1D, config: &SimConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            ops: FdOperators::new(grid, config.stencil, Boundary::Dirichlet)?,
            nu: config.viscosity,
            dirichlet: Some((config.bc_left, config.bc_right)),
            convection: true,
        })
    }

    pub fn periodic(grid: &Grid1D, nu: f64, order: StencilOrder) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::param(
                "viscosity",
                format!("must be positive, got {nu}"),
            ));
        }
        Ok(Self {
            ops: FdOperators::new(grid, order, Boundary::Periodic)?,
            nu,
            dirichlet: None,
            convection: true,
        })
    }

    pub fn with_upwind(mut self, upwind: bool) -> Self {
        self.ops = self.ops.with_upwind(upwind);
        self
    }

    /// Switch the nonlinear term off, leaving the heat equation.
    pub fn with_convection(mut self, enabled: bool) -> Self {
        self.convection = enabled;
        self
    }

    pub fn operators(&self) -> &FdOperators {
        &self.ops
    }

    pub fn viscosity(&self) -> f64 {
        self.nu
    }

    pub fn rhs(&self, u: &[f64], out: &mut [f64]) {
        self.ops.laplacian(u, out);
        for o in out.iter_mut() {
            *o *= self.nu;
        }
        if self.convection {
            let mut c = vec![0.0; u.len()];
            self.ops.convection(u, &mut c);
            for (o, ci) in out.iter_mut().zip(&c) {
                *o -= ci;
            }
        }
        if self.dirichlet.is_some() {
            out[0] = 0.0;
            let n = out.len();
            out[n - 1] = 0.0;
        }
    }

    fn pin(&self, u: &mut [f64]) {
        let n = u.len();
        match self.dirichlet {
            Some((left, right)) => {
                u[0] = left;
                u[n - 1] = right;
            }
            None => u[n - 1] = u[0],
        }
    }

    fn check_len(&self, field: &VelocityField) -> Result<()> {
        if field.values().len() != self.ops.n {
            return Err(Error::GridMismatch {
                left: field.values().len(),
                right: self.ops.n,
            });
        }
        Ok(())
    }

    /// Classical RK4; Dirichlet values are re-imposed after the full step.
    pub fn explicit_rk4_step(&self, field: &VelocityField, dt: f64) -> Result<VelocityField> {
        self.check_len(field)?;
        let u = field.values();
        let n = u.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];

        self.rhs(u, &mut k1);
        axpy_into(&mut tmp, u, 0.5 * dt, &k1);
        self.rhs(&tmp, &mut k2);
        axpy_into(&mut tmp, u, 0.5 * dt, &k2);
        self.rhs(&tmp, &mut k3);
        axpy_into(&mut tmp, u, dt, &k3);
        self.rhs(&tmp, &mut k4);

        let mut next: Vec<f64> = (0..n)
            .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        self.pin(&mut next);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("explicit RK4 step"));
        }
        field.with_values(next)
    }

    /// Solves `(I − νΔt𝓛) uⁿ⁺¹ = uⁿ − Δt 𝓒(uⁿ)` with GMRES.
    pub fn semi_implicit_step(
        &self,
        field: &VelocityField,
        dt: f64,
        opts: GmresOptions,
    ) -> Result<SemiImplicitStep> {
        self.check_len(field)?;
        let u = field.values();
        let n = u.len();
        let mut rhs = u.to_vec();
        if self.convection {
            let mut c = vec![0.0; n];
            self.ops.convection(u, &mut c);
            for (r, ci) in rhs.iter_mut().zip(&c) {
                *r -= dt * ci;
            }
        }
        if self.dirichlet.is_some() {
            self.pin(&mut rhs);
        }
        let periodic = self.ops.boundary == Boundary::Periodic;
        let scale = self.nu * dt;
        let apply = |x: &[f64], y: &mut [f64]| {
            self.ops.laplacian(x, y);
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi = xi - scale * *yi;
            }
            if periodic {
                // keep the duplicated node tied to the first one
                y[n - 1] = x[n - 1] - x[0];
            }
        };
        if periodic {
            rhs[n - 1] = 0.0;
        }
        let out = gmres_solve(apply, &rhs, Some(u), opts);
        let mut next = out.x;
        self.pin(&mut next);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("semi-implicit step"));
        }
        Ok(SemiImplicitStep {
            field: field.with_values(next)?,
            residual: out.residual_norm,
            iterations: out.iterations,
            converged: out.converged,
        })
    }
}

fn axpy_into(out: &mut [f64], x: &[f64], a: f64, y: &[f64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

/// Final state of a time-marching run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub field: VelocityField,
    pub steps: usize,
    pub time: f64,
    /// Worst linear-solve residual (zero for explicit runs).
    pub max_residual: f64,
    pub all_converged: bool,
}

/// Advances `u0` to `config.total_time` with the CFL-limited step.
pub fn march<F>(config: &SimConfig, u0: VelocityField, mut step: F) -> Result<RunOutput>
where
    F: FnMut(&VelocityField, f64) -> Result<(VelocityField, f64, bool)>,
{
    config.validate()?;
    let mut u = u0;
    let mut t = 0.0;
    let mut steps = 0;
    let mut max_residual: f64 = 0.0;
    let mut all_converged = true;
    while !config.is_finished(t) {
        let dt = config.next_dt(&u, t);
        let (next, residual, converged) = step(&u, dt)?;
        u = next;
        t += dt;
        steps += 1;
        max_residual = max_residual.max(residual);
        all_converged &= converged;
    }
    Ok(RunOutput {
        field: u,
        steps,
        time: t,
        max_residual,
        all_converged,
    })
}

/// Explicit RK4 solve of the Dirichlet problem on an `n`-point grid.
pub fn run_explicit_rk4(config: &SimConfig, n: usize) -> Result<RunOutput> {
    let grid = Grid1D::new(n)?;
    let solver = FdBurgers::new(&grid, config)?;
    let u0 = initial_condition(config.ic_kind, &grid, config);
    march(config, u0, |u, dt| {
        Ok((solver.explicit_rk4_step(u, dt)?, 0.0, true))
    })
}

/// Semi-implicit GMRES solve of the Dirichlet problem on an `n`-point grid.
pub fn run_semi_implicit(config: &SimConfig, n: usize, opts: GmresOptions) -> Result<RunOutput> {
    let grid = Grid1D::new(n)?;
    let solver = FdBurgers::new(&grid, config)?;
    let u0 = initial_condition(config.ic_kind, &grid, config);
    march(config, u0, |u, dt| {
        let s = solver.semi_implicit_step(u, dt, opts)?;
        Ok((s.field, s.residual, s.converged))
    })
}
