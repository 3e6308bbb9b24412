//! Fourier pseudo-spectral Burgers solver on periodic samples `x_j = j/N`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{cfl_bound, Grid1D, IcKind, SimConfig, VelocityField};
use crate::error::{require_power_of_two, Error, Result};
use crate::kernels::fft::wavenumber_index;
use crate::kernels::{fft_in_place, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralOptions {
    /// Zero nonlinear modes with `|m| > N/3`.
    pub dealias: bool,
    pub nonlinear: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            dealias: true,
            nonlinear: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralBurgers {
    n: usize,
    nu: f64,
    opts: SpectralOptions,
    /// Angular wavenumbers `2πm`; the Nyquist entry is zero for `∂ₓ`.
    k: Vec<f64>,
    mode: Vec<i64>,
}

impl SpectralBurgers {
    pub fn new(n: usize, nu: f64, opts: SpectralOptions) -> Result<Self> {
        require_power_of_two(n)?;
        if n < 2 {
            return Err(Error::InvalidGrid(
                "spectral grid needs at least 2 samples".into(),
            ));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::param(
                "viscosity",
                format!("must be positive, got {nu}"),
            ));
        }
        let mode: Vec<i64> = (0..n).map(|j| wavenumber_index(j, n)).collect();
        let k = mode.iter().map(|&m| 2.0 * PI * m as f64).collect();
        Ok(Self {
            n,
            nu,
            opts,
            k,
            mode,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        let mut c: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_in_place(&mut c, Direction::Forward).expect("length checked at construction");
        c
    }

    fn inverse_real(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        fft_in_place(&mut c, Direction::Inverse).expect("length checked at construction");
        c.into_iter().map(|z| z.re).collect()
    }

    pub fn rhs(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let uh = self.forward(u);
        let nyq = (n / 2) as i64;
        let lap: Vec<Complex64> = uh
            .iter()
            .zip(&self.k)
            .map(|(c, k)| c * (-k * k * self.nu))
            .collect();
        let mut out = self.inverse_real(lap);
        if self.opts.nonlinear {
            let dh: Vec<Complex64> = uh
                .iter()
                .zip(&self.k)
                .zip(&self.mode)
                .map(|((c, &k), &m)| {
                    if m == nyq {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c * Complex64::new(0.0, k)
                    }
                })
                .collect();
            let ux = self.inverse_real(dh);
            let mut nl: Vec<f64> = u.iter().zip(&ux).map(|(a, b)| a * b).collect();
            if self.opts.dealias {
                let mut nh = self.forward(&nl);
                let cut = (n / 3) as i64;
                for (c, &m) in nh.iter_mut().zip(&self.mode) {
                    if m.abs() > cut {
                        *c = Complex64::new(0.0, 0.0);
                    }
                }
                nl = self.inverse_real(nh);
            }
            for (o, v) in out.iter_mut().zip(&nl) {
                *o -= v;
            }
        }
        out
    }

    /// One RK4 step on the periodic samples.
    pub fn step(&self, u: &[f64], dt: f64) -> Result<Vec<f64>> {
        if u.len() != self.n {
            return Err(Error::GridMismatch {
                left: u.len(),
                right: self.n,
            });
        }
        let k1 = self.rhs(u);
        let s: Vec<f64> = u.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k2 = self.rhs(&s);
        let s: Vec<f64> = u.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k3 = self.rhs(&s);
        let s: Vec<f64> = u.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let k4 = self.rhs(&s);
        let next: Vec<f64> = (0..self.n)
            .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spectral step"));
        }
        Ok(next)
    }

    /// Evaluates the real trigonometric interpolant of `u` at `x`.
    pub fn interpolate(&self, u: &[f64], xs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let uh = self.forward(u);
        let norm = 1.0 / (n as f64).sqrt();
        xs.iter()
            .map(|&x| {
                let mut acc = uh[0].re;
                for (j, c) in uh.iter().enumerate().take(n / 2).skip(1) {
                    acc += 2.0 * (c * Complex64::from_polar(1.0, 2.0 * PI * j as f64 * x)).re;
                }
                if n >= 2 {
                    acc += uh[n / 2].re * (PI * n as f64 * x).cos();
                }
                acc * norm
            })
            .collect()
    }
}

/// One RK4 step with default options, treating the values as periodic
/// samples at `j/N`.
pub fn spectral_step(field: &VelocityField, dt: f64, nu: f64) -> Result<VelocityField> {
    let solver = SpectralBurgers::new(field.values().len(), nu, SpectralOptions::default())?;
    field.with_values(solver.step(field.values(), dt)?)
}

/// Runs the periodic problem for `config.ic_kind` on `n` samples and
/// returns the interpolant on the `n`-node grid.
pub fn spectral_run(config: &SimConfig, n: usize, opts: SpectralOptions) -> Result<VelocityField> {
    config.validate()?;
    if config.ic_kind == IcKind::Step {
        return Err(Error::Unsupported(
            "the spectral solver assumes a periodic profile; the step case has non-periodic boundary data".into(),
        ));
    }
    let solver = SpectralBurgers::new(n, config.viscosity, opts)?;
    let dx = 1.0 / n as f64;
    let mut u: Vec<f64> = (0..n)
        .map(|j| config.ic_kind.eval(j as f64 * dx, config.step_levels))
        .collect();
    let mut t = 0.0;
    while !config.is_finished(t) {
        let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut dt = cfl_bound(dx, umax, config.viscosity, config.cfl_coefficient);
        if let Some(cap) = config.dt_max {
            dt = dt.min(cap);
        }
        dt = dt.min(config.total_time - t);
        u = solver.step(&u, dt)?;
        t += dt;
    }
    let grid = Grid1D::new(n)?;
    let values = solver.interpolate(&u, grid.coords());
    VelocityField::new(grid, values)
}
