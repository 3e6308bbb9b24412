use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{Grid1D, VelocityField};
use crate::error::{require_power_of_two, Error, Result};

/// Amplitudes at or below this magnitude carry no usable phase.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    amplitudes: Vec<Complex64>,
    qubits: u32,
}

impl Wavefunction {
    /// Wraps `amplitudes`; the norm must be 1 within 1e-10.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubits = require_power_of_two(amplitudes.len())?;
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::param(
                "amplitudes",
                format!("norm must be 1, got {norm}"),
            ));
        }
        Ok(Self { amplitudes, qubits })
    }

    /// Rescales to unit norm.
    pub fn normalised(amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubits = require_power_of_two(amplitudes.len())?;
        let nrm = norm(&amplitudes);
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::NonFinite("wavefunction norm"));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / nrm).collect(),
            qubits,
        })
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        let qubits = amplitudes.len().trailing_zeros();
        Self { amplitudes, qubits }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `|ψᵢ|²`.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `‖ψ − φ‖²`.
    pub fn distance_sq(&self, other: &Wavefunction) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }

    /// Text dump, one `index re im` line per amplitude.
    pub fn dump_text(&self) -> String {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| format!("{i} {:.17e} {:.17e}\n", a.re, a.im))
            .collect()
    }
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `ψᵢ = √ρ e^{iφᵢ}` with uniform `ρ = 1/N` and `φ = (1/ν) ∫₀^{xᵢ} u dx`
/// (trapezoid rule).
pub fn madelung_encode(u: &VelocityField, nu: f64) -> Result<Wavefunction> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::param(
            "viscosity",
            format!("must be positive, got {nu}"),
        ));
    }
    let n = u.values().len();
    require_power_of_two(n)?;
    let dx = u.grid().spacing();
    let amp = 1.0 / (n as f64).sqrt();
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(n);
    for (i, &v) in u.values().iter().enumerate() {
        if i > 0 {
            phase += 0.5 * dx * (u.values()[i - 1] + v) / nu;
        }
        out.push(Complex64::from_polar(amp, phase));
    }
    Ok(Wavefunction::from_raw(out))
}

/// Velocity read out of a wavefunction. `gaps` lists nodes whose amplitude
/// fell below [`AMPLITUDE_FLOOR`]; their phase was interpolated.
#[derive(Debug, Clone)]
pub struct Readout {
    pub field: VelocityField,
    pub gaps: Vec<usize>,
}

impl Readout {
    pub fn flagged(&self) -> bool {
        !self.gaps.is_empty()
    }
}

/// `u = ν ∂ₓφ` from the unwrapped phase; central differences inside,
/// second-order one-sided at the ends.
pub fn phase_gradient_readout(psi: &Wavefunction, nu: f64, grid: &Grid1D) -> Result<Readout> {
    let n = psi.len();
    if n != grid.n_points() {
        return Err(Error::GridMismatch {
            left: n,
            right: grid.n_points(),
        });
    }
    let gaps: Vec<usize> = (0..n)
        .filter(|&i| psi.amplitudes[i].norm() <= AMPLITUDE_FLOOR)
        .collect();
    if gaps.len() == n {
        return Err(Error::Unsupported(
            "every amplitude vanished; the phase is undefined".into(),
        ));
    }
    let raw: Vec<Option<f64>> = psi
        .amplitudes
        .iter()
        .map(|a| (a.norm() > AMPLITUDE_FLOOR).then(|| a.arg()))
        .collect();
    let mut phase = unwrap_valid(&raw);
    fill_gaps(&mut phase, &raw);

    let dx = grid.spacing();
    let mut u = vec![0.0; n];
    if n == 2 {
        let d = nu * (phase[1] - phase[0]) / dx;
        u = vec![d, d];
    } else {
        u[0] = nu * (-3.0 * phase[0] + 4.0 * phase[1] - phase[2]) / (2.0 * dx);
        u[n - 1] = nu * (3.0 * phase[n - 1] - 4.0 * phase[n - 2] + phase[n - 3]) / (2.0 * dx);
        for i in 1..n - 1 {
            u[i] = nu * (phase[i + 1] - phase[i - 1]) / (2.0 * dx);
        }
    }
    Ok(Readout {
        field: VelocityField::new(grid.clone(), u)?,
        gaps,
    })
}

/// Unwraps left to right over the valid entries; invalid slots get 0.
fn unwrap_valid(raw: &[Option<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; raw.len()];
    let mut last: Option<f64> = None;
    for (o, r) in out.iter_mut().zip(raw) {
        if let Some(p) = *r {
            let v = match last {
                None => p,
                Some(prev) => prev + ((p - prev + PI).rem_euclid(2.0 * PI) - PI),
            };
            *o = v;
            last = Some(v);
        }
    }
    out
}

/// Linear interpolation (constant extrapolation) of the phase over gaps.
fn fill_gaps(phase: &mut [f64], raw: &[Option<f64>]) {
    let valid: Vec<usize> = (0..raw.len()).filter(|&i| raw[i].is_some()).collect();
    for i in 0..raw.len() {
        if raw[i].is_some() {
            continue;
        }
        let prev = valid.iter().rev().find(|&&j| j < i).copied();
        let next = valid.iter().find(|&&j| j > i).copied();
        phase[i] = match (prev, next) {
            (Some(a), Some(b)) => {
                phase[a] + (phase[b] - phase[a]) * (i - a) as f64 / (b - a) as f64
            }
            (Some(a), None) => phase[a],
            (None, Some(b)) => phase[b],
            (None, None) => 0.0,
        };
    }
}

/// `Q = −(ν²/2) (D₂√ρ)/√ρ`.
pub fn quantum_potential(rho: &[f64], nu: f64, grid: &Grid1D) -> Result<Vec<f64>> {
    quantum_potential_with(rho, nu, grid, 0.5)
}

/// `Q = −coeff · ν² (D₂√ρ)/√ρ`; the three-point stencil inside and a
/// four-point one-sided stencil at the ends (zero for `N < 4` ends).
pub fn quantum_potential_with(rho: &[f64], nu: f64, grid: &Grid1D, coeff: f64) -> Result<Vec<f64>> {
    let n = rho.len();
    if n != grid.n_points() {
        return Err(Error::GridMismatch {
            left: n,
            right: grid.n_points(),
        });
    }
    if let Some(bad) = rho.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::param(
            "rho",
            format!("density must be positive, got {bad}"),
        ));
    }
    let s: Vec<f64> = rho.iter().map(|r| r.sqrt()).collect();
    let dx2 = grid.spacing() * grid.spacing();
    let mut d2 = vec![0.0; n];
    for i in 1..n.saturating_sub(1) {
        d2[i] = (s[i - 1] - 2.0 * s[i] + s[i + 1]) / dx2;
    }
    if n >= 4 {
        d2[0] = (2.0 * s[0] - 5.0 * s[1] + 4.0 * s[2] - s[3]) / dx2;
        d2[n - 1] = (2.0 * s[n - 1] - 5.0 * s[n - 2] + 4.0 * s[n - 3] - s[n - 4]) / dx2;
    }
    Ok(d2
        .iter()
        .zip(&s)
        .map(|(d, si)| -coeff * nu * nu * d / si)
        .collect())
}
