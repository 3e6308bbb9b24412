//! Quick oracle-equivalence checks of the solver building blocks.

use bqb_core::classical::{run_explicit_rk4, Boundary, FdOperators};
use bqb_core::domain::{
    initial_condition, relative_l2_error_slices, Grid1D, IcKind, SimConfig, StencilOrder,
};
use bqb_core::hse::{
    build_hamiltonian_fd, exact_step, madelung_encode, pauli_decompose, phase_gradient_readout,
    trotter_step, PauliTerm, PauliTermSum,
};
use bqb_core::kernels::{gmres_solve, thomas_solve, GmresOptions};
use bqb_core::mps::{
    mpo_apply, mpo_from_matrix, mps_add, mps_from_vector, mps_hadamard, mps_to_vector,
    TruncationPolicy,
};
use bqb_core::qtn::qtn_run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn rel(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(relative_l2_error_slices(a, b)?.value)
}

fn mps_checks(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let exact = TruncationPolicy::exact();
    let v = random_vec(256, rng);
    let roundtrip = rel(&mps_to_vector(&mps_from_vector(&v, exact)?)?, &v)?;

    let a = random_vec(64, rng);
    let b = random_vec(64, rng);
    let (ma, mb) = (mps_from_vector(&a, exact)?, mps_from_vector(&b, exact)?);
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let hadamard = rel(&mps_to_vector(&mps_hadamard(&ma, &mb, exact)?)?, &prod)?;
    let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * x - 2.0 * y).collect();
    let add = rel(&mps_to_vector(&mps_add(&ma, &mb, 0.5, -2.0, exact)?)?, &sum)?;

    let grid = Grid1D::new(64)?;
    let d1 = FdOperators::new(&grid, StencilOrder::Fourth, Boundary::Dirichlet)?.gradient_matrix();
    let dense: Vec<f64> = (0..64)
        .map(|i| (0..64).map(|j| d1[(i, j)] * a[j]).sum())
        .collect();
    let mpo = mpo_from_matrix(&d1, 1e-12)?;
    let applied = rel(&mps_to_vector(&mpo_apply(&mpo, &ma, exact)?)?, &dense)?;

    Ok(vec![
        Check {
            name: "mps roundtrip N=256",
            measured: roundtrip,
            tolerance: 1e-10,
        },
        Check {
            name: "mps hadamard vs dense",
            measured: hadamard,
            tolerance: 1e-10,
        },
        Check {
            name: "mps add vs dense",
            measured: add,
            tolerance: 1e-10,
        },
        Check {
            name: "mpo apply vs dense",
            measured: applied,
            tolerance: 1e-10,
        },
    ])
}

fn gmres_check(rng: &mut ChaCha8Rng) -> Check {
    let n = 128;
    let lower = random_vec(n, rng);
    let upper = random_vec(n, rng);
    let diag: Vec<f64> = (0..n)
        .map(|i| 3.0 + lower[i].abs() + upper[i].abs())
        .collect();
    let rhs = random_vec(n, rng);
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += lower[i] * x[i - 1];
            }
            if i + 1 < n {
                v += upper[i] * x[i + 1];
            }
            y[i] = v;
        }
    };
    let out = gmres_solve(apply, &rhs, None, GmresOptions::default());
    let direct = thomas_solve(&lower, &diag, &upper, &rhs);
    let err = out
        .x
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).abs())
        .fold(out.residual_norm, f64::max);
    Check {
        name: "gmres vs tridiagonal solve",
        measured: err,
        tolerance: 1e-7,
    }
}

fn qtn_check() -> Result<Check> {
    let config = SimConfig::for_ic(IcKind::Step).with_total_time(0.02);
    let qtn = qtn_run(&config, 16, TruncationPolicy::exact())?;
    let dense = run_explicit_rk4(&config, 16)?;
    Ok(Check {
        name: "qtn vs dense rk4 N=16",
        measured: rel(qtn.field.values(), dense.field.values())?,
        tolerance: 1e-8,
    })
}

fn hse_checks() -> Result<Vec<Check>> {
    let nu = 0.05;
    let grid = Grid1D::new(8)?;
    let config = SimConfig::for_ic(IcKind::Sine).with_viscosity(nu);
    let psi = madelung_encode(&initial_condition(IcKind::Sine, &grid, &config), nu)?;
    let rho: Vec<f64> = grid.coords().iter().map(|x| 1.0 + 0.5 * x).collect();
    let h = build_hamiltonian_fd(&grid, nu, &rho)?;
    let reconstruction = (pauli_decompose(&h)?.to_matrix() - &h).norm();

    let single = PauliTermSum::new(
        3,
        vec![PauliTerm {
            coeff: 0.8,
            string: "XYZ".parse()?,
        }],
    )?;
    let trotter = trotter_step(&psi, &single, 0.3)?;
    let exact = exact_step(&psi, &single.to_matrix(), 0.3)?;
    let single_term = trotter.distance_sq(&exact).sqrt();

    let grid = Grid1D::new(64)?;
    let u = initial_condition(IcKind::Sine, &grid, &config);
    let back = phase_gradient_readout(&madelung_encode(&u, nu)?, nu, &grid)?;
    let madelung = rel(back.field.values(), u.values())?;

    Ok(vec![
        Check {
            name: "pauli reconstruction n=3",
            measured: reconstruction,
            tolerance: 1e-10,
        },
        Check {
            name: "single-term trotter vs exact",
            measured: single_term,
            tolerance: 1e-12,
        },
        Check {
            name: "madelung roundtrip N=64",
            measured: madelung,
            tolerance: 5e-3,
        },
    ])
}

pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = mps_checks(&mut rng)?;
    checks.push(gmres_check(&mut rng));
    checks.push(qtn_check()?);
    checks.extend(hse_checks()?);
    Ok(checks)
}
