use std::f64::consts::PI;

use bqb_core::domain::*;
use bqb_core::hse::*;
use bqb_core::kernels::{expm_hermitian, hermitian_eigh, CMatrix};
use bqb_core::Error;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cz(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn uniform_rho(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn random_state(n: usize, seed: u64) -> Wavefunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Wavefunction::normalised(amps).unwrap()
}

fn dense_apply(h: &CMatrix, psi: &Wavefunction) -> Vec<Complex64> {
    (h * DVector::from_column_slice(psi.amplitudes()))
        .as_slice()
        .to_vec()
}

#[test]
fn encode_zero_and_constant_fields() {
    let grid = Grid1D::new(8).unwrap();
    let psi = madelung_encode(&VelocityField::zeros(grid.clone()), 0.01).unwrap();
    for a in psi.amplitudes() {
        assert!((a - cz(1.0 / 8f64.sqrt())).norm() < 1e-15);
    }
    let c = 0.3;
    let nu = 0.05;
    let u = VelocityField::new(grid.clone(), vec![c; 8]).unwrap();
    let psi = madelung_encode(&u, nu).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-14);
    for (a, x) in psi.amplitudes().iter().zip(grid.coords()) {
        let expect = Complex64::from_polar(1.0 / 8f64.sqrt(), c * x / nu);
        assert!((a - expect).norm() < 1e-12);
    }
    let r = phase_gradient_readout(&psi, nu, &grid).unwrap();
    assert!(!r.flagged());
    for v in r.field.values() {
        assert!((v - c).abs() < 1e-10);
    }
    let zero = phase_gradient_readout(
        &madelung_encode(&VelocityField::zeros(grid.clone()), 0.01).unwrap(),
        0.01,
        &grid,
    )
    .unwrap();
    assert!(zero.field.values().iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn encode_rejects_bad_input() {
    let u = VelocityField::zeros(Grid1D::new(6).unwrap());
    assert!(matches!(
        madelung_encode(&u, 0.01),
        Err(Error::NotPowerOfTwo(6))
    ));
    let u = VelocityField::zeros(Grid1D::new(8).unwrap());
    assert!(madelung_encode(&u, 0.0).is_err());
}

#[test]
fn readout_roundtrip_is_second_order() {
    let nu = 0.01;
    let config = SimConfig::for_ic(IcKind::Sine).with_viscosity(nu);
    let mut errs = Vec::new();
    for n in [64, 128, 256] {
        let grid = Grid1D::new(n).unwrap();
        let u = initial_condition(IcKind::Sine, &grid, &config);
        let r = phase_gradient_readout(&madelung_encode(&u, nu).unwrap(), nu, &grid).unwrap();
        errs.push(relative_l2_error(&r.field, &u).unwrap().value);
    }
    assert!(errs[0] < 5e-3);
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=5.0).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn readout_interpolates_over_vanishing_amplitudes() {
    let grid = Grid1D::new(8).unwrap();
    let nu = 0.1;
    let c = 0.2;
    let mut amps: Vec<Complex64> = grid
        .coords()
        .iter()
        .map(|x| Complex64::from_polar(1.0, c * x / nu))
        .collect();
    amps[3] = cz(0.0);
    let psi = Wavefunction::normalised(amps).unwrap();
    let r = phase_gradient_readout(&psi, nu, &grid).unwrap();
    assert_eq!(r.gaps, vec![3]);
    for v in r.field.values() {
        assert!((v - c).abs() < 1e-10);
    }
}

#[test]
fn quantum_potential_cases() {
    let grid = Grid1D::new(16).unwrap();
    let nu = 0.1;
    let q = quantum_potential(&uniform_rho(16), nu, &grid).unwrap();
    assert!(q.iter().all(|v| v.abs() < 1e-12));

    // linear density, hand evaluation at node 5
    let rho: Vec<f64> = grid.coords().iter().map(|x| 0.5 + x).collect();
    let q = quantum_potential(&rho, nu, &grid).unwrap();
    let dx = grid.spacing();
    let s = |i: usize| rho[i].sqrt();
    let hand = -(nu * nu / 2.0) * (s(4) - 2.0 * s(5) + s(6)) / (dx * dx) / s(5);
    assert!((q[5] - hand).abs() < 1e-14);

    // Gaussian density: analytic −(ν²/2)(√ρ)''/√ρ = −(ν²/2)((x−½)²/(4σ⁴) − 1/(2σ²))
    let grid = Grid1D::new(128).unwrap();
    let sigma: f64 = 0.15;
    let rho: Vec<f64> = grid
        .coords()
        .iter()
        .map(|x| (-(x - 0.5) * (x - 0.5) / (2.0 * sigma * sigma)).exp())
        .collect();
    let q = quantum_potential(&rho, nu, &grid).unwrap();
    let qmax = nu * nu / (4.0 * sigma * sigma);
    for (i, x) in grid.coords().iter().enumerate().skip(1).take(126) {
        let d = x - 0.5;
        let exact =
            -(nu * nu / 2.0) * (d * d / (4.0 * sigma.powi(4)) - 1.0 / (2.0 * sigma * sigma));
        assert!((q[i] - exact).abs() < 1e-3 * qmax, "node {i}");
        if exact.abs() > 1e-2 * qmax {
            assert_eq!(q[i].signum(), exact.signum());
        }
    }
    assert!(quantum_potential(&[0.5, 0.0, 0.5, 0.1], nu, &Grid1D::new(4).unwrap()).is_err());
}

#[test]
fn fd_hamiltonian_structure() {
    let grid = Grid1D::new(2).unwrap();
    let nu = 0.01;
    let h = build_hamiltonian_fd(&grid, nu, &uniform_rho(2)).unwrap();
    assert_eq!(h.shape(), (2, 2));
    assert!((h[(0, 1)] - cz(-nu / 2.0)).norm() < 1e-15);
    assert_eq!(h[(0, 1)], h[(1, 0)].conj());

    let grid = Grid1D::new(16).unwrap();
    let rho: Vec<f64> = grid
        .coords()
        .iter()
        .map(|x| 1.0 + 0.3 * (PI * x).sin())
        .collect();
    let h = build_hamiltonian_fd(&grid, 0.05, &rho).unwrap();
    let eig = hermitian_eigh(&h).unwrap();
    assert_eq!(eig.eigenvalues.len(), 16);
    assert!(eig.eigenvalues.iter().all(|e| e.is_finite()));
    let nnz = h.iter().filter(|z| z.norm() > 0.0).count();
    assert!(nnz <= 3 * 16);
}

#[test]
fn spectral_hamiltonian_structure() {
    let nu = 0.02;
    let n = 16;
    let grid = Grid1D::new(n).unwrap();
    let h = build_hamiltonian_spectral(&grid, nu, &uniform_rho(n)).unwrap();
    let wave: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * j as f64 / n as f64))
        .collect();
    let psi = Wavefunction::new(wave.clone()).unwrap();
    let hw = dense_apply(&h, &psi);
    let lambda = nu * (2.0 * PI).powi(2) / 2.0;
    for (a, b) in hw.iter().zip(&wave) {
        assert!((a - b * lambda).norm() < 1e-10);
    }
    let herm = (&h - h.adjoint()).norm();
    assert!(herm < 1e-12);

    // circulant: commutes with the cyclic shift
    let grid8 = Grid1D::new(8).unwrap();
    let h8 = build_hamiltonian_spectral(&grid8, nu, &uniform_rho(8)).unwrap();
    let shift = CMatrix::from_fn(
        8,
        8,
        |i, j| if i == (j + 1) % 8 { cz(1.0) } else { cz(0.0) },
    );
    assert!((&h8 * &shift - &shift * &h8).norm() < 1e-12);

    let nnz = h.iter().filter(|z| z.norm() > 1e-14).count();
    assert!(nnz > 3 * n);
    assert!(nnz as f64 >= 0.9 * (n * n) as f64);
}

#[test]
fn pauli_basic_cases() {
    let x = CMatrix::from_row_slice(2, 2, &[cz(0.0), cz(1.0), cz(1.0), cz(0.0)]);
    let d = pauli_decompose(&x).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.terms()[0].string.label(), "X");
    assert!((d.terms()[0].coeff - 1.0).abs() < 1e-15);

    let d = pauli_decompose(&CMatrix::identity(2, 2)).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.terms()[0].string.label(), "I");
    assert!((d.terms()[0].coeff - 1.0).abs() < 1e-15);

    for label in ["XYZ", "IZY", "YYI", "ZIX"] {
        let p: PauliString = label.parse().unwrap();
        assert_eq!(p.label(), label);
        let d = pauli_decompose(&p.to_matrix()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.terms()[0].string, p);
    }
    assert!("XQ".parse::<PauliString>().is_err());
}

#[test]
fn pauli_string_action_matches_kron() {
    let i2 = CMatrix::identity(2, 2);
    let x = CMatrix::from_row_slice(2, 2, &[cz(0.0), cz(1.0), cz(1.0), cz(0.0)]);
    let y = CMatrix::from_row_slice(
        2,
        2,
        &[
            cz(0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            cz(0.0),
        ],
    );
    let z = CMatrix::from_row_slice(2, 2, &[cz(1.0), cz(0.0), cz(0.0), cz(-1.0)]);
    let one = |c: char| match c {
        'I' => i2.clone(),
        'X' => x.clone(),
        'Y' => y.clone(),
        _ => z.clone(),
    };
    for label in ["XZ", "YI", "ZYX", "IYY"] {
        let mut m = CMatrix::identity(1, 1);
        for c in label.chars() {
            m = bqb_core::kernels::kron(&m, &one(c));
        }
        let p: PauliString = label.parse().unwrap();
        assert!((p.to_matrix() - m).norm() < 1e-15, "{label}");
    }
}

#[test]
fn pauli_rejections() {
    let mut h = CMatrix::identity(4, 4);
    h[(0, 1)] = cz(1.0);
    assert!(matches!(pauli_decompose(&h), Err(Error::NonHermitian(_))));
    assert!(matches!(
        pauli_decompose(&CMatrix::identity(256, 256)),
        Err(Error::GuardExceeded { .. })
    ));
    assert!(pauli_decompose(&CMatrix::identity(3, 3)).is_err());
}

#[test]
fn fd_laplacian_decomposition() {
    let grid = Grid1D::new(4).unwrap();
    let fd = build_hamiltonian_fd(&grid, 0.1, &uniform_rho(4)).unwrap();
    let sp = build_hamiltonian_spectral(&grid, 0.1, &uniform_rho(4)).unwrap();
    let dfd = pauli_decompose(&fd).unwrap();
    let dsp = pauli_decompose(&sp).unwrap();
    assert!((dfd.to_matrix() - &fd).norm() <= 1e-10);
    assert!((dsp.to_matrix() - &sp).norm() <= 1e-10);
    let mut seen = std::collections::HashSet::new();
    assert!(dfd.terms().iter().all(|t| seen.insert(t.string)));
    // descending |c|
    assert!(dfd
        .terms()
        .windows(2)
        .all(|w| w[0].coeff.abs() >= w[1].coeff.abs()));
    // at n = 4 the FD operator needs fewer strings than the spectral one
    let g16 = Grid1D::new(16).unwrap();
    let c_fd = pauli_decompose(&build_hamiltonian_fd(&g16, 0.1, &uniform_rho(16)).unwrap())
        .unwrap()
        .len();
    let c_sp = pauli_decompose(&build_hamiltonian_spectral(&g16, 0.1, &uniform_rho(16)).unwrap())
        .unwrap()
        .len();
    assert!(c_fd < c_sp, "{c_fd} vs {c_sp}");
}

#[test]
fn term_sum_apply_matches_matrix() {
    let grid = Grid1D::new(8).unwrap();
    let rho: Vec<f64> = grid.coords().iter().map(|x| 1.0 + x).collect();
    let h = build_hamiltonian_fd(&grid, 0.1, &rho).unwrap();
    let terms = pauli_decompose(&h).unwrap();
    let psi = random_state(8, 3);
    let a = terms.apply(psi.amplitudes());
    let b = dense_apply(&h, &psi);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() < 1e-10);
    }
}

fn two_term(seed: u64) -> (PauliTermSum, CMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = PauliTermSum::new(
        3,
        vec![
            PauliTerm {
                coeff: rng.random_range(0.5..1.5),
                string: "XZI".parse().unwrap(),
            },
            PauliTerm {
                coeff: rng.random_range(0.5..1.5),
                string: "ZZX".parse().unwrap(),
            },
        ],
    )
    .unwrap();
    let h = terms.to_matrix();
    (terms, h)
}

#[test]
fn trotter_single_term_and_zero_dt() {
    let terms = PauliTermSum::new(
        3,
        vec![PauliTerm {
            coeff: 0.7,
            string: "XYZ".parse().unwrap(),
        }],
    )
    .unwrap();
    let h = terms.to_matrix();
    let psi = random_state(8, 4);
    let a = trotter_step(&psi, &terms, 0.3).unwrap();
    let b = exact_step(&psi, &h, 0.3).unwrap();
    assert!(a.distance_sq(&b).sqrt() < 1e-12);
    assert_eq!(trotter_step(&psi, &terms, 0.0).unwrap(), psi);
    assert_eq!(exact_step(&psi, &h, 0.0).unwrap(), psi);
}

#[test]
fn trotter_error_is_second_order_per_step() {
    let (terms, h) = two_term(5);
    let psi = random_state(8, 6);
    let err = |dt: f64| {
        trotter_step(&psi, &terms, dt)
            .unwrap()
            .distance_sq(&exact_step(&psi, &h, dt).unwrap())
            .sqrt()
    };
    let ratio = err(0.02) / err(0.01);
    assert!((3.6..=4.4).contains(&ratio), "{ratio}");
}

#[test]
fn trotter_global_error_is_first_order() {
    let (terms, h) = two_term(7);
    let psi0 = random_state(8, 8);
    let t_end = 0.8;
    let global = |steps: usize| {
        let dt = t_end / steps as f64;
        let mut a = psi0.clone();
        for _ in 0..steps {
            a = trotter_step(&a, &terms, dt).unwrap();
        }
        a.distance_sq(&exact_step(&psi0, &h, t_end).unwrap()).sqrt()
    };
    let ratio = global(40) / global(80);
    assert!((1.6..=2.6).contains(&ratio), "{ratio}");
}

#[test]
fn exact_step_properties() {
    let grid = Grid1D::new(16).unwrap();
    let rho: Vec<f64> = grid.coords().iter().map(|x| 1.0 + 0.5 * x).collect();
    let h = build_hamiltonian_fd(&grid, 0.05, &rho).unwrap();
    let psi = random_state(16, 9);
    let twice = exact_step(&exact_step(&psi, &h, 0.01).unwrap(), &h, 0.01).unwrap();
    let once = exact_step(&psi, &h, 0.02).unwrap();
    assert!(twice.distance_sq(&once).sqrt() < 1e-10);
    assert!((once.norm() - 1.0).abs() < 1e-10);

    let diag = CMatrix::from_diagonal(&DVector::from_fn(16, |i, _| cz(i as f64 * 0.3)));
    let out = exact_step(&psi, &diag, 0.7).unwrap();
    for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
        assert!((a.norm() - b.norm()).abs() < 1e-12);
    }
    assert!(matches!(
        exact_step(&random_state(2048, 1), &CMatrix::identity(2048, 2048), 0.1),
        Err(Error::GuardExceeded { .. })
    ));
}

#[test]
fn norm_preserved_over_many_steps() {
    let grid = Grid1D::new(16).unwrap();
    let config = SimConfig::for_ic(IcKind::Sine).with_viscosity(0.05);
    let u0 = initial_condition(IcKind::Sine, &grid, &config);
    let mut a = madelung_encode(&u0, 0.05).unwrap();
    let mut b = a.clone();
    let h = build_hamiltonian_fd(&grid, 0.05, &a.density()).unwrap();
    let terms = pauli_decompose(&h).unwrap();
    for _ in 0..200 {
        a = trotter_step(&a, &terms, 0.005).unwrap();
        b = exact_step(&b, &h, 0.005).unwrap();
    }
    assert!((a.norm() - 1.0).abs() < 1e-10);
    assert!((b.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn trotter_plan() {
    let p = TrotterPlan::new(0.1, 0.005).unwrap();
    assert_eq!(p.steps, 20);
    assert!((p.steps as f64 * p.dt - 0.1).abs() < 1e-12);
    assert!(TrotterPlan::new(0.1, 0.003).is_err());
    assert!(p.clone().with_layers(0).is_err());
    assert_eq!(p.with_layers(3).unwrap().layers, 3);
}

#[test]
fn variational_trivial_cases() {
    let terms = PauliTermSum::new(
        2,
        vec![PauliTerm {
            coeff: 1.3,
            string: "XY".parse().unwrap(),
        }],
    )
    .unwrap();
    let h = terms.to_matrix();
    let psi = random_state(4, 10);
    let exact_init = AdamSettings {
        perturbation: 0.0,
        ..AdamSettings::default()
    };
    let fit = variational_trotter_fit(&psi, &terms, &h, 0.2, 1, 0, exact_init).unwrap();
    assert!(fit.initial_loss() <= 1e-12);
    assert_eq!(fit.theta, fit.initial_theta);
    assert_eq!(fit.loss_trace.len(), 1);

    let fit =
        variational_trotter_fit(&psi, &terms, &h, 0.2, 2, 0, AdamSettings::default()).unwrap();
    assert_eq!(fit.theta, fit.initial_theta);
    assert!(fit.theta.iter().all(|t| (t - 0.13).abs() <= 1e-3));
    assert!(
        variational_trotter_fit(&random_state(128, 1), &terms, &h, 0.2, 1, 0, exact_init).is_err()
    );
}

#[test]
fn variational_fit_is_seeded() {
    let grid = Grid1D::new(8).unwrap();
    let config = SimConfig::for_ic(IcKind::Sine).with_viscosity(0.1);
    let psi = madelung_encode(&initial_condition(IcKind::Sine, &grid, &config), 0.1).unwrap();
    let h = build_hamiltonian_fd(&grid, 0.1, &psi.density()).unwrap();
    let terms = pauli_decompose(&h).unwrap();
    let adam = AdamSettings {
        seed: 42,
        ..AdamSettings::default()
    };
    let a = variational_trotter_fit(&psi, &terms, &h, 0.2, 2, 20, adam).unwrap();
    let b = variational_trotter_fit(&psi, &terms, &h, 0.2, 2, 20, adam).unwrap();
    assert_eq!(a.loss_trace, b.loss_trace);
    assert_eq!(a.theta, b.theta);
}

#[test]
fn density_matrix_noiseless_matches_pure_state() {
    let (terms, _) = two_term(11);
    let psi = random_state(8, 12);
    let mut pure = psi.clone();
    let mut rho = DensityMatrix::from_pure(&psi);
    for _ in 0..5 {
        rho = noisy_evolution(&rho, &terms, 0.05, 1, NoiseConfig::noiseless()).unwrap();
        pure = trotter_step(&pure, &terms, 0.05).unwrap();
        let expect = DensityMatrix::from_pure(&pure);
        assert!((rho.matrix() - expect.matrix()).norm() < 1e-10);
    }
}

#[test]
fn noise_channel_limits() {
    let zero_h = pauli_decompose(&CMatrix::zeros(2, 2)).unwrap();
    assert!(zero_h.is_empty());
    let psi = Wavefunction::new(vec![cz(0.6), Complex64::new(0.0, 0.8)]).unwrap();
    let rho = DensityMatrix::from_pure(&psi);
    let full = noisy_evolution(
        &rho,
        &zero_h,
        0.1,
        1,
        NoiseConfig {
            p_depol: 1.0,
            gamma_ad: 0.0,
        },
    )
    .unwrap();
    assert!((full.matrix() - CMatrix::identity(2, 2) * cz(0.5)).norm() < 1e-12);

    let zero3 = pauli_decompose(&CMatrix::zeros(8, 8)).unwrap();
    let rho3 = DensityMatrix::from_pure(&random_state(8, 13));
    let damped = noisy_evolution(
        &rho3,
        &zero3,
        0.1,
        1,
        NoiseConfig {
            p_depol: 0.0,
            gamma_ad: 1.0,
        },
    )
    .unwrap();
    assert!((damped.matrix()[(0, 0)] - cz(1.0)).norm() < 1e-12);
    assert!((damped.trace() - cz(1.0)).norm() < 1e-12);

    assert!(NoiseConfig {
        p_depol: 1.5,
        gamma_ad: 0.0
    }
    .validate()
    .is_err());
    assert_eq!(
        NoiseConfig::default(),
        NoiseConfig {
            p_depol: 0.001,
            gamma_ad: 0.001
        }
    );
}

#[test]
fn noisy_evolution_trace_and_positivity() {
    let grid = Grid1D::new(16).unwrap();
    let config = SimConfig::for_ic(IcKind::Sine).with_viscosity(0.05);
    let psi = madelung_encode(&initial_condition(IcKind::Sine, &grid, &config), 0.05).unwrap();
    let h = build_hamiltonian_fd(&grid, 0.05, &psi.density()).unwrap();
    let terms = pauli_decompose(&h).unwrap();
    let noise = NoiseConfig {
        p_depol: 0.02,
        gamma_ad: 0.03,
    };
    let out = noisy_evolution(&DensityMatrix::from_pure(&psi), &terms, 0.005, 20, noise).unwrap();
    assert!((out.trace() - cz(1.0)).norm() < 1e-10);
    assert!(out.min_eigenvalue().unwrap() >= -1e-10);
    assert!(out.purity() < 1.0 - 1e-3);
    assert!(noisy_evolution(
        &DensityMatrix::from_pure(&random_state(128, 2)),
        &terms,
        0.1,
        1,
        noise
    )
    .is_err());
}

#[test]
fn depth_counts() {
    let one = PauliTermSum::new(
        1,
        vec![PauliTerm {
            coeff: 1.0,
            string: "Z".parse().unwrap(),
        }],
    )
    .unwrap();
    assert_eq!(
        circuit_depth_estimate(&one, 10, DepthMode::Trotter).total,
        10
    );
    let v = circuit_depth_estimate(&one, 10, DepthMode::Variational { layers: 3 });
    assert_eq!((v.per_step, v.total), (3, 30));

    // spectral term count grows faster than the FD count
    let count = |n: usize, spectral: bool| {
        let g = Grid1D::new(n).unwrap();
        let h = if spectral {
            build_hamiltonian_spectral(&g, 0.1, &uniform_rho(n)).unwrap()
        } else {
            build_hamiltonian_fd(&g, 0.1, &uniform_rho(n)).unwrap()
        };
        pauli_decompose(&h).unwrap().len() as f64
    };
    let r2 = count(4, true) / count(4, false);
    let r4 = count(16, true) / count(16, false);
    assert!(r4 > r2, "{r2} {r4}");
}

#[test]
fn hse_run_basics() {
    let config = SimConfig::for_ic(IcKind::Sine)
        .with_viscosity(0.05)
        .with_total_time(0.0);
    let run = hse_run(&config, 16, HseOptions::default()).unwrap();
    let u0 = initial_condition(IcKind::Sine, &Grid1D::new(16).unwrap(), &config);
    assert_eq!(run.field, u0);
    assert!(run.steps.is_empty());

    let config = config.with_total_time(0.02);
    let run = hse_run(&config, 16, HseOptions::default()).unwrap();
    assert_eq!(run.steps.len(), 4);
    assert_eq!(run.readout_cost, 4 * 16);
    assert!(!run.diverged);
    assert!(run.steps.iter().all(|s| (s.norm - 1.0).abs() < 1e-10));
    let trace = run.l2_trace(|_| Ok(u0.clone())).unwrap();
    assert_eq!(trace.len(), 4);

    assert!(hse_run(&config, 12, HseOptions::default()).is_err());
    assert!(matches!(
        hse_run(&config, 256, HseOptions::default()),
        Err(Error::GuardExceeded { .. })
    ));
    let bad_dt = HseOptions {
        dt: 0.003,
        ..HseOptions::default()
    };
    assert!(hse_run(&config, 16, bad_dt).is_err());
}

#[test]
fn hse_variational_run() {
    let config = SimConfig::for_ic(IcKind::Sine)
        .with_viscosity(0.1)
        .with_total_time(0.01);
    let opts = HseOptions {
        evolution: Evolution::Variational {
            layers: 2,
            iters: 5,
        },
        ..HseOptions::default()
    };
    let run = hse_run(&config, 8, opts).unwrap();
    assert_eq!(run.steps.len(), 2);
    // uniform initial density gives the smallest decomposition
    assert!(run.depth_per_step >= 2 * pauli_len_initial(8, 0.1));
    assert_eq!(run.depth_per_step % 2, 0);
    assert_eq!(run.steps[0].depth, 2 * pauli_len_initial(8, 0.1));
}

fn pauli_len_initial(n: usize, nu: f64) -> usize {
    let g = Grid1D::new(n).unwrap();
    pauli_decompose(&build_hamiltonian_fd(&g, nu, &uniform_rho(n)).unwrap())
        .unwrap()
        .len()
}

#[test]
fn expm_consistency_for_small_hamiltonian() {
    let grid = Grid1D::new(4).unwrap();
    let h = build_hamiltonian_fd(&grid, 0.1, &uniform_rho(4)).unwrap();
    let u = expm_hermitian(&h, 0.1).unwrap();
    let psi = random_state(4, 14);
    let a = exact_step(&psi, &h, 0.1).unwrap();
    let b = (u * DVector::from_column_slice(psi.amplitudes()))
        .as_slice()
        .to_vec();
    for (x, y) in a.amplitudes().iter().zip(&b) {
        assert!((x - y).norm() < 1e-14);
    }
}
