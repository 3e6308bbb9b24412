use std::f64::consts::PI;

use bqb_core::classical::*;
use bqb_core::domain::*;
use bqb_core::kernels::GmresOptions;
use bqb_core::Error;
use nalgebra::{DMatrix, DVector};

fn max_interior_err(
    ops: &FdOperators,
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    second: bool,
) -> f64 {
    let grid = Grid1D::new(ops.n_points()).unwrap();
    let u: Vec<f64> = grid.coords().iter().map(|&x| f(x)).collect();
    let mut out = vec![0.0; u.len()];
    if second {
        ops.laplacian(&u, &mut out);
    } else {
        ops.gradient(&u, &mut out);
    }
    let n = u.len();
    (2..n - 2)
        .map(|i| (out[i] - df(grid.coords()[i])).abs())
        .fold(0.0, f64::max)
}

#[test]
fn stencil_convergence_orders() {
    let f = |x: f64| (2.0 * PI * x).sin();
    let d1 = |x: f64| 2.0 * PI * (2.0 * PI * x).cos();
    let d2 = |x: f64| -4.0 * PI * PI * (2.0 * PI * x).sin();
    for (order, expect) in [(StencilOrder::Second, 4.0), (StencilOrder::Fourth, 16.0)] {
        for second in [false, true] {
            let errs: Vec<f64> = [33, 65]
                .iter()
                .map(|&n| {
                    let ops = FdOperators::new(&Grid1D::new(n).unwrap(), order, Boundary::Periodic)
                        .unwrap();
                    max_interior_err(&ops, f, if second { d2 } else { d1 }, second)
                })
                .collect();
            let ratio = errs[0] / errs[1];
            assert!(
                (ratio / expect - 1.0).abs() < 0.15,
                "{order:?} second={second} ratio {ratio}"
            );
        }
    }
}

#[test]
fn dense_matrices_match_apply() {
    let grid = Grid1D::new(9).unwrap();
    let u: Vec<f64> = grid.coords().iter().map(|x| x * x * x - 0.3 * x).collect();
    for boundary in [Boundary::Dirichlet, Boundary::Periodic] {
        let ops = FdOperators::new(&grid, StencilOrder::Fourth, boundary).unwrap();
        let mut uu = u.clone();
        if boundary == Boundary::Periodic {
            uu[8] = uu[0];
        }
        for second in [false, true] {
            let m = if second {
                ops.laplacian_matrix()
            } else {
                ops.gradient_matrix()
            };
            let mut out = vec![0.0; 9];
            if second {
                ops.laplacian(&uu, &mut out);
            } else {
                ops.gradient(&uu, &mut out);
            }
            let dense = &m * DVector::from_vec(uu.clone());
            for i in 0..9 {
                assert!((dense[i] - out[i]).abs() < 1e-10, "{boundary:?} row {i}");
            }
        }
    }
}

#[test]
fn dirichlet_stencils_exact_on_low_degree_polynomials() {
    let grid = Grid1D::new(12).unwrap();
    let ops = FdOperators::new(&grid, StencilOrder::Fourth, Boundary::Dirichlet).unwrap();
    let u: Vec<f64> = grid
        .coords()
        .iter()
        .map(|x| 2.0 * x * x - x + 0.5)
        .collect();
    let mut d = vec![0.0; 12];
    ops.gradient(&u, &mut d);
    for (i, x) in grid.coords().iter().enumerate() {
        assert!((d[i] - (4.0 * x - 1.0)).abs() < 1e-10);
    }
    ops.laplacian(&u, &mut d);
    assert_eq!(d[0], 0.0);
    assert_eq!(d[11], 0.0);
    for v in &d[1..11] {
        assert!((v - 4.0).abs() < 1e-8);
    }
}

#[test]
fn heat_eigenmode_decay() {
    let nu = 0.05;
    let t_end = 0.2;
    let config = SimConfig {
        ic_kind: IcKind::Sine,
        bc_left: 0.0,
        bc_right: 0.0,
        ..SimConfig::default()
    }
    .with_viscosity(nu)
    .with_total_time(t_end);
    let grid = Grid1D::new(65).unwrap();
    let solver = FdBurgers::new(&grid, &config)
        .unwrap()
        .with_convection(false);
    let u0 = VelocityField::new(
        grid.clone(),
        grid.coords().iter().map(|x| (PI * x).sin()).collect(),
    )
    .unwrap();
    let out = march(&config, u0, |u, dt| {
        Ok((solver.explicit_rk4_step(u, dt)?, 0.0, true))
    })
    .unwrap();
    let decay = (-nu * PI * PI * t_end).exp();
    for (x, v) in grid.coords().iter().zip(out.field.values()) {
        assert!((v - decay * (PI * x).sin()).abs() < 1e-6);
    }
    assert!((out.time - t_end).abs() < 1e-12);
}

#[test]
fn semi_implicit_matches_direct_solve() {
    let config = SimConfig::default().with_viscosity(0.02);
    let grid = Grid1D::new(33).unwrap();
    let solver = FdBurgers::new(&grid, &config).unwrap();
    let u0 = initial_condition(IcKind::Gaussian, &grid, &config);
    let dt = 0.003;
    let step = solver
        .semi_implicit_step(&u0, dt, GmresOptions::default())
        .unwrap();
    assert!(step.converged && step.residual <= 1e-10);

    // direct oracle: dense LU of (I − νΔt L)
    let n = 33;
    let l = solver.operators().laplacian_matrix();
    let a = DMatrix::<f64>::identity(n, n) - l * (0.02 * dt);
    let u = u0.values();
    let d1 = solver.operators().gradient_matrix();
    let du = &d1 * DVector::from_column_slice(u);
    let mut rhs = DVector::from_fn(n, |i, _| u[i] - dt * u[i] * du[i]);
    rhs[0] = 1.0;
    rhs[n - 1] = 0.0;
    let x = a.lu().solve(&rhs).unwrap();
    for i in 0..n {
        assert!((x[i] - step.field.values()[i]).abs() < 1e-8);
    }
    assert_eq!(step.field.values()[0], 1.0);
    assert_eq!(step.field.values()[n - 1], 0.0);
}

#[test]
fn semi_implicit_run_tracks_explicit() {
    let config = SimConfig::default().with_viscosity(0.05);
    let a = run_semi_implicit(&config, 33, GmresOptions::default()).unwrap();
    let b = run_explicit_rk4(&config, 33).unwrap();
    assert!(a.all_converged);
    assert!(a.max_residual <= 1e-10);
    let err = relative_l2_error(&a.field, &b.field).unwrap().value;
    assert!(err < 2e-2, "{err}");
}

fn fixed_dt_run(solver: &FdBurgers, u0: &VelocityField, dt: f64, steps: usize) -> VelocityField {
    let mut u = u0.clone();
    for _ in 0..steps {
        u = solver.explicit_rk4_step(&u, dt).unwrap();
    }
    u
}

#[test]
fn rk4_temporal_order() {
    let config = SimConfig::for_ic(IcKind::Sine).with_viscosity(0.02);
    let grid = Grid1D::new(33).unwrap();
    let solver = FdBurgers::new(&grid, &config).unwrap();
    let u0 = initial_condition(IcKind::Sine, &grid, &config);
    let t_end = 0.16;
    let fine = fixed_dt_run(&solver, &u0, t_end / 3200.0, 3200);
    let e1 = relative_l2_error(&fixed_dt_run(&solver, &u0, t_end / 20.0, 20), &fine)
        .unwrap()
        .value;
    let e2 = relative_l2_error(&fixed_dt_run(&solver, &u0, t_end / 40.0, 40), &fine)
        .unwrap()
        .value;
    let ratio = e1 / e2;
    assert!(
        (12.0..=20.0).contains(&ratio),
        "ratio {ratio} ({e1:e}, {e2:e})"
    );
}

#[test]
fn step_run_respects_boundaries_and_horizon() {
    let config = SimConfig::default();
    let out = run_explicit_rk4(&config, 64).unwrap();
    assert_eq!(out.field.values()[0], 1.0);
    assert_eq!(out.field.values()[63], 0.0);
    assert!((out.time - 0.1).abs() < 1e-12);
    assert!(out
        .field
        .values()
        .iter()
        .all(|v| (-0.05..=1.05).contains(v)));
}

#[test]
fn periodic_fd_conserves_mass() {
    let grid = Grid1D::new(65).unwrap();
    let solver = FdBurgers::periodic(&grid, 0.01, StencilOrder::Fourth).unwrap();
    let config = SimConfig::for_ic(IcKind::Sine);
    let mut u = initial_condition(IcKind::Sine, &grid, &config);
    let mass0: f64 = u.values()[..64].iter().sum();
    for _ in 0..100 {
        u = solver.explicit_rk4_step(&u, 1e-3).unwrap();
    }
    let mass: f64 = u.values()[..64].iter().sum();
    assert!((mass - mass0).abs() < 1e-12);
    assert_eq!(u.values()[0], u.values()[64]);
}

#[test]
fn spectral_single_mode_decays_exactly() {
    let n = 32;
    let nu = 0.01;
    let solver = SpectralBurgers::new(
        n,
        nu,
        SpectralOptions {
            dealias: true,
            nonlinear: false,
        },
    )
    .unwrap();
    let m = 3.0;
    let mut u: Vec<f64> = (0..n)
        .map(|j| (2.0 * PI * m * j as f64 / n as f64).cos())
        .collect();
    let dt = 1e-3;
    let steps = 100;
    for _ in 0..steps {
        u = solver.step(&u, dt).unwrap();
    }
    let decay = (-nu * (2.0 * PI * m).powi(2) * dt * steps as f64).exp();
    for (j, v) in u.iter().enumerate() {
        let exact = decay * (2.0 * PI * m * j as f64 / n as f64).cos();
        assert!((v - exact).abs() < 1e-10);
    }
}

#[test]
fn spectral_interpolant_reproduces_band_limited_data() {
    let n = 16;
    let solver = SpectralBurgers::new(n, 0.01, SpectralOptions::default()).unwrap();
    let f = |x: f64| 0.3 + (2.0 * PI * x).sin() - 0.5 * (6.0 * PI * x).cos();
    let u: Vec<f64> = (0..n).map(|j| f(j as f64 / n as f64)).collect();
    let xs = [0.0, 0.123, 0.5, 0.77, 1.0];
    for (x, v) in xs.iter().zip(solver.interpolate(&u, &xs)) {
        assert!((v - f(*x)).abs() < 1e-12);
    }
}

#[test]
fn spectral_agrees_with_fd_on_sine() {
    let config = SimConfig::for_ic(IcKind::Sine);
    let spec = spectral_run(&config, 64, SpectralOptions::default()).unwrap();
    let fd = reference_solution_with(&config, 64, 1024).unwrap();
    let err = relative_l2_error(&spec, &fd).unwrap().value;
    assert!(err < 1e-3, "{err}");
}

#[test]
fn spectral_rejects_step_and_bad_sizes() {
    assert!(matches!(
        spectral_run(&SimConfig::default(), 64, SpectralOptions::default()),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(
        spectral_run(
            &SimConfig::for_ic(IcKind::Sine),
            48,
            SpectralOptions::default()
        ),
        Err(Error::NotPowerOfTwo(48))
    ));
}

#[test]
fn nested_reference_grid() {
    assert_eq!(reference_grid_size(128, 2048).unwrap(), 2160);
    assert_eq!(reference_grid_size(128, 4096).unwrap(), 4192);
    assert_eq!(reference_grid_size(2, 2048).unwrap(), 2048);
    for n in [4, 8, 16, 32, 64, 128] {
        let r = reference_grid_size(n, 2048).unwrap();
        assert!(r >= 2048 && (r - 1).is_multiple_of(n - 1) && ((r - 1) / (n - 1)) % 2 == 1);
    }
    let grid = Grid1D::new(2160).unwrap();
    let field = VelocityField::new(grid.clone(), grid.coords().to_vec()).unwrap();
    let coarse = downsample(&field, 128).unwrap();
    for (a, b) in coarse
        .values()
        .iter()
        .zip(Grid1D::new(128).unwrap().coords())
    {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(downsample(&field, 100).is_err());
}

#[test]
fn reference_is_self_consistent_at_high_viscosity() {
    let config = SimConfig::for_ic(IcKind::Gaussian).with_viscosity(0.5);
    let a = reference_solution_with(&config, 17, 257).unwrap();
    let b = reference_solution_with(&config, 17, 513).unwrap();
    let err = relative_l2_error(&a, &b).unwrap().value;
    assert!(err < 1e-6, "{err}");
}
