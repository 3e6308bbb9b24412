use bqb_core::classical::{reference_solution_with, FdBurgers};
use bqb_core::domain::*;
use bqb_core::mps::*;
use bqb_core::qtn::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn setup(n: usize, config: &SimConfig) -> (Grid1D, QtnOperators, FdBurgers) {
    let grid = Grid1D::new(n).unwrap();
    let ops = QtnOperators::new(&grid, config.stencil, config.viscosity).unwrap();
    let dense = FdBurgers::new(&grid, config).unwrap();
    (grid, ops, dense)
}

#[test]
fn rhs_of_constant_vanishes() {
    let config = SimConfig::default();
    let (_, ops, _) = setup(32, &config);
    let u = Mps::constant(5, 0.7).unwrap();
    let r = qtn_rhs(&u, &ops, TruncationPolicy::exact()).unwrap();
    assert!(mps_to_vector(&r).unwrap().iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn rhs_of_ramp_is_minus_x_inside() {
    let config = SimConfig::default();
    let (grid, ops, _) = setup(32, &config);
    let u = mps_from_vector(grid.coords(), TruncationPolicy::exact()).unwrap();
    let r = mps_to_vector(&qtn_rhs(&u, &ops, TruncationPolicy::exact()).unwrap()).unwrap();
    for (i, (ri, x)) in r.iter().zip(grid.coords()).enumerate().take(31).skip(1) {
        assert!((ri + x).abs() < 1e-9, "node {i}");
    }
}

#[test]
fn rhs_matches_dense_oracle() {
    let config = SimConfig::default().with_viscosity(0.03);
    let (_, ops, dense) = setup(32, &config);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let v: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
    let u = mps_from_vector(&v, TruncationPolicy::exact()).unwrap();
    let got = mps_to_vector(&qtn_rhs(&u, &ops, TruncationPolicy::exact()).unwrap()).unwrap();
    let mut oracle = vec![0.0; 32];
    dense.rhs(&v, &mut oracle);
    let scale = oracle.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    assert!(max_diff(&got, &oracle) < 1e-10 * scale);
}

#[test]
fn fixed_point_is_preserved() {
    let config = SimConfig {
        bc_left: 0.4,
        bc_right: 0.4,
        ..SimConfig::default()
    };
    let (grid, ops, _) = setup(16, &config);
    let field = VelocityField::new(grid, vec![0.4; 16]).unwrap();
    let mut qs = QtnState::new(
        &field,
        TruncationPolicy::exact(),
        Some((0.4, 0.4)),
        config.viscosity,
    )
    .unwrap();
    for _ in 0..5 {
        qtn_rk4_step(&mut qs, &ops, 0.01).unwrap();
    }
    assert!(max_diff(qs.field().unwrap().values(), &[0.4; 16]) < 1e-10);
    assert_eq!(qs.telemetry.len(), 6);
}

#[test]
fn exact_policy_tracks_dense_rk4_each_step() {
    let config = SimConfig::default();
    for n in [16, 32, 64] {
        let (grid, ops, dense) = setup(n, &config);
        let u0 = initial_condition(IcKind::Step, &grid, &config);
        let mut qs = QtnState::new(
            &u0,
            TruncationPolicy::exact(),
            Some((1.0, 0.0)),
            config.viscosity,
        )
        .unwrap();
        let mut u = u0;
        for _ in 0..10 {
            let dt = config.next_dt(&u, qs.t);
            qtn_rk4_step(&mut qs, &ops, dt).unwrap();
            u = dense.explicit_rk4_step(&u, dt).unwrap();
            let err = relative_l2_error(&qs.field().unwrap(), &u).unwrap().value;
            assert!(err < 1e-8, "N={n} err {err}");
        }
    }
}

#[test]
fn telemetry_is_consistent() {
    let config = SimConfig::default().with_total_time(0.02);
    let run = qtn_run(&config, 32, TruncationPolicy::default()).unwrap();
    let rows = &run.state.telemetry;
    assert!(rows.windows(2).all(|w| w[1].t > w[0].t));
    assert!(rows.iter().all(|r| r.max_bond <= 16));
    assert!(rows
        .windows(2)
        .all(|w| w[1].discarded_weight_total >= w[0].discarded_weight_total));
    assert_eq!(rows[0].dt, 0.0);
    let total: f64 = rows.iter().map(|r| r.dt).sum();
    assert!((total - 0.02).abs() < 1e-12);
    assert!((run.field.values()[0] - 1.0).abs() < 1e-12);
    assert!(run.field.values()[31].abs() < 1e-12);
}

#[test]
fn zero_horizon_returns_initial_condition() {
    let config = SimConfig::default().with_total_time(0.0);
    let run = qtn_run(&config, 16, TruncationPolicy::default()).unwrap();
    let u0 = initial_condition(IcKind::Step, &Grid1D::new(16).unwrap(), &config);
    assert_eq!(run.field, u0);
}

#[test]
fn diffusive_sine_matches_reference() {
    let config = SimConfig::for_ic(IcKind::Sine).with_viscosity(0.5);
    let run = qtn_run(&config, 32, TruncationPolicy::default()).unwrap();
    let reference = reference_solution_with(&config, 32, 256).unwrap();
    let err = relative_l2_error(&run.field, &reference).unwrap().value;
    assert!(err < 1e-3, "{err}");
}

#[test]
fn rejects_non_power_of_two() {
    assert!(qtn_run(&SimConfig::default(), 48, TruncationPolicy::default()).is_err());
}

#[test]
fn depth_proxy() {
    assert_eq!(qtn_depth_proxy(128).unwrap(), 1408);
    assert_eq!(qtn_depth_proxy(4).unwrap(), 44);
    assert!(qtn_depth_proxy(0).is_err());
    assert!(qtn_depth_proxy(1).is_err());
}
