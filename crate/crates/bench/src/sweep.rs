//! Parameter sweeps over the five solvers.

use std::collections::HashMap;
use std::time::Instant;

use bqb_core::classical::{reference_solution, run_semi_implicit, spectral_run, SpectralOptions};
use bqb_core::domain::{relative_l2_error, IcKind, SimConfig, VelocityField};
use bqb_core::hse::{hse_run, Evolution, HamiltonianKind, HseOptions};
use bqb_core::kernels::GmresOptions;
use bqb_core::mps::TruncationPolicy;
use bqb_core::qtn::qtn_run;
use rayon::prelude::*;

use crate::error::{BenchError, Result};
use crate::record::{BenchmarkRecord, Method};

pub const DEFAULT_GRID_SIZES: [usize; 6] = [4, 8, 16, 32, 64, 128];
pub const DEFAULT_CHI: usize = 16;
pub const DEFAULT_DT: f64 = 0.005;
pub const DEFAULT_NU: f64 = 0.01;
pub const DEFAULT_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HseEvolution {
    Trotter,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub methods: Vec<Method>,
    pub grid_sizes: Vec<usize>,
    /// QTN only; `None` means [`DEFAULT_CHI`].
    pub chi_values: Option<Vec<usize>>,
    pub dt_values: Option<Vec<f64>>,
    /// Overrides `nu` with `ν = 1/(2 Re)` per value.
    pub reynolds_values: Option<Vec<f64>>,
    pub nu: f64,
    pub ic: IcKind,
    pub total_time: f64,
    pub seed: u64,
    pub repetitions: usize,
    pub workers: Option<usize>,
    pub hse_evolution: HseEvolution,
}

impl Default for SweepSpec {
    /// The five-method accuracy matrix.
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            grid_sizes: DEFAULT_GRID_SIZES.to_vec(),
            chi_values: None,
            dt_values: None,
            reynolds_values: None,
            nu: DEFAULT_NU,
            ic: IcKind::Step,
            total_time: 0.1,
            seed: 0,
            repetitions: 3,
            workers: None,
            hse_evolution: HseEvolution::Trotter,
        }
    }
}

/// One point of the Cartesian product.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub method: Method,
    pub n: usize,
    pub chi: Option<usize>,
    pub dt: f64,
    pub nu: f64,
}

fn positive_list(name: &str, values: &Option<Vec<f64>>) -> Result<()> {
    if let Some(v) = values {
        if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(BenchError::invalid(format!(
                "{name} must be a non-empty list of positive numbers"
            )));
        }
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(BenchError::invalid("methods must not be empty"));
        }
        if self.grid_sizes.is_empty() {
            return Err(BenchError::invalid("grid_sizes must not be empty"));
        }
        for &n in &self.grid_sizes {
            if n < 2 {
                return Err(BenchError::invalid(format!("grid size {n} is below 2")));
            }
            if !n.is_power_of_two() {
                if let Some(m) = self.methods.iter().find(|m| m.is_quantum()) {
                    return Err(BenchError::invalid(format!(
                        "{m} needs power-of-two N, got {n}"
                    )));
                }
            }
        }
        if let Some(chis) = &self.chi_values {
            if chis.is_empty() || chis.contains(&0) {
                return Err(BenchError::invalid(
                    "chi_values must be a non-empty list of positive integers",
                ));
            }
        }
        positive_list("dt_values", &self.dt_values)?;
        positive_list("reynolds_values", &self.reynolds_values)?;
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(BenchError::invalid("nu must be positive"));
        }
        if !(self.total_time >= 0.0 && self.total_time.is_finite()) {
            return Err(BenchError::invalid("total_time must be >= 0"));
        }
        if self.repetitions == 0 {
            return Err(BenchError::invalid("repetitions must be >= 1"));
        }
        if self.workers == Some(0) {
            return Err(BenchError::invalid("workers must be >= 1"));
        }
        Ok(())
    }

    fn viscosities(&self) -> Vec<f64> {
        match &self.reynolds_values {
            Some(res) => res.iter().map(|re| 1.0 / (2.0 * re)).collect(),
            None => vec![self.nu],
        }
    }

    /// Cells in output order: method, N, ν, dt, χ.
    pub fn cells(&self) -> Vec<Cell> {
        let dts = self.dt_values.clone().unwrap_or_else(|| vec![DEFAULT_DT]);
        let chis = self.chi_values.clone().unwrap_or_else(|| vec![DEFAULT_CHI]);
        let nus = self.viscosities();
        let mut out = Vec::new();
        for &method in &self.methods {
            for &n in &self.grid_sizes {
                for &nu in &nus {
                    for &dt in &dts {
                        if method == Method::Qtn {
                            for &chi in &chis {
                                out.push(Cell {
                                    method,
                                    n,
                                    chi: Some(chi),
                                    dt,
                                    nu,
                                });
                            }
                        } else {
                            out.push(Cell {
                                method,
                                n,
                                chi: None,
                                dt,
                                nu,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn config(&self, nu: f64, dt: f64) -> SimConfig {
        SimConfig::for_ic(self.ic)
            .with_viscosity(nu)
            .with_total_time(self.total_time)
            .with_dt_max(Some(dt))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct RefKey {
    ic: IcKind,
    nu: u64,
    total_time: u64,
    n: usize,
}

/// Reference fields per (IC, ν, T, N); filled once, then read-only.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    fields: HashMap<RefKey, std::result::Result<VelocityField, String>>,
}

impl ReferenceCache {
    fn key(spec: &SweepSpec, nu: f64, n: usize) -> RefKey {
        RefKey {
            ic: spec.ic,
            nu: nu.to_bits(),
            total_time: spec.total_time.to_bits(),
            n,
        }
    }

    /// Computes every reference the cells need, in parallel.
    pub fn warm(spec: &SweepSpec, cells: &[Cell]) -> Self {
        let mut keys: Vec<(RefKey, f64)> = Vec::new();
        for c in cells {
            let k = Self::key(spec, c.nu, c.n);
            if !keys.iter().any(|(x, _)| *x == k) {
                keys.push((k, c.nu));
            }
        }
        let fields = keys
            .into_par_iter()
            .map(|(k, nu)| {
                // the reference grid picks its own CFL step
                let config = spec.config(nu, DEFAULT_DT);
                (
                    k,
                    reference_solution(&config, k.n).map_err(|e| e.to_string()),
                )
            })
            .collect();
        Self { fields }
    }

    pub fn get(
        &self,
        spec: &SweepSpec,
        nu: f64,
        n: usize,
    ) -> std::result::Result<&VelocityField, String> {
        match self.fields.get(&Self::key(spec, nu, n)) {
            Some(Ok(f)) => Ok(f),
            Some(Err(e)) => Err(e.clone()),
            None => Err(format!("no reference for N={n}, nu={nu}")),
        }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

/// What one solve produced, before error measurement.
#[derive(Debug, Clone, Default)]
struct Outcome {
    field: Option<VelocityField>,
    entropy_max: Option<f64>,
    max_bond_used: Option<usize>,
    depth_per_step: Option<usize>,
    readout_cost: Option<usize>,
    diverged: bool,
}

fn solve(spec: &SweepSpec, cell: &Cell) -> bqb_core::Result<Outcome> {
    let config = spec.config(cell.nu, cell.dt);
    match cell.method {
        Method::Gmres => {
            let run = run_semi_implicit(&config, cell.n, GmresOptions::default())?;
            Ok(Outcome {
                field: Some(run.field),
                ..Outcome::default()
            })
        }
        Method::SpectralClassical => Ok(Outcome {
            field: Some(spectral_run(&config, cell.n, SpectralOptions::default())?),
            ..Outcome::default()
        }),
        Method::Qtn => {
            let policy = TruncationPolicy::new(cell.chi.unwrap_or(DEFAULT_CHI), DEFAULT_CUTOFF)?;
            let run = qtn_run(&config, cell.n, policy)?;
            let tel = &run.state.telemetry;
            Ok(Outcome {
                field: Some(run.field),
                entropy_max: tel.iter().map(|t| t.entropy_mid).reduce(f64::max),
                max_bond_used: tel.iter().map(|t| t.max_bond).max(),
                ..Outcome::default()
            })
        }
        Method::HseFd | Method::HseSpectral => {
            let opts = HseOptions {
                method: if cell.method == Method::HseFd {
                    HamiltonianKind::Fd
                } else {
                    HamiltonianKind::Spectral
                },
                dt: cell.dt,
                evolution: match spec.hse_evolution {
                    HseEvolution::Trotter => Evolution::Trotter,
                    HseEvolution::Exact => Evolution::Exact,
                },
                seed: spec.seed,
                ..HseOptions::default()
            };
            let run = hse_run(&config, cell.n, opts)?;
            Ok(Outcome {
                field: Some(run.field),
                depth_per_step: Some(run.depth_per_step),
                readout_cost: Some(run.readout_cost),
                diverged: run.diverged,
                ..Outcome::default()
            })
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn base_record(spec: &SweepSpec, cell: &Cell, runtime_seconds: f64) -> BenchmarkRecord {
    BenchmarkRecord {
        method: cell.method,
        n: cell.n,
        chi_max: cell.chi,
        dt: cell.dt,
        nu: cell.nu,
        re: 1.0 / (2.0 * cell.nu),
        l2_error: None,
        runtime_seconds,
        entropy_max: None,
        max_bond_used: None,
        depth_per_step: None,
        readout_cost: None,
        diverged: true,
        seed: spec.seed,
    }
}

/// Runs one cell `repetitions` times and measures it against the cached
/// reference. Solver errors are returned together with the time spent.
pub fn try_run_cell(
    spec: &SweepSpec,
    cell: &Cell,
    cache: &ReferenceCache,
) -> std::result::Result<BenchmarkRecord, (bqb_core::Error, f64)> {
    let mut times = Vec::with_capacity(spec.repetitions);
    let mut first = None;
    for _ in 0..spec.repetitions {
        let start = Instant::now();
        let res = solve(spec, cell);
        let elapsed = start.elapsed().as_secs_f64().max(1e-9);
        match res {
            Ok(out) => {
                times.push(elapsed);
                first.get_or_insert(out);
            }
            Err(e) => return Err((e, elapsed)),
        }
    }
    let out = first.expect("repetitions >= 1");
    let mut record = base_record(spec, cell, median(times));
    record.entropy_max = out.entropy_max;
    record.max_bond_used = out.max_bond_used;
    record.depth_per_step = out.depth_per_step;
    record.readout_cost = out.readout_cost;
    record.diverged = out.diverged;
    record.l2_error = match (&out.field, cache.get(spec, cell.nu, cell.n)) {
        (Some(f), Ok(r)) if f.values().iter().all(|v| v.is_finite()) => {
            relative_l2_error(f, r).ok().map(|e| e.value)
        }
        _ => None,
    };
    if record.l2_error.is_none() {
        record.diverged = true;
    }
    Ok(record)
}

/// Like [`try_run_cell`], but a failed solve becomes a row with empty
/// `l2_error` and `diverged = true`.
pub fn run_cell(spec: &SweepSpec, cell: &Cell, cache: &ReferenceCache) -> BenchmarkRecord {
    try_run_cell(spec, cell, cache).unwrap_or_else(|(_, t)| base_record(spec, cell, t))
}

fn worker_count(spec: &SweepSpec) -> Result<Option<usize>> {
    match std::env::var("BQB_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(BenchError::invalid(format!(
                "BQB_WORKERS must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(spec.workers),
    }
}

/// Records in [`SweepSpec::cells`] order, independent of completion order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<BenchmarkRecord>> {
    spec.validate()?;
    let cells = spec.cells();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(spec)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        let cache = ReferenceCache::warm(spec, &cells);
        cells
            .par_iter()
            .map(|c| run_cell(spec, c, &cache))
            .collect()
    }))
}
