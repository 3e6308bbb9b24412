//! Per-figure CSV tables derived from benchmark records.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use bqb_core::domain::{IcKind, SimConfig};
use bqb_core::mps::TruncationPolicy;
use bqb_core::qtn::{qtn_depth_proxy, qtn_run};

use crate::error::{BenchError, Result};
use crate::record::{format_float, BenchmarkRecord, Method};
use crate::sweep::{SweepSpec, DEFAULT_CUTOFF};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Accuracy,
    Runtime,
    Depth,
    Entropy,
    ChiSweep,
    DtConvergence,
    ReScaling,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Accuracy,
        Figure::Runtime,
        Figure::Depth,
        Figure::Entropy,
        Figure::ChiSweep,
        Figure::DtConvergence,
        Figure::ReScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Accuracy => "accuracy",
            Figure::Runtime => "runtime",
            Figure::Depth => "depth",
            Figure::Entropy => "entropy",
            Figure::ChiSweep => "chi-sweep",
            Figure::DtConvergence => "dt-convergence",
            Figure::ReScaling => "re-scaling",
        }
    }

    /// Sweep that feeds the figure when no record file is given. `Entropy`
    /// reads solver telemetry instead and has none.
    pub fn default_spec(self) -> Option<SweepSpec> {
        let base = SweepSpec::default();
        match self {
            Figure::Accuracy | Figure::Runtime | Figure::Depth => Some(base),
            Figure::Entropy => None,
            Figure::ChiSweep => Some(SweepSpec {
                methods: vec![Method::Qtn],
                grid_sizes: vec![128],
                chi_values: Some(vec![2, 4, 8, 16, 32]),
                repetitions: 1,
                ..base
            }),
            Figure::DtConvergence => Some(SweepSpec {
                methods: vec![Method::Gmres, Method::Qtn, Method::HseFd],
                grid_sizes: vec![32],
                dt_values: Some(vec![0.01, 0.005, 0.0025]),
                repetitions: 1,
                ..base
            }),
            Figure::ReScaling => Some(SweepSpec {
                methods: vec![Method::Qtn, Method::HseFd, Method::HseSpectral],
                grid_sizes: vec![64],
                reynolds_values: Some(vec![10.0, 50.0, 100.0]),
                repetitions: 1,
                ..base
            }),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| BenchError::invalid(format!("unknown figure `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn f(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn u(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn figure_table(figure: Figure, records: &[BenchmarkRecord]) -> Result<Table> {
    let table = match figure {
        Figure::Accuracy => Table {
            header: vec!["method", "N", "l2_error"],
            rows: records
                .iter()
                .map(|r| vec![r.method.to_string(), r.n.to_string(), f(r.l2_error)])
                .collect(),
        },
        Figure::Runtime => Table {
            header: vec!["method", "N", "runtime_seconds"],
            rows: records
                .iter()
                .map(|r| {
                    vec![
                        r.method.to_string(),
                        r.n.to_string(),
                        format_float(r.runtime_seconds),
                    ]
                })
                .collect(),
        },
        Figure::Depth => {
            let mut rows: Vec<Vec<String>> = records
                .iter()
                .filter(|r| r.depth_per_step.is_some())
                .map(|r| {
                    vec![
                        r.method.to_string(),
                        r.n.to_string(),
                        u(r.depth_per_step),
                        "false".into(),
                    ]
                })
                .collect();
            let mut qtn_sizes: Vec<usize> = records
                .iter()
                .filter(|r| r.method == Method::Qtn)
                .map(|r| r.n)
                .collect();
            qtn_sizes.sort_unstable();
            qtn_sizes.dedup();
            for n in qtn_sizes {
                rows.push(vec![
                    "qtn".into(),
                    n.to_string(),
                    qtn_depth_proxy(n)?.to_string(),
                    "true".into(),
                ]);
            }
            Table {
                header: vec!["method", "N", "depth_per_step", "estimate"],
                rows,
            }
        }
        Figure::Entropy => {
            return Err(BenchError::invalid(
                "the entropy figure is built from solver telemetry, use entropy_trace",
            ))
        }
        Figure::ChiSweep => Table {
            header: vec!["N", "chi_max", "l2_error", "entropy_max", "max_bond_used"],
            rows: records
                .iter()
                .filter(|r| r.method == Method::Qtn)
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        u(r.chi_max),
                        f(r.l2_error),
                        f(r.entropy_max),
                        u(r.max_bond_used),
                    ]
                })
                .collect(),
        },
        Figure::DtConvergence => Table {
            header: vec!["method", "N", "dt", "l2_error"],
            rows: records
                .iter()
                .map(|r| {
                    vec![
                        r.method.to_string(),
                        r.n.to_string(),
                        format_float(r.dt),
                        f(r.l2_error),
                    ]
                })
                .collect(),
        },
        Figure::ReScaling => Table {
            header: vec![
                "method",
                "N",
                "Re",
                "chi_max",
                "l2_error",
                "depth_per_step",
                "max_bond_used",
            ],
            rows: records
                .iter()
                .map(|r| {
                    vec![
                        r.method.to_string(),
                        r.n.to_string(),
                        format_float(r.re),
                        u(r.chi_max),
                        f(r.l2_error),
                        u(r.depth_per_step),
                        u(r.max_bond_used),
                    ]
                })
                .collect(),
        },
    };
    Ok(table)
}

/// Mid-cut entropy and bond telemetry of one QTN step-IC run.
pub fn entropy_trace(n: usize, chi: usize, nu: f64) -> Result<Table> {
    let config = SimConfig::for_ic(IcKind::Step).with_viscosity(nu);
    let run = qtn_run(&config, n, TruncationPolicy::new(chi, DEFAULT_CUTOFF)?)?;
    let rows = run
        .state
        .telemetry
        .iter()
        .map(|t| {
            vec![
                format_float(t.t),
                format_float(t.entropy_mid),
                t.max_bond.to_string(),
                format_float(t.discarded_weight_total),
            ]
        })
        .collect();
    Ok(Table {
        header: vec!["t", "entropy_mid", "max_bond", "discarded_weight_total"],
        rows,
    })
}
