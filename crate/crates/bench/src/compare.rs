//! Joins two record sets on their parameters and reports error and runtime
//! deltas.

use crate::figures::Table;
use crate::record::{format_float, BenchmarkRecord, Method};

type Key = (Method, usize, Option<usize>, u64, u64);

fn key(r: &BenchmarkRecord) -> Key {
    (r.method, r.n, r.chi_max, r.dt.to_bits(), r.nu.to_bits())
}

fn delta(a: Option<f64>, b: Option<f64>) -> String {
    match (a, b) {
        (Some(x), Some(y)) => format_float(y - x),
        _ => String::new(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// One row per record of `base` with a match in `other`, in `base` order.
/// Deltas are `other − base`.
pub fn compare_records(base: &[BenchmarkRecord], other: &[BenchmarkRecord]) -> Table {
    let mut rows = Vec::new();
    for a in base {
        let Some(b) = other.iter().find(|b| key(b) == key(a)) else {
            continue;
        };
        rows.push(vec![
            a.method.to_string(),
            a.n.to_string(),
            a.chi_max.map(|c| c.to_string()).unwrap_or_default(),
            format_float(a.dt),
            format_float(a.re),
            opt(a.l2_error),
            opt(b.l2_error),
            delta(a.l2_error, b.l2_error),
            format_float(a.runtime_seconds),
            format_float(b.runtime_seconds),
            format_float(b.runtime_seconds - a.runtime_seconds),
        ]);
    }
    Table {
        header: vec![
            "method",
            "N",
            "chi_max",
            "dt",
            "Re",
            "l2_error_a",
            "l2_error_b",
            "l2_error_delta",
            "runtime_a",
            "runtime_b",
            "runtime_delta",
        ],
        rows,
    }
}

/// Records of either side without a partner on the other.
pub fn unmatched(base: &[BenchmarkRecord], other: &[BenchmarkRecord]) -> usize {
    let only_a = base
        .iter()
        .filter(|a| !other.iter().any(|b| key(a) == key(b)))
        .count();
    let only_b = other
        .iter()
        .filter(|b| !base.iter().any(|a| key(a) == key(b)))
        .count();
    only_a + only_b
}
