//! Flat `key = value` sweep configuration. Lists are comma separated and
//! `#` starts a comment.
//!
//! ```text
//! methods = qtn, hse-fd
//! grid_sizes = 16, 32, 64
//! chi_values = 4, 16
//! repetitions = 1
//! ```

use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

use bqb_core::domain::IcKind;

use crate::error::{BenchError, Result};
use crate::record::Method;
use crate::sweep::{HseEvolution, SweepSpec};

fn list<T: FromStr>(value: &str, line: usize, key: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| BenchError::Config {
                line,
                reason: format!("bad value `{s}` for {key}"),
            })
        })
        .collect()
}

fn scalar<T: FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.parse().map_err(|_| BenchError::Config {
        line,
        reason: format!("bad value `{value}` for {key}"),
    })
}

pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut spec = SweepSpec::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(BenchError::Config {
                line,
                reason: format!("expected key = value, got `{body}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(BenchError::Config {
                line,
                reason: format!("duplicate key `{key}`"),
            });
        }
        match key {
            "methods" => {
                spec.methods = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        Method::from_str(s).map_err(|_| BenchError::Config {
                            line,
                            reason: format!("unknown method `{s}`"),
                        })
                    })
                    .collect::<Result<_>>()?
            }
            "grid_sizes" => spec.grid_sizes = list(value, line, key)?,
            "chi_values" => spec.chi_values = Some(list(value, line, key)?),
            "dt_values" => spec.dt_values = Some(list(value, line, key)?),
            "reynolds_values" => spec.reynolds_values = Some(list(value, line, key)?),
            "nu" => spec.nu = scalar(value, line, key)?,
            "ic" => {
                spec.ic = IcKind::from_str(value).map_err(|e| BenchError::Config {
                    line,
                    reason: e.to_string(),
                })?
            }
            "total_time" => spec.total_time = scalar(value, line, key)?,
            "seed" => spec.seed = scalar(value, line, key)?,
            "repetitions" => spec.repetitions = scalar(value, line, key)?,
            "workers" => spec.workers = Some(scalar(value, line, key)?),
            "hse_evolution" => {
                spec.hse_evolution = match value {
                    "trotter" => HseEvolution::Trotter,
                    "exact" => HseEvolution::Exact,
                    other => {
                        return Err(BenchError::Config {
                            line,
                            reason: format!("unknown hse_evolution `{other}`"),
                        })
                    }
                }
            }
            other => {
                return Err(BenchError::Config {
                    line,
                    reason: format!("unknown key `{other}`"),
                })
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

pub fn load_config(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
