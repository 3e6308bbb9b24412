//! Benchmark records and their CSV / JSON forms.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Gmres,
    SpectralClassical,
    Qtn,
    HseFd,
    HseSpectral,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Gmres,
        Method::SpectralClassical,
        Method::Qtn,
        Method::HseFd,
        Method::HseSpectral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gmres => "gmres",
            Method::SpectralClassical => "spectral-classical",
            Method::Qtn => "qtn",
            Method::HseFd => "hse-fd",
            Method::HseSpectral => "hse-spectral",
        }
    }

    /// Methods that encode the field on `log2 N` qubits or sites.
    pub fn is_quantum(self) -> bool {
        matches!(self, Method::Qtn | Method::HseFd | Method::HseSpectral)
    }

    pub fn is_hse(self) -> bool {
        matches!(self, Method::HseFd | Method::HseSpectral)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub method: Method,
    #[serde(rename = "N")]
    pub n: usize,
    pub chi_max: Option<usize>,
    pub dt: f64,
    pub nu: f64,
    #[serde(rename = "Re")]
    pub re: f64,
    /// Empty when the run failed before producing a field.
    pub l2_error: Option<f64>,
    pub runtime_seconds: f64,
    pub entropy_max: Option<f64>,
    pub max_bond_used: Option<usize>,
    pub depth_per_step: Option<usize>,
    pub readout_cost: Option<usize>,
    pub diverged: bool,
    pub seed: u64,
}

pub const CSV_HEADER: [&str; 14] = [
    "method",
    "N",
    "chi_max",
    "dt",
    "nu",
    "Re",
    "l2_error",
    "runtime_seconds",
    "entropy_max",
    "max_bond_used",
    "depth_per_step",
    "readout_cost",
    "diverged",
    "seed",
];

/// Column of `runtime_seconds`, the only field allowed to differ between
/// same-seed runs.
pub const RUNTIME_COLUMN: usize = 7;

/// 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl BenchmarkRecord {
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.method.to_string(),
            self.n.to_string(),
            opt(self.chi_max),
            format_float(self.dt),
            format_float(self.nu),
            format_float(self.re),
            self.l2_error.map(format_float).unwrap_or_default(),
            format_float(self.runtime_seconds),
            self.entropy_max.map(format_float).unwrap_or_default(),
            opt(self.max_bond_used),
            opt(self.depth_per_step),
            opt(self.readout_cost),
            self.diverged.to_string(),
            self.seed.to_string(),
        ]
    }

    fn from_csv_fields(fields: &csv::StringRecord) -> std::result::Result<Self, String> {
        if fields.len() != CSV_HEADER.len() {
            return Err(format!(
                "expected {} fields, found {}",
                CSV_HEADER.len(),
                fields.len()
            ));
        }
        fn req<T: FromStr>(s: &str, name: &str) -> std::result::Result<T, String> {
            s.trim().parse().map_err(|_| format!("bad {name} `{s}`"))
        }
        fn nullable<T: FromStr>(s: &str, name: &str) -> std::result::Result<Option<T>, String> {
            if s.trim().is_empty() {
                Ok(None)
            } else {
                req(s, name).map(Some)
            }
        }
        Ok(Self {
            method: fields[0].parse().map_err(|e: BenchError| e.to_string())?,
            n: req(&fields[1], "N")?,
            chi_max: nullable(&fields[2], "chi_max")?,
            dt: req(&fields[3], "dt")?,
            nu: req(&fields[4], "nu")?,
            re: req(&fields[5], "Re")?,
            l2_error: nullable(&fields[6], "l2_error")?,
            runtime_seconds: req(&fields[7], "runtime_seconds")?,
            entropy_max: nullable(&fields[8], "entropy_max")?,
            max_bond_used: nullable(&fields[9], "max_bond_used")?,
            depth_per_step: nullable(&fields[10], "depth_per_step")?,
            readout_cost: nullable(&fields[11], "readout_cost")?,
            diverged: req(&fields[12], "diverged")?,
            seed: req(&fields[13], "seed")?,
        })
    }
}

pub fn write_csv<W: Write>(records: &[BenchmarkRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[BenchmarkRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(records, BufWriter::new(file)).map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_json(records: &[BenchmarkRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, records).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_csv(path: &Path) -> Result<Vec<BenchmarkRecord>> {
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(BenchError::Parse {
            path: path.to_path_buf(),
            row: 0,
            reason: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let rec = BenchmarkRecord::from_csv_fields(&row).map_err(|reason| BenchError::Parse {
            path: path.to_path_buf(),
            row: i + 1,
            reason,
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_json(path: &Path) -> Result<Vec<BenchmarkRecord>> {
    let file = File::open(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Picks the format from the extension: `.json` or CSV otherwise.
pub fn read_records(path: &Path) -> Result<Vec<BenchmarkRecord>> {
    if is_json(path) {
        parse_json(path)
    } else {
        parse_csv(path)
    }
}

pub fn write_records(records: &[BenchmarkRecord], path: &Path) -> Result<()> {
    if is_json(path) {
        emit_json(records, path)
    } else {
        emit_csv(records, path)
    }
}
