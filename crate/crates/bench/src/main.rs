use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use bqb_bench::compare::{compare_records, unmatched};
use bqb_bench::config::load_config;
use bqb_bench::figures::{entropy_trace, figure_table, Figure, Table};
use bqb_bench::record::{read_records, write_csv, write_records};
use bqb_bench::selftest::run_selftest;
use bqb_bench::sweep::{try_run_cell, Cell, ReferenceCache, DEFAULT_CHI, DEFAULT_DT, DEFAULT_NU};
use bqb_bench::{run_sweep, BenchError, BenchmarkRecord, Method, Result, SweepSpec};
use bqb_core::domain::IcKind;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// Burgers solver benchmark harness
#[derive(Parser, Debug)]
#[command(name = "bqb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single case and write one record
    Solve {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        n: usize,
        /// Bond cap, qtn only
        #[arg(long)]
        chi: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = DEFAULT_NU)]
        nu: f64,
        #[arg(long, default_value = "step")]
        ic: IcKind,
        /// Final time
        #[arg(long = "t", default_value_t = 0.1)]
        total_time: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        /// CSV, or JSON when the name ends in .json; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep described by a key=value config file
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the records as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Join two record files and print error and runtime deltas
    Compare { base: PathBuf, other: PathBuf },
    /// Emit the CSV table behind one figure
    PlotData {
        #[arg(long)]
        figure: Figure,
        /// Records to plot; the figure's default sweep runs when absent
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid size for the entropy trace
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Bond cap for the entropy trace
        #[arg(long, default_value_t = DEFAULT_CHI)]
        chi: usize,
    },
    /// Run the oracle-equivalence checks
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn write_table(table: &Table, out: Option<&PathBuf>) -> Result<()> {
    let res = match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|source| BenchError::Io {
                path: path.clone(),
                source,
            })?;
            table.write(file)
        }
        None => table.write(io::stdout().lock()),
    };
    res.map_err(|source| BenchError::Csv {
        path: out.cloned().unwrap_or_else(|| "<stdout>".into()),
        source,
    })
}

fn emit(records: &[BenchmarkRecord], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_records(records, path),
        None => write_csv(records, io::stdout().lock()).map_err(|source| BenchError::Csv {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            method,
            n,
            chi,
            dt,
            nu,
            ic,
            total_time,
            seed,
            repetitions,
            out,
        } => {
            if chi.is_some() && method != Method::Qtn {
                return Err(BenchError::Validation("--chi applies to qtn only".into()));
            }
            let spec = SweepSpec {
                methods: vec![method],
                grid_sizes: vec![n],
                chi_values: chi.map(|c| vec![c]),
                dt_values: Some(vec![dt]),
                nu,
                ic,
                total_time,
                seed,
                repetitions,
                ..SweepSpec::default()
            };
            spec.validate()?;
            let cell = Cell {
                method,
                n,
                chi: (method == Method::Qtn).then_some(chi.unwrap_or(DEFAULT_CHI)),
                dt,
                nu,
            };
            let cache = ReferenceCache::warm(&spec, std::slice::from_ref(&cell));
            let record =
                try_run_cell(&spec, &cell, &cache).map_err(|(e, _)| BenchError::Core(e))?;
            emit(&[record], out.as_ref())
        }
        Command::Sweep { config, out, json } => {
            let spec = load_config(&config)?;
            let records = run_sweep(&spec)?;
            if let Some(path) = &json {
                write_records(&records, path)?;
            }
            emit(&records, out.as_ref())
        }
        Command::Compare { base, other } => {
            let a = read_records(&base)?;
            let b = read_records(&other)?;
            let table = compare_records(&a, &b);
            write_table(&table, None)?;
            let missing = unmatched(&a, &b);
            if missing > 0 {
                eprintln!("{missing} record(s) without a partner");
            }
            Ok(())
        }
        Command::PlotData {
            figure,
            input,
            out,
            n,
            chi,
        } => {
            let table = if figure == Figure::Entropy {
                entropy_trace(n, chi, DEFAULT_NU)?
            } else {
                let records = match &input {
                    Some(path) => read_records(path)?,
                    None => run_sweep(&figure.default_spec().expect("record-based figure"))?,
                };
                figure_table(figure, &records)?
            };
            write_table(&table, out.as_ref())
        }
        Command::Selftest { seed } => {
            let checks = run_selftest(seed)?;
            let mut failed = Vec::new();
            for c in &checks {
                let status = if c.passed() { "ok" } else { "FAIL" };
                println!(
                    "{status:4} {:32} {:.3e} (tol {:.0e})",
                    c.name, c.measured, c.tolerance
                );
                if !c.passed() {
                    failed.push(c.name);
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(BenchError::Selftest(failed.join(", ")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
