//! Benchmark harness: sweeps over the five Burgers solvers, record I/O,
//! figure tables and a quick oracle self-test.

pub mod compare;
pub mod config;
pub mod error;
pub mod figures;
pub mod record;
pub mod selftest;
pub mod sweep;

pub use error::{BenchError, Result};
pub use record::{BenchmarkRecord, Method};
pub use sweep::{run_sweep, SweepSpec};
