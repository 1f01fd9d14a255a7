//! Configuration files, snapshot CSVs, error norms and batch runs.

pub mod config;
pub mod experiments;
pub mod norms;
pub mod snapshot_io;

pub use config::{load_config, parse_config, ReferenceSpec, RunConfig};
pub use experiments::{convergence_sweep, reproduce_paper, sweep_csv, SweepRow};
pub use norms::{error_norms, restrict, AnalyticReference, ErrorReport, Reference};
pub use snapshot_io::{read_snapshot_csv, write_snapshot_csv};
