//! Experiment orchestration: benchmark cells, sweeps, CSV/JSON artifacts
//! and run manifests.
//!
//! Every CSV starts with `# key=value` lines (config hash, seed, λ,
//! `n_eig`, switch times, ...) followed by a header row.

pub mod acceptance;
mod compare;
mod instance;
mod manifest;
mod runs;
mod table;

pub use compare::{compare_cell, compare_instance, CompareCell, ComparisonRecord};
pub use instance::{BathInstance, BenchmarkInvariants, InvariantSummary};
pub use manifest::{sha256_hex, OutputEntry, RunManifest, TaskFailure, CONFIG_SNAPSHOT, MANIFEST_FILE};
pub use runs::{
    element_columns, resolve_workers, run_compare, run_elements, run_nnsd, run_route, run_spectrum, worker_pool,
    Artifact, Context, Route, SweepPlan, TaskOutput, THREADS_ENV,
};
pub use table::CsvTable;
