//! Batch front end for `fracspec-core`: JSON run configurations, CSV and
//! JSON-lines output, a thread-pool executor and the pipeline behind the
//! `fracspec` binary.

pub mod config;
pub mod exec;
pub mod format;
pub mod io;
pub mod pipeline;

pub use config::{ConfigError, RunConfig};
pub use exec::RayonExecutor;
pub use pipeline::{run, RunError, RunMode, RunOutcome};
