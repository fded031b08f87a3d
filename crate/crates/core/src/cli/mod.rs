//! Configuration, JSON reports, the Hecke-matrix cache and the commands
//! behind the `padic-lab` binary.

pub mod cache;
pub mod commands;
pub mod config;
pub mod report;
pub mod selftest;

pub use cache::{CacheKey, HeckeCache};
pub use commands::{run, Command};
pub use config::{Overrides, RunConfig};
pub use report::{CheckLine, Report, Status, SCHEMA_VERSION};
