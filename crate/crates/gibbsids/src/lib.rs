//! Configuration, experiment catalog, and output files of the `gibbsids` runner.

pub mod config;
pub mod experiments;
pub mod output;
