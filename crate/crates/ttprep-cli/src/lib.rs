//! Library half of the `ttprep` binary: config parsing, the benchmark
//! pipeline, report emission, and circuit interchange.

pub mod config;
pub mod error;
pub mod export;
pub mod pipeline;
pub mod report;
