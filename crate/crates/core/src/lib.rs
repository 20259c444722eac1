//! Scientometric analysis of journal publication data: growth, authorship,
//! collaboration, productivity, page-length and subject distributions, with
//! a mode that reproduces a published set of tables cell for cell.

pub mod aggregate;
pub mod cli;
pub mod config;
pub mod demo;
pub mod error;
pub mod golden;
pub mod indicators;
pub mod ingest;
pub mod report;
pub mod tables;

pub use config::{AnalysisConfig, ConfigLayer, Mode};
pub use error::{Error, Location, Result};
pub use ingest::{Dataset, Granularity, InputFormat, ValidationReport};
pub use report::{OutputFormat, ReportTable};
