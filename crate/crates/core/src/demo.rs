//! Datasets bundled with the toolkit.

use crate::error::Result;
use crate::ingest::{parse_aggregates, parse_records, Consistency, Dataset, InputFormat};

/// Year aggregates of the reference journal study (227 articles, 2013-2017),
/// including the printed 2017 authorship row whose bins sum to 50.
pub const DEMO_AGGREGATES: &str = include_str!("../data/demo_aggregates.csv");

/// Twelve synthetic records spanning 2013-2017.
pub const DEMO_SMALL_RECORDS: &str = include_str!("../data/demo_small_records.csv");

pub fn demo_aggregates() -> Result<Dataset> {
    parse_aggregates(DEMO_AGGREGATES.as_bytes(), InputFormat::Csv, Consistency::Lenient)
}

pub fn demo_records() -> Result<Dataset> {
    parse_records(DEMO_SMALL_RECORDS.as_bytes(), InputFormat::Csv)
}
