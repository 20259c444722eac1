use std::fmt;

use serde::{Serialize, Serializer};

use crate::ingest::ValidationReport;

/// Where in the input a problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    /// 1-based physical line of a CSV source.
    Line(u64),
    /// 1-based element index of a JSON array.
    Element(usize),
    /// 1-based record position inside a dataset.
    Record(usize),
    Year(i32),
    Dataset,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Element(n) => write!(f, "element {n}"),
            Location::Record(n) => write!(f, "record {n}"),
            Location::Year(y) => write!(f, "year {y}"),
            Location::Dataset => f.write_str("dataset"),
        }
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{location}: {message}")]
    Parse { location: Location, message: String },

    #[error("dataset rejected: {}", summary(.0))]
    Validation(ValidationReport),

    #[error("{0}")]
    Analysis(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn summary(report: &ValidationReport) -> String {
    match report.errors.first() {
        Some(first) if report.errors.len() == 1 => first.to_string(),
        Some(first) => format!("{first} (and {} more)", report.errors.len() - 1),
        None => "no errors".to_owned(),
    }
}

impl Error {
    pub(crate) fn parse(location: Location, message: impl Into<String>) -> Self {
        Error::Parse {
            location,
            message: message.into(),
        }
    }

    pub(crate) fn analysis(message: impl Into<String>) -> Self {
        Error::Analysis(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
