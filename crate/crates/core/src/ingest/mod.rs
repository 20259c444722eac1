//! Input model and ingestion.
//!
//! Two granularities are accepted: individual article records and
//! pre-tabulated per-year aggregates. Records are bridged to aggregates with
//! [`aggregate_records`] before any table is computed.

mod aggregates;
mod bridge;
mod records;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use aggregates::{parse_aggregates, read_aggregates, AGGREGATE_COLUMNS, SUBJECT_PREFIX};
pub use bridge::{aggregate_records, normalize_subjects, Aggregation};
pub use records::{parse_records, read_records, RECORD_COLUMNS, RECORD_OPTIONAL_COLUMNS};
pub use validate::{validate, Finding, Rule, ValidationReport};

/// Number of authorship bins: 1, 2, 3, 4, and 5-or-more authors.
pub const AUTHORSHIP_BINS: usize = 5;
/// Number of page-length bins: short, medium, long.
pub const PAGE_BINS: usize = 3;
/// Author counts at or above this value are pooled into the last bin.
pub const POOL_THRESHOLD: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyWindow {
    pub first: i32,
    pub last: i32,
}

impl StudyWindow {
    pub fn new(first: i32, last: i32) -> Result<Self> {
        if last < first {
            return Err(Error::Config(format!(
                "study window ends ({last}) before it starts ({first})"
            )));
        }
        Ok(StudyWindow { first, last })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.first..=self.last).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.first..=self.last
    }

    /// Number of calendar years covered, inclusive.
    pub fn year_count(&self) -> usize {
        (self.last - self.first) as usize + 1
    }
}

impl fmt::Display for StudyWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.first, self.last)
    }
}

/// One published article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibRecord {
    pub year: i32,
    pub volume: Option<u32>,
    pub issue: Option<u32>,
    pub title: String,
    /// Author names in byline order; may be empty when only `author_count` is known.
    pub authors: Vec<String>,
    /// Explicit author count. Takes precedence over `authors.len()`.
    pub author_count: Option<u32>,
    pub start_page: Option<u32>,
    pub end_page: Option<u32>,
    pub page_count: Option<u32>,
    pub subject: String,
}

impl BibRecord {
    pub fn author_total(&self) -> u32 {
        self.author_count
            .unwrap_or_else(|| u32::try_from(self.authors.len()).unwrap_or(u32::MAX))
    }

    /// Page length from the explicit count, falling back to the page span.
    pub fn pages(&self) -> Option<u32> {
        self.page_count.or_else(|| self.span_pages())
    }

    fn span_pages(&self) -> Option<u32> {
        match (self.start_page, self.end_page) {
            (Some(start), Some(end)) if end >= start => Some(end - start + 1),
            _ => None,
        }
    }
}

/// Subject label to count, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubjectCounts(Vec<(String, u64)>);

impl SubjectCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, label: &str) -> Option<u64> {
        self.0.iter().find(|(l, _)| l == label).map(|(_, c)| *c)
    }

    /// Adds `count` to `label`, appending the label if it is new.
    pub fn add(&mut self, label: &str, count: u64) {
        match self.0.iter_mut().find(|(l, _)| l == label) {
            Some((_, c)) => *c += count,
            None => self.0.push((label.to_owned(), count)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(l, c)| (l.as_str(), *c))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(l, _)| l.as_str())
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, u64)> for SubjectCounts {
    fn from_iter<I: IntoIterator<Item = (String, u64)>>(iter: I) -> Self {
        let mut counts = SubjectCounts::new();
        for (label, count) in iter {
            counts.add(&label, count);
        }
        counts
    }
}

/// Pre-tabulated counts for one year.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearAggregate {
    pub year: i32,
    pub papers: u64,
    /// Papers with 1, 2, 3, 4 and 5-or-more authors.
    pub authorship_bins: [u64; AUTHORSHIP_BINS],
    pub total_authors: Option<u64>,
    pub page_bins: Option<[u64; PAGE_BINS]>,
    pub subject_counts: SubjectCounts,
}

impl YearAggregate {
    /// Single-authored papers (Ns).
    pub fn single(&self) -> u64 {
        self.authorship_bins[0]
    }

    /// Multi-authored papers (Nm).
    pub fn multiple(&self) -> u64 {
        self.authorship_bins[1..].iter().sum()
    }

    /// Smallest author total consistent with the bins, valuing 5+ at exactly 5.
    pub fn min_authors(&self) -> u64 {
        self.authorship_bins
            .iter()
            .zip(1u64..)
            .map(|(count, authors)| count * authors)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Records,
    Aggregates,
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "records" => Ok(Granularity::Records),
            "aggregates" => Ok(Granularity::Aggregates),
            other => Err(Error::Config(format!("unknown granularity `{other}`"))),
        }
    }
}

/// Whether bin-sum mismatches are errors (strict) or warnings (lenient).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Consistency {
    Strict,
    #[default]
    Lenient,
}

impl Consistency {
    pub fn from_strict(strict: bool) -> Self {
        if strict {
            Consistency::Strict
        } else {
            Consistency::Lenient
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub granularity: Granularity,
    pub records: Vec<BibRecord>,
    /// Ascending by year.
    pub aggregates: Vec<YearAggregate>,
    pub study_window: StudyWindow,
    pub consistency: Consistency,
}

impl Dataset {
    pub fn from_records(records: Vec<BibRecord>) -> Result<Self> {
        let window = infer_window(records.iter().map(|r| r.year))?;
        Ok(Dataset {
            granularity: Granularity::Records,
            records,
            aggregates: Vec::new(),
            study_window: window,
            consistency: Consistency::default(),
        })
    }

    /// Builds an aggregate dataset, sorting rows by year.
    pub fn from_aggregates(mut aggregates: Vec<YearAggregate>) -> Result<Self> {
        let window = infer_window(aggregates.iter().map(|a| a.year))?;
        aggregates.sort_by_key(|a| a.year);
        Ok(Dataset {
            granularity: Granularity::Aggregates,
            records: Vec::new(),
            aggregates,
            study_window: window,
            consistency: Consistency::default(),
        })
    }

    pub fn with_window(mut self, window: StudyWindow) -> Self {
        self.study_window = window;
        self
    }

    pub fn with_consistency(mut self, consistency: Consistency) -> Self {
        self.consistency = consistency;
        self
    }

    /// The per-year aggregates, or an error for record-granularity data.
    pub fn require_aggregates(&self) -> Result<&[YearAggregate]> {
        match self.granularity {
            Granularity::Aggregates => Ok(&self.aggregates),
            Granularity::Records => Err(Error::analysis(
                "record-granularity dataset must be aggregated first",
            )),
        }
    }

    /// `(year, papers)` pairs in year order.
    pub fn papers_by_year(&self) -> Result<Vec<(i32, u64)>> {
        Ok(self
            .require_aggregates()?
            .iter()
            .map(|a| (a.year, a.papers))
            .collect())
    }

    pub fn total_papers(&self) -> u64 {
        match self.granularity {
            Granularity::Aggregates => self.aggregates.iter().map(|a| a.papers).sum(),
            Granularity::Records => self.records.len() as u64,
        }
    }
}

fn infer_window(years: impl Iterator<Item = i32>) -> Result<StudyWindow> {
    let (min, max) = years.fold((i32::MAX, i32::MIN), |(lo, hi), y| (lo.min(y), hi.max(y)));
    if min > max {
        return Err(Error::parse(crate::error::Location::Dataset, "empty dataset"));
    }
    StudyWindow::new(min, max)
}

/// Decides the granularity of a source from its header (CSV) or the keys of
/// its first element (JSON).
pub fn sniff_granularity(source: &[u8], format: InputFormat) -> Result<Granularity> {
    use crate::error::Location;

    let text = std::str::from_utf8(source)
        .map_err(|e| Error::parse(Location::Dataset, format!("input is not UTF-8: {e}")))?;
    let has_papers = match format {
        InputFormat::Csv => {
            let header = text.lines().next().unwrap_or_default();
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .from_reader(header.as_bytes());
            let mut record = csv::StringRecord::new();
            reader
                .read_record(&mut record)
                .map_err(|e| Error::parse(Location::Line(1), e.to_string()))?;
            record.iter().any(|h| h.trim() == "papers")
        }
        InputFormat::Json => {
            let value: serde_json::Value = serde_json::from_str(text)
                .map_err(|e| Error::parse(Location::Dataset, format!("invalid JSON: {e}")))?;
            value
                .as_array()
                .and_then(|items| items.first())
                .and_then(|first| first.as_object())
                .is_some_and(|obj| obj.contains_key("papers"))
        }
    };
    Ok(if has_papers {
        Granularity::Aggregates
    } else {
        Granularity::Records
    })
}

pub(crate) fn decode(source: &[u8]) -> Result<&str> {
    std::str::from_utf8(source).map_err(|e| {
        Error::parse(
            crate::error::Location::Dataset,
            format!("input is not UTF-8: {e}"),
        )
    })
}
