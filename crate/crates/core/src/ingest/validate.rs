use std::fmt;

use serde::Serialize;

use super::{BibRecord, Consistency, Dataset, Granularity, YearAggregate};
use crate::error::Location;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    EmptyDataset,
    AuthorCount,
    PageOrder,
    PageCount,
    YearWindow,
    DuplicateYear,
    YearGap,
    AuthorshipSum,
    PageSum,
    SubjectSum,
    AuthorTotal,
    UnknownSubject,
    MissingPages,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Rule::EmptyDataset => "empty-dataset",
            Rule::AuthorCount => "author-count",
            Rule::PageOrder => "page-order",
            Rule::PageCount => "page-count",
            Rule::YearWindow => "year-window",
            Rule::DuplicateYear => "duplicate-year",
            Rule::YearGap => "year-gap",
            Rule::AuthorshipSum => "authorship-sum",
            Rule::PageSum => "page-sum",
            Rule::SubjectSum => "subject-sum",
            Rule::AuthorTotal => "author-total",
            Rule::UnknownSubject => "unknown-subject",
            Rule::MissingPages => "missing-pages",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub location: Location,
    pub rule: Rule,
    pub message: String,
}

impl Finding {
    pub fn new(location: Location, rule: Rule, message: impl Into<String>) -> Self {
        Finding {
            location,
            rule,
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.location, self.rule, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
    pub record_count: usize,
    pub year_count: usize,
}

impl ValidationReport {
    pub fn is_accepted(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, location: Location, rule: Rule, message: impl Into<String>) {
        self.errors.push(Finding::new(location, rule, message));
    }

    /// Records a bin-sum mismatch at the severity the dataset asks for.
    fn mismatch(&mut self, consistency: Consistency, finding: Finding) {
        match consistency {
            Consistency::Strict => self.errors.push(finding),
            Consistency::Lenient => self.warnings.push(finding),
        }
    }
}

/// Checks every dataset invariant and lists each violation. The dataset is
/// never modified.
pub fn validate(dataset: &Dataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    match dataset.granularity {
        Granularity::Records => {
            report.record_count = dataset.records.len();
            let mut years: Vec<i32> = dataset.records.iter().map(|r| r.year).collect();
            years.sort_unstable();
            years.dedup();
            report.year_count = years.len();
            if dataset.records.is_empty() {
                report.error(Location::Dataset, Rule::EmptyDataset, "empty dataset");
            }
            for (i, record) in dataset.records.iter().enumerate() {
                check_record(&mut report, dataset, Location::Record(i + 1), record);
            }
        }
        Granularity::Aggregates => {
            report.year_count = dataset.aggregates.len();
            if dataset.aggregates.is_empty() {
                report.error(Location::Dataset, Rule::EmptyDataset, "empty dataset");
            }
            check_year_sequence(&mut report, dataset);
            for agg in &dataset.aggregates {
                check_aggregate(&mut report, dataset.consistency, agg);
            }
        }
    }
    report
}

fn check_record(report: &mut ValidationReport, dataset: &Dataset, at: Location, r: &BibRecord) {
    if r.author_total() == 0 {
        report.error(at.clone(), Rule::AuthorCount, "author count must be at least 1");
    }
    if let (Some(start), Some(end)) = (r.start_page, r.end_page) {
        if end < start {
            report.error(
                at.clone(),
                Rule::PageOrder,
                format!("end page {end} precedes start page {start}"),
            );
        } else if let Some(count) = r.page_count {
            let span = end - start + 1;
            if count != span {
                report.error(
                    at.clone(),
                    Rule::PageCount,
                    format!("page_count {count} ≠ span {start}-{end} ({span} pages)"),
                );
            }
        }
    }
    if !dataset.study_window.contains(r.year) {
        report.error(
            at,
            Rule::YearWindow,
            format!("year out of window: {} not in {}", r.year, dataset.study_window),
        );
    }
}

fn check_year_sequence(report: &mut ValidationReport, dataset: &Dataset) {
    let window = dataset.study_window;
    for pair in dataset.aggregates.windows(2) {
        let (prev, next) = (pair[0].year, pair[1].year);
        if next == prev {
            report.error(
                Location::Year(next),
                Rule::DuplicateYear,
                format!("duplicate year {next}"),
            );
        } else if next < prev {
            report.error(
                Location::Year(next),
                Rule::DuplicateYear,
                format!("years not ascending: {next} after {prev}"),
            );
        }
    }
    for agg in &dataset.aggregates {
        if !window.contains(agg.year) {
            report.error(
                Location::Year(agg.year),
                Rule::YearWindow,
                format!("year out of window: {} not in {window}", agg.year),
            );
        }
    }
    let present: Vec<i32> = dataset.aggregates.iter().map(|a| a.year).collect();
    let (Some(&lo), Some(&hi)) = (present.first(), present.last()) else {
        return;
    };
    let lo = lo.max(window.first);
    let hi = hi.min(window.last);
    for year in lo..=hi {
        if !present.contains(&year) {
            report.error(Location::Year(year), Rule::YearGap, format!("gap at {year}"));
        }
    }
}

fn check_aggregate(report: &mut ValidationReport, consistency: Consistency, agg: &YearAggregate) {
    let at = Location::Year(agg.year);
    let authorship: u64 = agg.authorship_bins.iter().sum();
    if authorship != agg.papers {
        report.mismatch(
            consistency,
            Finding::new(
                at.clone(),
                Rule::AuthorshipSum,
                format!("authorship bin sum {authorship} ≠ papers {}", agg.papers),
            ),
        );
    }
    if let Some(bins) = agg.page_bins {
        let pages: u64 = bins.iter().sum();
        if pages != agg.papers {
            report.mismatch(
                consistency,
                Finding::new(
                    at.clone(),
                    Rule::PageSum,
                    format!("page bin sum {pages} ≠ papers {}", agg.papers),
                ),
            );
        }
    }
    if !agg.subject_counts.is_empty() {
        let subjects = agg.subject_counts.total();
        if subjects != agg.papers {
            report.mismatch(
                consistency,
                Finding::new(
                    at.clone(),
                    Rule::SubjectSum,
                    format!("subject count sum {subjects} ≠ papers {}", agg.papers),
                ),
            );
        }
    }
    if let Some(total) = agg.total_authors {
        let floor = agg.min_authors();
        if total < floor {
            report.error(
                at,
                Rule::AuthorTotal,
                format!("total_authors {total} is below the {floor} implied by the authorship bins"),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{StudyWindow, SubjectCounts};

    fn agg(year: i32, papers: u64, bins: [u64; 5]) -> YearAggregate {
        YearAggregate {
            year,
            papers,
            authorship_bins: bins,
            total_authors: None,
            page_bins: None,
            subject_counts: SubjectCounts::new(),
        }
    }

    fn record(year: i32) -> BibRecord {
        BibRecord {
            year,
            volume: None,
            issue: None,
            title: "T".into(),
            authors: vec!["A".into()],
            author_count: None,
            start_page: None,
            end_page: None,
            page_count: None,
            subject: "ICT".into(),
        }
    }

    #[test]
    fn record_outside_window_is_an_error() {
        let ds = Dataset::from_records(vec![record(2013), record(2019)])
            .unwrap()
            .with_window(StudyWindow::new(2013, 2017).unwrap());
        let report = validate(&ds);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].rule, Rule::YearWindow);
        assert!(report.errors[0].message.contains("year out of window"));
    }

    #[test]
    fn gap_is_named() {
        let ds = Dataset::from_aggregates(vec![agg(2013, 1, [1, 0, 0, 0, 0]), agg(2015, 1, [1, 0, 0, 0, 0])])
            .unwrap();
        let report = validate(&ds);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].message, "gap at 2014");
        assert_eq!(report.errors[0].location, Location::Year(2014));
    }

    #[test]
    fn page_count_must_match_span() {
        let mut r = record(2013);
        r.start_page = Some(10);
        r.end_page = Some(14);
        r.page_count = Some(4);
        let report = validate(&Dataset::from_records(vec![r]).unwrap());
        assert_eq!(report.errors[0].rule, Rule::PageCount);
    }

    #[test]
    fn zero_authors_rejected() {
        let mut r = record(2013);
        r.authors.clear();
        r.author_count = Some(0);
        let report = validate(&Dataset::from_records(vec![r]).unwrap());
        assert_eq!(report.errors[0].rule, Rule::AuthorCount);
    }

    #[test]
    fn author_total_below_bins_is_an_error() {
        let mut a = agg(2013, 3, [1, 2, 0, 0, 0]);
        a.total_authors = Some(4);
        let report = validate(&Dataset::from_aggregates(vec![a]).unwrap());
        assert_eq!(report.errors[0].rule, Rule::AuthorTotal);
    }

    #[test]
    fn validating_twice_is_stable() {
        let ds = Dataset::from_aggregates(vec![agg(2013, 2, [1, 0, 0, 0, 0])]).unwrap();
        let before = ds.clone();
        assert_eq!(validate(&ds), validate(&ds));
        assert_eq!(ds, before);
    }
}
