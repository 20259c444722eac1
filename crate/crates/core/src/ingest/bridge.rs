use std::collections::BTreeMap;

use super::{
    Dataset, Finding, Granularity, Rule, SubjectCounts, YearAggregate, AUTHORSHIP_BINS, PAGE_BINS,
    POOL_THRESHOLD,
};
use crate::config::{AnalysisConfig, Taxonomy};
use crate::error::{Error, Location, Result};

/// An aggregate dataset together with the warnings raised while building it.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregation {
    pub dataset: Dataset,
    pub warnings: Vec<Finding>,
}

/// Tabulates records into one [`YearAggregate`] per year of the study window.
///
/// Authors counts of 5 or more are pooled into the last authorship bin.
/// Unknown subjects are counted under the taxonomy's catch-all label, and
/// records without page information are left out of the page bins only.
pub fn aggregate_records(dataset: &Dataset, config: &AnalysisConfig) -> Result<Aggregation> {
    if dataset.granularity != Granularity::Records {
        return Err(Error::analysis("aggregate_records needs a record-granularity dataset"));
    }
    let taxonomy = config.taxonomy()?;
    let window = config.study_window.unwrap_or(dataset.study_window);
    let mut warnings = Vec::new();

    let mut years: BTreeMap<i32, YearAggregate> = window
        .years()
        .map(|year| {
            let subjects = taxonomy.labels().iter().map(|l| (l.clone(), 0)).collect();
            (
                year,
                YearAggregate {
                    year,
                    papers: 0,
                    authorship_bins: [0; AUTHORSHIP_BINS],
                    total_authors: Some(0),
                    page_bins: config.page_analysis.then_some([0; PAGE_BINS]),
                    subject_counts: subjects,
                },
            )
        })
        .collect();

    let mut any_pages = false;
    for (i, record) in dataset.records.iter().enumerate() {
        let at = Location::Record(i + 1);
        let Some(agg) = years.get_mut(&record.year) else {
            return Err(Error::analysis(format!(
                "{at}: year {} outside study window {window}",
                record.year
            )));
        };
        let authors = record.author_total();
        if authors == 0 {
            return Err(Error::analysis(format!("{at}: record has no authors")));
        }
        agg.papers += 1;
        let bin = (authors.min(POOL_THRESHOLD) - 1) as usize;
        agg.authorship_bins[bin] += 1;
        if let Some(total) = agg.total_authors.as_mut() {
            *total += u64::from(authors);
        }

        if let Some(bins) = agg.page_bins.as_mut() {
            match record.pages() {
                Some(pages) => {
                    any_pages = true;
                    bins[config.page_bin_edges.bin(pages)] += 1;
                }
                None => warnings.push(Finding::new(
                    at.clone(),
                    Rule::MissingPages,
                    format!("{:?} has no page information; left out of page bins", record.title),
                )),
            }
        }

        let label = match taxonomy.lookup(&record.subject) {
            Some(known) => known,
            None => {
                warnings.push(Finding::new(
                    at,
                    Rule::UnknownSubject,
                    format!(
                        "unknown subject {:?} counted as {:?}",
                        record.subject,
                        taxonomy.catch_all()
                    ),
                ));
                taxonomy.catch_all()
            }
        };
        agg.subject_counts.add(label, 1);
    }

    let mut aggregates: Vec<YearAggregate> = years.into_values().collect();
    if config.page_analysis && !any_pages {
        for agg in &mut aggregates {
            agg.page_bins = None;
        }
    }
    let dataset = Dataset::from_aggregates(aggregates)?
        .with_window(window)
        .with_consistency(dataset.consistency);
    Ok(Aggregation { dataset, warnings })
}

/// Re-keys every year's subject counts to the taxonomy: labels are put in
/// taxonomy order, missing ones are filled with zero and unknown ones are
/// folded into the catch-all with a warning. Years without subject data are
/// left untouched.
pub fn normalize_subjects(dataset: &Dataset, taxonomy: &Taxonomy) -> Result<Aggregation> {
    let mut warnings = Vec::new();
    let mut out = dataset.clone();
    for agg in &mut out.aggregates {
        if agg.subject_counts.is_empty() {
            continue;
        }
        let mut counts: SubjectCounts =
            taxonomy.labels().iter().map(|l| (l.clone(), 0)).collect();
        for (label, count) in agg.subject_counts.iter() {
            match taxonomy.lookup(label) {
                Some(known) => counts.add(known, count),
                None => {
                    if count > 0 {
                        warnings.push(Finding::new(
                            Location::Year(agg.year),
                            Rule::UnknownSubject,
                            format!(
                                "unknown subject {label:?} ({count}) counted as {:?}",
                                taxonomy.catch_all()
                            ),
                        ));
                    }
                    counts.add(taxonomy.catch_all(), count);
                }
            }
        }
        agg.subject_counts = counts;
    }
    Ok(Aggregation {
        dataset: out,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{validate, BibRecord, StudyWindow};

    fn record(year: i32, authors: u32, pages: Option<(u32, u32)>, subject: &str) -> BibRecord {
        BibRecord {
            year,
            volume: None,
            issue: None,
            title: format!("paper {year}/{authors}"),
            authors: Vec::new(),
            author_count: Some(authors),
            start_page: pages.map(|p| p.0),
            end_page: pages.map(|p| p.1),
            page_count: None,
            subject: subject.to_owned(),
        }
    }

    #[test]
    fn reproduces_first_year_authorship_row() {
        let mut records = Vec::new();
        records.extend((0..14).map(|_| record(2013, 1, Some((1, 5)), "ICT")));
        records.extend((0..14).map(|_| record(2013, 2, Some((1, 8)), "ICT")));
        records.extend((0..5).map(|_| record(2013, 3, Some((1, 12)), "ICT")));
        let ds = Dataset::from_records(records).unwrap();
        let out = aggregate_records(&ds, &AnalysisConfig::default()).unwrap();
        let agg = &out.dataset.aggregates[0];
        assert_eq!(agg.papers, 33);
        assert_eq!(agg.authorship_bins, [14, 14, 5, 0, 0]);
        assert_eq!(agg.total_authors, Some(57));
        assert_eq!(agg.page_bins, Some([14, 14, 5]));
        assert!(out.warnings.is_empty());
        assert!(validate(&out.dataset).warnings.is_empty());
    }

    #[test]
    fn seven_authors_pool_into_last_bin() {
        let ds = Dataset::from_records(vec![record(2013, 7, None, "ICT")]).unwrap();
        let out = aggregate_records(&ds, &AnalysisConfig::default()).unwrap();
        assert_eq!(out.dataset.aggregates[0].authorship_bins, [0, 0, 0, 0, 1]);
        assert_eq!(out.dataset.aggregates[0].total_authors, Some(7));
    }

    #[test]
    fn page_span_412_to_417_lands_in_medium_bin() {
        let ds = Dataset::from_records(vec![
            record(2013, 1, Some((412, 417)), "ICT"),
            record(2013, 1, None, "ICT"),
        ])
        .unwrap();
        let out = aggregate_records(&ds, &AnalysisConfig::default()).unwrap();
        assert_eq!(out.dataset.aggregates[0].page_bins, Some([0, 1, 0]));
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.warnings[0].rule, Rule::MissingPages);
    }

    #[test]
    fn unknown_subject_goes_to_catch_all() {
        let ds = Dataset::from_records(vec![record(2013, 1, None, "Astrology")]).unwrap();
        let out = aggregate_records(&ds, &AnalysisConfig::default()).unwrap();
        assert_eq!(out.dataset.aggregates[0].subject_counts.get("Others"), Some(1));
        assert!(out.warnings.iter().any(|w| w.rule == Rule::UnknownSubject));
    }

    #[test]
    fn empty_years_inside_window_are_kept() {
        let ds = Dataset::from_records(vec![record(2013, 1, None, "ICT"), record(2015, 2, None, "ICT")])
            .unwrap();
        let out = aggregate_records(&ds, &AnalysisConfig::default()).unwrap();
        let years: Vec<(i32, u64)> = out.dataset.aggregates.iter().map(|a| (a.year, a.papers)).collect();
        assert_eq!(years, [(2013, 1), (2014, 0), (2015, 1)]);
        assert_eq!(out.dataset.study_window, StudyWindow::new(2013, 2015).unwrap());
    }

    #[test]
    fn normalize_folds_unknown_labels() {
        let agg = YearAggregate {
            year: 2013,
            papers: 3,
            authorship_bins: [3, 0, 0, 0, 0],
            total_authors: None,
            page_bins: None,
            subject_counts: [("ict".to_owned(), 1), ("Astrology".to_owned(), 2)]
                .into_iter()
                .collect(),
        };
        let ds = Dataset::from_aggregates(vec![agg]).unwrap();
        let out = normalize_subjects(&ds, &Taxonomy::default()).unwrap();
        let counts = &out.dataset.aggregates[0].subject_counts;
        assert_eq!(counts.get("ICT"), Some(1));
        assert_eq!(counts.get("Others"), Some(2));
        assert_eq!(counts.labels().count(), 14);
        assert_eq!(out.warnings.len(), 1);
    }
}
