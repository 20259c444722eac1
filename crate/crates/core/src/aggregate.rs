//! Descriptive per-year distributions: papers by year, authorship pattern,
//! page length and subject coverage.
//!
//! Percent denominators differ by table and are fixed here rather than
//! guessed: the year distribution uses the grand total, authorship rows use
//! the row's own paper count, and page-length cells use their column total.

use crate::config::Taxonomy;
use crate::error::{Error, Result};
use crate::ingest::{Dataset, AUTHORSHIP_BINS, PAGE_BINS};

/// `part / whole * 100`, or 0 for an empty whole.
pub fn percent(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64 * 100.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearDistributionRow {
    pub year: i32,
    pub papers: u64,
    pub percent_of_total: f64,
    /// Absent for the first year.
    pub cumulative_papers: Option<u64>,
    pub cumulative_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearDistribution {
    pub rows: Vec<YearDistributionRow>,
    pub total_papers: u64,
}

pub fn year_distribution(dataset: &Dataset) -> Result<YearDistribution> {
    let aggregates = dataset.require_aggregates()?;
    let total: u64 = aggregates.iter().map(|a| a.papers).sum();
    let mut running = 0;
    let rows = aggregates
        .iter()
        .enumerate()
        .map(|(i, agg)| {
            running += agg.papers;
            let first = i == 0;
            YearDistributionRow {
                year: agg.year,
                papers: agg.papers,
                percent_of_total: percent(agg.papers, total),
                cumulative_papers: (!first).then_some(running),
                cumulative_percent: (!first).then(|| percent(running, total)),
            }
        })
        .collect();
    Ok(YearDistribution {
        rows,
        total_papers: total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorshipRow {
    pub year: i32,
    pub bin_counts: [u64; AUTHORSHIP_BINS],
    /// Share of the row's papers in each bin.
    pub bin_row_percents: [f64; AUTHORSHIP_BINS],
    pub papers: u64,
    pub percent_of_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorshipPattern {
    pub rows: Vec<AuthorshipRow>,
    pub bin_totals: [u64; AUTHORSHIP_BINS],
    /// Each bin total as a share of all papers.
    pub bin_total_percents: [f64; AUTHORSHIP_BINS],
    pub total_papers: u64,
}

pub fn authorship_pattern(dataset: &Dataset) -> Result<AuthorshipPattern> {
    let aggregates = dataset.require_aggregates()?;
    let total: u64 = aggregates.iter().map(|a| a.papers).sum();
    let mut bin_totals = [0u64; AUTHORSHIP_BINS];
    let rows = aggregates
        .iter()
        .map(|agg| {
            for (t, c) in bin_totals.iter_mut().zip(agg.authorship_bins) {
                *t += c;
            }
            AuthorshipRow {
                year: agg.year,
                bin_counts: agg.authorship_bins,
                bin_row_percents: agg.authorship_bins.map(|c| percent(c, agg.papers)),
                papers: agg.papers,
                percent_of_total: percent(agg.papers, total),
            }
        })
        .collect();
    Ok(AuthorshipPattern {
        rows,
        bin_totals,
        bin_total_percents: bin_totals.map(|c| percent(c, total)),
        total_papers: total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageLengthRow {
    pub year: i32,
    pub bins: [u64; PAGE_BINS],
    /// Each cell as a share of its column total.
    pub column_percents: [f64; PAGE_BINS],
    pub papers: u64,
    pub percent_of_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageLengthDistribution {
    pub rows: Vec<PageLengthRow>,
    pub column_totals: [u64; PAGE_BINS],
    pub total_papers: u64,
}

pub fn page_length_distribution(dataset: &Dataset) -> Result<PageLengthDistribution> {
    let aggregates = dataset.require_aggregates()?;
    let mut column_totals = [0u64; PAGE_BINS];
    for agg in aggregates {
        let bins = agg.page_bins.ok_or_else(|| {
            Error::analysis(format!("page bins unavailable for {}", agg.year))
        })?;
        for (t, c) in column_totals.iter_mut().zip(bins) {
            *t += c;
        }
    }
    let total: u64 = aggregates.iter().map(|a| a.papers).sum();
    let rows = aggregates
        .iter()
        .map(|agg| {
            let bins = agg.page_bins.expect("checked above");
            let mut column_percents = [0.0; PAGE_BINS];
            for (i, p) in column_percents.iter_mut().enumerate() {
                *p = percent(bins[i], column_totals[i]);
            }
            PageLengthRow {
                year: agg.year,
                bins,
                column_percents,
                papers: agg.papers,
                percent_of_total: percent(agg.papers, total),
            }
        })
        .collect();
    Ok(PageLengthDistribution {
        rows,
        column_totals,
        total_papers: total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRow {
    pub label: String,
    /// One count per year, aligned with [`SubjectMatrix::years`].
    pub counts: Vec<u64>,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectMatrix {
    pub years: Vec<i32>,
    pub rows: Vec<SubjectRow>,
    pub column_totals: Vec<u64>,
    pub grand_total: u64,
}

/// Subject × year counts in taxonomy order. Labels must already be mapped
/// onto the taxonomy (see [`crate::ingest::normalize_subjects`]).
pub fn subject_distribution(dataset: &Dataset, taxonomy: &Taxonomy) -> Result<SubjectMatrix> {
    let aggregates = dataset.require_aggregates()?;
    for agg in aggregates {
        if agg.subject_counts.is_empty() {
            return Err(Error::analysis(format!(
                "subject counts unavailable for {}",
                agg.year
            )));
        }
        if let Some(unknown) = agg.subject_counts.labels().find(|l| !taxonomy.contains(l)) {
            return Err(Error::Internal(format!(
                "subject {unknown:?} in {} is not in the taxonomy",
                agg.year
            )));
        }
    }
    let years: Vec<i32> = aggregates.iter().map(|a| a.year).collect();
    let rows: Vec<SubjectRow> = taxonomy
        .labels()
        .iter()
        .map(|label| {
            let counts: Vec<u64> = aggregates
                .iter()
                .map(|a| a.subject_counts.get(label).unwrap_or(0))
                .collect();
            SubjectRow {
                label: label.clone(),
                total: counts.iter().sum(),
                counts,
            }
        })
        .collect();
    let column_totals: Vec<u64> = (0..years.len())
        .map(|i| rows.iter().map(|r| r.counts[i]).sum())
        .collect();
    Ok(SubjectMatrix {
        grand_total: column_totals.iter().sum(),
        years,
        rows,
        column_totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{SubjectCounts, YearAggregate};

    fn agg(year: i32, papers: u64, bins: [u64; 5], pages: Option<[u64; 3]>) -> YearAggregate {
        YearAggregate {
            year,
            papers,
            authorship_bins: bins,
            total_authors: None,
            page_bins: pages,
            subject_counts: SubjectCounts::new(),
        }
    }

    #[test]
    fn single_year_has_no_cumulative() {
        let ds = Dataset::from_aggregates(vec![agg(2013, 33, [33, 0, 0, 0, 0], None)]).unwrap();
        let dist = year_distribution(&ds).unwrap();
        assert_eq!(dist.rows[0].percent_of_total, 100.0);
        assert_eq!(dist.rows[0].cumulative_papers, None);
        assert_eq!(dist.rows[0].cumulative_percent, None);
    }

    #[test]
    fn zero_paper_year_has_zero_percents() {
        let ds = Dataset::from_aggregates(vec![
            agg(2013, 0, [0; 5], None),
            agg(2014, 2, [1, 1, 0, 0, 0], None),
        ])
        .unwrap();
        let pattern = authorship_pattern(&ds).unwrap();
        assert_eq!(pattern.rows[0].bin_row_percents, [0.0; 5]);
        assert!(pattern.rows.iter().flat_map(|r| r.bin_row_percents).all(f64::is_finite));
    }

    #[test]
    fn all_papers_in_one_page_bin() {
        let ds = Dataset::from_aggregates(vec![
            agg(2013, 3, [3, 0, 0, 0, 0], Some([0, 3, 0])),
            agg(2014, 1, [1, 0, 0, 0, 0], Some([0, 1, 0])),
        ])
        .unwrap();
        let pages = page_length_distribution(&ds).unwrap();
        assert_eq!(pages.column_totals, [0, 4, 0]);
        assert_eq!(pages.rows[0].column_percents, [0.0, 75.0, 0.0]);
    }

    #[test]
    fn missing_page_bins_are_reported() {
        let ds = Dataset::from_aggregates(vec![agg(2013, 1, [1, 0, 0, 0, 0], None)]).unwrap();
        let err = page_length_distribution(&ds).unwrap_err();
        assert!(err.to_string().contains("page bins unavailable"));
    }

    #[test]
    fn unknown_subject_is_an_internal_error() {
        let mut a = agg(2013, 1, [1, 0, 0, 0, 0], None);
        a.subject_counts.add("Astrology", 1);
        let ds = Dataset::from_aggregates(vec![a]).unwrap();
        assert!(matches!(
            subject_distribution(&ds, &Taxonomy::default()),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn record_datasets_must_be_aggregated_first() {
        let ds = Dataset {
            granularity: crate::ingest::Granularity::Records,
            ..Dataset::from_aggregates(vec![agg(2013, 1, [1, 0, 0, 0, 0], None)]).unwrap()
        };
        assert!(year_distribution(&ds).is_err());
    }
}
