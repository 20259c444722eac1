//! Derived indicators: degree of collaboration, collaborative index, author
//! productivity, exponential growth, CAGR, relative growth rate and doubling
//! time.
//!
//! Each indicator with more than one formula in circulation takes a mode.
//! The `paper`/`printed` variants reproduce the reference journal study cell
//! for cell; the others are the textbook definitions.

use std::f64::consts::LN_2;

use crate::config::{CagrMode, CiVariant, EgrMode, RgrMode};
use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::report::round_half_up;

/// Decimal places the reference tables print ratios with.
pub const PRINTED_DECIMALS: u32 = 2;

/// Subramanyam's degree of collaboration, `Nm / (Nm + Ns)`.
pub fn degree_of_collaboration(single: u64, multiple: u64) -> Result<f64> {
    let papers = single + multiple;
    if papers == 0 {
        return Err(Error::analysis("undefined DC for empty year"));
    }
    Ok(multiple as f64 / papers as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollaborationRow {
    /// `None` for the totals row.
    pub year: Option<i32>,
    /// Single-authored papers (Ns).
    pub single: u64,
    /// Multi-authored papers (Nm).
    pub multiple: u64,
    /// `single + multiple`.
    pub papers: u64,
    pub ci: Option<f64>,
    pub dc: Option<f64>,
}

impl CollaborationRow {
    pub fn new(year: Option<i32>, single: u64, multiple: u64) -> Self {
        CollaborationRow {
            year,
            single,
            multiple,
            papers: single + multiple,
            ci: None,
            dc: degree_of_collaboration(single, multiple).ok(),
        }
    }
}

/// Collaborative index of one row.
///
/// `Stated` is authors per paper and needs the author total. `Printed` is
/// the multi-to-single ratio `Nm / Ns`, which is what the reference tables
/// actually show.
pub fn collaborative_index(
    row: &CollaborationRow,
    authors: Option<u64>,
    variant: CiVariant,
) -> Result<f64> {
    match variant {
        CiVariant::Stated => {
            let authors = authors.ok_or_else(|| {
                Error::analysis("CI (stated) needs author totals")
            })?;
            if row.papers == 0 {
                return Err(Error::analysis("CI (stated) undefined: no papers"));
            }
            Ok(authors as f64 / row.papers as f64)
        }
        CiVariant::Printed => {
            if row.single == 0 {
                return Err(Error::analysis(
                    "CI (printed) undefined: no single-authored papers",
                ));
            }
            Ok(row.multiple as f64 / row.single as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollaborationTable {
    pub variant: CiVariant,
    pub rows: Vec<CollaborationRow>,
    pub totals: CollaborationRow,
    /// Cells left blank, with the reason.
    pub notes: Vec<String>,
}

/// Per-year Ns, Nm, CI and DC with a totals row built from the column sums.
/// Undefined cells are left absent and explained in `notes`.
pub fn collaboration_table(dataset: &Dataset, variant: CiVariant) -> Result<CollaborationTable> {
    let aggregates = dataset.require_aggregates()?;
    let mut notes = Vec::new();
    let mut fill = |row: &mut CollaborationRow, authors: Option<u64>, at: &str| {
        match collaborative_index(row, authors, variant) {
            Ok(ci) => row.ci = Some(ci),
            Err(e) => notes.push(format!("{at}: {e}")),
        }
        if row.dc.is_none() {
            notes.push(format!("{at}: undefined DC for empty year"));
        }
    };
    let mut rows = Vec::with_capacity(aggregates.len());
    for agg in aggregates {
        let mut row = CollaborationRow::new(Some(agg.year), agg.single(), agg.multiple());
        fill(&mut row, agg.total_authors, &agg.year.to_string());
        rows.push(row);
    }
    let all_authors: Option<u64> = aggregates.iter().map(|a| a.total_authors).sum();
    let mut totals = CollaborationRow::new(
        None,
        rows.iter().map(|r| r.single).sum(),
        rows.iter().map(|r| r.multiple).sum(),
    );
    fill(&mut totals, all_authors, "TOTAL");
    Ok(CollaborationTable {
        variant,
        rows,
        totals,
        notes,
    })
}

/// Average authors per paper and its reciprocal, papers per author.
pub fn author_productivity(papers: u64, authors: u64) -> Result<(f64, f64)> {
    if papers == 0 || authors == 0 {
        return Err(Error::analysis(format!(
            "author productivity undefined for {papers} papers and {authors} authors"
        )));
    }
    let (p, a) = (papers as f64, authors as f64);
    Ok((a / p, p / a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductivityRow {
    pub year: i32,
    pub papers: u64,
    pub authors: u64,
    /// Average authors per paper.
    pub aapp: f64,
    /// Productivity per author.
    pub ppa: f64,
}

pub fn productivity_rows(dataset: &Dataset) -> Result<Vec<ProductivityRow>> {
    dataset
        .require_aggregates()?
        .iter()
        .map(|agg| {
            let authors = agg
                .total_authors
                .ok_or_else(|| Error::analysis("author totals unavailable"))?;
            let (aapp, ppa) = author_productivity(agg.papers, authors)?;
            Ok(ProductivityRow {
                year: agg.year,
                papers: agg.papers,
                authors,
                aapp,
                ppa,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductivityTotals {
    /// Sum of the per-year values as printed (rounded to two places).
    Paper,
    /// Total authors over total papers, and its reciprocal.
    Pooled,
}

pub fn productivity_totals(rows: &[ProductivityRow], mode: ProductivityTotals) -> Result<(f64, f64)> {
    match mode {
        ProductivityTotals::Paper => {
            let mut aapp = 0.0;
            let mut ppa = 0.0;
            for row in rows {
                aapp += round_half_up(row.aapp, PRINTED_DECIMALS)?;
                ppa += round_half_up(row.ppa, PRINTED_DECIMALS)?;
            }
            Ok((aapp, ppa))
        }
        ProductivityTotals::Pooled => {
            let papers = rows.iter().map(|r| r.papers).sum();
            let authors = rows.iter().map(|r| r.authors).sum();
            author_productivity(papers, authors)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EgrRow {
    pub year: i32,
    pub papers: u64,
    /// Absent for the first year in log mode.
    pub egr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialGrowth {
    pub mode: EgrMode,
    pub rows: Vec<EgrRow>,
    /// Sum of the defined per-year values at full precision.
    pub total: f64,
}

/// Year-over-year growth. Paper mode is the raw ratio `papers(t)/papers(t-1)`
/// with the first year pinned to 0; log mode is the natural log of that ratio.
pub fn exponential_growth(series: &[(i32, u64)], mode: EgrMode) -> Result<ExponentialGrowth> {
    if series.len() < 2 {
        return Err(Error::analysis("exponential growth needs at least two years"));
    }
    let mut rows = Vec::with_capacity(series.len());
    rows.push(EgrRow {
        year: series[0].0,
        papers: series[0].1,
        egr: match mode {
            EgrMode::Paper => Some(0.0),
            EgrMode::Log => None,
        },
    });
    for pair in series.windows(2) {
        let ((prev_year, prev), (year, papers)) = (pair[0], pair[1]);
        if prev == 0 {
            return Err(Error::analysis(format!(
                "exponential growth undefined for {year}: no papers in {prev_year}"
            )));
        }
        let ratio = papers as f64 / prev as f64;
        let egr = match mode {
            EgrMode::Paper => ratio,
            EgrMode::Log => {
                if papers == 0 {
                    return Err(Error::analysis(format!(
                        "log growth undefined for {year}: no papers"
                    )));
                }
                ratio.ln()
            }
        };
        rows.push(EgrRow {
            year,
            papers,
            egr: Some(egr),
        });
    }
    let total = rows.iter().filter_map(|r| r.egr).sum();
    Ok(ExponentialGrowth { mode, rows, total })
}

/// Number of compounding periods for a window of `years` calendar years.
pub fn cagr_periods(years: usize, mode: CagrMode) -> u32 {
    let years = u32::try_from(years).unwrap_or(u32::MAX);
    match mode {
        CagrMode::PaperYears => years,
        CagrMode::Intervals => years.saturating_sub(1),
    }
}

/// Compound annual growth rate in percent: `((last/first)^(1/periods) - 1) * 100`.
pub fn cagr(first: u64, last: u64, periods: u32) -> Result<f64> {
    if periods == 0 {
        return Err(Error::analysis("CAGR needs at least one period"));
    }
    if first == 0 || last == 0 {
        return Err(Error::analysis("CAGR undefined for zero output"));
    }
    let growth = (last as f64 / first as f64).powf(1.0 / f64::from(periods));
    Ok((growth - 1.0) * 100.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub year: i32,
    pub papers: u64,
    pub cumulative: u64,
    pub w1: Option<f64>,
    pub w2: f64,
    pub r: Option<f64>,
    /// The growth rate the doubling time was computed from: `r` itself in
    /// standard mode, `r` rounded to two places in paper mode.
    pub r_for_dt: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeGrowth {
    pub mode: RgrMode,
    pub rows: Vec<GrowthRow>,
    pub mean_r: Option<f64>,
    pub mean_dt: Option<f64>,
    pub warnings: Vec<String>,
}

/// Relative growth rate and doubling time.
///
/// Standard mode: `W(t) = ln cumulative(t)`, `R(t) = W(t) - W(t-1)` from the
/// second year on, `Dt = ln 2 / R`.
///
/// Paper mode: row `t` pairs `ln papers(t)` with `ln papers(t+1)`, and the
/// last row pairs `ln papers(last)` with `ln` of the grand total. `R` is the
/// absolute difference and `Dt = ln 2 / R` with `R` taken at two decimals,
/// as printed. Means are over all rows.
///
/// A zero `R` leaves that row's doubling time absent and out of the mean.
pub fn relative_growth(series: &[(i32, u64)], mode: RgrMode) -> Result<RelativeGrowth> {
    if series.len() < 2 {
        return Err(Error::analysis("relative growth needs at least two years"));
    }
    if let Some((year, _)) = series.iter().find(|(_, papers)| *papers == 0) {
        return Err(Error::analysis(format!(
            "relative growth undefined: no papers in {year}"
        )));
    }
    let mut cumulative = 0;
    let cumulatives: Vec<u64> = series
        .iter()
        .map(|(_, p)| {
            cumulative += p;
            cumulative
        })
        .collect();
    let total = cumulative;
    let ln = |n: u64| (n as f64).ln();

    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(series.len());
    for (i, &(year, papers)) in series.iter().enumerate() {
        let (w1, w2, r, r_for_dt) = match mode {
            RgrMode::Standard => {
                let w2 = ln(cumulatives[i]);
                if i == 0 {
                    (None, w2, None, None)
                } else {
                    let w1 = ln(cumulatives[i - 1]);
                    let r = w2 - w1;
                    (Some(w1), w2, Some(r), Some(r))
                }
            }
            RgrMode::Paper => {
                let next = series.get(i + 1).map_or(total, |(_, p)| *p);
                let (w1, w2) = (ln(papers), ln(next));
                let r = (w2 - w1).abs();
                (Some(w1), w2, Some(r), Some(round_half_up(r, PRINTED_DECIMALS)?))
            }
        };
        let dt = match r_for_dt {
            Some(rate) if rate > 0.0 => Some(LN_2 / rate),
            Some(_) => {
                warnings.push(format!(
                    "{year}: zero growth rate, doubling time undefined and left out of the mean"
                ));
                None
            }
            None => None,
        };
        rows.push(GrowthRow {
            year,
            papers,
            cumulative: cumulatives[i],
            w1,
            w2,
            r,
            r_for_dt,
            dt,
        });
    }
    Ok(RelativeGrowth {
        mode,
        mean_r: mean(rows.iter().filter_map(|r| r.r)),
        mean_dt: mean(rows.iter().filter_map(|r| r.dt)),
        rows,
        warnings,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    const DEMO: [(i32, u64); 5] = [(2013, 33), (2014, 63), (2015, 44), (2016, 36), (2017, 51)];

    #[test]
    fn dc_examples() {
        assert!(close(degree_of_collaboration(14, 19).unwrap(), 0.5757, 1e-4));
        assert!(close(degree_of_collaboration(70, 157).unwrap(), 0.6916, 1e-4));
        assert_eq!(degree_of_collaboration(5, 0).unwrap(), 0.0);
        assert_eq!(degree_of_collaboration(0, 5).unwrap(), 1.0);
        let err = degree_of_collaboration(0, 0).unwrap_err();
        assert_eq!(err.to_string(), "undefined DC for empty year");
    }

    #[test]
    fn ci_variants() {
        let row = CollaborationRow::new(Some(2013), 14, 19);
        let printed = collaborative_index(&row, None, CiVariant::Printed).unwrap();
        assert!(close(printed, 1.357, 1e-3));
        let stated = collaborative_index(&row, Some(57), CiVariant::Stated).unwrap();
        assert!(close(stated, 1.7272, 1e-4));
        let total = CollaborationRow::new(None, 70, 157);
        assert!(close(collaborative_index(&total, None, CiVariant::Printed).unwrap(), 2.2428, 1e-4));
        let none_single = CollaborationRow::new(None, 0, 4);
        let err = collaborative_index(&none_single, None, CiVariant::Printed).unwrap_err();
        assert!(err.to_string().contains("no single-authored papers"));
        assert!(collaborative_index(&row, None, CiVariant::Stated).is_err());
    }

    #[test]
    fn productivity_examples() {
        let (aapp, ppa) = author_productivity(44, 91).unwrap();
        assert!(close(aapp, 2.068, 1e-3) && close(ppa, 0.4835, 1e-4));
        let (aapp, ppa) = author_productivity(63, 124).unwrap();
        assert_eq!(round_half_up(aapp, 2).unwrap(), 1.97);
        assert_eq!(round_half_up(ppa, 2).unwrap(), 0.51);
        assert_eq!(author_productivity(7, 7).unwrap(), (1.0, 1.0));
        assert!(author_productivity(0, 3).is_err());
    }

    #[test]
    fn productivity_totals_single_row_agree() {
        let (aapp, ppa) = author_productivity(36, 70).unwrap();
        let rows = [ProductivityRow { year: 2016, papers: 36, authors: 70, aapp, ppa }];
        let paper = productivity_totals(&rows, ProductivityTotals::Paper).unwrap();
        let pooled = productivity_totals(&rows, ProductivityTotals::Pooled).unwrap();
        assert_eq!(round_half_up(paper.0, 2).unwrap(), round_half_up(pooled.0, 2).unwrap());
        assert_eq!(round_half_up(paper.1, 2).unwrap(), round_half_up(pooled.1, 2).unwrap());
    }

    #[test]
    fn egr_constant_series() {
        let series = [(1, 7), (2, 7), (3, 7)];
        let paper = exponential_growth(&series, EgrMode::Paper).unwrap();
        let values: Vec<Option<f64>> = paper.rows.iter().map(|r| r.egr).collect();
        assert_eq!(values, [Some(0.0), Some(1.0), Some(1.0)]);
        let log = exponential_growth(&series, EgrMode::Log).unwrap();
        let values: Vec<Option<f64>> = log.rows.iter().map(|r| r.egr).collect();
        assert_eq!(values, [None, Some(0.0), Some(0.0)]);
    }

    #[test]
    fn egr_log_mode_first_step() {
        let log = exponential_growth(&DEMO, EgrMode::Log).unwrap();
        assert!(close(log.rows[1].egr.unwrap(), 0.6466, 1e-4));
    }

    #[test]
    fn egr_rejects_zero_denominator_and_short_series() {
        assert!(exponential_growth(&[(1, 0), (2, 3)], EgrMode::Paper).is_err());
        assert!(exponential_growth(&[(1, 3)], EgrMode::Paper).is_err());
    }

    #[test]
    fn cagr_examples() {
        let paper = cagr(33, 51, cagr_periods(5, CagrMode::PaperYears)).unwrap();
        assert!(close(paper, 9.1, 0.05), "{paper}");
        let intervals = cagr(33, 51, cagr_periods(5, CagrMode::Intervals)).unwrap();
        assert!(close(intervals, 11.5, 0.05), "{intervals}");
        assert_eq!(cagr(9, 9, 3).unwrap(), 0.0);
        assert!(cagr(9, 9, 0).is_err());
        assert_eq!(cagr_periods(1, CagrMode::Intervals), 0);
    }

    #[test]
    fn rgr_standard_second_year() {
        let growth = relative_growth(&DEMO, RgrMode::Standard).unwrap();
        let row = &growth.rows[1];
        assert!(close(row.r.unwrap(), (96f64).ln() - (33f64).ln(), 1e-12));
        assert!(close(row.r.unwrap(), 1.0678, 1e-4));
        assert!(close(row.dt.unwrap(), 0.649, 1e-3));
        assert_eq!(growth.rows[0].r, None);
        assert_eq!(growth.rows[0].dt, None);
    }

    #[test]
    fn rgr_paper_two_equal_years() {
        let growth = relative_growth(&[(1, 5), (2, 5)], RgrMode::Paper).unwrap();
        assert_eq!(growth.rows[0].r, Some(0.0));
        assert_eq!(growth.rows[0].dt, None);
        assert_eq!(growth.warnings.len(), 1);
        assert!(close(growth.rows[1].r.unwrap(), LN_2, 1e-12));
        assert_eq!(round_half_up(growth.rows[1].dt.unwrap(), 2).unwrap(), 1.0);
        assert_eq!(growth.mean_dt, growth.rows[1].dt);
    }

    #[test]
    fn rgr_rejects_zero_years() {
        assert!(relative_growth(&[(1, 3), (2, 0)], RgrMode::Standard).is_err());
        assert!(relative_growth(&[(1, 3)], RgrMode::Paper).is_err());
    }
}
