//! Assembles the eight report tables (plus an indicator summary) from a
//! dataset and an analysis configuration.

use std::fmt;
use std::str::FromStr;

use crate::aggregate::{
    authorship_pattern, page_length_distribution, percent, subject_distribution,
    year_distribution,
};
use crate::config::{AnalysisConfig, CiVariant, EgrMode, RgrMode};
use crate::error::{Error, Result};
use crate::indicators::{
    cagr, cagr_periods, collaboration_table, collaborative_index, exponential_growth,
    productivity_rows, productivity_totals, relative_growth, ProductivityTotals,
    PRINTED_DECIMALS,
};
use crate::ingest::{
    aggregate_records, normalize_subjects, Dataset, Finding, Granularity, AGGREGATE_COLUMNS,
    SUBJECT_PREFIX,
};
use crate::report::{round_half_up, Cell, ColumnKind, ColumnSpec, ReportTable, TotalsSource};

/// One of the eight numbered tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TableId(u8);

impl TableId {
    pub const ALL: [TableId; 8] = [
        TableId(1),
        TableId(2),
        TableId(3),
        TableId(4),
        TableId(5),
        TableId(6),
        TableId(7),
        TableId(8),
    ];

    pub fn new(number: u8) -> Result<Self> {
        if (1..=8).contains(&number) {
            Ok(TableId(number))
        } else {
            Err(Error::Config(format!("no table {number}; tables are numbered 1 to 8")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Table {}", self.0)
    }
}

/// A `--table` argument: one table or all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSelection {
    One(TableId),
    All,
}

impl TableSelection {
    pub fn tables(self) -> Vec<TableId> {
        match self {
            TableSelection::One(id) => vec![id],
            TableSelection::All => TableId::ALL.to_vec(),
        }
    }
}

impl FromStr for TableSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(TableSelection::All);
        }
        let n: u8 = s
            .parse()
            .map_err(|_| Error::Config(format!("table must be 1..8 or `all`, got `{s}`")))?;
        TableId::new(n).map(TableSelection::One)
    }
}

/// Aggregates ready for tabulation, and the warnings raised getting there.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dataset: Dataset,
    pub warnings: Vec<Finding>,
}

/// Brings any dataset to aggregate granularity with subjects keyed by the
/// configured taxonomy. Records are tabulated; aggregate subject columns are
/// normalized.
pub fn prepare(dataset: &Dataset, config: &AnalysisConfig) -> Result<Prepared> {
    let taxonomy = config.taxonomy()?;
    let out = match dataset.granularity {
        Granularity::Records => aggregate_records(dataset, config)?,
        Granularity::Aggregates => {
            let dataset = match config.study_window {
                Some(window) => dataset.clone().with_window(window),
                None => dataset.clone(),
            };
            normalize_subjects(&dataset, &taxonomy)?
        }
    };
    Ok(Prepared {
        dataset: out.dataset,
        warnings: out.warnings,
    })
}

fn count(header: &str) -> ColumnSpec {
    ColumnSpec::new(header, ColumnKind::Count)
}

fn pct(header: &str, decimals: u32) -> ColumnSpec {
    ColumnSpec::new(header, ColumnKind::Percent).decimals(decimals)
}

fn ratio(header: &str) -> ColumnSpec {
    ColumnSpec::new(header, ColumnKind::Ratio).decimals(PRINTED_DECIMALS)
}

fn blank() -> Cell {
    Cell::label("")
}

fn serial(i: usize) -> Cell {
    Cell::Count(i as u64 + 1)
}

/// Builds one numbered table from a prepared (aggregate) dataset.
pub fn build_table(id: TableId, dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let table = match id.0 {
        1 => table_year_distribution(dataset),
        2 => table_authorship(dataset),
        3 => table_productivity(dataset, config),
        4 => table_collaboration(dataset, config),
        5 => table_exponential_growth(dataset, config),
        6 => table_relative_growth(dataset, config),
        7 => table_page_length(dataset, config),
        8 => table_subjects(dataset, config),
        _ => unreachable!("TableId is always 1..=8"),
    }?;
    table.check()?;
    Ok(table)
}

pub fn build_tables(ids: &[TableId], dataset: &Dataset, config: &AnalysisConfig) -> Result<Vec<ReportTable>> {
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    ids.iter().map(|id| build_table(*id, dataset, config)).collect()
}

fn table_year_distribution(dataset: &Dataset) -> Result<ReportTable> {
    let dist = year_distribution(dataset)?;
    let mut table = ReportTable::new(
        "Table 1: Year wise distribution of Number of Articles Published",
        vec![
            count("S.No"),
            ColumnSpec::new("Year", ColumnKind::Year),
            count("No.Of.Papers"),
            pct("%", 1),
            count("Cum.No.Of.Papers"),
            pct("Cum. %", 2),
        ],
    );
    for (i, row) in dist.rows.iter().enumerate() {
        table.rows.push(vec![
            serial(i),
            Cell::Year(row.year),
            Cell::Count(row.papers),
            Cell::Number(row.percent_of_total),
            Cell::maybe_count(row.cumulative_papers),
            Cell::maybe(row.cumulative_percent),
        ]);
    }
    table.footer = Some(vec![
        blank(),
        Cell::label("TOTAL"),
        Cell::Count(dist.total_papers),
        Cell::Number(percent(dist.total_papers, dist.total_papers)),
        blank(),
        blank(),
    ]);
    Ok(table)
}

const AUTHORSHIP_HEADERS: [&str; 5] = [
    "Single Author",
    "Two Author",
    "Three Author",
    "Four Author",
    "Five & Above",
];

fn table_authorship(dataset: &Dataset) -> Result<ReportTable> {
    let pattern = authorship_pattern(dataset)?;
    let mut columns = vec![count("S. No"), ColumnSpec::new("Year", ColumnKind::Year)];
    for header in AUTHORSHIP_HEADERS {
        columns.push(count(header));
        columns.push(pct(&format!("{header} %"), 2));
    }
    columns.push(count("Total"));
    columns.push(pct("%", 1));
    let mut table = ReportTable::new("Table 2: Year wise Authorship Pattern", columns);
    for (i, row) in pattern.rows.iter().enumerate() {
        let mut cells = vec![serial(i), Cell::Year(row.year)];
        for (c, p) in row.bin_counts.iter().zip(row.bin_row_percents) {
            cells.push(Cell::Count(*c));
            cells.push(Cell::Number(p));
        }
        cells.push(Cell::Count(row.papers));
        cells.push(Cell::Number(row.percent_of_total));
        table.rows.push(cells);
    }
    let mut footer = vec![blank(), Cell::label("TOTAL")];
    for (c, p) in pattern.bin_totals.iter().zip(pattern.bin_total_percents) {
        footer.push(Cell::Count(*c));
        footer.push(Cell::Number(p));
    }
    footer.push(Cell::Count(pattern.total_papers));
    footer.push(Cell::Number(percent(pattern.total_papers, pattern.total_papers)));
    table.footer = Some(footer);
    table
        .notes
        .push("Row percentages are shares of the year's papers; TOTAL percentages are shares of all papers".into());
    Ok(table)
}

fn table_productivity(dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let rows = productivity_rows(dataset)?;
    let total_papers: u64 = rows.iter().map(|r| r.papers).sum();
    let total_authors: u64 = rows.iter().map(|r| r.authors).sum();
    let mut table = ReportTable::new(
        "Table 3: Year Wise Author Productivity",
        vec![
            ColumnSpec::new("Year", ColumnKind::Year),
            count("Total No. of Papers"),
            pct("Papers %", 2),
            count("Total No. of Authors"),
            pct("Authors %", 2),
            ratio("AAPP"),
            ratio("Productivity Per Author"),
        ],
    );
    for row in &rows {
        table.rows.push(vec![
            Cell::Year(row.year),
            Cell::Count(row.papers),
            Cell::Number(percent(row.papers, total_papers)),
            Cell::Count(row.authors),
            Cell::Number(percent(row.authors, total_authors)),
            Cell::Number(row.aapp),
            Cell::Number(row.ppa),
        ]);
    }
    let (mode, basis) = match config.totals_source {
        TotalsSource::RoundedCells => (
            ProductivityTotals::Paper,
            "sums of the yearly values as displayed",
        ),
        TotalsSource::FullPrecision => (
            ProductivityTotals::Pooled,
            "total authors / total papers and its reciprocal",
        ),
    };
    let (aapp, ppa) = productivity_totals(&rows, mode)?;
    table.footer = Some(vec![
        Cell::label("TOTAL"),
        Cell::Count(total_papers),
        blank(),
        Cell::Count(total_authors),
        blank(),
        Cell::Number(aapp),
        Cell::Number(ppa),
    ]);
    table.notes.push("AAPP - Average Author Per Paper".into());
    table.notes.push(format!("TOTAL AAPP and Productivity Per Author are {basis}"));
    if mode == ProductivityTotals::Paper {
        let (pooled_aapp, pooled_ppa) = productivity_totals(&rows, ProductivityTotals::Pooled)?;
        table.notes.push(format!(
            "Pooled over all years: AAPP {:.2}, Productivity Per Author {:.2}",
            round_half_up(pooled_aapp, PRINTED_DECIMALS)?,
            round_half_up(pooled_ppa, PRINTED_DECIMALS)?
        ));
    }
    Ok(table)
}

fn table_collaboration(dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let collab = collaboration_table(dataset, config.ci_variant)?;
    let mut table = ReportTable::new(
        "Table 4: Year Wise Degree of Collaboration",
        vec![
            ColumnSpec::new("Year", ColumnKind::Year),
            count("Single Author"),
            count("Multiple Author"),
            count("Total Papers"),
            ratio("CI"),
            ratio("DC"),
        ],
    );
    for row in &collab.rows {
        table.rows.push(vec![
            Cell::Year(row.year.expect("yearly rows carry a year")),
            Cell::Count(row.single),
            Cell::Count(row.multiple),
            Cell::Count(row.papers),
            Cell::maybe(row.ci),
            Cell::maybe(row.dc),
        ]);
    }
    let t = &collab.totals;
    table.footer = Some(vec![
        Cell::label("TOTAL"),
        Cell::Count(t.single),
        Cell::Count(t.multiple),
        Cell::Count(t.papers),
        Cell::maybe(t.ci),
        Cell::maybe(t.dc),
    ]);
    let ci_text = match config.ci_variant {
        CiVariant::Printed => "CI - Collaborative Index, printed variant: multi-authored / single-authored papers (Nm/Ns)",
        CiVariant::Stated => "CI - Collaborative Index, stated variant: authors / papers",
    };
    table.notes.push(ci_text.into());
    table
        .notes
        .push("DC - Degree of Collaboration, C = Nm/(Nm+Ns)".into());
    table
        .notes
        .push("Total Papers counts papers with an authorship class (Ns + Nm)".into());
    if config.ci_variant == CiVariant::Printed {
        if let Some(note) = stated_ci_note(dataset, &collab.rows)? {
            table.notes.push(note);
        }
    }
    table.notes.extend(collab.notes);
    Ok(table)
}

/// Lists the stated-formula CI next to the printed one, since the two diverge.
fn stated_ci_note(dataset: &Dataset, rows: &[crate::indicators::CollaborationRow]) -> Result<Option<String>> {
    let aggregates = dataset.require_aggregates()?;
    let mut parts = Vec::new();
    for (row, agg) in rows.iter().zip(aggregates) {
        let Some(authors) = agg.total_authors else {
            return Ok(None);
        };
        let value = match collaborative_index(row, Some(authors), CiVariant::Stated) {
            Ok(v) => format!("{:.2}", round_half_up(v, PRINTED_DECIMALS)?),
            Err(_) => "-".to_owned(),
        };
        parts.push(format!("{} {value}", agg.year));
    }
    Ok(Some(format!(
        "CI under the stated formula (authors/papers) differs: {}",
        parts.join(", ")
    )))
}

fn table_exponential_growth(dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let series = dataset.papers_by_year()?;
    let egr = exponential_growth(&series, config.egr_mode)?;
    let first = series.first().map_or(0, |s| s.1);
    let last = series.last().map_or(0, |s| s.1);
    let periods = cagr_periods(series.len(), config.cagr_mode);
    let growth = cagr(first, last, periods)?;

    let mut table = ReportTable::new(
        "Table 5: Year Wise Exponential Growth Rate",
        vec![
            count("S.NO"),
            ColumnSpec::new("YEAR", ColumnKind::Year),
            count("PUBLICATION"),
            ratio("EXPONENTIAL GROWTH RATE"),
            pct("CAGR", 1),
        ],
    );
    for (i, row) in egr.rows.iter().enumerate() {
        table.rows.push(vec![
            serial(i),
            Cell::Year(row.year),
            Cell::Count(row.papers),
            Cell::maybe(row.egr),
            Cell::Absent,
        ]);
    }
    let total = match config.totals_source {
        TotalsSource::FullPrecision => egr.total,
        TotalsSource::RoundedCells => egr
            .rows
            .iter()
            .filter_map(|r| r.egr)
            .map(|v| round_half_up(v, PRINTED_DECIMALS))
            .sum::<Result<f64>>()?,
    };
    table.footer = Some(vec![
        blank(),
        Cell::label("TOTAL"),
        Cell::Count(series.iter().map(|s| s.1).sum()),
        Cell::Number(total),
        Cell::Number(growth),
    ]);
    table.notes.push(format!(
        "CAGR - Compound Annual Growth Rate (%), {first} to {last} over {periods} periods ({})",
        config.cagr_mode
    ));
    table.notes.push(match config.egr_mode {
        EgrMode::Paper => "Exponential growth rate is the ratio of a year's output to the previous year's".into(),
        EgrMode::Log => "Exponential growth rate is the natural log of the year-over-year output ratio".into(),
    });
    Ok(table)
}

fn table_relative_growth(dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let series = dataset.papers_by_year()?;
    let growth = relative_growth(&series, config.rgr_mode)?;
    let log = |header: &str| ColumnSpec::new(header, ColumnKind::Log).decimals(PRINTED_DECIMALS);
    let mut table = ReportTable::new(
        "Table 6: Year wise Relative Growth of Rate and Doubling Time",
        vec![
            ColumnSpec::new("Year", ColumnKind::Year),
            count("No. of publication"),
            count("Cum. No. of Publication"),
            log("W1"),
            log("W2"),
            ratio("R (a) (W1-W2)"),
            ratio("Doubling Time"),
        ],
    );
    for (i, row) in growth.rows.iter().enumerate() {
        let cumulative = match (config.rgr_mode, i) {
            (RgrMode::Paper, 0) => Cell::Absent,
            _ => Cell::Count(row.cumulative),
        };
        table.rows.push(vec![
            Cell::Year(row.year),
            Cell::Count(row.papers),
            cumulative,
            Cell::maybe(row.w1),
            Cell::Number(row.w2),
            Cell::maybe(row.r),
            Cell::maybe(row.dt),
        ]);
    }
    table.footer = Some(vec![
        Cell::label("Total / Mean"),
        Cell::Count(series.iter().map(|s| s.1).sum()),
        blank(),
        blank(),
        blank(),
        Cell::maybe(growth.mean_r),
        Cell::maybe(growth.mean_dt),
    ]);
    table.notes.push(match config.rgr_mode {
        RgrMode::Paper => "W1 = ln(papers in year), W2 = ln(papers next year), last row W2 = ln(total); R = |W2 - W1|; Doubling Time = ln 2 / R with R at two decimals".into(),
        RgrMode::Standard => "W = ln(cumulative papers); R = W(t) - W(t-1); Doubling Time = ln 2 / R".into(),
    });
    table
        .notes
        .push("Footer R and Doubling Time are means over the yearly values".into());
    table.notes.extend(growth.warnings);
    Ok(table)
}

fn table_page_length(dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let dist = page_length_distribution(dataset)?;
    let labels = config.page_bin_edges.labels();
    let mut columns = vec![count("S.NO"), ColumnSpec::new("YEAR", ColumnKind::Year)];
    for label in &labels {
        columns.push(count(label));
        columns.push(pct(&format!("{label} %"), 2));
    }
    columns.push(count("TOTAL"));
    columns.push(pct("%", 1));
    let mut table = ReportTable::new("Table 7: Year Wise Output of Number of Pages of Articles", columns);
    for (i, row) in dist.rows.iter().enumerate() {
        let mut cells = vec![serial(i), Cell::Year(row.year)];
        for (c, p) in row.bins.iter().zip(row.column_percents) {
            cells.push(Cell::Count(*c));
            cells.push(Cell::Number(p));
        }
        cells.push(Cell::Count(row.papers));
        cells.push(Cell::Number(row.percent_of_total));
        table.rows.push(cells);
    }
    let mut footer = vec![blank(), Cell::label("TOTAL")];
    for c in dist.column_totals {
        footer.push(Cell::Count(c));
        footer.push(blank());
    }
    footer.push(Cell::Count(dist.total_papers));
    footer.push(Cell::Number(percent(dist.total_papers, dist.total_papers)));
    table.footer = Some(footer);
    table
        .notes
        .push("Page-bin percentages are shares of the column total".into());
    Ok(table)
}

fn table_subjects(dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let matrix = subject_distribution(dataset, &config.taxonomy()?)?;
    let mut columns = vec![count("S.NO"), ColumnSpec::new("MAJOR SUBJECTS", ColumnKind::Label)];
    for year in &matrix.years {
        columns.push(count(&year.to_string()));
    }
    columns.push(count("TOTAL"));
    let mut table = ReportTable::new("Table 8: Subject Distributions of the Articles Published", columns);
    for (i, row) in matrix.rows.iter().enumerate() {
        let mut cells = vec![serial(i), Cell::label(row.label.clone())];
        cells.extend(row.counts.iter().map(|c| Cell::Count(*c)));
        cells.push(Cell::Count(row.total));
        table.rows.push(cells);
    }
    let mut footer = vec![blank(), Cell::label("TOTAL")];
    footer.extend(matrix.column_totals.iter().map(|c| Cell::Count(*c)));
    footer.push(Cell::Count(matrix.grand_total));
    table.footer = Some(footer);
    Ok(table)
}

/// Headline indicators for the whole window in one table.
pub fn indicator_summary(dataset: &Dataset, config: &AnalysisConfig) -> Result<ReportTable> {
    let mut table = ReportTable::new(
        "Indicator summary",
        vec![
            ColumnSpec::new("Indicator", ColumnKind::Label),
            ratio("Value"),
            ColumnSpec::new("Variant", ColumnKind::Label),
        ],
    );
    let mut push = |name: &str, value: Result<f64>, variant: String| {
        let cell = match value {
            Ok(v) => Cell::Number(v),
            Err(e) => {
                table.notes.push(format!("{name}: {e}"));
                Cell::Absent
            }
        };
        table.rows.push(vec![Cell::label(name), cell, Cell::label(variant)]);
    };

    let collab = collaboration_table(dataset, config.ci_variant)?;
    push(
        "Degree of Collaboration",
        collab.totals.dc.ok_or_else(|| Error::analysis("undefined DC for empty dataset")),
        "Nm/(Nm+Ns)".into(),
    );
    let authors: Option<u64> = dataset.require_aggregates()?.iter().map(|a| a.total_authors).sum();
    push(
        "Collaborative Index",
        collaborative_index(&collab.totals, authors, config.ci_variant),
        config.ci_variant.to_string(),
    );
    let pooled = productivity_rows(dataset)
        .and_then(|rows| productivity_totals(&rows, ProductivityTotals::Pooled));
    push(
        "Average Authors Per Paper",
        pooled.as_ref().map(|p| p.0).map_err(|e| Error::analysis(e.to_string())),
        "pooled".into(),
    );
    push(
        "Productivity Per Author",
        pooled.map(|p| p.1),
        "pooled".into(),
    );

    let series = dataset.papers_by_year()?;
    push(
        "Exponential Growth Rate (total)",
        exponential_growth(&series, config.egr_mode).map(|e| e.total),
        config.egr_mode.to_string(),
    );
    let first = series.first().map_or(0, |s| s.1);
    let last = series.last().map_or(0, |s| s.1);
    push(
        "CAGR (%)",
        cagr(first, last, cagr_periods(series.len(), config.cagr_mode)),
        config.cagr_mode.to_string(),
    );
    let growth = relative_growth(&series, config.rgr_mode);
    push(
        "Mean Relative Growth Rate",
        growth
            .as_ref()
            .map_err(|e| Error::analysis(e.to_string()))
            .and_then(|g| g.mean_r.ok_or_else(|| Error::analysis("no defined growth rate"))),
        config.rgr_mode.to_string(),
    );
    push(
        "Mean Doubling Time",
        growth.and_then(|g| g.mean_dt.ok_or_else(|| Error::analysis("no defined doubling time"))),
        config.rgr_mode.to_string(),
    );
    table.check()?;
    Ok(table)
}

/// The dataset in the aggregate input schema, for CSV export and round trips.
pub fn aggregates_table(dataset: &Dataset) -> Result<ReportTable> {
    let aggregates = dataset.require_aggregates()?;
    let mut labels: Vec<&str> = Vec::new();
    for agg in aggregates {
        for label in agg.subject_counts.labels() {
            if !labels.contains(&label) {
                labels.push(label);
            }
        }
    }
    let mut columns: Vec<ColumnSpec> = AGGREGATE_COLUMNS
        .iter()
        .map(|c| match *c {
            "year" => ColumnSpec::new(*c, ColumnKind::Year),
            _ => count(c),
        })
        .collect();
    columns.extend(labels.iter().map(|l| count(&format!("{SUBJECT_PREFIX}{l}"))));
    let mut table = ReportTable::new("aggregates", columns);
    for agg in aggregates {
        let mut cells = vec![Cell::Year(agg.year), Cell::Count(agg.papers)];
        cells.extend(agg.authorship_bins.iter().map(|c| Cell::Count(*c)));
        cells.push(Cell::maybe_count(agg.total_authors));
        match agg.page_bins {
            Some(bins) => cells.extend(bins.iter().map(|c| Cell::Count(*c))),
            None => cells.extend([Cell::Absent, Cell::Absent, Cell::Absent]),
        }
        cells.extend(
            labels
                .iter()
                .map(|l| Cell::maybe_count(agg.subject_counts.get(l))),
        );
        table.rows.push(cells);
    }
    table.check()?;
    Ok(table)
}
