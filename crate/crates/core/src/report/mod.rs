//! Render-ready tables and their text, CSV, JSON and Markdown encodings.

mod round;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub use round::{round_display, round_half_up, Rounding};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Count,
    Percent,
    Ratio,
    Log,
    Year,
    Label,
}

impl ColumnKind {
    fn is_fractional(self) -> bool {
        matches!(self, ColumnKind::Percent | ColumnKind::Ratio | ColumnKind::Log)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub header: String,
    pub kind: ColumnKind,
    /// Fractional digits; `None` takes the policy default for the kind.
    pub decimals: Option<u32>,
}

impl ColumnSpec {
    pub fn new(header: impl Into<String>, kind: ColumnKind) -> Self {
        ColumnSpec {
            header: header.into(),
            kind,
            decimals: None,
        }
    }

    pub fn decimals(mut self, decimals: u32) -> Self {
        self.decimals = Some(decimals);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Count(u64),
    Number(f64),
    Year(i32),
    Label(String),
    Absent,
}

impl Cell {
    pub fn label(text: impl Into<String>) -> Self {
        Cell::Label(text.into())
    }

    pub fn maybe(value: Option<f64>) -> Self {
        value.map_or(Cell::Absent, Cell::Number)
    }

    pub fn maybe_count(value: Option<u64>) -> Self {
        value.map_or(Cell::Absent, Cell::Count)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Count(c) => Some(*c as f64),
            Cell::Number(v) => Some(*v),
            Cell::Year(y) => Some(f64::from(*y)),
            Cell::Label(_) | Cell::Absent => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalsSource {
    /// Footer totals computed from unrounded row values.
    FullPrecision,
    /// Footer totals computed from the displayed (rounded) row values.
    RoundedCells,
}

impl fmt::Display for TotalsSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TotalsSource::FullPrecision => "full_precision",
            TotalsSource::RoundedCells => "rounded_cells",
        })
    }
}

impl FromStr for TotalsSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full_precision" => Ok(TotalsSource::FullPrecision),
            "rounded_cells" => Ok(TotalsSource::RoundedCells),
            other => Err(Error::Config(format!("unknown totals source `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplayPolicy {
    pub decimals_ratio: u32,
    pub decimals_percent: u32,
    pub rounding: Rounding,
    pub absent_marker: String,
    pub totals_source: TotalsSource,
}

impl Default for DisplayPolicy {
    fn default() -> Self {
        DisplayPolicy {
            decimals_ratio: 2,
            decimals_percent: 2,
            rounding: Rounding::HalfUp,
            absent_marker: "-".to_owned(),
            totals_source: TotalsSource::FullPrecision,
        }
    }
}

impl DisplayPolicy {
    pub fn decimals_for(&self, column: &ColumnSpec) -> u32 {
        column.decimals.unwrap_or(match column.kind {
            ColumnKind::Percent => self.decimals_percent,
            _ => self.decimals_ratio,
        })
    }

    /// Display string of one cell in `column`.
    pub fn display(&self, column: &ColumnSpec, cell: &Cell) -> Result<String> {
        Ok(match cell {
            Cell::Count(c) => c.to_string(),
            Cell::Number(v) => round_display(*v, self.decimals_for(column), self.rounding)?,
            Cell::Year(y) => y.to_string(),
            Cell::Label(s) => s.clone(),
            Cell::Absent => self.absent_marker.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub title: String,
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Option<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl ReportTable {
    pub fn new(title: impl Into<String>, columns: Vec<ColumnSpec>) -> Self {
        ReportTable {
            title: title.into(),
            columns,
            rows: Vec::new(),
            footer: None,
            notes: Vec::new(),
        }
    }

    pub fn column_index(&self, header: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.header == header)
    }

    /// Checks the structural invariants every renderer relies on.
    pub fn check(&self) -> Result<()> {
        for (i, column) in self.columns.iter().enumerate() {
            if self.columns[..i].iter().any(|c| c.header == column.header) {
                return Err(Error::Format(format!(
                    "{}: duplicate column header `{}`",
                    self.title, column.header
                )));
            }
        }
        for (r, row) in self.rows.iter().chain(self.footer.iter()).enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::Format(format!(
                    "{}: row {} has {} cells for {} columns",
                    self.title,
                    r + 1,
                    row.len(),
                    self.columns.len()
                )));
            }
            for (cell, column) in row.iter().zip(&self.columns) {
                if column.kind == ColumnKind::Count && matches!(cell, Cell::Number(_)) {
                    return Err(Error::Format(format!(
                        "{}: non-integer cell in count column `{}`",
                        self.title, column.header
                    )));
                }
            }
        }
        Ok(())
    }

    fn display_rows(&self, policy: &DisplayPolicy) -> Result<Vec<Vec<String>>> {
        self.rows
            .iter()
            .chain(self.footer.iter())
            .map(|row| {
                row.iter()
                    .zip(&self.columns)
                    .map(|(cell, column)| policy.display(column, cell))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::Config(format!(
                "unknown output format `{other}` (expected text, csv, json or markdown)"
            ))),
        }
    }
}

/// Renders one table. Output is a pure function of the arguments.
pub fn render(table: &ReportTable, format: OutputFormat, policy: &DisplayPolicy) -> Result<Vec<u8>> {
    table.check()?;
    match format {
        OutputFormat::Text => render_text(table, policy).map(String::into_bytes),
        OutputFormat::Markdown => render_markdown(table, policy).map(String::into_bytes),
        OutputFormat::Csv => render_csv(table, policy),
        OutputFormat::Json => {
            let value = table_json(table, policy)?;
            let mut out = serde_json::to_vec_pretty(&value).expect("JSON value serializes");
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn render_text(table: &ReportTable, policy: &DisplayPolicy) -> Result<String> {
    let cells = table.display_rows(policy)?;
    let widths: Vec<usize> = table
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            cells
                .iter()
                .map(|row| row[i].chars().count())
                .chain(std::iter::once(c.header.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let line = |values: Vec<&str>| -> String {
        let parts: Vec<String> = values
            .iter()
            .zip(&table.columns)
            .zip(&widths)
            .map(|((v, column), &w)| match column.kind {
                ColumnKind::Label => format!("{v:<w$}"),
                _ => format!("{v:>w$}"),
            })
            .collect();
        parts.join("  ").trim_end().to_owned()
    };
    let rule = widths
        .iter()
        .map(|&w| "-".repeat(w))
        .collect::<Vec<_>>()
        .join("  ");

    let mut out = String::new();
    out.push_str(&table.title);
    out.push('\n');
    out.push_str(&line(table.columns.iter().map(|c| c.header.as_str()).collect()));
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        if i == table.rows.len() {
            out.push_str(&rule);
            out.push('\n');
        }
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    for note in &table.notes {
        out.push_str("* ");
        out.push_str(note);
        out.push('\n');
    }
    Ok(out)
}

fn escape_markdown(text: &str) -> String {
    text.replace('|', "\\|")
}

fn render_markdown(table: &ReportTable, policy: &DisplayPolicy) -> Result<String> {
    let cells = table.display_rows(policy)?;
    let mut out = format!("### {}\n\n", escape_markdown(&table.title));
    let headers: Vec<String> = table.columns.iter().map(|c| escape_markdown(&c.header)).collect();
    out.push_str(&format!("| {} |\n", headers.join(" | ")));
    let aligns: Vec<&str> = table
        .columns
        .iter()
        .map(|c| match c.kind {
            ColumnKind::Label => "---",
            _ => "---:",
        })
        .collect();
    out.push_str(&format!("| {} |\n", aligns.join(" | ")));
    for row in &cells {
        let row: Vec<String> = row.iter().map(|c| escape_markdown(c)).collect();
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    if !table.notes.is_empty() {
        out.push('\n');
        for note in &table.notes {
            out.push_str(&format!("*{}*\n", note.trim()));
        }
    }
    Ok(out)
}

/// Full-precision text of a cell, for machine-readable channels.
fn raw_value(cell: &Cell) -> String {
    match cell {
        Cell::Count(c) => c.to_string(),
        // `Display` for f64 is shortest round-trip and never uses an exponent.
        Cell::Number(v) => v.to_string(),
        Cell::Year(y) => y.to_string(),
        Cell::Label(s) => s.clone(),
        Cell::Absent => String::new(),
    }
}

fn render_csv(table: &ReportTable, policy: &DisplayPolicy) -> Result<Vec<u8>> {
    let with_display = policy.totals_source == TotalsSource::RoundedCells;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let mut header = Vec::new();
    for column in &table.columns {
        header.push(column.header.clone());
        if with_display && column.kind.is_fractional() {
            header.push(format!("{} (display)", column.header));
        }
    }
    let csv_err = |e: csv::Error| Error::Format(format!("CSV output failed: {e}"));
    writer.write_record(&header).map_err(csv_err)?;
    for row in table.rows.iter().chain(table.footer.iter()) {
        let mut fields = Vec::with_capacity(header.len());
        for (cell, column) in row.iter().zip(&table.columns) {
            fields.push(raw_value(cell));
            if with_display && column.kind.is_fractional() {
                fields.push(match cell {
                    Cell::Absent => String::new(),
                    other => policy.display(column, other)?,
                });
            }
        }
        writer.write_record(&fields).map_err(csv_err)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Format(format!("CSV output failed: {e}")))
}

fn cell_json(column: &ColumnSpec, cell: &Cell, policy: &DisplayPolicy) -> Result<Value> {
    Ok(match cell {
        Cell::Absent => Value::Null,
        Cell::Label(s) => Value::String(s.clone()),
        Cell::Year(y) => json!(y),
        Cell::Count(c) => json!({ "value": c, "display": c.to_string() }),
        Cell::Number(v) => json!({ "value": v, "display": policy.display(column, cell)? }),
    })
}

fn row_json(table: &ReportTable, row: &[Cell], policy: &DisplayPolicy) -> Result<Value> {
    let mut obj = Map::new();
    for (cell, column) in row.iter().zip(&table.columns) {
        obj.insert(column.header.clone(), cell_json(column, cell, policy)?);
    }
    Ok(Value::Object(obj))
}

/// JSON object for one table; keys follow column declaration order.
pub fn table_json(table: &ReportTable, policy: &DisplayPolicy) -> Result<Value> {
    table.check()?;
    let columns: Vec<Value> = table
        .columns
        .iter()
        .map(|c| {
            json!({
                "header": c.header,
                "kind": c.kind,
                "decimals": c.kind.is_fractional().then(|| policy.decimals_for(c)),
            })
        })
        .collect();
    let rows = table
        .rows
        .iter()
        .map(|row| row_json(table, row, policy))
        .collect::<Result<Vec<_>>>()?;
    let footer = table
        .footer
        .as_ref()
        .map(|row| row_json(table, row, policy))
        .transpose()?;
    Ok(json!({
        "title": table.title,
        "columns": columns,
        "rows": rows,
        "footer": footer,
        "notes": table.notes,
    }))
}

/// Reproducibility header printed ahead of rendered tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub toolkit: String,
    pub version: String,
    pub mode: String,
    pub config_hash: String,
    pub overrides: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Metadata {
    pub fn line(&self) -> String {
        let overrides = if self.overrides.is_empty() {
            "none".to_owned()
        } else {
            self.overrides.join(",")
        };
        let mut line = format!(
            "# {} {} mode={} config={} overrides={}",
            self.toolkit, self.version, self.mode, self.config_hash, overrides
        );
        if let Some(ts) = &self.timestamp {
            line.push_str(&format!(" timestamp={ts}"));
        }
        line
    }
}

/// Renders several tables as one document behind a metadata header.
pub fn render_document(
    tables: &[ReportTable],
    format: OutputFormat,
    policy: &DisplayPolicy,
    metadata: &Metadata,
) -> Result<Vec<u8>> {
    if format == OutputFormat::Json {
        let tables = tables
            .iter()
            .map(|t| table_json(t, policy))
            .collect::<Result<Vec<_>>>()?;
        let doc = json!({ "metadata": metadata, "tables": tables });
        let mut out = serde_json::to_vec_pretty(&doc).expect("JSON value serializes");
        out.push(b'\n');
        return Ok(out);
    }
    let mut out = metadata.line().into_bytes();
    out.push(b'\n');
    for table in tables {
        out.push(b'\n');
        if format == OutputFormat::Csv {
            out.extend_from_slice(format!("# {}\n", table.title).as_bytes());
        }
        out.extend(render(table, format, policy)?);
    }
    Ok(out)
}
