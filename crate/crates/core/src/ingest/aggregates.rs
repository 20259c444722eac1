use serde_json::Value;

use super::{
    decode, validate, Consistency, Dataset, InputFormat, SubjectCounts, YearAggregate,
    AUTHORSHIP_BINS, PAGE_BINS,
};
use crate::error::{Error, Location, Result};

/// Fixed aggregate columns, in header order. Subject columns follow as
/// `subj:<label>`.
pub const AGGREGATE_COLUMNS: [&str; 11] = [
    "year",
    "papers",
    "a1",
    "a2",
    "a3",
    "a4",
    "a5plus",
    "total_authors",
    "p1to5",
    "p6to10",
    "pabove10",
];

pub const SUBJECT_PREFIX: &str = "subj:";

const AUTHORSHIP_COLUMNS: [&str; AUTHORSHIP_BINS] = ["a1", "a2", "a3", "a4", "a5plus"];
const PAGE_COLUMNS: [&str; PAGE_BINS] = ["p1to5", "p6to10", "pabove10"];

/// Parses and validates aggregate input.
///
/// Under [`Consistency::Strict`] a bin sum that disagrees with `papers` is an
/// error; under [`Consistency::Lenient`] it is left for [`validate`] to report
/// as a warning.
pub fn parse_aggregates(
    source: &[u8],
    format: InputFormat,
    consistency: Consistency,
) -> Result<Dataset> {
    let dataset = read_aggregates(source, format)?.with_consistency(consistency);
    let report = validate(&dataset);
    if report.is_accepted() {
        Ok(dataset)
    } else {
        Err(Error::Validation(report))
    }
}

/// Parses aggregate input without checking dataset invariants. Rows are
/// sorted by year.
pub fn read_aggregates(source: &[u8], format: InputFormat) -> Result<Dataset> {
    let text = decode(source)?;
    let rows = match format {
        InputFormat::Csv => read_csv(text)?,
        InputFormat::Json => read_json(text)?,
    };
    Dataset::from_aggregates(rows)
}

struct RawRow<'a> {
    location: Location,
    fields: Vec<(&'a str, Option<String>)>,
}

impl RawRow<'_> {
    fn text(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, v)| v.as_deref())
            .map(str::trim)
            .filter(|v| !v.is_empty())
    }

    fn count(&self, name: &str) -> Result<Option<u64>> {
        self.text(name)
            .map(|v| {
                v.parse::<u64>().map_err(|_| {
                    Error::parse(
                        self.location.clone(),
                        format!("`{name}` must be a non-negative integer, got {v:?}"),
                    )
                })
            })
            .transpose()
    }

    fn required_count(&self, name: &str) -> Result<u64> {
        self.count(name)?.ok_or_else(|| {
            Error::parse(
                self.location.clone(),
                format!("missing mandatory field `{name}`"),
            )
        })
    }

    fn into_aggregate(self) -> Result<YearAggregate> {
        let year_text = self.text("year").ok_or_else(|| {
            Error::parse(self.location.clone(), "missing mandatory field `year`")
        })?;
        let year = year_text.parse::<i32>().map_err(|_| {
            Error::parse(
                self.location.clone(),
                format!("non-numeric `year`: {year_text:?}"),
            )
        })?;

        let mut authorship_bins = [0; AUTHORSHIP_BINS];
        for (slot, name) in authorship_bins.iter_mut().zip(AUTHORSHIP_COLUMNS) {
            *slot = self.required_count(name)?;
        }

        let pages = PAGE_COLUMNS
            .iter()
            .map(|name| self.count(name))
            .collect::<Result<Vec<_>>>()?;
        let page_bins = match pages.as_slice() {
            [Some(a), Some(b), Some(c)] => Some([*a, *b, *c]),
            [None, None, None] => None,
            _ => {
                return Err(Error::parse(
                    self.location.clone(),
                    "page bins must be given all together or not at all",
                ))
            }
        };

        let mut subject_counts = SubjectCounts::new();
        for (name, _) in &self.fields {
            if let Some(label) = name.strip_prefix(SUBJECT_PREFIX) {
                subject_counts.add(label, self.count(name)?.unwrap_or(0));
            }
        }

        Ok(YearAggregate {
            year,
            papers: self.required_count("papers")?,
            authorship_bins,
            total_authors: self.count("total_authors")?,
            page_bins,
            subject_counts,
        })
    }
}

fn read_csv(text: &str) -> Result<Vec<YearAggregate>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse(Location::Line(1), e.to_string()))?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();
    check_header(&header)?;

    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(Location::Line(line), format!("malformed row: {e}"))
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let raw = RawRow {
            location: Location::Line(line),
            fields: header
                .iter()
                .map(String::as_str)
                .zip(row.iter())
                .map(|(name, value)| (name, Some(value.to_owned())))
                .collect(),
        };
        rows.push(raw.into_aggregate()?);
    }
    Ok(rows)
}

fn check_header(header: &[String]) -> Result<()> {
    let fixed_ok = header.len() >= AGGREGATE_COLUMNS.len()
        && header.iter().zip(AGGREGATE_COLUMNS).all(|(h, c)| h == c);
    if !fixed_ok {
        return Err(Error::parse(
            Location::Line(1),
            format!(
                "header must start with `{}`; got `{}`",
                AGGREGATE_COLUMNS.join(","),
                header.join(",")
            ),
        ));
    }
    let mut seen = Vec::new();
    for column in &header[AGGREGATE_COLUMNS.len()..] {
        match column.strip_prefix(SUBJECT_PREFIX) {
            Some(label) if !label.trim().is_empty() && !seen.contains(&label) => seen.push(label),
            Some(label) if seen.contains(&label) => {
                return Err(Error::parse(
                    Location::Line(1),
                    format!("duplicate subject column `{column}`"),
                ))
            }
            _ => {
                return Err(Error::parse(
                    Location::Line(1),
                    format!("unexpected column `{column}`; subject columns are `{SUBJECT_PREFIX}<label>`"),
                ))
            }
        }
    }
    Ok(())
}

fn read_json(text: &str) -> Result<Vec<YearAggregate>> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(Location::Dataset, format!("invalid JSON: {e}")))?;
    let Value::Array(items) = value else {
        return Err(Error::parse(
            Location::Dataset,
            "top-level JSON value must be a list of year aggregates",
        ));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let location = Location::Element(i + 1);
            let obj = item
                .as_object()
                .ok_or_else(|| Error::parse(location.clone(), "aggregate must be an object"))?;
            let mut fields = Vec::with_capacity(obj.len());
            for (name, value) in obj {
                let known = AGGREGATE_COLUMNS.contains(&name.as_str())
                    || name.starts_with(SUBJECT_PREFIX);
                if !known {
                    return Err(Error::parse(location, format!("unexpected field `{name}`")));
                }
                let text = match value {
                    Value::Null => None,
                    Value::Number(n) => Some(n.to_string()),
                    Value::String(s) => Some(s.clone()),
                    other => {
                        return Err(Error::parse(
                            location,
                            format!("unexpected value for `{name}`: {other}"),
                        ))
                    }
                };
                fields.push((name.as_str(), text));
            }
            RawRow { location, fields }.into_aggregate()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Rule;

    const HEADER: &str = "year,papers,a1,a2,a3,a4,a5plus,total_authors,p1to5,p6to10,pabove10";

    #[test]
    fn accepts_consistent_row() {
        let src = format!("{HEADER},subj:ICT\n2013,33,14,14,5,0,0,57,4,26,3,33\n");
        let ds = parse_aggregates(src.as_bytes(), InputFormat::Csv, Consistency::Strict).unwrap();
        let row = &ds.aggregates[0];
        assert_eq!(row.authorship_bins, [14, 14, 5, 0, 0]);
        assert_eq!(row.total_authors, Some(57));
        assert_eq!(row.page_bins, Some([4, 26, 3]));
        assert_eq!(row.subject_counts.get("ICT"), Some(33));
    }

    #[test]
    fn bin_sum_mismatch_depends_on_strictness() {
        let src = format!("{HEADER}\n2017,51,12,30,6,1,1,99,7,43,1\n");
        let ds =
            parse_aggregates(src.as_bytes(), InputFormat::Csv, Consistency::Lenient).unwrap();
        let report = validate(&ds);
        assert!(report.errors.is_empty());
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].rule, Rule::AuthorshipSum);
        assert!(report.warnings[0].message.contains("bin sum 50 ≠ papers 51"));

        let err = parse_aggregates(src.as_bytes(), InputFormat::Csv, Consistency::Strict)
            .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn empty_list_is_rejected() {
        let err = parse_aggregates(format!("{HEADER}\n").as_bytes(), InputFormat::Csv, Consistency::Lenient)
            .unwrap_err();
        assert!(err.to_string().contains("empty dataset"), "{err}");
        let err = parse_aggregates(b"[]", InputFormat::Json, Consistency::Lenient).unwrap_err();
        assert!(err.to_string().contains("empty dataset"), "{err}");
    }

    #[test]
    fn duplicate_and_gap_years_are_errors() {
        let dup = format!("{HEADER}\n2013,1,1,0,0,0,0,,,,\n2013,1,1,0,0,0,0,,,,\n");
        let err = parse_aggregates(dup.as_bytes(), InputFormat::Csv, Consistency::Lenient)
            .unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");

        let gap = format!("{HEADER}\n2015,1,1,0,0,0,0,,,,\n2013,1,1,0,0,0,0,,,,\n");
        let err = parse_aggregates(gap.as_bytes(), InputFormat::Csv, Consistency::Lenient)
            .unwrap_err();
        assert!(err.to_string().contains("gap at 2014"), "{err}");
    }

    #[test]
    fn rows_are_sorted_by_year() {
        let src = format!("{HEADER}\n2014,1,1,0,0,0,0,,,,\n2013,2,2,0,0,0,0,,,,\n");
        let ds = parse_aggregates(src.as_bytes(), InputFormat::Csv, Consistency::Strict).unwrap();
        let years: Vec<i32> = ds.aggregates.iter().map(|a| a.year).collect();
        assert_eq!(years, [2013, 2014]);
        assert_eq!(ds.aggregates[0].page_bins, None);
        assert_eq!(ds.aggregates[0].total_authors, None);
    }

    #[test]
    fn partial_page_bins_are_rejected() {
        let src = format!("{HEADER}\n2013,1,1,0,0,0,0,,1,,\n");
        let err = read_aggregates(src.as_bytes(), InputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("page bins"), "{err}");
    }

    #[test]
    fn rejects_stray_column_and_negative_count() {
        let src = format!("{HEADER},extra\n2013,1,1,0,0,0,0,,,,,1\n");
        assert!(read_aggregates(src.as_bytes(), InputFormat::Csv).is_err());
        let src = format!("{HEADER}\n2013,1,-1,0,0,0,0,,,,\n");
        let err = read_aggregates(src.as_bytes(), InputFormat::Csv).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                location: Location::Line(2),
                ..
            }
        ));
    }

    #[test]
    fn json_mirrors_csv_field_names() {
        let src = r#"[{"year": 2013, "papers": 33, "a1": 14, "a2": 14, "a3": 5, "a4": 0, "a5plus": 0,
                       "total_authors": 57, "p1to5": 4, "p6to10": 26, "pabove10": 3,
                       "subj:Webometrics": 33}]"#;
        let ds = parse_aggregates(src.as_bytes(), InputFormat::Json, Consistency::Strict).unwrap();
        assert_eq!(ds.aggregates[0].subject_counts.get("Webometrics"), Some(33));
        assert_eq!(ds.aggregates[0].min_authors(), 57);
    }
}
