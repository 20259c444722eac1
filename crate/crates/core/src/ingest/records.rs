use serde_json::{Map, Value};

use super::{decode, validate, BibRecord, Dataset, InputFormat};
use crate::error::{Error, Location, Result};

/// Mandatory record columns, in header order.
pub const RECORD_COLUMNS: [&str; 8] = [
    "year",
    "volume",
    "issue",
    "title",
    "authors",
    "start_page",
    "end_page",
    "subject",
];

/// Columns that may follow the mandatory ones, in any order.
pub const RECORD_OPTIONAL_COLUMNS: [&str; 2] = ["author_count", "page_count"];

const AUTHOR_DELIMITER: char = ';';

/// Parses and validates record-level input. Any validation error rejects the
/// whole dataset.
pub fn parse_records(source: &[u8], format: InputFormat) -> Result<Dataset> {
    let dataset = read_records(source, format)?;
    let report = validate(&dataset);
    if report.is_accepted() {
        Ok(dataset)
    } else {
        Err(Error::Validation(report))
    }
}

/// Parses record-level input without checking dataset invariants.
pub fn read_records(source: &[u8], format: InputFormat) -> Result<Dataset> {
    let text = decode(source)?;
    let records = match format {
        InputFormat::Csv => read_csv(text)?,
        InputFormat::Json => read_json(text)?,
    };
    Dataset::from_records(records)
}

/// Raw field values for one record, before typing.
struct RawRecord<'a> {
    location: Location,
    fields: Vec<(&'a str, Option<String>)>,
}

impl RawRecord<'_> {
    fn text(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, v)| v.as_deref())
            .map(str::trim)
            .filter(|v| !v.is_empty())
    }

    fn required_text(&self, name: &str) -> Result<&str> {
        self.text(name).ok_or_else(|| {
            Error::parse(
                self.location.clone(),
                format!("missing mandatory field `{name}`"),
            )
        })
    }

    fn number(&self, name: &str) -> Result<Option<u32>> {
        self.text(name)
            .map(|v| {
                v.parse::<u32>().map_err(|_| {
                    Error::parse(
                        self.location.clone(),
                        format!("non-numeric `{name}`: {v:?}"),
                    )
                })
            })
            .transpose()
    }

    fn positive(&self, name: &str) -> Result<Option<u32>> {
        match self.number(name)? {
            Some(0) => Err(Error::parse(
                self.location.clone(),
                format!("`{name}` must be positive"),
            )),
            other => Ok(other),
        }
    }

    fn into_record(self) -> Result<BibRecord> {
        let year_text = self.required_text("year")?;
        let year = year_text.parse::<i32>().map_err(|_| {
            Error::parse(
                self.location.clone(),
                format!("non-numeric `year`: {year_text:?}"),
            )
        })?;
        let title = self.required_text("title")?.to_owned();
        let subject = self.required_text("subject")?.to_owned();
        let authors = split_authors(self.text("authors").unwrap_or_default());
        let author_count = self.number("author_count")?;
        if authors.is_empty() && author_count.is_none() {
            return Err(Error::parse(
                self.location.clone(),
                "missing mandatory field `authors` (or `author_count`)",
            ));
        }
        Ok(BibRecord {
            year,
            volume: self.number("volume")?,
            issue: self.number("issue")?,
            title,
            authors,
            author_count,
            start_page: self.positive("start_page")?,
            end_page: self.positive("end_page")?,
            page_count: self.positive("page_count")?,
            subject,
        })
    }
}

fn split_authors(field: &str) -> Vec<String> {
    field
        .split(AUTHOR_DELIMITER)
        .map(str::trim)
        .filter(|name| !name.is_empty())
        .map(str::to_owned)
        .collect()
}

fn read_csv(text: &str) -> Result<Vec<BibRecord>> {
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
    let columns: Vec<&str> = header.iter().map(String::as_str).collect();

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(Location::Line(line), format!("malformed row: {e}"))
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let raw = RawRecord {
            location: Location::Line(line),
            fields: columns
                .iter()
                .zip(row.iter())
                .map(|(name, value)| (*name, Some(value.to_owned())))
                .collect(),
        };
        records.push(raw.into_record()?);
    }
    Ok(records)
}

fn check_header(header: &[String]) -> Result<()> {
    let mandatory_ok = header.len() >= RECORD_COLUMNS.len()
        && header.iter().zip(RECORD_COLUMNS).all(|(h, c)| h == c);
    let extras = &header[RECORD_COLUMNS.len().min(header.len())..];
    let extras_ok = extras
        .iter()
        .all(|h| RECORD_OPTIONAL_COLUMNS.contains(&h.as_str()));
    if mandatory_ok && extras_ok {
        Ok(())
    } else {
        Err(Error::parse(
            Location::Line(1),
            format!(
                "header must be `{}` optionally followed by {}; got `{}`",
                RECORD_COLUMNS.join(","),
                RECORD_OPTIONAL_COLUMNS.join("/"),
                header.join(",")
            ),
        ))
    }
}

fn read_json(text: &str) -> Result<Vec<BibRecord>> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(Location::Dataset, format!("invalid JSON: {e}")))?;
    let Value::Array(items) = value else {
        return Err(Error::parse(
            Location::Dataset,
            "top-level JSON value must be a list of records",
        ));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let location = Location::Element(i + 1);
            let obj = item
                .as_object()
                .ok_or_else(|| Error::parse(location.clone(), "record must be an object"))?;
            json_raw(obj, location)?.into_record()
        })
        .collect()
}

fn json_raw(obj: &Map<String, Value>, location: Location) -> Result<RawRecord<'static>> {
    let mut fields = Vec::new();
    for name in RECORD_COLUMNS.iter().chain(RECORD_OPTIONAL_COLUMNS.iter()) {
        let value = match obj.get(*name) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            Some(Value::Array(names)) if *name == "authors" => {
                let mut joined = Vec::with_capacity(names.len());
                for n in names {
                    let s = n.as_str().ok_or_else(|| {
                        Error::parse(location.clone(), "`authors` entries must be strings")
                    })?;
                    joined.push(s.to_owned());
                }
                Some(joined.join(";"))
            }
            Some(other) => {
                return Err(Error::parse(
                    location,
                    format!("unexpected value for `{name}`: {other}"),
                ))
            }
        };
        fields.push((*name, value));
    }
    Ok(RawRecord { location, fields })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Rule;

    const HEADER: &str = "year,volume,issue,title,authors,start_page,end_page,subject\n";

    fn csv(rows: &str) -> Vec<u8> {
        format!("{HEADER}{rows}").into_bytes()
    }

    #[test]
    fn maps_fields_of_a_quoted_row() {
        let src = csv("2013,33,5,Some Title,A. Kumar; B. Singh,412,417,\"Scientometrics, Bibliometrics\"\n");
        let ds = parse_records(&src, InputFormat::Csv).unwrap();
        let r = &ds.records[0];
        assert_eq!(r.year, 2013);
        assert_eq!(r.volume, Some(33));
        assert_eq!(r.issue, Some(5));
        assert_eq!(r.authors, vec!["A. Kumar", "B. Singh"]);
        assert_eq!(r.author_total(), 2);
        assert_eq!((r.start_page, r.end_page), (Some(412), Some(417)));
        assert_eq!(r.subject, "Scientometrics, Bibliometrics");
    }

    #[test]
    fn single_name_counts_one_author_and_blanks_are_absent() {
        let src = csv("2014,,,Title,A. Kumar,,,ICT\n");
        let r = &parse_records(&src, InputFormat::Csv).unwrap().records[0];
        assert_eq!(r.author_total(), 1);
        assert_eq!(r.volume, None);
        assert_eq!(r.start_page, None);
        assert_eq!(r.pages(), None);
    }

    #[test]
    fn reversed_page_span_is_rejected() {
        let src = csv("2013,33,5,T,A,412,411,ICT\n");
        let err = parse_records(&src, InputFormat::Csv).unwrap_err();
        let Error::Validation(report) = err else {
            panic!("expected validation error, got {err}");
        };
        assert_eq!(report.errors[0].rule, Rule::PageOrder);
    }

    #[test]
    fn reports_line_of_bad_year() {
        let src = csv("2013,33,5,T,A,1,2,ICT\nabc,33,5,T,A,1,2,ICT\n");
        match read_records(&src, InputFormat::Csv).unwrap_err() {
            Error::Parse { location, message } => {
                assert_eq!(location, Location::Line(3));
                assert!(message.contains("year"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_subject_and_authors_are_errors() {
        let err = read_records(&csv("2013,33,5,T,A,1,2,\n"), InputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("`subject`"), "{err}");
        let err = read_records(&csv("2013,33,5,T,,1,2,ICT\n"), InputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("`authors`"), "{err}");
        let err = read_records(&csv("2013,33,5,T,A,x,2,ICT\n"), InputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("non-numeric `start_page`"), "{err}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = read_records(&csv("2013,33,5,T,A,1,2,ICT\n2013,33\n"), InputFormat::Csv)
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                location: Location::Line(3),
                ..
            }
        ));
    }

    #[test]
    fn author_count_column_overrides_names() {
        let src = "year,volume,issue,title,authors,start_page,end_page,subject,author_count\n\
                   2013,,,T,,,,ICT,4\n2013,,,T,A; B,,,ICT,3\n";
        let ds = parse_records(src.as_bytes(), InputFormat::Csv).unwrap();
        assert_eq!(ds.records[0].author_total(), 4);
        assert_eq!(ds.records[1].author_total(), 3);
    }

    #[test]
    fn rejects_unknown_header() {
        let err = read_records(b"year,title\n2013,T\n", InputFormat::Csv).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                location: Location::Line(1),
                ..
            }
        ));
    }

    #[test]
    fn json_accepts_list_or_delimited_authors() {
        let src = r#"[
            {"year": 2013, "title": "A", "authors": ["X", "Y"], "subject": "ICT", "start_page": 1, "end_page": 5},
            {"year": 2014, "title": "B", "authors": "X; Y; Z", "subject": "ICT", "volume": null}
        ]"#;
        let ds = parse_records(src.as_bytes(), InputFormat::Json).unwrap();
        assert_eq!(ds.records[0].author_total(), 2);
        assert_eq!(ds.records[0].pages(), Some(5));
        assert_eq!(ds.records[1].author_total(), 3);
        assert_eq!(ds.records[1].volume, None);
    }

    #[test]
    fn json_reports_element_index() {
        let src = r#"[{"year": 2013, "title": "A", "authors": "X", "subject": "ICT"}, {"title": "B"}]"#;
        match read_records(src.as_bytes(), InputFormat::Json).unwrap_err() {
            Error::Parse { location, .. } => assert_eq!(location, Location::Element(2)),
            other => panic!("unexpected {other}"),
        }
    }
}
