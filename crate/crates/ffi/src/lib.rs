//! C ABI for the scientoscope toolkit.
//!
//! Every fallible call returns an [`ScStatus`]; on failure the message is
//! available from [`sc_last_error`] on the same thread. Strings handed out
//! by this library are NUL-terminated UTF-8 and must be released with
//! [`sc_string_free`]; datasets with [`sc_dataset_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scientoscope::config::{AnalysisConfig, CiVariant, Mode};
use scientoscope::indicators::{cagr, collaborative_index, degree_of_collaboration, CollaborationRow};
use scientoscope::ingest::{parse_aggregates, parse_records, sniff_granularity, validate, Consistency};
use scientoscope::report::{render_document, round_display, Metadata, Rounding};
use scientoscope::tables::{build_tables, prepare, TableId, TableSelection};
use scientoscope::{Dataset, Error, Granularity, InputFormat, OutputFormat};

/// Opaque dataset handle.
pub struct ScDataset {
    inner: Dataset,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Validation = 4,
    Analysis = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScInputFormat {
    Csv = 0,
    Json = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScOutputFormat {
    Text = 0,
    Csv = 1,
    Json = 2,
    Markdown = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScMode {
    Standard = 0,
    Paper = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    let c = CString::new(message).expect("NUL bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(error: &Error) -> ScStatus {
    match error {
        Error::Parse { .. } | Error::Io(_) => ScStatus::Parse,
        Error::Validation(_) => ScStatus::Validation,
        Error::Analysis(_) => ScStatus::Analysis,
        Error::Config(_) | Error::Format(_) => ScStatus::InvalidArgument,
        Error::Internal(_) => ScStatus::Internal,
    }
}

/// Runs `body`, mapping errors and panics to a status and the last-error slot.
fn guard(body: impl FnOnce() -> Result<(), (ScStatus, String)>) -> ScStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ScStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside scientoscope");
            ScStatus::Panic
        }
    }
}

fn fail(error: Error) -> (ScStatus, String) {
    (status_of(&error), error.to_string())
}

fn null(what: &str) -> (ScStatus, String) {
    (ScStatus::NullPointer, format!("{what} is NULL"))
}

fn into_c_string(text: String) -> Result<*mut c_char, (ScStatus, String)> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| (ScStatus::Internal, "output contains a NUL byte".to_owned()))
}

/// Message of the last failed call on this thread, or NULL. The caller owns
/// the returned string.
#[no_mangle]
pub extern "C" fn sc_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |c| c.clone().into_raw())
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `len` bytes as records or year aggregates (sniffed from the
/// header) and validates them. `strict` turns bin-sum mismatches into errors.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_dataset_parse(
    data: *const u8,
    len: usize,
    format: ScInputFormat,
    strict: bool,
    out: *mut *mut ScDataset,
) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if data.is_null() {
            return Err(null("data"));
        }
        let source = std::slice::from_raw_parts(data, len);
        let format = match format {
            ScInputFormat::Csv => InputFormat::Csv,
            ScInputFormat::Json => InputFormat::Json,
        };
        let dataset = match sniff_granularity(source, format).map_err(fail)? {
            Granularity::Records => parse_records(source, format),
            Granularity::Aggregates => {
                parse_aggregates(source, format, Consistency::from_strict(strict))
            }
        }
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(ScDataset { inner: dataset }));
        Ok(())
    })
}

/// The bundled reference aggregates.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_dataset_demo(out: *mut *mut ScDataset) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dataset = scientoscope::demo::demo_aggregates().map_err(fail)?;
        *out = Box::into_raw(Box::new(ScDataset { inner: dataset }));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be NULL or a handle from this library that is not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_dataset_free(dataset: *mut ScDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Papers in the dataset (records, or the sum of yearly counts); 0 for NULL.
///
/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_dataset_total_papers(dataset: *const ScDataset) -> u64 {
    dataset.as_ref().map_or(0, |d| d.inner.total_papers())
}

/// Validation report as a JSON document.
///
/// # Safety
/// `dataset` must be a live handle; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_dataset_validate_json(
    dataset: *const ScDataset,
    out_json: *mut *mut c_char,
) -> ScStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        *out_json = ptr::null_mut();
        let dataset = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        let report = validate(&dataset.inner);
        let mut value = serde_json::to_value(&report)
            .map_err(|e| (ScStatus::Internal, e.to_string()))?;
        value["accepted"] = serde_json::Value::Bool(report.is_accepted());
        *out_json = into_c_string(value.to_string())?;
        Ok(())
    })
}

/// Renders table `table` (1-8, or 0 for all eight) behind a metadata line.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_analyze(
    dataset: *const ScDataset,
    table: u8,
    mode: ScMode,
    format: ScOutputFormat,
    out: *mut *mut c_char,
) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let dataset = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        let selection = if table == 0 {
            TableSelection::All
        } else {
            TableSelection::One(TableId::new(table).map_err(fail)?)
        };
        let config = AnalysisConfig::for_mode(match mode {
            ScMode::Standard => Mode::Standard,
            ScMode::Paper => Mode::Paper,
        });
        let format = match format {
            ScOutputFormat::Text => OutputFormat::Text,
            ScOutputFormat::Csv => OutputFormat::Csv,
            ScOutputFormat::Json => OutputFormat::Json,
            ScOutputFormat::Markdown => OutputFormat::Markdown,
        };
        let prepared = prepare(&dataset.inner, &config).map_err(fail)?;
        let tables =
            build_tables(&selection.tables(), &prepared.dataset, &config).map_err(fail)?;
        let metadata = Metadata {
            toolkit: "scientoscope".to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            mode: config.mode.to_string(),
            config_hash: config.hash(),
            overrides: Vec::new(),
            timestamp: None,
        };
        let bytes = render_document(&tables, format, &config.display_policy(), &metadata)
            .map_err(fail)?;
        let text = String::from_utf8(bytes).map_err(|e| (ScStatus::Internal, e.to_string()))?;
        *out = into_c_string(text)?;
        Ok(())
    })
}

/// Degree of collaboration `Nm / (Nm + Ns)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_degree_of_collaboration(single: u64, multiple: u64, out: *mut f64) -> ScStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = degree_of_collaboration(single, multiple).map_err(fail)?;
        Ok(())
    })
}

/// Collaborative index. The printed variant (`stated = false`) is `Nm / Ns`;
/// the stated variant is `authors / (Ns + Nm)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_collaborative_index(
    single: u64,
    multiple: u64,
    authors: u64,
    stated: bool,
    out: *mut f64,
) -> ScStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let row = CollaborationRow::new(None, single, multiple);
        let variant = if stated { CiVariant::Stated } else { CiVariant::Printed };
        *out = collaborative_index(&row, Some(authors), variant).map_err(fail)?;
        Ok(())
    })
}

/// Compound annual growth rate in percent over `periods` periods.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_cagr(first: u64, last: u64, periods: u32, out: *mut f64) -> ScStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = cagr(first, last, periods).map_err(fail)?;
        Ok(())
    })
}

/// `value` rounded half-up to `decimals` places, as text.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_round_display(value: f64, decimals: u32, out: *mut *mut c_char) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = round_display(value, decimals, Rounding::HalfUp).map_err(fail)?;
        *out = into_c_string(text)?;
        Ok(())
    })
}
