use std::ffi::{c_char, CStr};
use std::path::Path;
use std::process::Command;
use std::ptr;

use scientoscope_ffi::*;

unsafe fn take_string(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
    sc_string_free(s);
    text
}

fn last_error() -> String {
    unsafe { take_string(sc_last_error()) }
}

#[test]
fn demo_dataset_round_trip() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(sc_dataset_demo(&mut ds), ScStatus::Ok);
        assert_eq!(sc_dataset_total_papers(ds), 227);

        let mut json = ptr::null_mut();
        assert_eq!(sc_dataset_validate_json(ds, &mut json), ScStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(report["accepted"], true);
        assert_eq!(report["warnings"].as_array().unwrap().len(), 2);

        let mut text = ptr::null_mut();
        assert_eq!(sc_analyze(ds, 6, ScMode::Paper, ScOutputFormat::Text, &mut text), ScStatus::Ok);
        let text = take_string(text);
        assert!(text.contains("mode=paper"), "{text}");
        assert!(text.contains("0.61") && text.contains("1.78"), "{text}");
        sc_dataset_free(ds);
    }
}

#[test]
fn all_tables_as_json() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(sc_dataset_demo(&mut ds), ScStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(sc_analyze(ds, 0, ScMode::Paper, ScOutputFormat::Json, &mut out), ScStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(doc["tables"].as_array().unwrap().len(), 8);
        sc_dataset_free(ds);
    }
}

#[test]
fn parse_errors_carry_a_message() {
    let garbage = b"not,a,schema\n1,2,3\n";
    unsafe {
        let mut ds = ptr::null_mut();
        let status = sc_dataset_parse(garbage.as_ptr(), garbage.len(), ScInputFormat::Csv, false, &mut ds);
        assert_eq!(status, ScStatus::Parse);
        assert!(ds.is_null());
    }
    assert!(!last_error().is_empty());
}

#[test]
fn strict_parse_rejects_bin_mismatch() {
    let csv = scientoscope::demo::DEMO_AGGREGATES.as_bytes();
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(sc_dataset_parse(csv.as_ptr(), csv.len(), ScInputFormat::Csv, false, &mut ds), ScStatus::Ok);
        sc_dataset_free(ds);
        let mut ds = ptr::null_mut();
        assert_eq!(
            sc_dataset_parse(csv.as_ptr(), csv.len(), ScInputFormat::Csv, true, &mut ds),
            ScStatus::Validation
        );
        assert!(ds.is_null());
    }
    assert!(last_error().contains("authorship bin sum 50"));
}

#[test]
fn records_are_accepted() {
    let csv = scientoscope::demo::DEMO_SMALL_RECORDS.as_bytes();
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(sc_dataset_parse(csv.as_ptr(), csv.len(), ScInputFormat::Csv, false, &mut ds), ScStatus::Ok);
        assert_eq!(sc_dataset_total_papers(ds), 12);
        let mut out = ptr::null_mut();
        assert_eq!(sc_analyze(ds, 2, ScMode::Standard, ScOutputFormat::Csv, &mut out), ScStatus::Ok);
        assert!(take_string(out).contains("Single Author"));
        sc_dataset_free(ds);
    }
}

#[test]
fn scalar_indicators() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(sc_degree_of_collaboration(14, 19, &mut v), ScStatus::Ok);
        assert!((v - 19.0 / 33.0).abs() < 1e-12);
        assert_eq!(sc_collaborative_index(14, 19, 57, false, &mut v), ScStatus::Ok);
        assert!((v - 19.0 / 14.0).abs() < 1e-12);
        assert_eq!(sc_collaborative_index(14, 19, 57, true, &mut v), ScStatus::Ok);
        assert!((v - 57.0 / 33.0).abs() < 1e-12);
        assert_eq!(sc_cagr(33, 51, 5, &mut v), ScStatus::Ok);
        assert!((v - 9.0966).abs() < 1e-3);

        assert_eq!(sc_degree_of_collaboration(0, 0, &mut v), ScStatus::Analysis);
        assert_eq!(sc_collaborative_index(0, 3, 6, false, &mut v), ScStatus::Analysis);
        assert_eq!(sc_cagr(33, 51, 0, &mut v), ScStatus::Analysis);
        assert_eq!(sc_cagr(33, 51, 5, ptr::null_mut()), ScStatus::NullPointer);
    }
}

#[test]
fn rounding_and_bad_table_number() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(sc_round_display(0.125, 2, &mut out), ScStatus::Ok);
        assert_eq!(take_string(out), "0.13");
        assert_eq!(sc_round_display(f64::NAN, 2, &mut out), ScStatus::InvalidArgument);
        assert!(out.is_null());

        let mut ds = ptr::null_mut();
        assert_eq!(sc_dataset_demo(&mut ds), ScStatus::Ok);
        assert_eq!(sc_analyze(ds, 9, ScMode::Paper, ScOutputFormat::Text, &mut out), ScStatus::InvalidArgument);
        sc_analyze(ptr::null(), 1, ScMode::Paper, ScOutputFormat::Text, &mut out);
        assert!(last_error().contains("dataset is NULL"));
        sc_dataset_free(ds);
        sc_dataset_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(sc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/scientoscope.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["sc_dataset_parse", "sc_analyze", "sc_last_error", "typedef struct ScDataset ScDataset"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(status) = Command::new(compiler)
            .args(["-fsyntax-only", "-x", lang])
            .arg(&header)
            .status()
        else {
            eprintln!("{compiler} not available, skipping");
            continue;
        };
        assert!(status.success(), "{compiler} rejected the header");
    }
}
