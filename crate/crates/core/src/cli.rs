//! Command-line driver.
//!
//! Exit codes: 0 success, 1 validation, analysis or golden-check failure,
//! 2 unreadable or unparseable input and usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{AnalysisConfig, CagrMode, CiVariant, ConfigLayer, EgrMode, Mode, RgrMode};
use crate::demo::DEMO_AGGREGATES;
use crate::error::{Error, Result};
use crate::golden::{reproduce, Conformance, Verdict};
use crate::ingest::{
    read_aggregates, read_records, sniff_granularity, validate, Consistency, Dataset, Finding,
    Granularity, InputFormat, ValidationReport, AGGREGATE_COLUMNS, RECORD_COLUMNS,
    RECORD_OPTIONAL_COLUMNS, SUBJECT_PREFIX,
};
use crate::report::{render_document, table_json, Metadata, OutputFormat, TotalsSource};
use crate::tables::{build_tables, indicator_summary, prepare, TableSelection};

/// Environment variable naming a config file when `--config` is not given.
pub const CONFIG_ENV: &str = "SCIENTOSCOPE_CONFIG";

pub const SKIPPED_NOTE: &str = "standard mode: golden comparison skipped";

#[derive(Debug, Parser)]
#[command(
    name = "scientoscope",
    version,
    about = "Growth, authorship and collaboration indicators for journal publication data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a dataset against the input schema and consistency rules
    Validate(Flags),
    /// Render numbered tables (1-8 or all)
    Analyze(Flags),
    /// Headline indicators over the whole study window
    Indicators(Flags),
    /// Rebuild the reference study's eight tables and compare them with the printed values
    ReproducePaper(Flags),
    /// Print the accepted input schemas
    Schema(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Input file (.csv or .json); defaults to the bundled demo aggregates
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_name = "text|csv|json|markdown")]
    format: Option<String>,
    #[arg(long, value_name = "paper|standard")]
    mode: Option<Mode>,
    #[arg(long, value_name = "1..8|all")]
    table: Option<String>,
    /// Treat consistency warnings as errors
    #[arg(long)]
    strict: bool,
    /// TOML config file; falls back to $SCIENTOSCOPE_CONFIG
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective configuration and exit
    #[arg(long)]
    show_config: bool,
    #[arg(long, value_name = "records|aggregates")]
    granularity: Option<String>,
    /// Add the wall-clock time to the metadata line
    #[arg(long)]
    timestamp: bool,
    #[arg(long, value_name = "stated|printed")]
    ci_variant: Option<CiVariant>,
    #[arg(long, value_name = "paper|log")]
    egr_mode: Option<EgrMode>,
    #[arg(long, value_name = "paper_years|intervals")]
    cagr_mode: Option<CagrMode>,
    #[arg(long, value_name = "standard|paper")]
    rgr_mode: Option<RgrMode>,
    #[arg(long, value_name = "full_precision|rounded_cells")]
    totals_source: Option<TotalsSource>,
}

impl Flags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            mode: self.mode,
            ci_variant: self.ci_variant,
            egr_mode: self.egr_mode,
            cagr_mode: self.cagr_mode,
            rgr_mode: self.rgr_mode,
            totals_source: self.totals_source,
            strict: self.strict.then_some(true),
            input: self.input.clone(),
            format: self.format.clone(),
            table: self.table.clone(),
            granularity: self.granularity.clone(),
            show_config: self.show_config.then_some(true),
            timestamp: self.timestamp.then_some(true),
            ..ConfigLayer::default()
        }
    }
}

/// Effective settings of one invocation.
struct Settings {
    config: AnalysisConfig,
    input: Option<PathBuf>,
    format: OutputFormat,
    table: TableSelection,
    granularity: Option<Granularity>,
    show_config: bool,
    timestamp: bool,
}

impl Settings {
    /// Defaults, then `base`, then the config file, then the flags.
    fn resolve(flags: &Flags, base: ConfigLayer) -> Result<Self> {
        let config_path = flags
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let file = match config_path {
            Some(path) => ConfigLayer::load(&path)?,
            None => ConfigLayer::default(),
        };
        let layers = [base, file, flags.layer()];
        let merged = layers
            .iter()
            .cloned()
            .fold(ConfigLayer::default(), ConfigLayer::merge);
        Ok(Settings {
            config: AnalysisConfig::resolve(&layers)?,
            input: merged.input,
            format: merged.format.as_deref().unwrap_or("text").parse()?,
            table: merged.table.as_deref().unwrap_or("all").parse()?,
            granularity: merged.granularity.as_deref().map(str::parse).transpose()?,
            show_config: merged.show_config.unwrap_or(false),
            timestamp: merged.timestamp.unwrap_or(false),
        })
    }

    fn metadata(&self) -> Metadata {
        let timestamp = self.timestamp.then(|| {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            secs.to_string()
        });
        Metadata {
            toolkit: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            mode: self.config.mode.to_string(),
            config_hash: self.config.hash(),
            overrides: self.config.overrides.clone(),
            timestamp,
        }
    }

    fn show(&self) -> String {
        let mut out = format!("# effective configuration, hash {}\n", self.config.hash());
        if let Some(input) = &self.input {
            out.push_str(&format!("input = {:?}\n", input.display().to_string()));
        }
        out.push_str(&format!("format = {:?}\n", format_name(self.format)));
        let table = match self.table {
            TableSelection::All => "all".to_owned(),
            TableSelection::One(id) => id.number().to_string(),
        };
        out.push_str(&format!("table = {table:?}\n"));
        if let Some(g) = self.granularity {
            let g = match g {
                Granularity::Records => "records",
                Granularity::Aggregates => "aggregates",
            };
            out.push_str(&format!("granularity = {g:?}\n"));
        }
        out.push_str(&format!("timestamp = {}\n", self.timestamp));
        out.push_str(&self.config.to_toml());
        out
    }
}

fn format_name(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Text => "text",
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
        OutputFormat::Markdown => "markdown",
    }
}

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Parse { .. } | Error::Io(_) | Error::Config(_) => 2,
        Error::Validation(_) | Error::Analysis(_) | Error::Internal(_) | Error::Format(_) => 1,
    }
}

/// Runs one command line. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::Validation(report) = &e {
                for finding in &report.errors {
                    let _ = writeln!(err, "  {finding}");
                }
            }
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (flags, base) = match &command {
        Command::ReproducePaper(flags) => (
            flags,
            ConfigLayer {
                mode: Some(Mode::Paper),
                ..ConfigLayer::default()
            },
        ),
        Command::Validate(flags)
        | Command::Analyze(flags)
        | Command::Indicators(flags)
        | Command::Schema(flags) => (flags, ConfigLayer::default()),
    };
    let settings = Settings::resolve(flags, base)?;
    if settings.show_config {
        out.write_all(settings.show().as_bytes())?;
        return Ok(0);
    }
    match command {
        Command::Validate(_) => cmd_validate(&settings, out, err),
        Command::Analyze(_) => cmd_analyze(&settings, out, err),
        Command::Indicators(_) => cmd_indicators(&settings, out, err),
        Command::ReproducePaper(_) => cmd_reproduce_paper(&settings, out, err),
        Command::Schema(_) => cmd_schema(&settings, out),
    }
}

struct Loaded {
    dataset: Dataset,
    report: ValidationReport,
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot read {}: {e}", path.display()),
        ))
    })
}

/// Parses without judging consistency, then validates at the configured
/// strictness.
fn load(settings: &Settings) -> Result<Loaded> {
    let (bytes, format) = match &settings.input {
        Some(path) => (read_input(path)?, InputFormat::from_path(path)),
        None => (DEMO_AGGREGATES.as_bytes().to_vec(), InputFormat::Csv),
    };
    let granularity = match settings.granularity {
        Some(g) => g,
        None => sniff_granularity(&bytes, format)?,
    };
    let dataset = match granularity {
        Granularity::Records => read_records(&bytes, format)?,
        Granularity::Aggregates => read_aggregates(&bytes, format)?,
    };
    let mut dataset = dataset.with_consistency(Consistency::from_strict(settings.config.strict));
    if let Some(window) = settings.config.study_window {
        dataset = dataset.with_window(window);
    }
    let report = validate(&dataset);
    Ok(Loaded { dataset, report })
}

/// Loads a dataset that must pass validation, reporting warnings on `err`.
fn load_accepted(settings: &Settings, err: &mut dyn Write) -> Result<Dataset> {
    let loaded = load(settings)?;
    for warning in &loaded.report.warnings {
        writeln!(err, "warning: {warning}")?;
    }
    if !loaded.report.is_accepted() {
        return Err(Error::Validation(loaded.report));
    }
    Ok(loaded.dataset)
}

fn report_warnings(warnings: &[Finding], err: &mut dyn Write) -> Result<()> {
    for warning in warnings {
        writeln!(err, "warning: {warning}")?;
    }
    Ok(())
}

fn cmd_validate(settings: &Settings, out: &mut dyn Write, _err: &mut dyn Write) -> Result<i32> {
    let Loaded { dataset, mut report } = load(settings)?;
    if report.is_accepted() {
        // Tabulation warnings (unknown subjects, missing pages) belong here too.
        let prepared = prepare(&dataset, &settings.config)?;
        report.warnings.extend(prepared.warnings);
    }
    let failed = !report.is_accepted() || (settings.config.strict && !report.warnings.is_empty());
    if settings.format == OutputFormat::Json {
        let mut value = serde_json::to_value(&report).expect("report serializes");
        value["accepted"] = Value::Bool(!failed);
        let mut text = serde_json::to_string_pretty(&value).expect("JSON value serializes");
        text.push('\n');
        out.write_all(text.as_bytes())?;
    } else {
        let units = match dataset.granularity {
            Granularity::Records => format!("{} records", report.record_count),
            Granularity::Aggregates => format!("{} years", report.year_count),
        };
        writeln!(out, "checked {units} in {}", dataset.study_window)?;
        for finding in &report.errors {
            writeln!(out, "error: {finding}")?;
        }
        for finding in &report.warnings {
            writeln!(out, "warning: {finding}")?;
        }
        writeln!(
            out,
            "{} error(s), {} warning(s): {}",
            report.errors.len(),
            report.warnings.len(),
            if failed { "rejected" } else { "accepted" }
        )?;
    }
    Ok(i32::from(failed))
}

fn cmd_analyze(settings: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let dataset = load_accepted(settings, err)?;
    let prepared = prepare(&dataset, &settings.config)?;
    report_warnings(&prepared.warnings, err)?;
    let tables = build_tables(&settings.table.tables(), &prepared.dataset, &settings.config)?;
    let policy = settings.config.display_policy();
    out.write_all(&render_document(&tables, settings.format, &policy, &settings.metadata())?)?;
    Ok(0)
}

fn cmd_indicators(settings: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let dataset = load_accepted(settings, err)?;
    let prepared = prepare(&dataset, &settings.config)?;
    report_warnings(&prepared.warnings, err)?;
    let table = indicator_summary(&prepared.dataset, &settings.config)?;
    let policy = settings.config.display_policy();
    out.write_all(&render_document(&[table], settings.format, &policy, &settings.metadata())?)?;
    Ok(0)
}

fn conformance_json(conformance: &Conformance) -> Value {
    let checks: Vec<Value> = conformance
        .outcomes
        .iter()
        .map(|o| {
            let (verdict, reason) = match o.verdict {
                Verdict::Pass => ("pass", None),
                Verdict::Fail => ("fail", None),
                Verdict::Exempt(reason) => ("exempt", Some(reason)),
            };
            let mut check = json!({
                "cell": o.cell_name(),
                "printed": o.printed,
                "computed": o.computed,
                "tolerance": o.tolerance,
                "verdict": verdict,
            });
            if let Some(reason) = reason {
                check["reason"] = Value::from(reason);
            }
            check
        })
        .collect();
    json!({
        "passed": conformance.passed(),
        "failed": conformance.failed(),
        "exempt": conformance.exempt(),
        "checks": checks,
    })
}

fn cmd_reproduce_paper(settings: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let dataset = load_accepted(settings, err)?;
    let reproduction = reproduce(&dataset, &settings.config)?;
    report_warnings(&reproduction.warnings, err)?;
    let compare = settings.config.mode == Mode::Paper;
    let conformance = &reproduction.conformance;
    let policy = settings.config.display_policy();
    let metadata = settings.metadata();

    if settings.format == OutputFormat::Json {
        let tables = reproduction
            .tables
            .iter()
            .map(|t| table_json(t, &policy))
            .collect::<Result<Vec<_>>>()?;
        let conformance = if compare {
            conformance_json(conformance)
        } else {
            json!({ "note": SKIPPED_NOTE })
        };
        let doc = json!({ "metadata": metadata, "tables": tables, "conformance": conformance });
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON value serializes");
        text.push('\n');
        out.write_all(text.as_bytes())?;
    } else {
        out.write_all(&render_document(&reproduction.tables, settings.format, &policy, &metadata)?)?;
        writeln!(out)?;
        if compare {
            out.write_all(conformance.summary().as_bytes())?;
        } else {
            writeln!(out, "{SKIPPED_NOTE}")?;
        }
    }

    if compare && !conformance.is_success() {
        writeln!(err, "golden mismatch in {} cell(s):", conformance.failed())?;
        for failure in conformance.failures() {
            writeln!(err, "  {failure}")?;
        }
        return Ok(1);
    }
    Ok(0)
}

fn cmd_schema(settings: &Settings, out: &mut dyn Write) -> Result<i32> {
    let taxonomy = settings.config.taxonomy()?;
    if settings.format == OutputFormat::Json {
        let doc = json!({
            "records": {
                "columns": RECORD_COLUMNS,
                "optional_columns": RECORD_OPTIONAL_COLUMNS,
                "author_separator": ";",
            },
            "aggregates": {
                "columns": AGGREGATE_COLUMNS,
                "subject_prefix": SUBJECT_PREFIX,
                "taxonomy": taxonomy.labels(),
            },
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON value serializes");
        text.push('\n');
        out.write_all(text.as_bytes())?;
        return Ok(0);
    }
    let mut text = String::new();
    text.push_str("records (one row per article)\n");
    text.push_str(&format!("  columns:  {}\n", RECORD_COLUMNS.join(",")));
    text.push_str(&format!("  optional: {}\n", RECORD_OPTIONAL_COLUMNS.join(",")));
    text.push_str("  authors are separated by ';'; author_count overrides the list length\n");
    text.push_str("aggregates (one row per year)\n");
    text.push_str(&format!("  columns:  {}\n", AGGREGATE_COLUMNS.join(",")));
    text.push_str(&format!(
        "  plus one {SUBJECT_PREFIX}<label> column per subject; labels outside the taxonomy fold into {:?}\n",
        taxonomy.catch_all()
    ));
    text.push_str("  taxonomy:\n");
    for label in taxonomy.labels() {
        text.push_str(&format!("    {label}\n"));
    }
    text.push_str("json: an array of objects keyed by the same column names\n");
    out.write_all(text.as_bytes())?;
    Ok(0)
}
