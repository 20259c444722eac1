//! Analysis configuration: formula variants, bin edges, taxonomy and display
//! overrides, layered as defaults < config file < command-line flags.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{StudyWindow, PAGE_BINS};
use crate::report::{DisplayPolicy, TotalsSource};

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::Config(format!(
                        "unknown {} `{other}` (expected one of: {})",
                        stringify!($name),
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

keyword_enum!(
    /// Which family of formulas to use when no per-indicator override is given.
    Mode { Paper => "paper", Standard => "standard" }
);
keyword_enum!(
    /// Collaborative Index: `stated` is authors/papers, `printed` is Nm/Ns.
    CiVariant { Stated => "stated", Printed => "printed" }
);
keyword_enum!(
    /// `paper` is the year-over-year ratio; `log` its natural logarithm.
    EgrMode { Paper => "paper", Log => "log" }
);
keyword_enum!(
    /// CAGR exponent: number of calendar years, or number of year-to-year intervals.
    CagrMode { PaperYears => "paper_years", Intervals => "intervals" }
);
keyword_enum!(
    /// Relative growth over cumulative counts, or the adjacent-year construction.
    RgrMode { Standard => "standard", Paper => "paper" }
);

impl Mode {
    pub fn ci_variant(self) -> CiVariant {
        match self {
            Mode::Paper => CiVariant::Printed,
            Mode::Standard => CiVariant::Stated,
        }
    }

    pub fn egr_mode(self) -> EgrMode {
        match self {
            Mode::Paper => EgrMode::Paper,
            Mode::Standard => EgrMode::Log,
        }
    }

    pub fn cagr_mode(self) -> CagrMode {
        match self {
            Mode::Paper => CagrMode::PaperYears,
            Mode::Standard => CagrMode::Intervals,
        }
    }

    pub fn rgr_mode(self) -> RgrMode {
        match self {
            Mode::Paper => RgrMode::Paper,
            Mode::Standard => RgrMode::Standard,
        }
    }

    pub fn totals_source(self) -> TotalsSource {
        match self {
            Mode::Paper => TotalsSource::RoundedCells,
            Mode::Standard => TotalsSource::FullPrecision,
        }
    }
}

/// Upper bounds (inclusive) of the short and medium page-length bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageBinEdges {
    pub short_max: u32,
    pub medium_max: u32,
}

impl Default for PageBinEdges {
    fn default() -> Self {
        PageBinEdges {
            short_max: 5,
            medium_max: 10,
        }
    }
}

impl PageBinEdges {
    pub fn new(short_max: u32, medium_max: u32) -> Result<Self> {
        if short_max == 0 || medium_max <= short_max {
            return Err(Error::Config(format!(
                "page bin edges must satisfy 0 < short_max < medium_max, got {short_max}, {medium_max}"
            )));
        }
        Ok(PageBinEdges {
            short_max,
            medium_max,
        })
    }

    pub fn bin(&self, pages: u32) -> usize {
        if pages <= self.short_max {
            0
        } else if pages <= self.medium_max {
            1
        } else {
            2
        }
    }

    /// Column headings in the style "1-5", "6-10", "ABOVE 10".
    pub fn labels(&self) -> [String; PAGE_BINS] {
        [
            format!("1-{}", self.short_max),
            format!("{}-{}", self.short_max + 1, self.medium_max),
            format!("ABOVE {}", self.medium_max),
        ]
    }
}

/// The fourteen subject headings of the reference journal study, in table order.
pub const PAPER_TAXONOMY: [&str; 14] = [
    "Scientometrics, Bibliometrics",
    "Webometrics",
    "User survey",
    "E-Resources",
    "Information Seeking Behaviour",
    "Knowledge Management",
    "Library Services",
    "ICT",
    "Digital Libraries",
    "Open Access",
    "Library Automation",
    "Search Engines",
    "Social Networks",
    "Others",
];

pub const DEFAULT_CATCH_ALL: &str = "Others";

/// Ordered subject labels plus the catch-all label unknown subjects map to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    labels: Vec<String>,
    catch_all: String,
}

impl Default for Taxonomy {
    fn default() -> Self {
        Taxonomy {
            labels: PAPER_TAXONOMY.iter().map(|s| s.to_string()).collect(),
            catch_all: DEFAULT_CATCH_ALL.to_owned(),
        }
    }
}

impl Taxonomy {
    pub fn new(labels: Vec<String>, catch_all: impl Into<String>) -> Result<Self> {
        let catch_all = catch_all.into();
        if !labels.contains(&catch_all) {
            return Err(Error::Config(format!(
                "taxonomy must contain its catch-all label `{catch_all}`"
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].iter().any(|l| l.eq_ignore_ascii_case(label)) {
                return Err(Error::Config(format!("duplicate taxonomy label `{label}`")));
            }
        }
        Ok(Taxonomy { labels, catch_all })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn catch_all(&self) -> &str {
        &self.catch_all
    }

    /// The canonical taxonomy label for `label`, if it is known. Matching
    /// ignores case and surrounding whitespace.
    pub fn lookup(&self, label: &str) -> Option<&str> {
        let label = label.trim();
        self.labels
            .iter()
            .find(|l| l.eq_ignore_ascii_case(label))
            .map(String::as_str)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study_window: Option<StudyWindow>,
    pub mode: Mode,
    pub ci_variant: CiVariant,
    pub egr_mode: EgrMode,
    pub cagr_mode: CagrMode,
    pub rgr_mode: RgrMode,
    pub totals_source: TotalsSource,
    pub absent_marker: String,
    pub strict: bool,
    pub page_analysis: bool,
    pub page_bin_edges: PageBinEdges,
    pub catch_all: String,
    pub taxonomy: Vec<String>,
    /// Settings given explicitly that differ from what `mode` implies.
    #[serde(skip)]
    pub overrides: Vec<String>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig::for_mode(Mode::Standard)
    }
}

impl AnalysisConfig {
    pub fn for_mode(mode: Mode) -> Self {
        let taxonomy = Taxonomy::default();
        AnalysisConfig {
            study_window: None,
            mode,
            ci_variant: mode.ci_variant(),
            egr_mode: mode.egr_mode(),
            cagr_mode: mode.cagr_mode(),
            rgr_mode: mode.rgr_mode(),
            totals_source: mode.totals_source(),
            absent_marker: "-".to_owned(),
            strict: false,
            page_analysis: true,
            page_bin_edges: PageBinEdges::default(),
            catch_all: taxonomy.catch_all,
            taxonomy: taxonomy.labels,
            overrides: Vec::new(),
        }
    }

    pub fn paper() -> Self {
        AnalysisConfig::for_mode(Mode::Paper)
    }

    pub fn standard() -> Self {
        AnalysisConfig::for_mode(Mode::Standard)
    }

    /// Resolves layered settings; later layers win. `mode` picks the defaults
    /// for every variant that no layer sets explicitly.
    pub fn resolve(layers: &[ConfigLayer]) -> Result<Self> {
        let merged = layers
            .iter()
            .cloned()
            .fold(ConfigLayer::default(), ConfigLayer::merge);
        let mode = merged.mode.unwrap_or(Mode::Standard);
        let mut config = AnalysisConfig::for_mode(mode);
        let mut overrides = Vec::new();

        macro_rules! apply {
            ($field:ident) => {
                if let Some(value) = merged.$field {
                    if value != config.$field {
                        overrides.push(format!("{}={}", stringify!($field), value));
                    }
                    config.$field = value;
                }
            };
        }
        apply!(ci_variant);
        apply!(egr_mode);
        apply!(cagr_mode);
        apply!(rgr_mode);
        apply!(totals_source);

        if let Some(window) = merged.study_window {
            config.study_window = Some(StudyWindow::new(window.first, window.last)?);
        }
        if let Some(marker) = merged.absent_marker {
            config.absent_marker = marker;
        }
        if let Some(strict) = merged.strict {
            config.strict = strict;
        }
        if let Some(page_analysis) = merged.page_analysis {
            config.page_analysis = page_analysis;
        }
        if let Some(edges) = merged.page_bin_edges {
            config.page_bin_edges = PageBinEdges::new(edges.short_max, edges.medium_max)?;
        }
        if let Some(catch_all) = merged.catch_all {
            config.catch_all = catch_all;
        }
        if let Some(taxonomy) = merged.taxonomy {
            config.taxonomy = taxonomy;
        }
        // Fails early on a catch-all missing from the label list.
        config.taxonomy()?;
        config.overrides = overrides;
        Ok(config)
    }

    pub fn taxonomy(&self) -> Result<Taxonomy> {
        Taxonomy::new(self.taxonomy.clone(), self.catch_all.clone())
    }

    pub fn display_policy(&self) -> DisplayPolicy {
        DisplayPolicy {
            absent_marker: self.absent_marker.clone(),
            totals_source: self.totals_source,
            ..DisplayPolicy::default()
        }
    }

    /// Short stable digest of the effective configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

/// One layer of optional settings: a config file, or the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub study_window: Option<StudyWindow>,
    pub mode: Option<Mode>,
    pub ci_variant: Option<CiVariant>,
    pub egr_mode: Option<EgrMode>,
    pub cagr_mode: Option<CagrMode>,
    pub rgr_mode: Option<RgrMode>,
    pub totals_source: Option<TotalsSource>,
    pub absent_marker: Option<String>,
    pub strict: Option<bool>,
    pub page_analysis: Option<bool>,
    pub page_bin_edges: Option<PageBinEdges>,
    pub catch_all: Option<String>,
    pub taxonomy: Option<Vec<String>>,
    // Command-line equivalents.
    pub input: Option<std::path::PathBuf>,
    pub format: Option<String>,
    pub table: Option<String>,
    pub granularity: Option<String>,
    pub show_config: Option<bool>,
    pub timestamp: Option<bool>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Overlays `over` on `self`; set fields in `over` win.
    pub fn merge(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            study_window: over.study_window.or(self.study_window),
            mode: over.mode.or(self.mode),
            ci_variant: over.ci_variant.or(self.ci_variant),
            egr_mode: over.egr_mode.or(self.egr_mode),
            cagr_mode: over.cagr_mode.or(self.cagr_mode),
            rgr_mode: over.rgr_mode.or(self.rgr_mode),
            totals_source: over.totals_source.or(self.totals_source),
            absent_marker: over.absent_marker.or(self.absent_marker),
            strict: over.strict.or(self.strict),
            page_analysis: over.page_analysis.or(self.page_analysis),
            page_bin_edges: over.page_bin_edges.or(self.page_bin_edges),
            catch_all: over.catch_all.or(self.catch_all),
            taxonomy: over.taxonomy.or(self.taxonomy),
            input: over.input.or(self.input),
            format: over.format.or(self.format),
            table: over.table.or(self.table),
            granularity: over.granularity.or(self.granularity),
            show_config: over.show_config.or(self.show_config),
            timestamp: over.timestamp.or(self.timestamp),
        }
    }
}
