//! Serialization of sweep results: CSV records, a JSON report with its run
//! manifest, SVG bar charts and a plain-text match table.

mod csv_io;
mod svg;
mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuits::AnsatzConfig;
use crate::error::{Error, Result};
use crate::market::SyntheticParams;
use crate::solvers::OptimizerOptions;
use crate::sweep::{Algorithm, SweepReport};

pub use csv_io::{read_records_csv, write_records_csv, CSV_HEADER};
pub use svg::{render_svg, SvgOptions};
pub use table::render_table;

/// Everything needed to regenerate a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// RFC 3339; not part of the reproducibility contract.
    pub timestamp: String,
    /// Price file, when one was used.
    pub prices: Option<PathBuf>,
    /// Generator settings, when prices were synthesized instead.
    pub synthetic: Option<SyntheticParams>,
    /// Leading columns kept from the price data.
    pub assets: Option<usize>,
    pub tickers: Vec<String>,
    pub budget: usize,
    pub penalty: Option<f64>,
    pub risks: Vec<f64>,
    pub configs: Vec<String>,
    pub algorithms: Vec<Algorithm>,
    pub base_seed: u64,
    pub optimizer: OptimizerOptions,
}

impl RunManifest {
    pub fn now() -> String {
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    }

    pub fn config_list(&self) -> Result<Vec<AnsatzConfig>> {
        self.configs.iter().map(|l| AnsatzConfig::from_label(l)).collect()
    }

    /// Equality ignoring the timestamp.
    pub fn same_run(&self, other: &RunManifest) -> bool {
        let mut a = self.clone();
        a.timestamp.clear();
        let mut b = other.clone();
        b.timestamp.clear();
        a == b
    }
}

/// On-disk JSON layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub manifest: RunManifest,
    #[serde(flatten)]
    pub report: SweepReport,
}

impl ReportFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Table,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Table => "txt",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            "table" | "txt" => Ok(Format::Table),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

/// Renders `file` in `format` as a string.
pub fn render(file: &ReportFile, format: Format) -> Result<String> {
    if file.report.records.is_empty() && file.report.errors.is_empty() {
        return Err(Error::EmptyReport);
    }
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_records_csv(&file.report.records, &mut buf)?;
            Ok(String::from_utf8(buf).expect("csv output is utf-8"))
        }
        Format::Json => file.to_json(),
        Format::Svg => Ok(render_svg(&file.report, &SvgOptions::default())),
        Format::Table => Ok(render_table(&file.report)),
    }
}

/// Writes `file` in `format` to `path`.
pub fn emit_report(file: &ReportFile, format: Format, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render(file, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
