//! JSON report documents.
//!
//! Schema (version 1):
//!
//! ```text
//! { "version": 1,
//!   "manifest": { "suites": [..], "config": {..}, "started_at": "..", "tool_version": ".." },
//!   "reports": [ { "suite", "seed", "dims", "samples", "tol", "epsilon_mix",
//!                  "worst_deficit", "worst_sample_index", "pass", "notes" } ] }
//! ```
//!
//! Floats are written with 17 significant digits, which round-trips every `f64`. JSON has no
//! infinities or NaN, so those are written as the strings `"Infinity"`, `"-Infinity"`, `"NaN"`.

use std::fs;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SampleConfig;
use crate::suites::find_suite;
use crate::verify::ConvexityReport;

pub const REPORT_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = concat!("qconvex ", env!("CARGO_PKG_VERSION"));

/// Serde adapter writing an `f64` with 17 significant digits.
pub mod float17 {
    use serde::de::{self, Deserializer};
    use serde::ser::{Error as _, Serializer};
    use serde::{Deserialize, Serialize};
    use serde_json::value::RawValue;

    pub fn format(x: f64) -> String {
        if x.is_nan() {
            "\"NaN\"".into()
        } else if x == f64::INFINITY {
            "\"Infinity\"".into()
        } else if x == f64::NEG_INFINITY {
            "\"-Infinity\"".into()
        } else {
            format!("{x:.16e}")
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        RawValue::from_string(format(*x))
            .map_err(S::Error::custom)?
            .serialize(s)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(s) => match s.as_str() {
                "NaN" => Ok(f64::NAN),
                "Infinity" => Ok(f64::INFINITY),
                "-Infinity" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

/// What was run, when, and with which tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub suites: Vec<String>,
    pub config: SampleConfig,
    /// RFC 3339 UTC timestamp.
    pub started_at: String,
    pub tool_version: String,
}

impl RunManifest {
    /// Fails with `UnknownSuite` for a name missing from the registry.
    pub fn new(suites: Vec<String>, config: SampleConfig, started_at: DateTime<Utc>) -> Result<Self> {
        for name in &suites {
            find_suite(name)?;
        }
        Ok(Self {
            suites,
            config,
            started_at: started_at.to_rfc3339_opts(SecondsFormat::Secs, true),
            tool_version: TOOL_VERSION.to_string(),
        })
    }
}

/// One suite result as stored in the document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub suite: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub samples: usize,
    #[serde(with = "float17")]
    pub tol: f64,
    #[serde(with = "float17")]
    pub epsilon_mix: f64,
    #[serde(with = "float17")]
    pub worst_deficit: f64,
    pub worst_sample_index: usize,
    pub pass: bool,
    pub notes: String,
}

impl From<&ConvexityReport> for ReportEntry {
    fn from(r: &ConvexityReport) -> Self {
        Self {
            suite: r.suite_name.clone(),
            seed: r.config.master_seed,
            dims: r.config.dims.clone(),
            samples: r.config.samples,
            tol: r.config.tol,
            epsilon_mix: r.epsilon_mix,
            worst_deficit: r.worst_deficit,
            worst_sample_index: r.worst_sample_index,
            pass: r.pass,
            notes: r.notes.clone(),
        }
    }
}

impl ReportEntry {
    /// Rebuilds the report; the eigenvalue floor is not part of an entry and is taken from
    /// `floor`.
    pub fn to_report(&self, floor: f64) -> ConvexityReport {
        ConvexityReport {
            suite_name: self.suite.clone(),
            config: SampleConfig {
                master_seed: self.seed,
                dims: self.dims.clone(),
                samples: self.samples,
                tol: self.tol,
                floor,
            },
            worst_deficit: self.worst_deficit,
            worst_sample_index: self.worst_sample_index,
            pass: self.pass,
            epsilon_mix: self.epsilon_mix,
            notes: self.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: u32,
    pub manifest: RunManifest,
    pub reports: Vec<ReportEntry>,
}

impl ReportDocument {
    pub fn new(manifest: RunManifest, reports: &[ConvexityReport]) -> Self {
        Self {
            version: REPORT_VERSION,
            manifest,
            reports: reports.iter().map(ReportEntry::from).collect(),
        }
    }

    /// The reports, with the floor of the manifest configuration.
    pub fn convexity_reports(&self) -> Vec<ConvexityReport> {
        self.reports
            .iter()
            .map(|e| e.to_report(self.manifest.config.floor))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(s)?;
        if doc.version != REPORT_VERSION {
            return Err(Error::Json(format!("unsupported report version {}", doc.version)));
        }
        Ok(doc)
    }
}

/// Writes the document for `reports` to `path`.
pub fn write_report(manifest: RunManifest, reports: &[ConvexityReport], path: &Path) -> Result<()> {
    let json = ReportDocument::new(manifest, reports).to_json()?;
    fs::write(path, json)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<ReportDocument> {
    ReportDocument::from_json(&fs::read_to_string(path)?)
}
