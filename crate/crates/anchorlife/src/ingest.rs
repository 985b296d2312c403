//! Parsing, validation, and normalization of specimen test records.
//!
//! Units are fixed at s / mm / N / degrees C in all files; nothing is
//! inferred. Samples travel as CSV (`time_s,displacement_mm`), campaign
//! metadata as a JSON manifest. Displacement is allowed to dip (sensor
//! noise); monotonicity is only enforced on time.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum record length accepted for any kinetics operation.
pub const MIN_SAMPLES: usize = 8;

pub const CSV_HEADER: &str = "time_s,displacement_mm";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    MissingFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest {path} is not valid JSON: {message}")]
    BadManifest { path: PathBuf, message: String },
    #[error("expected header `{CSV_HEADER}`, found `{found}`")]
    BadHeader { found: String },
    #[error("row {row}: cell `{cell}` is not a number")]
    MalformedRow { row: usize, cell: String },
    #[error("row {row}: time does not increase")]
    NonMonotonicTime { row: usize },
    #[error("row {row}: negative {what}")]
    NegativeValue { row: usize, what: &'static str },
    #[error("too few samples: {found} (need at least {required})")]
    TooFewSamples { found: usize, required: usize },
    #[error("{field} must be positive, got {value}")]
    NonPositiveMeta { field: &'static str, value: f64 },
    #[error(
        "load_level {declared} disagrees with sustained_load / pullout_reference = {computed}"
    )]
    LoadLevelMismatch { declared: f64, computed: f64 },
    #[error("load level {0} outside (0, 1]")]
    LoadLevelOutOfRange(f64),
    #[error("failure_displacement_mm given but failed = false")]
    FailureDisplacementWithoutFailure,
    #[error("specimen {specimen_id}: {source}")]
    Specimen {
        specimen_id: String,
        #[source]
        source: Box<IngestError>,
    },
}

impl IngestError {
    fn for_specimen(self, id: &str) -> IngestError {
        IngestError::Specimen {
            specimen_id: id.to_string(),
            source: Box::new(self),
        }
    }
}

/// Anchor and test metadata for one specimen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecimenMeta {
    pub specimen_id: String,
    pub adhesive_id: String,
    pub anchor_radius_mm: f64,
    pub embedment_depth_mm: f64,
    pub sustained_load_n: f64,
    pub pullout_reference_n: f64,
    pub temperature_c: f64,
    /// Sustained load as a fraction of the short-term pull-out capacity.
    pub load_level: f64,
}

impl SpecimenMeta {
    /// Validate positivity and the load-level identity. `declared_level`
    /// is checked against `sustained / pullout` to 1e-9 relative when the
    /// manifest carries one; otherwise the ratio is adopted.
    pub fn new(
        specimen_id: String,
        adhesive_id: String,
        anchor_radius_mm: f64,
        embedment_depth_mm: f64,
        sustained_load_n: f64,
        pullout_reference_n: f64,
        temperature_c: f64,
        declared_level: Option<f64>,
    ) -> Result<SpecimenMeta, IngestError> {
        for (field, value) in [
            ("anchor_radius_mm", anchor_radius_mm),
            ("embedment_depth_mm", embedment_depth_mm),
            ("sustained_load_n", sustained_load_n),
            ("pullout_reference_n", pullout_reference_n),
        ] {
            if !(value > 0.0) {
                return Err(IngestError::NonPositiveMeta { field, value });
            }
        }
        let computed = sustained_load_n / pullout_reference_n;
        if let Some(declared) = declared_level {
            if (declared - computed).abs() > 1e-9 * computed.abs() {
                return Err(IngestError::LoadLevelMismatch {
                    declared,
                    computed,
                });
            }
        }
        if !(computed > 0.0 && computed <= 1.0) {
            return Err(IngestError::LoadLevelOutOfRange(computed));
        }
        Ok(SpecimenMeta {
            specimen_id,
            adhesive_id,
            anchor_radius_mm,
            embedment_depth_mm,
            sustained_load_n,
            pullout_reference_n,
            temperature_c,
            load_level: computed,
        })
    }
}

/// One recorded sample of the displacement history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time_s: f64,
    pub displacement_mm: f64,
}

/// One specimen's time-displacement record plus metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementSeries {
    pub meta: SpecimenMeta,
    pub samples: Vec<Sample>,
    pub failed: bool,
    pub failure_displacement_mm: Option<f64>,
}

impl DisplacementSeries {
    pub fn new(
        meta: SpecimenMeta,
        samples: Vec<Sample>,
        failed: bool,
        failure_displacement_mm: Option<f64>,
    ) -> Result<DisplacementSeries, IngestError> {
        if failure_displacement_mm.is_some() && !failed {
            return Err(IngestError::FailureDisplacementWithoutFailure);
        }
        validate_samples(&samples)?;
        Ok(DisplacementSeries {
            meta,
            samples,
            failed,
            failure_displacement_mm,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        self.samples.last().map(|s| s.time_s).unwrap_or(0.0)
    }

    /// Failure strain `delta_f / h_ef` when a failure displacement exists.
    pub fn failure_strain(&self) -> Option<f64> {
        self.failure_displacement_mm
            .map(|d| d / self.meta.embedment_depth_mm)
    }

    /// Render the samples back to CSV. The float formatting is the
    /// shortest round-trip representation, so parsing the output yields
    /// bitwise-identical values.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 * self.samples.len() + CSV_HEADER.len() + 1);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.time_s, s.displacement_mm));
        }
        out
    }
}

fn validate_samples(samples: &[Sample]) -> Result<(), IngestError> {
    if samples.len() < MIN_SAMPLES {
        return Err(IngestError::TooFewSamples {
            found: samples.len(),
            required: MIN_SAMPLES,
        });
    }
    for (i, s) in samples.iter().enumerate() {
        if i == 0 && s.time_s < 0.0 {
            return Err(IngestError::NegativeValue { row: 1, what: "time" });
        }
        if s.displacement_mm < 0.0 {
            return Err(IngestError::NegativeValue {
                row: i + 1,
                what: "displacement",
            });
        }
        if i > 0 && s.time_s <= samples[i - 1].time_s {
            return Err(IngestError::NonMonotonicTime { row: i + 1 });
        }
    }
    Ok(())
}

/// Parse the two-column CSV body of one specimen record. Row indices in
/// errors are 1-based and count data rows, not the header.
pub fn parse_series(csv_text: &str, meta: SpecimenMeta) -> Result<DisplacementSeries, IngestError> {
    parse_series_with_flags(csv_text, meta, false, None)
}

/// As [`parse_series`], carrying the failure flags from the manifest.
pub fn parse_series_with_flags(
    csv_text: &str,
    meta: SpecimenMeta,
    failed: bool,
    failure_displacement_mm: Option<f64>,
) -> Result<DisplacementSeries, IngestError> {
    let mut lines = csv_text.lines();
    let header = lines.next().unwrap_or("").trim_end_matches('\r');
    if header != CSV_HEADER {
        return Err(IngestError::BadHeader {
            found: header.to_string(),
        });
    }
    let mut samples = Vec::new();
    let mut row = 0usize;
    for line in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        row += 1;
        let mut cells = line.split(',');
        let time_s = parse_cell(cells.next(), row)?;
        let displacement_mm = parse_cell(cells.next(), row)?;
        if cells.next().is_some() {
            return Err(IngestError::MalformedRow {
                row,
                cell: line.to_string(),
            });
        }
        samples.push(Sample {
            time_s,
            displacement_mm,
        });
    }
    DisplacementSeries::new(meta, samples, failed, failure_displacement_mm)
}

fn parse_cell(cell: Option<&str>, row: usize) -> Result<f64, IngestError> {
    let raw = cell.unwrap_or("").trim();
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| IngestError::MalformedRow {
            row,
            cell: raw.to_string(),
        })
}

/// One manifest line; field names fix the on-disk schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub specimen_id: String,
    pub adhesive_id: String,
    pub csv_path: String,
    pub anchor_radius_mm: f64,
    pub embedment_depth_mm: f64,
    pub sustained_load_n: f64,
    pub pullout_reference_n: f64,
    pub temperature_c: f64,
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_displacement_mm: Option<f64>,
    /// Optional; when present it must agree with the load ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_level: Option<f64>,
}

impl ManifestEntry {
    pub fn to_meta(&self) -> Result<SpecimenMeta, IngestError> {
        SpecimenMeta::new(
            self.specimen_id.clone(),
            self.adhesive_id.clone(),
            self.anchor_radius_mm,
            self.embedment_depth_mm,
            self.sustained_load_n,
            self.pullout_reference_n,
            self.temperature_c,
            self.load_level,
        )
        .map_err(|e| e.for_specimen(&self.specimen_id))
    }
}

/// Read and deserialize a manifest without touching the CSV files.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::MissingFile {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| IngestError::BadManifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Load every specimen listed in a manifest. CSV paths are resolved
/// relative to the manifest's directory. The first failing specimen
/// aborts the load with its id attached.
pub fn load_campaign(manifest_path: &Path) -> Result<Vec<DisplacementSeries>, IngestError> {
    let entries = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut series = Vec::with_capacity(entries.len());
    for entry in &entries {
        let meta = entry.to_meta()?;
        let csv_path = base.join(&entry.csv_path);
        let text = fs::read_to_string(&csv_path).map_err(|source| {
            IngestError::MissingFile {
                path: csv_path.clone(),
                source,
            }
            .for_specimen(&entry.specimen_id)
        })?;
        let s = parse_series_with_flags(&text, meta, entry.failed, entry.failure_displacement_mm)
            .map_err(|e| e.for_specimen(&entry.specimen_id))?;
        series.push(s);
    }
    Ok(series)
}

/// Write a campaign (manifest + one CSV per specimen) into `dir`.
/// Returns the manifest path. The emitted files load back unchanged.
pub fn write_campaign(dir: &Path, series: &[DisplacementSeries]) -> Result<PathBuf, IngestError> {
    fs::create_dir_all(dir).map_err(|source| IngestError::MissingFile {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::with_capacity(series.len());
    for s in series {
        let csv_name = format!("{}.csv", s.meta.specimen_id);
        let csv_path = dir.join(&csv_name);
        fs::write(&csv_path, s.to_csv()).map_err(|source| IngestError::MissingFile {
            path: csv_path.clone(),
            source,
        })?;
        entries.push(ManifestEntry {
            specimen_id: s.meta.specimen_id.clone(),
            adhesive_id: s.meta.adhesive_id.clone(),
            csv_path: csv_name,
            anchor_radius_mm: s.meta.anchor_radius_mm,
            embedment_depth_mm: s.meta.embedment_depth_mm,
            sustained_load_n: s.meta.sustained_load_n,
            pullout_reference_n: s.meta.pullout_reference_n,
            temperature_c: s.meta.temperature_c,
            failed: s.failed,
            failure_displacement_mm: s.failure_displacement_mm,
            load_level: Some(s.meta.load_level),
        });
    }
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&entries).expect("manifest serializes");
    fs::write(&manifest_path, text).map_err(|source| IngestError::MissingFile {
        path: manifest_path.clone(),
        source,
    })?;
    Ok(manifest_path)
}
