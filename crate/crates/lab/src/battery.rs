//! Battery directories.
//!
//! ```text
//! <dir>/manifest.toml    format, trace format, label, digest, run count,
//!                        warnings, and the canonical config under [config]
//! <dir>/summary.csv      one row per run
//! <dir>/run-0000.trace   one trace per run
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cellsort_core::experiments::{
    execute_run, plan_run, report_from_trace, BatterySummary, ExperimentConfig, RunReport,
};
use cellsort_core::probe::{TraceRecord, FORMAT_VERSION};
use rayon::prelude::*;
use toml::{Table, Value};

use crate::config::{canonical_text, config_digest, config_from_table};
use crate::error::LabError;
use crate::summary::{read_summary, write_summary, SummaryRow};
use crate::trace::{load_trace, TraceWriter};

pub const MANIFEST: &str = "manifest.toml";
pub const SUMMARY: &str = "summary.csv";
const MANIFEST_FORMAT: i64 = 1;

pub fn trace_file_name(run: usize) -> String {
    format!("run-{run:04}.trace")
}

fn is_trace_file(name: &str) -> bool {
    name.starts_with("run-") && name.ends_with(".trace")
}

/// A battery that has just run, or been rebuilt from its traces.
#[derive(Clone, Debug)]
pub struct Battery {
    pub config: ExperimentConfig,
    pub digest: String,
    pub summary: BatterySummary,
}

impl Battery {
    pub fn rows(&self) -> Vec<SummaryRow> {
        self.summary.reports.iter().map(|r| SummaryRow::new(&self.config, r)).collect()
    }
}

fn run_one(config: &ExperimentConfig, digest: &str, dir: &Path, index: usize) -> Result<RunReport, LabError> {
    let plan = plan_run(config, index)?;
    let path = dir.join(trace_file_name(index));
    let writer = TraceWriter::create(&path).map_err(|e| LabError::io(&path, e))?;
    let trace_err = |source| LabError::Trace {
        path: path.clone(),
        source,
    };
    let (report, writer) = execute_run(config, plan, digest, writer).map_err(trace_err)?;
    writer.finish().map_err(trace_err)?;
    Ok(report)
}

/// Run every replicate in parallel and write the battery directory. Old
/// run files in `dir` are removed first, so the directory always matches
/// the config exactly.
pub fn run_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<Battery, LabError> {
    config.validate()?;
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    for entry in fs::read_dir(dir).map_err(|e| LabError::io(dir, e))? {
        let entry = entry.map_err(|e| LabError::io(dir, e))?;
        if entry.file_name().to_str().is_some_and(is_trace_file) {
            fs::remove_file(entry.path()).map_err(|e| LabError::io(entry.path(), e))?;
        }
    }
    let digest = config_digest(config);
    let reports = (0..config.reps)
        .into_par_iter()
        .map(|i| run_one(config, &digest, dir, i))
        .collect::<Result<Vec<_>, _>>()?;
    let battery = Battery {
        config: config.clone(),
        digest,
        summary: BatterySummary::from_reports(config, reports),
    };
    write_summary(&dir.join(SUMMARY), &battery.rows())?;
    let manifest = dir.join(MANIFEST);
    fs::write(&manifest, manifest_text(&battery)).map_err(|e| LabError::io(&manifest, e))?;
    Ok(battery)
}

fn manifest_text(b: &Battery) -> String {
    let warnings = Value::Array(b.summary.warnings.iter().map(|w| Value::String(w.clone())).collect());
    let mut out = String::new();
    writeln!(out, "format = {MANIFEST_FORMAT}").unwrap();
    writeln!(out, "trace_format = {}", Value::String(FORMAT_VERSION.to_owned())).unwrap();
    writeln!(out, "label = {}", Value::String(b.summary.label.clone())).unwrap();
    writeln!(out, "config_digest = {}", Value::String(b.digest.clone())).unwrap();
    writeln!(out, "runs = {}", b.config.reps).unwrap();
    writeln!(out, "warnings = {warnings}").unwrap();
    writeln!(out, "\n[config]").unwrap();
    out.push_str(&canonical_text(&b.config));
    out
}

/// What a battery directory says about itself.
#[derive(Clone, Debug)]
pub struct Manifest {
    pub dir: PathBuf,
    pub config: ExperimentConfig,
    pub digest: String,
    pub label: String,
    pub warnings: Vec<String>,
}

fn inconsistent(path: &Path, message: impl Into<String>) -> LabError {
    LabError::Inconsistent {
        path: path.to_owned(),
        message: message.into(),
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, LabError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
    let mut table: Table = toml::from_str(&text).map_err(|e| inconsistent(&path, format!("not valid TOML: {e}")))?;
    let mut field = |key: &str| table.remove(key).ok_or_else(|| inconsistent(&path, format!("missing {key}")));
    if field("format")?.as_integer() != Some(MANIFEST_FORMAT) {
        return Err(inconsistent(&path, "unsupported manifest format"));
    }
    let string = |v: Value, key: &str| match v {
        Value::String(s) => Ok(s),
        _ => Err(inconsistent(&path, format!("{key} must be a string"))),
    };
    if string(field("trace_format")?, "trace_format")? != FORMAT_VERSION {
        return Err(inconsistent(&path, "traces were written in an unsupported format"));
    }
    let label = string(field("label")?, "label")?;
    let digest = string(field("config_digest")?, "config_digest")?;
    let runs = field("runs")?.as_integer();
    let warnings = match field("warnings")? {
        Value::Array(a) => a
            .into_iter()
            .map(|w| string(w, "warnings"))
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(inconsistent(&path, "warnings must be an array")),
    };
    let Value::Table(config) = field("config")? else {
        return Err(inconsistent(&path, "config must be a table"));
    };
    let config = config_from_table(config)?;
    if config_digest(&config) != digest {
        return Err(inconsistent(&path, "config digest does not match the stored config"));
    }
    if runs != Some(config.reps as i64) {
        return Err(inconsistent(&path, "run count does not match config reps"));
    }
    Ok(Manifest {
        dir: dir.to_owned(),
        config,
        digest,
        label,
        warnings,
    })
}

/// Manifest plus the summary table, without touching the traces.
pub fn load_summary(dir: &Path) -> Result<(Manifest, Vec<SummaryRow>), LabError> {
    let manifest = read_manifest(dir)?;
    let path = dir.join(SUMMARY);
    let rows = read_summary(&path)?;
    if rows.len() != manifest.config.reps {
        return Err(inconsistent(
            &path,
            format!("{} rows for {} runs", rows.len(), manifest.config.reps),
        ));
    }
    Ok((manifest, rows))
}

/// Load one run's trace and check it belongs to the battery.
pub fn load_run(manifest: &Manifest, run: usize) -> Result<Vec<TraceRecord>, LabError> {
    let path = manifest.dir.join(trace_file_name(run));
    let records = load_trace(&path).map_err(|source| LabError::Trace {
        path: path.clone(),
        source,
    })?;
    match records.first() {
        Some(TraceRecord::Header(h)) if h.config_digest == manifest.digest => Ok(records),
        _ => Err(inconsistent(&path, "trace header digest does not match the manifest")),
    }
}

/// Rebuild a battery from its traces alone. Every trace is replayed and
/// checked. `config` overrides the stored config's report settings (for
/// example a different counting convention); it must describe the same
/// runs.
pub fn rebuild(manifest: &Manifest, config: &ExperimentConfig) -> Result<Battery, LabError> {
    let settings = config.report_settings();
    let reports = (0..config.reps)
        .into_par_iter()
        .map(|i| {
            let records = load_run(manifest, i)?;
            report_from_trace(&records, i, settings).map_err(|e| {
                inconsistent(&manifest.dir.join(trace_file_name(i)), format!("replay failed: {e}"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Battery {
        config: config.clone(),
        digest: manifest.digest.clone(),
        summary: BatterySummary::from_reports(config, reports),
    })
}

pub fn load_battery(dir: &Path) -> Result<Battery, LabError> {
    let manifest = read_manifest(dir)?;
    let config = manifest.config.clone();
    rebuild(&manifest, &config)
}
