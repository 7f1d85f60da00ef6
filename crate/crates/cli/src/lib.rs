//! Config-driven batch runner for the `dimech-core` experiments.

use std::fs;
use std::path::{Path, PathBuf};

pub mod config;
pub mod experiments;
pub mod report;
pub mod table;

use config::{Config, Format};
use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Numerics(#[from] dimech_core::Error),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Run one experiment and write its tables plus `<experiment>-report.json`
/// into `out_dir`. Nothing is written if the numerics fail.
pub fn run(cfg: &Config, out_dir: &Path, format: Format) -> Result<RunReport, RunError> {
    let outcome = cfg.params.run()?;
    let name = cfg.experiment.as_str();
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut files = Vec::with_capacity(outcome.tables.len() + 1);
    for t in &outcome.tables {
        let file = t.file_name(name, format);
        let path = out_dir.join(&file);
        t.write(&path, format).map_err(io_err(&path))?;
        files.push(file);
    }
    let report_file = format!("{name}-report.json");
    files.push(report_file.clone());
    let report = RunReport {
        experiment: name.to_string(),
        parameters: serde_json::to_value(&cfg.params).expect("parameters serialize"),
        files,
        passed: outcome.checks.iter().all(|c| c.passed),
        checks: outcome.checks,
    };
    let path = out_dir.join(report_file);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(report)
}
