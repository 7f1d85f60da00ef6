//! JSON run configuration.
//!
//! ```json
//! {
//!   "experiment": "uncertainty",
//!   "parameters": { "n": 512, "sigmas": [0.5, 1.0] },
//!   "output_dir": "results",
//!   "format": "csv"
//! }
//! ```
//!
//! `experiment` and `parameters` are required; every parameter has a default,
//! so `"parameters": {}` runs the experiment at desk scale. Unknown keys are
//! rejected at every level.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::experiments::Params;

pub const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    GprobBorn,
    Uncertainty,
    KernelConsistency,
    PacketSpread,
    StationaryStates,
    Ehrenfest,
    PropagatorCompare,
    LeastAction,
    KgModes,
    MaxwellModes,
    ProcaModes,
    FieldCcr,
    FermiOscillator,
    DiracModes,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 14] = [
        Self::GprobBorn,
        Self::Uncertainty,
        Self::KernelConsistency,
        Self::PacketSpread,
        Self::StationaryStates,
        Self::Ehrenfest,
        Self::PropagatorCompare,
        Self::LeastAction,
        Self::KgModes,
        Self::MaxwellModes,
        Self::ProcaModes,
        Self::FieldCcr,
        Self::FermiOscillator,
        Self::DiracModes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::GprobBorn => "gprob-born",
            Self::Uncertainty => "uncertainty",
            Self::KernelConsistency => "kernel-consistency",
            Self::PacketSpread => "packet-spread",
            Self::StationaryStates => "stationary-states",
            Self::Ehrenfest => "ehrenfest",
            Self::PropagatorCompare => "propagator-compare",
            Self::LeastAction => "least-action",
            Self::KgModes => "kg-modes",
            Self::MaxwellModes => "maxwell-modes",
            Self::ProcaModes => "proca-modes",
            Self::FieldCcr => "field-ccr",
            Self::FermiOscillator => "fermi-oscillator",
            Self::DiracModes => "dirac-modes",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Self::GprobBorn => "amplitude chain algebra, Born weights and pair-space measures",
            Self::Uncertainty => "position/momentum spreads of Gaussian packets against hbar/2",
            Self::KernelConsistency => "transition-kernel evolution vs its effective Schrodinger equation",
            Self::PacketSpread => "free Gaussian width law, long-run norm drift and time reversal",
            Self::StationaryStates => "harmonic oscillator levels from the grid Hamiltonian",
            Self::Ehrenfest => "d<p>/dt = -<R'> over one harmonic period",
            Self::PropagatorCompare => "time-sliced propagator vs analytic free kernel, semigroup defect",
            Self::LeastAction => "discrete stationary action vs closed forms, phase vs S/hbar",
            Self::KgModes => "Klein-Gordon modes: ladder algebra, spectrum, Heisenberg motion",
            Self::MaxwellModes => "transverse photon modes: polarizations and ladder algebra",
            Self::ProcaModes => "massive vector modes: three polarizations and ladder algebra",
            Self::FieldCcr => "equal-time field commutators on a small lattice",
            Self::FermiOscillator => "Grassmann oscillator: ladder anticommutators, spectrum, EOM",
            Self::DiracModes => "Dirac mode Hamiltonian spectrum vs tensor sum of labels",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment: ExperimentName,
    pub params: Params,
    pub output_dir: PathBuf,
    pub format: Format,
}

/// Schema or range problem in a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// JSON path of the offending value, when known.
    pub path: Option<String>,
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.path {
            write!(f, "{p}: ")?;
        }
        f.write_str(&self.message)?;
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, " (line {l}, column {c})")?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig<'a> {
    experiment: ExperimentName,
    #[serde(borrow)]
    parameters: &'a RawValue,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    format: Option<Format>,
}

fn from_json_error(path: String, inner: serde_json::Error, prefix: &str, origin: (usize, usize)) -> ConfigError {
    let (line, column) = match (inner.line(), inner.column()) {
        (0, _) => (None, None),
        (1, c) => (Some(origin.0), Some(origin.1 + c.saturating_sub(1))),
        (l, c) => (Some(origin.0 + l - 1), Some(c)),
    };
    let path = match (prefix.is_empty(), path == ".") {
        (true, true) => None,
        (true, false) => Some(path),
        (false, true) => Some(prefix.to_string()),
        (false, false) => Some(format!("{prefix}.{path}")),
    };
    // serde_json appends its own position to the message
    let mut message = inner.to_string();
    if let Some(cut) = message.rfind(" at line ") {
        message.truncate(cut);
    }
    ConfigError {
        path,
        message,
        line,
        column,
    }
}

fn traced(e: serde_path_to_error::Error<serde_json::Error>, prefix: &str, origin: (usize, usize)) -> ConfigError {
    let path = e.path().to_string();
    from_json_error(path, e.into_inner(), prefix, origin)
}

/// 1-based line and column of byte `offset` in `text`.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, col)
}

/// Parse and range-check a config without running any numerics.
pub fn parse(text: &str) -> Result<Config, Vec<ConfigError>> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| vec![traced(e, "", (1, 1))])?;
    de.end().map_err(|e| vec![from_json_error(".".into(), e, "", (1, 1))])?;

    let offset = raw.parameters.get().as_ptr() as usize - text.as_ptr() as usize;
    let origin = position(text, offset);
    let params =
        Params::parse(raw.experiment, raw.parameters.get()).map_err(|e| vec![traced(e, "parameters", origin)])?;

    let issues: Vec<ConfigError> = params
        .check()
        .into_iter()
        .map(|(key, message)| ConfigError {
            path: Some(format!("parameters.{key}")),
            message,
            line: None,
            column: None,
        })
        .collect();
    if !issues.is_empty() {
        return Err(issues);
    }
    Ok(Config {
        experiment: raw.experiment,
        params,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        format: raw.format.unwrap_or_default(),
    })
}

/// Collects range violations as `(key, message)` pairs.
#[derive(Debug, Default)]
pub struct Issues(pub Vec<(String, String)>);

impl Issues {
    pub fn positive(&mut self, key: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.0
                .push((key.into(), format!("must be positive and finite, got {v}")));
        }
    }

    pub fn finite(&mut self, key: &str, v: f64) {
        if !v.is_finite() {
            self.0.push((key.into(), format!("must be finite, got {v}")));
        }
    }

    pub fn within<T: PartialOrd + fmt::Display + Copy>(&mut self, key: &str, v: T, lo: T, hi: T) {
        if !(v >= lo && v <= hi) {
            self.0.push((key.into(), format!("must lie in [{lo}, {hi}], got {v}")));
        }
    }

    pub fn non_empty<T>(&mut self, key: &str, v: &[T]) {
        if v.is_empty() {
            self.0.push((key.into(), "must not be empty".into()));
        }
    }

    pub fn fail(&mut self, key: &str, message: impl Into<String>) {
        self.0.push((key.into(), message.into()));
    }
}
