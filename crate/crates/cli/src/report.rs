use serde::Serialize;

/// One built-in assertion of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable condition, e.g. `< 1e-12`.
    pub condition: String,
    pub passed: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("< {limit:e}"),
            passed: value < limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!(">= {limit:e}"),
            passed: value >= limit,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            condition: "true".into(),
            passed: ok,
        }
    }
}

/// Deterministic record of one run. Wall time is reported on stderr only, so
/// identical configs produce identical report files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub parameters: serde_json::Value,
    pub files: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
