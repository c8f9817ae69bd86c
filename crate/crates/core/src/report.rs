use std::collections::BTreeMap;

use serde::Serialize;

/// Outcome of one numerical identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Short machine name, e.g. `telescoping`.
    pub identity: String,
    /// The relation being checked, in plain notation.
    pub formula: String,
    /// Parameters of this check (θ, λ, ...), keyed by name.
    pub inputs: BTreeMap<String, f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl VerificationReport {
    /// Builds a report that passes iff `residual <= tolerance` (NaN fails).
    pub fn new(identity: &str, formula: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            identity: identity.to_owned(),
            formula: formula.to_owned(),
            inputs: BTreeMap::new(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            detail: None,
        }
    }

    pub fn with_input(mut self, name: &str, value: f64) -> Self {
        self.inputs.insert(name.to_owned(), value);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}
