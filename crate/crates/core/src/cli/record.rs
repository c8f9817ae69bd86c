use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

/// One machine-readable command result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<BTreeMap<String, Value>>,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            status: Status::Ok,
            residuals: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_owned(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.to_owned(), value.into());
    }

    pub fn residual(&mut self, key: &str, value: impl Into<Value>) {
        self.residuals
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_owned(), value.into());
    }

    /// Compact JSON with every object's keys in sorted order.
    pub fn to_json(&self) -> String {
        // Going through `Value` sorts struct fields too (its map is ordered).
        let value = serde_json::to_value(self).expect("record is serialisable");
        serde_json::to_string(&value).expect("value is serialisable")
    }
}
