//! Deterministic JSON run reports for the command-line tool.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// One command invocation: its name, the inputs it was given and its
/// results. Object keys serialize in sorted order, so equal inputs give
/// byte-identical reports. Wall-clock timing is deliberately not part of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub output: Value,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport { command: command.to_string(), inputs: BTreeMap::new(), output: Value::Null }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn with_output(mut self, output: impl Serialize) -> Self {
        self.output = to_value(output);
        self
    }

    /// Single-line JSON.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("reports are plain data")
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are plain data")
    }
}

pub fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("reports are plain data")
}
