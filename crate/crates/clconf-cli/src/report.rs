//! Structured, deterministic verification reports. Except for `elapsed_ms`,
//! two runs over the same configuration produce byte-identical JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub check: String,
    pub instance: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub window: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_window: Option<i64>,
    pub records: Vec<Record>,
    /// Command-specific deterministic output (recovered parameters,
    /// classification tags, kernel dimensions, …).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<BTreeMap<String, String>>,
    pub summary: Summary,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn new(command: &str, window: i64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            window,
            index_window: None,
            records: Vec::new(),
            result: None,
            summary: Summary {
                total: 0,
                passed: 0,
                failed: 0,
            },
            elapsed_ms: 0,
        }
    }

    pub fn push(&mut self, check: &str, instance: String, witness: Option<String>) {
        self.records.push(Record {
            check: check.to_string(),
            instance,
            pass: witness.is_none(),
            witness,
        });
    }

    pub fn set_result(&mut self, key: &str, value: String) {
        self.result
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_string(), value);
    }

    pub fn finalize(&mut self, elapsed_ms: u128) {
        let passed = self.records.iter().filter(|r| r.pass).count();
        self.summary = Summary {
            total: self.records.len(),
            passed,
            failed: self.records.len() - passed,
        };
        self.elapsed_ms = elapsed_ms;
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .expect("report serialization cannot fail")
            + "\n";
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| {
                CliError::Config(format!("cannot write report to {}: {e}", path.display()))
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}
