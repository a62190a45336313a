//! The single structured document every subcommand emits: JSON on stdout,
//! plus a human-readable table on stderr when stderr is a terminal.

use std::collections::BTreeMap;
use std::io::IsTerminal;

use nilcone::{CheckResult, CheckStatus};
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Counts are decimal strings and probabilities "num/den" strings, never
/// floats, so every numeric field round-trips exactly. The only floats are
/// the per-check wall times.
#[derive(Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub results: Map<String, Value>,
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> RunReport {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            parameters: BTreeMap::new(),
            results: Map::new(),
            checks: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    /// Exact values go in as strings; flags and nested objects as values.
    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn emit(&self) {
        println!(
            "{}",
            serde_json::to_string_pretty(self).expect("report serialization cannot fail")
        );
        if std::io::stderr().is_terminal() {
            self.emit_table();
        }
    }

    fn emit_table(&self) {
        eprintln!("== {} ==", self.command);
        if !self.parameters.is_empty() {
            let params: Vec<String> = self
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            eprintln!("   {}", params.join("  "));
        }
        for (k, v) in &self.results {
            match v {
                Value::String(s) => eprintln!("   {k:<24} {s}"),
                other => eprintln!("   {k:<24} {other}"),
            }
        }
        for c in &self.checks {
            let mark = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
            };
            eprintln!("   [{mark}] {:<44} {:.3}s", c.name, c.seconds);
            if let Some(ce) = &c.counterexample {
                eprintln!("          counterexample: {ce}");
            }
        }
    }
}
