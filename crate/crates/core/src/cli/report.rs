//! The JSON report every command emits. The layout is described by
//! `schema/report.schema.json`; bump [`SCHEMA_VERSION`] with it.

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

pub const SCHEMA_ID: &str = "padic-lab-report";
pub const SCHEMA_VERSION: &str = "1.0.0";

/// The schema itself, shipped with the crate.
pub const SCHEMA: &str = include_str!("../../schema/report.schema.json");

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckLine {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    CheckFailure,
    ConfigError,
    PrecisionExhausted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::CheckFailure => 1,
            Status::ConfigError => 2,
            Status::PrecisionExhausted => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub status: Status,
    pub checks: Vec<CheckLine>,
    /// Lost precision and similar conditions that did not stop the run.
    pub warnings: Vec<String>,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            schema: SCHEMA_ID,
            version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            status: Status::Pass,
            checks: Vec::new(),
            warnings: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckLine::new(name, pass, detail));
    }

    /// Status from the checks unless an error already set it.
    pub fn finish(mut self) -> Self {
        if self.status == Status::Pass && self.checks.iter().any(|c| !c.pass) {
            self.status = Status::CheckFailure;
        }
        self
    }

    pub fn from_error(command: &str, config: Value, e: &Error) -> Self {
        let mut r = Report::new(command, config);
        r.status = match e.exit_code() {
            1 => Status::CheckFailure,
            3 => Status::PrecisionExhausted,
            _ => Status::ConfigError,
        };
        r.data = serde_json::json!({ "error": e.to_string() });
        r
    }

    pub fn pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// One line per check and a closing verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: {}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        if let Some(e) = self.data.get("error") {
            out.push_str(&format!("error: {}\n", e.as_str().unwrap_or_default()));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        out.push_str(&format!(
            "{}: {passed}/{} checks, {:?}\n",
            self.command,
            self.checks.len(),
            self.status
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_names_the_current_version() {
        let schema: Value = serde_json::from_str(SCHEMA).unwrap();
        assert_eq!(schema["properties"]["version"]["const"], SCHEMA_VERSION);
        assert_eq!(schema["properties"]["schema"]["const"], SCHEMA_ID);
    }

    #[test]
    fn failing_check_sets_exit_code_one() {
        let mut r = Report::new("x", Value::Null);
        r.check("a", true, "");
        r.check("b", false, "");
        let r = r.finish();
        assert_eq!(r.status.exit_code(), 1);
        let e = Report::from_error("x", Value::Null, &Error::Precision("gone".into()));
        assert_eq!(e.status.exit_code(), 3);
    }

    #[test]
    fn report_keys_match_the_schema() {
        let schema: Value = serde_json::from_str(SCHEMA).unwrap();
        let r = serde_json::to_value(Report::new("x", Value::Null).finish()).unwrap();
        for key in schema["required"].as_array().unwrap() {
            assert!(r.get(key.as_str().unwrap()).is_some(), "{key}");
        }
        let statuses: Vec<&str> = schema["properties"]["status"]["enum"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap())
            .collect();
        assert!(statuses.contains(&r["status"].as_str().unwrap()));
    }
}
