use crate::config::ConfigEcho;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

/// One check record; all numbers are exact strings.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    /// What is being compared, in words.
    pub anchor: String,
    /// The system and parameter point the check ran on.
    pub subject: String,
    pub status: Status,
    pub values: BTreeMap<String, String>,
}

impl Check {
    pub fn new(id: &str, anchor: &str, subject: &str, status: Status) -> Self {
        Check { id: id.into(), anchor: anchor.into(), subject: subject.into(), status, values: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.values.insert(key.into(), value.to_string());
        self
    }

    pub fn skip(id: &str, anchor: &str, subject: &str, reason: &str) -> Self {
        Check::new(id, anchor, subject, Status::Skip).with("reason", reason)
    }

    pub fn error(id: &str, anchor: &str, subject: &str, err: impl std::fmt::Display) -> Self {
        Check::new(id, anchor, subject, Status::Fail).with("error", err)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: ConfigEcho,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, config: ConfigEcho, checks: Vec<Check>) -> Self {
        Report { tool: "closurelab", version: env!("CARGO_PKG_VERSION"), command: command.into(), config, checks }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "{} {} {}: family={} D={} Y={} parameters={} mode={}",
            self.tool,
            self.version,
            self.command,
            c.family,
            if c.d.is_empty() { "{}" } else { &c.d },
            c.y,
            c.parameters,
            c.mode
        );
        for ch in &self.checks {
            let _ = write!(out, "{} {} [{}]", ch.status.tag(), ch.id, ch.subject);
            for (k, v) in &ch.values {
                let _ = write!(out, " {k}={v}");
            }
            out.push('\n');
        }
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        let _ = writeln!(out, "{} passed, {} failed, {} skipped", count(Status::Pass), count(Status::Fail), count(Status::Skip));
        out
    }
}
