//! Machine-readable report schema shared by the library checks and the CLI.
//!
//! Every numeric value in a report is an exact rational string; decimal
//! values appear only in fields explicitly named `display`. Reports are
//! deterministic for a fixed configuration: the only nondeterministic field
//! is `timing`, which consumers zero out before byte comparison.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const SCHEMA_VERSION: &str = "1";

/// Declared range of validity of a decision made on a lazy space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    /// Tail handled symbolically; the statement covers the whole space.
    Exact,
    /// Verified on the realized prefix only.
    PrefixOnly { blocks: u32 },
}

impl Scope {
    pub fn and(self, other: Scope) -> Scope {
        match (self, other) {
            (Scope::Exact, Scope::Exact) => Scope::Exact,
            (Scope::PrefixOnly { blocks }, Scope::Exact) => Scope::PrefixOnly { blocks },
            (Scope::Exact, Scope::PrefixOnly { blocks }) => Scope::PrefixOnly { blocks },
            (Scope::PrefixOnly { blocks: a }, Scope::PrefixOnly { blocks: b }) => {
                Scope::PrefixOnly { blocks: a.min(b) }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scope::Exact)
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Exact => write!(f, "exact (tail rule handled symbolically)"),
            Scope::PrefixOnly { blocks } => write!(f, "prefix-only (first {blocks} blocks)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    PrefixOnly,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "fail"),
            Status::NotApplicable => write!(f, "not-applicable"),
            Status::PrefixOnly => write!(f, "prefix-only"),
        }
    }
}

/// One verified statement inside a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// A failing status is the documented outcome when set (counterexample
    /// gap checks); the run still exits cleanly.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub expected_fail: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Exact rational values keyed by name ("p/q" strings).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    /// Witness data: assignments, scalings, weights, facet indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Check {
            name: name.into(),
            status,
            expected_fail: false,
            scope: None,
            seed: None,
            values: BTreeMap::new(),
            witness: None,
            note: None,
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Self::new(name, Status::Pass)
    }

    pub fn fail(name: impl Into<String>) -> Self {
        Self::new(name, Status::Fail)
    }

    pub fn of_bool(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn expected_fail(mut self) -> Self {
        self.expected_fail = true;
        self
    }

    pub fn with_scope(mut self, scope: Scope) -> Self {
        self.scope = Some(scope.to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_value(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.values.insert(key.into(), value.to_string());
        self
    }

    pub fn with_witness(mut self, witness: serde_json::Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A check is in order when it passed, or failed exactly as documented.
    pub fn is_ok(&self) -> bool {
        match self.status {
            Status::Pass | Status::NotApplicable | Status::PrefixOnly => !self.expected_fail,
            Status::Fail => self.expected_fail,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Versions {
    pub schema: String,
    pub crate_version: String,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            schema: SCHEMA_VERSION.to_string(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub versions: Versions,
    pub timing: Timing,
}

impl Report {
    pub fn new(scenario: impl Into<String>) -> Self {
        Report {
            scenario: scenario.into(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            versions: Versions::default(),
            timing: Timing::default(),
        }
    }

    pub fn set_parameter(&mut self, key: impl Into<String>, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Deterministic ordering: checks sorted by name before emission.
    pub fn finalize(&mut self, elapsed_seconds: f64) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.timing.seconds = format!("{elapsed_seconds:.6}");
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(Check::is_ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Byte-stable form for golden comparisons: timing zeroed.
    pub fn to_json_normalized(&self) -> String {
        let mut clone = self.clone();
        clone.timing.seconds = "0".to_string();
        clone.to_json()
    }

    /// One human line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let marker = if c.is_ok() { "ok " } else { "BAD" };
            let expected = if c.expected_fail { " (expected-fail)" } else { "" };
            out.push_str(&format!("[{marker}] {:<52} {}{}\n", c.name, c.status, expected));
        }
        let verdict = if self.all_ok() { "ALL CHECKS IN ORDER" } else { "CHECKS OUT OF ORDER" };
        out.push_str(&format!("{}: {} checks, {}\n", self.scenario, self.checks.len(), verdict));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_reports_are_stable() {
        let mut r1 = Report::new("demo");
        r1.set_parameter("seed", 42u64);
        r1.push(Check::pass("b_second").with_value("bound", "1/8"));
        r1.push(Check::fail("a_first").expected_fail());
        r1.finalize(1.25);

        let mut r2 = Report::new("demo");
        r2.set_parameter("seed", 42u64);
        r2.push(Check::fail("a_first").expected_fail());
        r2.push(Check::pass("b_second").with_value("bound", "1/8"));
        r2.finalize(99.0);

        assert_eq!(r1.to_json_normalized(), r2.to_json_normalized());
        assert!(r1.all_ok());
        assert_eq!(r1.checks[0].name, "a_first");
    }

    #[test]
    fn scope_combination() {
        let p = Scope::PrefixOnly { blocks: 4 };
        assert_eq!(Scope::Exact.and(p), p);
        assert!(Scope::Exact.and(Scope::Exact).is_exact());
    }
}
