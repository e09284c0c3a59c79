//! The JSON report shared by all subcommands.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Counts and outputs of a passing check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    /// The counterexample behind a failing check, or the constructed object.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail: None,
            witness: None,
        }
    }

    pub fn detail(mut self, detail: impl Serialize) -> Self {
        self.detail = Some(serde_json::to_value(detail).expect("serializable detail"));
        self
    }

    pub fn witness(mut self, witness: impl Serialize) -> Self {
        self.witness = Some(serde_json::to_value(witness).expect("serializable witness"));
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub budgets: BTreeMap<String, u64>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl RunReport {
    /// Sorts checks by name so output bytes never depend on evaluation order.
    pub fn new(
        command: String,
        seed: u64,
        budgets: BTreeMap<String, u64>,
        mut checks: Vec<Check>,
    ) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        RunReport {
            command,
            seed,
            budgets,
            checks,
            elapsed_ms: None,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::is_pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.is_pass() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {}\n", c.name));
        }
        let fails = self.checks.iter().filter(|c| !c.is_pass()).count();
        out.push_str(&format!("{} checks, {fails} failed\n", self.checks.len()));
        out
    }
}
