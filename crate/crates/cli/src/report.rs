//! Experiment reports: named pass/fail checks plus free-form metadata, so CI
//! can parse verdicts and the manifest can embed them.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub checks: Vec<Check>,
    pub metadata: serde_json::Value,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            checks: Vec::new(),
            metadata: serde_json::Value::Null,
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check::new(name, pass, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn print(&self) {
        for c in &self.checks {
            println!(
                "[{}] {} {}: {}",
                self.experiment,
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        println!(
            "[{}] overall: {}",
            self.experiment,
            if self.passed() { "PASS" } else { "FAIL" }
        );
    }
}
