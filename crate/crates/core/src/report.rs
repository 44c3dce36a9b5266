//! Report types shared by the verification suites.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    /// Passing iff there is no witness.
    pub fn new(name: &str, witness: Option<String>) -> Self {
        Check { name: name.to_string(), pass: witness.is_none(), witness }
    }
}

/// One nonzero coefficient found at a sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub sample_index: usize,
    pub point: Vec<(String, String)>,
    /// (row, col, z-degree), 1-based rows and columns; empty for scalar checks.
    pub entry: Vec<i64>,
    pub check: String,
    pub residual: String,
}

/// Outcome of an exact identity check over random samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub samples: usize,
    pub passed: usize,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn empty(subject: &str) -> Self {
        VerificationReport { subject: subject.to_string(), samples: 0, passed: 0, failures: Vec::new() }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.samples && self.failures.is_empty()
    }

    /// Merge per-sample outcomes, in sample order.
    pub fn from_samples(subject: &str, outcomes: Vec<Vec<Failure>>) -> Self {
        let samples = outcomes.len();
        let passed = outcomes.iter().filter(|f| f.is_empty()).count();
        let failures = outcomes.into_iter().flatten().collect();
        VerificationReport { subject: subject.to_string(), samples, passed, failures }
    }
}
