//! Pass/fail records shared by every checker.

use num::BigRational;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

/// One asserted statement. Inequalities carry both sides as exact rationals.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(
        serialize_with = "ser_rational",
        skip_serializing_if = "Option::is_none"
    )]
    pub lhs: Option<BigRational>,
    #[serde(
        serialize_with = "ser_rational",
        skip_serializing_if = "Option::is_none"
    )]
    pub rhs: Option<BigRational>,
    /// Both sides present and equal.
    pub tight: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<String>,
}

fn ser_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl Check {
    fn new(label: impl Into<String>, outcome: Outcome, detail: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            outcome,
            detail: detail.into(),
            lhs: None,
            rhs: None,
            tight: false,
            reproducer: None,
        }
    }

    pub fn holds(label: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        Check::new(label, outcome, detail)
    }

    pub fn skipped(label: impl Into<String>, why: impl Into<String>) -> Self {
        Check::new(label, Outcome::Skipped, why)
    }

    /// Passes iff `lhs >= rhs`.
    pub fn at_least(label: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        let ok = lhs >= rhs;
        let detail = format!("{lhs} >= {rhs}");
        Check::new(
            label,
            if ok { Outcome::Pass } else { Outcome::Fail },
            detail,
        )
        .with_sides(lhs, rhs)
    }

    /// Passes iff `lhs <= rhs`.
    pub fn at_most(label: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        let ok = lhs <= rhs;
        let detail = format!("{lhs} <= {rhs}");
        Check::new(
            label,
            if ok { Outcome::Pass } else { Outcome::Fail },
            detail,
        )
        .with_sides(lhs, rhs)
    }

    /// Passes iff `lhs == rhs`.
    pub fn equal(label: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        let ok = lhs == rhs;
        let detail = format!("{lhs} == {rhs}");
        Check::new(
            label,
            if ok { Outcome::Pass } else { Outcome::Fail },
            detail,
        )
        .with_sides(lhs, rhs)
    }

    fn with_sides(mut self, lhs: BigRational, rhs: BigRational) -> Self {
        self.tight = lhs == rhs;
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }

    pub fn with_reproducer(mut self, reproducer: impl Into<String>) -> Self {
        self.reproducer = Some(reproducer.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}

/// A named list of checks. Skipped checks do not count as failures.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.failed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn get(&self, label: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.label == label)
    }
}
