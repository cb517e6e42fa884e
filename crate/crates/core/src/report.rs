//! Structured pass/fail records shared by every check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Whether a record tests a stated identity, an internal consistency
/// condition, or a property observed without a proof behind it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Identity,
    Consistency,
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub expected: String,
    pub actual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Plain-language pointer to the identity being tested.
    pub anchor: String,
    pub basis: Basis,
    pub pass: bool,
}

impl CheckRecord {
    pub fn exact(name: &str, anchor: &str, pass: bool) -> Self {
        CheckRecord {
            name: name.into(),
            params: BTreeMap::new(),
            expected: "exact equality".into(),
            actual: if pass { "equal" } else { "differs" }.into(),
            residual: None,
            tolerance: None,
            anchor: anchor.into(),
            basis: Basis::Identity,
            pass,
        }
    }

    pub fn numeric(name: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            params: BTreeMap::new(),
            expected: format!("residual < {tolerance:e}"),
            actual: format!("{residual:e}"),
            residual: Some(residual),
            tolerance: Some(tolerance),
            anchor: anchor.into(),
            basis: Basis::Identity,
            pass: residual.is_finite() && residual < tolerance,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn with_basis(mut self, b: Basis) -> Self {
        self.basis = b;
        self
    }

    pub fn with_actual(mut self, s: impl Into<String>) -> Self {
        self.actual = s.into();
        self
    }

    pub fn with_expected(mut self, s: impl Into<String>) -> Self {
        self.expected = s.into();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    /// Failed identity and consistency records.
    pub failed: usize,
    /// Failed empirical records; these never fail a run.
    pub empirical_failed: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn new(records: Vec<CheckRecord>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let empirical_failed = records.iter().filter(|r| !r.pass && r.basis == Basis::Empirical).count();
        ReportDocument {
            summary: Summary {
                total: records.len(),
                passed,
                failed: records.len() - passed - empirical_failed,
                empirical_failed,
            },
            records,
        }
    }

    pub fn extend(&mut self, more: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(more);
        *self = ReportDocument::new(std::mem::take(&mut self.records));
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_failures_do_not_fail_the_report() {
        let mut doc = ReportDocument::new(vec![
            CheckRecord::exact("a", "x", true),
            CheckRecord::numeric("b", "y", 1.0, 0.1).with_basis(Basis::Empirical),
        ]);
        assert_eq!((doc.summary.passed, doc.summary.failed, doc.summary.empirical_failed), (1, 0, 1));
        assert!(doc.all_pass());
        doc.extend([CheckRecord::numeric("c", "z", 1.0, 0.1)]);
        assert_eq!((doc.summary.total, doc.summary.failed), (3, 1));
        assert!(!doc.all_pass());
    }
}
