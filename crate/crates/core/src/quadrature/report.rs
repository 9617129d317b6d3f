//! Machine-readable verdicts for the theorem checks.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        })
    }
}

/// One probed inequality: `violation ≤ tolerance` means it holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detail {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Detail {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64, violation: f64, tolerance: f64) -> Self {
        Detail {
            label: label.into(),
            x: None,
            lhs,
            rhs,
            violation,
            tolerance,
            note: None,
        }
    }

    pub fn at(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.violation <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub inputs: Map<String, Value>,
    pub probes: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub details: Vec<Detail>,
}

impl TheoremReport {
    /// The headline violation and tolerance come from the detail closest
    /// to failing (largest `violation − tolerance`).
    pub fn new(theorem: impl Into<String>, inputs: Map<String, Value>, details: Vec<Detail>) -> Self {
        let binding = details
            .iter()
            .max_by(|a, b| (a.violation - a.tolerance).total_cmp(&(b.violation - b.tolerance)));
        let (max_violation, tolerance) = binding.map_or((0.0, 0.0), |d| (d.violation, d.tolerance));
        let verdict = if details.iter().all(Detail::holds) {
            Verdict::Holds
        } else {
            Verdict::Fails
        };
        TheoremReport {
            theorem: theorem.into(),
            inputs,
            probes: details.len(),
            max_violation,
            tolerance,
            verdict,
            details,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }
}

/// Build an input map from literal pairs.
pub(crate) fn inputs<const N: usize>(pairs: [(&str, Value); N]) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// JSON number, or `null` when not finite.
pub(crate) fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binding_detail_sets_headline() {
        let r = TheoremReport::new(
            "demo",
            inputs([("R", num(1.0))]),
            vec![
                Detail::new("a", 0.0, 0.0, 1e-3, 1e-2),
                Detail::new("b", 0.0, 0.0, 2e-3, 1e-3),
            ],
        );
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!((r.max_violation, r.tolerance), (2e-3, 1e-3));
        let back: TheoremReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn empty_report_holds() {
        let r = TheoremReport::new("empty", Map::new(), vec![]);
        assert!(r.holds());
        assert_eq!(r.probes, 0);
    }

    #[test]
    fn non_finite_inputs_become_null() {
        assert_eq!(num(f64::INFINITY), Value::Null);
    }
}
