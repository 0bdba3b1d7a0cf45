//! Machine-readable check reports with three-valued verdicts.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// `Pass` below `tol`, `Inconclusive` below `3 tol`, `Fail` otherwise
    /// (and for non-finite residuals).
    pub fn from_residual(residual: f64, tol: f64) -> Self {
        if residual < tol {
            Verdict::Pass
        } else if residual < 3.0 * tol {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }

    /// Verdict for a property that holds when `value` exceeds `threshold`;
    /// values within a factor 3 below the threshold are inconclusive.
    pub fn from_lower_bound(value: f64, threshold: f64) -> Self {
        if value > threshold {
            Verdict::Pass
        } else if value > threshold / 3.0 {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }

    /// Any failure fails; otherwise any inconclusive part is inconclusive.
    pub fn all<I: IntoIterator<Item = Verdict>>(parts: I) -> Self {
        let mut out = Verdict::Pass;
        for v in parts {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Pass => {}
            }
        }
        out
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of a check. Maps are ordered so serialized reports are
/// byte-identical for identical inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    /// SHA-256 of the canonical input description.
    pub inputs: String,
    pub values: BTreeMap<String, f64>,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: &str, inputs: &str) -> Self {
        Self {
            check: check.into(),
            inputs: digest(inputs),
            values: BTreeMap::new(),
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.into(), v);
        self
    }

    /// Records a residual with its tolerance.
    pub fn residual(mut self, key: &str, r: f64, tol: f64) -> Self {
        self.residuals.insert(key.into(), r);
        self.tolerances.insert(key.into(), tol);
        self
    }

    pub fn note(mut self, text: &str) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn with_verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    /// Verdict from all recorded residuals against their tolerances.
    pub fn judge(mut self) -> Self {
        self.verdict = Verdict::all(
            self.residuals
                .iter()
                .map(|(k, r)| Verdict::from_residual(*r, self.tolerances[k])),
        );
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Hex SHA-256 of a string.
pub fn digest(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
