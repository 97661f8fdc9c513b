//! Run-level JSON summary of pass/fail checks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckEntry {
    /// Passes when `value <= tolerance`.
    pub fn at_most(value: f64, tolerance: f64) -> Self {
        CheckEntry { value, tolerance, pass: value <= tolerance }
    }

    /// Passes when `value >= tolerance`.
    pub fn at_least(value: f64, tolerance: f64) -> Self {
        CheckEntry { value, tolerance, pass: value >= tolerance }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub checks: BTreeMap<String, CheckEntry>,
}

impl CheckSummary {
    pub fn insert(&mut self, name: impl Into<String>, entry: CheckEntry) {
        self.checks.insert(name.into(), entry);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_verdict() {
        let mut s = CheckSummary::default();
        s.insert("mass_drift", CheckEntry::at_most(1e-14, 1e-10));
        assert!(s.all_pass());
        s.insert("order", CheckEntry::at_least(0.3, 0.5));
        assert!(!s.all_pass());
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"checks\":{"));
        assert_eq!(serde_json::from_str::<CheckSummary>(&text).unwrap(), s);
    }
}
