use std::time::Instant;

use serde::{Deserialize, Serialize};

/// One probe of a check: its input and the two sides that were compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub input: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub pass: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
    /// The worst probes, most violating first.
    pub witnesses: Vec<Witness>,
    pub seed: u64,
    /// Wall-clock seconds; left out of serialized output unless set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime: Option<f64>,
    /// Check-specific values (integrals, error sequences, ...).
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl VerificationReport {
    pub fn without_runtime(mut self) -> Self {
        self.runtime = None;
        self
    }
}

const KEEP: usize = 5;

/// Collects probes and keeps the worst few.
pub(crate) struct ReportBuilder {
    check: String,
    instance: String,
    seed: u64,
    tolerance: f64,
    worst: f64,
    witnesses: Vec<(f64, Witness)>,
    start: Instant,
    details: serde_json::Value,
}

impl ReportBuilder {
    pub fn new(check: &str, instance: impl Into<String>, seed: u64, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            instance: instance.into(),
            seed,
            tolerance,
            worst: 0.0,
            witnesses: Vec::new(),
            start: Instant::now(),
            details: serde_json::Value::Null,
        }
    }

    /// Records a probe whose violation is `violation` (non-positive means satisfied).
    pub fn probe(&mut self, input: Vec<f64>, lhs: f64, rhs: f64, violation: f64) {
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > self.worst {
            self.worst = v;
        }
        let w = Witness { input, lhs, rhs };
        if self.witnesses.len() < KEEP {
            self.witnesses.push((v, w));
        } else if let Some(min) = self.witnesses.iter_mut().min_by(|a, b| a.0.total_cmp(&b.0)) {
            if v > min.0 {
                *min = (v, w);
            }
        }
    }

    pub fn details(&mut self, d: serde_json::Value) {
        self.details = d;
    }

    pub fn finish(self) -> VerificationReport {
        let mut w = self.witnesses;
        w.sort_by(|a, b| b.0.total_cmp(&a.0));
        VerificationReport {
            check: self.check,
            instance: self.instance,
            pass: self.worst <= self.tolerance,
            worst_violation: self.worst,
            tolerance: self.tolerance,
            witnesses: w.into_iter().map(|(_, w)| w).collect(),
            seed: self.seed,
            runtime: Some(self.start.elapsed().as_secs_f64()),
            details: self.details,
        }
    }
}
