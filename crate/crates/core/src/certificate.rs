//! Pass/fail records for inequality sweeps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::json::Float;

/// A sweep passes when its worst margin is at least `-MARGIN_TOLERANCE`.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// Outcome of checking an inequality over a parameter grid.
///
/// Margins are `upper - value` and `value - lower`, measured in log-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub name: String,
    pub grid: String,
    pub samples: usize,
    #[serde(with = "crate::json")]
    pub worst_margin: f64,
    /// Parameters of the sample attaining `worst_margin`.
    pub witness: BTreeMap<String, Float>,
    pub pass: bool,
    /// Grid points outside the range where the inequality is claimed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub uncertified: Vec<BTreeMap<String, Float>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CertificateReport {
    pub fn witness_value(&self, key: &str) -> Option<f64> {
        self.witness.get(key).map(|f| f.0)
    }
}

/// Accumulates margins into a [`CertificateReport`].
#[derive(Debug)]
pub struct CertificateBuilder {
    name: String,
    grid: String,
    samples: usize,
    worst: f64,
    witness: BTreeMap<String, Float>,
    uncertified: Vec<BTreeMap<String, Float>>,
    seed: Option<u64>,
}

fn to_map(params: &[(&str, f64)]) -> BTreeMap<String, Float> {
    params.iter().map(|(k, v)| (k.to_string(), Float(*v))).collect()
}

impl CertificateBuilder {
    pub fn new(name: impl Into<String>, grid: impl Into<String>) -> Self {
        CertificateBuilder {
            name: name.into(),
            grid: grid.into(),
            samples: 0,
            worst: f64::INFINITY,
            witness: BTreeMap::new(),
            uncertified: Vec::new(),
            seed: None,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Records one sample with the smaller of its margins. NaN counts as a
    /// failure.
    pub fn observe(&mut self, margin: f64, params: impl FnOnce() -> Vec<(&'static str, f64)>) {
        self.samples += 1;
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if margin < self.worst || self.witness.is_empty() {
            self.worst = self.worst.min(margin);
            self.witness = to_map(&params());
        }
    }

    /// Records `value - lower` and `upper - value`.
    pub fn observe_bounds(&mut self, lower: f64, value: f64, upper: f64, params: impl FnOnce() -> Vec<(&'static str, f64)>) {
        self.observe((value - lower).min(upper - value), params);
    }

    pub fn mark_uncertified(&mut self, params: &[(&str, f64)]) {
        self.uncertified.push(to_map(params));
    }

    /// Folds another report's samples into this one.
    pub fn absorb(&mut self, other: &CertificateReport) {
        self.samples += other.samples;
        if other.worst_margin < self.worst || self.witness.is_empty() {
            self.worst = self.worst.min(other.worst_margin);
            self.witness = other.witness.clone();
        }
        self.uncertified.extend(other.uncertified.iter().cloned());
    }

    pub fn finish(self) -> CertificateReport {
        let pass = self.samples > 0 && self.worst >= -MARGIN_TOLERANCE;
        CertificateReport {
            name: self.name,
            grid: self.grid,
            samples: self.samples,
            worst_margin: self.worst,
            witness: self.witness,
            pass,
            uncertified: self.uncertified,
            seed: self.seed,
        }
    }
}
