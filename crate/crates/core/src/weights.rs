//! Radial, rapidly decreasing weights `v(r) = exp(-φ(r))`.
//!
//! A [`Weight`] is stored through its log-weight `φ`. The peak radius `r_m`
//! maximizes `r^m v(r)`, equivalently `m ln r - φ(r)`, and `ln ‖z^m‖_v` is the
//! value of that maximum. Non-integer `m` is allowed throughout.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{bisect_nondecreasing, doubling_bracket, golden_section_max};

/// A user-supplied log-weight `r ↦ φ(r)`.
pub type LogWeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum WeightKind {
    /// `v(r) = exp(-a r^p)`
    ExpPower { a: f64, p: f64 },
    /// `v(r) = exp(-e^r)`
    ExpExp,
    /// `v(r) = exp(-(log⁺ r)^p)` with `p >= 2`
    LogPower { p: f64 },
    /// Library-only weight given by its log-weight.
    Custom(LogWeightFn),
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::ExpPower { a, p } => write!(f, "ExpPower {{ a: {a}, p: {p} }}"),
            WeightKind::ExpExp => write!(f, "ExpExp"),
            WeightKind::LogPower { p } => write!(f, "LogPower {{ p: {p} }}"),
            WeightKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Weight {
    kind: WeightKind,
    /// Below this radius `φ` is frozen at `φ(domain_floor)`.
    domain_floor: f64,
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::Argument(format!("{name} must be positive and finite, got {x}")))
    }
}

impl Weight {
    pub fn exp_power(a: f64, p: f64) -> Result<Self> {
        Ok(Self::from_kind(WeightKind::ExpPower { a: positive("a", a)?, p: positive("p", p)? }))
    }

    pub fn exp_exp() -> Self {
        Self::from_kind(WeightKind::ExpExp)
    }

    pub fn log_power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::Argument(format!("log_power requires p >= 2, got {p}")));
        }
        Ok(Self::from_kind(WeightKind::LogPower { p }))
    }

    /// A weight given by an arbitrary nondecreasing log-weight `φ`.
    pub fn custom(log_weight: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::from_kind(WeightKind::Custom(Arc::new(log_weight)))
    }

    fn from_kind(kind: WeightKind) -> Self {
        Weight { kind, domain_floor: 0.0 }
    }

    pub fn with_domain_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor.is_finite() && floor >= 0.0) {
            return Err(Error::Argument(format!("domain_floor must be >= 0, got {floor}")));
        }
        self.domain_floor = floor;
        Ok(self)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn domain_floor(&self) -> f64 {
        self.domain_floor
    }

    /// `(a, p)` for `exp(-a r^p)` weights without a domain floor.
    pub fn exp_power_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            WeightKind::ExpPower { a, p } if self.domain_floor == 0.0 => Some((a, p)),
            _ => None,
        }
    }

    /// The log-weight `φ(r) = -ln v(r)`.
    pub fn log_weight(&self, r: f64) -> f64 {
        let r = r.max(self.domain_floor);
        match &self.kind {
            WeightKind::ExpPower { a, p } => a * r.powf(*p),
            WeightKind::ExpExp => r.exp(),
            WeightKind::LogPower { p } => {
                if r > 1.0 {
                    r.ln().powf(*p)
                } else {
                    0.0
                }
            }
            WeightKind::Custom(f) => f(r),
        }
    }

    /// `r φ'(r)`, when known analytically.
    fn elasticity(&self, r: f64) -> Option<f64> {
        if r < self.domain_floor {
            return Some(0.0);
        }
        match &self.kind {
            WeightKind::ExpPower { a, p } => Some(a * p * r.powf(*p)),
            WeightKind::ExpExp => Some(r * r.exp()),
            WeightKind::LogPower { p } => Some(if r > 1.0 { p * r.ln().powf(p - 1.0) } else { 0.0 }),
            WeightKind::Custom(_) => None,
        }
    }

    /// `ln v(r) = -φ(r)`.
    pub fn eval_log_v(&self, r: f64) -> Result<f64> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Domain(format!("radius must be finite and nonnegative, got {r}")));
        }
        Ok(-self.log_weight(r))
    }

    /// Samples the monotonicity and rapid-decrease invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let radii: Vec<f64> = (-20..=40).map(|k| 2f64.powf(k as f64 * 0.5)).collect();
        for pair in radii.windows(2) {
            let (a, b) = (self.log_weight(pair[0]), self.log_weight(pair[1]));
            if a.is_nan() || (b.is_finite() && a > b + 1e-12) {
                return Err(Error::Argument(format!("log-weight decreases between r = {} and r = {}", pair[0], pair[1])));
            }
        }
        for m in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            r_peak(self, m)?;
        }
        Ok(())
    }
}

/// The maximizer of `r^m v(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRadius {
    pub m: f64,
    pub r: f64,
    /// `ln r`, kept separately so huge radii stay exact in log-space.
    pub log_r: f64,
    /// `m ln r - φ(r)`
    pub log_peak_value: f64,
}

fn check_degree(m: f64) -> Result<()> {
    if m.is_finite() && m > 0.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("monomial degree must be positive, got {m}")))
    }
}

/// Peak radius `r_m`; closed form `(m/(a p))^{1/p}` for `exp(-a r^p)`.
pub fn r_peak(w: &Weight, m: f64) -> Result<PeakRadius> {
    check_degree(m)?;
    if let Some((a, p)) = w.exp_power_params() {
        let log_r = (m.ln() - (a * p).ln()) / p;
        return Ok(PeakRadius { m, r: log_r.exp(), log_r, log_peak_value: m * log_r - m / p });
    }
    r_peak_numeric(w, m)
}

/// Peak radius by search, ignoring any closed form.
///
/// Brackets by radius doubling, then golden-section maximizes `m u - φ(e^u)`
/// in `u = ln r`. When `r φ'(r)` is known analytically the golden-section
/// estimate is polished by bisection on the stationarity condition
/// `r φ'(r) = m`; value comparisons alone cannot resolve the flat top of the
/// objective beyond about eight digits.
pub fn r_peak_numeric(w: &Weight, m: f64) -> Result<PeakRadius> {
    check_degree(m)?;
    let objective = |u: f64| m * u - w.log_weight(u.exp());
    let (lo, hi) = doubling_bracket(|r| m * r.ln() - w.log_weight(r), m)?;
    let golden = golden_section_max(objective, lo, hi, 1e-13 * lo.abs().max(hi.abs()).max(1.0));
    let mut log_r = golden.x;

    let stationarity = |u: f64| w.elasticity(u.exp()).map(|e| e - m);
    if let (Some(h_lo), Some(h_hi)) = (stationarity(lo), stationarity(hi)) {
        if h_lo <= 0.0 && h_hi >= 0.0 {
            let polished = bisect_nondecreasing(|u| stationarity(u).unwrap_or(0.0), lo, hi, |v| v == 0.0);
            if objective(polished) >= golden.value - 1e-9 * golden.value.abs().max(1.0) {
                log_r = polished;
            }
        }
    }
    Ok(PeakRadius { m, r: log_r.exp(), log_r, log_peak_value: objective(log_r) })
}

/// `ln ‖z^n‖_v = sup_r (n ln r - φ(r))`; `ln v(0)` for `n = 0`.
pub fn monomial_norm_log(w: &Weight, n: f64) -> Result<f64> {
    if n == 0.0 {
        return w.eval_log_v(0.0);
    }
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Argument(format!("monomial degree must be >= 0, got {n}")));
    }
    Ok(r_peak(w, n)?.log_peak_value)
}

/// JSON form of a built-in weight, e.g. `{"kind":"exp_power","a":1.0,"p":1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum KindSpec {
    ExpPower { a: f64, p: f64 },
    ExpExp,
    LogPower { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WeightSpec {
    #[serde(flatten)]
    kind: KindSpec,
    #[serde(default, skip_serializing_if = "is_zero")]
    domain_floor: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl TryFrom<WeightSpec> for Weight {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<Self> {
        let w = match spec.kind {
            KindSpec::ExpPower { a, p } => Weight::exp_power(a, p)?,
            KindSpec::ExpExp => Weight::exp_exp(),
            KindSpec::LogPower { p } => Weight::log_power(p)?,
        };
        w.with_domain_floor(spec.domain_floor)
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = match self.kind {
            WeightKind::ExpPower { a, p } => KindSpec::ExpPower { a, p },
            WeightKind::ExpExp => KindSpec::ExpExp,
            WeightKind::LogPower { p } => KindSpec::LogPower { p },
            WeightKind::Custom(_) => {
                return Err(serde::ser::Error::custom("custom weights cannot be serialized"));
            }
        };
        WeightSpec { kind, domain_floor: self.domain_floor }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = WeightSpec::deserialize(d)?;
        Weight::try_from(spec).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Accepts inline JSON or the shorthands `exp_power:A:P`, `exp_exp`,
    /// `log_power:P`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Argument(format!("weight shorthand {s:?} is missing a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::Argument(format!("weight shorthand {s:?}: {e}")))
        };
        match (parts[0], parts.len()) {
            ("exp_power", 3) => Weight::exp_power(num(1)?, num(2)?),
            ("exp_exp", 1) => Ok(Weight::exp_exp()),
            ("log_power", 2) => Weight::log_power(num(1)?),
            _ => Err(Error::Argument(format!("unrecognized weight {s:?}; expected JSON or exp_power:A:P, exp_exp, log_power:P"))),
        }
    }
}
