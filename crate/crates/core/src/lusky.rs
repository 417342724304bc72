//! Lusky block sequences.
//!
//! For `0 < m < n` the block ratios are
//!
//! ```text
//! A(m, n) = (r_m / r_n)^m v(r_m) / v(r_n),    B(m, n) = (r_n / r_m)^n v(r_n) / v(r_m).
//! ```
//!
//! Both are at least 1 because `r_m` maximizes `r^m v(r)`. A sequence
//! `m_1 < m_2 < ...` is usable for the block norms in [`crate::series`] when
//! `b <= min(A, B) <= max(A, B) <= K` on every consecutive pair.
//!
//! Both `A(m, M)` and `B(m, M)` are nondecreasing in `M` and equal 1 at
//! `M = m`, so `ln min(A, B) - ln b` changes sign exactly once and the next
//! boundary can be found by bisection.

use serde::{Deserialize, Serialize};

use crate::certificate::{CertificateBuilder, CertificateReport};
use crate::error::{Error, Result};
use crate::logspace::{x_minus_log1p_kernel, xlogx_kernel};
use crate::optimize::{bisect_nondecreasing, MAX_DOUBLINGS};
use crate::weights::{r_peak, PeakRadius, Weight};

/// Block index (0-based into `log_a`) from which closed-form sequences are
/// certified; the closed-form bounds are claimed for `n >= 4`.
pub const CLOSED_FORM_FIRST_CERTIFIED: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuskyConfig {
    pub b: f64,
    /// Bisection tolerance on `ln min(A, B)`.
    pub tol_log: f64,
    /// First boundary `m_1`.
    pub m_start: f64,
}

impl LuskyConfig {
    pub fn new(b: f64, m_start: f64) -> Self {
        LuskyConfig { b, tol_log: 1e-9, m_start }
    }

    pub fn validate(&self) -> Result<()> {
        check_b(self.b)?;
        if !(self.tol_log.is_finite() && self.tol_log > 0.0) {
            return Err(Error::Argument(format!("tol_log must be positive, got {}", self.tol_log)));
        }
        if !(self.m_start.is_finite() && self.m_start > 0.0) {
            return Err(Error::Argument(format!("m_start must be positive, got {}", self.m_start)));
        }
        Ok(())
    }
}

fn check_b(b: f64) -> Result<()> {
    if b.is_finite() && b > 2.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("b must exceed 2, got {b}")))
    }
}

fn check_pair(m: f64, n: f64) -> Result<()> {
    if !(m.is_finite() && n.is_finite() && m > 0.0) {
        return Err(Error::Argument(format!("block ratios need finite 0 < m < n, got m = {m}, n = {n}")));
    }
    if m >= n {
        return Err(Error::Argument(format!("block ratios need m < n, got m = {m}, n = {n}")));
    }
    Ok(())
}

/// `(ln A(m, n), ln B(m, n))` from precomputed peaks.
fn log_ratios_from_peaks(w: &Weight, pm: &PeakRadius, pn: &PeakRadius) -> (f64, f64) {
    if let Some((_, p)) = w.exp_power_params() {
        // r_m^p = m/(a p) and φ(r_m) = m/p, so with x = (n - m)/m
        // ln A = (m/p)(x - ln(1+x)) and ln B = (m/p)((1+x) ln(1+x) - x)
        let (m, n) = (pm.m, pn.m);
        let x = (n - m) / m;
        return ((m / p) * x_minus_log1p_kernel(x), (m / p) * xlogx_kernel(x));
    }
    let (phi_m, phi_n) = (w.log_weight(pm.r), w.log_weight(pn.r));
    let dlog_r = pm.log_r - pn.log_r;
    let log_a = pm.m * dlog_r + phi_n - phi_m;
    let log_b = -pn.m * dlog_r + phi_m - phi_n;
    (log_a, log_b)
}

/// `(ln A(m, n), ln B(m, n))`.
pub fn log_ratios(w: &Weight, m: f64, n: f64) -> Result<(f64, f64)> {
    check_pair(m, n)?;
    Ok(log_ratios_from_peaks(w, &r_peak(w, m)?, &r_peak(w, n)?))
}

/// `ln A(m, n) = m (ln r_m - ln r_n) + φ(r_n) - φ(r_m)`.
pub fn log_a(w: &Weight, m: f64, n: f64) -> Result<f64> {
    log_ratios(w, m, n).map(|(a, _)| a)
}

/// `ln B(m, n) = n (ln r_n - ln r_m) + φ(r_m) - φ(r_n)`.
pub fn log_b(w: &Weight, m: f64, n: f64) -> Result<f64> {
    log_ratios(w, m, n).map(|(_, b)| b)
}

/// A finite prefix `m_1 < ... < m_N` of a Lusky sequence with cached peaks
/// and block ratios.
#[derive(Debug, Clone)]
pub struct LuskySequence {
    weight: Weight,
    boundaries: Vec<f64>,
    r_at: Vec<PeakRadius>,
    log_a: Vec<f64>,
    log_b: Vec<f64>,
    certified_b: f64,
    certified_k: f64,
    first_certified: usize,
}

impl LuskySequence {
    /// Builds a sequence from explicit boundaries. `certified_b` and
    /// `certified_K` are the extreme ratios over the stored blocks.
    pub fn from_boundaries(weight: Weight, boundaries: Vec<f64>) -> Result<Self> {
        let mut seq = Self::assemble(weight, boundaries, f64::NAN, f64::NAN, 0)?;
        seq.certified_b = seq.min_log_ratio().exp();
        seq.certified_k = seq.max_log_ratio().exp();
        Ok(seq)
    }

    fn assemble(weight: Weight, boundaries: Vec<f64>, b: f64, k: f64, first_certified: usize) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::Argument("a Lusky sequence needs at least one boundary".into()));
        }
        for pair in boundaries.windows(2) {
            check_pair(pair[0], pair[1])?;
        }
        if !(boundaries[0].is_finite() && boundaries[0] > 0.0) {
            return Err(Error::Argument(format!("boundaries must be positive, got {}", boundaries[0])));
        }
        let r_at = boundaries.iter().map(|&m| r_peak(&weight, m)).collect::<Result<Vec<_>>>()?;
        let (log_a, log_b) = r_at.windows(2).map(|p| log_ratios_from_peaks(&weight, &p[0], &p[1])).unzip();
        Ok(LuskySequence { weight, boundaries, r_at, log_a, log_b, certified_b: b, certified_k: k, first_certified })
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// `m_1, m_2, ...` (0-based storage: `boundaries()[0] = m_1`).
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn peaks(&self) -> &[PeakRadius] {
        &self.r_at
    }

    /// `ln A(m_n, m_{n+1})` for each stored block.
    pub fn log_a(&self) -> &[f64] {
        &self.log_a
    }

    pub fn log_b(&self) -> &[f64] {
        &self.log_b
    }

    pub fn certified_b(&self) -> f64 {
        self.certified_b
    }

    pub fn certified_k(&self) -> f64 {
        self.certified_k
    }

    /// Number of blocks `(m_n, m_{n+1}]`.
    pub fn block_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Blocks with a smaller index are outside the range where the
    /// sequence's bounds are claimed.
    pub fn first_certified_block(&self) -> usize {
        self.first_certified
    }

    pub fn last_boundary(&self) -> f64 {
        *self.boundaries.last().expect("nonempty")
    }

    fn min_log_ratio(&self) -> f64 {
        self.log_a.iter().zip(&self.log_b).map(|(a, b)| a.min(*b)).fold(f64::INFINITY, f64::min)
    }

    fn max_log_ratio(&self) -> f64 {
        self.log_a.iter().zip(&self.log_b).map(|(a, b)| a.max(*b)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `m (ln r_{m_{n+1}} - ln r_{m_n}) - φ(r_{m_{n+1}}) + φ(r_{m_n})` for block
    /// `block` (0-based): the log of the factor relating the block-start and
    /// block-end normalizations of `z^m`. Lies in `[-ln K, ln K]` for
    /// `m_n <= m <= m_{n+1}`.
    pub fn boundary_comparability_log(&self, block: usize, m: f64) -> f64 {
        let (lo, hi) = (&self.r_at[block], &self.r_at[block + 1]);
        m * (hi.log_r - lo.log_r) - self.weight.log_weight(hi.r) + self.weight.log_weight(lo.r)
    }
}

/// Builds `count` boundaries starting at `cfg.m_start`, each next boundary
/// solving `min(A(m_n, M), B(m_n, M)) = b` to within `cfg.tol_log` in
/// log-space.
pub fn construct_sequence(w: &Weight, cfg: &LuskyConfig, count: usize) -> Result<LuskySequence> {
    cfg.validate()?;
    if count == 0 {
        return Err(Error::Argument("count must be positive".into()));
    }
    let ln_b = cfg.b.ln();
    let mut boundaries = vec![cfg.m_start];
    let mut current = r_peak(w, cfg.m_start)?;
    while boundaries.len() < count {
        let m = current.m;
        let gap = |big_m: f64| -> Result<f64> {
            let pm = r_peak(w, big_m)?;
            let (a, b) = log_ratios_from_peaks(w, &current, &pm);
            Ok(a.min(b) - ln_b)
        };
        let mut step = m * 2f64.powi(-10);
        let mut prev = 0.0;
        let mut doublings = 0;
        while gap(m + step)? < 0.0 {
            prev = step;
            step *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS || !(m + step).is_finite() {
                return Err(Error::DegenerateLusky { m });
            }
        }
        let mut failure = None;
        let next = bisect_nondecreasing(
            |big_m| {
                gap(big_m).unwrap_or_else(|e| {
                    failure = Some(e);
                    0.0
                })
            },
            m + prev,
            m + step,
            |v| v.abs() <= cfg.tol_log,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        current = r_peak(w, next)?;
        boundaries.push(next);
    }
    let mut seq = LuskySequence::assemble(w.clone(), boundaries, cfg.b, f64::NAN, 0)?;
    seq.certified_k = seq.max_log_ratio().exp();
    Ok(seq)
}

/// The boundaries `m_n = p (ln b) n^2`, `n = 1..=n_max`, for `v = exp(-a r^p)`.
///
/// For `n >= 4` these satisfy `b <= A <= b^{9/2}` and `b <= B <= b^4`, so
/// `certified_K = b^{9/2}`; earlier blocks are flagged as uncertified.
pub fn closed_form_exp_weight(a: f64, p: f64, b: f64, n_max: usize) -> Result<LuskySequence> {
    check_b(b)?;
    if n_max == 0 {
        return Err(Error::Argument("n_max must be positive".into()));
    }
    let w = Weight::exp_power(a, p)?;
    let scale = p * b.ln();
    let boundaries = (1..=n_max).map(|n| scale * (n * n) as f64).collect();
    LuskySequence::assemble(w, boundaries, b, b.powf(4.5), CLOSED_FORM_FIRST_CERTIFIED)
}

/// Checks `ln b <= min(ln A, ln B)` and `max(ln A, ln B) <= ln K` on every
/// certified block.
pub fn validate_condition_35(seq: &LuskySequence, b: f64, k: f64) -> Result<CertificateReport> {
    if seq.boundaries.len() < 2 {
        return Err(Error::Argument("validation needs at least two boundaries".into()));
    }
    let (ln_b, ln_k) = (b.ln(), k.ln());
    let mut report = CertificateBuilder::new("condition_35", format!("{} blocks, b = {b}, K = {k}", seq.block_count()));
    for i in 0..seq.block_count() {
        let (la, lb) = (seq.log_a[i], seq.log_b[i]);
        let params =
            [("n", (i + 1) as f64), ("m_n", seq.boundaries[i]), ("m_n_plus_1", seq.boundaries[i + 1]), ("log_A", la), ("log_B", lb)];
        if i < seq.first_certified {
            report.mark_uncertified(&params);
            continue;
        }
        let margin = (la.min(lb) - ln_b).min(ln_k - la.max(lb));
        report.observe(margin, || params.to_vec());
    }
    Ok(report.finish())
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    weight: Weight,
    boundaries: Vec<f64>,
    #[serde(rename = "log_A", with = "crate::json::vec")]
    log_a: Vec<f64>,
    #[serde(rename = "log_B", with = "crate::json::vec")]
    log_b: Vec<f64>,
    #[serde(with = "crate::json")]
    b: f64,
    #[serde(rename = "K", with = "crate::json")]
    k: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    certified_from: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

impl Serialize for LuskySequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SequenceJson {
            weight: self.weight.clone(),
            boundaries: self.boundaries.clone(),
            log_a: self.log_a.clone(),
            log_b: self.log_b.clone(),
            b: self.certified_b,
            k: self.certified_k,
            certified_from: self.first_certified,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LuskySequence {
    /// Peaks and ratios are recomputed from the weight; stored ratios must
    /// agree with them.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SequenceJson::deserialize(d)?;
        let seq = LuskySequence::assemble(j.weight, j.boundaries, j.b, j.k, j.certified_from).map_err(D::Error::custom)?;
        let consistent = |stored: &[f64], computed: &[f64]| {
            stored.len() == computed.len() && stored.iter().zip(computed).all(|(s, c)| (s - c).abs() <= 1e-9 * c.abs().max(1.0))
        };
        if !consistent(&j.log_a, &seq.log_a) || !consistent(&j.log_b, &seq.log_b) {
            return Err(D::Error::custom("stored log_A/log_B disagree with the weight and boundaries"));
        }
        Ok(seq)
    }
}
