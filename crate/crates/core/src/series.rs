//! Finitely supported coefficient sequences and the norms built from them.
//!
//! For a weight `v = exp(-φ)` and `f(z) = Σ a_n z^n`:
//!
//! * [`core_norm_log`]: `ln sup_r v(r) Σ |a_n| r^n` (solid core),
//! * [`coeff_l2_lower_bound_log`]: `ln sup_r v(r) (Σ |a_n|^2 r^{2n})^{1/2}`,
//! * [`poly_norm_v_log`]: `ln sup_r v(r) M(f, r)`, the norm of `H∞_v` itself,
//! * [`hull_block_norms`]: per-block `ln H_n` with
//!   `H_n = v(r_{m_n}) (Σ_{m_n < m <= m_{n+1}} |b_m|^2 r_{m_n}^{2m})^{1/2}` (solid hull).
//!
//! The first three satisfy `l2 <= poly <= core` for every sequence.
//!
//! Radial suprema are searched on `[r_lo, r_hi]`, the peak radii of the lowest
//! and highest supported degree: every term `r^n v(r)` increases below its own
//! peak and decreases above it, and so do `M(f, r) / r^{lo}` and
//! `M(f, r) / r^{hi}` by the maximum modulus principle.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::{Add, Mul};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::log_lp;
use crate::lusky::LuskySequence;
use crate::optimize::{golden_section_max, maximize_on_interval};
use crate::weights::{r_peak, Weight};

/// A complex number stored as `(ln |z|, arg z)`; `log_abs = -inf` is zero.
///
/// Used for sequences whose moduli overflow `f64`, such as multipliers
/// growing like `1 / (v(r_m) r_m^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPolar {
    #[serde(with = "crate::json")]
    pub log_abs: f64,
    pub arg: f64,
}

impl LogPolar {
    pub fn new(log_abs: f64, arg: f64) -> Self {
        LogPolar { log_abs, arg }
    }

    pub fn from_log_abs(log_abs: f64) -> Self {
        LogPolar { log_abs, arg: 0.0 }
    }
}

impl Add for LogPolar {
    type Output = LogPolar;

    fn add(self, rhs: LogPolar) -> LogPolar {
        let (big, small) = if self.log_abs >= rhs.log_abs { (self, rhs) } else { (rhs, self) };
        if small.log_abs == f64::NEG_INFINITY {
            return big;
        }
        let rel = Complex64::from_polar(1.0, big.arg) + Complex64::from_polar((small.log_abs - big.log_abs).exp(), small.arg);
        if rel.norm() == 0.0 {
            return LogPolar::zero();
        }
        LogPolar { log_abs: big.log_abs + rel.norm().ln(), arg: rel.arg() }
    }
}

impl Mul for LogPolar {
    type Output = LogPolar;

    fn mul(self, rhs: LogPolar) -> LogPolar {
        LogPolar { log_abs: self.log_abs + rhs.log_abs, arg: self.arg + rhs.arg }
    }
}

impl Zero for LogPolar {
    fn zero() -> Self {
        LogPolar { log_abs: f64::NEG_INFINITY, arg: 0.0 }
    }

    fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }
}

/// Scalars that norms can read in polar form.
pub trait Polar {
    fn log_abs(&self) -> f64;
    fn arg(&self) -> f64;
}

impl Polar for Complex64 {
    fn log_abs(&self) -> f64 {
        self.norm().ln()
    }

    fn arg(&self) -> f64 {
        Complex64::arg(*self)
    }
}

impl Polar for f64 {
    fn log_abs(&self) -> f64 {
        self.abs().ln()
    }

    fn arg(&self) -> f64 {
        if *self < 0.0 {
            PI
        } else {
            0.0
        }
    }
}

impl Polar for LogPolar {
    fn log_abs(&self) -> f64 {
        self.log_abs
    }

    fn arg(&self) -> f64 {
        self.arg
    }
}

/// A finitely supported sequence `(a_n)_{n >= 0}`; zero entries are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    entries: BTreeMap<usize, T>,
}

/// Complex Taylor coefficients, the default representation.
pub type CoefficientSequence = Coefficients<Complex64>;

impl<T: Zero + Clone> Default for Coefficients<T> {
    fn default() -> Self {
        Self::zero_sequence()
    }
}

impl<T: Zero + Clone> Coefficients<T> {
    pub fn zero_sequence() -> Self {
        Coefficients { entries: BTreeMap::new() }
    }

    /// Later duplicates of an index overwrite earlier ones.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, T)>) -> Self {
        let mut c = Self::zero_sequence();
        for (k, v) in entries {
            c.set(k, v);
        }
        c
    }

    /// `a_n = values[n]`.
    pub fn from_dense(values: impl IntoIterator<Item = T>) -> Self {
        Self::from_entries(values.into_iter().enumerate())
    }

    pub fn set(&mut self, index: usize, value: T) {
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn get(&self, index: usize) -> Option<&T> {
        self.entries.get(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &T)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Number of nonzero entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest supported index.
    pub fn degree(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn lowest_index(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }

    pub fn map<U: Zero + Clone>(&self, f: impl Fn(usize, &T) -> U) -> Coefficients<U> {
        Coefficients::from_entries(self.iter().map(|(k, v)| (k, f(k, v))))
    }

    /// Keeps the entries whose index satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        Coefficients { entries: self.entries.iter().filter(|(k, _)| keep(**k)).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn scale(&self, s: &T) -> Self
    where
        T: Mul<Output = T>,
    {
        self.map(|_, v| v.clone() * s.clone())
    }
}

impl<T: Zero + Clone> Coefficients<T>
where
    T: num_traits::One,
{
    /// The unit sequence `e_k`.
    pub fn unit(k: usize) -> Self {
        Self::from_entries([(k, T::one())])
    }
}

impl<T: Zero + Clone + Add<Output = T>> Add for &Coefficients<T> {
    type Output = Coefficients<T>;

    fn add(self, rhs: &Coefficients<T>) -> Coefficients<T> {
        let mut out = self.clone();
        for (k, v) in rhs.iter() {
            let sum = match out.entries.get(&k) {
                Some(x) => x.clone() + v.clone(),
                None => v.clone(),
            };
            out.set(k, sum);
        }
        out
    }
}

impl<T: Polar + Zero + Clone> Coefficients<T> {
    pub fn to_log_polar(&self) -> Coefficients<LogPolar> {
        self.map(|_, v| LogPolar::new(v.log_abs(), v.arg()))
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    entries: Vec<(usize, f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct LogPolarJson {
    log_entries: Vec<(usize, crate::json::Float, f64)>,
}

impl Serialize for Coefficients<Complex64> {
    /// `{"entries":[[m, re, im], ...]}`
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexJson { entries: self.iter().map(|(k, z)| (k, z.re, z.im)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coefficients<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ComplexJson::deserialize(d)?;
        Ok(Coefficients::from_entries(j.entries.into_iter().map(|(k, re, im)| (k, Complex64::new(re, im)))))
    }
}

impl Serialize for Coefficients<LogPolar> {
    /// `{"log_entries":[[m, ln|a_m|, arg a_m], ...]}`
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LogPolarJson { log_entries: self.iter().map(|(k, z)| (k, crate::json::Float(z.log_abs), z.arg)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coefficients<LogPolar> {
    /// Accepts either the `log_entries` form or the complex `entries` form.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(d)?;
        if value.get("log_entries").is_some() {
            let j: LogPolarJson = serde_json::from_value(value).map_err(D::Error::custom)?;
            Ok(Coefficients::from_entries(j.log_entries.into_iter().map(|(k, la, arg)| (k, LogPolar::new(la.0, arg)))))
        } else {
            let c: CoefficientSequence = serde_json::from_value(value).map_err(D::Error::custom)?;
            Ok(c.to_log_polar())
        }
    }
}

/// `(n, ln |a_n|, arg a_n)` for each nonzero entry.
fn polar_terms<T: Polar + Zero + Clone>(c: &Coefficients<T>) -> Vec<(usize, f64, f64)> {
    c.iter().map(|(k, v)| (k, v.log_abs(), v.arg())).filter(|t| t.1 > f64::NEG_INFINITY).collect()
}

#[inline]
fn term_log(n: usize, log_abs: f64, u: f64) -> f64 {
    if n == 0 {
        log_abs
    } else {
        log_abs + n as f64 * u
    }
}

/// `ln (Σ_n |a_n|^p e^{p n u})^{1/p}` without allocation.
fn log_lp_at(terms: &[(usize, f64, f64)], u: f64, p: f64) -> f64 {
    let max = terms.iter().map(|&(n, la, _)| term_log(n, la, u)).fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = terms.iter().map(|&(n, la, _)| (p * (term_log(n, la, u) - max)).exp()).sum();
    max + sum.ln() / p
}

fn weight_term(w: &Weight, u: f64) -> f64 {
    -w.log_weight(u.exp())
}

/// Maximizes `g(u)` over the radii where the supremum of a sequence norm can
/// be attained.
fn radial_sup(w: &Weight, lowest: usize, degree: usize, g: impl Fn(f64) -> f64) -> Result<f64> {
    if degree == 0 {
        return Ok(g(f64::NEG_INFINITY));
    }
    let u_hi = r_peak(w, degree as f64)?.log_r;
    let u_lo = if lowest == 0 { f64::NEG_INFINITY } else { r_peak(w, lowest as f64)?.log_r };
    Ok(maximize_on_interval(g, u_lo, u_hi).value)
}

/// `ln sup_{r>0} v(r) Σ |a_n| r^n`; `-inf` for the zero sequence.
pub fn core_norm_log<T: Polar + Zero + Clone>(c: &Coefficients<T>, w: &Weight) -> Result<f64> {
    let terms = polar_terms(c);
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let (lo, hi) = (terms[0].0, terms[terms.len() - 1].0);
    radial_sup(w, lo, hi, |u| weight_term(w, u) + log_lp_at(&terms, u, 1.0))
}

/// `ln sup_{r>0} v(r) (Σ |a_n|^2 r^{2n})^{1/2}`, a lower bound for the
/// `H∞_v` norm.
pub fn coeff_l2_lower_bound_log<T: Polar + Zero + Clone>(c: &Coefficients<T>, w: &Weight) -> Result<f64> {
    let terms = polar_terms(c);
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let (lo, hi) = (terms[0].0, terms[terms.len() - 1].0);
    radial_sup(w, lo, hi, |u| weight_term(w, u) + log_lp_at(&terms, u, 2.0))
}

/// Evaluates `ln M(f, e^u)` on `4 deg + 64` equispaced angles (one FFT)
/// followed by golden-section refinement around the best angle.
struct CircleMax {
    terms: Vec<(usize, f64, f64)>,
    size: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl CircleMax {
    fn new(terms: Vec<(usize, f64, f64)>, degree: usize) -> Self {
        let size = 4 * degree + 64;
        let fft = FftPlanner::new().plan_fft_inverse(size);
        CircleMax { terms, size, fft }
    }

    fn log_max_modulus(&self, u: f64) -> f64 {
        let shift = self.terms.iter().map(|&(n, la, _)| term_log(n, la, u)).fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return shift;
        }
        let mut coeffs = vec![Complex64::zero(); self.size];
        for &(n, la, arg) in &self.terms {
            coeffs[n] = Complex64::from_polar((term_log(n, la, u) - shift).exp(), arg);
        }
        let mut values = coeffs.clone();
        self.fft.process(&mut values);
        let (best_j, best_abs) =
            values.iter().map(|z| z.norm()).enumerate().fold((0, -1.0), |(bj, bv), (j, v)| if v > bv { (j, v) } else { (bj, bv) });
        let step = 2.0 * PI / self.size as f64;
        let theta = best_j as f64 * step;
        let modulus_at = |t: f64| {
            let z = Complex64::from_polar(1.0, t);
            coeffs[..=self.terms.last().map_or(0, |t| t.0)].iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c).norm()
        };
        let refined = golden_section_max(modulus_at, theta - step, theta + step, 1e-12);
        shift + best_abs.max(refined.value).ln()
    }
}

/// `ln sup_{r>0} v(r) M(f, r)` with `M(f, r) = max_{|z|=r} |f(z)|`.
///
/// `M` is sampled, so the result never exceeds the true norm; it is exact up
/// to the angular tolerance, and exact for nonnegative coefficients where the
/// maximum sits at `z = r`.
pub fn poly_norm_v_log<T: Polar + Zero + Clone>(c: &Coefficients<T>, w: &Weight) -> Result<f64> {
    let terms = polar_terms(c);
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let (lo, hi) = (terms[0].0, terms[terms.len() - 1].0);
    let circle = CircleMax::new(terms, hi);
    radial_sup(w, lo, hi, |u| weight_term(w, u) + circle.log_max_modulus(u))
}

/// `ln max_{|z| = r} |f(z)|`.
pub fn log_max_modulus<T: Polar + Zero + Clone>(c: &Coefficients<T>, r: f64) -> f64 {
    let terms = polar_terms(c);
    let Some(deg) = terms.last().map(|t| t.0) else {
        return f64::NEG_INFINITY;
    };
    CircleMax::new(terms, deg).log_max_modulus(r.ln())
}

/// `ln sup_{a <= r <= b} v(r) M(f, r)` for `0 <= a <= b`.
pub fn poly_norm_v_log_on<T: Polar + Zero + Clone>(c: &Coefficients<T>, w: &Weight, r_min: f64, r_max: f64) -> f64 {
    let terms = polar_terms(c);
    let Some(deg) = terms.last().map(|t| t.0) else {
        return f64::NEG_INFINITY;
    };
    let circle = CircleMax::new(terms, deg);
    maximize_on_interval(|u| weight_term(w, u) + circle.log_max_modulus(u), r_min.ln(), r_max.ln()).value
}

/// One block of a [`BlockNormProfile`]: indices `m_lo..=m_hi` (empty when
/// `m_lo > m_hi`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockNorm {
    pub n: usize,
    pub m_lo: usize,
    pub m_hi: usize,
    #[serde(rename = "log_H", with = "crate::json")]
    pub log_norm: f64,
}

/// Per-block log-norms and their aggregate.
///
/// Block 0 holds the indices at or below the first boundary. When
/// `head_in_aggregate` is false it is reported but left out of
/// `log_aggregate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockNormProfile {
    pub blocks: Vec<BlockNorm>,
    /// Outer exponent; `inf` means the aggregate is a supremum.
    #[serde(with = "crate::json")]
    pub q: f64,
    pub head_in_aggregate: bool,
    #[serde(with = "crate::json")]
    pub log_aggregate: f64,
}

impl BlockNormProfile {
    pub fn new(blocks: Vec<BlockNorm>, q: f64, head_in_aggregate: bool) -> Self {
        let skip = usize::from(!head_in_aggregate);
        let logs: Vec<f64> = blocks.iter().skip(skip).map(|b| b.log_norm).collect();
        let log_aggregate = log_lp(&logs, q);
        BlockNormProfile { blocks, q, head_in_aggregate, log_aggregate }
    }

    pub fn log_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.log_norm).collect()
    }

    pub fn block(&self, n: usize) -> Option<&BlockNorm> {
        self.blocks.iter().find(|b| b.n == n)
    }

    /// CSV with columns `n,m_lo,m_hi,log_H`; floats carry 17 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m_lo,m_hi,log_H\n");
        for b in &self.blocks {
            let _ = writeln!(out, "{},{},{},{}", b.n, b.m_lo, b.m_hi, format_float(b.log_norm));
        }
        out
    }
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Integer index ranges of the blocks `(m_n, m_{n+1}]`, with block 0 holding
/// `0..=floor(m_1)`.
pub(crate) fn block_ranges(boundaries: &[f64]) -> Vec<(usize, usize)> {
    let floors: Vec<usize> = boundaries.iter().map(|m| m.floor() as usize).collect();
    let mut ranges = vec![(0, floors[0])];
    ranges.extend(floors.windows(2).map(|f| (f[0] + 1, f[1])));
    ranges
}

/// Groups `(index, value)` pairs into block `n` for each index.
pub(crate) fn assign_blocks<V>(ranges: &[(usize, usize)], items: impl IntoIterator<Item = (usize, V)>) -> Vec<Vec<(usize, V)>> {
    let mut grouped: Vec<Vec<(usize, V)>> = ranges.iter().map(|_| Vec::new()).collect();
    for (k, v) in items {
        // first block whose upper end reaches k
        let n = ranges.partition_point(|&(_, hi)| hi < k);
        grouped[n.min(ranges.len() - 1)].push((k, v));
    }
    grouped
}

pub(crate) fn check_coverage<T: Zero + Clone>(c: &Coefficients<T>, last: f64) -> Result<()> {
    match c.degree() {
        Some(d) if d > last.floor() as usize => Err(Error::Coverage { index: d, last }),
        _ => Ok(()),
    }
}

/// Which peak radius normalizes block `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRadius {
    /// `r_{m_n}`
    Start,
    /// `r_{m_{n+1}}`
    End,
}

/// Solid-hull block norms `ln H_n` along a Lusky sequence.
///
/// Block 0 (indices up to `m_1`) is evaluated at `r_{m_1}` and excluded
/// from the supremum.
pub fn hull_block_norms<T: Polar + Zero + Clone>(c: &Coefficients<T>, seq: &LuskySequence) -> Result<BlockNormProfile> {
    hull_block_norms_at(c, seq, BlockRadius::Start)
}

pub fn hull_block_norms_at<T: Polar + Zero + Clone>(
    c: &Coefficients<T>,
    seq: &LuskySequence,
    radius: BlockRadius,
) -> Result<BlockNormProfile> {
    check_coverage(c, seq.last_boundary())?;
    let w = seq.weight();
    let peaks = seq.peaks();
    let ranges = block_ranges(seq.boundaries());
    let grouped = assign_blocks(&ranges, polar_terms(c).into_iter().map(|(k, la, arg)| (k, (la, arg))));
    let blocks = grouped
        .iter()
        .enumerate()
        .map(|(n, items)| {
            let peak = match (n, radius) {
                (0, _) => &peaks[0],
                (_, BlockRadius::Start) => &peaks[n - 1],
                (_, BlockRadius::End) => &peaks[n],
            };
            let terms: Vec<(usize, f64, f64)> = items.iter().map(|&(k, (la, arg))| (k, la, arg)).collect();
            let log_norm = -w.log_weight(peak.r) + log_lp_at(&terms, peak.log_r, 2.0);
            BlockNorm { n, m_lo: ranges[n].0, m_hi: ranges[n].1, log_norm }
        })
        .collect();
    Ok(BlockNormProfile::new(blocks, f64::INFINITY, false))
}

/// Number of closed-form boundaries `p (ln b) n^2` needed to cover `degree`.
pub fn closed_form_block_count(degree: usize, p: f64, b: f64) -> usize {
    let scale = p * b.ln();
    let mut n = 2usize;
    while (scale * (n * n) as f64).floor() < degree as f64 {
        n += 1;
    }
    n
}

/// Hull block norms for `v = exp(-a r^p)` along `m_n = p (ln b) n^2` without
/// any peak search.
///
/// Substituting `r_{m_n} = ((ln b) n^2 / a)^{1/p}` and `v(r_{m_n}) = b^{-n^2}`
/// gives, for `b = e`, the per-term weight `e^{-2n^2} n^{4m/p} a^{-2m/p}`.
pub fn hull_block_norms_exp_closed_form<T: Polar + Zero + Clone>(c: &Coefficients<T>, a: f64, p: f64, b: f64) -> Result<BlockNormProfile> {
    if !(a > 0.0 && p > 0.0 && a.is_finite() && p.is_finite()) {
        return Err(Error::Argument(format!("a and p must be positive, got a = {a}, p = {p}")));
    }
    if !(b.is_finite() && b > 1.0) {
        return Err(Error::Argument(format!("b must exceed 1, got {b}")));
    }
    let n_max = closed_form_block_count(c.degree().unwrap_or(0), p, b);
    let ln_b = b.ln();
    let boundaries: Vec<f64> = (1..=n_max).map(|n| p * ln_b * (n * n) as f64).collect();
    let ranges = block_ranges(&boundaries);
    let grouped = assign_blocks(&ranges, polar_terms(c).into_iter().map(|(k, la, arg)| (k, (la, arg))));
    let blocks = grouped
        .iter()
        .enumerate()
        .map(|(n, items)| {
            let j = n.max(1) as f64;
            let log_r = ((ln_b * j * j).ln() - a.ln()) / p;
            let log_v = -ln_b * j * j;
            let terms: Vec<(usize, f64, f64)> = items.iter().map(|&(k, (la, arg))| (k, la, arg)).collect();
            BlockNorm { n, m_lo: ranges[n].0, m_hi: ranges[n].1, log_norm: log_v + log_lp_at(&terms, log_r, 2.0) }
        })
        .collect();
    Ok(BlockNormProfile::new(blocks, f64::INFINITY, false))
}
