//! de la Vallée-Poussin type operators on coefficient sequences.
//!
//! `V_{n,m}` keeps indices `k <= [m]`, scales `[m] < k <= [n]` by
//! `([n] - k) / ([n] - [m])` and drops the rest (`[x]` is the floor).
//! Along a Lusky sequence, `V_1 = V_{m_2,m_1}` and
//! `V_n = V_{m_{n+1},m_n} - V_{m_n,m_{n-1}}` for `n >= 2`, so the tents
//! `γ^{(n)}` telescope: `Σ_{j<=N} V_j = V_{m_{N+1},m_N}`.
//!
//! Ramp factors are exact rationals so the telescoping and partition
//! identities hold exactly for rational coefficients.

use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lusky::LuskySequence;
use crate::series::{hull_block_norms, poly_norm_v_log, poly_norm_v_log_on, CoefficientSequence, Coefficients, LogPolar};
use crate::weights::monomial_norm_log;

/// Scalars that can be multiplied by an exact ramp factor.
pub trait RampScalar: Zero + Clone {
    fn ramp(&self, factor: Ratio<i64>) -> Self;
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl RampScalar for f64 {
    fn ramp(&self, factor: Ratio<i64>) -> Self {
        self * ratio_f64(factor)
    }
}

impl RampScalar for Complex64 {
    fn ramp(&self, factor: Ratio<i64>) -> Self {
        self * ratio_f64(factor)
    }
}

impl RampScalar for Ratio<i64> {
    fn ramp(&self, factor: Ratio<i64>) -> Self {
        self * factor
    }
}

impl RampScalar for Complex<Ratio<i64>> {
    fn ramp(&self, factor: Ratio<i64>) -> Self {
        Complex::new(self.re * factor, self.im * factor)
    }
}

impl RampScalar for LogPolar {
    fn ramp(&self, factor: Ratio<i64>) -> Self {
        let f = ratio_f64(factor);
        LogPolar::new(self.log_abs + f.abs().ln(), if f < 0.0 { self.arg + std::f64::consts::PI } else { self.arg })
    }
}

fn floor_i64(x: f64) -> i64 {
    x.floor() as i64
}

fn check_pair(m: f64, n: f64) -> Result<()> {
    if !(m.is_finite() && n.is_finite() && m >= 0.0 && m < n) {
        return Err(Error::Argument(format!("need 0 <= m < n, got m = {m}, n = {n}")));
    }
    Ok(())
}

/// Multiplier of index `k` under `V_{n,m}`; `m = 0` gives `V_{n,0}`.
pub fn ramp_factor(k: usize, m: f64, n: f64) -> Ratio<i64> {
    let (fm, fn_) = (floor_i64(m), floor_i64(n));
    let k = k as i64;
    if k <= fm {
        Ratio::one()
    } else if k > fn_ {
        Ratio::zero()
    } else {
        Ratio::new(fn_ - k, fn_ - fm)
    }
}

/// `V_{n,m} f` for `0 <= m < n`.
pub fn apply_v<T: RampScalar>(f: &Coefficients<T>, m: f64, n: f64) -> Result<Coefficients<T>> {
    check_pair(m, n)?;
    Ok(f.map(|k, a| a.ramp(ramp_factor(k, m, n))))
}

fn check_tent(seq: &LuskySequence, n: usize) -> Result<()> {
    let count = seq.boundaries().len();
    if n == 0 || n + 1 > count {
        return Err(Error::Argument(format!("tent index {n} outside 1..={}", count.saturating_sub(1))));
    }
    Ok(())
}

/// Tent weight `γ^{(n)}_k` of `V_n` (1-based `n`).
pub fn gamma(seq: &LuskySequence, n: usize, k: usize) -> Result<Ratio<i64>> {
    check_tent(seq, n)?;
    let m = seq.boundaries();
    let upper = ramp_factor(k, m[n - 1], m[n]);
    if n == 1 {
        return Ok(upper);
    }
    Ok(upper - ramp_factor(k, m[n - 2], m[n - 1]))
}

/// `V_n f`; supported in `([m_{n-1}], [m_{n+1}]]`.
pub fn apply_vn<T: RampScalar>(f: &Coefficients<T>, seq: &LuskySequence, n: usize) -> Result<Coefficients<T>> {
    check_tent(seq, n)?;
    Ok(f.map(|k, a| a.ramp(gamma(seq, n, k).expect("tent index checked"))))
}

/// Random test polynomial of degree at most `max_degree`, never zero.
///
/// Each present coefficient has modulus `e^{U(-2,2)} / ||z^k||_v`, so every
/// index contributes at the same scale.
pub fn random_polynomial(seq: &LuskySequence, max_degree: usize, rng: &mut ChaCha8Rng) -> Result<CoefficientSequence> {
    let w = seq.weight();
    let degree = rng.gen_range(0..=max_degree);
    let mut entries = Vec::new();
    for k in 0..=degree {
        if k < degree && rng.gen_bool(0.3) {
            continue;
        }
        let log_abs = rng.gen_range(-2.0..2.0) - monomial_norm_log(w, k as f64)?;
        let arg = rng.gen_range(0.0..std::f64::consts::TAU);
        entries.push((k, Complex64::from_polar(log_abs.exp(), arg)));
    }
    Ok(Coefficients::from_entries(entries))
}

fn check_degree(seq: &LuskySequence, trials: usize, max_degree: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    if seq.boundaries().len() < 2 {
        return Err(Error::Argument("need at least two boundaries".into()));
    }
    let last = seq.last_boundary();
    if max_degree > last.floor() as usize {
        return Err(Error::Coverage { index: max_degree, last });
    }
    Ok(())
}

/// Empirical lower estimate of `D = sup_n ||V_n||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VpNormEstimate {
    #[serde(rename = "log_D", with = "crate::json")]
    pub log_d: f64,
    pub trials: usize,
    pub max_degree: usize,
    pub seed: u64,
    /// Tent index attaining the estimate.
    pub block: usize,
}

/// `max ln ||V_n f||_v - ln ||f||_v` over random polynomials and all tents,
/// plus the plateau monomials `z^{[m_n]}` (which `V_n` fixes).
pub fn estimate_vp_operator_norm(seq: &LuskySequence, trials: usize, max_degree: usize, seed: u64) -> Result<VpNormEstimate> {
    check_degree(seq, trials, max_degree)?;
    let w = seq.weight();
    let tents = seq.boundaries().len() - 1;
    let mut best = (f64::NEG_INFINITY, 1usize);
    for n in 1..=tents {
        let apex = seq.boundaries()[n - 1].floor() as usize;
        let f = Coefficients::<f64>::unit(apex);
        let ratio = poly_norm_v_log(&apply_vn(&f, seq, n)?, w)? - poly_norm_v_log(&f, w)?;
        if ratio > best.0 {
            best = (ratio, n);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let f = random_polynomial(seq, max_degree, &mut rng)?;
        let norm = poly_norm_v_log(&f, w)?;
        for n in 1..=tents {
            let vf = apply_vn(&f, seq, n)?;
            if vf.is_empty() {
                continue;
            }
            let ratio = poly_norm_v_log(&vf, w)? - norm;
            if ratio > best.0 {
                best = (ratio, n);
            }
        }
    }
    Ok(VpNormEstimate { log_d: best.0, trials, max_degree, seed, block: best.1 })
}

/// Range of `ln (sup_n sup_{r_{m_{n-1}} <= r <= r_{m_{n+1}}} v(r) M(V_n f, r) / ||f||_v)`
/// over random polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationEnvelope {
    #[serde(rename = "log_c1", with = "crate::json")]
    pub log_c1: f64,
    #[serde(rename = "log_c2", with = "crate::json")]
    pub log_c2: f64,
    pub samples: usize,
    pub seed: u64,
}

pub fn localization_envelope(seq: &LuskySequence, trials: usize, max_degree: usize, seed: u64) -> Result<LocalizationEnvelope> {
    check_degree(seq, trials, max_degree)?;
    let w = seq.weight();
    let peaks = seq.peaks();
    let tents = seq.boundaries().len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..trials {
        let f = random_polynomial(seq, max_degree, &mut rng)?;
        let norm = poly_norm_v_log(&f, w)?;
        let mut local = f64::NEG_INFINITY;
        for n in 1..=tents {
            let vf = apply_vn(&f, seq, n)?;
            if vf.is_empty() {
                continue;
            }
            let r_min = if n == 1 { 0.0 } else { peaks[n - 2].r };
            local = local.max(poly_norm_v_log_on(&vf, w, r_min, peaks[n].r));
        }
        lo = lo.min(local - norm);
        hi = hi.max(local - norm);
    }
    Ok(LocalizationEnvelope { log_c1: lo, log_c2: hi, samples: trials, seed })
}

/// Largest hull block norm `ln H_n` (blocks `n >= 1`) over random
/// polynomials normalized to `||f||_v = 1`.
pub fn hull_step_constant(seq: &LuskySequence, trials: usize, max_degree: usize, seed: u64) -> Result<f64> {
    check_degree(seq, trials, max_degree)?;
    let w = seq.weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let f = random_polynomial(seq, max_degree, &mut rng)?;
        let norm = poly_norm_v_log(&f, w)?;
        let profile = hull_block_norms(&f, seq)?;
        worst = worst.max(profile.log_aggregate - norm);
    }
    Ok(worst)
}
