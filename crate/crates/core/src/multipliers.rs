//! Mixed block norms `ℓ^J(p,q)` and coefficient multipliers from `H∞_v`
//! into `ℓ_p`.
//!
//! For boundaries `J = (j_0 < j_1 < ...)` the blocks are `{0..=j_0}` and
//! `(j_{k-1}, j_k]`. A sequence lies in `ℓ^J(p,q)` when its per-block `ℓ_p`
//! norms form an `ℓ_q` sequence; `ℓ^J(p,p) = ℓ_p`.
//!
//! `λ` multiplies `H∞_v` into `ℓ_p` iff `c_m = |λ_m| / (v(r_{m_n}) r_{m_n}^m)`
//! (for `m` in Lusky block `n`) lies in `ℓ^J(r,s)` with `(r,s)` from
//! [`multiplier_case`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::log_lp;
use crate::lusky::LuskySequence;
use crate::series::{assign_blocks, block_ranges, check_coverage, BlockNorm, BlockNormProfile, Coefficients, Polar};

/// Exponents and block boundaries of `ℓ^J(p,q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpqSpec {
    #[serde(with = "crate::json")]
    pub p: f64,
    #[serde(with = "crate::json")]
    pub q: f64,
    #[serde(rename = "J")]
    pub boundaries: Vec<usize>,
}

fn check_exponent(name: &str, x: f64) -> Result<()> {
    if x >= 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("{name} must lie in [1, inf], got {x}")))
    }
}

impl LpqSpec {
    pub fn new(p: f64, q: f64, boundaries: Vec<usize>) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        if boundaries.is_empty() {
            return Err(Error::Argument("J needs at least one boundary".into()));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("J must be strictly increasing".into()));
        }
        Ok(LpqSpec { p, q, boundaries })
    }

    /// Integer boundaries `[m_n]` of a Lusky sequence.
    pub fn from_lusky(p: f64, q: f64, seq: &LuskySequence) -> Result<Self> {
        let mut j: Vec<usize> = seq.boundaries().iter().map(|m| m.floor() as usize).collect();
        j.dedup();
        Self::new(p, q, j)
    }

    fn ranges(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(0, self.boundaries[0])];
        out.extend(self.boundaries.windows(2).map(|w| (w[0] + 1, w[1])));
        out
    }
}

fn block_profile(
    ranges: &[(usize, usize)],
    logs: impl IntoIterator<Item = (usize, f64)>,
    inner: f64,
    outer: f64,
    head_in_aggregate: bool,
) -> BlockNormProfile {
    let grouped = assign_blocks(ranges, logs);
    let blocks = grouped
        .iter()
        .enumerate()
        .map(|(n, items)| {
            let values: Vec<f64> = items.iter().map(|&(_, x)| x).collect();
            BlockNorm { n, m_lo: ranges[n].0, m_hi: ranges[n].1, log_norm: log_lp(&values, inner) }
        })
        .collect();
    BlockNormProfile::new(blocks, outer, head_in_aggregate)
}

/// Per-block `ℓ_p` norms with the `ℓ_q` aggregate (head block included).
pub fn lpq_profile<T: Polar + num_traits::Zero + Clone>(c: &Coefficients<T>, spec: &LpqSpec) -> Result<BlockNormProfile> {
    let last = *spec.boundaries.last().expect("spec validated");
    check_coverage(c, last as f64)?;
    let logs = c.iter().map(|(k, a)| (k, a.log_abs()));
    Ok(block_profile(&spec.ranges(), logs, spec.p, spec.q, true))
}

/// `ln ||c||_{ℓ^J(p,q)}`.
pub fn lpq_norm_log<T: Polar + num_traits::Zero + Clone>(c: &Coefficients<T>, spec: &LpqSpec) -> Result<f64> {
    Ok(lpq_profile(c, spec)?.log_aggregate)
}

/// Target `ℓ_p` and the block exponents `(r, s)` characterizing multipliers
/// into it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierCase {
    #[serde(with = "crate::json")]
    pub p_target: f64,
    #[serde(with = "crate::json")]
    pub r: f64,
    #[serde(with = "crate::json")]
    pub s: f64,
}

/// `(2p/(2-p), p)` for `1 <= p < 2`, `(inf, p)` for `2 <= p < inf`,
/// `(inf, inf)` for `p = inf`.
pub fn multiplier_case(p: f64) -> Result<MultiplierCase> {
    check_exponent("p", p)?;
    let (r, s) = if p < 2.0 {
        (2.0 * p / (2.0 - p), p)
    } else if p.is_finite() {
        (f64::INFINITY, p)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(MultiplierCase { p_target: p, r, s })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierProfile {
    pub case: MultiplierCase,
    pub profile: BlockNormProfile,
}

/// Block profile of `c_m = |λ_m| / (v(r_{m_n}) r_{m_n}^m)` in `ℓ^J(r,s)`.
///
/// Block 0 (indices up to `m_1`) uses `r_{m_1}` and is left out of the
/// aggregate. Only a truncation is ever measured; whether the infinite
/// sequence is a multiplier is read off the trend of the block norms.
pub fn multiplier_profile<T: Polar + num_traits::Zero + Clone>(
    lambda: &Coefficients<T>,
    seq: &LuskySequence,
    p: f64,
) -> Result<MultiplierProfile> {
    let case = multiplier_case(p)?;
    check_coverage(lambda, seq.last_boundary())?;
    let w = seq.weight();
    let peaks = seq.peaks();
    let ranges = block_ranges(seq.boundaries());
    // ln v(r) + m ln r at the radius of each block
    let scale: Vec<(f64, f64)> = (0..ranges.len())
        .map(|n| {
            let peak = &peaks[n.saturating_sub(1)];
            (-w.log_weight(peak.r), peak.log_r)
        })
        .collect();
    let block_of = |k: usize| ranges.partition_point(|&(_, hi)| hi < k);
    let logs = lambda.iter().map(|(k, l)| {
        let (log_v, log_r) = scale[block_of(k)];
        let log_rk = if k == 0 { 0.0 } else { k as f64 * log_r };
        (k, l.log_abs() - log_v - log_rk)
    });
    let profile = block_profile(&ranges, logs, case.r, case.s, false);
    Ok(MultiplierProfile { case, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lusky::closed_form_exp_weight;
    use crate::series::LogPolar;
    use std::f64::consts::E;

    #[test]
    fn cases() {
        let c = multiplier_case(1.0).unwrap();
        assert_eq!((c.r, c.s), (2.0, 1.0));
        let c = multiplier_case(2.0).unwrap();
        assert_eq!((c.r, c.s), (f64::INFINITY, 2.0));
        let c = multiplier_case(f64::INFINITY).unwrap();
        assert_eq!((c.r, c.s), (f64::INFINITY, f64::INFINITY));
        assert!(multiplier_case(0.5).is_err());
        assert!(multiplier_case(f64::NAN).is_err());
        for p in [1.0, 1.2, 1.5, 1.9] {
            let c = multiplier_case(p).unwrap();
            assert!((1.0 / p - 0.5 - 1.0 / c.r).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_computed_mixed_norm() {
        let spec = LpqSpec::new(2.0, f64::INFINITY, vec![0, 2, 6]).unwrap();
        let a = Coefficients::from_entries((1..=6).map(|k| (k, 1.0)));
        let prof = lpq_profile(&a, &spec).unwrap();
        let norms: Vec<f64> = prof.blocks.iter().map(|b| b.log_norm.exp()).collect();
        assert_eq!(norms[0], 0.0);
        assert!((norms[1] - 2f64.sqrt()).abs() < 1e-15);
        assert!((norms[2] - 2.0).abs() < 1e-15);
        assert!((prof.log_aggregate - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unit_vectors_have_norm_one() {
        for (p, q) in [(1.0, 1.0), (2.0, 3.0), (f64::INFINITY, 1.5)] {
            let spec = LpqSpec::new(p, q, vec![1, 4, 9]).unwrap();
            for k in 0..=9 {
                assert!(lpq_norm_log(&Coefficients::<f64>::unit(k), &spec).unwrap().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(LpqSpec::new(2.0, 2.0, vec![3, 3]).is_err());
        assert!(LpqSpec::new(0.5, 2.0, vec![3]).is_err());
        assert!(LpqSpec::new(2.0, 2.0, vec![]).is_err());
        let spec = LpqSpec::new(2.0, 2.0, vec![3]).unwrap();
        assert!(matches!(lpq_norm_log(&Coefficients::<f64>::unit(4), &spec), Err(Error::Coverage { .. })));
    }

    #[test]
    fn exp_weight_rescaling_is_flat() {
        // λ_m = e^{-n^2} n^{2m} gives c_m = 1 on blocks 1..20
        let seq = closed_form_exp_weight(1.0, 1.0, E, 21).unwrap();
        let lambda = Coefficients::from_entries((1..=20usize).flat_map(|n| {
            let nf = n as f64;
            (n * n + 1..=(n + 1) * (n + 1)).map(move |m| (m, LogPolar::from_log_abs(-nf * nf + 2.0 * m as f64 * nf.ln())))
        }));
        let out = multiplier_profile(&lambda, &seq, f64::INFINITY).unwrap();
        for b in &out.profile.blocks[1..] {
            assert!(b.log_norm.abs() < 1e-9, "{b:?}");
        }
        assert!(out.profile.log_aggregate.abs() < 1e-9);
    }

    #[test]
    fn single_term_multiplier() {
        let seq = closed_form_exp_weight(1.0, 1.0, E, 6).unwrap();
        let (n, k) = (3.0f64, 12usize);
        let out = multiplier_profile(&Coefficients::<f64>::unit(k), &seq, 1.0).unwrap();
        let expected = n * n - 2.0 * k as f64 * n.ln();
        assert!((out.profile.log_aggregate - expected).abs() < 1e-10);
        assert_eq!((out.case.r, out.case.s), (2.0, 1.0));
    }

    #[test]
    fn sup_case_matches_rescaled_lpq() {
        let seq = closed_form_exp_weight(1.0, 1.0, E, 8).unwrap();
        let lambda = Coefficients::from_dense((0..=60).map(|k| 1.0 / (1.0 + k as f64)));
        let out = multiplier_profile(&lambda, &seq, f64::INFINITY).unwrap();
        let peaks = seq.peaks();
        let rescaled = Coefficients::from_entries(lambda.iter().filter(|(k, _)| *k > 1).map(|(k, l)| {
            let n = (k as f64 - 1.0).sqrt().floor() as usize;
            let peak = &peaks[n - 1];
            (k, LogPolar::from_log_abs(l.ln() + seq.weight().log_weight(peak.r) - k as f64 * peak.log_r))
        }));
        let spec = LpqSpec::from_lusky(f64::INFINITY, f64::INFINITY, &seq).unwrap();
        assert!((lpq_norm_log(&rescaled, &spec).unwrap() - out.profile.log_aggregate).abs() < 1e-12);
    }
}
