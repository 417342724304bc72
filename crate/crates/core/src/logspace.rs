//! Log-space arithmetic helpers.
//!
//! Norms in this crate routinely involve quantities like `n^{2m} e^{-n^2}`
//! that overflow `f64` long before they become interesting, so everything is
//! carried as a natural logarithm. `-inf` encodes zero.
//!
//! The `*_kernel` functions evaluate differences such as `x - ln(1 + x)` that
//! cancel catastrophically for small `x`; below [`SERIES_THRESHOLD`] they
//! switch to a power series.

/// Below this `|x|` the cancellation-prone kernels use their Taylor series.
pub const SERIES_THRESHOLD: f64 = 0.1;

const MAX_SERIES_TERMS: usize = 80;

/// `ln(e^a + e^b)` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`. Empty input and all `-inf` inputs give `-inf`.
pub fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// `ln (Σ e^{p x_i})^{1/p}` for `1 <= p < inf`, and `max x_i` for `p = inf`.
///
/// This is the log of the `ℓ_p` norm of a vector given by its log-moduli.
pub fn log_lp(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    log_sum_exp(values.iter().map(|&x| p * x)) / p
}

fn alternating_series(x: f64, coeff: impl Fn(usize) -> f64, first: usize) -> f64 {
    // Σ_{k >= first} coeff(k) x^k
    let mut pow = x.powi(first as i32);
    let mut sum = 0.0;
    for k in first..first + MAX_SERIES_TERMS {
        let term = coeff(k) * pow;
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() {
            break;
        }
        pow *= x;
    }
    sum
}

/// `x - ln(1 + x)`, nonnegative for `x > -1`.
pub fn x_minus_log1p_kernel(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        // Σ_{k>=2} (-1)^k x^k / k
        alternating_series(x, |k| if k % 2 == 0 { 1.0 / k as f64 } else { -1.0 / k as f64 }, 2)
    } else {
        x - x.ln_1p()
    }
}

/// `(1 + x) ln(1 + x) - x`, nonnegative for `x > -1`.
pub fn xlogx_kernel(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        // Σ_{k>=2} (-1)^k x^k / (k (k-1))
        alternating_series(
            x,
            |k| {
                let c = 1.0 / (k * (k - 1)) as f64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            },
            2,
        )
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

/// `-ln(1 - x) - x` for `0 <= x < 1`.
pub fn neg_log1m_minus_x_kernel(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        alternating_series(x, |k| 1.0 / k as f64, 2)
    } else {
        -(-x).ln_1p() - x
    }
}

/// `(2 + x) ln(1 + x) - 2x`, the gap between [`xlogx_kernel`] and
/// [`x_minus_log1p_kernel`]. Behaves like `x^3 / 6` near zero.
pub fn log_ratio_gap_kernel(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        // Σ_{k>=3} (-1)^k (2 - k) x^k / (k (k-1))
        alternating_series(
            x,
            |k| {
                let c = (2.0 - k as f64) / (k * (k - 1)) as f64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            },
            3,
        )
    } else {
        (2.0 + x) * x.ln_1p() - 2.0 * x
    }
}

/// `(1/t + 1/2) ln(1 + t) - 1`, i.e. `ln((1 + t)^{1/t + 1/2}) - 1`.
///
/// With `t = 1/n` this is `ln η_n - 1` for `η_n = (1 + 1/n)^{n + 1/2}`.
pub fn eta_excess_kernel(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        // Σ_{k>=2} (-1)^k (k-1) t^k / (2k(k+1))
        alternating_series(
            t,
            |k| {
                let c = (k - 1) as f64 / (2 * k * (k + 1)) as f64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            },
            2,
        )
    } else {
        (1.0 / t + 0.5) * t.ln_1p() - 1.0
    }
}

/// `ln |z|` with `ln 0 = -inf`.
#[inline]
pub fn ln_abs(x: f64) -> f64 {
    x.abs().ln()
}
