//! One-dimensional search routines: radius-doubling brackets, golden-section
//! maximization and bisection on monotone functions.
//!
//! Radial searches run in the variable `u = ln r`, which makes tolerances
//! relative in `r` and keeps the objectives (log-norms) close to concave.

use crate::error::{Error, Result};

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Smallest radius sampled by the doubling bracket, `2^-20`.
pub const BRACKET_START_EXP: i32 = -20;

/// Maximum number of doublings before a search gives up.
pub const MAX_DOUBLINGS: i32 = 1024;

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

impl Maximum {
    fn better(self, other: Maximum) -> Maximum {
        // ties keep `self`, which callers arrange to be the smaller abscissa
        if other.value > self.value || self.value.is_nan() {
            other
        } else {
            self
        }
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`. The returned point is the
/// best of all evaluated points.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Maximum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = Maximum { x: c, value: fc }.better(Maximum { x: d, value: fd });
    let mut iters = 0;
    while (b - a) > tol && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            best = best.better(Maximum { x: c, value: fc });
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            best = best.better(Maximum { x: d, value: fd });
        }
        iters += 1;
    }
    best
}

/// Brackets the maximizer of a radial objective `g(r)` by doubling.
///
/// Samples `r = 2^k` from `k = -20` through `k = 0`, then keeps doubling
/// until the objective has decreased twice in a row. Returns `(ln r_lo,
/// ln r_hi)` around the best sample. If the best sample is the smallest one,
/// the search continues downward by halving.
pub fn doubling_bracket(g: impl Fn(f64) -> f64, m: f64) -> Result<(f64, f64)> {
    let eval = |k: i32| g(2f64.powi(k));
    let mut values: Vec<(i32, f64)> = Vec::new();
    let mut k = BRACKET_START_EXP;
    loop {
        let v = eval(k);
        values.push((k, v));
        let n = values.len();
        if k >= 0 && n >= 3 {
            let (a, b, c) = (values[n - 3].1, values[n - 2].1, values[n - 1].1);
            if c < b && b < a {
                break;
            }
        }
        if k >= MAX_DOUBLINGS - 1 {
            return Err(Error::NotRapidlyDecreasing { m });
        }
        k += 1;
    }
    let (best_idx, _) =
        values.iter().enumerate().fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &(_, v))| if v > bv { (i, v) } else { (bi, bv) });
    let ln2 = std::f64::consts::LN_2;
    if best_idx == 0 {
        // the maximizer sits below 2^-20: halve until the objective turns down
        let mut prev = values[0].1;
        let mut k = BRACKET_START_EXP - 1;
        while k > -1000 {
            let v = eval(k);
            if v < prev {
                return Ok(((k as f64) * ln2, ((k + 2) as f64) * ln2));
            }
            prev = v;
            k -= 1;
        }
        return Err(Error::Domain(format!("no interior maximum above 2^-1000 for m = {m}")));
    }
    let k_best = values[best_idx].0;
    Ok((((k_best - 1) as f64) * ln2, ((k_best + 1) as f64) * ln2))
}

/// Bisection for the sign change of a nondecreasing function `h` on `[lo, hi]`.
///
/// Requires `h(lo) <= 0 <= h(hi)`. Runs until the midpoint collapses onto an
/// endpoint or `done(h(mid))` holds.
pub fn bisect_nondecreasing(mut h: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, done: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let v = h(mid);
        if done(v) {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid spacing (in `ln r`) used by [`maximize_on_interval`].
pub const GRID_STEP: f64 = std::f64::consts::LN_2 / 8.0;

/// Maximizes `f(u)` over `u ∈ [u_lo, u_hi]`.
///
/// `u_lo = -inf` stands for `r = 0`; then `f(-inf)` is evaluated as a
/// candidate and the grid starts at `min(-20 ln 2, u_hi)`. The interval is
/// scanned on a grid of spacing at most [`GRID_STEP`], and every local
/// maximum of the grid is refined by golden section. Ties resolve to the
/// smallest `u`.
pub fn maximize_on_interval(f: impl Fn(f64) -> f64, u_lo: f64, u_hi: f64) -> Maximum {
    let mut best = Maximum { x: f64::NEG_INFINITY, value: f64::NEG_INFINITY };
    let start = if u_lo == f64::NEG_INFINITY {
        best = Maximum { x: f64::NEG_INFINITY, value: f(f64::NEG_INFINITY) };
        (BRACKET_START_EXP as f64 * std::f64::consts::LN_2).min(u_hi)
    } else {
        u_lo
    };
    if u_hi <= start {
        return best.better(Maximum { x: u_hi, value: f(u_hi) });
    }
    let n = (((u_hi - start) / GRID_STEP).ceil() as usize).max(1) + 1;
    let h = (u_hi - start) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| if i + 1 == n { u_hi } else { start + h * i as f64 }).collect();
    let vals: Vec<f64> = grid.iter().map(|&u| f(u)).collect();
    for i in 0..n {
        best = best.better(Maximum { x: grid[i], value: vals[i] });
    }
    for i in 0..n {
        let left_ok = i == 0 || vals[i] > vals[i - 1];
        let right_ok = i + 1 == n || vals[i] >= vals[i + 1];
        if !(left_ok && right_ok) || !vals[i].is_finite() {
            continue;
        }
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(n - 1)];
        let tol = 1e-11 * grid[i].abs().max(1.0);
        let refined = golden_section_max(&f, a, b, tol);
        // keep the grid point when refinement does not improve on it
        let local = Maximum { x: grid[i], value: vals[i] }.better(refined);
        best = best.better(local);
    }
    best
}
