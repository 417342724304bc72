//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the lines always reach stdout:
//! `cargo test --test acceptance`.

use std::f64::consts::E;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use solidhull::lusky::{log_ratios, validate_condition_35};
use solidhull::multipliers::{lpq_norm_log, multiplier_case, multiplier_profile, LpqSpec};
use solidhull::series::{coeff_l2_lower_bound_log, core_norm_log, hull_block_norms, poly_norm_v_log};
use solidhull::vallee_poussin::{apply_vn, gamma};
use solidhull::verify::{eta_minus_e, run_all, DEFAULT_SEED};
use solidhull::weights::r_peak_numeric;
use solidhull::{closed_form_exp_weight, construct_sequence, Coefficients, LogPolar, LuskyConfig, LuskySequence, Weight};

const MARGIN_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exp_r() -> Weight {
    Weight::exp_power(1.0, 1.0).unwrap()
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))?;
    Ok(elapsed)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let seq = closed_form_exp_weight(1.0, 1.0, E, 201).map_err(|e| e.to_string())?;
    let mut worst = f64::INFINITY;
    for n in 4..=200usize {
        let (la, lb) = (seq.log_a()[n - 1], seq.log_b()[n - 1]);
        let margin = (la - 1.0).min(4.5 - la).min(lb - 1.0).min(4.0 - lb).min(lb - la);
        worst = worst.min(margin);
        ensure(margin >= -MARGIN_TOL, || format!("n = {n}: ln A = {la}, ln B = {lb}"))?;
    }
    let report = validate_condition_35(&seq, E, E.powf(4.5)).map_err(|e| e.to_string())?;
    ensure(report.pass, || format!("condition check failed: {report:?}"))?;
    let elapsed = within_time(start, Duration::from_secs(1), "closed-form certification")?;
    Ok(format!("n = 4..200, worst margin {worst:.3e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    // 40-digit references
    const LOG_A: f64 = 1.859_406_357_945_287_815;
    const LOG_B: f64 = 2.157_177_565_710_487_788;
    let (la, lb) = log_ratios(&exp_r(), 16.0, 25.0).map_err(|e| e.to_string())?;
    ensure((la - LOG_A).abs() <= 1e-9, || format!("ln A(16,25) = {la}"))?;
    ensure((lb - LOG_B).abs() <= 1e-9, || format!("ln B(16,25) = {lb}"))?;
    Ok(format!("ln A = {la:.12}, ln B = {lb:.12}"))
}

fn criterion_3() -> Outcome {
    // root of (M - 16) - 16 ln(M/16) = 1, 40-digit reference
    const AFTER_16: f64 = 22.342_258_879_269_06;
    let start = Instant::now();
    let cfg = LuskyConfig::new(E, 1.0);
    let seq = construct_sequence(&exp_r(), &cfg, 51).map_err(|e| e.to_string())?;
    ensure(seq.block_count() == 50, || format!("{} blocks", seq.block_count()))?;
    for i in 0..seq.block_count() {
        let gap = seq.log_a()[i].min(seq.log_b()[i]) - 1.0;
        ensure(gap.abs() <= MARGIN_TOL, || format!("block {}: min(ln A, ln B) - 1 = {gap:e}", i + 1))?;
    }
    let report = validate_condition_35(&seq, E, seq.certified_k()).map_err(|e| e.to_string())?;
    ensure(report.pass, || format!("a posteriori K rejected: {report:?}"))?;
    let from_16 = construct_sequence(&exp_r(), &LuskyConfig::new(E, 16.0), 2).map_err(|e| e.to_string())?;
    let next = from_16.boundaries()[1];
    ensure((22.3..=22.4).contains(&next), || format!("boundary after 16 is {next}"))?;
    ensure((next - AFTER_16).abs() < 1e-6, || format!("boundary after 16 is {next}, oracle {AFTER_16}"))?;
    let elapsed = within_time(start, Duration::from_secs(1), "construction")?;
    Ok(format!("50 blocks, K = {:.4}, next after 16 = {next:.10}, {elapsed:.2?}", seq.certified_k()))
}

fn criterion_4() -> Outcome {
    let w = exp_r();
    let mut fact = 1.0;
    let c = Coefficients::from_dense((0..=60).map(|k| {
        if k > 0 {
            fact *= k as f64;
        }
        1.0 / fact
    }));
    let core = core_norm_log(&c, &w).map_err(|e| e.to_string())?;
    ensure(core.exp_m1().abs() <= 1e-8, || format!("core norm of exp series = {}", core.exp()))?;
    let mut worst = 0.0f64;
    for n in 1..=512u32 {
        let nf = n as f64;
        let exact = nf * nf.ln() - nf;
        let closed = solidhull::monomial_norm_log(&w, nf).map_err(|e| e.to_string())?;
        let searched = r_peak_numeric(&w, nf).map_err(|e| e.to_string())?.log_peak_value;
        // relative error of the norm is the absolute error of its logarithm
        for (how, v) in [("closed form", closed), ("search", searched)] {
            let err = (v - exact).abs();
            worst = worst.max(err);
            ensure(err <= 1e-10, || format!("||z^{n}|| via {how}: log error {err:e}"))?;
        }
    }
    Ok(format!("core = 1 {:+.1e}, monomials n <= 512 worst log error {worst:.1e}", core.exp_m1()))
}

fn random_sequence(rng: &mut ChaCha8Rng, positive: bool) -> Coefficients<LogPolar> {
    let degree = rng.gen_range(0..64usize);
    let mut entries = vec![];
    for k in 0..=degree {
        if k < degree && rng.gen_bool(0.5) {
            continue;
        }
        let log_abs = rng.gen_range(-8.0..8.0) * std::f64::consts::LN_10;
        let arg = if positive { 0.0 } else { rng.gen_range(0.0..std::f64::consts::TAU) };
        entries.push((k, LogPolar::new(log_abs, arg)));
    }
    Coefficients::from_entries(entries)
}

fn criterion_5() -> Outcome {
    let weights = [exp_r(), Weight::exp_power(1.0, 2.0).unwrap(), Weight::exp_exp()];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_sandwich, mut worst_equal) = (f64::INFINITY, 0.0f64);
    for i in 0..1000 {
        let w = &weights[i % weights.len()];
        let c = random_sequence(&mut rng, false);
        let l2 = coeff_l2_lower_bound_log(&c, w).map_err(|e| e.to_string())?;
        let poly = poly_norm_v_log(&c, w).map_err(|e| e.to_string())?;
        let core = core_norm_log(&c, w).map_err(|e| e.to_string())?;
        let margin = (poly - l2).min(core - poly);
        worst_sandwich = worst_sandwich.min(margin);
        ensure(margin >= -1e-6, || format!("sample {i}: l2 {l2}, poly {poly}, core {core}"))?;
        let pos = c.map(|_, z| LogPolar::from_log_abs(z.log_abs));
        let (p_poly, p_core) = (poly_norm_v_log(&pos, w).map_err(|e| e.to_string())?, core_norm_log(&pos, w).map_err(|e| e.to_string())?);
        worst_equal = worst_equal.max((p_poly - p_core).abs());
        ensure((p_poly - p_core).abs() <= 1e-8, || format!("sample {i}: positive poly {p_poly} vs core {p_core}"))?;
    }
    Ok(format!("1000 sequences, worst sandwich margin {worst_sandwich:.2e}, positive-case gap {worst_equal:.1e}"))
}

/// `floor(sqrt(x) * 10^digits)` for a nonnegative rational.
fn sqrt_scaled(x: &BigRational, digits: u32) -> BigUint {
    let scale = BigInt::from(10u32).pow(2 * digits);
    let scaled = (x * BigRational::from_integer(scale)).floor().to_integer();
    scaled.magnitude().sqrt()
}

fn criterion_6() -> Outcome {
    let factorial = |m: u32| (1..=m).fold(BigInt::one(), |acc, k| acc * k);
    let sum = (5..=9u32).fold(BigRational::zero(), |acc, m| {
        let f = factorial(m);
        acc + BigRational::new(BigInt::from(4u32).pow(2 * m), &f * &f)
    });
    // e^4 to far beyond double precision
    let e4 = (0..=80u32).fold(BigRational::zero(), |acc, k| acc + BigRational::new(BigInt::from(4u32).pow(k), factorial(k)));
    let squared = sum / (&e4 * &e4);
    let digits = 30;
    let oracle = sqrt_scaled(&squared, digits).to_f64().unwrap() / 10f64.powi(digits as i32);

    let seq = closed_form_exp_weight(1.0, 1.0, E, 8).map_err(|e| e.to_string())?;
    let mut fact = 1.0;
    let c = Coefficients::from_dense((0..=60).map(|k| {
        if k > 0 {
            fact *= k as f64;
        }
        1.0 / fact
    }));
    let profile = hull_block_norms(&c, &seq).map_err(|e| e.to_string())?;
    let block = profile.block(2).ok_or("no block 2")?;
    ensure((block.m_lo, block.m_hi) == (5, 9), || format!("block 2 covers {}..={}", block.m_lo, block.m_hi))?;
    let h2 = block.log_norm.exp();
    ensure((h2 - oracle).abs() <= 1e-10, || format!("H_2 = {h2}, oracle {oracle}"))?;
    Ok(format!("H_2 = {h2:.15}, rational oracle {oracle:.15}"))
}

type Q = Ratio<i64>;

fn random_rational_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Coefficients<Complex<Q>> {
    let degree = rng.gen_range(0..=max_degree);
    Coefficients::from_entries((0..=degree).map(|k| {
        let re = Q::new(rng.gen_range(-50..=50), rng.gen_range(1..=12));
        let im = Q::new(rng.gen_range(-50..=50), rng.gen_range(1..=12));
        (k, Complex::new(re, im))
    }))
}

fn check_vp_algebra(seq: &LuskySequence, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let tents = seq.boundaries().len() - 1;
    let m_n = seq.boundaries()[tents - 1].floor() as usize;
    for t in 0..100 {
        let f = random_rational_poly(rng, m_n);
        let mut total = Coefficients::zero_sequence();
        for j in 1..=tents {
            total = &total + &apply_vn(&f, seq, j).map_err(|e| e.to_string())?;
        }
        ensure(total == f, || format!("trial {t}: telescoped sum differs from f (degree {:?})", f.degree()))?;
    }
    for n in 1..tents {
        let lo = seq.boundaries()[n - 1].floor() as usize;
        let hi = seq.boundaries()[n].floor() as usize;
        for k in (lo + 1)..=hi {
            let s = gamma(seq, n, k).unwrap() + gamma(seq, n + 1, k).unwrap();
            ensure(s == Q::one(), || format!("tents {n},{} at k = {k} sum to {s}", n + 1))?;
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let squares = closed_form_exp_weight(1.0, 1.0, E, 9).map_err(|e| e.to_string())?;
    check_vp_algebra(&squares, &mut rng)?;
    let built = construct_sequence(&exp_r(), &LuskyConfig::new(E, 1.0), 9).map_err(|e| e.to_string())?;
    check_vp_algebra(&built, &mut rng)?;
    Ok("200 rational polynomials telescope exactly; adjacent tents sum to 1".into())
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let reports = run_all(DEFAULT_SEED).map_err(|e| e.to_string())?;
    within_time(start, Duration::from_secs(10), "library sweep")?;
    let required = ["scalar_65", "scalar_70", "lemma_log1", "lemma_log2", "lemma_estimates", "prop_exp", "remark9"];
    for name in required {
        let r = reports.iter().find(|r| r.name == name).ok_or_else(|| format!("{name} missing"))?;
        ensure(r.samples >= 10_000, || format!("{name}: only {} samples", r.samples))?;
        ensure(r.pass && r.worst_margin >= -MARGIN_TOL, || format!("{name}: worst margin {:e}, witness {:?}", r.worst_margin, r.witness))?;
    }
    let eta_gap = eta_minus_e(100.0).abs();
    ensure(eta_gap <= 3e-5, || format!("|eta_100 - e| = {eta_gap:e}"))?;

    let start = Instant::now();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_solidhull"))
        .args(["verify", "--all"])
        .env_remove("SOLIDHULL_SEED")
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    let elapsed = within_time(start, Duration::from_secs(10), "verify --all")?;
    ensure(status.success(), || format!("verify --all exited with {status}"))?;
    let min_margin = reports.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
    Ok(format!("{} reports pass, min margin {min_margin:.2e}, |eta_100 - e| = {eta_gap:.4e}, verify --all {elapsed:.2?}", reports.len()))
}

fn criterion_9() -> Outcome {
    for (p, r, s) in [(1.0, 2.0, 1.0), (2.0, f64::INFINITY, 2.0), (f64::INFINITY, f64::INFINITY, f64::INFINITY)] {
        let case = multiplier_case(p).map_err(|e| e.to_string())?;
        ensure((case.r, case.s) == (r, s), || format!("p = {p}: got ({}, {})", case.r, case.s))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let len = rng.gen_range(1..80usize);
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-3.0..3.0f64).exp() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let p = if i % 10 == 0 { f64::INFINITY } else { rng.gen_range(1.0..6.0) };
        let mut cuts: Vec<usize> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..len)).collect();
        cuts.push(len - 1);
        cuts.sort_unstable();
        cuts.dedup();
        let spec = LpqSpec::new(p, p, cuts).map_err(|e| e.to_string())?;
        let c = Coefficients::from_dense(values.iter().copied());
        let got = lpq_norm_log(&c, &spec).map_err(|e| e.to_string())?;
        let plain = if p.is_infinite() {
            values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        } else {
            values.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        };
        let err = (got - plain.ln()).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("sample {i}, p = {p}: {got} vs ln {plain}"))?;
    }
    let seq = closed_form_exp_weight(1.0, 1.0, E, 21).map_err(|e| e.to_string())?;
    let lambda = Coefficients::from_entries((1..=20usize).flat_map(|n| {
        let nf = n as f64;
        (n * n + 1..=(n + 1) * (n + 1)).map(move |m| (m, LogPolar::from_log_abs(-nf * nf + 2.0 * m as f64 * nf.ln())))
    }));
    let out = multiplier_profile(&lambda, &seq, f64::INFINITY).map_err(|e| e.to_string())?;
    for b in &out.profile.blocks[1..] {
        ensure(b.log_norm.abs() <= 1e-9, || format!("block {}: log norm {:e}", b.n, b.log_norm))?;
    }
    Ok(format!("cases ok, l^J(p,p) = l_p worst {worst:.1e}, e^(-r) profile flat over 20 blocks"))
}

fn criterion_10() -> Outcome {
    // ln t_n for t_n = n^n / (n! e^n) via ln t_{n+1} = ln t_n + n ln(1 + 1/n) - 1
    let (mut log_t, mut sum, mut harmonic) = (-1.0f64, 0.0f64, 0.0f64);
    let mut stirling = f64::NAN;
    for n in 1..=100_000u32 {
        let nf = n as f64;
        if n > 1 {
            let prev = nf - 1.0;
            log_t += prev * (1.0 / prev).ln_1p() - 1.0;
        }
        if n == 1000 {
            stirling = (log_t + 0.5 * (2.0 * std::f64::consts::PI * nf).ln()).exp();
        }
        sum += (2.0 * log_t).exp();
        harmonic += 1.0 / nf;
    }
    ensure((0.99..=1.01).contains(&stirling), || format!("Stirling ratio at 1000 = {stirling}"))?;
    let reference = harmonic / (2.0 * std::f64::consts::PI);
    let ratio = sum / reference;
    ensure((ratio - 1.0).abs() <= 0.1, || format!("partial sum {sum} vs {reference}"))?;

    let reports = run_all(DEFAULT_SEED).map_err(|e| e.to_string())?;
    for name in ["stirling", "divergence"] {
        let r = reports.iter().find(|r| r.name == name).ok_or_else(|| format!("{name} missing"))?;
        ensure(r.pass, || format!("{name} report failed: {r:?}"))?;
    }
    let lib_sum = reports.iter().find(|r| r.name == "divergence").and_then(|r| r.witness_value("partial_sum")).unwrap_or(f64::NAN);
    ensure((lib_sum - sum).abs() <= 1e-9 * sum, || format!("library partial sum {lib_sum} vs {sum}"))?;
    Ok(format!("Stirling ratio {stirling:.8}, partial sum {sum:.6} vs H_N/(2 pi) {reference:.6} (ratio {ratio:.3})"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed-form Lusky certification", criterion_1),
        ("block ratio spot values", criterion_2),
        ("constructed Lusky sequence", criterion_3),
        ("norm identities", criterion_4),
        ("sandwich property", criterion_5),
        ("hull block norm oracle", criterion_6),
        ("de la Vallee-Poussin algebra", criterion_7),
        ("inequality suite", criterion_8),
        ("multiplier cases", criterion_9),
        ("Stirling checks", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
