//! Command-line front end.
//!
//! Every subcommand reads its inputs from flags, files or stdin and writes
//! JSON (default) or CSV. Exit codes: 0 success, 1 failed verification,
//! 2 bad arguments or input, 3 coefficients beyond the block boundaries,
//! 4 numeric failure.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::certificate::CertificateReport;
use crate::error::{Error, Result};
use crate::json::Float;
use crate::lusky::{closed_form_exp_weight, construct_sequence, LuskyConfig, LuskySequence};
use crate::multipliers::multiplier_profile;
use crate::series::{closed_form_block_count, core_norm_log, format_float, hull_block_norms, poly_norm_v_log, Coefficients, LogPolar};
use crate::vallee_poussin::estimate_vp_operator_norm;
use crate::verify::{run_all, run_check, DEFAULT_SEED};
use crate::weights::{monomial_norm_log, r_peak, Weight};

/// Environment variable overriding the default sweep seed.
pub const SEED_ENV: &str = "SOLIDHULL_SEED";

#[derive(Debug, Parser)]
#[command(name = "solidhull", version, about = "Norms, solid hulls and multipliers for weighted sup-norm spaces of entire functions")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Peak radii and monomial norms of a weight.
    WeightInfo {
        #[arg(long)]
        weight: String,
        /// Comma-separated monomial degrees.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        m: Vec<f64>,
    },
    /// Build a Lusky sequence.
    Lusky(SeqArgs),
    /// Solid-hull block norms of a coefficient sequence.
    Hull {
        #[command(flatten)]
        seq: SeqArgs,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Solid-core norm of a coefficient sequence.
    Core {
        #[arg(long)]
        weight: String,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Weighted sup norm of a polynomial.
    PolyNorm {
        #[arg(long)]
        weight: String,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Block profile deciding whether a sequence multiplies into l_p.
    Multiplier {
        #[command(flatten)]
        seq: SeqArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Target exponent p in [1, inf].
        #[arg(long, value_parser = parse_real)]
        p: f64,
    },
    /// Run inequality sweeps.
    Verify {
        /// Run every check.
        #[arg(long)]
        all: bool,
        /// Run the named check (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Seed of the random sweeps (default: $SOLIDHULL_SEED or a fixed value).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Empirical lower estimate of the uniform bound on the tent operators.
    VpEstimate {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 36)]
        max_degree: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// How to obtain a Lusky sequence.
#[derive(Debug, Clone, Args)]
pub struct SeqArgs {
    /// Weight: inline JSON, `exp_power:A:P`, `exp_exp`, `log_power:P`, or a JSON file.
    #[arg(long)]
    pub weight: Option<String>,
    /// Read a Lusky sequence JSON file instead of building one.
    #[arg(long, conflicts_with = "weight")]
    pub lusky: Option<PathBuf>,
    /// Use the boundaries p ln(b) n^2 (exp_power weights only).
    #[arg(long)]
    pub closed_form: bool,
    /// Lower comparability bound, b > 2 (`e` is accepted).
    #[arg(long, value_parser = parse_real, default_value = "e")]
    pub b: f64,
    /// Number of boundaries (default: enough to cover the input).
    #[arg(long)]
    pub count: Option<usize>,
    /// First boundary m_1 (default: p ln b for exp_power, else 1).
    #[arg(long, value_parser = parse_real)]
    pub m_start: Option<f64>,
    /// Bisection tolerance on ln min(A, B).
    #[arg(long, value_parser = parse_real, default_value = "1e-9")]
    pub tol_log: f64,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Coefficient JSON file (`-` or absent: stdin).
    #[arg(long, short)]
    pub input: Option<PathBuf>,
}

/// Reals accept `inf`, `-inf`, `nan` and `e`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    if s.trim() == "e" {
        return Ok(std::f64::consts::E);
    }
    crate::json::parse_float(s).ok_or_else(|| format!("not a number: {s:?}"))
}

/// Result of a subcommand: rendered output and whether it counts as success.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Argument(format!("{}: {e}", path.display()))
}

/// Parses a weight given inline or as a path to a JSON file.
pub fn load_weight(spec: &str) -> Result<Weight> {
    match spec.parse::<Weight>() {
        Ok(w) => Ok(w),
        Err(e) => {
            let path = std::path::Path::new(spec);
            if path.is_file() {
                let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                text.parse()
            } else {
                Err(e)
            }
        }
    }
}

fn read_input(input: &InputArgs, stdin: &mut dyn Read) -> Result<Coefficients<LogPolar>> {
    let text = match &input.input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path).map_err(|e| io_error(path, e))?,
        _ => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| Error::Argument(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(serde_json::from_str(&text)?)
}

fn default_m_start(w: &Weight, b: f64) -> f64 {
    match w.exp_power_params() {
        Some((_, p)) => p * b.ln(),
        None => 1.0,
    }
}

/// Longest sequence the CLI builds when covering an input automatically.
const MAX_AUTO_BOUNDARIES: usize = 1 << 16;

/// Builds (or loads) a sequence covering indices up to `degree`.
pub fn build_sequence(args: &SeqArgs, degree: usize) -> Result<LuskySequence> {
    if let Some(path) = &args.lusky {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        return Ok(serde_json::from_str(&text)?);
    }
    let spec = args.weight.as_deref().ok_or_else(|| Error::Argument("either --weight or --lusky is required".into()))?;
    let w = load_weight(spec)?;
    if args.closed_form {
        let (a, p) = w.exp_power_params().ok_or_else(|| Error::Argument("--closed-form needs an exp_power weight".into()))?;
        let count = args.count.unwrap_or_else(|| closed_form_block_count(degree, p, args.b));
        return closed_form_exp_weight(a, p, args.b, count);
    }
    let cfg = LuskyConfig { b: args.b, tol_log: args.tol_log, m_start: args.m_start.unwrap_or_else(|| default_m_start(&w, args.b)) };
    if let Some(count) = args.count {
        return construct_sequence(&w, &cfg, count);
    }
    let mut count = 8;
    loop {
        let seq = construct_sequence(&w, &cfg, count)?;
        if seq.last_boundary().floor() as usize >= degree || count >= MAX_AUTO_BOUNDARIES {
            return Ok(seq);
        }
        count *= 2;
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Serialize)]
struct WeightInfoRow {
    m: f64,
    #[serde(with = "crate::json")]
    r: f64,
    #[serde(with = "crate::json")]
    log_r: f64,
    #[serde(with = "crate::json")]
    log_v: f64,
    #[serde(with = "crate::json")]
    log_norm: f64,
}

fn weight_info(weight: &str, ms: &[f64], format: Format) -> Result<String> {
    let w = load_weight(weight)?;
    let rows = ms
        .iter()
        .map(|&m| {
            if m == 0.0 {
                let log_v = w.eval_log_v(0.0)?;
                return Ok(WeightInfoRow { m, r: 0.0, log_r: f64::NEG_INFINITY, log_v, log_norm: log_v });
            }
            let peak = r_peak(&w, m)?;
            Ok(WeightInfoRow { m, r: peak.r, log_r: peak.log_r, log_v: -w.log_weight(peak.r), log_norm: monomial_norm_log(&w, m)? })
        })
        .collect::<Result<Vec<_>>>()?;
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("m,r,log_r,log_v,log_norm\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    format_float(r.m),
                    format_float(r.r),
                    format_float(r.log_r),
                    format_float(r.log_v),
                    format_float(r.log_norm)
                );
            }
            Ok(out)
        }
    }
}

fn lusky_output(seq: &LuskySequence, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(seq),
        Format::Csv => {
            let mut out = String::from("n,m_n,m_n_plus_1,log_A,log_B\n");
            let m = seq.boundaries();
            for i in 0..seq.block_count() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    i + 1,
                    format_float(m[i]),
                    format_float(m[i + 1]),
                    format_float(seq.log_a()[i]),
                    format_float(seq.log_b()[i])
                );
            }
            Ok(out)
        }
    }
}

fn scalar_output(name: &str, value: f64, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut map = std::collections::BTreeMap::new();
            map.insert(name, Float(value));
            to_json(&map)
        }
        Format::Csv => Ok(format!("quantity,value\n{name},{}\n", format_float(value))),
    }
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    pass: bool,
    reports: &'a [CertificateReport],
}

/// `--seed`, then `$SOLIDHULL_SEED`, then the built-in default.
pub fn resolve_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|e| Error::Argument(format!("{SEED_ENV}={v:?}: {e}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn verify(all: bool, checks: &[String], seed: Option<u64>, format: Format) -> Result<Outcome> {
    let seed = resolve_seed(seed)?;
    let reports = if all {
        run_all(seed)?
    } else if checks.is_empty() {
        return Err(Error::Argument("verify needs --all or at least one --check".into()));
    } else {
        checks.iter().map(|c| run_check(c, seed)).collect::<Result<Vec<_>>>()?
    };
    let pass = reports.iter().all(|r| r.pass);
    let text = match format {
        Format::Json => to_json(&VerifySummary { pass, reports: &reports })?,
        Format::Csv => {
            let mut out = String::from("name,samples,worst_margin,pass\n");
            for r in &reports {
                let _ = writeln!(out, "{},{},{},{}", r.name, r.samples, format_float(r.worst_margin), r.pass);
            }
            out
        }
    };
    Ok(Outcome { text, success: pass })
}

/// Executes a parsed command line; `stdin` supplies coefficient input when
/// no file is given.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome> {
    let format = cli.format;
    let ok = |text: String| Outcome { text, success: true };
    let outcome = match &cli.command {
        Command::WeightInfo { weight, m } => ok(weight_info(weight, m, format)?),
        Command::Lusky(args) => {
            let args = SeqArgs { count: Some(args.count.unwrap_or(10)), ..args.clone() };
            ok(lusky_output(&build_sequence(&args, 0)?, format)?)
        }
        Command::Hull { seq, input } => {
            let c = read_input(input, stdin)?;
            let seq = build_sequence(seq, c.degree().unwrap_or(0))?;
            let profile = hull_block_norms(&c, &seq)?;
            ok(match format {
                Format::Json => to_json(&profile)?,
                Format::Csv => profile.to_csv(),
            })
        }
        Command::Core { weight, input } => {
            let c = read_input(input, stdin)?;
            ok(scalar_output("log_norm", core_norm_log(&c, &load_weight(weight)?)?, format)?)
        }
        Command::PolyNorm { weight, input } => {
            let c = read_input(input, stdin)?;
            ok(scalar_output("log_norm", poly_norm_v_log(&c, &load_weight(weight)?)?, format)?)
        }
        Command::Multiplier { seq, input, p } => {
            let c = read_input(input, stdin)?;
            let seq = build_sequence(seq, c.degree().unwrap_or(0))?;
            let out = multiplier_profile(&c, &seq, *p)?;
            ok(match format {
                Format::Json => to_json(&out)?,
                Format::Csv => out.profile.to_csv(),
            })
        }
        Command::Verify { all, checks, seed } => verify(*all, checks, *seed, format)?,
        Command::VpEstimate { seq, trials, max_degree, seed } => {
            let seq = build_sequence(seq, *max_degree)?;
            let est = estimate_vp_operator_norm(&seq, *trials, *max_degree, resolve_seed(*seed)?)?;
            ok(match format {
                Format::Json => to_json(&est)?,
                Format::Csv => format!(
                    "log_D,trials,max_degree,seed,block\n{},{},{},{},{}\n",
                    format_float(est.log_d),
                    est.trials,
                    est.max_degree,
                    est.seed,
                    est.block
                ),
            })
        }
    };
    if let Some(path) = &cli.output {
        std::fs::write(path, &outcome.text).map_err(|e| io_error(path, e))?;
        return Ok(Outcome { text: String::new(), ..outcome });
    }
    Ok(outcome)
}

/// Parses `std::env::args`, runs, prints and returns the exit code.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli, &mut std::io::stdin()) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
