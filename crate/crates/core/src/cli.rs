//! The `ehs` command line: evaluate any series or closed form from a JSON
//! parameter file, verify one identity on sampled balanced parameters, or
//! run the whole acceptance matrix.
//!
//! Exit codes are the machine contract: `0` pass, `1` verification FAIL,
//! `2` invalid input (CLI usage, parameter files, out-of-range digits),
//! `3` numerical degeneracy (pole hit during evaluation, or a sampling
//! budget exhausted by a persistent pole).
//!
//! Parameter files are flat JSON objects; complex numbers are two-element
//! arrays of decimal strings (`{"a": ["1.3","0.2"], ...}`), which survive
//! any working precision. `eval --dump-params` writes the parsed file back
//! in canonical form (sorted keys, original decimal strings), so a dumped
//! file re-parses to bitwise-identical parameters.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numerics::{format_complex_human, BigComplex, PrecisionContext, DEFAULT_DIGITS};
use crate::partitions::Partition;
use crate::pochhammer::{part_poch, qpoch};
use crate::series::{
    bailey_lhs, bailey_rhs, cn_lhs, cn_rhs, omega_one_var, omega_sum, warnaar_lemma_lhs,
    warnaar_lemma_rhs, warnaar_thm51_lhs, warnaar_thm51_rhs, BaileyParams, CnParams, LemmaParams,
    OmegaParams,
};
use crate::theta::{theta_e, EllipticBase};
use crate::verify::{suite, verify_identity, SampleConfig, VerificationReport};

pub const SERIES: &[&str] = &[
    "theta",
    "qpoch",
    "part-poch",
    "omega",
    "cn-lhs",
    "cn-rhs",
    "lemma-lhs",
    "lemma-rhs",
    "thm51-lhs",
    "thm51-rhs",
    "omega-Omega",
    "bailey-lhs",
    "bailey-rhs",
];

#[derive(Parser)]
#[command(
    name = "ehs",
    version,
    about = "Arbitrary-precision evaluation and verification of elliptic hypergeometric summation identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one series or closed form from a parameter file
    Eval(EvalArgs),
    /// Verify one identity on randomly sampled balanced parameters
    Verify(VerifyArgs),
    /// Run the acceptance matrix (all sections or a named subset)
    Suite(SuiteArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// One of: theta, qpoch, part-poch, omega, cn-lhs, cn-rhs, lemma-lhs,
    /// lemma-rhs, thm51-lhs, thm51-rhs, omega-Omega, bailey-lhs, bailey-rhs
    series: String,
    /// JSON parameter file
    #[arg(long)]
    params: PathBuf,
    /// Write the parsed parameters back in canonical form
    #[arg(long)]
    dump_params: Option<PathBuf>,
    /// Working precision in decimal digits (20..=300)
    #[arg(long)]
    digits: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity name, e.g. cn-jackson (see `suite --help` for the list)
    #[arg(long)]
    identity: String,
    /// Number of rows / variables
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Terminator exponent
    #[arg(long = "N", default_value_t = 2)]
    cap: u32,
    #[arg(long, default_value_t = 10)]
    trials: u32,
    /// Working precision in decimal digits (20..=300)
    #[arg(long)]
    digits: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the full report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write per-trial rows as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Run every section of the acceptance matrix
    #[arg(long, conflicts_with = "sections")]
    all: bool,
    /// Comma-separated identity names (e.g. cn-jackson,duality)
    sections: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Working precision in decimal digits (20..=300)
    #[arg(long)]
    digits: Option<usize>,
    /// Write the aggregate JSON here and print a summary instead
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses and dispatches; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Eval(args) => cmd_eval(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Suite(args) => cmd_suite(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Pole(_) | Error::DegenerateBase(_) | Error::Sampling(_) => 3,
        Error::Domain(_) | Error::Params(_) | Error::Io(_) => 2,
    }
}

/// `--digits` beats `EHS_DIGITS` beats the default; range validation is
/// left to the precision context.
fn resolve_digits(flag: Option<usize>) -> Result<usize> {
    if let Some(d) = flag {
        return Ok(d);
    }
    match std::env::var("EHS_DIGITS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Params(format!("EHS_DIGITS must be an integer, got {s:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_DIGITS),
        Err(e) => Err(Error::Params(format!("EHS_DIGITS: {e}"))),
    }
}

// ---------------------------------------------------------------------------
// parameter files

/// One entry of a parameter file, kept together with its source text so a
/// dump reproduces the exact decimal strings it was given.
#[derive(Clone, Debug)]
enum Entry {
    Complex([String; 2]),
    ComplexList(Vec<[String; 2]>),
    Int(i64),
    IntList(Vec<i64>),
}

#[derive(Clone, Debug)]
struct ParamsFile {
    entries: BTreeMap<String, Entry>,
}

fn complex_pair(v: &Value, key: &str) -> Result<[String; 2]> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Params(format!("{key}: expected a two-element array")))?;
    let mut out = [String::new(), String::new()];
    for (slot, item) in out.iter_mut().zip(arr) {
        *slot = item
            .as_str()
            .ok_or_else(|| {
                Error::Params(format!("{key}: complex parts must be decimal strings"))
            })?
            .to_string();
    }
    Ok(out)
}

impl ParamsFile {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let root: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Params(format!("{}: {e}", path.display())))?;
        let obj = root
            .as_object()
            .ok_or_else(|| Error::Params(format!("{}: expected a JSON object", path.display())))?;
        let mut entries = BTreeMap::new();
        for (key, value) in obj {
            let entry = match value {
                Value::Number(num) => Entry::Int(num.as_i64().ok_or_else(|| {
                    Error::Params(format!("{key}: expected an integer, got {num}"))
                })?),
                Value::Array(items) => {
                    if items.iter().all(Value::is_number) {
                        let mut ints = Vec::with_capacity(items.len());
                        for item in items {
                            ints.push(item.as_i64().ok_or_else(|| {
                                Error::Params(format!("{key}: expected integers"))
                            })?);
                        }
                        Entry::IntList(ints)
                    } else if items.iter().all(Value::is_array) {
                        let mut list = Vec::with_capacity(items.len());
                        for item in items {
                            list.push(complex_pair(item, key)?);
                        }
                        Entry::ComplexList(list)
                    } else {
                        Entry::Complex(complex_pair(value, key)?)
                    }
                }
                other => {
                    return Err(Error::Params(format!(
                        "{key}: unsupported value {other}; use integers, [\"re\",\"im\"] pairs, \
                         or arrays of either"
                    )))
                }
            };
            entries.insert(key.clone(), entry);
        }
        Ok(ParamsFile { entries })
    }

    fn dump(&self) -> String {
        let mut obj = serde_json::Map::new();
        for (key, entry) in &self.entries {
            let value = match entry {
                Entry::Complex([re, im]) => serde_json::json!([re, im]),
                Entry::ComplexList(list) => Value::Array(
                    list.iter()
                        .map(|[re, im]| serde_json::json!([re, im]))
                        .collect(),
                ),
                Entry::Int(i) => serde_json::json!(i),
                Entry::IntList(list) => serde_json::json!(list),
            };
            obj.insert(key.clone(), value);
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj))
            .expect("parameter files serialize");
        text.push('\n');
        text
    }

    fn get(&self, key: &str) -> Result<&Entry> {
        self.entries
            .get(key)
            .ok_or_else(|| Error::Params(format!("missing parameter {key}")))
    }

    fn complex(&self, key: &str, ctx: &PrecisionContext) -> Result<BigComplex> {
        match self.get(key)? {
            Entry::Complex([re, im]) => BigComplex::from_decimal(re, im, ctx),
            _ => Err(Error::Params(format!("{key}: expected [\"re\",\"im\"]"))),
        }
    }

    fn complex_list(&self, key: &str, ctx: &PrecisionContext) -> Result<Vec<BigComplex>> {
        match self.get(key)? {
            Entry::ComplexList(list) => list
                .iter()
                .map(|[re, im]| BigComplex::from_decimal(re, im, ctx))
                .collect(),
            _ => Err(Error::Params(format!(
                "{key}: expected an array of [\"re\",\"im\"] pairs"
            ))),
        }
    }

    fn int(&self, key: &str) -> Result<i64> {
        match self.get(key)? {
            Entry::Int(i) => Ok(*i),
            _ => Err(Error::Params(format!("{key}: expected an integer"))),
        }
    }

    fn size(&self, key: &str) -> Result<usize> {
        usize::try_from(self.int(key)?)
            .map_err(|_| Error::Params(format!("{key}: expected a nonnegative integer")))
    }

    fn cap(&self, key: &str) -> Result<u32> {
        u32::try_from(self.int(key)?)
            .map_err(|_| Error::Params(format!("{key}: expected a nonnegative integer")))
    }

    fn partition(&self, key: &str) -> Result<Partition> {
        let parts = match self.get(key)? {
            Entry::IntList(list) => list
                .iter()
                .map(|&i| {
                    u32::try_from(i)
                        .map_err(|_| Error::Params(format!("{key}: parts must be >= 0")))
                })
                .collect::<Result<Vec<u32>>>()?,
            _ => Err(Error::Params(format!("{key}: expected an integer array")))?,
        };
        // the box height only matters for conjugation; default to a tight fit
        let cap = match self.entries.get("N") {
            Some(_) => self.cap("N")?,
            None => parts.first().copied().unwrap_or(0),
        };
        Partition::new(parts, cap)
    }
}

// ---------------------------------------------------------------------------
// eval

fn eval_series(series: &str, file: &ParamsFile, ctx: &PrecisionContext) -> Result<BigComplex> {
    match series {
        "theta" => theta_e(&file.complex("x", ctx)?, &file.complex("p", ctx)?, ctx),
        "qpoch" => {
            let base = base_from(file, false, ctx)?;
            qpoch(&file.complex("a", ctx)?, file.int("k")?, &base, ctx)
        }
        "part-poch" => {
            let base = base_from(file, true, ctx)?;
            part_poch(&file.complex("a", ctx)?, &file.partition("lambda")?, &base, ctx)
        }
        "omega" => omega_one_var(
            &file.complex("a", ctx)?,
            &file.complex_list("bs", ctx)?,
            file.cap("N")?,
            &file.complex("q", ctx)?,
            &file.complex("p", ctx)?,
            ctx,
        ),
        "cn-lhs" | "cn-rhs" => {
            let params = CnParams::new(
                file.complex("a", ctx)?,
                file.complex("b", ctx)?,
                file.complex("c", ctx)?,
                file.complex("d", ctx)?,
                file.complex("e", ctx)?,
                file.size("n")?,
                file.cap("N")?,
                base_from(file, true, ctx)?,
                ctx,
            )?;
            if series == "cn-lhs" {
                cn_lhs(&params, ctx)
            } else {
                cn_rhs(&params, ctx)
            }
        }
        "lemma-lhs" | "lemma-rhs" => {
            let params = LemmaParams::lemma(
                file.complex("a", ctx)?,
                file.complex("b", ctx)?,
                file.complex("c", ctx)?,
                file.complex("d", ctx)?,
                file.complex("e", ctx)?,
                file.complex_list("xs", ctx)?,
                file.complex("q", ctx)?,
                file.complex("p", ctx)?,
                ctx,
            )?;
            if series == "lemma-lhs" {
                warnaar_lemma_lhs(&params, ctx)
            } else {
                warnaar_lemma_rhs(&params, ctx)
            }
        }
        "thm51-lhs" | "thm51-rhs" => {
            let params = LemmaParams::thm51(
                file.complex("a", ctx)?,
                file.complex("b", ctx)?,
                file.complex("c", ctx)?,
                file.complex("d", ctx)?,
                file.complex("e", ctx)?,
                file.complex_list("xs", ctx)?,
                file.cap("N")?,
                file.complex("q", ctx)?,
                file.complex("p", ctx)?,
                ctx,
            )?;
            if series == "thm51-lhs" {
                warnaar_thm51_lhs(&params, ctx)
            } else {
                warnaar_thm51_rhs(&params, ctx)
            }
        }
        "omega-Omega" => {
            let params = OmegaParams::new(
                file.complex("a", ctx)?,
                file.complex_list("bs", ctx)?,
                file.size("n")?,
                file.cap("N")?,
                base_from(file, true, ctx)?,
            )?;
            omega_sum(&params, ctx)
        }
        "bailey-lhs" | "bailey-rhs" => {
            let params = BaileyParams::new(
                file.complex("a", ctx)?,
                file.complex("b", ctx)?,
                file.complex("c", ctx)?,
                file.complex("d", ctx)?,
                file.complex("e", ctx)?,
                file.complex("f", ctx)?,
                file.complex("g", ctx)?,
                file.cap("N")?,
                file.complex("q", ctx)?,
                file.complex("p", ctx)?,
                ctx,
            )?;
            if series == "bailey-lhs" {
                bailey_lhs(&params, ctx)
            } else {
                bailey_rhs(&params, ctx)
            }
        }
        other => Err(Error::Params(format!(
            "unknown series {other}; expected one of {}",
            SERIES.join(", ")
        ))),
    }
}

fn base_from(file: &ParamsFile, with_x: bool, ctx: &PrecisionContext) -> Result<EllipticBase> {
    let x = if with_x {
        file.complex("x", ctx)?
    } else {
        BigComplex::one(ctx)
    };
    EllipticBase::new(file.complex("p", ctx)?, file.complex("q", ctx)?, x)
}

fn cmd_eval(args: &EvalArgs) -> Result<i32> {
    let ctx = PrecisionContext::new(resolve_digits(args.digits)?)?;
    let file = ParamsFile::load(&args.params)?;
    if let Some(path) = &args.dump_params {
        std::fs::write(path, file.dump())?;
    }
    let value = eval_series(&args.series, &file, &ctx)?;
    println!("{}", format_complex_human(&value, 20, &ctx));
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn report_csv(report: &VerificationReport) -> String {
    let mut out = String::from("trial,rel_err,lhs_re,lhs_im,rhs_re,rhs_im,params\n");
    for (i, t) in report.trials.iter().enumerate() {
        let params = t
            .params
            .iter()
            .map(|(k, [re, im])| format!("{k}={re}+{im}i"))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{i},{},{},{},{},{},{}\n",
            csv_field(&t.rel_err),
            csv_field(&t.lhs[0]),
            csv_field(&t.lhs[1]),
            csv_field(&t.rhs[0]),
            csv_field(&t.rhs[1]),
            csv_field(&params),
        ));
    }
    out
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let digits = resolve_digits(args.digits)?;
    let config = SampleConfig::new(args.seed);
    let started = Instant::now();
    let report = verify_identity(&args.identity, args.n, args.cap, args.trials, &config, digits)?;
    let wall_time_ms = started.elapsed().as_millis() as u64;
    println!(
        "{} n={} N={} digits={} seed={}: {} (max_rel_err={}, trials={}, resamples={}, {} ms)",
        report.identity,
        report.n,
        report.cap,
        report.digits,
        report.seed,
        report.status,
        report.max_rel_err,
        report.trials.len(),
        report.resample_count,
        wall_time_ms,
    );
    if let Some(diagnosis) = &report.diagnosis {
        println!("diagnosis: {diagnosis}");
    }
    if let Some(path) = &args.json {
        let mut value = serde_json::to_value(&report).expect("report serializes");
        value
            .as_object_mut()
            .expect("report is an object")
            .insert("wall_time_ms".into(), serde_json::json!(wall_time_ms));
        let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
        text.push('\n');
        std::fs::write(path, text)?;
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, report_csv(&report))?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// suite

fn cmd_suite(args: &SuiteArgs) -> Result<i32> {
    let digits = resolve_digits(args.digits)?;
    let filter: Option<Vec<String>> = if args.all {
        None
    } else {
        let raw = args
            .sections
            .as_deref()
            .ok_or_else(|| Error::Params("pass --all or a comma-separated section list".into()))?;
        let names: Vec<String> = raw
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if names.is_empty() {
            return Err(Error::Params("empty suite section list".into()));
        }
        Some(names)
    };
    let config = SampleConfig::new(args.seed);
    let report = suite(filter.as_deref(), &config, digits)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &args.out {
        Some(path) => {
            std::fs::write(path, text)?;
            for s in &report.sections {
                println!(
                    "{:<22} n={} N={} {} (max_rel_err={})",
                    s.identity, s.n, s.cap, s.status, s.max_rel_err
                );
            }
            println!(
                "suite: {} ({} sections, digits={}, seed={}) -> {}",
                report.status,
                report.sections.len(),
                report.digits,
                report.seed,
                path.display(),
            );
        }
        None => print!("{text}"),
    }
    Ok(if report.passed() { 0 } else { 1 })
}
