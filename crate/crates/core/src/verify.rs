//! Verification harness: constraint-surface sampling, per-identity check
//! suites, the p = 0 degeneration oracle, and report assembly.
//!
//! Every check follows the same recipe: draw parameters at random with
//! moduli in configured ranges, close the applicable balancing constraint by
//! solving for the last parameter, evaluate both sides of the identity, and
//! record the relative error. Denominator factors are pole-guarded
//! throughout the evaluation layer, so a draw that lands too close to a
//! theta zero surfaces as a resamplable error and the trial redraws (up to
//! `max_resamples` attempts).
//!
//! Reports are deterministic: a fixed `(identity, n, N, trials, seed,
//! digits)` tuple yields a bitwise-identical report. All randomness is
//! drawn as `f64` from a ChaCha stream seeded per section, so the sampled
//! parameters do not depend on the working precision; a failing section is
//! automatically re-run 30 digits higher with the same draws to separate
//! precision artifacts from genuine failures.

use std::collections::BTreeMap;

use astro_float::BigFloat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    bf_max, format_real_sig, pow10_neg, rel_error, to_f64, within, BigComplex, PrecisionContext,
    DEFAULT_POLE_THRESHOLD, MAX_DIGITS,
};
use crate::partitions::{count as partition_count, enumerate, Partition};
use crate::pochhammer::{dp_identity_sides, part_poch, qpoch};
use crate::series::factors::{a_box_ratio, a_box_ratio_conjugate, a_factor, b_factor};
use crate::series::omega::{cn_lhs, cn_rhs, rhs_closed_form, OmegaEvaluator};
use crate::series::one_var::{bailey_lhs, bailey_rhs, jackson_rhs, omega_one_var};
use crate::series::warnaar::{
    warnaar_lemma_lhs, warnaar_lemma_rhs, warnaar_lemma_term, warnaar_thm51_lhs,
    warnaar_thm51_rhs, warnaar_thm51_term,
};
use crate::series::{qp_den, qp_num, BaileyParams, CnParams, LemmaParams, OmegaParams};
use crate::theta::{elliptic_number, theta_e, EllipticBase};

/// Every identity and property family the harness knows how to check.
pub const IDENTITIES: &[&str] = &[
    "cn-jackson",
    "warnaar-lemma",
    "warnaar-thm51",
    "thm51-termwise",
    "jackson-1var",
    "bailey",
    "duality",
    "ab-split",
    "box-ratio",
    "rhs-recursion",
    "dp-identity",
    "degeneration-p0",
    "reflection",
    "quasi-periodicity",
    "addition-formula",
    "poch-splitting",
    "conjugation-symmetry",
];

/// How the random draws are shaped.
#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub seed: u64,
    /// modulus range for the nome `p`
    pub p_modulus_range: (f64, f64),
    /// modulus range for `q`, `x`, `a`, `b`, `c`, `d` and friends
    pub param_modulus_range: (f64, f64),
    /// redraw budget per trial before giving up on a persistent pole
    pub max_resamples: u32,
}

impl SampleConfig {
    pub fn new(seed: u64) -> Self {
        SampleConfig {
            seed,
            p_modulus_range: (0.05, 0.6),
            param_modulus_range: (0.5, 2.0),
            max_resamples: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (plo, phi) = self.p_modulus_range;
        if !(0.0 < plo && plo < phi && phi < 1.0) {
            return Err(Error::Params(format!(
                "p modulus range ({plo}, {phi}) must sit inside (0, 1)"
            )));
        }
        let (lo, hi) = self.param_modulus_range;
        if !(0.0 < lo && lo < hi && hi.is_finite()) {
            return Err(Error::Params(format!(
                "parameter modulus range ({lo}, {hi}) must be a finite interval in (0, inf)"
            )));
        }
        if self.max_resamples == 0 {
            return Err(Error::Params("max_resamples must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig::new(1)
    }
}

/// One verified parameter set: everything needed to reproduce the check.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub params: BTreeMap<String, [String; 2]>,
    pub lhs: [String; 2],
    pub rhs: [String; 2],
    pub rel_err: String,
}

/// Outcome of one section (one identity at one `(n, N)` cell).
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub cap: u32,
    pub digits: usize,
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    pub max_rel_err: String,
    pub status: String,
    pub resample_count: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == "PASS"
    }
}

/// Aggregate of a suite run; `status` is PASS iff every section passed.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub digits: usize,
    pub seed: u64,
    pub status: String,
    pub sections: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.status == "PASS"
    }
}

/// One cell of the acceptance matrix.
#[derive(Clone, Copy, Debug)]
pub struct SectionSpec {
    pub identity: &'static str,
    pub n: usize,
    pub cap: u32,
    pub trials: u32,
}

/// FNV-1a of `identity:n:N`, folded with the user seed, so sections draw
/// independent streams but stay reproducible.
pub fn section_seed(identity: &str, n: usize, cap: u32, base_seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{identity}:{n}:{cap}").bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ base_seed
}

/// Pass tolerance is `10^-(digits - offset)` with the offset graded by how
/// much cancellation the check can accumulate: full identities get 15,
/// termwise and degeneration checks 10, single-formula structural checks 5.
fn tolerance_offset(identity: &str) -> i32 {
    match identity {
        "thm51-termwise" | "degeneration-p0" => 10,
        "dp-identity" | "reflection" | "quasi-periodicity" | "addition-formula"
        | "poch-splitting" | "conjugation-symmetry" => 5,
        _ => 15,
    }
}

/// Closes the balancing constraint of the named identity by solving for the
/// last parameter; returns its name and value.
///
/// The completed parameter is always the one appearing linearly (`e`, or `g`
/// for the Bailey transformation), never `q` or `x`.
pub fn solve_constraint(
    identity: &str,
    params: &BTreeMap<String, BigComplex>,
    n: usize,
    cap: u32,
    ctx: &PrecisionContext,
) -> Result<(String, BigComplex)> {
    let get = |k: &str| -> Result<&BigComplex> {
        params
            .get(k)
            .ok_or_else(|| Error::Sampling(format!("missing parameter {k} for {identity}")))
    };
    let a = get("a")?;
    let q = get("q")?;
    let bcd = get("b")?.mul(get("c")?, ctx).mul(get("d")?, ctx);
    if bcd.is_zero() || q.is_zero() {
        return Err(Error::Sampling("zero divisor while closing the constraint".into()));
    }
    let a2 = a.mul(a, ctx);
    match identity {
        "cn-jackson" | "degeneration-p0" => {
            let x = get("x")?;
            let div = bcd.mul(&x.powi(n as i64 - 1, ctx), ctx);
            Ok((
                "e".into(),
                a2.mul(&q.powi(cap as i64 + 1, ctx), ctx).div(&div, ctx),
            ))
        }
        "warnaar-lemma" => Ok((
            "e".into(),
            a2.mul(&q.powi(3 - n as i64, ctx), ctx).div(&bcd, ctx),
        )),
        "warnaar-thm51" | "thm51-termwise" => Ok((
            "e".into(),
            a2.mul(&q.powi(cap as i64 + 2 - n as i64, ctx), ctx).div(&bcd, ctx),
        )),
        "jackson-1var" => Ok((
            "e".into(),
            a2.mul(&q.powi(cap as i64 + 1, ctx), ctx).div(&bcd, ctx),
        )),
        "bailey" => {
            let div = bcd.mul(get("e")?, ctx).mul(get("f")?, ctx);
            if div.is_zero() {
                return Err(Error::Sampling("zero divisor while closing the constraint".into()));
            }
            Ok((
                "g".into(),
                a2.mul(a, ctx)
                    .mul(&q.powi(cap as i64 + 2, ctx), ctx)
                    .div(&div, ctx),
            ))
        }
        _ => Err(Error::Params(format!("identity {identity} has no balancing constraint"))),
    }
}

/// Runs the named check `trials` times on fresh samples and assembles a
/// report. A FAIL triggers an automatic re-run 30 digits higher with the
/// same draws; the comparison feeds the report's `diagnosis`.
pub fn verify_identity(
    identity: &str,
    n: usize,
    cap: u32,
    trials: u32,
    config: &SampleConfig,
    digits: usize,
) -> Result<VerificationReport> {
    if !IDENTITIES.contains(&identity) {
        return Err(Error::Params(format!(
            "unknown identity {identity}; expected one of {}",
            IDENTITIES.join(", ")
        )));
    }
    if n == 0 {
        return Err(Error::Params("n must be >= 1".into()));
    }
    if trials == 0 {
        return Err(Error::Params("trials must be >= 1".into()));
    }
    config.validate()?;
    if matches!(identity, "duality" | "ab-split" | "box-ratio")
        && partition_count(n, cap) > 50_000
    {
        return Err(Error::Params(format!(
            "exhaustive check over {} partitions is beyond the supported range",
            partition_count(n, cap)
        )));
    }
    let (mut report, max_err) = run_section(identity, n, cap, trials, config, digits)?;
    if !report.passed() {
        let hi = (digits + 30).min(MAX_DIGITS);
        if hi > digits {
            let (_, max_hi) = run_section(identity, n, cap, trials, config, hi)?;
            let orders = max_err.log10() - max_hi.log10();
            if max_hi < max_err && orders >= 20.0 {
                report.diagnosis = Some(format!(
                    "precision artifact: max relative error {max_err:.2e} shrinks to \
                     {max_hi:.2e} at {hi} digits; raise the working precision"
                ));
            } else if max_err < pow10_neg(digits as i32 / 2) {
                report.diagnosis = Some(format!(
                    "precision-insufficient: residuals sit just above the pass tolerance \
                     (max {max_err:.2e} at {digits} digits, {max_hi:.2e} at {hi} digits); \
                     raise digits rather than suspecting the identity"
                ));
            }
        }
    }
    Ok(report)
}

/// The p = 0 degeneration check against the independent basic-Pochhammer
/// oracle; equivalent to `verify_identity("degeneration-p0", ...)`.
pub fn degeneration_p0_check(
    n: usize,
    cap: u32,
    trials: u32,
    config: &SampleConfig,
    digits: usize,
) -> Result<VerificationReport> {
    verify_identity("degeneration-p0", n, cap, trials, config, digits)
}

/// The full acceptance matrix run by `suite --all`.
pub fn default_matrix() -> Vec<SectionSpec> {
    let mut m = Vec::new();
    let mut push = |identity, n, cap, trials| m.push(SectionSpec { identity, n, cap, trials });
    for n in 1..=3 {
        for cap in 0..=3 {
            push("cn-jackson", n, cap, 10);
        }
    }
    for n in 1..=5 {
        push("warnaar-lemma", n, 1, 10);
    }
    for n in 1..=3 {
        for cap in 1..=3 {
            push("warnaar-thm51", n, cap, 10);
        }
    }
    for n in 1..=4 {
        push("thm51-termwise", n, 1, 5);
    }
    for cap in 0..=4 {
        push("jackson-1var", 1, cap, 10);
    }
    for cap in 0..=4 {
        push("bailey", 1, cap, 10);
    }
    for n in 1..=4 {
        for cap in 1..=4 {
            push("duality", n, cap, 3);
        }
    }
    for n in 1..=3 {
        for cap in 1..=3 {
            push("ab-split", n, cap, 3);
        }
    }
    for n in 1..=3 {
        for cap in 1..=3 {
            push("box-ratio", n, cap, 3);
        }
    }
    for n in 1..=3 {
        for cap in 0..=3 {
            push("rhs-recursion", n, cap, 3);
        }
    }
    for n in 1..=6 {
        push("dp-identity", n, 0, 20);
    }
    for n in 1..=3 {
        for cap in 0..=3 {
            push("degeneration-p0", n, cap, 3);
        }
    }
    push("reflection", 1, 0, 120);
    push("quasi-periodicity", 1, 0, 120);
    push("addition-formula", 1, 0, 120);
    push("poch-splitting", 1, 0, 120);
    push("conjugation-symmetry", 3, 4, 120);
    m
}

/// Runs the matrix (or the subset whose identity names are in `filter`) and
/// aggregates the sections.
pub fn suite(filter: Option<&[String]>, config: &SampleConfig, digits: usize) -> Result<SuiteReport> {
    if let Some(names) = filter {
        if names.is_empty() {
            return Err(Error::Params("empty suite section list".into()));
        }
        for name in names {
            if !IDENTITIES.contains(&name.as_str()) {
                return Err(Error::Params(format!(
                    "unknown suite section {name}; expected one of {}",
                    IDENTITIES.join(", ")
                )));
            }
        }
    }
    let mut sections = Vec::new();
    for spec in default_matrix() {
        if let Some(names) = filter {
            if !names.iter().any(|s| s == spec.identity) {
                continue;
            }
        }
        sections.push(verify_identity(
            spec.identity,
            spec.n,
            spec.cap,
            spec.trials,
            config,
            digits,
        )?);
    }
    let status = if sections.iter().all(|s| s.passed()) {
        "PASS"
    } else {
        "FAIL"
    };
    Ok(SuiteReport {
        digits,
        seed: config.seed,
        status: status.into(),
        sections,
    })
}

// ---------------------------------------------------------------------------
// section driver

struct Trial {
    params: BTreeMap<String, BigComplex>,
    lhs: BigComplex,
    rhs: BigComplex,
    err: BigFloat,
}

fn run_section(
    identity: &str,
    n: usize,
    cap: u32,
    trials: u32,
    config: &SampleConfig,
    digits: usize,
) -> Result<(VerificationReport, f64)> {
    let tol = pow10_neg(digits as i32 - tolerance_offset(identity));
    let ctx = PrecisionContext::with_tolerances(digits, tol, DEFAULT_POLE_THRESHOLD)?;
    let mut sampler = Sampler::new(section_seed(identity, n, cap, config.seed), config);
    let mut records = Vec::with_capacity(trials as usize);
    let mut resample_count = 0u32;
    let mut max_err = ctx.real_zero();
    for _ in 0..trials {
        let mut budget = config.max_resamples;
        let trial = loop {
            match attempt(identity, n, cap, &mut sampler, &ctx) {
                Ok(t) => break t,
                Err(e) if e.is_resamplable() && budget > 0 => {
                    budget -= 1;
                    resample_count += 1;
                }
                Err(e) if e.is_resamplable() => {
                    return Err(Error::Sampling(format!(
                        "resample budget exhausted for {identity} (n={n}, N={cap}): {e}"
                    )));
                }
                Err(e) => return Err(e),
            }
        };
        max_err = bf_max(&max_err, &trial.err);
        records.push(render_trial(&trial, &ctx));
    }
    let status = if within(&max_err, tol, &ctx) { "PASS" } else { "FAIL" };
    let report = VerificationReport {
        identity: identity.into(),
        n,
        cap,
        digits,
        seed: config.seed,
        trials: records,
        max_rel_err: format_real_sig(&max_err, 6, &ctx),
        status: status.into(),
        resample_count,
        diagnosis: None,
    };
    Ok((report, to_f64(&max_err)))
}

fn render_trial(trial: &Trial, ctx: &PrecisionContext) -> TrialRecord {
    let mut params = BTreeMap::new();
    for (k, v) in &trial.params {
        let (re, im) = v.to_decimal_full(ctx);
        params.insert(k.clone(), [re, im]);
    }
    let (lre, lim) = trial.lhs.to_decimal_full(ctx);
    let (rre, rim) = trial.rhs.to_decimal_full(ctx);
    TrialRecord {
        params,
        lhs: [lre, lim],
        rhs: [rre, rim],
        rel_err: format_real_sig(&trial.err, 6, ctx),
    }
}

// ---------------------------------------------------------------------------
// sampling

struct Sampler<'a> {
    rng: ChaCha12Rng,
    config: &'a SampleConfig,
}

impl<'a> Sampler<'a> {
    fn new(seed: u64, config: &'a SampleConfig) -> Self {
        Sampler {
            rng: ChaCha12Rng::seed_from_u64(seed),
            config,
        }
    }

    fn polar(&mut self, range: (f64, f64), floor_phase: bool, ctx: &PrecisionContext) -> BigComplex {
        let m = self.rng.gen_range(range.0..range.1);
        let mut ph = self.rng.gen_range(0.0..std::f64::consts::TAU);
        if floor_phase && ph < 0.01 {
            ph = 0.01;
        }
        BigComplex::from_f64s(m * ph.cos(), m * ph.sin(), ctx)
    }

    /// nome draw: modulus in the `p` range
    fn nome(&mut self, ctx: &PrecisionContext) -> BigComplex {
        self.polar(self.config.p_modulus_range, false, ctx)
    }

    /// free-phase parameter draw
    fn param(&mut self, ctx: &PrecisionContext) -> BigComplex {
        self.polar(self.config.param_modulus_range, false, ctx)
    }

    /// phase-floored draw for `b`-type parameters, keeping them away from
    /// the positive real axis where pole alignments cluster
    fn floored(&mut self, ctx: &PrecisionContext) -> BigComplex {
        self.polar(self.config.param_modulus_range, true, ctx)
    }

    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}

fn insert(map: &mut BTreeMap<String, BigComplex>, k: &str, v: &BigComplex) {
    map.insert(k.to_string(), v.clone());
}

fn insert_int(map: &mut BTreeMap<String, BigComplex>, k: &str, v: i64, ctx: &PrecisionContext) {
    map.insert(k.to_string(), BigComplex::from_i64(v, ctx));
}

// ---------------------------------------------------------------------------
// per-identity attempts

fn attempt(
    identity: &str,
    n: usize,
    cap: u32,
    s: &mut Sampler,
    ctx: &PrecisionContext,
) -> Result<Trial> {
    match identity {
        "cn-jackson" => cn_jackson_attempt(n, cap, s, ctx),
        "warnaar-lemma" => lemma_attempt(n, None, s, ctx),
        "warnaar-thm51" => lemma_attempt(n, Some(cap), s, ctx),
        "thm51-termwise" => termwise_attempt(n, s, ctx),
        "jackson-1var" => jackson_one_var_attempt(cap, s, ctx),
        "bailey" => bailey_attempt(cap, s, ctx),
        "duality" => duality_attempt(n, cap, s, ctx),
        "ab-split" => ab_split_attempt(n, cap, s, ctx),
        "box-ratio" => box_ratio_attempt(n, cap, s, ctx),
        "rhs-recursion" => rhs_recursion_attempt(n, cap, s, ctx),
        "dp-identity" => dp_attempt(n, s, ctx),
        "degeneration-p0" => degeneration_attempt(n, cap, s, ctx),
        "reflection" => reflection_attempt(s, ctx),
        "quasi-periodicity" => quasi_periodicity_attempt(s, ctx),
        "addition-formula" => addition_attempt(s, ctx),
        "poch-splitting" => splitting_attempt(s, ctx),
        "conjugation-symmetry" => conjugation_attempt(n, cap, s, ctx),
        _ => Err(Error::Params(format!("unknown identity {identity}"))),
    }
}

fn cn_jackson_attempt(n: usize, cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "x", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    insert(&mut params, "b", &s.floored(ctx));
    insert(&mut params, "c", &s.floored(ctx));
    insert(&mut params, "d", &s.floored(ctx));
    let (name, e) = solve_constraint("cn-jackson", &params, n, cap, ctx)?;
    params.insert(name, e.clone());
    let base = EllipticBase::new(params["p"].clone(), params["q"].clone(), params["x"].clone())?;
    let cn = CnParams::new(
        params["a"].clone(),
        params["b"].clone(),
        params["c"].clone(),
        params["d"].clone(),
        e,
        n,
        cap,
        base,
        ctx,
    )?;
    let lhs = cn_lhs(&cn, ctx)?;
    let rhs = cn_rhs(&cn, ctx)?;
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

fn lemma_attempt(
    n: usize,
    cap: Option<u32>,
    s: &mut Sampler,
    ctx: &PrecisionContext,
) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    insert(&mut params, "b", &s.floored(ctx));
    insert(&mut params, "c", &s.floored(ctx));
    insert(&mut params, "d", &s.floored(ctx));
    let mut xs = Vec::with_capacity(n);
    for i in 1..=n {
        let x = s.param(ctx);
        insert(&mut params, &format!("x_{i}"), &x);
        xs.push(x);
    }
    let identity = if cap.is_some() { "warnaar-thm51" } else { "warnaar-lemma" };
    let (name, e) = solve_constraint(identity, &params, n, cap.unwrap_or(0), ctx)?;
    params.insert(name, e.clone());
    let (a, b, c, d) = (
        params["a"].clone(),
        params["b"].clone(),
        params["c"].clone(),
        params["d"].clone(),
    );
    let (q, p) = (params["q"].clone(), params["p"].clone());
    let (lhs, rhs) = match cap {
        None => {
            let lp = LemmaParams::lemma(a, b, c, d, e, xs, q, p, ctx)?;
            (warnaar_lemma_lhs(&lp, ctx)?, warnaar_lemma_rhs(&lp, ctx)?)
        }
        Some(cap) => {
            let lp = LemmaParams::thm51(a, b, c, d, e, xs, cap, q, p, ctx)?;
            (warnaar_thm51_lhs(&lp, ctx)?, warnaar_thm51_rhs(&lp, ctx)?)
        }
    };
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

/// At N = 1 every term of the `(N+1)^n` sum must equal the matching term of
/// the `2^n` lemma sum.
fn termwise_attempt(n: usize, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    insert(&mut params, "b", &s.floored(ctx));
    insert(&mut params, "c", &s.floored(ctx));
    insert(&mut params, "d", &s.floored(ctx));
    let mut xs = Vec::with_capacity(n);
    for i in 1..=n {
        let x = s.param(ctx);
        insert(&mut params, &format!("x_{i}"), &x);
        xs.push(x);
    }
    let (name, e) = solve_constraint("thm51-termwise", &params, n, 1, ctx)?;
    params.insert(name, e.clone());
    let lp = LemmaParams::thm51(
        params["a"].clone(),
        params["b"].clone(),
        params["c"].clone(),
        params["d"].clone(),
        e,
        xs,
        1,
        params["q"].clone(),
        params["p"].clone(),
        ctx,
    )?;
    let mut worst: Option<Trial> = None;
    let mut ks = vec![0u32; n];
    for mask in 0u64..(1u64 << n) {
        for (i, k) in ks.iter_mut().enumerate() {
            *k = ((mask >> i) & 1) as u32;
        }
        let full = warnaar_thm51_term(&lp, &ks, ctx)?;
        let reduced = warnaar_lemma_term(&lp, &ks, ctx)?;
        let err = rel_error(&full, &reduced, ctx);
        if worst.as_ref().is_none_or(|w| matches!(err.cmp(&w.err), Some(o) if o > 0)) {
            let mut p = params.clone();
            for (i, &k) in ks.iter().enumerate() {
                insert_int(&mut p, &format!("k_{}", i + 1), k as i64, ctx);
            }
            worst = Some(Trial { params: p, lhs: full, rhs: reduced, err });
        }
    }
    Ok(worst.expect("at least one term"))
}

fn jackson_one_var_attempt(cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    insert(&mut params, "b", &s.floored(ctx));
    insert(&mut params, "c", &s.floored(ctx));
    insert(&mut params, "d", &s.floored(ctx));
    let (name, e) = solve_constraint("jackson-1var", &params, 1, cap, ctx)?;
    params.insert(name, e.clone());
    let bs = [
        params["b"].clone(),
        params["c"].clone(),
        params["d"].clone(),
        e,
    ];
    let lhs = omega_one_var(&params["a"], &bs, cap, &params["q"], &params["p"], ctx)?;
    let rhs = jackson_rhs(
        &params["a"],
        &params["b"],
        &params["c"],
        &params["d"],
        cap,
        &params["q"],
        &params["p"],
        ctx,
    )?;
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

fn bailey_attempt(cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    insert(&mut params, "b", &s.floored(ctx));
    insert(&mut params, "c", &s.floored(ctx));
    insert(&mut params, "d", &s.floored(ctx));
    insert(&mut params, "e", &s.param(ctx));
    insert(&mut params, "f", &s.param(ctx));
    let (name, g) = solve_constraint("bailey", &params, 1, cap, ctx)?;
    params.insert(name, g.clone());
    let bp = BaileyParams::new(
        params["a"].clone(),
        params["b"].clone(),
        params["c"].clone(),
        params["d"].clone(),
        params["e"].clone(),
        params["f"].clone(),
        g,
        cap,
        params["q"].clone(),
        params["p"].clone(),
        ctx,
    )?;
    let lhs = bailey_lhs(&bp, ctx)?;
    let rhs = bailey_rhs(&bp, ctx)?;
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

fn generic_omega_params(
    n: usize,
    cap: u32,
    bs_count: usize,
    s: &mut Sampler,
    ctx: &PrecisionContext,
) -> Result<(BTreeMap<String, BigComplex>, OmegaParams)> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "x", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    let mut bs = Vec::with_capacity(bs_count);
    for i in 1..=bs_count {
        let b = s.floored(ctx);
        insert(&mut params, &format!("b_{i}"), &b);
        bs.push(b);
    }
    let base = EllipticBase::new(params["p"].clone(), params["q"].clone(), params["x"].clone())?;
    let op = OmegaParams::new(params["a"].clone(), bs, n, cap, base)?;
    Ok((params, op))
}

fn record_lambda(
    params: &BTreeMap<String, BigComplex>,
    lam: &Partition,
    ctx: &PrecisionContext,
) -> BTreeMap<String, BigComplex> {
    let mut p = params.clone();
    for i in 1..=lam.len() {
        insert_int(&mut p, &format!("lambda_{i}"), lam.part(i) as i64, ctx);
    }
    p
}

/// Keeps the largest-error sub-check of an exhaustive trial.
struct Worst {
    trial: Option<Trial>,
}

impl Worst {
    fn new() -> Self {
        Worst { trial: None }
    }

    fn offer(
        &mut self,
        params: impl FnOnce() -> BTreeMap<String, BigComplex>,
        lhs: &BigComplex,
        rhs: &BigComplex,
        err: BigFloat,
    ) {
        let beats = self
            .trial
            .as_ref()
            .is_none_or(|w| matches!(err.cmp(&w.err), Some(o) if o > 0));
        if beats {
            self.trial = Some(Trial {
                params: params(),
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                err,
            });
        }
    }

    fn take(self) -> Trial {
        self.trial.expect("at least one sub-check")
    }
}

/// Termwise conjugation duality of the generic series: the summand at
/// `lambda` equals the dual-parameter summand at `lambda'`.
fn duality_attempt(n: usize, cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let (params, op) = generic_omega_params(n, cap, 4, s, ctx)?;
    let dual = op.dual(ctx)?;
    let ev = OmegaEvaluator::new(&op, ctx)?;
    let ev_dual = OmegaEvaluator::new(&dual, ctx)?;
    let mut worst = Worst::new();
    for lam in enumerate(n, cap) {
        let here = ev.term(&lam)?;
        let there = ev_dual.term(&lam.conjugate())?;
        let err = rel_error(&here, &there, ctx);
        worst.offer(|| record_lambda(&params, &lam, ctx), &here, &there, err);
    }
    Ok(worst.take())
}

/// The `A`/`B` split: each summand factors as `A_l * B_l * prod` of simple
/// Pochhammer quotients, and `A_l`, `B_l` are separately duality-invariant.
fn ab_split_attempt(n: usize, cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let (params, op) = generic_omega_params(n, cap, 4, s, ctx)?;
    let dual = op.dual(ctx)?;
    let ev = OmegaEvaluator::new(&op, ctx)?;
    let aq = op.a.mul(&op.base.q, ctx);
    let mut worst = Worst::new();
    for lam in enumerate(n, cap) {
        let conj = lam.conjugate();
        let term = ev.term(&lam)?;
        let a_here = a_factor(&op, &lam, ctx)?;
        let b_here = b_factor(&op, &lam, ctx)?;
        let mut split = a_here.mul(&b_here, ctx);
        for b in &op.bs {
            split = split.mul(&part_poch(b, &lam, &op.base, ctx)?, ctx);
            split = split.div(&part_poch(&aq.div(b, ctx), &lam, &op.base, ctx)?, ctx);
        }
        let err = rel_error(&term, &split, ctx);
        worst.offer(|| record_lambda(&params, &lam, ctx), &term, &split, err);
        let a_dual = a_factor(&dual, &conj, ctx)?;
        let err = rel_error(&a_here, &a_dual, ctx);
        worst.offer(|| record_lambda(&params, &lam, ctx), &a_here, &a_dual, err);
        let b_dual = b_factor(&dual, &conj, ctx)?;
        let err = rel_error(&b_here, &b_dual, ctx);
        worst.offer(|| record_lambda(&params, &lam, ctx), &b_here, &b_dual, err);
    }
    Ok(worst.take())
}

/// Added-box ratios: the closed form matches the direct quotient
/// `A_{lambda^+}/A_lambda`, and its column-wise rewriting matches both.
fn box_ratio_attempt(n: usize, cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    if cap == 0 {
        return Err(Error::Params("box-ratio needs N >= 1".into()));
    }
    let (params, op) = generic_omega_params(n, cap, 0, s, ctx)?;
    let mut worst = Worst::new();
    for lam in enumerate(n, cap) {
        let a_here = a_factor(&op, &lam, ctx)?;
        for bx in lam.addable_boxes() {
            let plus = lam.with_box(bx)?;
            let direct = a_factor(&op, &plus, ctx)?.div(&a_here, ctx);
            let ratio = a_box_ratio(&op, &lam, bx.row, ctx)?;
            let conj_ratio = a_box_ratio_conjugate(&op, &lam, bx.row, ctx)?;
            let err = bf_max(
                &rel_error(&ratio, &direct, ctx),
                &rel_error(&conj_ratio, &ratio, ctx),
            );
            worst.offer(
                || {
                    let mut p = record_lambda(&params, &lam, ctx);
                    insert_int(&mut p, "row", bx.row as i64, ctx);
                    p
                },
                &ratio,
                &direct,
                err,
            );
        }
    }
    Ok(worst.take())
}

/// The closed form peels one terminator step:
/// `rhs(a, N+1) = prefactor * rhs(aq, N)` with the prefactor a plain
/// Pochhammer quotient in base `1/x`.
fn rhs_recursion_attempt(n: usize, cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "x", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    insert(&mut params, "b", &s.floored(ctx));
    insert(&mut params, "c", &s.floored(ctx));
    insert(&mut params, "d", &s.floored(ctx));
    let base = EllipticBase::new(params["p"].clone(), params["q"].clone(), params["x"].clone())?;
    let (p, q, x) = (&params["p"], &params["q"], &params["x"]);
    let (a, b, c, d) = (&params["a"], &params["b"], &params["c"], &params["d"]);
    let lhs = rhs_closed_form(a, b, c, d, n, cap + 1, &base, ctx)?;
    let aq = a.mul(q, ctx);
    let bcd = b.mul(c, ctx).mul(d, ctx);
    let x_inv = x.recip(ctx);
    let mut pref_num = BigComplex::one(ctx);
    for u in [
        aq.clone(),
        aq.div(&b.mul(c, ctx), ctx),
        aq.div(&b.mul(d, ctx), ctx),
        aq.div(&c.mul(d, ctx), ctx),
    ] {
        pref_num = pref_num.mul(&qp_num(&u, n as u32, &x_inv, p, ctx)?, ctx);
    }
    let mut pref_den = BigComplex::one(ctx);
    for u in [aq.div(b, ctx), aq.div(c, ctx), aq.div(d, ctx), aq.div(&bcd, ctx)] {
        pref_den = pref_den.mul(
            &qp_den("recursion prefactor", &u, n as u32, &x_inv, p, ctx)?,
            ctx,
        );
    }
    let shifted = rhs_closed_form(&aq, b, c, d, n, cap, &base, ctx)?;
    let rhs = pref_num.div(&pref_den, ctx).mul(&shifted, ctx);
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

fn dp_attempt(n: usize, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    let base = EllipticBase::new(
        params["p"].clone(),
        params["q"].clone(),
        BigComplex::one(ctx),
    )?;
    let (lhs, rhs) = dp_identity_sides(&params["a"], n, &base, ctx)?;
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

/// At p = 0 both sides must agree with an independent basic-Pochhammer
/// oracle that never touches the theta code path; the recorded error is the
/// worst of all pairwise comparisons of the four values.
fn degeneration_attempt(n: usize, cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &BigComplex::zero(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "x", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    insert(&mut params, "b", &s.floored(ctx));
    insert(&mut params, "c", &s.floored(ctx));
    insert(&mut params, "d", &s.floored(ctx));
    let (name, e) = solve_constraint("degeneration-p0", &params, n, cap, ctx)?;
    params.insert(name, e.clone());
    let base = EllipticBase::new(BigComplex::zero(ctx), params["q"].clone(), params["x"].clone())?;
    let cn = CnParams::new(
        params["a"].clone(),
        params["b"].clone(),
        params["c"].clone(),
        params["d"].clone(),
        e,
        n,
        cap,
        base,
        ctx,
    )?;
    let lhs = cn_lhs(&cn, ctx)?;
    let rhs = cn_rhs(&cn, ctx)?;
    let oracle_lhs = trig_oracle::cn_lhs(&cn, ctx);
    let oracle_rhs = trig_oracle::cn_rhs(&cn, ctx);
    let mut err = rel_error(&lhs, &rhs, ctx);
    err = bf_max(&err, &rel_error(&lhs, &oracle_lhs, ctx));
    err = bf_max(&err, &rel_error(&rhs, &oracle_rhs, ctx));
    err = bf_max(&err, &rel_error(&oracle_lhs, &oracle_rhs, ctx));
    Ok(Trial { params, lhs, rhs, err })
}

/// `E(x) = -x E(1/x)`
fn reflection_attempt(s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "x", &s.param(ctx));
    let (p, x) = (&params["p"], &params["x"]);
    let lhs = theta_e(x, p, ctx)?;
    let rhs = theta_e(&x.recip(ctx), p, ctx)?.mul(x, ctx).neg();
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

/// `E(px) = -E(x)/x`
fn quasi_periodicity_attempt(s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "x", &s.param(ctx));
    let (p, x) = (&params["p"], &params["x"]);
    let lhs = theta_e(&p.mul(x, ctx), p, ctx)?;
    let rhs = theta_e(x, p, ctx)?.div(x, ctx).neg();
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

/// The three-term relation for elliptic numbers,
/// `[x+z][x-z][y+w][y-w] = [x+y][x-y][z+w][z-w] + [x+w][x-w][y+z][y-z]`,
/// checked in additive notation (it degenerates to the trigonometric
/// identity whenever the sampled nome is replaced by zero, which the
/// `p = 0` short-circuit of the theta block already covers).
fn addition_attempt(s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    for k in ["x", "y", "z", "w"] {
        insert(&mut params, k, &s.param(ctx));
    }
    let base = EllipticBase::new(
        params["p"].clone(),
        params["q"].clone(),
        BigComplex::one(ctx),
    )?;
    let quad = |u: &str, v: &str, sign: i64| -> Result<BigComplex> {
        let arg = if sign > 0 {
            params[u].add(&params[v], ctx)
        } else {
            params[u].sub(&params[v], ctx)
        };
        elliptic_number(&arg, &base, ctx)
    };
    let lhs = quad("x", "z", 1)?
        .mul(&quad("x", "z", -1)?, ctx)
        .mul(&quad("y", "w", 1)?, ctx)
        .mul(&quad("y", "w", -1)?, ctx);
    let t1 = quad("x", "y", 1)?
        .mul(&quad("x", "y", -1)?, ctx)
        .mul(&quad("z", "w", 1)?, ctx)
        .mul(&quad("z", "w", -1)?, ctx);
    let t2 = quad("x", "w", 1)?
        .mul(&quad("x", "w", -1)?, ctx)
        .mul(&quad("y", "z", 1)?, ctx)
        .mul(&quad("y", "z", -1)?, ctx);
    let rhs = t1.add(&t2, ctx);
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

/// `(a;q)_{m+k} = (a;q)_m (a q^m;q)_k` over signed indices.
fn splitting_attempt(s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "a", &s.param(ctx));
    let m = s.int(-5, 5);
    let k = s.int(-5, 5);
    insert_int(&mut params, "m", m, ctx);
    insert_int(&mut params, "k", k, ctx);
    let base = EllipticBase::new(
        params["p"].clone(),
        params["q"].clone(),
        BigComplex::one(ctx),
    )?;
    let a = &params["a"];
    let lhs = qpoch(a, m + k, &base, ctx)?;
    let shifted = a.mul(&params["q"].powi(m, ctx), ctx);
    let rhs = qpoch(a, m, &base, ctx)?.mul(&qpoch(&shifted, k, &base, ctx)?, ctx);
    let err = rel_error(&lhs, &rhs, ctx);
    Ok(Trial { params, lhs, rhs, err })
}

/// `(b;q,x)_lambda = (b;1/x,1/q)_{lambda'}` for a random partition.
fn conjugation_attempt(n: usize, cap: u32, s: &mut Sampler, ctx: &PrecisionContext) -> Result<Trial> {
    let mut params = BTreeMap::new();
    insert(&mut params, "p", &s.nome(ctx));
    insert(&mut params, "q", &s.param(ctx));
    insert(&mut params, "x", &s.param(ctx));
    insert(&mut params, "b", &s.param(ctx));
    let mut parts: Vec<u32> = (0..n).map(|_| s.int(0, cap as i64) as u32).collect();
    parts.sort_unstable_by(|u, v| v.cmp(u));
    let lam = Partition::new(parts, cap)?;
    let base = EllipticBase::new(params["p"].clone(), params["q"].clone(), params["x"].clone())?;
    let lhs = part_poch(&params["b"], &lam, &base, ctx)?;
    let rhs = part_poch(&params["b"], &lam.conjugate(), &base.dual(ctx)?, ctx)?;
    let err = rel_error(&lhs, &rhs, ctx);
    let trial_params = record_lambda(&params, &lam, ctx);
    Ok(Trial { params: trial_params, lhs, rhs, err })
}

// ---------------------------------------------------------------------------
// independent p = 0 oracle

/// Plain basic-Pochhammer evaluation of the `C_n` sum at `p = 0`, written
/// against `(a;q)_k = prod_j (1 - a q^j)` with straight-line loops and no
/// calls into the theta block. Used only to cross-check the degeneration.
mod trig_oracle {
    use super::*;

    fn poch(u: &BigComplex, k: u32, q: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
        let mut acc = BigComplex::one(ctx);
        let mut arg = u.clone();
        for _ in 0..k {
            acc = acc.mul(&arg.one_minus(ctx), ctx);
            arg = arg.mul(q, ctx);
        }
        acc
    }

    fn row_poch(
        u: &BigComplex,
        lam: &Partition,
        q: &BigComplex,
        x: &BigComplex,
        ctx: &PrecisionContext,
    ) -> BigComplex {
        let x_inv = x.recip(ctx);
        let mut acc = BigComplex::one(ctx);
        let mut row = u.clone();
        for j in 1..=lam.len() {
            acc = acc.mul(&poch(&row, lam.part(j), q, ctx), ctx);
            row = row.mul(&x_inv, ctx);
        }
        acc
    }

    fn one_minus_quot(
        base_arg: &BigComplex,
        shift: &BigComplex,
        ctx: &PrecisionContext,
    ) -> BigComplex {
        base_arg
            .mul(shift, ctx)
            .one_minus(ctx)
            .div(&base_arg.one_minus(ctx), ctx)
    }

    fn term(lam: &Partition, cn: &CnParams, ctx: &PrecisionContext) -> BigComplex {
        let CnParams { a, b, c, d, e, n, cap, base } = cn;
        let (q, x) = (&base.q, &base.x);
        let n = *n as i64;
        let aq = a.mul(q, ctx);
        let mut t = BigComplex::one(ctx);
        for i in 1..=n {
            let li = lam.part(i as usize) as i64;
            let ax2 = a.mul(&x.powi(2 * (1 - i), ctx), ctx);
            t = t.mul(&one_minus_quot(&ax2, &q.powi(2 * li, ctx), ctx), ctx);
            t = t.mul(&q.powi(li, ctx), ctx).mul(&x.powi(2 * (i - 1) * li, ctx), ctx);
        }
        for i in 1..=n {
            for j in i + 1..=n {
                let li = lam.part(i as usize) as i64;
                let lj = lam.part(j as usize) as i64;
                let (sum, diff) = ((li + lj) as u32, (li - lj) as u32);
                t = t.mul(&one_minus_quot(&x.powi(j - i, ctx), &q.powi(li - lj, ctx), ctx), ctx);
                t = t.mul(
                    &one_minus_quot(&a.mul(&x.powi(2 - i - j, ctx), ctx), &q.powi(li + lj, ctx), ctx),
                    ctx,
                );
                t = t.mul(&poch(&a.mul(&x.powi(3 - i - j, ctx), ctx), sum, q, ctx), ctx);
                t = t.mul(&poch(&x.powi(j - i + 1, ctx), diff, q, ctx), ctx);
                t = t.div(&poch(&aq.mul(&x.powi(1 - i - j, ctx), ctx), sum, q, ctx), ctx);
                t = t.div(&poch(&q.mul(&x.powi(j - i - 1, ctx), ctx), diff, q, ctx), ctx);
            }
        }
        for u in [
            a.mul(&x.powi(1 - n, ctx), ctx),
            b.clone(),
            c.clone(),
            d.clone(),
            e.clone(),
            q.powi(-(*cap as i64), ctx),
        ] {
            t = t.mul(&row_poch(&u, lam, q, x, ctx), ctx);
        }
        for u in [
            q.mul(&x.powi(n - 1, ctx), ctx),
            aq.div(b, ctx),
            aq.div(c, ctx),
            aq.div(d, ctx),
            aq.div(e, ctx),
            a.mul(&q.powi(*cap as i64 + 1, ctx), ctx),
        ] {
            t = t.div(&row_poch(&u, lam, q, x, ctx), ctx);
        }
        t
    }

    pub fn cn_lhs(cn: &CnParams, ctx: &PrecisionContext) -> BigComplex {
        let mut acc = BigComplex::zero(ctx);
        for lam in enumerate(cn.n, cn.cap) {
            acc = acc.add(&term(&lam, cn, ctx), ctx);
        }
        acc
    }

    pub fn cn_rhs(cn: &CnParams, ctx: &PrecisionContext) -> BigComplex {
        let CnParams { a, b, c, d, n, cap, base, .. } = cn;
        let (q, x) = (&base.q, &base.x);
        let aq = a.mul(q, ctx);
        let full = Partition::full(*n, *cap);
        let mut acc = BigComplex::one(ctx);
        for u in [
            aq.clone(),
            aq.div(&b.mul(c, ctx), ctx),
            aq.div(&b.mul(d, ctx), ctx),
            aq.div(&c.mul(d, ctx), ctx),
        ] {
            acc = acc.mul(&row_poch(&u, &full, q, x, ctx), ctx);
        }
        for u in [
            aq.div(b, ctx),
            aq.div(c, ctx),
            aq.div(d, ctx),
            aq.div(&b.mul(c, ctx).mul(d, ctx), ctx),
        ] {
            acc = acc.div(&row_poch(&u, &full, q, x, ctx), ctx);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_seeds_are_distinct_and_stable() {
        let s1 = section_seed("cn-jackson", 2, 2, 1);
        let s2 = section_seed("cn-jackson", 2, 3, 1);
        let s3 = section_seed("duality", 2, 2, 1);
        assert_ne!(s1, s2);
        assert_ne!(s1, s3);
        assert_eq!(s1, section_seed("cn-jackson", 2, 2, 1));
        assert_eq!(s1 ^ 1 ^ 7, section_seed("cn-jackson", 2, 2, 7));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SampleConfig::new(1);
        assert!(cfg.validate().is_ok());
        cfg.p_modulus_range = (0.0, 0.5);
        assert!(cfg.validate().is_err());
        cfg = SampleConfig::new(1);
        cfg.p_modulus_range = (0.5, 1.2);
        assert!(cfg.validate().is_err());
        cfg = SampleConfig::new(1);
        cfg.max_resamples = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn constraint_residual_vanishes() {
        let ctx = PrecisionContext::new(50).unwrap();
        let cfg = SampleConfig::new(17);
        let mut s = Sampler::new(11, &cfg);
        let mut params = BTreeMap::new();
        insert(&mut params, "a", &s.param(&ctx));
        insert(&mut params, "b", &s.floored(&ctx));
        insert(&mut params, "c", &s.floored(&ctx));
        insert(&mut params, "d", &s.floored(&ctx));
        insert(&mut params, "q", &s.param(&ctx));
        insert(&mut params, "x", &s.param(&ctx));
        let (name, e) = solve_constraint("cn-jackson", &params, 2, 2, &ctx).unwrap();
        assert_eq!(name, "e");
        // substitute back: bcde x^(n-1) vs a^2 q^(N+1)
        let lhs = params["b"]
            .mul(&params["c"], &ctx)
            .mul(&params["d"], &ctx)
            .mul(&e, &ctx)
            .mul(&params["x"], &ctx);
        let rhs = params["a"]
            .mul(&params["a"], &ctx)
            .mul(&params["q"].powi(3, &ctx), &ctx);
        assert!(within(&rel_error(&lhs, &rhs, &ctx), 1e-47, &ctx));
    }

    #[test]
    fn trivial_cell_is_exact() {
        let report = verify_identity("cn-jackson", 1, 0, 2, &SampleConfig::new(5), 50).unwrap();
        assert!(report.passed());
        assert_eq!(report.max_rel_err, "0");
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SampleConfig::new(42);
        let r1 = verify_identity("cn-jackson", 2, 2, 3, &cfg, 50).unwrap();
        let r2 = verify_identity("cn-jackson", 2, 2, 3, &cfg, 50).unwrap();
        assert!(r1.passed());
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
        let r3 = verify_identity("cn-jackson", 2, 2, 3, &SampleConfig::new(43), 50).unwrap();
        assert_ne!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r3).unwrap()
        );
    }

    #[test]
    fn identity_smoke_single_cells() {
        // one cheap cell per identity; the full matrix lives in the suite
        let cfg = SampleConfig::new(9);
        for (identity, n, cap) in [
            ("cn-jackson", 2usize, 1u32),
            ("warnaar-lemma", 2, 1),
            ("warnaar-thm51", 2, 1),
            ("thm51-termwise", 2, 1),
            ("jackson-1var", 1, 2),
            ("bailey", 1, 1),
            ("duality", 2, 2),
            ("ab-split", 2, 1),
            ("box-ratio", 2, 2),
            ("rhs-recursion", 2, 1),
            ("dp-identity", 3, 0),
            ("degeneration-p0", 2, 1),
            ("reflection", 1, 0),
            ("quasi-periodicity", 1, 0),
            ("addition-formula", 1, 0),
            ("poch-splitting", 1, 0),
            ("conjugation-symmetry", 2, 3),
        ] {
            let report = verify_identity(identity, n, cap, 2, &cfg, 50).unwrap();
            assert!(
                report.passed(),
                "{identity} n={n} N={cap}: max_rel_err={} diagnosis={:?}",
                report.max_rel_err,
                report.diagnosis
            );
        }
    }

    #[test]
    fn unknown_identity_rejected() {
        let err = verify_identity("no-such-check", 1, 1, 1, &SampleConfig::new(1), 50);
        assert!(err.is_err());
        assert!(suite(Some(&["bogus".to_string()]), &SampleConfig::new(1), 50).is_err());
        assert!(suite(Some(&[]), &SampleConfig::new(1), 50).is_err());
    }

    #[test]
    fn filtered_suite_runs_named_sections_only() {
        let cfg = SampleConfig::new(3);
        let report = suite(Some(&["dp-identity".to_string()]), &cfg, 50).unwrap();
        assert!(report.passed());
        assert_eq!(report.sections.len(), 6);
        assert!(report.sections.iter().all(|s| s.identity == "dp-identity"));
    }
}
