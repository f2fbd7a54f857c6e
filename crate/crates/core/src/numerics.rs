//! Arbitrary-precision real and complex arithmetic.
//!
//! Provides the [`PrecisionContext`] that every evaluation threads through,
//! a [`BigComplex`] type built on `astro-float` reals, relative-error
//! comparison, the principal complex power, and deterministic decimal
//! formatting/parsing used by reports and parameter files.

use std::cell::{RefCell, RefMut};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

use crate::error::{Error, Result};

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: usize = 50;
/// Smallest supported working precision.
pub const MIN_DIGITS: usize = 20;
/// Largest supported working precision (tolerances are held as `f64`, which
/// caps the representable `10^-(digits-5)` around 300 digits).
pub const MAX_DIGITS: usize = 300;
/// Default `|E(y)| / scale` ratio below which a denominator is a pole.
pub const DEFAULT_POLE_THRESHOLD: f64 = 1e-6;

const GUARD_BITS: usize = 64;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Shared precision/tolerance state for a run.
///
/// All arithmetic is carried out with `digits * log2(10)` mantissa bits plus
/// a fixed guard margin, rounding to even. The context also owns the cached
/// transcendental constants and the two tolerances the rest of the crate
/// keys off:
///
/// * `pass_tolerance` — relative error below which an identity check passes
///   (default `10^-(digits-15)`),
/// * `pole_threshold` — ratio `|E(y)| / scale` below which a denominator
///   factor is treated as a pole (default `10^-6`).
pub struct PrecisionContext {
    digits: usize,
    bits: usize,
    pass_tolerance: f64,
    pole_threshold: f64,
    consts: RefCell<Consts>,
}

impl std::fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrecisionContext")
            .field("digits", &self.digits)
            .field("bits", &self.bits)
            .field("pass_tolerance", &self.pass_tolerance)
            .field("pole_threshold", &self.pole_threshold)
            .finish()
    }
}

impl PrecisionContext {
    /// Context with default tolerances at the given decimal precision.
    pub fn new(digits: usize) -> Result<Self> {
        let pass = pow10_neg(digits as i32 - 15);
        Self::with_tolerances(digits, pass, DEFAULT_POLE_THRESHOLD)
    }

    /// Context with explicit tolerances.
    pub fn with_tolerances(digits: usize, pass_tolerance: f64, pole_threshold: f64) -> Result<Self> {
        if !(MIN_DIGITS..=MAX_DIGITS).contains(&digits) {
            return Err(Error::Params(format!(
                "digits must lie in [{MIN_DIGITS}, {MAX_DIGITS}], got {digits}"
            )));
        }
        if !(pass_tolerance > pow10_neg(digits as i32)) {
            return Err(Error::Params(format!(
                "pass_tolerance {pass_tolerance:e} must exceed 10^-digits"
            )));
        }
        if !(pole_threshold > 0.0 && pole_threshold < 1.0) {
            return Err(Error::Params(format!(
                "pole_threshold {pole_threshold:e} must lie in (0, 1)"
            )));
        }
        let bits = (digits as f64 * LOG2_10).ceil() as usize + GUARD_BITS;
        let consts = Consts::new()
            .map_err(|e| Error::Params(format!("constant cache init failed: {e:?}")))?;
        Ok(PrecisionContext {
            digits,
            bits,
            pass_tolerance,
            pole_threshold,
            consts: RefCell::new(consts),
        })
    }

    /// A context at `extra` more decimal digits, default tolerances.
    pub fn escalate(&self, extra: usize) -> Result<Self> {
        PrecisionContext::new((self.digits + extra).min(MAX_DIGITS))
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    /// Working mantissa precision in bits (includes guard bits).
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn pass_tolerance(&self) -> f64 {
        self.pass_tolerance
    }

    pub fn pole_threshold(&self) -> f64 {
        self.pole_threshold
    }

    pub fn rm(&self) -> RoundingMode {
        RoundingMode::ToEven
    }

    pub(crate) fn consts(&self) -> RefMut<'_, Consts> {
        self.consts.borrow_mut()
    }

    // --- BigFloat construction helpers ---

    pub fn real_zero(&self) -> BigFloat {
        BigFloat::from_i64(0, self.bits)
    }

    pub fn real_one(&self) -> BigFloat {
        BigFloat::from_i64(1, self.bits)
    }

    pub fn real_from_i64(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.bits)
    }

    pub fn real_from_f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.bits)
    }

    pub fn pi(&self) -> BigFloat {
        let bits = self.bits;
        self.consts().pi(bits, self.rm())
    }

    /// Parse a decimal string (plain or scientific notation).
    pub fn parse_real(&self, s: &str) -> Result<BigFloat> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(Error::Params("empty decimal string".into()));
        }
        let normalized = trimmed.trim_start_matches('+').to_ascii_lowercase();
        let v = BigFloat::parse(&normalized, Radix::Dec, self.bits, self.rm(), &mut self.consts());
        if v.is_nan() {
            return Err(Error::Params(format!("not a decimal number: {trimmed:?}")));
        }
        Ok(v)
    }
}

/// `10^-k` as `f64` (k up to ~300).
pub fn pow10_neg(k: i32) -> f64 {
    10f64.powi(-k)
}

/// Mantissa-exponent based `f64` approximation; survives exponents far
/// outside `f64` range by saturating to `0`/`inf`.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _, sign, exp, _) = x.as_raw_parts().expect("finite nonzero value");
    let top = *words.last().expect("nonzero mantissa");
    let frac = top as f64 / (u64::MAX as f64 + 1.0);
    let mag = frac * 2f64.powi(exp);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// `ln |x|` as `f64`, exact over the whole BigFloat exponent range.
pub fn ln_mag(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() || x.is_inf_neg() {
        return f64::INFINITY;
    }
    let (words, _, _, exp, _) = x.as_raw_parts().expect("finite nonzero value");
    let top = *words.last().expect("nonzero mantissa");
    let frac = top as f64 / (u64::MAX as f64 + 1.0);
    frac.ln() + exp as f64 * std::f64::consts::LN_2
}

fn bf_ge_zero(x: &BigFloat) -> bool {
    !x.is_negative() || x.is_zero()
}

/// Four-quadrant arctangent with the principal branch, result in `(-pi, pi]`.
pub fn atan2(y: &BigFloat, x: &BigFloat, ctx: &PrecisionContext) -> BigFloat {
    let bits = ctx.bits();
    let rm = ctx.rm();
    if y.is_zero() {
        return if bf_ge_zero(x) && !x.is_zero() || x.is_zero() {
            ctx.real_zero()
        } else {
            ctx.pi()
        };
    }
    if x.is_zero() {
        let half_pi = ctx.pi().div(&ctx.real_from_i64(2), bits, rm);
        return if y.is_negative() { half_pi.neg() } else { half_pi };
    }
    let base = y.div(x, bits, rm).atan(bits, rm, &mut ctx.consts());
    if x.is_negative() {
        if y.is_negative() {
            base.sub(&ctx.pi(), bits, rm)
        } else {
            base.add(&ctx.pi(), bits, rm)
        }
    } else {
        base
    }
}

/// Complex number with arbitrary-precision components.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.real_zero(), ctx.real_zero())
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.real_one(), ctx.real_zero())
    }

    pub fn from_i64(v: i64, ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.real_from_i64(v), ctx.real_zero())
    }

    pub fn from_f64s(re: f64, im: f64, ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.real_from_f64(re), ctx.real_from_f64(im))
    }

    pub fn from_real(re: BigFloat, ctx: &PrecisionContext) -> Self {
        BigComplex::new(re, ctx.real_zero())
    }

    /// Parse from a pair of decimal strings.
    pub fn from_decimal(re: &str, im: &str, ctx: &PrecisionContext) -> Result<Self> {
        Ok(BigComplex::new(ctx.parse_real(re)?, ctx.parse_real(im)?))
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        let bad = |v: &BigFloat| v.is_nan() || v.is_inf_pos() || v.is_inf_neg();
        !bad(&self.re) && !bad(&self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn eq_exact(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }

    pub fn add(&self, o: &Self, ctx: &PrecisionContext) -> Self {
        let (b, r) = (ctx.bits(), ctx.rm());
        BigComplex::new(self.re.add(&o.re, b, r), self.im.add(&o.im, b, r))
    }

    pub fn sub(&self, o: &Self, ctx: &PrecisionContext) -> Self {
        let (b, r) = (ctx.bits(), ctx.rm());
        BigComplex::new(self.re.sub(&o.re, b, r), self.im.sub(&o.im, b, r))
    }

    pub fn mul(&self, o: &Self, ctx: &PrecisionContext) -> Self {
        let (b, r) = (ctx.bits(), ctx.rm());
        let ac = self.re.mul(&o.re, b, r);
        let bd = self.im.mul(&o.im, b, r);
        let ad = self.re.mul(&o.im, b, r);
        let bc = self.im.mul(&o.re, b, r);
        BigComplex::new(ac.sub(&bd, b, r), ad.add(&bc, b, r))
    }

    pub fn div(&self, o: &Self, ctx: &PrecisionContext) -> Self {
        let (b, r) = (ctx.bits(), ctx.rm());
        let den = o.abs_sq(ctx);
        let ac = self.re.mul(&o.re, b, r);
        let bd = self.im.mul(&o.im, b, r);
        let bc = self.im.mul(&o.re, b, r);
        let ad = self.re.mul(&o.im, b, r);
        BigComplex::new(
            ac.add(&bd, b, r).div(&den, b, r),
            bc.sub(&ad, b, r).div(&den, b, r),
        )
    }

    pub fn neg(&self) -> Self {
        BigComplex::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), self.im.neg())
    }

    pub fn recip(&self, ctx: &PrecisionContext) -> Self {
        BigComplex::one(ctx).div(self, ctx)
    }

    pub fn mul_real(&self, f: &BigFloat, ctx: &PrecisionContext) -> Self {
        let (b, r) = (ctx.bits(), ctx.rm());
        BigComplex::new(self.re.mul(f, b, r), self.im.mul(f, b, r))
    }

    /// `1 - self`; hot path inside theta products.
    pub fn one_minus(&self, ctx: &PrecisionContext) -> Self {
        let (b, r) = (ctx.bits(), ctx.rm());
        BigComplex::new(ctx.real_one().sub(&self.re, b, r), self.im.neg())
    }

    /// Integer power by binary exponentiation; negative exponents invert.
    pub fn powi(&self, n: i64, ctx: &PrecisionContext) -> Self {
        if n == 0 {
            return BigComplex::one(ctx);
        }
        let mut base = if n < 0 { self.recip(ctx) } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = BigComplex::one(ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, ctx);
            }
        }
        acc
    }

    pub fn abs_sq(&self, ctx: &PrecisionContext) -> BigFloat {
        let (b, r) = (ctx.bits(), ctx.rm());
        let rr = self.re.mul(&self.re, b, r);
        let ii = self.im.mul(&self.im, b, r);
        rr.add(&ii, b, r)
    }

    pub fn abs(&self, ctx: &PrecisionContext) -> BigFloat {
        self.abs_sq(ctx).sqrt(ctx.bits(), ctx.rm())
    }

    /// `ln |self|` as `f64`; robust across the whole exponent range.
    pub fn ln_mag_f64(&self) -> f64 {
        let a = ln_mag(&self.re);
        let b = ln_mag(&self.im);
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        // 0.5 * ln(re^2 + im^2) via log-sum-exp
        m + 0.5 * ((2.0 * (a - m)).exp() + (2.0 * (b - m)).exp()).ln()
    }

    /// `|self|` as `f64` (saturating far outside `f64` range).
    pub fn mag_f64(&self) -> f64 {
        to_f64(&self.re).hypot(to_f64(&self.im))
    }

    pub fn exp(&self, ctx: &PrecisionContext) -> Self {
        let (b, r) = (ctx.bits(), ctx.rm());
        let mag = self.re.exp(b, r, &mut ctx.consts());
        let c = self.im.cos(b, r, &mut ctx.consts());
        let s = self.im.sin(b, r, &mut ctx.consts());
        BigComplex::new(mag.mul(&c, b, r), mag.mul(&s, b, r))
    }

    /// Principal logarithm, imaginary part in `(-pi, pi]`.
    pub fn ln(&self, ctx: &PrecisionContext) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("log of zero".into()));
        }
        let (b, r) = (ctx.bits(), ctx.rm());
        let mag = self.abs(ctx).ln(b, r, &mut ctx.consts());
        let arg = atan2(&self.im, &self.re, ctx);
        Ok(BigComplex::new(mag, arg))
    }

    /// Decimal pair at full working precision; round-trips bit-exactly
    /// through [`BigComplex::from_decimal`].
    pub fn to_decimal_full(&self, ctx: &PrecisionContext) -> (String, String) {
        (format_real_full(&self.re, ctx), format_real_full(&self.im, ctx))
    }

    /// Decimal pair rounded to `sig` significant digits.
    pub fn to_decimal_sig(&self, sig: usize, ctx: &PrecisionContext) -> (String, String) {
        (format_real_sig(&self.re, sig, ctx), format_real_sig(&self.im, sig, ctx))
    }
}

/// Relative error `|u - v| / max(|u|, |v|)`; exactly `0` when `u = v`
/// (in particular when both are zero).
pub fn rel_error(u: &BigComplex, v: &BigComplex, ctx: &PrecisionContext) -> BigFloat {
    if u.eq_exact(v) {
        return ctx.real_zero();
    }
    let diff = u.sub(v, ctx).abs(ctx);
    let m = bf_max(&u.abs(ctx), &v.abs(ctx));
    if m.is_zero() {
        return ctx.real_zero();
    }
    diff.div(&m, ctx.bits(), ctx.rm())
}

/// The larger of two reals (NaN loses).
pub fn bf_max(a: &BigFloat, b: &BigFloat) -> BigFloat {
    match a.cmp(b) {
        Some(c) if c > 0 => a.clone(),
        Some(_) => b.clone(),
        None => {
            if a.is_nan() {
                b.clone()
            } else {
                a.clone()
            }
        }
    }
}

/// True when `err <= tol` (NaN fails).
pub fn within(err: &BigFloat, tol: f64, ctx: &PrecisionContext) -> bool {
    match err.cmp(&ctx.real_from_f64(tol)) {
        Some(c) => c <= 0,
        None => false,
    }
}

/// Principal power `w^z = exp(z log w)`, argument of `w` taken in `(-pi, pi]`.
///
/// `w = 0` yields `0` when `Re z > 0` and a domain error otherwise.
pub fn principal_power(w: &BigComplex, z: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    if w.is_zero() {
        return if !z.re().is_negative() && !z.re().is_zero() {
            Ok(BigComplex::zero(ctx))
        } else {
            Err(Error::Domain("0^z with Re z <= 0".into()))
        };
    }
    let lw = w.ln(ctx)?;
    Ok(z.mul(&lw, ctx).exp(ctx))
}

// --- decimal formatting ---

/// Native formatting at full precision; round-trips bit-exactly through
/// [`PrecisionContext::parse_real`] at the same context.
pub fn format_real_full(x: &BigFloat, ctx: &PrecisionContext) -> String {
    if x.is_zero() {
        return "0".into();
    }
    match x.format(Radix::Dec, ctx.rm(), &mut ctx.consts()) {
        Ok(s) => s,
        Err(_) => {
            if x.is_nan() {
                "NaN".into()
            } else if x.is_inf_neg() {
                "-Inf".into()
            } else {
                "Inf".into()
            }
        }
    }
}

/// Round to `sig` significant digits and render plainly when the exponent is
/// moderate, scientifically otherwise. Deterministic string arithmetic only.
pub fn format_real_sig(x: &BigFloat, sig: usize, ctx: &PrecisionContext) -> String {
    let sig = sig.max(1);
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_inf_pos() {
        return "Inf".into();
    }
    if x.is_inf_neg() {
        return "-Inf".into();
    }
    if x.is_zero() {
        return "0".into();
    }
    let raw = match x.format(Radix::Dec, ctx.rm(), &mut ctx.consts()) {
        Ok(s) => s,
        Err(_) => return "NaN".into(),
    };
    let (neg, mut digits, mut e) = split_sci(&raw);
    round_digits(&mut digits, &mut e, sig);
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let body = if (-4..=20).contains(&e) {
        render_plain(&digits, e)
    } else {
        render_sci(&digits, e)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Human-readable complex rendering, e.g. `0.5 + 0i` or `1.2 - 0.3i`.
pub fn format_complex_human(z: &BigComplex, sig: usize, ctx: &PrecisionContext) -> String {
    let re = format_real_sig(z.re(), sig, ctx);
    let im = format_real_sig(z.im(), sig, ctx);
    if let Some(stripped) = im.strip_prefix('-') {
        format!("{re} - {stripped}i")
    } else {
        format!("{re} + {im}i")
    }
}

/// Split `astro-float` scientific notation into (negative, digit string,
/// exponent), normalized so the value is `0.D * 10^(e+1)` with leading digit
/// nonzero, i.e. `d1.d2... * 10^e`.
fn split_sci(s: &str) -> (bool, String, i64) {
    let s = s.trim();
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (mant, exp) = match rest.split_once(['e', 'E']) {
        Some((m, x)) => (m, x.parse::<i64>().unwrap_or(0)),
        None => (rest, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    let mut digits: String = int_part.chars().chain(frac_part.chars()).collect();
    // value = 0.digits * 10^(exp + int_len)
    let mut e10 = exp + int_part.len() as i64;
    while digits.len() > 1 && digits.starts_with('0') {
        digits.remove(0);
        e10 -= 1;
    }
    if digits.chars().all(|c| c == '0') {
        return (false, "0".into(), 0);
    }
    (neg, digits, e10 - 1)
}

/// Half-up rounding of a digit string to `sig` digits, adjusting `e` on carry
/// overflow.
fn round_digits(digits: &mut String, e: &mut i64, sig: usize) {
    if digits.len() <= sig {
        return;
    }
    let bytes = digits.as_bytes();
    let round_up = bytes[sig] >= b'5';
    digits.truncate(sig);
    if round_up {
        let mut v: Vec<u8> = digits.bytes().collect();
        let mut i = v.len();
        loop {
            if i == 0 {
                v.insert(0, b'1');
                v.truncate(sig);
                *e += 1;
                break;
            }
            i -= 1;
            if v[i] == b'9' {
                v[i] = b'0';
            } else {
                v[i] += 1;
                break;
            }
        }
        *digits = String::from_utf8(v).expect("digit bytes");
    }
}

fn render_plain(digits: &str, e: i64) -> String {
    if e >= 0 {
        let e = e as usize;
        if digits.len() > e + 1 {
            format!("{}.{}", &digits[..=e], &digits[e + 1..])
        } else {
            let mut s = digits.to_string();
            s.push_str(&"0".repeat(e + 1 - digits.len()));
            s
        }
    } else {
        let zeros = "0".repeat((-e - 1) as usize);
        format!("0.{zeros}{digits}")
    }
}

fn render_sci(digits: &str, e: i64) -> String {
    let mant = if digits.len() > 1 {
        format!("{}.{}", &digits[..1], &digits[1..])
    } else {
        digits.to_string()
    };
    if e < 0 {
        format!("{mant}e-{}", -e)
    } else {
        format!("{mant}e+{e}")
    }
}
