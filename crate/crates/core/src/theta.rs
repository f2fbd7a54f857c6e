//! The theta building block `E(x)` and additive elliptic numbers.
//!
//! ```text
//! E(x) = prod_{j>=0} (1 - x p^j)(1 - p^{j+1}/x)          0 <= |p| < 1
//! [x]  = q^{(1-x)/2} E(q^x) / E(q)                        normalized so [1] = 1
//! [x]_n = [x][x+1]...[x+n-1]
//! ```
//!
//! The infinite product is truncated after [`truncation_length`] factors so
//! the dropped tail perturbs the value by less than `10^-digits` relatively.
//! `p = 0` is special-cased exactly to `E(x) = 1 - x`.

use crate::error::{Error, Result};
use crate::numerics::{principal_power, BigComplex, PrecisionContext};

const LN_10: f64 = std::f64::consts::LN_10;

/// The base triple `(p, q, x)`: elliptic nome, series base, and the
/// principal-specialization step used by partition-indexed Pochhammers.
#[derive(Clone, Debug)]
pub struct EllipticBase {
    pub p: BigComplex,
    pub q: BigComplex,
    pub x: BigComplex,
}

impl EllipticBase {
    /// Validates `0 <= |p| < 1` (zero allowed exactly) and `q, x != 0`.
    pub fn new(p: BigComplex, q: BigComplex, x: BigComplex) -> Result<Self> {
        if !p.is_zero() && !(p.ln_mag_f64() < 0.0) {
            return Err(Error::Domain("|p| must be < 1 (or p = 0 exactly)".into()));
        }
        if q.is_zero() {
            return Err(Error::Domain("base q must be nonzero".into()));
        }
        if x.is_zero() {
            return Err(Error::Domain("step x must be nonzero".into()));
        }
        Ok(EllipticBase { p, q, x })
    }

    /// Trigonometric degeneration: `p = 0`.
    pub fn trigonometric(q: BigComplex, x: BigComplex, ctx: &PrecisionContext) -> Result<Self> {
        EllipticBase::new(BigComplex::zero(ctx), q, x)
    }

    pub fn is_trigonometric(&self) -> bool {
        self.p.is_zero()
    }

    /// The conjugation-dual base: `(q, x) -> (1/x, 1/q)` with the same `p`.
    pub fn dual(&self, ctx: &PrecisionContext) -> Result<Self> {
        EllipticBase::new(self.p.clone(), self.x.recip(ctx), self.q.recip(ctx))
    }
}

/// Number of product factors needed for a relative tail below
/// `10^-(digits+5)`:
///
/// ```text
/// J = ceil( ((digits+5) ln 10 + ln max(|x|, 1/|x|, 1)) / (-ln |p|) )
/// ```
pub fn truncation_length(p: &BigComplex, x_arg: &BigComplex, digits: usize) -> Result<usize> {
    let lp = p.ln_mag_f64();
    if !(lp < 0.0) || lp == f64::NEG_INFINITY {
        return Err(Error::Domain("truncation_length requires 0 < |p| < 1".into()));
    }
    let lx = x_arg.ln_mag_f64();
    if !lx.is_finite() {
        return Err(Error::Domain("truncation_length requires x != 0".into()));
    }
    let r = ((digits + 5) as f64 * LN_10 + lx.abs()) / -lp;
    // Nudge before ceiling so exact-integer ratios (e.g. |p| = 10^-1) do not
    // jump a step from floating-point jitter.
    Ok(((r - 1e-9).ceil() as usize).max(1))
}

/// The theta building block `E(x)`.
pub fn theta_e(x_arg: &BigComplex, p: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    if x_arg.is_zero() {
        return Err(Error::Domain("theta_E at x = 0".into()));
    }
    if p.is_zero() {
        return Ok(x_arg.one_minus(ctx));
    }
    if !(p.ln_mag_f64() < 0.0) {
        return Err(Error::Domain("theta_E requires |p| < 1".into()));
    }
    let j_max = truncation_length(p, x_arg, ctx.digits())?;
    let mut acc = BigComplex::one(ctx);
    let mut xp = x_arg.clone();
    let mut px = p.div(x_arg, ctx);
    for _ in 0..j_max {
        let f = xp.one_minus(ctx).mul(&px.one_minus(ctx), ctx);
        acc = acc.mul(&f, ctx);
        xp = xp.mul(p, ctx);
        px = px.mul(p, ctx);
    }
    Ok(acc)
}

/// `E(u1) E(u2) ... E(um)`; the empty product is `1`.
pub fn theta_e_multi(args: &[BigComplex], p: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    for u in args {
        acc = acc.mul(&theta_e(u, p, ctx)?, ctx);
    }
    Ok(acc)
}

/// Natural scale of `|E(y)|` — the product of all factor magnitudes that
/// exceed 1 — as a log, used to decide whether a computed theta value is
/// "small because near a zero" rather than small by scale.
pub(crate) fn ln_pole_scale(lx: f64, lp: f64) -> f64 {
    if lp == f64::NEG_INFINITY {
        // p = 0: E(y) = 1 - y, scale max(1, |y|)
        return lx.max(0.0);
    }
    let mut s = 0.0;
    if lx > 0.0 {
        // factors |y p^j| > 1 for j < lx / (-lp)
        let k = (lx / -lp).ceil();
        s += k * lx + lp * (k - 1.0) * k / 2.0;
    }
    if lx < 0.0 {
        // factors |p^{j+1}/y| > 1 for (j+1) < (-lx) / (-lp)
        let m = ((-lx / -lp).ceil() - 1.0).max(0.0);
        s += lp * m * (m + 1.0) / 2.0 - m * lx;
    }
    s
}

/// `|E(y)| / scale(y, p)` as `f64`; values below the context's pole
/// threshold indicate `y` is numerically at a theta zero.
pub fn pole_ratio(value: &BigComplex, arg: &BigComplex, p: &BigComplex) -> f64 {
    (value.ln_mag_f64() - ln_pole_scale(arg.ln_mag_f64(), p.ln_mag_f64())).exp()
}

/// The additive elliptic number `[x] = q^{(1-x)/2} E(q^x) / E(q)`.
///
/// Branches of `q^x` are principal; `[1] = 1` exactly up to rounding.
pub fn elliptic_number(x_add: &BigComplex, base: &EllipticBase, ctx: &PrecisionContext) -> Result<BigComplex> {
    let eq = theta_e(&base.q, &base.p, ctx)?;
    if eq.is_zero() {
        return Err(Error::DegenerateBase("theta_E(q) = 0".into()));
    }
    let half = BigComplex::from_f64s(0.5, 0.0, ctx);
    let expo = BigComplex::one(ctx).sub(x_add, ctx).mul(&half, ctx);
    let pref = principal_power(&base.q, &expo, ctx)?;
    let qx = principal_power(&base.q, x_add, ctx)?;
    let num = theta_e(&qx, &base.p, ctx)?;
    Ok(pref.mul(&num, ctx).div(&eq, ctx))
}

/// `[x]_n = [x][x+1]...[x+n-1]`; `n = 0` gives `1`.
pub fn elliptic_pochhammer_additive(
    x_add: &BigComplex,
    n: u32,
    base: &EllipticBase,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    let mut arg = x_add.clone();
    let one = BigComplex::one(ctx);
    for _ in 0..n {
        acc = acc.mul(&elliptic_number(&arg, base, ctx)?, ctx);
        arg = arg.add(&one, ctx);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rel_error, within};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn bc(re: f64, im: f64, c: &PrecisionContext) -> BigComplex {
        BigComplex::from_f64s(re, im, c)
    }

    #[test]
    fn p_zero_collapses() {
        let c = ctx();
        let v = theta_e(&bc(0.5, 0.0, &c), &BigComplex::zero(&c), &c).unwrap();
        assert!(within(&rel_error(&v, &bc(0.5, 0.0, &c), &c), 1e-60, &c));
    }

    #[test]
    fn unit_argument_vanishes() {
        let c = ctx();
        let v = theta_e(&BigComplex::one(&c), &bc(0.3, 0.0, &c), &c).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn domain_errors() {
        let c = ctx();
        assert!(theta_e(&BigComplex::zero(&c), &bc(0.1, 0.0, &c), &c).is_err());
        assert!(theta_e(&bc(0.5, 0.0, &c), &bc(1.2, 0.0, &c), &c).is_err());
        assert!(EllipticBase::new(bc(1.0, 0.0, &c), bc(0.5, 0.0, &c), BigComplex::one(&c)).is_err());
        assert!(EllipticBase::new(bc(0.1, 0.0, &c), BigComplex::zero(&c), BigComplex::one(&c)).is_err());
    }

    #[test]
    fn truncation_examples() {
        let c = ctx();
        let x1 = BigComplex::one(&c);
        assert_eq!(truncation_length(&bc(0.1, 0.0, &c), &x1, 50).unwrap(), 55);
        assert_eq!(truncation_length(&bc(0.5, 0.0, &c), &x1, 50).unwrap(), 183);
        // |x| and 1/|x| contribute symmetrically
        let a = truncation_length(&bc(0.1, 0.0, &c), &bc(2.0, 0.0, &c), 50).unwrap();
        let b = truncation_length(&bc(0.1, 0.0, &c), &bc(0.5, 0.0, &c), 50).unwrap();
        assert_eq!(a, b);
        assert!(truncation_length(&BigComplex::zero(&c), &x1, 50).is_err());
    }

    #[test]
    fn reflection_formula() {
        // E(x) = -x E(1/x)
        let c = ctx();
        let p = bc(0.13, 0.05, &c);
        let x = bc(1.7, -0.4, &c);
        let lhs = theta_e(&x, &p, &c).unwrap();
        let rhs = theta_e(&x.recip(&c), &p, &c).unwrap().mul(&x, &c).neg();
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-45, &c));
    }

    #[test]
    fn quasi_periodicity() {
        // E(p x) = -E(x)/x
        let c = ctx();
        let p = bc(0.2, -0.07, &c);
        let x = bc(0.8, 0.3, &c);
        let lhs = theta_e(&x.mul(&p, &c), &p, &c).unwrap();
        let rhs = theta_e(&x, &p, &c).unwrap().div(&x, &c).neg();
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-45, &c));
    }

    #[test]
    fn multi_product() {
        let c = ctx();
        let p0 = BigComplex::zero(&c);
        assert!(theta_e_multi(&[], &p0, &c).unwrap().eq_exact(&BigComplex::one(&c)));
        let args = [bc(0.5, 0.0, &c), bc(2.0, 0.0, &c)];
        let v = theta_e_multi(&args, &p0, &c).unwrap();
        assert!(within(&rel_error(&v, &bc(-0.5, 0.0, &c), &c), 1e-60, &c));
        let single = theta_e_multi(&args[..1], &p0, &c).unwrap();
        assert!(single.eq_exact(&theta_e(&args[0], &p0, &c).unwrap()));
    }

    #[test]
    fn elliptic_number_normalization() {
        let c = ctx();
        let base = EllipticBase::new(bc(0.1, 0.0, &c), bc(0.7, 0.0, &c), BigComplex::one(&c)).unwrap();
        let one = elliptic_number(&BigComplex::one(&c), &base, &c).unwrap();
        assert!(within(&rel_error(&one, &BigComplex::one(&c), &c), 1e-48, &c));
        let zero = elliptic_number(&BigComplex::zero(&c), &base, &c).unwrap();
        assert!(zero.is_zero() || zero.mag_f64() < 1e-45);
    }

    #[test]
    fn elliptic_number_odd() {
        let c = ctx();
        let base = EllipticBase::new(bc(0.15, 0.0, &c), bc(0.6, 0.0, &c), BigComplex::one(&c)).unwrap();
        let x = bc(0.37, 0.0, &c);
        let plus = elliptic_number(&x, &base, &c).unwrap();
        let minus = elliptic_number(&x.neg(), &base, &c).unwrap();
        assert!(within(&rel_error(&minus, &plus.neg(), &c), 1e-45, &c));
    }

    #[test]
    fn trigonometric_number() {
        // p = 0: [x] = (q^{x/2} - q^{-x/2}) / (q^{1/2} - q^{-1/2})
        let c = ctx();
        let q = bc(0.55, 0.0, &c);
        let base = EllipticBase::trigonometric(q.clone(), BigComplex::one(&c), &c).unwrap();
        let x = bc(1.8, 0.0, &c);
        let got = elliptic_number(&x, &base, &c).unwrap();
        let half = bc(0.5, 0.0, &c);
        let qh = |e: &BigComplex| principal_power(&q, e, &c).unwrap();
        let num = qh(&x.mul(&half, &c)).sub(&qh(&x.mul(&half, &c).neg()), &c);
        let den = qh(&half).sub(&qh(&half.neg()), &c);
        let expect = num.div(&den, &c);
        assert!(within(&rel_error(&got, &expect, &c), 1e-45, &c));
    }

    #[test]
    fn rational_limit() {
        // p = 0, q -> 1: [x] -> x
        let c = ctx();
        let q = c.parse_real("1.0000000001").unwrap();
        let base = EllipticBase::trigonometric(
            BigComplex::from_real(q, &c),
            BigComplex::one(&c),
            &c,
        )
        .unwrap();
        let x = bc(2.6, 0.0, &c);
        let v = elliptic_number(&x, &base, &c).unwrap();
        assert!(within(&rel_error(&v, &x, &c), 1e-8, &c));
    }

    #[test]
    fn additive_pochhammer() {
        let c = ctx();
        let base = EllipticBase::new(bc(0.1, 0.0, &c), bc(0.7, 0.0, &c), BigComplex::one(&c)).unwrap();
        let x = bc(0.3, 0.0, &c);
        assert!(elliptic_pochhammer_additive(&x, 0, &base, &c)
            .unwrap()
            .eq_exact(&BigComplex::one(&c)));
        // [1]_2 = [2]
        let one = BigComplex::one(&c);
        let two = bc(2.0, 0.0, &c);
        let lhs = elliptic_pochhammer_additive(&one, 2, &base, &c).unwrap();
        let rhs = elliptic_number(&two, &base, &c).unwrap();
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-45, &c));
        // factor-by-factor
        let prod3 = elliptic_pochhammer_additive(&x, 3, &base, &c).unwrap();
        let mut direct = BigComplex::one(&c);
        for m in 0..3 {
            let arg = x.add(&BigComplex::from_i64(m, &c), &c);
            direct = direct.mul(&elliptic_number(&arg, &base, &c).unwrap(), &c);
        }
        assert!(within(&rel_error(&prod3, &direct, &c), 1e-47, &c));
    }

    #[test]
    fn addition_formula() {
        // [x+z][x-z][y+w][y-w] = [x+y][x-y][z+w][z-w] + [x+w][x-w][y+z][y-z]
        let c = ctx();
        for p_re in [0.12, 0.0] {
            let base =
                EllipticBase::new(bc(p_re, 0.0, &c), bc(0.65, 0.0, &c), BigComplex::one(&c)).unwrap();
            let (x, y, z, w) = (
                bc(1.3, 0.0, &c),
                bc(0.7, 0.0, &c),
                bc(0.4, 0.0, &c),
                bc(0.9, 0.0, &c),
            );
            let en = |u: &BigComplex, v: &BigComplex, sign: f64| {
                let arg = if sign > 0.0 { u.add(v, &c) } else { u.sub(v, &c) };
                elliptic_number(&arg, &base, &c).unwrap()
            };
            let lhs = en(&x, &z, 1.0)
                .mul(&en(&x, &z, -1.0), &c)
                .mul(&en(&y, &w, 1.0), &c)
                .mul(&en(&y, &w, -1.0), &c);
            let t1 = en(&x, &y, 1.0)
                .mul(&en(&x, &y, -1.0), &c)
                .mul(&en(&z, &w, 1.0), &c)
                .mul(&en(&z, &w, -1.0), &c);
            let t2 = en(&x, &w, 1.0)
                .mul(&en(&x, &w, -1.0), &c)
                .mul(&en(&y, &z, 1.0), &c)
                .mul(&en(&y, &z, -1.0), &c);
            let rhs = t1.add(&t2, &c);
            assert!(within(&rel_error(&lhs, &rhs, &c), 1e-45, &c));
        }
    }
}
