//! One-variable terminating series: the very-well-poised `omega` sum, the
//! Jackson closed form, and the Bailey transformation.
//!
//! Multiplicative form of the series (the only form used in evaluation):
//!
//! ```text
//! omega(a; b_1..b_m, q^{-N}) =
//!   sum_{k=0}^{N}  E(a q^{2k})/E(a) * q^k
//!     * (a, b_1..b_m, q^{-N};q)_k / (q, aq/b_1..aq/b_m, a q^{N+1};q)_k
//! ```
//!
//! The additive form (elliptic-number quotients) is implemented separately
//! in [`additive_omega`] purely as a cross-validation oracle; on the
//! balanced surface the two agree termwise, which is exercised by tests.

use crate::error::Result;
use crate::numerics::{principal_power, BigComplex, PrecisionContext};
use crate::pochhammer::{PochLadder, ThetaLadder};
use crate::theta::{elliptic_number, elliptic_pochhammer_additive, EllipticBase};

use super::{qp_den, qp_num, BaileyParams};

/// The very-well-poised one-variable sum; `N = 0` gives exactly 1.
pub fn omega_one_var(
    a: &BigComplex,
    bs: &[BigComplex],
    cap: u32,
    q: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let acc = BigComplex::one(ctx);
    if cap == 0 {
        return Ok(acc);
    }
    let base = EllipticBase::new(p.clone(), q.clone(), BigComplex::one(ctx))?;
    let k_max = cap as usize;
    let theta = ThetaLadder::new("E(a q^(2k)) very-well-poised", a, q, 2 * k_max, p, ctx)?;
    let mut num = Vec::with_capacity(bs.len() + 2);
    num.push(PochLadder::new("(a;q)", a, k_max, &base, ctx)?);
    for (s, b) in bs.iter().enumerate() {
        num.push(PochLadder::new(format!("(b_{};q)", s + 1), b, k_max, &base, ctx)?);
    }
    num.push(PochLadder::new(
        "(q^(-N);q)",
        &q.powi(-(cap as i64), ctx),
        k_max,
        &base,
        ctx,
    )?);
    let aq = a.mul(q, ctx);
    let mut den = Vec::with_capacity(bs.len() + 2);
    den.push(PochLadder::new("(q;q)", q, k_max, &base, ctx)?);
    for (s, b) in bs.iter().enumerate() {
        den.push(PochLadder::new(
            format!("(aq/b_{};q)", s + 1),
            &aq.div(b, ctx),
            k_max,
            &base,
            ctx,
        )?);
    }
    den.push(PochLadder::new(
        "(a q^(N+1);q)",
        &a.mul(&q.powi(cap as i64 + 1, ctx), ctx),
        k_max,
        &base,
        ctx,
    )?);

    let mut acc = acc; // k = 0 term is exactly 1
    let mut qpow = BigComplex::one(ctx);
    for k in 1..=k_max {
        qpow = qpow.mul(q, ctx);
        let mut t_num = theta.value(2 * k).mul(&qpow, ctx);
        let mut t_den = theta.denom(0, ctx)?.clone();
        for lad in &num {
            t_num = t_num.mul(lad.value(k), ctx);
        }
        for lad in &den {
            t_den = t_den.mul(lad.denom(k, ctx)?, ctx);
        }
        acc = acc.add(&t_num.div(&t_den, ctx), ctx);
    }
    Ok(acc)
}

/// Jackson's closed form for the four-parameter case:
/// `(aq, aq/bc, aq/bd, aq/cd;q)_N / (aq/b, aq/c, aq/d, aq/bcd;q)_N`.
#[allow(clippy::too_many_arguments)]
pub fn jackson_rhs(
    a: &BigComplex,
    b: &BigComplex,
    c: &BigComplex,
    d: &BigComplex,
    cap: u32,
    q: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let aq = a.mul(q, ctx);
    let bcd = b.mul(c, ctx).mul(d, ctx);
    let mut num = BigComplex::one(ctx);
    for u in [
        aq.clone(),
        aq.div(&b.mul(c, ctx), ctx),
        aq.div(&b.mul(d, ctx), ctx),
        aq.div(&c.mul(d, ctx), ctx),
    ] {
        num = num.mul(&qp_num(&u, cap, q, p, ctx)?, ctx);
    }
    let mut den = BigComplex::one(ctx);
    for u in [aq.div(b, ctx), aq.div(c, ctx), aq.div(d, ctx), aq.div(&bcd, ctx)] {
        den = den.mul(&qp_den("Jackson closed form denominator", &u, cap, q, p, ctx)?, ctx);
    }
    Ok(num.div(&den, ctx))
}

/// Maps additive parameters `u` to multiplicative `q^u` (principal branch).
pub fn additive_to_multiplicative(
    adds: &[BigComplex],
    q: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<Vec<BigComplex>> {
    adds.iter().map(|u| principal_power(q, u, ctx)).collect()
}

/// The additive form of the series, summed literally as elliptic-number
/// quotients:
///
/// ```text
/// sum_{k=0}^{n} [a+2k]/[a] * [a]_k [-n]_k [b_1]_k...[b_m]_k
///               / ([1]_k [1+a+n]_k [1+a-b_1]_k...[1+a-b_m]_k)
/// ```
///
/// Exists as an independent oracle for validating the multiplicative
/// transcriptions; not used on any hot path.
pub fn additive_omega(
    a_add: &BigComplex,
    terminator: u32,
    bs_add: &[BigComplex],
    base: &EllipticBase,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let one = BigComplex::one(ctx);
    let n_add = BigComplex::from_i64(terminator as i64, ctx);
    let a_plus_1 = a_add.add(&one, ctx);
    let mut num_params = vec![a_add.clone(), n_add.neg()];
    num_params.extend(bs_add.iter().cloned());
    let mut den_params = vec![one.clone(), a_plus_1.add(&n_add, ctx)];
    for b in bs_add {
        den_params.push(a_plus_1.sub(b, ctx));
    }
    let a_den = elliptic_number(a_add, base, ctx)?;
    let mut acc = BigComplex::zero(ctx);
    for k in 0..=terminator {
        let shift = BigComplex::from_i64(2 * k as i64, ctx);
        let mut term = elliptic_number(&a_add.add(&shift, ctx), base, ctx)?.div(&a_den, ctx);
        for u in &num_params {
            term = term.mul(&elliptic_pochhammer_additive(u, k, base, ctx)?, ctx);
        }
        for v in &den_params {
            term = term.div(&elliptic_pochhammer_additive(v, k, base, ctx)?, ctx);
        }
        acc = acc.add(&term, ctx);
    }
    Ok(acc)
}

/// Left side of the Bailey transformation: the series at
/// `(a; b, c, d, e, f, g)`.
pub fn bailey_lhs(params: &BaileyParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    let bs = [
        params.b.clone(),
        params.c.clone(),
        params.d.clone(),
        params.e.clone(),
        params.f.clone(),
        params.g.clone(),
    ];
    omega_one_var(&params.a, &bs, params.cap, &params.q, &params.p, ctx)
}

/// Right side of the Bailey transformation:
///
/// ```text
/// (aq, aq/ef, λq/e, λq/f;q)_N / (aq/e, aq/f, λq/ef, λq;q)_N
///   * omega(λ; λb/a, λc/a, λd/a, e, f, g, q^{-N})        λ = q a^2/(bcd)
/// ```
pub fn bailey_rhs(params: &BaileyParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    let BaileyParams {
        a,
        b,
        c,
        d,
        e,
        f,
        g,
        cap,
        q,
        p,
        lambda,
    } = params;
    let aq = a.mul(q, ctx);
    let lq = lambda.mul(q, ctx);
    let ef = e.mul(f, ctx);
    let mut pref_num = BigComplex::one(ctx);
    for u in [aq.clone(), aq.div(&ef, ctx), lq.div(e, ctx), lq.div(f, ctx)] {
        pref_num = pref_num.mul(&qp_num(&u, *cap, q, p, ctx)?, ctx);
    }
    let mut pref_den = BigComplex::one(ctx);
    for u in [aq.div(e, ctx), aq.div(f, ctx), lq.div(&ef, ctx), lq.clone()] {
        pref_den = pref_den.mul(&qp_den("Bailey prefactor denominator", &u, *cap, q, p, ctx)?, ctx);
    }
    let bs = [
        lambda.mul(b, ctx).div(a, ctx),
        lambda.mul(c, ctx).div(a, ctx),
        lambda.mul(d, ctx).div(a, ctx),
        e.clone(),
        f.clone(),
        g.clone(),
    ];
    let series = omega_one_var(lambda, &bs, *cap, q, p, ctx)?;
    Ok(pref_num.div(&pref_den, ctx).mul(&series, ctx))
}
