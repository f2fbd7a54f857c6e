//! Straight-line reference evaluations used as independent oracles.
//!
//! Everything here is computed from the defining double product with a
//! fixed generous cutoff — no truncation analysis, no ladders, no memo
//! tables, no calls into the library's theta or series code. Only the
//! arbitrary-precision arithmetic is shared. Intended for cross-checks at
//! <= 80 digits with |p| <= 0.6, where the cutoff error is ~1e-133.

use ehs::numerics::{BigComplex, PrecisionContext};

const CUTOFF: usize = 600;

/// `E(x) = prod_{j>=0} (1 - x p^j)(1 - p^{j+1}/x)`, truncated at `CUTOFF`.
pub fn theta(x: &BigComplex, p: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
    let x_inv = x.recip(ctx);
    let mut acc = BigComplex::one(ctx);
    let mut pj = BigComplex::one(ctx);
    for _ in 0..CUTOFF {
        acc = acc.mul(&x.mul(&pj, ctx).one_minus(ctx), ctx);
        pj = pj.mul(p, ctx);
        acc = acc.mul(&x_inv.mul(&pj, ctx).one_minus(ctx), ctx);
        if pj.is_zero() {
            break;
        }
    }
    acc
}

/// `(u;q)_k` for `k >= 0` from `theta` directly.
pub fn qpoch(u: &BigComplex, k: u32, q: &BigComplex, p: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
    let mut acc = BigComplex::one(ctx);
    let mut arg = u.clone();
    for _ in 0..k {
        acc = acc.mul(&theta(&arg, p, ctx), ctx);
        arg = arg.mul(q, ctx);
    }
    acc
}

/// `(u;q,x)_lambda = prod_j (u x^{1-j};q)_{lambda_j}`.
pub fn row_poch(
    u: &BigComplex,
    parts: &[u32],
    q: &BigComplex,
    x: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> BigComplex {
    let x_inv = x.recip(ctx);
    let mut acc = BigComplex::one(ctx);
    let mut row = u.clone();
    for &part in parts {
        acc = acc.mul(&qpoch(&row, part, q, p, ctx), ctx);
        row = row.mul(&x_inv, ctx);
    }
    acc
}

/// Plain parameter bag for the multivariable sum.
pub struct CnInputs {
    pub a: BigComplex,
    pub b: BigComplex,
    pub c: BigComplex,
    pub d: BigComplex,
    pub e: BigComplex,
    pub n: usize,
    pub cap: u32,
    pub q: BigComplex,
    pub x: BigComplex,
    pub p: BigComplex,
}

/// All weakly decreasing tuples in `{0..cap}^n`, enumerated directly.
pub fn partitions(n: usize, cap: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(cur: &mut Vec<u32>, i: usize, hi: u32, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in (0..=hi).rev() {
            cur[i] = v;
            rec(cur, i + 1, v, out);
        }
    }
    rec(&mut cur, 0, cap, &mut out);
    out
}

fn theta_quot(
    base_arg: &BigComplex,
    shift: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> BigComplex {
    theta(&base_arg.mul(shift, ctx), p, ctx).div(&theta(base_arg, p, ctx), ctx)
}

fn term(parts: &[u32], cn: &CnInputs, ctx: &PrecisionContext) -> BigComplex {
    let CnInputs { a, b, c, d, e, n, cap, q, x, p } = cn;
    let n = *n as i64;
    let aq = a.mul(q, ctx);
    let mut t = BigComplex::one(ctx);
    for i in 1..=n {
        let li = parts[i as usize - 1] as i64;
        let ax2 = a.mul(&x.powi(2 * (1 - i), ctx), ctx);
        t = t.mul(&theta_quot(&ax2, &q.powi(2 * li, ctx), p, ctx), ctx);
        t = t.mul(&q.powi(li, ctx), ctx).mul(&x.powi(2 * (i - 1) * li, ctx), ctx);
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let li = parts[i as usize - 1] as i64;
            let lj = parts[j as usize - 1] as i64;
            let (sum, diff) = ((li + lj) as u32, (li - lj) as u32);
            t = t.mul(&theta_quot(&x.powi(j - i, ctx), &q.powi(li - lj, ctx), p, ctx), ctx);
            t = t.mul(
                &theta_quot(&a.mul(&x.powi(2 - i - j, ctx), ctx), &q.powi(li + lj, ctx), p, ctx),
                ctx,
            );
            t = t.mul(&qpoch(&a.mul(&x.powi(3 - i - j, ctx), ctx), sum, q, p, ctx), ctx);
            t = t.mul(&qpoch(&x.powi(j - i + 1, ctx), diff, q, p, ctx), ctx);
            t = t.div(&qpoch(&aq.mul(&x.powi(1 - i - j, ctx), ctx), sum, q, p, ctx), ctx);
            t = t.div(&qpoch(&q.mul(&x.powi(j - i - 1, ctx), ctx), diff, q, p, ctx), ctx);
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
        t = t.mul(&row_poch(&u, parts, q, x, p, ctx), ctx);
    }
    for u in [
        q.mul(&x.powi(n - 1, ctx), ctx),
        aq.div(b, ctx),
        aq.div(c, ctx),
        aq.div(d, ctx),
        aq.div(e, ctx),
        a.mul(&q.powi(*cap as i64 + 1, ctx), ctx),
    ] {
        t = t.div(&row_poch(&u, parts, q, x, p, ctx), ctx);
    }
    t
}

pub fn cn_lhs(cn: &CnInputs, ctx: &PrecisionContext) -> BigComplex {
    let mut acc = BigComplex::zero(ctx);
    for parts in partitions(cn.n, cn.cap) {
        acc = acc.add(&term(&parts, cn, ctx), ctx);
    }
    acc
}

pub fn cn_rhs(cn: &CnInputs, ctx: &PrecisionContext) -> BigComplex {
    let CnInputs { a, b, c, d, n, cap, q, x, p, .. } = cn;
    let aq = a.mul(q, ctx);
    let full = vec![*cap; *n];
    let mut acc = BigComplex::one(ctx);
    for u in [
        aq.clone(),
        aq.div(&b.mul(c, ctx), ctx),
        aq.div(&b.mul(d, ctx), ctx),
        aq.div(&c.mul(d, ctx), ctx),
    ] {
        acc = acc.mul(&row_poch(&u, &full, q, x, p, ctx), ctx);
    }
    for u in [
        aq.div(b, ctx),
        aq.div(c, ctx),
        aq.div(d, ctx),
        aq.div(&b.mul(c, ctx).mul(d, ctx), ctx),
    ] {
        acc = acc.div(&row_poch(&u, &full, q, x, p, ctx), ctx);
    }
    acc
}
