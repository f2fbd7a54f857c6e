//! The lemma-type sums with independent variables `x_1..x_n`.
//!
//! Two closely related identities are implemented. The `2^n`-term sum
//! (`cap = None`, balancing `a^2 q^{3-n} = bcde`):
//!
//! ```text
//! sum_{k in {0,1}^n} prod_i (bx_i, cx_i, dx_i, ex_i;q)_{k_i}
//!                           / (aqx_i/b, aqx_i/c, aqx_i/d, aqx_i/e;q)_{k_i}
//!                           * (-1)^{k_i} q^{(i-1)k_i}
//!   * prod_{i<j} E(q^{k_i-k_j} x_i/x_j)/E(x_i/x_j)
//!              * E(a x_i x_j q^{k_i+k_j})/E(a x_i x_j q)
//!   = (aq/bc, aq/bd, aq/cd;q^{-1})_n
//!     * prod_i E(aq x_i^2) / E(aq^{2-n}/(bcd x_i), aqx_i/b, aqx_i/c, aqx_i/d)
//! ```
//!
//! and the `(N+1)^n`-term sum (`cap = Some(N)`, balancing
//! `a^2 q^{N+2-n} = bcde`):
//!
//! ```text
//! sum_{k in {0..N}^n} prod_i E(ax_i^2 q^{2k_i})/E(ax_i^2)
//!     * (ax_i^2, bx_i, cx_i, dx_i, ex_i, q^{-N};q)_{k_i}
//!       / (q, aqx_i/b, aqx_i/c, aqx_i/d, aqx_i/e, aq^{N+1}x_i^2;q)_{k_i}
//!     * q^{i k_i}
//!   * prod_{i<j} E(q^{k_i-k_j} x_i/x_j)/E(x_i/x_j)
//!              * E(a x_i x_j q^{k_i+k_j})/E(a x_i x_j q^N)
//!   = prod_i (aqx_i^2, aq^{2-i}/bc, aq^{2-i}/bd, aq^{2-i}/cd;q)_N
//!           / (aq^{2-n}/(bcd x_i), aqx_i/b, aqx_i/c, aqx_i/d;q)_N
//! ```
//!
//! At `N = 1` the second sum reduces to the first termwise (the reduction of
//! each per-`i` factor uses `E(q^{-1})/E(q) = -1/q`); at `n = 1` it is the
//! one-variable Jackson summation in the variables `(ax^2, bx, cx, dx, ex)`.
//! Both reductions are exercised by tests here and by the verification
//! harness.

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, PrecisionContext};
use crate::pochhammer::{PochLadder, ThetaLadder};
use crate::theta::{theta_e, EllipticBase};

use super::{qp_den, qp_num, theta_den, LemmaParams};

/// Upper-triangular `(i, j)` grid of ladders, indexed `[i][j - i - 1]`.
type PairLadders = Vec<Vec<ThetaLadder>>;

const MAX_TERMS: u64 = 1_000_000;

/// One term of the `2^n` sum at `k in {0,1}^n`; entries of `ks` must be 0
/// or 1.
pub fn warnaar_lemma_term(params: &LemmaParams, ks: &[u32], ctx: &PrecisionContext) -> Result<BigComplex> {
    LemmaEvaluator::new(params, ctx)?.term(ks, ctx)
}

/// The full `2^n` sum.
pub fn warnaar_lemma_lhs(params: &LemmaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    let n = params.n();
    if n > 20 {
        return Err(Error::Domain(format!("2^{n} summands is beyond the supported range")));
    }
    let eval = LemmaEvaluator::new(params, ctx)?;
    let mut ks = vec![0u32; n];
    let mut acc = BigComplex::zero(ctx);
    for mask in 0u64..(1u64 << n) {
        for (i, k) in ks.iter_mut().enumerate() {
            *k = ((mask >> i) & 1) as u32;
        }
        acc = acc.add(&eval.term(&ks, ctx)?, ctx);
    }
    Ok(acc)
}

/// Closed form of the `2^n` sum.
pub fn warnaar_lemma_rhs(params: &LemmaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    let LemmaParams { a, b, c, d, xs, q, p, .. } = params;
    let n = params.n() as u32;
    let aq = a.mul(q, ctx);
    let q_inv = q.recip(ctx);
    let mut num = BigComplex::one(ctx);
    for u in [
        aq.div(&b.mul(c, ctx), ctx),
        aq.div(&b.mul(d, ctx), ctx),
        aq.div(&c.mul(d, ctx), ctx),
    ] {
        num = num.mul(&qp_num(&u, n, &q_inv, p, ctx)?, ctx);
    }
    let bcd = b.mul(c, ctx).mul(d, ctx);
    let aq2n = a.mul(&q.powi(2 - n as i64, ctx), ctx);
    let mut den = BigComplex::one(ctx);
    for (i, x) in xs.iter().enumerate() {
        num = num.mul(&theta_e(&aq.mul(x, ctx).mul(x, ctx), p, ctx)?, ctx);
        let axi = aq.mul(x, ctx);
        for (site, arg) in [
            ("a q^(2-n)/(bcd x_i)", aq2n.div(&bcd.mul(x, ctx), ctx)),
            ("a q x_i/b", axi.div(b, ctx)),
            ("a q x_i/c", axi.div(c, ctx)),
            ("a q x_i/d", axi.div(d, ctx)),
        ] {
            let v = theta_den(&format!("closed form {site} (i={})", i + 1), &arg, p, ctx)?;
            den = den.mul(&v, ctx);
        }
    }
    Ok(num.div(&den, ctx))
}

/// One term of the `(N+1)^n` sum at `k in {0..N}^n`.
pub fn warnaar_thm51_term(params: &LemmaParams, ks: &[u32], ctx: &PrecisionContext) -> Result<BigComplex> {
    Thm51Evaluator::new(params, ctx)?.term(ks, ctx)
}

/// The full `(N+1)^n` sum.
pub fn warnaar_thm51_lhs(params: &LemmaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    let eval = Thm51Evaluator::new(params, ctx)?;
    let n = params.n();
    let cap = eval.cap as u64;
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total
            .checked_mul(cap + 1)
            .filter(|&t| t <= MAX_TERMS)
            .ok_or_else(|| {
                Error::Domain(format!("(N+1)^n = ({})^{n} summands is beyond the supported range", cap + 1))
            })?;
    }
    let mut ks = vec![0u32; n];
    let mut acc = eval.term(&ks, ctx)?;
    'outer: loop {
        // odometer increment over {0..N}^n
        for i in (0..n).rev() {
            if ks[i] < eval.cap as u32 {
                ks[i] += 1;
                for k in &mut ks[i + 1..] {
                    *k = 0;
                }
                acc = acc.add(&eval.term(&ks, ctx)?, ctx);
                continue 'outer;
            }
        }
        break;
    }
    Ok(acc)
}

/// Closed form of the `(N+1)^n` sum.
pub fn warnaar_thm51_rhs(params: &LemmaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    let cap = require_cap(params)?;
    let LemmaParams { a, b, c, d, xs, q, p, .. } = params;
    let n = params.n() as i64;
    let aq = a.mul(q, ctx);
    let bc = b.mul(c, ctx);
    let bd = b.mul(d, ctx);
    let cd = c.mul(d, ctx);
    let bcd = b.mul(c, ctx).mul(d, ctx);
    let aq2n = a.mul(&q.powi(2 - n, ctx), ctx);
    let mut num = BigComplex::one(ctx);
    let mut den = BigComplex::one(ctx);
    for (i0, x) in xs.iter().enumerate() {
        let i = i0 as i64 + 1;
        let aqi = a.mul(&q.powi(2 - i, ctx), ctx);
        for u in [
            aq.mul(x, ctx).mul(x, ctx),
            aqi.div(&bc, ctx),
            aqi.div(&bd, ctx),
            aqi.div(&cd, ctx),
        ] {
            num = num.mul(&qp_num(&u, cap, q, p, ctx)?, ctx);
        }
        let axi = aq.mul(x, ctx);
        for (site, u) in [
            ("a q^(2-n)/(bcd x_i)", aq2n.div(&bcd.mul(x, ctx), ctx)),
            ("a q x_i/b", axi.div(b, ctx)),
            ("a q x_i/c", axi.div(c, ctx)),
            ("a q x_i/d", axi.div(d, ctx)),
        ] {
            let v = qp_den(&format!("closed form {site} (i={i})"), &u, cap, q, p, ctx)?;
            den = den.mul(&v, ctx);
        }
    }
    Ok(num.div(&den, ctx))
}

fn require_cap(params: &LemmaParams) -> Result<u32> {
    params
        .cap
        .ok_or_else(|| Error::Domain("this sum requires a terminator N (cap = Some)".into()))
}

/// Precomputed per-variable and per-pair factors of the `2^n` sum.
struct LemmaEvaluator {
    n: usize,
    /// quotient contributed by `k_i = 1`
    one_box: Vec<BigComplex>,
    /// `[i][j-i-1]`: `E((x_i/x_j) q^m)` at index `m+1`, `m = -1, 0, 1`
    pair_diff: PairLadders,
    /// `[i][j-i-1]`: `E(a x_i x_j q^s)` at index `s = 0, 1, 2`
    pair_sum: PairLadders,
}

impl LemmaEvaluator {
    fn new(params: &LemmaParams, ctx: &PrecisionContext) -> Result<Self> {
        let LemmaParams { a, b, c, d, e, xs, q, p, .. } = params;
        let n = params.n();
        let aq = a.mul(q, ctx);
        let mut one_box = Vec::with_capacity(n);
        let mut qpow = BigComplex::one(ctx);
        for (i0, x) in xs.iter().enumerate() {
            let mut num = qpow.neg(); // (-1) q^{i-1}
            for u in [b, c, d, e] {
                num = num.mul(&theta_e(&u.mul(x, ctx), p, ctx)?, ctx);
            }
            let axi = aq.mul(x, ctx);
            let mut den = BigComplex::one(ctx);
            for (site, u) in [
                ("a q x_i/b", axi.div(b, ctx)),
                ("a q x_i/c", axi.div(c, ctx)),
                ("a q x_i/d", axi.div(d, ctx)),
                ("a q x_i/e", axi.div(e, ctx)),
            ] {
                den = den.mul(&theta_den(&format!("{site} (i={})", i0 + 1), &u, p, ctx)?, ctx);
            }
            one_box.push(num.div(&den, ctx));
            qpow = qpow.mul(q, ctx);
        }
        let (pair_diff, pair_sum) = pair_ladders(a, xs, 1, q, p, ctx)?;
        Ok(LemmaEvaluator {
            n,
            one_box,
            pair_diff,
            pair_sum,
        })
    }

    fn term(&self, ks: &[u32], ctx: &PrecisionContext) -> Result<BigComplex> {
        if ks.len() != self.n || ks.iter().any(|&k| k > 1) {
            return Err(Error::Domain(format!(
                "expected {} indices in {{0,1}}, got {ks:?}",
                self.n
            )));
        }
        let mut acc = BigComplex::one(ctx);
        for (i, &k) in ks.iter().enumerate() {
            if k == 1 {
                acc = acc.mul(&self.one_box[i], ctx);
            }
        }
        pair_product(acc, &self.pair_diff, &self.pair_sum, ks, 1, ctx)
    }
}

/// Precomputed ladders of the `(N+1)^n` sum.
struct Thm51Evaluator {
    n: usize,
    cap: usize,
    /// `q^t`, `t = 0..=nN`
    qpow: Vec<BigComplex>,
    /// per `i`: `E(a x_i^2 q^s)`, `s = 0..=2N`
    diag: Vec<ThetaLadder>,
    /// per `i`: `(ax_i^2;q)`, `(bx_i;q)`, `(cx_i;q)`, `(dx_i;q)`, `(ex_i;q)`
    row_num: Vec<Vec<PochLadder>>,
    /// per `i`: `(aqx_i/b;q)`, .., `(aqx_i/e;q)`, `(aq^{N+1}x_i^2;q)`
    row_den: Vec<Vec<PochLadder>>,
    /// `(q^{-N};q)` — shared across rows
    term_num: PochLadder,
    /// `(q;q)` — shared across rows
    term_den: PochLadder,
    pair_diff: PairLadders,
    pair_sum: PairLadders,
}

impl Thm51Evaluator {
    fn new(params: &LemmaParams, ctx: &PrecisionContext) -> Result<Self> {
        let cap = require_cap(params)? as usize;
        let LemmaParams { a, b, c, d, e, xs, q, p, .. } = params;
        let n = params.n();
        let base = EllipticBase::new(p.clone(), q.clone(), BigComplex::one(ctx))?;
        let aq = a.mul(q, ctx);
        let aqn1 = a.mul(&q.powi(cap as i64 + 1, ctx), ctx);

        let mut qpow = Vec::with_capacity(n * cap + 1);
        qpow.push(BigComplex::one(ctx));
        for t in 1..=n * cap {
            qpow.push(qpow[t - 1].mul(q, ctx));
        }

        let mut diag = Vec::with_capacity(n);
        let mut row_num = Vec::with_capacity(n);
        let mut row_den = Vec::with_capacity(n);
        for (i0, x) in xs.iter().enumerate() {
            let i = i0 + 1;
            let ax2 = a.mul(x, ctx).mul(x, ctx);
            diag.push(ThetaLadder::new(
                format!("E(a x_i^2 q^s) (i={i})"),
                &ax2,
                q,
                2 * cap,
                p,
                ctx,
            )?);
            let mut num = Vec::with_capacity(5);
            for (site, u) in [
                ("a x_i^2", ax2.clone()),
                ("b x_i", b.mul(x, ctx)),
                ("c x_i", c.mul(x, ctx)),
                ("d x_i", d.mul(x, ctx)),
                ("e x_i", e.mul(x, ctx)),
            ] {
                num.push(PochLadder::new(format!("({site};q) (i={i})"), &u, cap, &base, ctx)?);
            }
            row_num.push(num);
            let axi = aq.mul(x, ctx);
            let mut den = Vec::with_capacity(5);
            for (site, u) in [
                ("a q x_i/b", axi.div(b, ctx)),
                ("a q x_i/c", axi.div(c, ctx)),
                ("a q x_i/d", axi.div(d, ctx)),
                ("a q x_i/e", axi.div(e, ctx)),
                ("a q^(N+1) x_i^2", aqn1.mul(x, ctx).mul(x, ctx)),
            ] {
                den.push(PochLadder::new(format!("({site};q) (i={i})"), &u, cap, &base, ctx)?);
            }
            row_den.push(den);
        }
        let term_num = PochLadder::new(
            "(q^(-N);q)",
            &q.powi(-(cap as i64), ctx),
            cap,
            &base,
            ctx,
        )?;
        let term_den = PochLadder::new("(q;q)", q, cap, &base, ctx)?;
        let (pair_diff, pair_sum) = pair_ladders(a, xs, cap, q, p, ctx)?;
        Ok(Thm51Evaluator {
            n,
            cap,
            qpow,
            diag,
            row_num,
            row_den,
            term_num,
            term_den,
            pair_diff,
            pair_sum,
        })
    }

    fn term(&self, ks: &[u32], ctx: &PrecisionContext) -> Result<BigComplex> {
        if ks.len() != self.n || ks.iter().any(|&k| k as usize > self.cap) {
            return Err(Error::Domain(format!(
                "expected {} indices in 0..={}, got {ks:?}",
                self.n, self.cap
            )));
        }
        let mut num = BigComplex::one(ctx);
        let mut den = BigComplex::one(ctx);
        for (i0, &kk) in ks.iter().enumerate() {
            let k = kk as usize;
            num = num.mul(self.diag[i0].value(2 * k), ctx);
            den = den.mul(self.diag[i0].denom(0, ctx)?, ctx);
            num = num.mul(&self.qpow[(i0 + 1) * k], ctx);
            for lad in &self.row_num[i0] {
                num = num.mul(lad.value(k), ctx);
            }
            for lad in &self.row_den[i0] {
                den = den.mul(lad.denom(k, ctx)?, ctx);
            }
            num = num.mul(self.term_num.value(k), ctx);
            den = den.mul(self.term_den.denom(k, ctx)?, ctx);
        }
        pair_product(num.div(&den, ctx), &self.pair_diff, &self.pair_sum, ks, self.cap, ctx)
    }
}

/// Builds the pair ladders shared by both sums: for `i < j`,
/// `E((x_i/x_j) q^m)` for `m = -cap..=cap` (index `m + cap`) and
/// `E(a x_i x_j q^s)` for `s = 0..=2 cap`. The denominator rungs are
/// `m = 0` and `s = cap`.
fn pair_ladders(
    a: &BigComplex,
    xs: &[BigComplex],
    cap: usize,
    q: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<(PairLadders, PairLadders)> {
    let n = xs.len();
    let q_back = q.powi(-(cap as i64), ctx);
    let mut pair_diff = Vec::with_capacity(n.saturating_sub(1));
    let mut pair_sum = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let mut diff_row = Vec::with_capacity(n - i - 1);
        let mut sum_row = Vec::with_capacity(n - i - 1);
        for j in i + 1..n {
            let ratio = xs[i].div(&xs[j], ctx);
            diff_row.push(ThetaLadder::new(
                format!("E(q^(k_i-k_j) x_i/x_j) (i={},j={})", i + 1, j + 1),
                &ratio.mul(&q_back, ctx),
                q,
                2 * cap,
                p,
                ctx,
            )?);
            sum_row.push(ThetaLadder::new(
                format!("E(a x_i x_j q^(k_i+k_j)) (i={},j={})", i + 1, j + 1),
                &a.mul(&xs[i], ctx).mul(&xs[j], ctx),
                q,
                2 * cap,
                p,
                ctx,
            )?);
        }
        pair_diff.push(diff_row);
        pair_sum.push(sum_row);
    }
    Ok((pair_diff, pair_sum))
}

/// Multiplies `acc` by the interaction product over all pairs `i < j`.
fn pair_product(
    acc: BigComplex,
    pair_diff: &[Vec<ThetaLadder>],
    pair_sum: &[Vec<ThetaLadder>],
    ks: &[u32],
    cap: usize,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let n = ks.len();
    let mut num = acc;
    let mut den = BigComplex::one(ctx);
    for i in 0..n {
        for j in i + 1..n {
            let diff = &pair_diff[i][j - i - 1];
            let sum = &pair_sum[i][j - i - 1];
            let m = (ks[i] as i64 - ks[j] as i64 + cap as i64) as usize;
            num = num.mul(diff.value(m), ctx);
            den = den.mul(diff.denom(cap, ctx)?, ctx);
            num = num.mul(sum.value((ks[i] + ks[j]) as usize), ctx);
            den = den.mul(sum.denom(cap, ctx)?, ctx);
        }
    }
    Ok(num.div(&den, ctx))
}
