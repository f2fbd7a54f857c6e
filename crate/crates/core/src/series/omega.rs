//! The partition-indexed `Omega` series over `Lambda_{nN}` and the closed
//! form of its four-parameter (`C_n`) specialization.
//!
//! The summand at `lambda` is
//!
//! ```text
//! prod_i  E(a x^{2(1-i)} q^{2 l_i}) / E(a x^{2(1-i)}) * q^{l_i} x^{2(i-1) l_i}
//! prod_{i<j}  E(x^{j-i} q^{l_i - l_j}) / E(x^{j-i})
//!           * E(a x^{2-i-j} q^{l_i + l_j}) / E(a x^{2-i-j})
//!           * (a x^{3-i-j};q)_{l_i+l_j} / (a q x^{1-i-j};q)_{l_i+l_j}
//!           * (x^{j-i+1};q)_{l_i-l_j} / (q x^{j-i-1};q)_{l_i-l_j}
//! * (a x^{1-n}, b_1..b_m, q^{-N};q,x)_lambda
//!   / (q x^{n-1}, aq/b_1..aq/b_m, a q^{N+1};q,x)_lambda
//! ```
//!
//! With `bs = (b,c,d,e)` on the balancing surface this is the left side of
//! the `C_n` summation; the right side is the closed form
//! `(aq, aq/bc, aq/bd, aq/cd;q,x)_{N^n} / (aq/b, aq/c, aq/d, aq/bcd;q,x)_{N^n}`.
//!
//! All theta/Pochhammer rungs are memoized per parameter set; terms are then
//! assembled per `lambda` as one numerator product over one guarded
//! denominator product.

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, PrecisionContext};
use crate::partitions::{enumerate, Partition};
use crate::pochhammer::{PochLadder, ThetaLadder};
use crate::theta::EllipticBase;

use super::{qp_den, qp_num, CnParams, OmegaParams};

/// Memoized evaluator for all terms of one `Omega` series.
pub(crate) struct OmegaEvaluator<'a> {
    n: usize,
    cap: u32,
    ctx: &'a PrecisionContext,
    qpow: Vec<BigComplex>,
    xpow: Vec<BigComplex>,
    diag: Vec<ThetaLadder>,
    diff_theta: Vec<ThetaLadder>,
    sum_theta: Vec<ThetaLadder>,
    sum_num: Vec<PochLadder>,
    sum_den: Vec<PochLadder>,
    diff_num: Vec<PochLadder>,
    diff_den: Vec<PochLadder>,
    row_num: Vec<Vec<PochLadder>>,
    row_den: Vec<Vec<PochLadder>>,
}

impl<'a> OmegaEvaluator<'a> {
    pub fn new(params: &OmegaParams, ctx: &'a PrecisionContext) -> Result<Self> {
        let OmegaParams { a, bs, n, cap, base } = params;
        let (n, cap) = (*n, *cap);
        let EllipticBase { p, q, x } = base;
        let k = cap as usize;

        let mut qpow = Vec::with_capacity(k + 1);
        qpow.push(BigComplex::one(ctx));
        for i in 0..k {
            qpow.push(qpow[i].mul(q, ctx));
        }
        let xmax = 2 * (n - 1) * k;
        let mut xpow = Vec::with_capacity(xmax + 1);
        xpow.push(BigComplex::one(ctx));
        for i in 0..xmax {
            xpow.push(xpow[i].mul(x, ctx));
        }

        let mut diag = Vec::with_capacity(n);
        for i in 1..=n as i64 {
            let start = a.mul(&x.powi(2 * (1 - i), ctx), ctx);
            diag.push(ThetaLadder::new(
                format!("E(a x^(2(1-i)) q^s) diagonal i={i}"),
                &start,
                q,
                2 * k,
                p,
                ctx,
            )?);
        }

        let mut diff_theta = Vec::new();
        let mut sum_theta = Vec::new();
        let mut sum_num = Vec::new();
        let mut sum_den = Vec::new();
        let mut diff_num = Vec::new();
        let mut diff_den = Vec::new();
        if n >= 2 {
            for d in 1..=(n - 1) as i64 {
                diff_theta.push(ThetaLadder::new(
                    format!("E(x^d q^m) pair d={d}"),
                    &x.powi(d, ctx),
                    q,
                    k,
                    p,
                    ctx,
                )?);
                diff_num.push(PochLadder::new(
                    format!("(x^(d+1);q) pair d={d}"),
                    &x.powi(d + 1, ctx),
                    k,
                    base,
                    ctx,
                )?);
                diff_den.push(PochLadder::new(
                    format!("(q x^(d-1);q) pair d={d}"),
                    &q.mul(&x.powi(d - 1, ctx), ctx),
                    k,
                    base,
                    ctx,
                )?);
            }
            for s in 3..=(2 * n - 1) as i64 {
                sum_theta.push(ThetaLadder::new(
                    format!("E(a x^(2-c) q^s) pair c={s}"),
                    &a.mul(&x.powi(2 - s, ctx), ctx),
                    q,
                    2 * k,
                    p,
                    ctx,
                )?);
                sum_num.push(PochLadder::new(
                    format!("(a x^(3-c);q) pair c={s}"),
                    &a.mul(&x.powi(3 - s, ctx), ctx),
                    2 * k,
                    base,
                    ctx,
                )?);
                sum_den.push(PochLadder::new(
                    format!("(a q x^(1-c);q) pair c={s}"),
                    &a.mul(q, ctx).mul(&x.powi(1 - s, ctx), ctx),
                    2 * k,
                    base,
                    ctx,
                )?);
            }
        }

        // numerator row arguments: a x^{1-n}, b_1..b_m, q^{-N}
        let mut num_args = Vec::with_capacity(bs.len() + 2);
        num_args.push(("a x^(1-n)".to_string(), a.mul(&x.powi(1 - n as i64, ctx), ctx)));
        for (s, b) in bs.iter().enumerate() {
            num_args.push((format!("b_{}", s + 1), b.clone()));
        }
        num_args.push(("q^(-N)".to_string(), q.powi(-(cap as i64), ctx)));
        // denominator row arguments: q x^{n-1}, aq/b_1..aq/b_m, a q^{N+1}
        let aq = a.mul(q, ctx);
        let mut den_args = Vec::with_capacity(bs.len() + 2);
        den_args.push(("q x^(n-1)".to_string(), q.mul(&x.powi(n as i64 - 1, ctx), ctx)));
        for (s, b) in bs.iter().enumerate() {
            den_args.push((format!("a q / b_{}", s + 1), aq.div(b, ctx)));
        }
        den_args.push(("a q^(N+1)".to_string(), a.mul(&q.powi(cap as i64 + 1, ctx), ctx)));

        let x_inv = x.recip(ctx);
        let rows = |label: &str, u: &BigComplex| -> Result<Vec<PochLadder>> {
            let mut out = Vec::with_capacity(n);
            let mut arg = u.clone();
            for j in 1..=n {
                out.push(PochLadder::new(
                    format!("({label} x^(1-j);q) row j={j}"),
                    &arg,
                    k,
                    base,
                    ctx,
                )?);
                if j < n {
                    arg = arg.mul(&x_inv, ctx);
                }
            }
            Ok(out)
        };
        let mut row_num = Vec::with_capacity(num_args.len());
        for (label, u) in &num_args {
            row_num.push(rows(label, u)?);
        }
        let mut row_den = Vec::with_capacity(den_args.len());
        for (label, u) in &den_args {
            row_den.push(rows(label, u)?);
        }

        Ok(OmegaEvaluator {
            n,
            cap,
            ctx,
            qpow,
            xpow,
            diag,
            diff_theta,
            sum_theta,
            sum_num,
            sum_den,
            diff_num,
            diff_den,
            row_num,
            row_den,
        })
    }

    /// The summand at `lam`; the empty diagram gives exactly 1.
    pub fn term(&self, lam: &Partition) -> Result<BigComplex> {
        if lam.len() != self.n || lam.cap() != self.cap {
            return Err(Error::Domain(format!(
                "partition {lam} does not index Lambda_({}, {})",
                self.n, self.cap
            )));
        }
        if lam.is_empty_diagram() {
            return Ok(BigComplex::one(self.ctx));
        }
        self.term_inner(lam).map_err(|e| at_lambda(e, lam))
    }

    fn term_inner(&self, lam: &Partition) -> Result<BigComplex> {
        let ctx = self.ctx;
        let n = self.n;
        let mut num = BigComplex::one(ctx);
        let mut den = BigComplex::one(ctx);
        for i in 1..=n {
            let li = lam.part(i) as usize;
            num = num.mul(self.diag[i - 1].value(2 * li), ctx);
            den = den.mul(self.diag[i - 1].denom(0, ctx)?, ctx);
            num = num.mul(&self.qpow[li], ctx);
            num = num.mul(&self.xpow[2 * (i - 1) * li], ctx);
        }
        for i in 1..=n {
            for j in (i + 1)..=n {
                let (d, c) = (j - i, i + j);
                let s = (lam.part(i) + lam.part(j)) as usize;
                let m = (lam.part(i) - lam.part(j)) as usize;
                num = num.mul(self.diff_theta[d - 1].value(m), ctx);
                den = den.mul(self.diff_theta[d - 1].denom(0, ctx)?, ctx);
                num = num.mul(self.sum_theta[c - 3].value(s), ctx);
                den = den.mul(self.sum_theta[c - 3].denom(0, ctx)?, ctx);
                num = num.mul(self.sum_num[c - 3].value(s), ctx);
                den = den.mul(self.sum_den[c - 3].denom(s, ctx)?, ctx);
                num = num.mul(self.diff_num[d - 1].value(m), ctx);
                den = den.mul(self.diff_den[d - 1].denom(m, ctx)?, ctx);
            }
        }
        for ladders in &self.row_num {
            for (j, lad) in ladders.iter().enumerate() {
                num = num.mul(lad.value(lam.part(j + 1) as usize), ctx);
            }
        }
        for ladders in &self.row_den {
            for (j, lad) in ladders.iter().enumerate() {
                den = den.mul(lad.denom(lam.part(j + 1) as usize, ctx)?, ctx);
            }
        }
        Ok(num.div(&den, ctx))
    }

    /// Sum over all of `Lambda_{nN}` in the canonical enumeration order.
    pub fn sum(&self) -> Result<BigComplex> {
        let mut acc = BigComplex::zero(self.ctx);
        for lam in enumerate(self.n, self.cap) {
            acc = acc.add(&self.term(&lam)?, self.ctx);
        }
        Ok(acc)
    }
}

fn at_lambda(e: Error, lam: &Partition) -> Error {
    match e {
        Error::Pole(mut info) => {
            info.site = format!("{lam}: {}", info.site);
            Error::Pole(info)
        }
        other => other,
    }
}

/// One summand of the generic `Omega` series.
pub fn omega_term(lam: &Partition, params: &OmegaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    OmegaEvaluator::new(params, ctx)?.term(lam)
}

/// The generic `Omega` series summed over `Lambda_{nN}`.
pub fn omega_sum(params: &OmegaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    OmegaEvaluator::new(params, ctx)?.sum()
}

fn cn_omega_params(params: &CnParams) -> Result<OmegaParams> {
    OmegaParams::new(
        params.a.clone(),
        vec![
            params.b.clone(),
            params.c.clone(),
            params.d.clone(),
            params.e.clone(),
        ],
        params.n,
        params.cap,
        params.base.clone(),
    )
}

/// One summand of the `C_n` sum.
pub fn cn_term(lam: &Partition, params: &CnParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    omega_term(lam, &cn_omega_params(params)?, ctx)
}

/// Left side of the `C_n` summation: the sum over `Lambda_{nN}`.
pub fn cn_lhs(params: &CnParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    omega_sum(&cn_omega_params(params)?, ctx)
}

/// Right side of the `C_n` summation, as a function of `(a,b,c,d,n,N)` only.
///
/// ```text
/// (aq, aq/bc, aq/bd, aq/cd;q,x)_{N^n} / (aq/b, aq/c, aq/d, aq/bcd;q,x)_{N^n}
/// ```
#[allow(clippy::too_many_arguments)]
pub fn rhs_closed_form(
    a: &BigComplex,
    b: &BigComplex,
    c: &BigComplex,
    d: &BigComplex,
    n: usize,
    cap: u32,
    base: &EllipticBase,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let q = &base.q;
    let aq = a.mul(q, ctx);
    let num_args = [
        aq.clone(),
        aq.div(&b.mul(c, ctx), ctx),
        aq.div(&b.mul(d, ctx), ctx),
        aq.div(&c.mul(d, ctx), ctx),
    ];
    let den_args = [
        aq.div(b, ctx),
        aq.div(c, ctx),
        aq.div(d, ctx),
        aq.div(&b.mul(c, ctx).mul(d, ctx), ctx),
    ];
    let x_inv = base.x.recip(ctx);
    let mut num = BigComplex::one(ctx);
    let mut den = BigComplex::one(ctx);
    for u in &num_args {
        let mut arg = u.clone();
        for _ in 0..n {
            num = num.mul(&qp_num(&arg, cap, q, &base.p, ctx)?, ctx);
            arg = arg.mul(&x_inv, ctx);
        }
    }
    for u in &den_args {
        let mut arg = u.clone();
        for j in 0..n {
            den = den.mul(
                &qp_den(
                    &format!("closed form denominator row {}", j + 1),
                    &arg,
                    cap,
                    q,
                    &base.p,
                    ctx,
                )?,
                ctx,
            );
            arg = arg.mul(&x_inv, ctx);
        }
    }
    Ok(num.div(&den, ctx))
}

/// Right side of the `C_n` summation for the given parameter set.
pub fn cn_rhs(params: &CnParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    rhs_closed_form(
        &params.a,
        &params.b,
        &params.c,
        &params.d,
        params.n,
        params.cap,
        &params.base,
        ctx,
    )
}
