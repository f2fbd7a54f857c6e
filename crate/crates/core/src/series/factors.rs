//! The `A`/`B` factorization of the `Omega` summand and the added-box
//! ratios behind the conjugation duality.
//!
//! The generic summand splits as
//! `term(lambda) = A_lambda * B_lambda * prod_s (b_s;q,x)_lambda / (aq/b_s;q,x)_lambda`
//! with
//!
//! ```text
//! A_lambda = prod_{i<=j} E(a x^{2-i-j} q^{lambda_i+lambda_j})/E(a x^{2-i-j})
//!          * prod_{i<j} (a x^{3-i-j};q)_{lambda_i+lambda_j}
//!                       / (a q x^{1-i-j};q)_{lambda_i+lambda_j}
//!          * (a x^{1-n};q,x)_lambda / (a q^{N+1};q,x)_lambda
//!
//! B_lambda = prod_i q^{lambda_i} x^{2(i-1)lambda_i}
//!          * prod_{i<j} E(x^{j-i} q^{lambda_i-lambda_j})/E(x^{j-i})
//!                     * (x^{j-i+1};q)_{lambda_i-lambda_j}
//!                       / (q x^{j-i-1};q)_{lambda_i-lambda_j}
//!          * (q^{-N};q,x)_lambda / (q x^{n-1};q,x)_lambda
//! ```
//!
//! Both factors are invariant under
//! `(a, q, x, n, N, lambda) -> (aqx, 1/x, 1/q, N, n, lambda')`, which is what
//! makes the series self-dual. The invariance is proved one box at a time:
//! [`a_box_ratio`] is `A_{lambda^+}/A_lambda` for adding a box in row `k`
//! (new part value `l`), written against the rows of `lambda`, and
//! [`a_box_ratio_conjugate`] is the same ratio rewritten against the columns
//! (the rows of `lambda'`); the two expressions trade places under the
//! substitution above.

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, PrecisionContext};
use crate::partitions::Partition;
use crate::pochhammer::part_poch;
use crate::theta::{theta_e, EllipticBase};

use super::{qp_den, qp_num, theta_den, OmegaParams};

/// `A_lambda`; `params.bs` is not consulted.
pub fn a_factor(params: &OmegaParams, lam: &Partition, ctx: &PrecisionContext) -> Result<BigComplex> {
    check_shape(params, lam)?;
    let OmegaParams { a, n, cap, base, .. } = params;
    let n = *n as i64;
    let (p, q, x) = (&base.p, &base.q, &base.x);
    let mut num = BigComplex::one(ctx);
    let mut den = BigComplex::one(ctx);
    for i in 1..=n {
        for j in i..=n {
            let s = (lam.part(i as usize) + lam.part(j as usize)) as i64;
            let arg = a.mul(&x.powi(2 - i - j, ctx), ctx);
            num = num.mul(&theta_e(&arg.mul(&q.powi(s, ctx), ctx), p, ctx)?, ctx);
            den = den.mul(&theta_den("A factor E(a x^(2-i-j))", &arg, p, ctx)?, ctx);
            if j > i {
                let up = a.mul(&x.powi(3 - i - j, ctx), ctx);
                num = num.mul(&qp_num(&up, s as u32, q, p, ctx)?, ctx);
                let low = a.mul(q, ctx).mul(&x.powi(1 - i - j, ctx), ctx);
                den = den.mul(&qp_den("A factor (a q x^(1-i-j);q)", &low, s as u32, q, p, ctx)?, ctx);
            }
        }
    }
    let head = a.mul(&x.powi(1 - n, ctx), ctx);
    num = num.mul(&part_poch(&head, lam, base, ctx)?, ctx);
    let tail = a.mul(&q.powi(*cap as i64 + 1, ctx), ctx);
    den = den.mul(&part_poch_den("A factor (a q^(N+1);q,x)", &tail, lam, base, ctx)?, ctx);
    Ok(num.div(&den, ctx))
}

/// `B_lambda`; `params.a` and `params.bs` are not consulted.
pub fn b_factor(params: &OmegaParams, lam: &Partition, ctx: &PrecisionContext) -> Result<BigComplex> {
    check_shape(params, lam)?;
    let OmegaParams { n, cap, base, .. } = params;
    let n = *n as i64;
    let (p, q, x) = (&base.p, &base.q, &base.x);
    let mut qe = 0i64;
    let mut xe = 0i64;
    for i in 1..=n {
        let li = lam.part(i as usize) as i64;
        qe += li;
        xe += 2 * (i - 1) * li;
    }
    let mut num = q.powi(qe, ctx).mul(&x.powi(xe, ctx), ctx);
    let mut den = BigComplex::one(ctx);
    for i in 1..=n {
        for j in i + 1..=n {
            let m = (lam.part(i as usize) - lam.part(j as usize)) as i64;
            let arg = x.powi(j - i, ctx);
            num = num.mul(&theta_e(&arg.mul(&q.powi(m, ctx), ctx), p, ctx)?, ctx);
            den = den.mul(&theta_den("B factor E(x^(j-i))", &arg, p, ctx)?, ctx);
            num = num.mul(&qp_num(&x.powi(j - i + 1, ctx), m as u32, q, p, ctx)?, ctx);
            let low = q.mul(&x.powi(j - i - 1, ctx), ctx);
            den = den.mul(&qp_den("B factor (q x^(j-i-1);q)", &low, m as u32, q, p, ctx)?, ctx);
        }
    }
    num = num.mul(&part_poch(&q.powi(-(*cap as i64), ctx), lam, base, ctx)?, ctx);
    let tail = q.mul(&x.powi(n - 1, ctx), ctx);
    den = den.mul(&part_poch_den("B factor (q x^(n-1);q,x)", &tail, lam, base, ctx)?, ctx);
    Ok(num.div(&den, ctx))
}

/// `A_{lambda^+}/A_lambda` for the box added in row `k` (1-based), written
/// against the rows of `lambda`; the new part value is `l = lambda_k + 1`.
///
/// ```text
/// E(a x^{2-2k} q^{2l}, a x^{1-2k} q^{2l-1}, a x^{2-n-k} q^{l-1})
/// / E(a x^{2-2k} q^{2l-1}, a x^{3-2k} q^{2l-2}, a x^{1-k} q^{l+N})
/// * prod_{i=1}^n E(a x^{2-i-k} q^{lambda_i+l}, a x^{3-i-k} q^{lambda_i+l-1})
///              / E(a x^{2-i-k} q^{lambda_i+l-1}, a x^{1-i-k} q^{lambda_i+l})
/// ```
pub fn a_box_ratio(
    params: &OmegaParams,
    lam: &Partition,
    row: usize,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let (k, l) = check_box(params, lam, row)?;
    let OmegaParams { a, n, cap, base, .. } = params;
    let n = *n as i64;
    let cap = *cap as i64;
    let mut num = theta_pows(
        a,
        base,
        &[(2 - 2 * k, 2 * l), (1 - 2 * k, 2 * l - 1), (2 - n - k, l - 1)],
        ctx,
    )?;
    let mut den = theta_pows_den(
        "box ratio",
        a,
        base,
        &[(2 - 2 * k, 2 * l - 1), (3 - 2 * k, 2 * l - 2), (1 - k, l + cap)],
        ctx,
    )?;
    for i in 1..=n {
        let li = lam.part(i as usize) as i64;
        num = num.mul(
            &theta_pows(
                a,
                base,
                &[(2 - i - k, li + l), (3 - i - k, li + l - 1)],
                ctx,
            )?,
            ctx,
        );
        den = den.mul(
            &theta_pows_den(
                "box ratio row product",
                a,
                base,
                &[(2 - i - k, li + l - 1), (1 - i - k, li + l)],
                ctx,
            )?,
            ctx,
        );
    }
    Ok(num.div(&den, ctx))
}

/// The same ratio `A_{lambda^+}/A_lambda` written against the columns of
/// `lambda` (the parts of the conjugate partition):
///
/// ```text
/// E(a x^{2-2k} q^{2l}, a x^{1-2k} q^{2l-1}, a x^{2-k} q^{l+N-1})
/// / E(a x^{2-2k} q^{2l-1}, a x^{3-2k} q^{2l-2}, a x^{1-k-n} q^{l})
/// * prod_{i=1}^N E(a x^{1-k-l'_i} q^{l+i-1}, a x^{2-k-l'_i} q^{l+i-2})
///              / E(a x^{1-k-l'_i} q^{l+i}, a x^{2-k-l'_i} q^{l+i-1})
/// ```
///
/// Substituting `(a,q,x,n,N,lambda,k,l) -> (aqx,1/x,1/q,N,n,lambda',l,k)`
/// turns this expression into [`a_box_ratio`] and vice versa.
pub fn a_box_ratio_conjugate(
    params: &OmegaParams,
    lam: &Partition,
    row: usize,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let (k, l) = check_box(params, lam, row)?;
    let OmegaParams { a, n, cap, base, .. } = params;
    let n = *n as i64;
    let cap = *cap as i64;
    let conj = lam.conjugate();
    let mut num = theta_pows(
        a,
        base,
        &[(2 - 2 * k, 2 * l), (1 - 2 * k, 2 * l - 1), (2 - k, l + cap - 1)],
        ctx,
    )?;
    let mut den = theta_pows_den(
        "conjugate box ratio",
        a,
        base,
        &[(2 - 2 * k, 2 * l - 1), (3 - 2 * k, 2 * l - 2), (1 - k - n, l)],
        ctx,
    )?;
    for i in 1..=cap {
        let ci = conj.part(i as usize) as i64;
        num = num.mul(
            &theta_pows(
                a,
                base,
                &[(1 - k - ci, l + i - 1), (2 - k - ci, l + i - 2)],
                ctx,
            )?,
            ctx,
        );
        den = den.mul(
            &theta_pows_den(
                "conjugate box ratio column product",
                a,
                base,
                &[(1 - k - ci, l + i), (2 - k - ci, l + i - 1)],
                ctx,
            )?,
            ctx,
        );
    }
    Ok(num.div(&den, ctx))
}

fn check_shape(params: &OmegaParams, lam: &Partition) -> Result<()> {
    if lam.len() != params.n || lam.cap() != params.cap {
        return Err(Error::Domain(format!(
            "partition {lam} does not fit Lambda_({},{})",
            params.n, params.cap
        )));
    }
    Ok(())
}

/// Validates that row `row` of `lam` can take one more box; returns `(k, l)`.
fn check_box(params: &OmegaParams, lam: &Partition, row: usize) -> Result<(i64, i64)> {
    check_shape(params, lam)?;
    if row == 0 || row > params.n {
        return Err(Error::Domain(format!("row {row} outside 1..={}", params.n)));
    }
    let l = lam.part(row) + 1;
    if l > params.cap || (row > 1 && lam.part(row - 1) < l) {
        return Err(Error::Domain(format!("no addable box in row {row} of {lam}")));
    }
    Ok((row as i64, l as i64))
}

/// `prod E(a x^{xe} q^{qe})` over the given exponent pairs.
fn theta_pows(
    a: &BigComplex,
    base: &EllipticBase,
    pows: &[(i64, i64)],
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    for &(xe, qe) in pows {
        let arg = a
            .mul(&base.x.powi(xe, ctx), ctx)
            .mul(&base.q.powi(qe, ctx), ctx);
        acc = acc.mul(&theta_e(&arg, &base.p, ctx)?, ctx);
    }
    Ok(acc)
}

/// Denominator variant of [`theta_pows`]: each factor is pole-guarded.
fn theta_pows_den(
    site: &str,
    a: &BigComplex,
    base: &EllipticBase,
    pows: &[(i64, i64)],
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    for &(xe, qe) in pows {
        let arg = a
            .mul(&base.x.powi(xe, ctx), ctx)
            .mul(&base.q.powi(qe, ctx), ctx);
        acc = acc.mul(
            &theta_den(&format!("{site} E(a x^{xe} q^{qe})"), &arg, &base.p, ctx)?,
            ctx,
        );
    }
    Ok(acc)
}

/// `(u;q,x)_lambda` with every factor pole-guarded.
fn part_poch_den(
    site: &str,
    u: &BigComplex,
    lam: &Partition,
    base: &EllipticBase,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    let x_inv = base.x.recip(ctx);
    let mut row_arg = u.clone();
    for j in 1..=lam.len() {
        acc = acc.mul(
            &qp_den(
                &format!("{site} row {j}"),
                &row_arg,
                lam.part(j),
                &base.q,
                &base.p,
                ctx,
            )?,
            ctx,
        );
        if j < lam.len() {
            row_arg = row_arg.mul(&x_inv, ctx);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rel_error, within};
    use crate::series::omega::omega_term;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn bc(re: f64, im: f64, c: &PrecisionContext) -> BigComplex {
        BigComplex::from_f64s(re, im, c)
    }

    fn setup(n: usize, cap: u32, bs: Vec<BigComplex>, c: &PrecisionContext) -> OmegaParams {
        let base = EllipticBase::new(
            bc(0.07, 0.05, c),
            bc(0.43, -0.11, c),
            bc(0.61, 0.17, c),
        )
        .unwrap();
        OmegaParams::new(bc(1.33, 0.29, c), bs, n, cap, base).unwrap()
    }

    fn pt(parts: &[u32], cap: u32) -> Partition {
        Partition::new(parts.to_vec(), cap).unwrap()
    }

    #[test]
    fn empty_diagram_is_unit() {
        let c = ctx();
        let params = setup(3, 2, vec![], &c);
        let lam = Partition::zero(3, 2);
        let one = BigComplex::one(&c);
        assert!(within(&rel_error(&a_factor(&params, &lam, &c).unwrap(), &one, &c), 1e-45, &c));
        assert!(within(&rel_error(&b_factor(&params, &lam, &c).unwrap(), &one, &c), 1e-45, &c));
    }

    #[test]
    fn split_reconstructs_summand() {
        let c = ctx();
        let bs = vec![
            bc(0.72, -0.21, &c),
            bc(1.08, 0.14, &c),
            bc(0.55, 0.33, &c),
        ];
        let params = setup(3, 3, bs.clone(), &c);
        let aq = params.a.mul(&params.base.q, &c);
        for parts in [[1u32, 0, 0], [2, 1, 0], [3, 2, 2], [3, 3, 3]] {
            let lam = pt(&parts, 3);
            let term = omega_term(&lam, &params, &c).unwrap();
            let mut split = a_factor(&params, &lam, &c)
                .unwrap()
                .mul(&b_factor(&params, &lam, &c).unwrap(), &c);
            for b in &bs {
                split = split.mul(&part_poch(b, &lam, &params.base, &c).unwrap(), &c);
                split = split.div(
                    &part_poch(&aq.div(b, &c), &lam, &params.base, &c).unwrap(),
                    &c,
                );
            }
            assert!(
                within(&rel_error(&term, &split, &c), 1e-40, &c),
                "lambda={lam}"
            );
        }
    }

    #[test]
    fn box_ratio_matches_quotient() {
        let c = ctx();
        let params = setup(3, 3, vec![], &c);
        for parts in [[0u32, 0, 0], [2, 1, 0], [2, 2, 1], [3, 1, 1]] {
            let lam = pt(&parts, 3);
            for bx in lam.addable_boxes() {
                let plus = lam.with_box(bx).unwrap();
                let direct = a_factor(&params, &plus, &c)
                    .unwrap()
                    .div(&a_factor(&params, &lam, &c).unwrap(), &c);
                let ratio = a_box_ratio(&params, &lam, bx.row, &c).unwrap();
                assert!(
                    within(&rel_error(&ratio, &direct, &c), 1e-40, &c),
                    "lambda={lam} row={}",
                    bx.row
                );
                let conj_form = a_box_ratio_conjugate(&params, &lam, bx.row, &c).unwrap();
                assert!(
                    within(&rel_error(&conj_form, &direct, &c), 1e-40, &c),
                    "conjugate form, lambda={lam} row={}",
                    bx.row
                );
            }
        }
    }

    #[test]
    fn factors_survive_conjugation() {
        let c = ctx();
        for (n, cap, parts) in [
            (3usize, 3u32, vec![3u32, 1, 0]),
            (2, 4, vec![3, 1]),
            (4, 2, vec![2, 2, 1, 0]),
        ] {
            let params = setup(n, cap, vec![], &c);
            let dual = params.dual(&c).unwrap();
            let lam = pt(&parts, cap);
            let conj = lam.conjugate();
            let a1 = a_factor(&params, &lam, &c).unwrap();
            let a2 = a_factor(&dual, &conj, &c).unwrap();
            assert!(within(&rel_error(&a1, &a2, &c), 1e-40, &c), "A n={n} N={cap}");
            let b1 = b_factor(&params, &lam, &c).unwrap();
            let b2 = b_factor(&dual, &conj, &c).unwrap();
            assert!(within(&rel_error(&b1, &b2, &c), 1e-40, &c), "B n={n} N={cap}");
        }
    }

    #[test]
    fn box_ratio_substitution_symmetry() {
        let c = ctx();
        let params = setup(3, 4, vec![], &c);
        let dual = params.dual(&c).unwrap();
        let lam = pt(&[2, 1, 0], 4);
        let conj = lam.conjugate();
        for bx in lam.addable_boxes() {
            let l = bx.value as usize;
            let here = a_box_ratio_conjugate(&params, &lam, bx.row, &c).unwrap();
            let there = a_box_ratio(&dual, &conj, l, &c).unwrap();
            assert!(
                within(&rel_error(&here, &there, &c), 1e-40, &c),
                "row={} value={l}",
                bx.row
            );
        }
    }

    #[test]
    fn column_rewrite_of_theta_quotient() {
        // prod_i E(b x^{1-i} q^{lambda_i}) / E(b x^{-i} q^{lambda_i})
        //   = E(b q^N)/E(b x^{-n}) * prod_i E(b x^{-l'_i} q^{i-1}) / E(b x^{-l'_i} q^i)
        let c = ctx();
        let params = setup(4, 3, vec![], &c);
        let (p, q, x) = (&params.base.p, &params.base.q, &params.base.x);
        let b = bc(0.88, -0.36, &c);
        let lam = pt(&[3, 2, 2, 0], 3);
        let conj = lam.conjugate();
        let mut rows = BigComplex::one(&c);
        for i in 1..=4i64 {
            let qa = q.powi(lam.part(i as usize) as i64, &c);
            let num = b.mul(&x.powi(1 - i, &c), &c).mul(&qa, &c);
            let den = b.mul(&x.powi(-i, &c), &c).mul(&qa, &c);
            rows = rows.mul(&theta_e(&num, p, &c).unwrap(), &c);
            rows = rows.div(&theta_e(&den, p, &c).unwrap(), &c);
        }
        let mut cols = theta_e(&b.mul(&q.powi(3, &c), &c), p, &c)
            .unwrap()
            .div(&theta_e(&b.mul(&x.powi(-4, &c), &c), p, &c).unwrap(), &c);
        for i in 1..=3i64 {
            let xa = x.powi(-(conj.part(i as usize) as i64), &c);
            let num = b.mul(&xa, &c).mul(&q.powi(i - 1, &c), &c);
            let den = b.mul(&xa, &c).mul(&q.powi(i, &c), &c);
            cols = cols.mul(&theta_e(&num, p, &c).unwrap(), &c);
            cols = cols.div(&theta_e(&den, p, &c).unwrap(), &c);
        }
        assert!(within(&rel_error(&rows, &cols, &c), 1e-40, &c));
    }
}
