//! Terminating series and closed forms for the summation identities.
//!
//! Everything is in multiplicative notation; additive parameters enter only
//! through [`one_var::additive_to_multiplicative`]. Submodules:
//!
//! * [`one_var`] — one-variable `omega` series, the Jackson closed form, and
//!   the Bailey transformation;
//! * [`omega`] — the partition-indexed `Omega` series over `Lambda_{nN}`
//!   (the `C_n` sum is the four-parameter case) and its closed form;
//! * [`warnaar`] — the `2^n`-term lemma sum and the `(N+1)^n`-term sum with
//!   independent variables `x_1..x_n`;
//! * [`factors`] — the `A`/`B` factorization of the `Omega` summand and the
//!   added-box ratio used by the duality argument.

pub mod factors;
pub mod omega;
pub mod one_var;
pub mod warnaar;

pub use factors::{a_box_ratio, a_box_ratio_conjugate, a_factor, b_factor};
pub use omega::{cn_lhs, cn_rhs, cn_term, omega_sum, omega_term, rhs_closed_form};
pub use one_var::{
    additive_omega, additive_to_multiplicative, bailey_lhs, bailey_rhs, jackson_rhs, omega_one_var,
};
pub use warnaar::{
    warnaar_lemma_lhs, warnaar_lemma_rhs, warnaar_lemma_term, warnaar_thm51_lhs, warnaar_thm51_rhs,
    warnaar_thm51_term,
};

use astro_float::BigFloat;

use crate::error::{Error, Result};
use crate::numerics::{pow10_neg, BigComplex, PrecisionContext};
use crate::theta::{pole_ratio, theta_e, EllipticBase};

/// Parameters of the multivariable `C_n` summation: five numerator
/// parameters on the balancing surface `b c d e x^{n-1} = a^2 q^{N+1}`.
#[derive(Clone, Debug)]
pub struct CnParams {
    pub a: BigComplex,
    pub b: BigComplex,
    pub c: BigComplex,
    pub d: BigComplex,
    pub e: BigComplex,
    pub n: usize,
    pub cap: u32,
    pub base: EllipticBase,
}

impl CnParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: BigComplex,
        b: BigComplex,
        c: BigComplex,
        d: BigComplex,
        e: BigComplex,
        n: usize,
        cap: u32,
        base: EllipticBase,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be >= 1".into()));
        }
        for (name, v) in [("a", &a), ("b", &b), ("c", &c), ("d", &d), ("e", &e)] {
            if v.is_zero() {
                return Err(Error::Domain(format!("parameter {name} must be nonzero")));
            }
        }
        let params = CnParams {
            a,
            b,
            c,
            d,
            e,
            n,
            cap,
            base,
        };
        let res = params.balance_residual(ctx);
        check_balance("b c d e x^(n-1) = a^2 q^(N+1)", &res, ctx)?;
        Ok(params)
    }

    /// `|bcde x^{n-1} - a^2 q^{N+1}| / |a^2 q^{N+1}|`.
    pub fn balance_residual(&self, ctx: &PrecisionContext) -> BigFloat {
        let lhs = self
            .b
            .mul(&self.c, ctx)
            .mul(&self.d, ctx)
            .mul(&self.e, ctx)
            .mul(&self.base.x.powi(self.n as i64 - 1, ctx), ctx);
        let rhs = self
            .a
            .mul(&self.a, ctx)
            .mul(&self.base.q.powi(self.cap as i64 + 1, ctx), ctx);
        constraint_residual(&lhs, &rhs, ctx)
    }
}

/// Parameters of the lemma-type sums with independent variables `x_1..x_n`.
///
/// `cap = None` is the `2^n`-term lemma (balancing `a^2 q^{3-n} = bcde`);
/// `cap = Some(N)` is the `(N+1)^n`-term sum (balancing
/// `a^2 q^{N+2-n} = bcde`).
#[derive(Clone, Debug)]
pub struct LemmaParams {
    pub a: BigComplex,
    pub b: BigComplex,
    pub c: BigComplex,
    pub d: BigComplex,
    pub e: BigComplex,
    pub xs: Vec<BigComplex>,
    pub cap: Option<u32>,
    pub q: BigComplex,
    pub p: BigComplex,
}

impl LemmaParams {
    #[allow(clippy::too_many_arguments)]
    pub fn lemma(
        a: BigComplex,
        b: BigComplex,
        c: BigComplex,
        d: BigComplex,
        e: BigComplex,
        xs: Vec<BigComplex>,
        q: BigComplex,
        p: BigComplex,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let params = Self::build(a, b, c, d, e, xs, None, q, p)?;
        let res = params.balance_residual(ctx);
        check_balance("a^2 q^(3-n) = b c d e", &res, ctx)?;
        Ok(params)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn thm51(
        a: BigComplex,
        b: BigComplex,
        c: BigComplex,
        d: BigComplex,
        e: BigComplex,
        xs: Vec<BigComplex>,
        cap: u32,
        q: BigComplex,
        p: BigComplex,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let params = Self::build(a, b, c, d, e, xs, Some(cap), q, p)?;
        let res = params.balance_residual(ctx);
        check_balance("a^2 q^(N+2-n) = b c d e", &res, ctx)?;
        Ok(params)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        a: BigComplex,
        b: BigComplex,
        c: BigComplex,
        d: BigComplex,
        e: BigComplex,
        xs: Vec<BigComplex>,
        cap: Option<u32>,
        q: BigComplex,
        p: BigComplex,
    ) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::Domain("need at least one variable x_i".into()));
        }
        for (name, v) in [("a", &a), ("b", &b), ("c", &c), ("d", &d), ("e", &e), ("q", &q)] {
            if v.is_zero() {
                return Err(Error::Domain(format!("parameter {name} must be nonzero")));
            }
        }
        if xs.iter().any(|v| v.is_zero()) {
            return Err(Error::Domain("variables x_i must be nonzero".into()));
        }
        Ok(LemmaParams {
            a,
            b,
            c,
            d,
            e,
            xs,
            cap,
            q,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    /// Residual of the applicable balancing condition.
    pub fn balance_residual(&self, ctx: &PrecisionContext) -> BigFloat {
        let n = self.n() as i64;
        let expo = match self.cap {
            None => 3 - n,
            Some(cap) => cap as i64 + 2 - n,
        };
        let lhs = self
            .a
            .mul(&self.a, ctx)
            .mul(&self.q.powi(expo, ctx), ctx);
        let rhs = self
            .b
            .mul(&self.c, ctx)
            .mul(&self.d, ctx)
            .mul(&self.e, ctx);
        constraint_residual(&lhs, &rhs, ctx)
    }
}

/// Parameters of the generic partition-indexed `Omega` series; no balancing
/// is imposed (identity checks constrain parameters at the harness level).
#[derive(Clone, Debug)]
pub struct OmegaParams {
    pub a: BigComplex,
    pub bs: Vec<BigComplex>,
    pub n: usize,
    pub cap: u32,
    pub base: EllipticBase,
}

impl OmegaParams {
    pub fn new(a: BigComplex, bs: Vec<BigComplex>, n: usize, cap: u32, base: EllipticBase) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be >= 1".into()));
        }
        if a.is_zero() || bs.iter().any(|v| v.is_zero()) {
            return Err(Error::Domain("Omega parameters must be nonzero".into()));
        }
        Ok(OmegaParams { a, bs, n, cap, base })
    }

    /// The same series viewed through the conjugation duality:
    /// `(a, q, x, n, N) -> (aqx, 1/x, 1/q, N, n)` with the same `bs`.
    pub fn dual(&self, ctx: &PrecisionContext) -> Result<OmegaParams> {
        let a = self.a.mul(&self.base.q, ctx).mul(&self.base.x, ctx);
        OmegaParams::new(
            a,
            self.bs.clone(),
            self.cap as usize,
            self.n as u32,
            self.base.dual(ctx)?,
        )
    }
}

/// Parameters of the one-variable Bailey transformation on the surface
/// `b c d e f g = a^3 q^{N+2}`, with `lambda = q a^2 / (bcd)`.
#[derive(Clone, Debug)]
pub struct BaileyParams {
    pub a: BigComplex,
    pub b: BigComplex,
    pub c: BigComplex,
    pub d: BigComplex,
    pub e: BigComplex,
    pub f: BigComplex,
    pub g: BigComplex,
    pub cap: u32,
    pub q: BigComplex,
    pub p: BigComplex,
    pub lambda: BigComplex,
}

impl BaileyParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: BigComplex,
        b: BigComplex,
        c: BigComplex,
        d: BigComplex,
        e: BigComplex,
        f: BigComplex,
        g: BigComplex,
        cap: u32,
        q: BigComplex,
        p: BigComplex,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        for (name, v) in [
            ("a", &a),
            ("b", &b),
            ("c", &c),
            ("d", &d),
            ("e", &e),
            ("f", &f),
            ("g", &g),
            ("q", &q),
        ] {
            if v.is_zero() {
                return Err(Error::Domain(format!("parameter {name} must be nonzero")));
            }
        }
        let lhs = b
            .mul(&c, ctx)
            .mul(&d, ctx)
            .mul(&e, ctx)
            .mul(&f, ctx)
            .mul(&g, ctx);
        let rhs = a
            .powi(3, ctx)
            .mul(&q.powi(cap as i64 + 2, ctx), ctx);
        let res = constraint_residual(&lhs, &rhs, ctx);
        check_balance("b c d e f g = a^3 q^(N+2)", &res, ctx)?;
        let lambda = q.mul(&a, ctx).mul(&a, ctx).div(&b.mul(&c, ctx).mul(&d, ctx), ctx);
        Ok(BaileyParams {
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
        })
    }
}

/// `|lhs - rhs| / |rhs|`.
pub(crate) fn constraint_residual(lhs: &BigComplex, rhs: &BigComplex, ctx: &PrecisionContext) -> BigFloat {
    let diff = lhs.sub(rhs, ctx).abs(ctx);
    let scale = rhs.abs(ctx);
    if scale.is_zero() {
        return diff;
    }
    diff.div(&scale, ctx.bits(), ctx.rm())
}

/// Balancing residuals must sit below `10^-(digits-3)`.
pub(crate) fn check_balance(what: &str, residual: &BigFloat, ctx: &PrecisionContext) -> Result<()> {
    let tol = pow10_neg(ctx.digits() as i32 - 3);
    if !crate::numerics::within(residual, tol, ctx) {
        return Err(Error::Domain(format!(
            "balancing violated: {what} off by {:e}",
            crate::numerics::to_f64(residual)
        )));
    }
    Ok(())
}

/// Ascending `(u;q)_k` for numerator positions: zeros are legitimate.
pub(crate) fn qp_num(
    u: &BigComplex,
    k: u32,
    q: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    let mut arg = u.clone();
    for _ in 0..k {
        acc = acc.mul(&theta_e(&arg, p, ctx)?, ctx);
        arg = arg.mul(q, ctx);
    }
    Ok(acc)
}

/// Ascending `(u;q)_k` for denominator positions: factors numerically at a
/// theta zero raise a pole error.
pub(crate) fn qp_den(
    site: &str,
    u: &BigComplex,
    k: u32,
    q: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    let mut arg = u.clone();
    for j in 0..k {
        let v = theta_e(&arg, p, ctx)?;
        let ratio = pole_ratio(&v, &arg, p);
        if ratio < ctx.pole_threshold() {
            return Err(Error::pole(site.to_string(), j as i64, ratio));
        }
        acc = acc.mul(&v, ctx);
        arg = arg.mul(q, ctx);
    }
    Ok(acc)
}

/// Single guarded theta factor for denominator positions.
pub(crate) fn theta_den(
    site: &str,
    arg: &BigComplex,
    p: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let v = theta_e(arg, p, ctx)?;
    let ratio = pole_ratio(&v, arg, p);
    if ratio < ctx.pole_threshold() {
        return Err(Error::pole(site.to_string(), 0, ratio));
    }
    Ok(v)
}
