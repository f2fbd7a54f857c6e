//! Theta shifted factorials, indexed by integers of either sign and by
//! partitions.
//!
//! ```text
//! (a;q)_k    = prod_{j=0}^{k-1} E(a q^j)          (a;q)_{-k} = 1/(a q^{-k};q)_k
//! (a;q,x)_λ  = prod_{j=1}^{n} (a x^{1-j};q)_{λ_j}
//! ```
//!
//! Denominator evaluations are guarded: a factor whose theta value falls
//! below the pole threshold (relative to its natural scale) raises a
//! structured pole error so verification drivers can resample.
//!
//! [`ThetaLadder`] and [`PochLadder`] are the immutable memo tables the
//! series evaluators build once per parameter set.

use crate::error::{Error, Result};
use crate::numerics::{rel_error, BigComplex, PrecisionContext};
use crate::partitions::Partition;
use crate::theta::{pole_ratio, theta_e, EllipticBase};

/// `(a;q)_k` for any integer `k`.
pub fn qpoch(a: &BigComplex, k: i64, base: &EllipticBase, ctx: &PrecisionContext) -> Result<BigComplex> {
    if a.is_zero() {
        return Err(Error::Domain("(a;q)_k requires a != 0".into()));
    }
    if k == 0 {
        return Ok(BigComplex::one(ctx));
    }
    if k > 0 {
        let mut acc = BigComplex::one(ctx);
        let mut arg = a.clone();
        for _ in 0..k {
            acc = acc.mul(&theta_e(&arg, &base.p, ctx)?, ctx);
            arg = arg.mul(&base.q, ctx);
        }
        return Ok(acc);
    }
    // (a;q)_{-m} = 1 / (a q^{-m};q)_m with every factor now a denominator
    let m = -k;
    let mut acc = BigComplex::one(ctx);
    let mut arg = a.mul(&base.q.powi(k, ctx), ctx);
    for j in 0..m {
        let v = theta_e(&arg, &base.p, ctx)?;
        let ratio = pole_ratio(&v, &arg, &base.p);
        if ratio < ctx.pole_threshold() {
            return Err(Error::pole(
                format!("(a;q)_{{{k}}} denominator, |a| ~ {:.4e}", a.mag_f64()),
                j,
                ratio,
            ));
        }
        acc = acc.mul(&v, ctx);
        arg = arg.mul(&base.q, ctx);
    }
    Ok(acc.recip(ctx))
}

/// `(a_1,...,a_m;q)_k`; empty list gives `1`.
pub fn qpoch_multi(args: &[BigComplex], k: i64, base: &EllipticBase, ctx: &PrecisionContext) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    for a in args {
        acc = acc.mul(&qpoch(a, k, base, ctx)?, ctx);
    }
    Ok(acc)
}

/// Partition-indexed `(a;q,x)_λ`.
pub fn part_poch(a: &BigComplex, lam: &Partition, base: &EllipticBase, ctx: &PrecisionContext) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    let mut row_arg = a.clone();
    let x_inv = base.x.recip(ctx);
    for j in 1..=lam.len() {
        acc = acc.mul(&qpoch(&row_arg, lam.part(j) as i64, base, ctx)?, ctx);
        if j < lam.len() {
            row_arg = row_arg.mul(&x_inv, ctx);
        }
    }
    Ok(acc)
}

/// `(a_1,...,a_m;q,x)_λ`; empty list gives `1`.
pub fn part_poch_multi(args: &[BigComplex], lam: &Partition, base: &EllipticBase, ctx: &PrecisionContext) -> Result<BigComplex> {
    let mut acc = BigComplex::one(ctx);
    for a in args {
        acc = acc.mul(&part_poch(a, lam, base, ctx)?, ctx);
    }
    Ok(acc)
}

/// Both sides of the factor-rearrangement identity
///
/// ```text
/// (aq;q)_n prod_{i<j} E(a q^{i+j}) = (aq;q^2)_n prod_{i<j} E(a q^{i+j-1})
/// ```
///
/// which agree to working precision for all `n >= 1`.
pub fn dp_identity_sides(
    a: &BigComplex,
    n: usize,
    base: &EllipticBase,
    ctx: &PrecisionContext,
) -> Result<(BigComplex, BigComplex)> {
    if n == 0 {
        return Err(Error::Domain("dp identity needs n >= 1".into()));
    }
    let p = &base.p;
    let q = &base.q;
    // left: (aq;q)_n * prod_{1<=i<j<=n} E(a q^{i+j})
    let mut lhs = qpoch(&a.mul(q, ctx), n as i64, base, ctx)?;
    // right: prod_{j=0}^{n-1} E(a q^{1+2j}) * prod_{i<j} E(a q^{i+j-1})
    let mut rhs = BigComplex::one(ctx);
    for j in 0..n as i64 {
        let arg = a.mul(&q.powi(1 + 2 * j, ctx), ctx);
        rhs = rhs.mul(&theta_e(&arg, p, ctx)?, ctx);
    }
    for i in 1..=n as i64 {
        for j in (i + 1)..=n as i64 {
            let arg_l = a.mul(&q.powi(i + j, ctx), ctx);
            lhs = lhs.mul(&theta_e(&arg_l, p, ctx)?, ctx);
            let arg_r = a.mul(&q.powi(i + j - 1, ctx), ctx);
            rhs = rhs.mul(&theta_e(&arg_r, p, ctx)?, ctx);
        }
    }
    Ok((lhs, rhs))
}

/// Relative residual of the identity checked by [`dp_identity_sides`].
pub fn dp_identity_residual(
    a: &BigComplex,
    n: usize,
    base: &EllipticBase,
    ctx: &PrecisionContext,
) -> Result<astro_float::BigFloat> {
    let (lhs, rhs) = dp_identity_sides(a, n, base, ctx)?;
    Ok(rel_error(&lhs, &rhs, ctx))
}

/// Immutable table of `E(start * step^k)` for `k = 0..=count`, with each
/// rung's pole ratio retained so denominator use can be guarded cheaply.
pub struct ThetaLadder {
    site: String,
    vals: Vec<BigComplex>,
    ratios: Vec<f64>,
}

impl ThetaLadder {
    pub fn new(
        site: impl Into<String>,
        start: &BigComplex,
        step: &BigComplex,
        count: usize,
        p: &BigComplex,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let site = site.into();
        let mut vals = Vec::with_capacity(count + 1);
        let mut ratios = Vec::with_capacity(count + 1);
        let mut arg = start.clone();
        for _ in 0..=count {
            let v = theta_e(&arg, p, ctx)?;
            ratios.push(pole_ratio(&v, &arg, p));
            vals.push(v);
            arg = arg.mul(step, ctx);
        }
        Ok(ThetaLadder { site, vals, ratios })
    }

    /// Rung value for numerator use (zeros allowed).
    pub fn value(&self, k: usize) -> &BigComplex {
        &self.vals[k]
    }

    /// Rung value for denominator use; errors when numerically at a zero.
    pub fn denom(&self, k: usize, ctx: &PrecisionContext) -> Result<&BigComplex> {
        if self.ratios[k] < ctx.pole_threshold() {
            return Err(Error::pole(format!("E-ladder {}", self.site), k as i64, self.ratios[k]));
        }
        Ok(&self.vals[k])
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }
}

/// Immutable table of `(u;q)_k` for `k = 0..=count`, built as running
/// products over a theta ladder; tracks the worst rung ratio among the first
/// `k` factors for denominator guarding.
pub struct PochLadder {
    site: String,
    vals: Vec<BigComplex>,
    min_ratio: Vec<f64>,
    min_at: Vec<usize>,
}

impl PochLadder {
    pub fn new(
        site: impl Into<String>,
        u: &BigComplex,
        count: usize,
        base: &EllipticBase,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let site = site.into();
        let mut vals = Vec::with_capacity(count + 1);
        let mut min_ratio = Vec::with_capacity(count + 1);
        let mut min_at = Vec::with_capacity(count + 1);
        vals.push(BigComplex::one(ctx));
        min_ratio.push(f64::INFINITY);
        min_at.push(0);
        let mut arg = u.clone();
        for k in 0..count {
            let v = theta_e(&arg, &base.p, ctx)?;
            let r = pole_ratio(&v, &arg, &base.p);
            let (prev_r, prev_at) = (min_ratio[k], min_at[k]);
            if r < prev_r {
                min_ratio.push(r);
                min_at.push(k);
            } else {
                min_ratio.push(prev_r);
                min_at.push(prev_at);
            }
            let next = vals[k].mul(&v, ctx);
            vals.push(next);
            arg = arg.mul(&base.q, ctx);
        }
        Ok(PochLadder {
            site,
            vals,
            min_ratio,
            min_at,
        })
    }

    /// `(u;q)_k` for numerator use.
    pub fn value(&self, k: usize) -> &BigComplex {
        &self.vals[k]
    }

    /// `(u;q)_k` for denominator use; errors if any of the first `k` factors
    /// is numerically at a theta zero.
    pub fn denom(&self, k: usize, ctx: &PrecisionContext) -> Result<&BigComplex> {
        if self.min_ratio[k] < ctx.pole_threshold() {
            return Err(Error::pole(
                format!("Pochhammer ladder {}", self.site),
                self.min_at[k] as i64,
                self.min_ratio[k],
            ));
        }
        Ok(&self.vals[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::within;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn bc(re: f64, im: f64, c: &PrecisionContext) -> BigComplex {
        BigComplex::from_f64s(re, im, c)
    }

    fn base(c: &PrecisionContext) -> EllipticBase {
        EllipticBase::new(bc(0.11, 0.02, c), bc(0.62, -0.05, c), bc(0.47, 0.08, c)).unwrap()
    }

    #[test]
    fn trivial_indices() {
        let c = ctx();
        let b = base(&c);
        let a = bc(0.8, 0.1, &c);
        assert!(qpoch(&a, 0, &b, &c).unwrap().eq_exact(&BigComplex::one(&c)));
        // (a;q)_{-1} = 1/E(a/q)
        let lhs = qpoch(&a, -1, &b, &c).unwrap();
        let rhs = theta_e(&a.div(&b.q, &c), &b.p, &c).unwrap().recip(&c);
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-55, &c));
        // (a;q)_2 = E(a) E(aq)
        let lhs = qpoch(&a, 2, &b, &c).unwrap();
        let rhs = theta_e(&a, &b.p, &c)
            .unwrap()
            .mul(&theta_e(&a.mul(&b.q, &c), &b.p, &c).unwrap(), &c);
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-55, &c));
    }

    #[test]
    fn splitting_and_inversion() {
        let c = ctx();
        let b = base(&c);
        let a = bc(1.3, -0.2, &c);
        for (m, k) in [(3i64, 2i64), (2, -4), (-3, 5), (-2, -2), (0, 4), (5, 0)] {
            let whole = qpoch(&a, m + k, &b, &c).unwrap();
            let left = qpoch(&a, m, &b, &c).unwrap();
            let shifted = a.mul(&b.q.powi(m, &c), &c);
            let right = qpoch(&shifted, k, &b, &c).unwrap();
            let err = rel_error(&whole, &left.mul(&right, &c), &c);
            assert!(within(&err, 1e-45, &c), "m={m} k={k}");
        }
        for k in 0..5i64 {
            let inv = qpoch(&a, -k, &b, &c).unwrap();
            let shifted = a.mul(&b.q.powi(-k, &c), &c);
            let fwd = qpoch(&shifted, k, &b, &c).unwrap();
            let err = rel_error(&inv.mul(&fwd, &c), &BigComplex::one(&c), &c);
            assert!(within(&err, 1e-45, &c), "k={k}");
        }
    }

    #[test]
    fn pole_reporting() {
        let c = ctx();
        let b = base(&c);
        // (q^3;q)_{-3} has denominator factor E(q^0) = 0
        let a = b.q.powi(3, &c);
        match qpoch(&a, -3, &b, &c) {
            Err(Error::Pole(info)) => assert_eq!(info.index, 0),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn partition_poch_shapes() {
        let c = ctx();
        let b = base(&c);
        let a = bc(0.9, 0.3, &c);
        let zero = Partition::zero(3, 2);
        assert!(part_poch(&a, &zero, &b, &c).unwrap().eq_exact(&BigComplex::one(&c)));
        let single = Partition::new(vec![3], 4).unwrap();
        let lhs = part_poch(&a, &single, &b, &c).unwrap();
        let rhs = qpoch(&a, 3, &b, &c).unwrap();
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-55, &c));
        // (2,1): (a;q)_2 (a/x;q)_1
        let lam = Partition::new(vec![2, 1], 2).unwrap();
        let lhs = part_poch(&a, &lam, &b, &c).unwrap();
        let rhs = qpoch(&a, 2, &b, &c)
            .unwrap()
            .mul(&qpoch(&a.div(&b.x, &c), 1, &b, &c).unwrap(), &c);
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-50, &c));
    }

    #[test]
    fn multi_variants() {
        let c = ctx();
        let b = base(&c);
        let lam = Partition::new(vec![1, 1], 1).unwrap();
        assert!(qpoch_multi(&[], 5, &b, &c).unwrap().eq_exact(&BigComplex::one(&c)));
        assert!(part_poch_multi(&[], &lam, &b, &c)
            .unwrap()
            .eq_exact(&BigComplex::one(&c)));
        let a1 = bc(0.7, 0.0, &c);
        let a2 = bc(1.4, -0.3, &c);
        // ([a,b], (1,1)) = E(a)E(a/x)E(b)E(b/x)
        let lhs = part_poch_multi(&[a1.clone(), a2.clone()], &lam, &b, &c).unwrap();
        let mut rhs = BigComplex::one(&c);
        for u in [&a1, &a2] {
            rhs = rhs.mul(&theta_e(u, &b.p, &c).unwrap(), &c);
            rhs = rhs.mul(&theta_e(&u.div(&b.x, &c), &b.p, &c).unwrap(), &c);
        }
        assert!(within(&rel_error(&lhs, &rhs, &c), 1e-50, &c));
        // ([a], 1) matches qpoch
        let lhs = qpoch_multi(std::slice::from_ref(&a1), 1, &b, &c).unwrap();
        assert!(lhs.eq_exact(&qpoch(&a1, 1, &b, &c).unwrap()));
    }

    #[test]
    fn dp_identity() {
        let c = ctx();
        let b = base(&c);
        let a = bc(0.85, 0.15, &c);
        assert!(dp_identity_residual(&a, 1, &b, &c).unwrap().is_zero());
        for n in [2usize, 4, 6] {
            let r = dp_identity_residual(&a, n, &b, &c).unwrap();
            assert!(within(&r, 1e-45, &c), "n={n}");
        }
    }

    #[test]
    fn conjugation_symmetry_small() {
        // (b;q,x)_λ = (b;x^{-1},q^{-1})_{λ'}
        let c = ctx();
        let b = base(&c);
        let dual = b.dual(&c).unwrap();
        let a = bc(1.2, 0.4, &c);
        for lam in crate::partitions::enumerate(3, 2) {
            let lhs = part_poch(&a, &lam, &b, &c).unwrap();
            let rhs = part_poch(&a, &lam.conjugate(), &dual, &c).unwrap();
            assert!(within(&rel_error(&lhs, &rhs, &c), 1e-45, &c), "{lam}");
        }
    }

    #[test]
    fn ladders_match_direct() {
        let c = ctx();
        let b = base(&c);
        let u = bc(0.95, -0.2, &c);
        let theta = ThetaLadder::new("test", &u, &b.q, 5, &b.p, &c).unwrap();
        for k in 0..=5i64 {
            let arg = u.mul(&b.q.powi(k, &c), &c);
            let direct = theta_e(&arg, &b.p, &c).unwrap();
            let err = rel_error(theta.value(k as usize), &direct, &c);
            assert!(within(&err, 1e-55, &c));
        }
        let poch = PochLadder::new("test", &u, 5, &b, &c).unwrap();
        for k in 0..=5i64 {
            let direct = qpoch(&u, k, &b, &c).unwrap();
            let err = rel_error(poch.value(k as usize), &direct, &c);
            assert!(within(&err, 1e-55, &c));
        }
    }

    #[test]
    fn ladder_pole_guard() {
        let c = ctx();
        let b = base(&c);
        // rung 2 of the ladder from q^{-2} hits E(1) = 0
        let start = b.q.powi(-2, &c);
        let poch = PochLadder::new("guard", &start, 4, &b, &c).unwrap();
        assert!(poch.denom(2, &c).is_ok());
        match poch.denom(3, &c) {
            Err(Error::Pole(info)) => assert_eq!(info.index, 2),
            other => panic!("expected pole, got {:?}", other.map(|_| ())),
        }
        let theta = ThetaLadder::new("guard", &start, &b.q, 4, &b.p, &c).unwrap();
        assert!(theta.denom(1, &c).is_ok());
        assert!(theta.denom(2, &c).is_err());
    }
}
