//! Cross-checks of the evaluation layer against straight-line reference
//! products computed with a fixed generous cutoff (see `common::naive`).

mod common;

use common::{bc, ctx, naive};
use ehs::numerics::{rel_error, to_f64, BigComplex};
use ehs::partitions::Partition;
use ehs::pochhammer::{part_poch, qpoch};
use ehs::series::{cn_lhs, cn_rhs, jackson_rhs, omega_one_var, CnParams};
use ehs::theta::{theta_e, EllipticBase};

const TOL: f64 = 1e-70;

#[test]
fn theta_matches_direct_product() {
    let c = ctx(80);
    let grid_x = [
        (0.5, 0.0),
        (1.0, 0.3),
        (-1.7, 0.4),
        (0.01, -0.02),
        (23.0, -11.0),
        (0.0, 1.0),
    ];
    let grid_p = [(0.0, 0.0), (0.1, 0.0), (-0.35, 0.2), (0.05, -0.55), (0.6, 0.0)];
    for &(xr, xi) in &grid_x {
        for &(pr, pi) in &grid_p {
            let x = bc(xr, xi, &c);
            let p = bc(pr, pi, &c);
            let lib = theta_e(&x, &p, &c).unwrap();
            let reference = naive::theta(&x, &p, &c);
            let err = to_f64(&rel_error(&lib, &reference, &c));
            assert!(err < TOL, "x=({xr},{xi}) p=({pr},{pi}): err={err:.3e}");
        }
    }
}

#[test]
fn qpoch_matches_direct_product() {
    let c = ctx(80);
    let p = bc(0.13, -0.21, &c);
    let q = bc(0.71, 0.33, &c);
    let base = EllipticBase::new(p.clone(), q.clone(), BigComplex::one(&c)).unwrap();
    for &(ar, ai) in &[(1.4, 0.2), (-0.6, 0.9), (0.08, 0.0)] {
        let a = bc(ar, ai, &c);
        for k in [0u32, 1, 2, 7] {
            let lib = qpoch(&a, k as i64, &base, &c).unwrap();
            let reference = naive::qpoch(&a, k, &q, &p, &c);
            let err = to_f64(&rel_error(&lib, &reference, &c));
            assert!(err < TOL, "a=({ar},{ai}) k={k}: err={err:.3e}");
        }
        // negative index: the reciprocal convention against the direct product
        let lib = qpoch(&a, -3, &base, &c).unwrap();
        let shifted = a.mul(&q.powi(-3, &c), &c);
        let reference = naive::qpoch(&shifted, 3, &q, &p, &c).recip(&c);
        let err = to_f64(&rel_error(&lib, &reference, &c));
        assert!(err < TOL, "a=({ar},{ai}) k=-3: err={err:.3e}");
    }
}

#[test]
fn part_poch_matches_direct_product() {
    let c = ctx(80);
    let p = bc(0.09, 0.17, &c);
    let q = bc(0.52, -0.29, &c);
    let x = bc(1.31, 0.44, &c);
    let base = EllipticBase::new(p.clone(), q.clone(), x.clone()).unwrap();
    let a = bc(0.83, -0.66, &c);
    for parts in [vec![0u32], vec![3, 1, 0], vec![4, 4, 2, 1]] {
        let cap = parts[0].max(4);
        let lam = Partition::new(parts.clone(), cap).unwrap();
        let lib = part_poch(&a, &lam, &base, &c).unwrap();
        let reference = naive::row_poch(&a, &parts, &q, &x, &p, &c);
        let err = to_f64(&rel_error(&lib, &reference, &c));
        assert!(err < TOL, "lambda={parts:?}: err={err:.3e}");
    }
}

fn balanced_inputs(n: usize, cap: u32, c: &ehs::numerics::PrecisionContext) -> naive::CnInputs {
    let a = bc(1.21, 0.34, c);
    let b = bc(0.67, 0.41, c);
    let d = bc(1.05, -0.52, c);
    let e = bc(0.88, 0.23, c);
    let q = bc(0.49, 0.18, c);
    let x = bc(0.93, -0.27, c);
    let p = bc(0.11, 0.07, c);
    // solve c from the balancing surface so it is exact in big arithmetic
    let cc = a
        .mul(&a, c)
        .mul(&q.powi(cap as i64 + 1, c), c)
        .div(&b.mul(&d, c).mul(&e, c).mul(&x.powi(n as i64 - 1, c), c), c);
    naive::CnInputs { a, b, c: cc, d, e, n, cap, q, x, p }
}

#[test]
fn cn_sum_matches_direct_product_evaluation() {
    let c = ctx(80);
    for (n, cap) in [(1usize, 3u32), (2, 2), (3, 1)] {
        let inputs = balanced_inputs(n, cap, &c);
        let base = EllipticBase::new(inputs.p.clone(), inputs.q.clone(), inputs.x.clone()).unwrap();
        let params = CnParams::new(
            inputs.a.clone(),
            inputs.b.clone(),
            inputs.c.clone(),
            inputs.d.clone(),
            inputs.e.clone(),
            n,
            cap,
            base,
            &c,
        )
        .unwrap();
        let lib_lhs = cn_lhs(&params, &c).unwrap();
        let lib_rhs = cn_rhs(&params, &c).unwrap();
        let ref_lhs = naive::cn_lhs(&inputs, &c);
        let ref_rhs = naive::cn_rhs(&inputs, &c);
        for (label, lib, reference) in
            [("lhs", &lib_lhs, &ref_lhs), ("rhs", &lib_rhs, &ref_rhs)]
        {
            let err = to_f64(&rel_error(lib, reference, &c));
            assert!(err < TOL, "n={n} N={cap} {label}: err={err:.3e}");
        }
        // and the identity itself holds on the reference side
        let err = to_f64(&rel_error(&ref_lhs, &ref_rhs, &c));
        assert!(err < 1e-60, "n={n} N={cap} reference identity: err={err:.3e}");
    }
}

#[test]
fn one_variable_sum_is_the_n1_case() {
    let c = ctx(80);
    let cap = 3u32;
    let inputs = balanced_inputs(1, cap, &c);
    let bs = [
        inputs.b.clone(),
        inputs.c.clone(),
        inputs.d.clone(),
        inputs.e.clone(),
    ];
    let lib = omega_one_var(&inputs.a, &bs, cap, &inputs.q, &inputs.p, &c).unwrap();
    let reference = naive::cn_lhs(&inputs, &c);
    let err = to_f64(&rel_error(&lib, &reference, &c));
    assert!(err < TOL, "omega vs direct: err={err:.3e}");
    let closed = jackson_rhs(
        &inputs.a, &inputs.b, &inputs.c, &inputs.d, cap, &inputs.q, &inputs.p, &c,
    )
    .unwrap();
    let err = to_f64(&rel_error(&lib, &closed, &c));
    assert!(err < 1e-60, "omega vs closed form: err={err:.3e}");
}
