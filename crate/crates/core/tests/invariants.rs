//! Property tests for the structural invariants of each module.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use torusblocks::analytic::theta::{sigma_lambda, theta1, theta_level, weierstrass_e};
use torusblocks::analytic::{u_block, EllipticContext, IntegralSpec, Quadrature};
use torusblocks::macdonald::{macdonald_via_shift, shift_apply, FormalQ, FormalQScalar, SymLaurentPoly};
use torusblocks::modular::{admissible_m, f_coeff, f_recursion_rhs, f_reflected, smf_relation_rows};
use torusblocks::qcore::sqrt_cyclotomic;
use torusblocks::trace::trace_shift_sides;
use torusblocks::{CycloScalar, Error, QContext};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

/// `(κ, p)` with `4 ≤ κ ≤ kmax` and `κ ≥ 2p+2`.
fn level(kmax: i64, pmax: i64) -> impl Strategy<Value = (i64, i64)> {
    (4..=kmax).prop_flat_map(move |k| (Just(k), 0..=((k - 2) / 2).min(pmax)))
}

fn cyclo(order: usize) -> impl Strategy<Value = CycloScalar> {
    proptest::collection::vec((-20i64..=20, 1i64..=6), order).prop_map(move |v| {
        let c: Vec<BigRational> = v.into_iter().map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b))).collect();
        CycloScalar::from_coeffs(order, &c)
    })
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn q_integers_are_odd_periodic_and_vanish_at_kappa((kappa, _) in level(12, 0), n in -40i64..40) {
        let ctx = QContext::level(kappa).unwrap();
        prop_assert_eq!(ctx.q_int(-n), -ctx.q_int(n));
        prop_assert_eq!(ctx.q_int(n + 2 * kappa), ctx.q_int(n));
        prop_assert!(ctx.q_int(kappa).is_zero());
    }

    #[test]
    fn q_binomial_is_symmetric((kappa, _) in level(12, 0), n in 0i64..12, j in 0i64..12) {
        prop_assume!(j <= n && n < kappa);
        let ctx = QContext::level(kappa).unwrap();
        prop_assert_eq!(ctx.q_binomial(n, j).unwrap(), ctx.q_binomial(n, n - j).unwrap());
    }

    #[test]
    fn pochhammer_splits((kappa, _) in level(10, 0), n in -15i64..15, i in 0i64..=6, j in 0i64..=6) {
        let ctx = QContext::level(kappa).unwrap();
        let lhs = ctx.q_pochhammer(n, j).unwrap() * ctx.q_pochhammer(n + j, i).unwrap();
        prop_assert_eq!(lhs, ctx.q_pochhammer(n, j + i).unwrap());
    }

    #[test]
    fn embedding_is_multiplicative(a in cyclo(16), b in cyclo(16)) {
        let prod = (&a * &b).to_complex();
        let want = a.to_complex() * b.to_complex();
        prop_assert!((prod - want).norm() <= 1e-12 * want.norm().max(1.0), "{prod} vs {want}");
    }

    #[test]
    fn shift_theorem_at_formal_q(n in 1i64..=6, k in 0i64..=3) {
        let p = macdonald_via_shift(&FormalQ, n, k).unwrap();
        let lowered = macdonald_via_shift(&FormalQ, n - 1, k + 1).unwrap();
        let image = shift_apply(&FormalQ, p.as_laurent()).unwrap();
        prop_assert!(image.is_even());
        let factor = &FormalQScalar::q_pow(-n) - &FormalQScalar::q_pow(n);
        prop_assert_eq!(image, lowered.as_laurent().scale(&factor));
        prop_assert_eq!(p.degree(), Some(n));
    }

    #[test]
    fn f_recursion_holds((kappa, p) in level(10, 4), k in 0i64..4, n in -20i64..20, pick in 0usize..64) {
        prop_assume!(k < p);
        let ctx = QContext::new(kappa, p).unwrap();
        let ms = admissible_m(&ctx, k + 1);
        let m = ms[pick % ms.len()];
        prop_assert_eq!(f_coeff(&ctx, k + 1, m, n).unwrap(), f_recursion_rhs(&ctx, k, m, n).unwrap());
    }

    #[test]
    fn f_reflection_holds((kappa, p) in level(10, 4), k in 0i64..=4, n in -20i64..20, pick in 0usize..64) {
        prop_assume!(k <= p);
        let ctx = QContext::new(kappa, p).unwrap();
        let ms = admissible_m(&ctx, k);
        let m = ms[pick % ms.len()];
        prop_assert_eq!(f_coeff(&ctx, k, m, n).unwrap(), f_reflected(&ctx, k, m, n).unwrap());
    }

    #[test]
    fn trace_shift_relation((kappa, _) in level(10, 0), k in 0i64..=3, nu in -20i64..20, mu in -20i64..20) {
        prop_assume!(kappa >= 2 * k + 4);
        let ctx = QContext::level(kappa).unwrap();
        match trace_shift_sides(&ctx, k, nu, mu) {
            Ok((a, b)) => prop_assert_eq!(a, b),
            Err(Error::Pole(_)) | Err(Error::DivisionByZero(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(cases(50))]

    #[test]
    fn theta_quasi_periodicity(x in -1.0f64..1.0, y in -0.4f64..0.4, n in -12i64..12) {
        let tau = Complex64::new(0.3, 1.0);
        let ectx = EllipticContext::new(tau, 5).unwrap();
        let t = Complex64::new(x, y);
        let i = Complex64::i();
        let pi = std::f64::consts::PI;
        let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-12 * b.norm().max(1.0);
        let th = theta1(t, &ectx);
        prop_assert!(close(theta1(t + 1.0, &ectx), -th));
        prop_assert!(close(theta1(-t, &ectx), -th));
        let shifted = -(-pi * i * tau - 2.0 * pi * i * t).exp() * th;
        prop_assert!(close(theta1(t + tau, &ectx), shifted));
        prop_assert!(close(weierstrass_e(t + 1.0, &ectx), -weierstrass_e(t, &ectx)));
        let lam = Complex64::new(0.37, 0.11);
        let s = sigma_lambda(lam, t, &ectx).unwrap();
        prop_assert!(close(sigma_lambda(lam, t + 1.0, &ectx).unwrap(), s));
        let s_tau = sigma_lambda(lam, t + tau, &ectx).unwrap();
        prop_assert!(close(s_tau, (2.0 * pi * i * lam).exp() * s));
        prop_assert!(close(theta_level(n + 10, t, &ectx), theta_level(n, t, &ectx)));
        prop_assert!(close(theta_level(n, t + 1.0, &ectx), (pi * i * n as f64).exp() * theta_level(n, t, &ectx)));
    }
}

#[test]
fn sqrt_cyclotomic_squares() {
    for m in (2..=24).step_by(2) {
        let r = sqrt_cyclotomic(m, 8 * m).unwrap();
        assert_eq!(&r * &r, CycloScalar::from_int(8 * m, m as i64), "m = {m}");
    }
}

#[test]
fn relation_row_ranks() {
    for kappa in 4..=10 {
        for p in 1..=3.min((kappa - 2) / 2) {
            let ctx = QContext::new(kappa, p).unwrap();
            for k in 0..p {
                let (_, rank) = smf_relation_rows(&ctx, k).unwrap();
                assert_eq!(rank, 2 * (p - k) as usize, "kappa={kappa} p={p} k={k}");
            }
        }
    }
}

#[test]
fn macdonald_degree_and_parity() {
    for k in 0..=4 {
        for n in 0..=8 {
            let p: SymLaurentPoly<FormalQScalar> = macdonald_via_shift(&FormalQ, n, k).unwrap();
            assert_eq!(p.degree(), Some(n));
            assert!(p.as_laurent().is_even());
        }
    }
}

#[test]
fn quadrature_doubling_is_stable_at_p1() {
    let e = EllipticContext::new(Complex64::new(0.0, 1.0), 5).unwrap();
    for n in 2..=3 {
        let spec = IntegralSpec::new(5, 1, 1, n, Complex64::new(0.31, 0.07));
        let coarse = u_block(&spec.with_quadrature(Quadrature::one_dim().with_level(6)), &e).unwrap().value;
        let fine = u_block(&spec.with_quadrature(Quadrature::one_dim().with_level(7)), &e).unwrap().value;
        let rel = (fine - coarse).norm() / fine.norm();
        assert!(rel < 1e-8, "n={n}: {rel:e}");
    }
}
