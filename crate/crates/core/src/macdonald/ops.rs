use crate::error::{Error, Result};
use crate::qcore::{CycloScalar, QContext};

use super::formal::FormalQScalar;
use super::poly::{Coeff, FormalQ, LaurentPolyX, QField, SymLaurentPoly};

/// `∏_{j<k} (1 - q^{2j} X^2)(1 - q^{2j} X^{-2})`.
pub fn weight<F: QField>(field: &F, k: i64) -> LaurentPolyX<F::Scalar> {
    let mut w = LaurentPolyX::monomial(0, field.one());
    for j in 0..k {
        let c = field.q_pow(2 * j).negated();
        let a = LaurentPolyX::from_terms([(0, field.one()), (2, c.clone())]);
        let b = LaurentPolyX::from_terms([(0, field.one()), (-2, c)]);
        w = w.mul(&a).mul(&b);
    }
    w
}

fn half_constant_term<F: QField>(field: &F, p: &LaurentPolyX<F::Scalar>) -> F::Scalar {
    let half = field.inv(&field.int(2)).expect("2 is invertible");
    p.coeff(0).map_or_else(|| field.zero(), |c| c.times(&half))
}

/// `⟨f, g⟩_k = ½ CT(f g W_k)`.
pub fn inner_product<F: QField>(
    field: &F,
    f: &SymLaurentPoly<F::Scalar>,
    g: &SymLaurentPoly<F::Scalar>,
    k: i64,
) -> F::Scalar {
    let fg = f.as_laurent().mul(g.as_laurent());
    half_constant_term(field, &fg.mul(&weight(field, k)))
}

/// `P_0^{(k)}, …, P_n^{(k)}` by Gram–Schmidt on `X^d + X^{-d}` at formal `q`.
pub fn macdonald_family_gram_schmidt(n: i64, k: i64) -> Vec<SymLaurentPoly<FormalQScalar>> {
    let field = FormalQ;
    let w = weight(&field, k);
    let ip = |f: &SymLaurentPoly<FormalQScalar>, g: &SymLaurentPoly<FormalQScalar>| {
        half_constant_term(&field, &f.as_laurent().mul(g.as_laurent()).mul(&w))
    };
    let mut family: Vec<SymLaurentPoly<FormalQScalar>> = Vec::new();
    let mut norms: Vec<FormalQScalar> = Vec::new();
    for d in 0..=n.max(0) {
        let m = SymLaurentPoly::basis(d, field.one());
        let mut p = m.as_laurent().clone();
        for (prev, nrm) in family.iter().zip(&norms) {
            let c = &ip(&m, prev) * &nrm.inv().expect("norms are nonzero at generic q");
            p = p.sub(&prev.as_laurent().scale(&c));
        }
        let p = SymLaurentPoly::new(p).expect("Gram-Schmidt preserves parity");
        norms.push(ip(&p, &p));
        family.push(p);
    }
    family
}

/// `P_n^{(k)}` at formal `q` via Gram–Schmidt.
pub fn macdonald_gram_schmidt(n: i64, k: i64) -> SymLaurentPoly<FormalQScalar> {
    macdonald_family_gram_schmidt(n, k)
        .pop()
        .expect("family is nonempty")
}

/// `Df = (f(x-1) - f(x+1)) / (q^x - q^{-x})`.
pub fn shift_apply<F: QField>(
    field: &F,
    f: &LaurentPolyX<F::Scalar>,
) -> Result<LaurentPolyX<F::Scalar>> {
    // f(x-1) - f(x+1) has coefficients c_d (q^{-d} - q^d)
    let num = LaurentPolyX::from_terms(
        f.terms()
            .map(|(d, c)| (d, c.times(&field.q_pow(-d).minus(&field.q_pow(d))))),
    );
    let Some((lo, hi)) = num.degree_range() else {
        return Ok(LaurentPolyX::zero());
    };
    // Q (X - X^{-1}) = N  ⇔  Q_{d-1} - Q_{d+1} = N_d; solve from the top.
    let mut q: std::collections::BTreeMap<i64, F::Scalar> = Default::default();
    for d in (lo..=hi).rev() {
        let above = q.get(&(d + 1)).cloned().unwrap_or_else(|| field.zero());
        let nd = num.coeff(d).cloned().unwrap_or_else(|| field.zero());
        q.insert(d - 1, nd.plus(&above));
    }
    for d in [lo - 1, lo] {
        if q.get(&d).is_some_and(|c| !c.is_zero()) {
            return Err(Error::NonDivisible(format!("{f}")));
        }
    }
    Ok(LaurentPolyX::from_terms(
        q.into_iter().filter(|(d, _)| *d > lo && *d < hi),
    ))
}

/// `P_n^{(k)}` from `P_{n+k}^{(0)}` by `k` applications of the shift operator.
pub fn macdonald_via_shift<F: QField>(
    field: &F,
    n: i64,
    k: i64,
) -> Result<SymLaurentPoly<F::Scalar>> {
    if n < 0 || k < 0 {
        return Err(Error::Range(format!("P_{n}^({k})")));
    }
    let mut p = SymLaurentPoly::basis(n + k, field.one()).into_laurent();
    for m in (n + 1..=n + k).rev() {
        let inv = field.inv_shift_divisor(m)?;
        p = shift_apply(field, &p)?.scale(&inv);
    }
    SymLaurentPoly::new(p)
}

/// `P_n^{(k)}` with coefficients at `q = e^{πi/κ}`.
///
/// Uses the shift-operator chain when every divisor is nonzero, and otherwise
/// computes at formal `q` and specializes coefficient by coefficient.
pub fn macdonald_at_root(ctx: &QContext, n: i64, k: i64) -> Result<SymLaurentPoly<CycloScalar>> {
    match macdonald_via_shift(ctx, n, k) {
        Err(Error::VanishingDivisor { .. }) => {
            macdonald_via_shift(&FormalQ, n, k)?.try_map(|c| c.specialize(ctx))
        }
        other => other,
    }
}

/// `P(m)`: substitute `q^x → q^m`.
pub fn evaluate<F: QField>(field: &F, p: &SymLaurentPoly<F::Scalar>, m: i64) -> F::Scalar {
    p.as_laurent().eval_at(field, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fq(e: i64) -> FormalQScalar {
        FormalQScalar::q_pow(e)
    }

    #[test]
    fn inner_product_examples() {
        let one = SymLaurentPoly::basis(0, FormalQScalar::one());
        let x = SymLaurentPoly::basis(1, FormalQScalar::one());
        assert_eq!(
            inner_product(&FormalQ, &one, &one, 0),
            FormalQScalar::from_int(1) * FormalQScalar::from_int(2).inv().unwrap()
        );
        assert!(inner_product(&FormalQ, &x, &one, 0).is_zero());
        let fam = macdonald_family_gram_schmidt(1, 1);
        assert!(inner_product(&FormalQ, &fam[1], &fam[0], 1).is_zero());
    }

    #[test]
    fn gram_schmidt_examples() {
        for n in 1..5 {
            assert_eq!(
                macdonald_gram_schmidt(n, 0),
                SymLaurentPoly::basis(n, FormalQScalar::one())
            );
        }
        for k in 0..4 {
            assert_eq!(
                macdonald_gram_schmidt(0, k),
                SymLaurentPoly::basis(0, FormalQScalar::one())
            );
        }
        assert_eq!(
            macdonald_gram_schmidt(1, 1),
            SymLaurentPoly::basis(1, FormalQScalar::one())
        );
    }

    #[test]
    fn shift_examples() {
        let one = SymLaurentPoly::basis(0, FormalQScalar::one()).into_laurent();
        assert!(shift_apply(&FormalQ, &one).unwrap().is_zero());
        let p1 = SymLaurentPoly::basis(1, FormalQScalar::one()).into_laurent();
        assert_eq!(
            shift_apply(&FormalQ, &p1).unwrap(),
            LaurentPolyX::monomial(0, fq(-1) - fq(1))
        );
        let p2 = SymLaurentPoly::basis(2, FormalQScalar::one()).into_laurent();
        assert_eq!(
            shift_apply(&FormalQ, &p2).unwrap(),
            p1.scale(&(fq(-2) - fq(2)))
        );
    }

    #[test]
    fn odd_input_is_rejected() {
        let odd = LaurentPolyX::monomial(1, FormalQScalar::one());
        assert!(matches!(
            shift_apply(&FormalQ, &odd),
            Err(Error::NonDivisible(_))
        ));
    }

    #[test]
    fn via_shift_examples() {
        assert_eq!(
            macdonald_via_shift(&FormalQ, 0, 1).unwrap(),
            SymLaurentPoly::basis(0, FormalQScalar::one())
        );
        // P_{n-1}^{(1)} = (X^n - X^{-n}) / (X - X^{-1}) = X^{n-1} + X^{n-3} + … + X^{1-n}
        for n in 1..7 {
            let expect =
                LaurentPolyX::from_terms((0..n).map(|j| (n - 1 - 2 * j, FormalQScalar::one())));
            assert_eq!(
                macdonald_via_shift(&FormalQ, n - 1, 1).unwrap().into_laurent(),
                expect
            );
        }
    }

    #[test]
    fn vanishing_divisor_and_fallback() {
        let ctx = QContext::new(6, 2).unwrap();
        assert!(matches!(
            macdonald_via_shift(&ctx, 3, 3),
            Err(Error::VanishingDivisor { m: 6 })
        ));
        let p = macdonald_at_root(&ctx, 3, 3).unwrap();
        let formal = macdonald_via_shift(&FormalQ, 3, 3).unwrap();
        assert_eq!(p, formal.try_map(|c| c.specialize(&ctx)).unwrap());
        assert_eq!(p.degree(), Some(3));
    }

    #[test]
    fn evaluation_examples() {
        let ctx = QContext::new(7, 1).unwrap();
        for n in 1..5 {
            let p = macdonald_at_root(&ctx, n, 0).unwrap();
            assert_eq!(evaluate(&ctx, &p, 0), ctx.int(2));
        }
        let p0 = macdonald_at_root(&ctx, 0, 2).unwrap();
        assert_eq!(evaluate(&ctx, &p0, 3), ctx.one());
        // P_{n-1}^{(1)}(m+p) = (q^{n(m+p)} - q^{-n(m+p)}) / (q^{m+p} - q^{-m-p})
        for n in 1..5 {
            for m in 0..4 {
                let x = m + ctx.p();
                let p = macdonald_at_root(&ctx, n - 1, 1).unwrap();
                let want = ctx.q_diff(n * x) * ctx.inv_q_diff(x).unwrap();
                assert_eq!(evaluate(&ctx, &p, x), want);
            }
        }
    }
}
