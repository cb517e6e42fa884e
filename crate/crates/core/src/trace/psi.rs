use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{CycloScalar, QContext};

/// Which root of unity plays the role of the trace parameter: `q` or `q^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Q,
    QInverse,
}

impl Orientation {
    fn sign(self) -> i64 {
        match self {
            Orientation::Q => 1,
            Orientation::QInverse => -1,
        }
    }
}

fn check_level(ctx: &QContext, k: i64) -> Result<()> {
    if k < 0 || ctx.kappa() < 2 * k + 2 {
        return Err(Error::Invalid(format!(
            "trace functions need kappa >= 2k+2 (kappa={}, k={k})",
            ctx.kappa()
        )));
    }
    Ok(())
}

fn inv_bracket(ctx: &QContext, x: i64, what: &str) -> Result<CycloScalar> {
    ctx.inv_q_int(x)
        .map_err(|_| Error::Pole(format!("[{what}] = [{x}] vanishes at kappa={}", ctx.kappa())))
}

/// `(-1)^j Q^{j(j-3)/2} (Q-Q^{-1})^{-j-1} [k+j]!/([j]![k-j]!) Q^{-jμ-(j-1)ν}`.
fn common_term(ctx: &QContext, s: i64, k: i64, j: i64, nu: i64, mu: i64) -> Result<CycloScalar> {
    let mut c = ctx.inv_q_minus_qinv().pow(j + 1)?;
    if (j + (j + 1) * i64::from(s < 0)) % 2 == 1 {
        c = -c;
    }
    Ok(c * ctx.q_pow(s * (j * (j - 3) / 2 - j * mu - (j - 1) * nu))
        * ctx.q_factorial(k + j)?
        * ctx.inv_q_factorial(j)?
        * ctx.inv_q_factorial(k - j)?)
}

/// `ψ^{(k)}(Q, ν, μ)` at integer arguments, `Q = q^{±1}`.
pub fn psi_exact(ctx: &QContext, o: Orientation, k: i64, nu: i64, mu: i64) -> Result<CycloScalar> {
    check_level(ctx, k)?;
    let s = o.sign();
    let mut sum = ctx.zero();
    for j in 0..=k {
        let mut t = common_term(ctx, s, k, j, nu, mu)?;
        for l in 0..j {
            t = t * inv_bracket(ctx, mu - l, "mu - l")?;
        }
        for l in 0..=j {
            t = t * inv_bracket(ctx, nu - l, "nu - l")?;
        }
        sum += &t;
    }
    Ok(ctx.q_pow(s * nu * mu) * sum)
}

/// `Ψ^{(k)}(Q, ν, μ)` at integer arguments without poles in `μ`.
///
/// Multiplying the prefactor `∏_{i<k} [μ-i] / ∏_{l=1}^k [ν+l]` into the
/// `j`-th term of `ψ` cancels its `∏_{l<j} [μ-l]`, leaving
/// `∏_{i=j}^{k-1} [μ-i]` in the numerator.
pub fn psi_renormalized_exact(
    ctx: &QContext,
    o: Orientation,
    k: i64,
    nu: i64,
    mu: i64,
) -> Result<CycloScalar> {
    check_level(ctx, k)?;
    let s = o.sign();
    let mut den = ctx.one();
    for l in 1..=k {
        den = den * inv_bracket(ctx, nu + l, "nu + l")?;
    }
    let mut sum = ctx.zero();
    for j in 0..=k {
        let mut t = common_term(ctx, s, k, j, nu, mu)?;
        for i in j..k {
            t = t * ctx.q_int(mu - i);
        }
        for l in 0..=j {
            t = t * inv_bracket(ctx, nu - l, "nu - l")?;
        }
        sum += &t;
    }
    Ok(ctx.q_pow(s * nu * mu) * sum * den)
}

/// `q^x` on the principal branch of `log q`.
fn cpow(q: Complex64, x: Complex64) -> Complex64 {
    (x * q.ln()).exp()
}

fn cbracket(q: Complex64, x: Complex64) -> Complex64 {
    (cpow(q, x) - cpow(q, -x)) / (q - 1.0 / q)
}

fn cfactorial(q: Complex64, n: i64) -> Complex64 {
    (1..=n).map(|i| cbracket(q, Complex64::from(i as f64))).product()
}

const POLE_TOL: f64 = 1e-300;

fn nonzero(z: Complex64, what: &str) -> Result<Complex64> {
    if z.norm() <= POLE_TOL || !z.is_finite() {
        return Err(Error::Pole(format!("{what} vanishes")));
    }
    Ok(z)
}

/// `ψ^{(k)}(q, ν, μ)` for complex `q, ν, μ`, with `q^x = exp(x log q)`.
pub fn psi_complex(q: Complex64, k: i64, nu: Complex64, mu: Complex64) -> Result<Complex64> {
    let qq = q - 1.0 / q;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=k {
        let jf = j as f64;
        let mut t = Complex64::from(if j % 2 == 0 { 1.0 } else { -1.0 })
            * cpow(q, Complex64::from(jf * (jf - 3.0) / 2.0))
            * qq.powi(-(j as i32) - 1)
            * cfactorial(q, k + j)
            / (cfactorial(q, j) * cfactorial(q, k - j))
            * cpow(q, -jf * mu - (jf - 1.0) * nu);
        for l in 0..j {
            t /= nonzero(cbracket(q, mu - l as f64), "[mu - l]")?;
        }
        for l in 0..=j {
            t /= nonzero(cbracket(q, nu - l as f64), "[nu - l]")?;
        }
        sum += t;
    }
    Ok(cpow(q, nu * mu) * sum)
}

/// `∏_{j=1}^k (q^{μ+1-j} - q^{-μ-1+j}) / (q^{ν+j} - q^{-ν-j})`.
pub fn renormalization_factor(q: Complex64, k: i64, nu: Complex64, mu: Complex64) -> Result<Complex64> {
    let mut f = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        let jf = j as f64;
        let num = cpow(q, mu + 1.0 - jf) - cpow(q, -mu - 1.0 + jf);
        let den = nonzero(cpow(q, nu + jf) - cpow(q, -nu - jf), "q^{nu+j} - q^{-nu-j}")?;
        f *= num / den;
    }
    Ok(f)
}

/// `Ψ^{(k)}` as the plain product of the prefactor and `ψ`.
pub fn psi_renormalized_complex(
    q: Complex64,
    k: i64,
    nu: Complex64,
    mu: Complex64,
) -> Result<Complex64> {
    Ok(renormalization_factor(q, k, nu, mu)? * psi_complex(q, k, nu, mu)?)
}

/// `Ψ^{(k)}(Q, ν, μ)` at `Q = e^{±πi/κ}` as the limit `ε → 0` of the
/// product formula at `μ + ε`, extrapolated as `2Ψ(μ+ε/2) - Ψ(μ+ε)`.
pub fn psi_renormalized_limit(
    kappa: i64,
    o: Orientation,
    k: i64,
    nu: i64,
    mu: i64,
    eps: f64,
) -> Result<Complex64> {
    let q = Complex64::from_polar(1.0, o.sign() as f64 * std::f64::consts::PI / kappa as f64);
    let at = |e: f64| {
        psi_renormalized_complex(q, k, Complex64::from(nu as f64), Complex64::from(mu as f64 + e))
    };
    Ok(2.0 * at(eps / 2.0)? - at(eps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k0_closed_form() {
        let ctx = QContext::level(7).unwrap();
        for nu in [1, 2, 3, 9] {
            for mu in -3..4 {
                // the j = 0 term carries q^{-(j-1)ν} = q^ν
                let want = ctx.q_pow(nu * mu + nu) * ctx.inv_q_diff(nu).unwrap();
                assert_eq!(psi_exact(&ctx, Orientation::Q, 0, nu, mu).unwrap(), want);
                assert_eq!(
                    psi_renormalized_exact(&ctx, Orientation::Q, 0, nu, mu).unwrap(),
                    want
                );
            }
        }
    }

    #[test]
    fn pole_at_nu_zero() {
        let ctx = QContext::level(7).unwrap();
        assert!(matches!(
            psi_exact(&ctx, Orientation::Q, 1, 0, 3),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            psi_complex(Complex64::new(0.9, 0.0), 0, Complex64::from(0.0), Complex64::from(1.3)),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn exact_matches_complex_at_generic_points() {
        let ctx = QContext::level(9).unwrap();
        for o in [Orientation::Q, Orientation::QInverse] {
            let q = Complex64::from_polar(1.0, o.sign() as f64 * std::f64::consts::PI / 9.0);
            for k in 0..=3 {
                for (nu, mu) in [(4, 5), (-4, 4), (13, -6)] {
                    let a = psi_exact(&ctx, o, k, nu, mu).unwrap().to_complex();
                    let b = psi_complex(q, k, (nu as f64).into(), (mu as f64).into()).unwrap();
                    assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()), "{o:?} k={k}");
                    let a = psi_renormalized_exact(&ctx, o, k, nu, mu).unwrap().to_complex();
                    let b = psi_renormalized_complex(q, k, (nu as f64).into(), (mu as f64).into())
                        .unwrap();
                    assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
                }
            }
        }
    }

    #[test]
    fn renormalized_is_finite_where_psi_has_a_pole() {
        let ctx = QContext::level(8).unwrap();
        // μ = 0 makes [μ - 0] vanish in the j = 1 term
        assert!(psi_exact(&ctx, Orientation::QInverse, 2, -4, 0).is_err());
        let exact = psi_renormalized_exact(&ctx, Orientation::QInverse, 2, -4, 0).unwrap();
        let lim = psi_renormalized_limit(8, Orientation::QInverse, 2, -4, 0, 1e-5).unwrap();
        assert!((exact.to_complex() - lim).norm() < 1e-8);
    }
}
