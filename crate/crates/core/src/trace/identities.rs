use crate::error::{Error, Result};
use crate::macdonald::{evaluate, macdonald_at_root};
use crate::modular::{admissible_m, f_coeff};
use crate::qcore::{CycloScalar, QContext};

use super::psi::{psi_renormalized_exact, Orientation};

const QI: Orientation = Orientation::QInverse;

fn check_admissible(ctx: &QContext, k: i64, m: i64) -> Result<()> {
    if k < 0 || k > ctx.p() {
        return Err(Error::Range(format!("need 0 <= k <= p, got k={k}")));
    }
    if !admissible_m(ctx, k).contains(&m) {
        return Err(Error::Range(format!("m={m} is not admissible at level k={k}")));
    }
    Ok(())
}

/// Both sides of `f^{(k)}_{m,n} = q^{pn-km-k(k+1)} (q^{m+p-k} - q^{-m-p+k}) [p;k]^{-1} Ψ^{(k)}(q^{-1}, -m-p+k, -n-1)`.
pub fn trace_f_sides(
    ctx: &QContext,
    k: i64,
    m: i64,
    n: i64,
) -> Result<(CycloScalar, CycloScalar)> {
    check_admissible(ctx, k, m)?;
    let p = ctx.p();
    let x = m + p - k;
    let rhs = ctx.q_pow(p * n - k * m - k * (k + 1))
        * ctx.q_diff(x)
        * ctx.q_binomial(p, k)?.inv()?
        * psi_renormalized_exact(ctx, QI, k, -x, -n - 1)?;
    Ok((f_coeff(ctx, k, m, n)?, rhs))
}

pub fn trace_f_identity(ctx: &QContext, k: i64, m: i64, n: i64) -> Result<bool> {
    let (a, b) = trace_f_sides(ctx, k, m, n)?;
    Ok(a == b)
}

/// Both sides of
/// `Ψ^{(k)}(q^{-1}, -m-p+k, n-1) - Ψ^{(k)}(q^{-1}, -m-p+k, -n-1) = P^{(k+1)}_{n-k-1}(m+p-k) ∏_{j=1}^k (q^{-n+2j} - q^n)`
/// for `k+1 <= n <= κ` and `m` in the first admissible block.
pub fn macdonald_trace_sides(
    ctx: &QContext,
    k: i64,
    m: i64,
    n: i64,
) -> Result<(CycloScalar, CycloScalar)> {
    let (kap, p) = (ctx.kappa(), ctx.p());
    if k < 0 || k > p || n < k + 1 || n > kap || m < -p + 2 * k + 1 || m > kap - p - 1 {
        return Err(Error::Range(format!("(k, m, n) = ({k}, {m}, {n}) outside the stated ranges")));
    }
    let x = m + p - k;
    let lhs = psi_renormalized_exact(ctx, QI, k, -x, n - 1)?
        - psi_renormalized_exact(ctx, QI, k, -x, -n - 1)?;
    let poly = macdonald_at_root(ctx, n - k - 1, k + 1)?;
    let prod = (1..=k).fold(ctx.one(), |acc, j| acc * (ctx.q_pow(-n + 2 * j) - ctx.q_pow(n)));
    Ok((lhs, evaluate(ctx, &poly, x) * prod))
}

/// Both sides of `(Ψ^{(k)}(ν-1, μ) - Ψ^{(k)}(ν+1, μ)) / (q^ν - q^{-ν}) = q^{-k-1} Ψ^{(k+1)}(ν, μ)`,
/// all at `q^{-1}`. Fails with a pole error where any term is undefined.
pub fn trace_shift_sides(
    ctx: &QContext,
    k: i64,
    nu: i64,
    mu: i64,
) -> Result<(CycloScalar, CycloScalar)> {
    let inv = ctx
        .inv_q_diff(nu)
        .map_err(|_| Error::Pole(format!("q^nu - q^-nu vanishes at nu={nu}")))?;
    let lhs = (psi_renormalized_exact(ctx, QI, k, nu - 1, mu)?
        - psi_renormalized_exact(ctx, QI, k, nu + 1, mu)?)
        * inv;
    let rhs = ctx.q_pow(-k - 1) * psi_renormalized_exact(ctx, QI, k + 1, nu, mu)?;
    Ok((lhs, rhs))
}

/// The terminating series `Σ_{i=0}^{k-j} q^{-i(m+p-k-j-1)} (k+1,q)_i (j-k,q)_i / ([i]! (m+p-k+1,q)_i)`
/// and its closed form `q^{(k-j)(k+1)} (m+p-2k,q)_{k+1} / (m+p-k-j,q)_{k+1}`.
pub fn phi21_terminating(
    ctx: &QContext,
    k: i64,
    j: i64,
    m: i64,
) -> Result<(CycloScalar, CycloScalar)> {
    if j < 0 || j > k {
        return Err(Error::Range(format!("need 0 <= j <= k, got j={j}, k={k}")));
    }
    let p = ctx.p();
    let mut sum = ctx.zero();
    for i in 0..=k - j {
        sum += &(ctx.q_pow(-i * (m + p - k - j - 1))
            * ctx.q_pochhammer(k + 1, i)?
            * ctx.q_pochhammer(j - k, i)?
            * ctx.inv_q_factorial(i)?
            * ctx.inv_q_pochhammer(m + p - k + 1, i)?);
    }
    let closed = ctx.q_pow((k - j) * (k + 1))
        * ctx.q_pochhammer(m + p - 2 * k, k + 1)?
        * ctx.inv_q_pochhammer(m + p - k - j, k + 1)?;
    Ok((sum, closed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::first_block_m;

    #[test]
    fn k0_example() {
        let ctx = QContext::new(7, 2).unwrap();
        for m in admissible_m(&ctx, 0) {
            for n in 0..14 {
                assert!(trace_f_identity(&ctx, 0, m, n).unwrap());
            }
        }
    }

    #[test]
    fn full_grid_kappa8_p2() {
        let ctx = QContext::new(8, 2).unwrap();
        for k in 0..=2 {
            for m in admissible_m(&ctx, k) {
                for n in 0..16 {
                    assert!(trace_f_identity(&ctx, k, m, n).unwrap(), "k={k} m={m} n={n}");
                }
            }
            for m in first_block_m(&ctx, k) {
                for n in k + 1..=8 {
                    let (a, b) = macdonald_trace_sides(&ctx, k, m, n).unwrap();
                    assert_eq!(a, b, "bridge k={k} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn phi21_examples() {
        let ctx = QContext::new(8, 2).unwrap();
        let (s, c) = phi21_terminating(&ctx, 1, 0, 3).unwrap();
        assert_eq!(s, c);
        for k in 0..=2 {
            let (s, c) = phi21_terminating(&ctx, k, k, 2 * k + 1).unwrap();
            assert_eq!(s, ctx.one());
            assert_eq!(c, ctx.one());
        }
    }

    #[test]
    fn shift_corollary() {
        let ctx = QContext::level(8).unwrap();
        let mut checked = 0;
        for k in 0..=2 {
            for nu in 0..16 {
                for mu in -8..8 {
                    if let Ok((a, b)) = trace_shift_sides(&ctx, k, nu, mu) {
                        assert_eq!(a, b, "k={k} nu={nu} mu={mu}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }
}
