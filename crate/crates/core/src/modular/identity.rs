use crate::error::{Error, Result};
use crate::macdonald::{evaluate, macdonald_at_root, SymLaurentPoly};
use crate::qcore::{CycloScalar, QContext};

use super::fcoeff::{f_coeff, first_block_m};
use super::matrix::ExactMatrix;

/// `q^{pn-km-k(k+1)/2} [p;k]^{-1} (q^{-m-p+k} - q^{m+p-k}) ∏_{j=1}^k (q^{-n+j} - q^{n-j}) P(m+p-k)`
/// with `P = P^{(k+1)}_{n-k-1}` supplied by the caller.
fn macdonald_side(
    ctx: &QContext,
    k: i64,
    m: i64,
    n: i64,
    poly: &SymLaurentPoly<CycloScalar>,
) -> Result<CycloScalar> {
    let p = ctx.p();
    let x = m + p - k;
    let prod = (1..=k).fold(ctx.one(), |acc, j| acc * (ctx.q_pow(-n + j) - ctx.q_pow(n - j)));
    Ok(ctx.q_pow(p * n - k * m) * ctx.q_half_pow(-k * (k + 1))
        * ctx.q_binomial(p, k)?.inv()?
        * (ctx.q_pow(-x) - ctx.q_pow(x))
        * prod
        * evaluate(ctx, poly, x))
}

fn check_ranges(ctx: &QContext, k: i64, m: i64, n: i64) -> Result<()> {
    let (kap, p) = (ctx.kappa(), ctx.p());
    if k < 0 || k > p || n < k + 1 || n > kap || m < -p + 2 * k + 1 || m > kap - p - 1 {
        return Err(Error::Range(format!(
            "need 0<=k<=p, k+1<=n<=kappa, -p+2k+1<=m<=kappa-p-1 (k={k}, m={m}, n={n})"
        )));
    }
    Ok(())
}

/// Both sides of `f_{m,n} - q^{2pn} f_{m,-n} = (Macdonald side)`.
pub fn macdonald_f_sides(
    ctx: &QContext,
    k: i64,
    m: i64,
    n: i64,
) -> Result<(CycloScalar, CycloScalar)> {
    check_ranges(ctx, k, m, n)?;
    let lhs = f_coeff(ctx, k, m, n)? - ctx.q_pow(2 * ctx.p() * n) * f_coeff(ctx, k, m, -n)?;
    let poly = macdonald_at_root(ctx, n - k - 1, k + 1)?;
    Ok((lhs, macdonald_side(ctx, k, m, n, &poly)?))
}

pub fn macdonald_f_identity(ctx: &QContext, k: i64, m: i64, n: i64) -> Result<bool> {
    let (a, b) = macdonald_f_sides(ctx, k, m, n)?;
    Ok(a == b)
}

/// Relation rows for `u^{[k]}_m`, one row per `n ∈ {k+1..p} ∪ {κ-p..κ-k-1}`,
/// columns over `m ∈ {-p+2k+1..κ-p-1}`. Returns the matrix and its rank.
pub fn smf_relation_rows(ctx: &QContext, k: i64) -> Result<(ExactMatrix, usize)> {
    let (kap, p) = (ctx.kappa(), ctx.p());
    if k < 0 || k > p {
        return Err(Error::Range(format!("need 0 <= k <= p, got {k}")));
    }
    let ns: Vec<i64> = (k + 1..=p).chain(kap - p..=kap - k - 1).collect();
    let ms = first_block_m(ctx, k);
    let polys = ns
        .iter()
        .map(|&n| macdonald_at_root(ctx, n - k - 1, k + 1))
        .collect::<Result<Vec<_>>>()?;
    let rows = ExactMatrix::try_from_fn(ns.len(), ms.len(), |i, j| {
        macdonald_side(ctx, k, ms[j], ns[i], &polys[i])
    })?;
    let rank = rows.rank()?;
    Ok((rows, rank))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_grid_kappa8_p2() {
        let ctx = QContext::new(8, 2).unwrap();
        for k in 0..=2 {
            for m in first_block_m(&ctx, k) {
                for n in k + 1..=8 {
                    assert!(macdonald_f_identity(&ctx, k, m, n).unwrap(), "k={k} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn relation_rows_are_rescaled_s_columns() {
        use crate::modular::s_matrix;
        let ctx = QContext::new(8, 2).unwrap();
        let p = ctx.p();
        for k in 0..2 {
            let (rows, _) = smf_relation_rows(&ctx, k).unwrap();
            let low = s_matrix(&ctx.with_p(k).unwrap()).unwrap();
            let ns: Vec<i64> = (k + 1..=p).chain(8 - p..=8 - k - 1).collect();
            let bin_inv = ctx.q_binomial(p, k).unwrap().inv().unwrap();
            for (i, &n) in ns.iter().enumerate() {
                // row_n = q^{(p-k)(n+k)} [p;k]^{-1} times column n of S' at level k
                let c = ctx.q_pow((p - k) * (n + k)) * &bin_inv;
                let col = (n - k - 1) as usize;
                for j in 0..rows.cols() {
                    assert_eq!(rows.get(i, j), &(&c * low.s_rescaled.get(j, col)));
                }
            }
        }
    }

    #[test]
    fn relation_ranks() {
        let ctx = QContext::new(8, 2).unwrap();
        let (rows, rank) = smf_relation_rows(&ctx, 0).unwrap();
        assert_eq!((rows.rows(), rank), (4, 4));
        let (rows, rank) = smf_relation_rows(&ctx, 1).unwrap();
        assert_eq!((rows.rows(), rank), (2, 2));
        let (rows, rank) = smf_relation_rows(&ctx, 2).unwrap();
        assert_eq!((rows.rows(), rank), (0, 0));
    }

    #[test]
    fn out_of_range() {
        let ctx = QContext::new(8, 2).unwrap();
        assert!(macdonald_f_identity(&ctx, 3, 3, 4).is_err());
        assert!(macdonald_f_identity(&ctx, 1, 0, 4).is_err());
    }
}
