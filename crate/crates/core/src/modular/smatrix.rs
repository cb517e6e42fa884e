use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::macdonald::{evaluate, macdonald_at_root, macdonald_via_shift, FormalQ};
use crate::qcore::{sqrt_cyclotomic, CycloScalar, QContext};
use crate::report::{Basis, CheckRecord};

use super::matrix::{ComplexMatrix, ExactMatrix};

/// Labels `n ∈ {p+1, …, κ-p-1}` of the block basis `u^{[p]}_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockBasis {
    pub kappa: i64,
    pub p: i64,
}

impl BlockBasis {
    pub fn new(ctx: &QContext) -> Self {
        BlockBasis {
            kappa: ctx.kappa(),
            p: ctx.p(),
        }
    }

    pub fn labels(&self) -> Vec<i64> {
        (self.p + 1..=self.kappa - self.p - 1).collect()
    }

    pub fn dim(&self) -> usize {
        (self.kappa - 2 * self.p - 1) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularData {
    pub basis: BlockBasis,
    /// Diagonal of `T`, indexed like `basis.labels()`.
    pub t: Vec<CycloScalar>,
    pub s: ExactMatrix,
    /// `S' = e^{πi/4} √(2κ) S`.
    pub s_rescaled: ExactMatrix,
    pub backend: String,
}

/// `q^{n²/2} = ζ_{8κ}^{2n²}` for each basis label.
pub fn t_matrix(ctx: &QContext) -> Vec<CycloScalar> {
    BlockBasis::new(ctx)
        .labels()
        .into_iter()
        .map(|n| ctx.q_half_pow(n * n))
        .collect()
}

/// `∏_{j=lo}^{p} (q^{-x+j} - q^{x-j})`.
fn q_diff_product(ctx: &QContext, x: i64, lo: i64) -> CycloScalar {
    (lo..=ctx.p()).fold(ctx.one(), |acc, j| acc * (ctx.q_pow(-x + j) - ctx.q_pow(x - j)))
}

/// `P^{(p+1)}_{n-p-1}(m)` for `m, n` in the basis: rows `m`, columns `n`.
fn macdonald_grid(ctx: &QContext) -> Result<ExactMatrix> {
    let labels = BlockBasis::new(ctx).labels();
    let p = ctx.p();
    let polys = labels
        .par_iter()
        .map(|&n| macdonald_at_root(ctx, n - p - 1, p + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExactMatrix::from_fn(labels.len(), labels.len(), |i, j| {
        evaluate(ctx, &polys[j], labels[i])
    }))
}

/// `1/√(2κ)` as an element of the order-`8κ` field.
pub fn inv_sqrt_two_kappa(ctx: &QContext) -> Result<CycloScalar> {
    sqrt_cyclotomic(2 * ctx.kappa() as usize, ctx.order())?.inv()
}

/// Builds `T`, `S` and `S'` on the block basis.
pub fn s_matrix(ctx: &QContext) -> Result<ModularData> {
    let basis = BlockBasis::new(ctx);
    let labels = basis.labels();
    let p = ctx.p();
    let pm = macdonald_grid(ctx)?;
    let s_rescaled = ExactMatrix::from_fn(labels.len(), labels.len(), |i, j| {
        let (m, n) = (labels[i], labels[j]);
        ctx.q_pow(p * (n - m)) * ctx.q_half_pow(-p * (p + 1))
            * (ctx.q_pow(-m) - ctx.q_pow(m))
            * q_diff_product(ctx, n, 1)
            * pm.get(i, j)
    });
    let pre = ctx.eighth_root_pow(-1) * inv_sqrt_two_kappa(ctx)?;
    let s = s_rescaled.scale(&pre);
    Ok(ModularData {
        basis,
        t: t_matrix(ctx),
        s,
        s_rescaled,
        backend: "exact".into(),
    })
}

/// Floating-point `T` and `S`, with the Macdonald values taken from the
/// formal-q polynomials evaluated at `q = e^{πi/κ}`.
pub fn s_matrix_float(ctx: &QContext) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let kap = ctx.kappa() as f64;
    let p = ctx.p();
    let labels = BlockBasis::new(ctx).labels();
    let q = |e: f64| Complex64::from_polar(1.0, std::f64::consts::PI * e / kap);
    let polys = labels
        .par_iter()
        .map(|&n| macdonald_via_shift(&FormalQ, n - p - 1, p + 1))
        .collect::<Result<Vec<_>>>()?;
    let qc = q(1.0);
    let pre = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4) / (2.0 * kap).sqrt();
    let s = ComplexMatrix::from_fn(labels.len(), labels.len(), |i, j| {
        let (m, n) = (labels[i], labels[j]);
        let pv: Complex64 = polys[j]
            .as_laurent()
            .terms()
            .map(|(d, c)| c.eval_complex(qc) * q((m * d) as f64))
            .sum();
        let prod: Complex64 = (1..=p)
            .map(|l| q((-n + l) as f64) - q((n - l) as f64))
            .product();
        pre * q((p * (n - m)) as f64 - (p * (p + 1)) as f64 / 2.0)
            * (q(-m as f64) - q(m as f64))
            * prod
            * pv
    });
    let t = labels.iter().map(|&n| q((n * n) as f64 / 2.0)).collect();
    Ok((t, s))
}

fn mismatch(name: &str, anchor: &str, at: Option<(usize, usize)>, labels: &[i64]) -> CheckRecord {
    let mut r = CheckRecord::exact(name, anchor, at.is_none());
    if let Some((i, j)) = at {
        r.actual = format!("first mismatch at (m, n) = ({}, {})", labels[i], labels[j]);
    }
    r
}

/// Exact checks on `S'` plus floating-point phase checks on `S` and `ST`.
pub fn verify_relations(ctx: &QContext, data: &ModularData) -> Vec<CheckRecord> {
    const FLOAT_TOL: f64 = 1e-12;
    let labels = data.basis.labels();
    let dim = labels.len();
    let (kap, p) = (ctx.kappa(), ctx.p());
    let sign = if p % 2 == 0 { 1 } else { -1 };
    let t = ExactMatrix::diagonal(&data.t, ctx.order());
    let s2 = data.s_rescaled.pow(2);
    let want = ExactMatrix::scalar(dim, &(ctx.int(-2 * kap * sign) * ctx.q_pow(-p * (p + 1))));
    let st3 = (&data.s_rescaled * &t).pow(3);
    let lhs = st3.pow(2);
    let rhs = s2.pow(2).scale(&(ctx.int(2 * kap) * ctx.i()));
    let tag = |r: CheckRecord| r.param("kappa", kap).param("p", p);
    let mut out = vec![
        tag(mismatch(
            "s_squared",
            "S' squared equals -2 kappa (-1)^p q^{-p(p+1)} times the identity",
            s2.first_difference(&want),
            &labels,
        )),
        tag(mismatch(
            "st_cubed",
            "((S'T)^3)^2 equals 2 kappa i (S'^2)^2",
            lhs.first_difference(&rhs),
            &labels,
        )),
        tag(mismatch(
            "st_cubed_commutes",
            "(S'T)^3 commutes with S'^2",
            (&st3 * &s2).first_difference(&(&s2 * &st3)),
            &labels,
        )),
    ];
    let phase = ctx.int(sign) * ctx.i() * ctx.q_pow(-p * (p + 1));
    let phase = phase.to_complex();
    let sf = data.s.to_complex();
    let tf = t.to_complex();
    out.push(tag(CheckRecord::numeric(
        "s_squared_float",
        "S^2 equals (-1)^p i q^{-p(p+1)} on conformal blocks",
        sf.pow(2).distance_to_scalar(phase),
        FLOAT_TOL,
    )));
    out.push(tag(CheckRecord::numeric(
        "st_cubed_float",
        "(ST)^3 equals (-1)^p i q^{-p(p+1)} on conformal blocks",
        (&sf * &tf).pow(3).distance_to_scalar(phase),
        FLOAT_TOL,
    )));
    out
}

/// `∏_{j=1}^p (q^j + q^{-j})` at the context's `q`.
pub fn gauss_product(ctx: &QContext) -> CycloScalar {
    (1..=ctx.p()).fold(ctx.one(), |acc, j| acc * (ctx.q_pow(j) + ctx.q_pow(-j)))
}

/// Kirillov's `T̃` (diagonal), `S̃` and the conjugating diagonal `D`.
pub struct Kirillov {
    pub t: Vec<CycloScalar>,
    pub s: ExactMatrix,
    pub d: Vec<CycloScalar>,
}

pub fn kirillov_matrices(ctx: &QContext) -> Result<Kirillov> {
    let labels = BlockBasis::new(ctx).labels();
    let p = ctx.p();
    let pm = macdonald_grid(ctx)?;
    let pre = ctx.i() * inv_sqrt_two_kappa(ctx)? * ctx.q_half_pow(-p * (p + 1));
    let s = ExactMatrix::from_fn(labels.len(), labels.len(), |i, j| {
        &pre * &q_diff_product(ctx, labels[i], 0) * pm.get(i, j)
    });
    let t = labels
        .iter()
        .map(|&n| ctx.eighth_root_pow(-1) * ctx.q_half_pow(n * n))
        .collect();
    let d = labels
        .iter()
        .map(|&j| ctx.q_pow(p * j) * q_diff_product(ctx, j, 1))
        .collect();
    Ok(Kirillov { t, s, d })
}

/// Conjugation identities between the block-basis matrices and Kirillov's.
pub fn kirillov_compare(ctx: &QContext, data: &ModularData) -> Result<Vec<CheckRecord>> {
    let labels = data.basis.labels();
    let dim = labels.len();
    let k = kirillov_matrices(ctx)?;
    let dinv = k.d.iter().map(|x| x.inv()).collect::<Result<Vec<_>>>()?;
    let conj_s = ExactMatrix::from_fn(dim, dim, |i, j| &dinv[i] * k.s.get(i, j) * &k.d[j]);
    let conj_t: Vec<CycloScalar> = (0..dim).map(|i| &dinv[i] * &k.t[i] * &k.d[i]).collect();
    let e = |j| ctx.eighth_root_pow(j);
    let t_lhs = ExactMatrix::diagonal(&data.t, ctx.order());
    let t_rhs = ExactMatrix::diagonal(&conj_t, ctx.order()).scale(&e(1));
    let s_rhs = conj_s.scale(&e(-3));
    let t_hat = t_lhs.scale(&e(-1));
    let s_hat = data.s.scale(&e(3));
    let tag = |r: CheckRecord| r.param("kappa", ctx.kappa()).param("p", ctx.p());
    Ok(vec![
        tag(mismatch(
            "kirillov_t",
            "T = e^{pi i/4} D^{-1} T~ D",
            t_lhs.first_difference(&t_rhs),
            &labels,
        )),
        tag(mismatch(
            "kirillov_s",
            "S = e^{-3 pi i/4} D^{-1} S~ D",
            data.s.first_difference(&s_rhs),
            &labels,
        )),
        tag(mismatch(
            "hatted_t",
            "T^ = e^{-pi i/4} T is conjugate to T~ by D",
            t_hat.first_difference(&ExactMatrix::diagonal(&conj_t, ctx.order())),
            &labels,
        )),
        tag(mismatch(
            "hatted_s",
            "S^ = e^{3 pi i/4} S is conjugate to S~ by D",
            s_hat.first_difference(&conj_s),
            &labels,
        )),
        tag(mismatch(
            "kirillov_s_symmetric",
            "probe: S~ equals its transpose",
            k.s.first_difference(&k.s.transpose()),
            &labels,
        ))
        .with_basis(Basis::Empirical),
    ])
}
