use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integral::{u_block, IntegralSpec};
use super::theta::{rho_prime, sigma_lambda, theta1, theta_level, weierstrass_e, EllipticContext};
use crate::error::{Error, Result};
use crate::modular::s_matrix;
use crate::qcore::QContext;
use crate::report::{Basis, CheckRecord};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const PERIODICITY_TOL: f64 = 1e-8;
pub const PROPERTY_II_TOL: f64 = 1e-6;
pub const PARITY_TOL: f64 = 1e-12;
pub const VANISHING_ORDER_TOL: f64 = 0.05;
pub const STOKES_TOL_P1: f64 = 1e-6;
pub const STOKES_TOL_P2: f64 = 1e-4;
pub const STOKES_ABS_TOL: f64 = 1e-8;
pub const VANISHING_TOL: f64 = 1e-8;
pub const S_TRANSFORM_TOL: f64 = 1e-4;
pub const T_TOL: f64 = 1e-8;
pub const PROPORTIONALITY_TOL: f64 = 1e-6;

fn q_pow(kappa: i64, x: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * x / kappa as f64)
}

fn bracket(kappa: i64, m: i64) -> Complex64 {
    let q = |x: f64| q_pow(kappa, x);
    (q(m as f64) - q(-m as f64)) / (q(1.0) - q(-1.0))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn tagged(r: CheckRecord, spec: &IntegralSpec, ectx: &EllipticContext) -> CheckRecord {
    r.param("kappa", spec.kappa)
        .param("p", spec.p as i64)
        .param("k", spec.k as i64)
        .param("n", spec.n)
        .param("lambda", format!("{}", spec.lambda))
        .param("tau", format!("{}", ectx.tau()))
        .param("level", spec.quadrature.level)
}

/// Finite-difference residual of the KZB heat equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KzbResidual {
    /// `|2πiκ ∂_τ u - ∂²_λ u - p(p+1) ρ'(λ) u|` over the largest stencil `|u|`.
    pub residual: f64,
    /// Quadrature errors propagated through the difference quotients, same scale.
    pub quadrature_error: f64,
    pub scale: f64,
}

/// Central differences at steps `h` and `h/2`, combined by one Richardson
/// step. `u` is holomorphic in `τ`, so `∂_τ` is taken along `±i h`, which
/// keeps the stencil on the imaginary axis when `τ` is.
pub fn kzb_residual(
    spec: &IntegralSpec,
    ectx: &EllipticContext,
    h_lambda: f64,
    h_tau: f64,
) -> Result<KzbResidual> {
    let lam = spec.lambda;
    let tau = ectx.tau();
    let at = |dl: f64, dt: f64| -> Result<(Complex64, f64)> {
        let e = if dt == 0.0 { ectx.clone() } else { ectx.with_tau(tau + I * dt)? };
        let b = u_block(&spec.with_lambda(lam + dl), &e)?;
        Ok((b.value, b.error))
    };
    let (u0, e0) = at(0.0, 0.0)?;
    let mut scale = u0.norm();
    let mut max_err = e0;
    let mut residual_at = |hl: f64, ht: f64| -> Result<Complex64> {
        let (up, ep) = at(hl, 0.0)?;
        let (um, em) = at(-hl, 0.0)?;
        let (tp, etp) = at(0.0, ht)?;
        let (tm, etm) = at(0.0, -ht)?;
        for (v, e) in [(up, ep), (um, em), (tp, etp), (tm, etm)] {
            scale = scale.max(v.norm());
            max_err = max_err.max(e);
        }
        let dt = (tp - tm) / (2.0 * I * ht);
        let dll = (up - 2.0 * u0 + um) / (hl * hl);
        let pp = (spec.p * (spec.p + 1)) as f64;
        Ok(2.0 * PI * I * spec.kappa as f64 * dt - dll - pp * rho_prime(lam, ectx)? * u0)
    };
    let r1 = residual_at(h_lambda, h_tau)?;
    let r2 = residual_at(h_lambda / 2.0, h_tau / 2.0)?;
    let r = (4.0 * r2 - r1) / 3.0;
    // error ε in u enters r(h/2) as ≤ 16ε/h² + 2πκ·ε/h, and r(h) with a quarter of that
    let h = h_lambda.min(h_tau);
    let amp = (16.0 / (h * h) + 4.0 * PI * spec.kappa as f64 / h) * (4.0 + 0.25) / 3.0;
    Ok(KzbResidual {
        residual: r.norm() / scale,
        quadrature_error: amp * max_err / scale,
        scale,
    })
}

pub fn kzb_check(spec: &IntegralSpec, ectx: &EllipticContext, h: f64, tol: f64) -> Result<CheckRecord> {
    let r = kzb_residual(spec, ectx, h, h)?;
    Ok(tagged(
        CheckRecord::numeric("kzb_residual", "KZB heat equation for the integral blocks", r.residual, tol),
        spec,
        ectx,
    )
    .param("h", h)
    .param("quadrature_error", r.quadrature_error))
}

/// Properties (i) to (iv) of conformal blocks for one block.
pub fn property_checks(spec: &IntegralSpec, ectx: &EllipticContext) -> Result<Vec<CheckRecord>> {
    let p = spec.p as i32;
    let lam = spec.lambda;
    let tau = ectx.tau();
    let u = |l: Complex64| u_block(&spec.with_lambda(l), ectx).map(|b| b.value);
    let u0 = u(lam)?;
    let mut out = Vec::new();

    let r = rel(u(lam + 2.0)?, u0);
    out.push(CheckRecord::numeric("periodicity", "u(λ+2, τ) = u(λ, τ)", r, PERIODICITY_TOL));

    let kap = spec.kappa as f64;
    let shifted = u(lam + 2.0 * tau)? * (2.0 * PI * I * kap * (lam + tau)).exp();
    let r = rel(shifted, u0);
    out.push(CheckRecord::numeric(
        "quasi_periodicity",
        "u(λ+2τ, τ) e^{2πiκ(λ+τ)} = u(λ, τ)",
        r,
        PROPERTY_II_TOL,
    ));

    let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
    let r = rel(u(-lam)?, sign * u0);
    out.push(CheckRecord::numeric("parity", "u(-λ) = (-1)^{p+1} u(λ)", r, PARITY_TOL));

    // |u(λ)|/|λ|^{p+1} along λ = 10^{-j} e^{iφ}
    let dir = Complex64::from_polar(1.0, 0.3);
    let ratios: Vec<f64> = (1..=3)
        .map(|j| {
            let l = dir * 10f64.powi(-j);
            u(l).map(|v| v.norm() / l.norm().powi(p + 1))
        })
        .collect::<Result<_>>()?;
    let drift = (ratios[2] - ratios[1]).abs() / ratios[2];
    out.push(
        CheckRecord::numeric(
            "zero_order_at_origin",
            "u(λ) vanishes to order p+1 at λ = 0",
            drift,
            VANISHING_ORDER_TOL,
        )
        .param("ratios", ratios),
    );
    Ok(out.into_iter().map(|r| tagged(r, spec, ectx)).collect())
}

/// `[p-k](q^{n+p-k} - q^{-n-p+k}) u^{[k]}_n
///  = q^{-n-k-1}[k+1](q^{-2(k+1)} u^{[k+1]}_{n+2} - u^{[k+1]}_n)`.
///
/// When both sides are negligible against the basis blocks `u^{[k+1]}_m`
/// the comparison is absolute.
pub fn stokes_check(base: &IntegralSpec, ectx: &EllipticContext, k: usize, n: i64) -> Result<CheckRecord> {
    let p = base.p;
    if k >= p {
        return Err(Error::Invalid(format!("Stokes relation needs k < p, got k={k} p={p}")));
    }
    let kap = base.kappa;
    let (pi, ki) = (p as i64, k as i64);
    let q = |x: i64| q_pow(kap, x as f64);
    let u = |kk: usize, nn: i64| u_block(&base.with_k(kk).with_n(nn), ectx).map(|b| b.value);
    let lhs = bracket(kap, pi - ki) * (q(n + pi - ki) - q(-n - pi + ki)) * u(k, n)?;
    let rhs = q(-n - ki - 1) * bracket(kap, ki + 1) * (q(-2 * (ki + 1)) * u(k + 1, n + 2)? - u(k + 1, n)?);
    let tol = if p == 1 { STOKES_TOL_P1 } else { STOKES_TOL_P2 };
    let big = lhs.norm().max(rhs.norm());
    let basis_scale = basis_norm(&base.with_k(k + 1), ectx)?;
    let spec = base.with_k(k).with_n(n);
    let rec = if big < 1e-6 * basis_scale {
        CheckRecord::numeric(
            "stokes",
            "Stokes relation between u^[k] and u^[k+1] (both sides negligible)",
            (lhs - rhs).norm() / basis_scale,
            STOKES_ABS_TOL,
        )
    } else {
        CheckRecord::numeric("stokes", "Stokes relation between u^[k] and u^[k+1]", rel(lhs, rhs), tol)
    };
    Ok(tagged(rec, &spec, ectx)
        .param("lhs", format!("{lhs}"))
        .param("rhs", format!("{rhs}")))
}

/// `max_n |u^{[k]}_n|` over the basis labels `p+1 ≤ n ≤ κ-p-1`.
pub fn basis_norm(spec: &IntegralSpec, ectx: &EllipticContext) -> Result<f64> {
    let p = spec.p as i64;
    let mut m = 0.0f64;
    for n in p + 1..=spec.kappa - p - 1 {
        m = m.max(u_block(&spec.with_n(n), ectx)?.value.norm());
    }
    Ok(m)
}

/// Labels `n ∈ {-p, …, -p+2k} ∪ {κ-p, …, κ-p+2k}` at which `u^{[k]}_n = 0`.
pub fn vanishing_labels(kappa: i64, p: usize, k: usize) -> Vec<i64> {
    let (p, k) = (p as i64, k as i64);
    (-p..=-p + 2 * k).chain(kappa - p..=kappa - p + 2 * k).collect()
}

pub fn vanishing_check(base: &IntegralSpec, ectx: &EllipticContext) -> Result<Vec<CheckRecord>> {
    let scale = basis_norm(base, ectx)?;
    vanishing_labels(base.kappa, base.p, base.k)
        .into_iter()
        .map(|n| {
            let spec = base.with_n(n);
            let v = u_block(&spec, ectx)?.value.norm();
            Ok(tagged(
                CheckRecord::numeric("vanishing", "u^[k]_n = 0 on the vanishing labels", v / scale, VANISHING_TOL),
                &spec,
                ectx,
            )
            .param("basis_norm", scale))
        })
        .collect()
}

/// `(Su)(λ,τ) = e^{-πiκλ²/2τ} τ^{-1/2-p(p+1)/κ} u(λ/τ, -1/τ)` by direct quadrature.
pub fn s_transformed(spec: &IntegralSpec, ectx: &EllipticContext) -> Result<Complex64> {
    let tau = ectx.tau();
    let lam = spec.lambda;
    let kap = spec.kappa as f64;
    let p = spec.p as f64;
    let es = ectx.with_tau(-1.0 / tau)?;
    let v = u_block(&spec.with_lambda(lam / tau), &es)?.value;
    // principal powers: arg τ ∈ (0, π)
    let pre = (-PI * I * kap * lam * lam / (2.0 * tau)).exp() * tau.powc(Complex64::from(-0.5 - p * (p + 1.0) / kap));
    Ok(pre * v)
}

/// Compares `S u^{[p]}_n` with `Σ_m s_{m,n} u^{[p]}_m` (exact `S`) and with
/// `e^{-πi/4}/√(2κ) Σ_{m mod 2κ} q^{-mn} u^{[0]}_m`.
pub fn s_transform_check(base: &IntegralSpec, ectx: &EllipticContext, n: i64) -> Result<Vec<CheckRecord>> {
    let p = base.p;
    let kap = base.kappa;
    let ctx = QContext::new(kap, p as i64)?;
    let data = s_matrix(&ctx)?;
    let labels = data.basis.labels();
    let col = labels
        .iter()
        .position(|&m| m == n)
        .ok_or_else(|| Error::Range(format!("n={n} is not a basis label {labels:?}")))?;
    let spec = base.with_k(p).with_n(n);
    let direct = s_transformed(&spec, ectx)?;
    let mut combo = Complex64::new(0.0, 0.0);
    for (row, &m) in labels.iter().enumerate() {
        combo += data.s.get(row, col).to_complex() * u_block(&spec.with_n(m), ectx)?.value;
    }
    let pre = Complex64::from_polar(1.0, -PI / 4.0) / (2.0 * kap as f64).sqrt();
    let mut lemma = Complex64::new(0.0, 0.0);
    for m in 0..2 * kap {
        lemma += q_pow(kap, -(m * n) as f64) * u_block(&spec.with_k(0).with_n(m), ectx)?.value;
    }
    lemma *= pre;
    Ok(vec![
        tagged(
            CheckRecord::numeric("s_transform", "S u_n = Σ_m s_{m,n} u_m with the exact S matrix", rel(direct, combo), S_TRANSFORM_TOL),
            &spec,
            ectx,
        )
        .param("direct", format!("{direct}"))
        .param("combination", format!("{combo}")),
        tagged(
            CheckRecord::numeric(
                "s_transform_theta_expansion",
                "S u^[p]_n as a Fourier sum over u^[0]_m",
                rel(direct, lemma),
                S_TRANSFORM_TOL,
            ),
            &spec,
            ectx,
        )
        .param("expansion", format!("{lemma}")),
    ])
}

/// `u^{[p]}_n(λ, τ+1) = q^{n²/2} u^{[p]}_n(λ, τ)`.
pub fn t_check(base: &IntegralSpec, ectx: &EllipticContext, n: i64) -> Result<CheckRecord> {
    let spec = base.with_k(base.p).with_n(n);
    let a = u_block(&spec, &ectx.with_tau(ectx.tau() + 1.0)?)?.value;
    let b = u_block(&spec, ectx)?.value;
    let want = q_pow(spec.kappa, (n * n) as f64 / 2.0) * b;
    Ok(tagged(
        CheckRecord::numeric("t_transform", "u(λ, τ+1) = q^{n²/2} u(λ, τ)", rel(a, want), T_TOL),
        &spec,
        ectx,
    ))
}

/// At `κ = 2p+2` the single block `u^{[p]}_{p+1}` is a multiple of `ϑ₁(λ)^{p+1}`.
pub fn theta_proportionality(base: &IntegralSpec, ectx: &EllipticContext) -> Result<CheckRecord> {
    let p = base.p;
    if base.kappa != 2 * p as i64 + 2 {
        return Err(Error::Invalid(format!("needs kappa = 2p+2, got kappa={} p={p}", base.kappa)));
    }
    let spec = base.with_k(p).with_n(p as i64 + 1);
    let ratios: Vec<Complex64> = (0..20)
        .map(|j| {
            let lam = Complex64::new(0.1 + 0.04 * j as f64, 0.07);
            let v = u_block(&spec.with_lambda(lam), ectx)?.value;
            Ok(v / theta1(lam, ectx).powi(p as i32 + 1))
        })
        .collect::<Result<_>>()?;
    let drift = ratios.iter().map(|r| (r - ratios[0]).norm()).fold(0.0, f64::max) / ratios[0].norm();
    Ok(tagged(
        CheckRecord::numeric(
            "theta_proportionality",
            "u^[p]_{p+1} / ϑ₁(λ)^{p+1} is independent of λ at κ = 2p+2",
            drift,
            PROPORTIONALITY_TOL,
        ),
        &spec,
        ectx,
    )
    .param("ratio", format!("{}", ratios[0])))
}

/// Deterministic points `(x, y)` in `[-1,1] × [-h,h]` from a Weyl sequence.
fn sample_points(count: usize, h: f64) -> Vec<Complex64> {
    let (a, b) = (0.618_033_988_749_894_9, 0.754_877_666_246_692_7);
    (1..=count)
        .map(|i| {
            let x = (i as f64 * a).fract();
            let y = (i as f64 * b).fract();
            Complex64::new(2.0 * x - 1.0, h * (2.0 * y - 1.0))
        })
        .collect()
}

/// Quasi-periodicity and modular laws of `ϑ₁`, `E`, `σ_λ` and `θ_{κ,n}`.
pub fn theta_checks(ectx: &EllipticContext) -> Result<Vec<CheckRecord>> {
    let tau = ectx.tau();
    let kappa = ectx.kappa();
    let k = kappa as f64;
    let e1 = ectx.with_tau(tau + 1.0)?;
    let es = ectx.with_tau(-1.0 / tau)?;
    let pts = sample_points(50, 0.4);
    let lams = sample_points(57, 0.3).split_off(7);
    let worst = |f: &dyn Fn(Complex64, Complex64) -> Result<(Complex64, Complex64)>| -> Result<f64> {
        let mut m = 0.0f64;
        for (t, l) in pts.iter().zip(&lams) {
            let (a, b) = f(*t, *l)?;
            m = m.max((a - b).norm() / (1.0 + b.norm()));
        }
        Ok(m)
    };
    let mut out = Vec::new();
    let mut push = |name: &str, anchor: &str, r: f64, tol: f64| {
        out.push(
            CheckRecord::numeric(name, anchor, r, tol)
                .param("tau", format!("{tau}"))
                .param("kappa", kappa),
        )
    };
    let r = worst(&|t, _| {
        Ok((theta1(t, &e1), Complex64::from_polar(1.0, PI / 4.0) * theta1(t, ectx)))
    })?;
    push("theta1_t_law", "ϑ₁(t, τ+1) = e^{πi/4} ϑ₁(t, τ)", r, 1e-12);
    let r = worst(&|t, _| {
        let want = (-I * tau).sqrt() / I * (I * PI * t * t / tau).exp() * theta1(t, ectx);
        Ok((theta1(t / tau, &es), want))
    })?;
    push("theta1_s_law", "ϑ₁(t/τ, -1/τ) = -i √(-iτ) e^{πit²/τ} ϑ₁(t, τ)", r, 1e-10);
    let r = worst(&|t, _| Ok((weierstrass_e(t + 1.0, ectx), -weierstrass_e(t, ectx))))?;
    push("e_period_1", "E(t+1) = -E(t)", r, 1e-12);
    let r = worst(&|t, _| {
        let want = -(-I * PI * tau - 2.0 * PI * I * t).exp() * weierstrass_e(t, ectx);
        Ok((weierstrass_e(t + tau, ectx), want))
    })?;
    push("e_period_tau", "E(t+τ) = -e^{-πiτ-2πit} E(t)", r, 1e-12);
    let r = worst(&|t, l| Ok((sigma_lambda(l, t + 1.0, ectx)?, sigma_lambda(l, t, ectx)?)))?;
    push("sigma_period_1", "σ_λ(t+1) = σ_λ(t)", r, 1e-12);
    let r = worst(&|t, l| {
        Ok((sigma_lambda(l, t + tau, ectx)?, (2.0 * PI * I * l).exp() * sigma_lambda(l, t, ectx)?))
    })?;
    push("sigma_period_tau", "σ_λ(t+τ) = e^{2πiλ} σ_λ(t)", r, 1e-12);
    let r = worst(&|t, _| {
        Ok((weierstrass_e(t / tau, &es), (I * PI * t * t / tau).exp() / tau * weierstrass_e(t, ectx)))
    })?;
    push("e_s_law", "E(t/τ, -1/τ) = e^{πit²/τ} E(t, τ)/τ", r, 1e-8);
    let r = worst(&|t, l| {
        let want = tau * (-2.0 * PI * I * t * l / tau).exp() * sigma_lambda(l, t, ectx)?;
        Ok((sigma_lambda(l / tau, t / tau, &es)?, want))
    })?;
    push("sigma_s_law", "σ_{λ/τ}(t/τ, -1/τ) = τ e^{-2πitλ/τ} σ_λ(t, τ)", r, 1e-8);

    let ns: Vec<i64> = (0..50).map(|i| (i * 7) % (4 * kappa) - 2 * kappa).collect();
    let worst_n = |f: &dyn Fn(i64, Complex64) -> (Complex64, Complex64)| -> f64 {
        pts.iter()
            .zip(&ns)
            .map(|(t, &n)| {
                let (a, b) = f(n, *t);
                (a - b).norm() / (1.0 + b.norm())
            })
            .fold(0.0, f64::max)
    };
    let q = |x: f64| q_pow(kappa, x);
    let r = worst_n(&|n, t| (theta_level(n + 2 * kappa, t, ectx), theta_level(n, t, ectx)));
    push("level_theta_period_n", "θ_{κ,n+2κ} = θ_{κ,n}", r, 1e-14);
    let r = worst_n(&|n, t| (theta_level(n, -t, ectx), theta_level(-n, t, ectx)));
    push("level_theta_reflection", "θ_{κ,n}(-t) = θ_{κ,-n}(t)", r, 1e-14);
    let r = worst_n(&|n, t| (theta_level(n, t + 2.0 / k, ectx), q(2.0 * n as f64) * theta_level(n, t, ectx)));
    push("level_theta_shift_real", "θ_{κ,n}(t+2/κ) = q^{2n} θ_{κ,n}(t)", r, 1e-12);
    let r = worst_n(&|n, t| {
        let want = (-2.0 * PI * I * t - 2.0 * PI * I * tau / k).exp() * theta_level(n + 2, t, ectx);
        (theta_level(n, t + 2.0 * tau / k, ectx), want)
    });
    push(
        "level_theta_shift_tau",
        "θ_{κ,n}(t+2τ/κ) = e^{-2πit-2πiτ/κ} θ_{κ,n+2}(t)",
        r,
        1e-12,
    );
    let r = worst_n(&|n, t| (theta_level(n, t, &e1), q((n * n) as f64 / 2.0) * theta_level(n, t, ectx)));
    push("level_theta_t_law", "θ_{κ,n}(t, τ+1) = q^{n²/2} θ_{κ,n}(t, τ)", r, 1e-12);
    let r = worst_n(&|n, t| {
        let pre = (-I * tau / (2.0 * k)).sqrt() * (I * PI * k * t * t / (2.0 * tau)).exp();
        let sum: Complex64 = (0..2 * kappa).map(|m| q(-(m * n) as f64) * theta_level(m, t, ectx)).sum();
        (theta_level(n, t / tau, &es), pre * sum)
    });
    push(
        "level_theta_s_law",
        "θ_{κ,n}(t/τ, -1/τ) = √(-iτ/2κ) e^{πiκt²/2τ} Σ_m q^{-mn} θ_{κ,m}(t, τ)",
        r,
        1e-8,
    );
    Ok(out)
}

/// Marks a record as an observed property rather than a proved identity.
pub fn empirical(r: CheckRecord) -> CheckRecord {
    r.with_basis(Basis::Empirical)
}
