use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::branch::SegmentLog;
use super::quadrature::{PowerRule, Quadrature, Sums};
use super::theta::{theta1, theta_level, weierstrass_e, EllipticContext};
use crate::error::{Error, Result};

/// One evaluation of `u^{[k]}_n(λ,τ)` at level `κ` with `p` integration variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub kappa: i64,
    pub p: usize,
    pub k: usize,
    pub n: i64,
    pub lambda: Complex64,
    pub quadrature: Quadrature,
}

impl IntegralSpec {
    pub fn new(kappa: i64, p: usize, k: usize, n: i64, lambda: Complex64) -> Self {
        IntegralSpec {
            kappa,
            p,
            k,
            n,
            lambda,
            quadrature: Quadrature::for_dimension(p as i64),
        }
    }

    pub fn with_n(self, n: i64) -> Self {
        IntegralSpec { n, ..self }
    }

    pub fn with_k(self, k: usize) -> Self {
        IntegralSpec { k, ..self }
    }

    pub fn with_lambda(self, lambda: Complex64) -> Self {
        IntegralSpec { lambda, ..self }
    }

    pub fn with_quadrature(self, quadrature: Quadrature) -> Self {
        IntegralSpec { quadrature, ..self }
    }

    pub fn validate(&self, ectx: &EllipticContext) -> Result<()> {
        if self.p > 2 {
            return Err(Error::Invalid(format!("integrals are implemented for p <= 2, got {}", self.p)));
        }
        if self.k > self.p {
            return Err(Error::Invalid(format!("need k <= p, got k={} p={}", self.k, self.p)));
        }
        if self.kappa < 2 * self.p as i64 + 2 {
            return Err(Error::Invalid(format!(
                "need kappa >= 2p+2, got kappa={} p={}",
                self.kappa, self.p
            )));
        }
        if self.kappa != ectx.kappa() {
            return Err(Error::Invalid(format!(
                "spec has kappa={} but the elliptic context has kappa={}",
                self.kappa,
                ectx.kappa()
            )));
        }
        if self.p == 2 && !ectx.on_imaginary_axis() {
            return Err(Error::Branch(format!(
                "two-dimensional integrals are implemented on the imaginary tau axis only, got {}",
                ectx.tau()
            )));
        }
        self.quadrature.validate()
    }
}

/// A block value with the fine-minus-coarse quadrature estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockValue {
    pub value: Complex64,
    pub error: f64,
}

/// A factor `E(c·s)^e` of the integrand, `c·s` linear in the simplex coordinates.
#[derive(Clone, Debug)]
struct Factor {
    coeffs: Vec<Complex64>,
    exponent: f64,
}

impl Factor {
    fn at(&self, s: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(s).map(|(c, x)| c * x).sum()
    }

    fn at_real(&self, s: &[f64]) -> Complex64 {
        self.coeffs.iter().zip(s).map(|(c, x)| c * x).sum()
    }
}

/// A sector `x = V + u((1-v) d_M + v d_C)`, `u, v ∈ [0,1]`, around the vertex
/// `V` of the domain, with `E`-factors vanishing at `V` (`α`) and along the
/// edge direction `d_M` (`β`) pulled out as `u^A v^B`.
#[derive(Clone, Debug)]
struct Piece {
    vertex: Vec<f64>,
    dm: Vec<f64>,
    dc: Vec<f64>,
    jacobian: f64,
    alpha: Vec<bool>,
    beta: Vec<bool>,
    a: f64,
    b: f64,
}

impl Piece {
    fn point(&self, u: Complex64, v: Complex64) -> Vec<Complex64> {
        (0..self.vertex.len())
            .map(|i| self.vertex[i] + u * ((1.0 - v) * self.dm[i] + v * self.dc[i]))
            .collect()
    }

    fn real_point(&self, u: f64, v: f64) -> Vec<f64> {
        (0..self.vertex.len())
            .map(|i| self.vertex[i] + u * ((1.0 - v) * self.dm[i] + v * self.dc[i]))
            .collect()
    }
}

fn pieces(p: usize, k: usize, factors: &[Factor], ectx: &EllipticContext) -> Vec<Piece> {
    let (verts, centre): (Vec<Vec<f64>>, Vec<f64>) = match p {
        1 => (vec![vec![0.0], vec![1.0]], vec![0.5]),
        _ if k == 1 => (
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            vec![0.5, 0.5],
        ),
        // 0 <= s2 <= s1 <= 1
        _ => (
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            vec![2.0 / 3.0, 1.0 / 3.0],
        ),
    };
    let sub = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>();
    let mut out = Vec::new();
    let mut add = |v: &Vec<f64>, m: Vec<f64>| {
        let dm = sub(&m, v);
        let dc = sub(&centre, v);
        let jacobian = if p == 1 { dm[0].abs() } else { (dm[0] * dc[1] - dm[1] * dc[0]).abs() };
        let alpha: Vec<bool> = factors.iter().map(|f| ectx.is_lattice_point(f.at_real(v))).collect();
        let beta: Vec<bool> = factors
            .iter()
            .zip(&alpha)
            .map(|(f, &al)| p == 2 && al && f.at_real(&dm).norm() < 1e-14)
            .collect();
        let mut a = if p == 2 { 1.0 } else { 0.0 };
        let mut b = 0.0;
        for (i, f) in factors.iter().enumerate() {
            if alpha[i] {
                a += f.exponent;
            }
            if beta[i] {
                b += f.exponent;
            }
        }
        out.push(Piece {
            vertex: v.clone(),
            dm,
            dc,
            jacobian,
            alpha,
            beta,
            a,
            b,
        });
    };
    if p == 1 {
        for v in &verts {
            add(v, centre.clone());
        }
    } else {
        let nv = verts.len();
        for i in 0..nv {
            let (x, y) = (&verts[i], &verts[(i + 1) % nv]);
            let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
            add(x, mid.clone());
            add(y, mid);
        }
    }
    out
}

/// Reference logarithms of the `E`-factors at real points of the domain.
enum RefLog {
    Segment(SegmentLog),
    Principal,
}

impl RefLog {
    fn log(&self, s_r: &[f64], value: Complex64) -> Complex64 {
        match self {
            RefLog::Segment(t) => t.log_at(s_r[0], value),
            RefLog::Principal => value.ln(),
        }
    }
}

/// The `λ`-independent data of one `J^{[k]}` integral.
struct Integrand<'a> {
    spec: &'a IntegralSpec,
    ectx: &'a EllipticContext,
    omegas: Vec<Complex64>,
    factors: Vec<Factor>,
    reflog: RefLog,
}

impl<'a> Integrand<'a> {
    fn new(spec: &'a IntegralSpec, ectx: &'a EllipticContext) -> Result<Self> {
        let p = spec.p;
        let kap = spec.kappa as f64;
        let a = -2.0 * p as f64 / kap;
        let b = 2.0 / kap;
        let omegas: Vec<Complex64> = (0..p)
            .map(|j| if j < spec.k { Complex64::from(1.0) } else { ectx.tau() })
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        let mut factors = Vec::new();
        for j in 0..p {
            let mut c = vec![zero; p];
            c[j] = omegas[j];
            factors.push(Factor { coeffs: c, exponent: a - 1.0 });
        }
        if p == 2 {
            factors.push(Factor {
                coeffs: vec![omegas[0], -omegas[1]],
                exponent: b,
            });
        }
        let reflog = if p == 1 {
            RefLog::Segment(SegmentLog::new(omegas[0], ectx, 512)?)
        } else {
            RefLog::Principal
        };
        Ok(Integrand {
            spec,
            ectx,
            omegas,
            factors,
            reflog,
        })
    }

    /// The smooth part `f / (u^A v^B)` of the integrand on a piece.
    fn reduced(&self, piece: &Piece, lam: Complex64, th_lam: Complex64, u: Complex64, v: Complex64) -> Complex64 {
        let e = self.ectx;
        let (ur, vr) = (u.norm(), v.norm());
        let s = piece.point(u, v);
        let s_r = piece.real_point(ur, vr);
        let mut log_total = Complex64::new(0.0, 0.0);
        for (i, f) in self.factors.iter().enumerate() {
            let z = f.at(&s);
            let z_r = f.at_real(&s_r);
            let (ez, er) = (weierstrass_e(z, e), weierstrass_e(z_r, e));
            let mut mono = Complex64::new(1.0, 0.0);
            let mut mono_r = 1.0;
            if piece.alpha[i] {
                mono *= u;
                mono_r *= ur;
            }
            if piece.beta[i] {
                mono *= v;
                mono_r *= vr;
            }
            let log_r = self.reflog.log(&s_r, er) - mono_r.ln() + ((ez / mono) / (er / mono_r)).ln();
            log_total += f.exponent * log_r;
        }
        let mut val = log_total.exp() * piece.jacobian;
        let mut tsum = Complex64::new(0.0, 0.0);
        for (j, om) in self.omegas.iter().enumerate() {
            let t = om * s[j];
            tsum += t;
            val *= om * theta1(lam - t, e) / th_lam;
        }
        val * theta_level(self.spec.n, lam + 2.0 * tsum / self.spec.kappa as f64, e)
    }

    fn j_integral(&self, lam: Complex64) -> Result<Sums> {
        let e = self.ectx;
        if e.is_lattice_point(lam) {
            return Err(Error::Pole(format!("lambda = {lam} is a lattice point")));
        }
        let th_lam = theta1(lam, e);
        let q = &self.spec.quadrature;
        let one = PowerRule::new(0.0, q)?;
        let mut total = Sums::default();
        for piece in pieces(self.spec.p, self.spec.k, &self.factors, e) {
            let ru = PowerRule::new(piece.a, q)?;
            let rv = if self.spec.p == 2 { PowerRule::new(piece.b, q)? } else { one.clone() };
            let rows: Vec<Sums> = ru
                .nodes
                .par_iter()
                .enumerate()
                .map(|(i, &u)| {
                    let mut row = Sums::default();
                    if self.spec.p == 1 {
                        let h = self.reduced(&piece, lam, th_lam, u, Complex64::new(0.0, 0.0));
                        row.fine = ru.weights[i] * h;
                        row.coarse = ru.coarse[i] * h;
                        row.scale = row.fine.norm();
                        return row;
                    }
                    for (j, &v) in rv.nodes.iter().enumerate() {
                        let h = self.reduced(&piece, lam, th_lam, u, v);
                        let fine = ru.weights[i] * rv.weights[j] * h;
                        row.fine += fine;
                        row.coarse += ru.coarse[i] * rv.coarse[j] * h;
                        row.scale += fine.norm();
                    }
                    row
                })
                .collect();
            for r in rows {
                total.add(r);
            }
        }
        Ok(total)
    }
}

/// `J^{[k]}_{κ,n}(λ,τ)` with its refinement estimate.
///
/// The endpoint exponents lie below `-1`, so the integral is understood as
/// the analytic continuation in the exponents. Around each vertex the
/// vanishing factors are split off as `u^A v^B` and each power is integrated
/// by a small loop plus a segment.
pub fn j_integral(spec: &IntegralSpec, ectx: &EllipticContext) -> Result<BlockValue> {
    spec.validate(ectx)?;
    let sums = if spec.p == 0 {
        return Ok(BlockValue {
            value: theta_level(spec.n, spec.lambda, ectx),
            error: 0.0,
        });
    } else {
        Integrand::new(spec, ectx)?.j_integral(spec.lambda)?
    };
    finish(sums, spec)
}

fn finish(sums: Sums, spec: &IntegralSpec) -> Result<BlockValue> {
    let error = sums.error();
    if !sums.fine.is_finite() || error > spec.quadrature.tolerance * sums.scale.max(sums.fine.norm()) {
        return Err(Error::Convergence(format!(
            "quadrature estimate {error:.3e} exceeds {:.1e} x {:.3e} (kappa={} p={} k={} n={})",
            spec.quadrature.tolerance, sums.scale, spec.kappa, spec.p, spec.k, spec.n
        )));
    }
    Ok(BlockValue { value: sums.fine, error })
}

/// `u^{[k]}_n(λ,τ) = J(λ) + (-1)^{p+1} J(-λ)`.
pub fn u_block(spec: &IntegralSpec, ectx: &EllipticContext) -> Result<BlockValue> {
    spec.validate(ectx)?;
    let sign = if spec.p % 2 == 1 { 1.0 } else { -1.0 };
    if spec.p == 0 {
        let v = theta_level(spec.n, spec.lambda, ectx) - theta_level(spec.n, -spec.lambda, ectx);
        return Ok(BlockValue { value: v, error: 0.0 });
    }
    let integrand = Integrand::new(spec, ectx)?;
    let plus = integrand.j_integral(spec.lambda)?;
    let minus = integrand.j_integral(-spec.lambda)?;
    let mut sums = plus;
    sums.add(minus.scaled(Complex64::from(sign)));
    finish(sums, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::branch::phi_master;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reference_logs_match_master_function_branch() {
        // Π exp(e·log E) times Π E(t_j) must reproduce Φ at interior points
        for (tau, kappa, p, k, s) in [
            (c(0.0, 1.0), 5, 1, 1, vec![0.3]),
            (c(0.3, 1.0), 5, 1, 0, vec![0.6]),
            (c(-0.4, 0.8), 5, 1, 0, vec![0.2]),
            (c(0.0, 1.0), 8, 2, 1, vec![0.7, 0.4]),
            (c(0.0, 0.8), 8, 2, 1, vec![0.2, 0.9]),
            (c(0.0, 1.5), 8, 2, 0, vec![0.8, 0.3]),
            (c(0.0, 1.0), 8, 2, 2, vec![0.9, 0.1]),
        ] {
            let e = EllipticContext::new(tau, kappa).unwrap();
            let spec = IntegralSpec::new(kappa, p, k, 1, c(0.3, 0.1));
            let ig = Integrand::new(&spec, &e).unwrap();
            let mut prod = Complex64::new(1.0, 0.0);
            for (i, f) in ig.factors.iter().enumerate() {
                let z = f.at_real(&s);
                let ez = weierstrass_e(z, &e);
                prod *= (f.exponent * ig.reflog.log(&s, ez)).exp();
                if i < p {
                    prod *= ez;
                }
            }
            let want = phi_master(&s, &e, k).unwrap();
            assert!((prod - want).norm() < 1e-10 * want.norm(), "tau={tau} p={p} k={k}");
        }
    }

    #[test]
    fn p0_is_theta_difference() {
        let e = EllipticContext::new(c(0.0, 1.0), 4).unwrap();
        let spec = IntegralSpec::new(4, 0, 0, 1, c(0.2, 0.1));
        let u = u_block(&spec, &e).unwrap().value;
        let want = theta_level(1, c(0.2, 0.1), &e) - theta_level(1, c(-0.2, -0.1), &e);
        assert_eq!(u, want);
    }

    #[test]
    fn parity_is_built_in() {
        let e = EllipticContext::new(c(0.0, 1.0), 4).unwrap();
        let spec = IntegralSpec::new(4, 1, 1, 2, c(0.31, 0.07));
        let a = u_block(&spec, &e).unwrap().value;
        let b = u_block(&spec.with_lambda(-spec.lambda), &e).unwrap().value;
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn refinement_converges_at_p1() {
        let e = EllipticContext::new(c(0.0, 1.0), 5).unwrap();
        let spec = IntegralSpec::new(5, 1, 0, 2, c(0.31, 0.0));
        let fine = u_block(&spec, &e).unwrap();
        let finer = u_block(&spec.with_quadrature(spec.quadrature.with_level(7)), &e).unwrap();
        assert!((fine.value - finer.value).norm() < 1e-8 * finer.value.norm());
        assert!(fine.error < 1e-8 * fine.value.norm());
    }

    #[test]
    fn rejects_unsupported_specs() {
        let e = EllipticContext::new(c(0.3, 1.0), 8).unwrap();
        let spec = IntegralSpec::new(8, 2, 1, 3, c(0.3, 0.1));
        assert!(matches!(u_block(&spec, &e), Err(Error::Branch(_))));
        let spec = IntegralSpec::new(8, 3, 1, 3, c(0.3, 0.1));
        assert!(matches!(u_block(&spec, &e), Err(Error::Invalid(_))));
        let e4 = EllipticContext::new(c(0.0, 1.0), 4).unwrap();
        let spec = IntegralSpec::new(4, 1, 1, 2, c(1.0, 0.0));
        assert!(matches!(u_block(&spec, &e4), Err(Error::Pole(_))));
    }
}
