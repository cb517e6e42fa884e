use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `-ln(1e-18)`: series terms below `e^{-TAIL}` of the peak are dropped.
const TAIL: f64 = 41.45;

/// Modular parameter, level and theta-series truncation.
#[derive(Clone, Debug)]
pub struct EllipticContext {
    tau: Complex64,
    kappa: i64,
    cutoff: usize,
    theta1_prime0: Complex64,
}

impl EllipticContext {
    pub fn new(tau: Complex64, kappa: i64) -> Result<Self> {
        if tau.im.is_nan() || tau.im <= 0.0 || !tau.re.is_finite() {
            return Err(Error::Invalid(format!("need Im tau > 0, got {tau}")));
        }
        if kappa < 2 {
            return Err(Error::Invalid(format!("need kappa >= 2, got {kappa}")));
        }
        // e^{-π Im τ (J+1/2)²} < 1e-18
        let cutoff = ((TAIL / (PI * tau.im)).sqrt() - 0.5).ceil().max(1.0) as usize;
        let mut ctx = EllipticContext {
            tau,
            kappa,
            cutoff,
            theta1_prime0: Complex64::new(0.0, 0.0),
        };
        ctx.theta1_prime0 = ctx.theta1_derivs(Complex64::new(0.0, 0.0)).1;
        Ok(ctx)
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn kappa(&self) -> i64 {
        self.kappa
    }

    /// Number of terms kept on each side of the dominant term.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn with_tau(&self, tau: Complex64) -> Result<Self> {
        EllipticContext::new(tau, self.kappa)
    }

    /// True when `τ` lies on the imaginary axis, where every branch in the
    /// integrands is the principal one.
    pub fn on_imaginary_axis(&self) -> bool {
        self.tau.re.abs() <= 1e-14 * self.tau.im
    }

    /// `(ϑ₁, ϑ₁', ϑ₁'')` at `t`.
    pub fn theta1_derivs(&self, t: Complex64) -> (Complex64, Complex64, Complex64) {
        let y = self.tau.im;
        // |term| = exp(-π y c² - 2π c Im t), c = j + 1/2, peaks at c = -Im t / y
        let centre = (-t.im / y - 0.5).round() as i64;
        let w = self.cutoff as i64 + 1;
        let mut s = [Complex64::new(0.0, 0.0); 3];
        for j in centre - w..=centre + w {
            let c = j as f64 + 0.5;
            let term = (I * PI * c * c * self.tau + 2.0 * PI * I * c * (t + 0.5)).exp();
            let d = 2.0 * PI * I * c;
            s[0] += term;
            s[1] += d * term;
            s[2] += d * d * term;
        }
        (-s[0], -s[1], -s[2])
    }

    /// Decomposes `z = m + nτ + r` with integer `m, n`.
    pub fn lattice_reduce(&self, z: Complex64) -> (i64, i64, Complex64) {
        let n = (z.im / self.tau.im).round();
        let m = (z - n * self.tau).re.round();
        (m as i64, n as i64, z - m - n * self.tau)
    }

    pub fn is_lattice_point(&self, z: Complex64) -> bool {
        self.lattice_reduce(z).2.norm() < 1e-12
    }

    fn reject_lattice(&self, z: Complex64, what: &str) -> Result<()> {
        if self.is_lattice_point(z) {
            return Err(Error::Pole(format!("{what} = {z} is a lattice point")));
        }
        Ok(())
    }
}

/// `ϑ₁(t,τ) = -Σ_j e^{πi(j+1/2)²τ + 2πi(j+1/2)(t+1/2)}`.
pub fn theta1(t: Complex64, ectx: &EllipticContext) -> Complex64 {
    ectx.theta1_derivs(t).0
}

pub fn theta1_prime(t: Complex64, ectx: &EllipticContext) -> Complex64 {
    ectx.theta1_derivs(t).1
}

/// `ρ = ϑ₁'/ϑ₁`.
pub fn rho(t: Complex64, ectx: &EllipticContext) -> Result<Complex64> {
    ectx.reject_lattice(t, "t")?;
    let (f, d, _) = ectx.theta1_derivs(t);
    Ok(d / f)
}

/// `ρ' = (ϑ₁''ϑ₁ - ϑ₁'²)/ϑ₁²`.
pub fn rho_prime(t: Complex64, ectx: &EllipticContext) -> Result<Complex64> {
    ectx.reject_lattice(t, "t")?;
    let (f, d, dd) = ectx.theta1_derivs(t);
    Ok((dd * f - d * d) / (f * f))
}

/// `E(t,τ) = ϑ₁(t)/ϑ₁'(0)`.
pub fn weierstrass_e(t: Complex64, ectx: &EllipticContext) -> Complex64 {
    theta1(t, ectx) / ectx.theta1_prime0
}

/// `σ_λ(t,τ) = ϑ₁(λ-t)ϑ₁'(0)/(ϑ₁(λ)ϑ₁(t))`.
pub fn sigma_lambda(lam: Complex64, t: Complex64, ectx: &EllipticContext) -> Result<Complex64> {
    ectx.reject_lattice(lam, "lambda")?;
    ectx.reject_lattice(t, "t")?;
    Ok(theta1(lam - t, ectx) * ectx.theta1_prime0 / (theta1(lam, ectx) * theta1(t, ectx)))
}

/// `θ_{κ,n}(t,τ) = Σ_j e^{2πiκ(j+n/2κ)²τ + 2πiκ(j+n/2κ)t}` at the level of `ectx`.
pub fn theta_level(n: i64, t: Complex64, ectx: &EllipticContext) -> Complex64 {
    theta_level_at(ectx.kappa, n, t, ectx)
}

/// Same series at an explicit level.
pub fn theta_level_at(kappa: i64, n: i64, t: Complex64, ectx: &EllipticContext) -> Complex64 {
    let kap = kappa as f64;
    let y = ectx.tau.im;
    // n enters only through n mod 2κ
    let shift = n.rem_euclid(2 * kappa) as f64 / (2.0 * kap);
    // |term| = exp(-2πκ y c² - 2πκ c Im t), peaks at c = -Im t / 2y
    let centre = (-t.im / (2.0 * y) - shift).round() as i64;
    let w = ((TAIL / (2.0 * PI * kap * y)).sqrt().ceil() as i64).max(1) + 1;
    let mut s = Complex64::new(0.0, 0.0);
    for j in centre - w..=centre + w {
        let c = j as f64 + shift;
        s += (2.0 * PI * I * kap * (c * c * ectx.tau + c * t)).exp();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn taus() -> Vec<Complex64> {
        vec![c(0.0, 1.0), c(0.3, 1.0), c(-0.2, 0.7)]
    }

    #[test]
    fn theta1_is_odd_and_vanishes_at_zero() {
        let e = EllipticContext::new(c(0.0, 1.0), 4).unwrap();
        assert!(theta1(c(0.0, 0.0), &e).norm() < 1e-15);
        let t = c(0.23, -0.11);
        assert!(close(theta1(-t, &e), -theta1(t, &e), 1e-14));
    }

    #[test]
    fn theta1_modular_laws() {
        for tau in taus() {
            let e = EllipticContext::new(tau, 4).unwrap();
            let e1 = e.with_tau(tau + 1.0).unwrap();
            let es = e.with_tau(-1.0 / tau).unwrap();
            let t = c(0.31, 0.07);
            let phase = Complex64::from_polar(1.0, PI / 4.0);
            assert!(close(theta1(t, &e1), phase * theta1(t, &e), 1e-12));
            let root = (-I * tau).sqrt();
            let want = root / I * (I * PI * t * t / tau).exp() * theta1(t, &e);
            assert!(close(theta1(t / tau, &es), want, 1e-10));
        }
    }

    #[test]
    fn e_and_sigma_quasi_periodicity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for tau in taus() {
            let e = EllipticContext::new(tau, 5).unwrap();
            for _ in 0..50 {
                let t = c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
                let lam = c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.4..0.4));
                let et = weierstrass_e(t, &e);
                assert!(close(weierstrass_e(t + 1.0, &e), -et, 1e-12));
                let want = -(-I * PI * tau - 2.0 * PI * I * t).exp() * et;
                assert!(close(weierstrass_e(t + tau, &e), want, 1e-12));
                let s = sigma_lambda(lam, t, &e).unwrap();
                assert!(close(sigma_lambda(lam, t + 1.0, &e).unwrap(), s, 1e-12));
                let want = (2.0 * PI * I * lam).exp() * s;
                assert!(close(sigma_lambda(lam, t + tau, &e).unwrap(), want, 1e-12));
            }
        }
    }

    #[test]
    fn e_modular_laws() {
        for tau in taus() {
            let e = EllipticContext::new(tau, 4).unwrap();
            let e1 = e.with_tau(tau + 1.0).unwrap();
            let es = e.with_tau(-1.0 / tau).unwrap();
            let (t, lam) = (c(0.27, 0.05), c(0.41, -0.08));
            assert!(close(weierstrass_e(t, &e1), weierstrass_e(t, &e), 1e-12));
            let want = (I * PI * t * t / tau).exp() / tau * weierstrass_e(t, &e);
            assert!(close(weierstrass_e(t / tau, &es), want, 1e-10));
            let s = sigma_lambda(lam, t, &e).unwrap();
            assert!(close(sigma_lambda(lam, t, &e1).unwrap(), s, 1e-12));
            let want = tau * (-2.0 * PI * I * t * lam / tau).exp() * s;
            assert!(close(sigma_lambda(lam / tau, t / tau, &es).unwrap(), want, 1e-8));
        }
    }

    #[test]
    fn e_is_t_near_zero() {
        let e = EllipticContext::new(c(0.0, 1.0), 4).unwrap();
        let t = c(1e-4, 0.0);
        assert!((weierstrass_e(t, &e) / t - 1.0).norm() < 1e-7);
    }

    #[test]
    fn level_theta_laws() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for tau in taus() {
            let kap = 5;
            let e = EllipticContext::new(tau, kap).unwrap();
            let q = |x: f64| Complex64::from_polar(1.0, PI * x / kap as f64);
            for _ in 0..50 {
                let n = rng.gen_range(-12..12);
                let t = c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
                let th = theta_level(n, t, &e);
                assert!(close(theta_level(n + 2 * kap, t, &e), th, 1e-14));
                assert!(close(theta_level(n, -t, &e), theta_level(-n, t, &e), 1e-14));
                let k = kap as f64;
                assert!(close(theta_level(n, t + 2.0 / k, &e), q(2.0 * n as f64) * th, 1e-12));
                let want = (-2.0 * PI * I * t - 2.0 * PI * I * tau / k).exp() * theta_level(n + 2, t, &e);
                assert!(close(theta_level(n, t + 2.0 * tau / k, &e), want, 1e-12));
            }
        }
    }

    #[test]
    fn level_theta_modular_laws() {
        for tau in taus() {
            let kap = 4;
            let e = EllipticContext::new(tau, kap).unwrap();
            let e1 = e.with_tau(tau + 1.0).unwrap();
            let es = e.with_tau(-1.0 / tau).unwrap();
            let t = c(0.19, 0.06);
            let q = |x: f64| Complex64::from_polar(1.0, PI * x / kap as f64);
            for n in 0..2 * kap {
                let th = theta_level(n, t, &e);
                let nf = n as f64;
                assert!(close(theta_level(n, t, &e1), q(nf * nf / 2.0) * th, 1e-12));
                let k = kap as f64;
                let pre = (-I * tau / (2.0 * k)).sqrt() * (I * PI * k * t * t / (2.0 * tau)).exp();
                let sum: Complex64 = (0..2 * kap)
                    .map(|m| q(-(m * n) as f64) * theta_level(m, t, &e))
                    .sum();
                assert!(close(theta_level(n, t / tau, &es), pre * sum, 1e-8));
            }
        }
    }

    #[test]
    fn rho_prime_matches_difference_quotient() {
        let e = EllipticContext::new(c(0.3, 1.0), 4).unwrap();
        let t = c(0.31, 0.07);
        let h = 1e-5;
        let fd = (rho(t + h, &e).unwrap() - rho(t - h, &e).unwrap()) / (2.0 * h);
        assert!(close(rho_prime(t, &e).unwrap(), fd, 1e-8));
        assert!(matches!(rho(c(1.0, 0.0), &e), Err(Error::Pole(_))));
    }

    #[test]
    fn large_imaginary_arguments_stay_accurate() {
        let e = EllipticContext::new(c(0.0, 1.0), 4).unwrap();
        let t = c(0.2, 0.3);
        let tau = e.tau();
        let want = -(-I * PI * tau - 2.0 * PI * I * t).exp();
        let shifted = weierstrass_e(t + 2.0 * tau, &e) / weierstrass_e(t + tau, &e);
        let want2 = -(-I * PI * tau - 2.0 * PI * I * (t + tau)).exp();
        assert!(close(shifted, want2, 1e-12));
        assert!(close(weierstrass_e(t + tau, &e) / weierstrass_e(t, &e), want, 1e-12));
    }
}
