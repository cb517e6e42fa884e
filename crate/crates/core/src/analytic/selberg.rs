use crate::error::{Error, Result};

fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.round() {
        return Err(Error::Pole(format!("Gamma({x})")));
    }
    Ok(libm::tgamma(x))
}

/// `B_p(α,β,γ) = (1/p!) ∏_{j<p} Γ(1+γ+jγ)Γ(α+jγ)Γ(β+jγ) / (Γ(1+γ)Γ(α+β+(p+j-1)γ))`.
pub fn selberg(p: u32, alpha: f64, beta: f64, gamma_: f64) -> Result<f64> {
    let mut v = 1.0;
    for j in 0..p {
        let jf = j as f64;
        v *= gamma(1.0 + gamma_ + jf * gamma_)? * gamma(alpha + jf * gamma_)? * gamma(beta + jf * gamma_)?;
        v /= gamma(1.0 + gamma_)? * gamma(alpha + beta + (p as f64 + jf - 1.0) * gamma_)?;
    }
    let fact: f64 = (1..=p).map(f64::from).product();
    Ok(v / fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_is_euler_beta() {
        for (a, b) in [(0.5, 0.5), (2.0, 3.0), (0.3, -0.4)] {
            let want = libm::tgamma(a) * libm::tgamma(b) / libm::tgamma(a + b);
            assert!((selberg(1, a, b, 0.7).unwrap() - want).abs() < 1e-13 * want.abs());
        }
        // B(1/2, 1/2) = π
        assert!((selberg(1, 0.5, 0.5, 1.0).unwrap() - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn basis_values_are_finite_and_nonzero() {
        let (kappa, p) = (8.0, 2u32);
        for n in 3..=5 {
            let v = selberg(p, (n as f64 + 1.0) / kappa, -2.0 * p as f64 / kappa, 1.0 / kappa).unwrap();
            assert!(v.is_finite() && v != 0.0, "n={n}: {v}");
        }
    }

    #[test]
    fn pole_at_nonpositive_integers() {
        assert!(matches!(selberg(1, 0.0, 0.5, 0.1), Err(Error::Pole(_))));
        assert!(matches!(selberg(2, 0.5, -1.1, 0.1), Err(Error::Pole(_))));
    }
}
