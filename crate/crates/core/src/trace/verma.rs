use num_complex::Complex64;

use crate::error::{Error, Result};

/// `M_μ ⊗ U` restricted to what the trace needs.
///
/// `U` has basis `e_0, …, e_{2k}` of weights `2k - 2i` with `F e_i = e_{i+1}`
/// and `E e_i = [i][2k-i+1] e_{i-1}`; the zero-weight vector is `e_k`.
#[derive(Clone, Debug)]
pub struct VermaModel {
    pub k: i64,
    pub q: Complex64,
    pub mu: Complex64,
    pub depth: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleValue {
    pub value: Complex64,
    /// Magnitude of the last summed term, a proxy for the neglected tail.
    pub last_term: f64,
}

impl VermaModel {
    pub fn new(k: i64, q: Complex64, mu: Complex64, depth: usize) -> Self {
        VermaModel { k, q, mu, depth }
    }

    fn qpow(&self, x: Complex64) -> Complex64 {
        (x * self.q.ln()).exp()
    }

    fn bracket(&self, x: Complex64) -> Complex64 {
        (self.qpow(x) - self.qpow(-x)) / (self.q - 1.0 / self.q)
    }

    fn bracket_i(&self, n: i64) -> Complex64 {
        self.bracket(Complex64::from(n as f64))
    }

    /// `E` on `U` in the basis `e_i`: the coefficient of `e_{i-1}` in `E e_i`.
    pub fn e_on_u(&self, i: i64) -> Complex64 {
        self.bracket_i(i) * self.bracket_i(2 * self.k - i + 1)
    }

    /// `[E, F] - [h]` on `F^j v_μ`, which must vanish.
    pub fn commutator_defect(&self, j: i64) -> Complex64 {
        // E F^j v = [j][μ-j+1] F^{j-1} v
        let ef = |j: i64| self.bracket_i(j) * self.bracket(self.mu - (j - 1) as f64);
        let lhs = ef(j + 1) - ef(j);
        lhs - self.bracket(self.mu - 2.0 * j as f64)
    }

    /// Same check on `U`, for each basis vector.
    pub fn u_commutator_defect(&self, i: i64) -> Complex64 {
        let e = |i: i64| if i <= 0 { Complex64::new(0.0, 0.0) } else { self.e_on_u(i) };
        let lhs = if i < 2 * self.k { e(i + 1) } else { Complex64::new(0.0, 0.0) } - e(i);
        lhs - self.bracket_i(2 * self.k - 2 * i)
    }

    /// Coefficient of `F^l v_μ ⊗ E^l u` in `Φ(v_μ)`.
    ///
    /// `Δ(E)Φ(v_μ) = 0` with `Δ(E) = E ⊗ q^h + 1 ⊗ E` forces
    /// `c_{l+1} [l+1][μ-l] q^{2l+2} = -c_l`, hence
    /// `c_l = q^{-l(l+1)} / ([l]! (-μ,q)_l)`.
    pub fn intertwiner_coeff(&self, l: i64) -> Complex64 {
        let mut c = Complex64::new(1.0, 0.0);
        for t in 0..l {
            c /= self.bracket_i(t + 1) * self.bracket(-self.mu + t as f64);
        }
        c * self.qpow(Complex64::from(-(l * (l + 1)) as f64))
    }

    /// Coefficient of `F^l v_μ ⊗ E^{l+1} u` in `Δ(E)Φ(v_μ)`, which must vanish.
    pub fn intertwiner_defect(&self, l: i64) -> Complex64 {
        // E F^{l+1} v = [l+1][μ-l] F^l v, and E^{l+1} u has weight 2l+2
        let ef = self.bracket_i(l + 1) * self.bracket(self.mu - l as f64);
        self.intertwiner_coeff(l + 1) * ef * self.qpow(Complex64::from((2 * l + 2) as f64))
            + self.intertwiner_coeff(l)
    }

    /// Components `c_i` of `Φ(v_μ) = Σ_i c_i F^{k-i} v_μ ⊗ e_i` (`u = scale · e_k`).
    fn initial_state(&self, u_scale: Complex64) -> Vec<Complex64> {
        let k = self.k;
        let mut state = vec![Complex64::new(0.0, 0.0); (2 * k + 1) as usize];
        // E^l e_k = ∏_{t<l} [k-t][k+t+1] e_{k-l}
        let mut e_chain = Complex64::new(1.0, 0.0);
        for l in 0..=k {
            if l > 0 {
                e_chain *= self.e_on_u(k - l + 1);
            }
            state[(k - l) as usize] = u_scale * e_chain * self.intertwiner_coeff(l);
        }
        state
    }

    /// `Σ_{j<=J} q^{ν(μ-2j)} ⟨F^j v_μ ⊗ e_k⟩ Φ(F^j v_μ)`, divided by the scale of `u`.
    pub fn trace(&self, nu: Complex64, u_scale: Complex64) -> Result<OracleValue> {
        let ratio = self.qpow(-2.0 * nu);
        if ratio.norm() >= 1.0 {
            return Err(Error::Convergence(format!(
                "|q^(-2 nu)| = {} >= 1: graded trace diverges",
                ratio.norm()
            )));
        }
        let k = self.k;
        let mut state = self.initial_state(u_scale);
        let mut total = Complex64::new(0.0, 0.0);
        let mut last = 0.0;
        for j in 0..=self.depth as i64 {
            let term = self.qpow(nu * (self.mu - 2.0 * j as f64)) * state[k as usize];
            total += term;
            last = term.norm();
            // Δ(F) = F ⊗ 1 + q^{-h} ⊗ F; the F^a v_μ ⊗ e_i entry has a = j+k-i
            let mut next = state.clone();
            for i in 1..=(2 * k) as usize {
                let a = j + k + 1 - i as i64;
                if a < 0 {
                    continue;
                }
                let w = self.qpow(-(self.mu - 2.0 * a as f64));
                next[i] += w * state[i - 1];
            }
            state = next;
        }
        Ok(OracleValue {
            value: total / u_scale,
            last_term: last / u_scale.norm(),
        })
    }
}

/// Truncated graded trace of the intertwiner over `M_μ`.
pub fn verma_trace_oracle(
    k: i64,
    nu: Complex64,
    mu: Complex64,
    q: Complex64,
    depth: usize,
) -> Result<OracleValue> {
    VermaModel::new(k, q, mu, depth).trace(nu, Complex64::new(1.0, 0.0))
}

/// The exponent `c` with `oracle = q^{cν} ψ`, read off from one value pair.
pub fn convention_exponent(q: Complex64, nu: Complex64, oracle: Complex64, psi: Complex64) -> f64 {
    ((oracle / psi).ln() / (nu * q.ln())).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::psi::psi_complex;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn k0_geometric_series() {
        let (q, nu, mu) = (c(0.9), c(-2.3), c(1.7));
        let depth = 300;
        let v = verma_trace_oracle(0, nu, mu, q, depth).unwrap().value;
        let qp = |x: Complex64| (x * q.ln()).exp();
        let want = qp(nu * mu) * (1.0 - qp(-2.0 * nu * (depth as f64 + 1.0))) / (1.0 - qp(-2.0 * nu));
        assert!((v - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn algebra_relations_hold() {
        let m = VermaModel::new(3, c(0.9), c(1.7), 20);
        for j in 0..20 {
            assert!(m.commutator_defect(j).norm() < 1e-9);
        }
        for i in 0..=6 {
            assert!(m.u_commutator_defect(i).norm() < 1e-9, "i={i}");
        }
        for l in 0..6 {
            assert!(m.intertwiner_defect(l).norm() < 1e-9 * m.intertwiner_coeff(l).norm());
        }
    }

    #[test]
    fn u_scale_is_immaterial() {
        let m = VermaModel::new(2, c(0.9), c(1.7), 200);
        let a = m.trace(c(-2.3), c(1.0)).unwrap().value;
        let b = m.trace(c(-2.3), Complex64::new(-3.5, 2.0)).unwrap().value;
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn convention_exponent_is_zero_at_k0() {
        let (q, nu, mu) = (c(0.9), c(-2.3), c(1.7));
        let o = verma_trace_oracle(0, nu, mu, q, 300).unwrap().value;
        let p = psi_complex(q, 0, nu, mu).unwrap();
        assert!(convention_exponent(q, nu, o, p).abs() < 1e-10);
    }

    #[test]
    fn matches_psi_for_higher_k() {
        let (q, nu, mu) = (c(0.9), c(-2.3), c(1.7));
        for k in 1..=3 {
            let o = verma_trace_oracle(k, nu, mu, q, 300).unwrap();
            let p = psi_complex(q, k, nu, mu).unwrap();
            assert!((o.value - p).norm() < 1e-10 * p.norm(), "k={k}: {} vs {}", o.value, p);
        }
    }

    #[test]
    fn divergent_trace_is_rejected() {
        assert!(matches!(
            verma_trace_oracle(1, c(2.0), c(1.7), c(0.9), 10),
            Err(Error::Convergence(_))
        ));
    }
}
