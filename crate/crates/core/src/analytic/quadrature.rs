use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the tanh–sinh abscissa range; weights beyond it are below 1e-20.
const T_MAX: f64 = 3.5;

/// Tanh–sinh refinement level, loop radius for regularized endpoints and the
/// tolerance on the level-to-level discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub level: u32,
    pub loop_radius: f64,
    pub tolerance: f64,
}

impl Quadrature {
    /// Defaults tuned for `p = 1` (one dimension).
    pub fn one_dim() -> Self {
        Quadrature {
            level: 6,
            loop_radius: 0.25,
            tolerance: 1e-9,
        }
    }

    /// Defaults for `p = 2`: one level lower per dimension.
    pub fn two_dim() -> Self {
        Quadrature {
            level: 4,
            loop_radius: 0.25,
            tolerance: 1e-5,
        }
    }

    pub fn for_dimension(p: i64) -> Self {
        if p >= 2 {
            Quadrature::two_dim()
        } else {
            Quadrature::one_dim()
        }
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.level < 2 || self.level > 12 {
            return Err(Error::Invalid(format!("quadrature level {} outside 2..=12", self.level)));
        }
        if !(self.loop_radius > 0.0 && self.loop_radius < 0.5) {
            return Err(Error::Invalid(format!("loop radius {} outside (0, 1/2)", self.loop_radius)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Nodes in `(0,1)` with weights at the requested level and at the level below.
///
/// The coarse rule uses every other node of the fine one, so both sums come
/// from one set of integrand values.
#[derive(Clone, Debug)]
pub struct TanhSinh {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub coarse: Vec<f64>,
}

impl TanhSinh {
    pub fn new(level: u32) -> Self {
        let h = 0.5f64.powi(level as i32);
        let n = (T_MAX / h).ceil() as i64;
        let mut nodes = Vec::with_capacity(2 * n as usize + 1);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut coarse = Vec::with_capacity(nodes.capacity());
        for j in -n..=n {
            let t = j as f64 * h;
            let u = 0.5 * PI * t.sinh();
            // x = (1 + tanh u)/2 written to keep both ends accurate
            let x = 1.0 / (1.0 + (-2.0 * u).exp());
            let w = h * 0.25 * PI * t.cosh() / u.cosh().powi(2);
            if !(x > 0.0 && x < 1.0) || w == 0.0 {
                continue;
            }
            nodes.push(x);
            weights.push(w);
            coarse.push(if j % 2 == 0 { 2.0 * w } else { 0.0 });
        }
        TanhSinh { nodes, weights, coarse }
    }
}

/// A rule for `∫_0^1 x^X g(x) dx` with `g` analytic near `[0,1]`: sum
/// `w_i g(z_i)` over possibly complex nodes.
#[derive(Clone, Debug)]
pub struct PowerRule {
    pub exponent: f64,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub coarse: Vec<Complex64>,
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

impl PowerRule {
    /// For non-integer `X` the piece `∫_0^δ` is the analytic continuation
    /// `(e^{2πiX} - 1)^{-1} ∮_{|x|=δ} x^X g(x) dx`, the circle traversed once
    /// counterclockwise from `x = δ` with `arg x` running over `[0, 2π]`.
    /// The remainder `∫_δ^1` is an ordinary tanh–sinh integral.
    pub fn new(exponent: f64, q: &Quadrature) -> Result<Self> {
        let ts = TanhSinh::new(q.level);
        let mut rule = PowerRule {
            exponent,
            nodes: vec![],
            weights: vec![],
            coarse: vec![],
        };
        if is_integer(exponent) {
            if exponent < 0.0 {
                return Err(Error::Pole(format!("non-integrable integer exponent {exponent}")));
            }
            for ((&x, &w), &c) in ts.nodes.iter().zip(&ts.weights).zip(&ts.coarse) {
                let xw = x.powf(exponent);
                rule.push(Complex64::from(x), Complex64::from(w * xw), Complex64::from(c * xw));
            }
            return Ok(rule);
        }
        let d = q.loop_radius;
        let i = Complex64::new(0.0, 1.0);
        let denom = (2.0 * PI * i * exponent).exp() - 1.0;
        for ((&x, &w), &c) in ts.nodes.iter().zip(&ts.weights).zip(&ts.coarse) {
            let theta = 2.0 * PI * x;
            let z = Complex64::from_polar(d, theta);
            // x^X dx = δ^{X+1} e^{i(X+1)θ} i dθ
            let f = Complex64::from_polar(d.powf(exponent + 1.0), (exponent + 1.0) * theta) * i
                * 2.0
                * PI
                / denom;
            rule.push(z, f * w, f * c);
        }
        for ((&x, &w), &c) in ts.nodes.iter().zip(&ts.weights).zip(&ts.coarse) {
            let y = d + (1.0 - d) * x;
            let f = (1.0 - d) * y.powf(exponent);
            rule.push(Complex64::from(y), Complex64::from(f * w), Complex64::from(f * c));
        }
        Ok(rule)
    }

    fn push(&mut self, z: Complex64, w: Complex64, c: Complex64) {
        self.nodes.push(z);
        self.weights.push(w);
        self.coarse.push(c);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Fine sum, coarse sum and the absolute fine sum `Σ|w f|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sums {
    pub fine: Complex64,
    pub coarse: Complex64,
    pub scale: f64,
}

impl Sums {
    pub fn add(&mut self, other: Sums) {
        self.fine += other.fine;
        self.coarse += other.coarse;
        self.scale += other.scale;
    }

    pub fn scaled(self, c: Complex64) -> Sums {
        Sums {
            fine: self.fine * c,
            coarse: self.coarse * c,
            scale: self.scale * c.norm(),
        }
    }

    pub fn error(&self) -> f64 {
        (self.fine - self.coarse).norm()
    }
}

/// Applies a rule to precomputed integrand values in node order.
pub fn apply(rule: &PowerRule, values: &[Complex64]) -> Sums {
    let mut s = Sums::default();
    for ((w, c), v) in rule.weights.iter().zip(&rule.coarse).zip(values) {
        s.fine += w * v;
        s.coarse += c * v;
        s.scale += (w * v).norm();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Quadrature {
        Quadrature::one_dim()
    }

    #[test]
    fn smooth_integral_on_unit_interval() {
        let r = PowerRule::new(0.0, &q()).unwrap();
        let v: Vec<_> = r.nodes.iter().map(|z| z.exp()).collect();
        let s = apply(&r, &v);
        assert!((s.fine - (std::f64::consts::E - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn continuation_of_power_integrals() {
        // ∫_0^1 x^X (1 + x) dx = 1/(X+1) + 1/(X+2), continued to X in (-2,-1)
        for x in [-1.75, -1.5, -1.25, -0.5, 0.25] {
            let r = PowerRule::new(x, &q()).unwrap();
            let v: Vec<_> = r.nodes.iter().map(|z| 1.0 + z).collect();
            let got = apply(&r, &v).fine;
            let want = 1.0 / (x + 1.0) + 1.0 / (x + 2.0);
            assert!((got - want).norm() < 1e-12, "X={x}: {got} vs {want}");
        }
    }

    #[test]
    fn continuation_with_analytic_weight() {
        // ∫_0^1 x^X e^x dx = Σ_n 1/(n!(n+X+1))
        let x = -1.6;
        let r = PowerRule::new(x, &q()).unwrap();
        let v: Vec<_> = r.nodes.iter().map(|z| z.exp()).collect();
        let got = apply(&r, &v).fine;
        let mut want = 0.0;
        let mut fact = 1.0;
        for n in 0..40 {
            if n > 0 {
                fact *= n as f64;
            }
            want += 1.0 / (fact * (n as f64 + x + 1.0));
        }
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn refinement_estimate_shrinks_with_level() {
        let mut last = f64::INFINITY;
        for level in 3..=6 {
            let r = PowerRule::new(-1.5, &q().with_level(level)).unwrap();
            let v: Vec<_> = r.nodes.iter().map(|z| (3.0 * z).cos()).collect();
            let e = apply(&r, &v).error();
            // once at roundoff the estimate only jitters
            assert!(e <= last.max(1e-13), "level {level}: {e} > {last}");
            last = e;
        }
        assert!(last < 1e-12);
    }

    #[test]
    fn negative_integer_exponent_is_a_pole() {
        assert!(matches!(PowerRule::new(-1.0, &q()), Err(Error::Pole(_))));
    }
}
