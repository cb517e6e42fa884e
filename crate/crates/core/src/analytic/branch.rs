use std::f64::consts::PI;

use num_complex::Complex64;

use super::theta::{weierstrass_e, EllipticContext};
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Snaps `value` onto the branch of `log` closest to `reference`.
pub(crate) fn nearest_branch(value: Complex64, reference: Complex64) -> Complex64 {
    let k = ((reference.im - value.im) / TWO_PI).round();
    value + Complex64::new(0.0, TWO_PI * k)
}

/// A continuous logarithm of `s ↦ E(sω, τ)` on `0 < s < 1`, normalised by
/// `log E(sω) ~ log s + i arg ω` as `s → 0` with `arg ω ∈ [0, π)`.
///
/// The normalisation is the one obtained by continuing from `τ = i` in `τ`:
/// `(s, τ) ↦ E(sτ, τ)` does not vanish for `0 < s < 1`, so the continuous
/// logarithm on that simply connected set is fixed by its `s → 0` behaviour.
#[derive(Clone, Debug)]
pub struct SegmentLog {
    omega: Complex64,
    grid: Vec<Complex64>,
}

impl SegmentLog {
    pub fn new(omega: Complex64, ectx: &EllipticContext, points: usize) -> Result<Self> {
        let m = points.max(16);
        let step = 1.0 / (m + 1) as f64;
        let mut grid = Vec::with_capacity(m);
        let s0 = step;
        let e0 = weierstrass_e(omega * s0, ectx);
        let first = (e0 / (omega * s0)).ln() + s0.ln() + Complex64::new(0.0, omega.arg());
        grid.push(first);
        let mut prev = e0;
        for i in 1..m {
            let s = (i + 1) as f64 * step;
            let e = weierstrass_e(omega * s, ectx);
            let d = (e / prev).ln();
            if d.im.abs() >= 0.5 * PI {
                return Err(Error::Branch(format!(
                    "argument of E jumps by {:.3} between grid points on the segment to {omega}",
                    d.im
                )));
            }
            grid.push(grid[i - 1] + d);
            prev = e;
        }
        Ok(SegmentLog { omega, grid })
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// The tracked `log E(sω)` at real `s ∈ (0,1)`, given the value `E(sω)`.
    pub fn log_at(&self, s: f64, value: Complex64) -> Complex64 {
        let m = self.grid.len();
        let idx = ((s * (m + 1) as f64).round() as i64 - 1).clamp(0, m as i64 - 1) as usize;
        nearest_branch(value.ln(), self.grid[idx])
    }
}

/// `Φ = ∏_j E(t_j)^{-2p/κ} ∏_{i<j} E(t_i - t_j)^{2/κ}` at the point with
/// simplex coordinates `s`: `t_j = s_j` for `j < k`, `t_j = τ s_j` otherwise.
///
/// The branch is fixed at `τ = i` (`arg E(t_j) = 0` for the real block,
/// `π/2` for the `τ` block, principal arguments for the differences) and then
/// continued along the straight path from `i` to `τ`. A step is halved
/// whenever some factor turns by `π/2` or more.
pub fn phi_master(s: &[f64], ectx: &EllipticContext, k: usize) -> Result<Complex64> {
    let p = s.len();
    if k > p {
        return Err(Error::Invalid(format!("need k <= p, got k={k}, p={p}")));
    }
    check_interior(s, k)?;
    let kap = ectx.kappa() as f64;
    let a = -2.0 * p as f64 / kap;
    let b = 2.0 / kap;
    let start = ectx.with_tau(Complex64::new(0.0, 1.0))?;
    let target = ectx.tau();
    let factors = |e: &EllipticContext| -> Vec<Complex64> {
        let tau = e.tau();
        let t: Vec<Complex64> = (0..p)
            .map(|j| if j < k { Complex64::from(s[j]) } else { tau * s[j] })
            .collect();
        let mut out: Vec<Complex64> = t.iter().map(|&tj| weierstrass_e(tj, e)).collect();
        for i in 0..p {
            for j in i + 1..p {
                out.push(weierstrass_e(t[i] - t[j], e));
            }
        }
        out
    };
    let mut prev = factors(&start);
    let mut logs: Vec<Complex64> = prev.iter().map(|v| v.ln()).collect();
    let mut sigma = 0.0f64;
    let mut step = 1.0 / 16.0;
    const MIN_STEP: f64 = 1e-7;
    while sigma < 1.0 {
        let next_sigma = (sigma + step).min(1.0);
        let tau = Complex64::new(0.0, 1.0) + (target - Complex64::new(0.0, 1.0)) * next_sigma;
        let e = start.with_tau(tau)?;
        let vals = factors(&e);
        let deltas: Vec<Complex64> = vals.iter().zip(&prev).map(|(v, w)| (v / w).ln()).collect();
        if deltas.iter().any(|d| d.im.abs() >= 0.5 * PI) {
            step *= 0.5;
            if step < MIN_STEP {
                return Err(Error::Branch(format!("continuation to tau={target} stalled at {tau}")));
            }
            continue;
        }
        for (l, d) in logs.iter_mut().zip(&deltas) {
            *l += d;
        }
        prev = vals;
        sigma = next_sigma;
    }
    let mut log_phi = Complex64::new(0.0, 0.0);
    for (idx, l) in logs.iter().enumerate() {
        log_phi += if idx < p { a * l } else { b * l };
    }
    Ok(log_phi.exp())
}

fn check_interior(s: &[f64], k: usize) -> Result<()> {
    let bad = |msg: &str| Err(Error::Invalid(format!("point {s:?} is not interior: {msg}")));
    if s.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return bad("coordinates must lie in (0,1)");
    }
    for block in [&s[..k], &s[k..]] {
        if block.windows(2).any(|w| w[1] >= w[0]) {
            return bad("coordinates must decrease within each simplex");
        }
    }
    Ok(())
}
