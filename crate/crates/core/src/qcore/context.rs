use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::cyclo::CycloScalar;
use crate::error::{Error, Result};

/// Per-κ data shared by every context with the same level: the field of order
/// `8κ`, its powers of `ζ`, and lazily inverted q-integers.
#[derive(Debug)]
pub struct QRing {
    order: usize,
    zeta_pows: Vec<CycloScalar>,
    qint: Vec<CycloScalar>,
    inv_qint: Vec<OnceLock<Option<CycloScalar>>>,
    inv_q_minus_qinv: CycloScalar,
}

impl QRing {
    pub fn get(kappa: i64) -> Arc<QRing> {
        static CACHE: OnceLock<Mutex<HashMap<i64, Arc<QRing>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(r) = cache.lock().expect("ring cache poisoned").get(&kappa) {
            return r.clone();
        }
        let ring = Arc::new(QRing::build(kappa));
        cache
            .lock()
            .expect("ring cache poisoned")
            .entry(kappa)
            .or_insert(ring)
            .clone()
    }

    fn build(kappa: i64) -> Self {
        let order = (8 * kappa) as usize;
        let zeta_pows: Vec<CycloScalar> = (0..order as i64)
            .map(|j| CycloScalar::zeta_pow(order, j))
            .collect();
        let period = (2 * kappa) as usize;
        // [n] = Σ_{j=0}^{n-1} q^{n-1-2j}, q = ζ^4
        let qint = (0..period as i64)
            .map(|n| {
                let mut acc = CycloScalar::zero(order);
                for j in 0..n {
                    let e = 4 * (n - 1 - 2 * j);
                    acc += &zeta_pows[e.rem_euclid(order as i64) as usize];
                }
                acc
            })
            .collect();
        let q_minus_qinv = &zeta_pows[4] - &zeta_pows[order - 4];
        let inv_q_minus_qinv = q_minus_qinv
            .inv()
            .expect("q - q^-1 is nonzero for kappa >= 2");
        QRing {
            order,
            zeta_pows,
            qint,
            inv_qint: (0..period).map(|_| OnceLock::new()).collect(),
            inv_q_minus_qinv,
        }
    }
}

/// The parameters `(κ, p)` together with `q = e^{πi/κ}` realised as `ζ_{8κ}^4`.
#[derive(Clone, Debug)]
pub struct QContext {
    kappa: i64,
    p: i64,
    ring: Arc<QRing>,
}

impl QContext {
    /// Validates `κ >= 2`, `p >= 0` and `κ >= 2p + 2`.
    pub fn new(kappa: i64, p: i64) -> Result<Self> {
        if kappa < 2 || p < 0 || kappa < 2 * p + 2 {
            return Err(Error::Invalid(format!(
                "need kappa >= 2p+2 with kappa >= 2, p >= 0 (got kappa={kappa}, p={p})"
            )));
        }
        Ok(QContext {
            kappa,
            p,
            ring: QRing::get(kappa),
        })
    }

    /// Context for q-arithmetic only; `p` is set to 0.
    pub fn level(kappa: i64) -> Result<Self> {
        Self::new(kappa, 0)
    }

    pub fn kappa(&self) -> i64 {
        self.kappa
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// The cyclotomic order `N = 8κ`.
    pub fn order(&self) -> usize {
        self.ring.order
    }

    /// Same level, different `p`.
    pub fn with_p(&self, p: i64) -> Result<Self> {
        Self::new(self.kappa, p)
    }

    pub fn zero(&self) -> CycloScalar {
        CycloScalar::zero(self.order())
    }

    pub fn one(&self) -> CycloScalar {
        CycloScalar::one(self.order())
    }

    pub fn int(&self, n: i64) -> CycloScalar {
        CycloScalar::from_int(self.order(), n)
    }

    /// `ζ_{8κ}^j`.
    pub fn zeta_pow(&self, j: i64) -> CycloScalar {
        self.ring.zeta_pows[j.rem_euclid(self.order() as i64) as usize].clone()
    }

    /// `q^e`.
    pub fn q_pow(&self, e: i64) -> CycloScalar {
        self.zeta_pow(4 * e)
    }

    /// `q^{e/2}` with the principal `q^{1/2} = e^{πi/(2κ)} = ζ_{8κ}^2`.
    pub fn q_half_pow(&self, e: i64) -> CycloScalar {
        self.zeta_pow(2 * e)
    }

    /// `e^{πi j/4} = ζ_{8κ}^{κ j}`.
    pub fn eighth_root_pow(&self, j: i64) -> CycloScalar {
        self.zeta_pow(self.kappa * j)
    }

    /// The imaginary unit `ζ_{8κ}^{2κ}`.
    pub fn i(&self) -> CycloScalar {
        self.zeta_pow(2 * self.kappa)
    }

    fn idx(&self, n: i64) -> usize {
        n.rem_euclid(2 * self.kappa) as usize
    }

    /// `[n] = (q^n - q^{-n}) / (q - q^{-1})`.
    pub fn q_int(&self, n: i64) -> CycloScalar {
        self.ring.qint[self.idx(n)].clone()
    }

    /// `[n]^{-1}`, or a division error when `κ | n`.
    pub fn inv_q_int(&self, n: i64) -> Result<CycloScalar> {
        let slot = &self.ring.inv_qint[self.idx(n)];
        let v = slot.get_or_init(|| self.ring.qint[self.idx(n)].inv().ok());
        v.clone()
            .ok_or_else(|| Error::DivisionByZero(format!("[{n}] = 0 at kappa={}", self.kappa)))
    }

    /// `q^n - q^{-n}`.
    pub fn q_diff(&self, n: i64) -> CycloScalar {
        self.q_pow(n) - self.q_pow(-n)
    }

    /// `(q^n - q^{-n})^{-1}`.
    pub fn inv_q_diff(&self, n: i64) -> Result<CycloScalar> {
        Ok(&self.ring.inv_q_minus_qinv * &self.inv_q_int(n)?)
    }

    /// `(q - q^{-1})^{-1}`.
    pub fn inv_q_minus_qinv(&self) -> CycloScalar {
        self.ring.inv_q_minus_qinv.clone()
    }

    /// `[n]! = [1][2]…[n]`, with `[0]! = 1`.
    pub fn q_factorial(&self, n: i64) -> Result<CycloScalar> {
        if n < 0 {
            return Err(Error::Range(format!("q_factorial of negative {n}")));
        }
        Ok((1..=n).fold(self.one(), |acc, j| acc * self.q_int(j)))
    }

    pub fn inv_q_factorial(&self, n: i64) -> Result<CycloScalar> {
        if n < 0 {
            return Err(Error::Range(format!("q_factorial of negative {n}")));
        }
        let mut acc = self.one();
        for j in 1..=n {
            acc = acc * self.inv_q_int(j)?;
        }
        Ok(acc)
    }

    /// Gaussian binomial `[n]! / ([j]! [n-j]!)`.
    pub fn q_binomial(&self, n: i64, j: i64) -> Result<CycloScalar> {
        if j < 0 || j > n {
            return Err(Error::Range(format!("q_binomial({n}, {j})")));
        }
        Ok(self.q_factorial(n)? * self.inv_q_factorial(j)? * self.inv_q_factorial(n - j)?)
    }

    /// `(n, q)_j = [n][n+1]…[n+j-1]`; `j = 0` gives 1.
    pub fn q_pochhammer(&self, n: i64, j: i64) -> Result<CycloScalar> {
        if j < 0 {
            return Err(Error::Range(format!("q_pochhammer length {j} < 0")));
        }
        Ok((0..j).fold(self.one(), |acc, i| acc * self.q_int(n + i)))
    }

    pub fn inv_q_pochhammer(&self, n: i64, j: i64) -> Result<CycloScalar> {
        if j < 0 {
            return Err(Error::Range(format!("q_pochhammer length {j} < 0")));
        }
        let mut acc = self.one();
        for i in 0..j {
            acc = acc * self.inv_q_int(n + i).map_err(|_| {
                Error::ZeroDenominator(format!(
                    "({n},q)_{j} vanishes at kappa={} (factor [{}])",
                    self.kappa,
                    n + i
                ))
            })?;
        }
        Ok(acc)
    }
}
