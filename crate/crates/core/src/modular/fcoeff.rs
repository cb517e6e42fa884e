use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{CycloScalar, QContext};

/// `{-p+2k+1, …, κ-p-1} ∪ {κ-p+2k+1, …, 2κ-p-1}`: the `m` for which the
/// level-`k` coefficients have no vanishing denominator.
pub fn admissible_m(ctx: &QContext, k: i64) -> Vec<i64> {
    let (kap, p) = (ctx.kappa(), ctx.p());
    (-p + 2 * k + 1..=kap - p - 1)
        .chain(kap - p + 2 * k + 1..=2 * kap - p - 1)
        .collect()
}

/// The first block `{-p+2k+1, …, κ-p-1}` only.
pub fn first_block_m(ctx: &QContext, k: i64) -> Vec<i64> {
    (-ctx.p() + 2 * k + 1..=ctx.kappa() - ctx.p() - 1).collect()
}

fn check_k(ctx: &QContext, k: i64) -> Result<()> {
    if k < 0 || k > ctx.p() {
        return Err(Error::Range(format!("need 0 <= k <= p, got k={k}, p={}", ctx.p())));
    }
    Ok(())
}

/// `f^{(k)}_{m,n}`:
/// `q^{-m(n+k)-k(k+1)/2} (q^{-1}-q)^{-k} [p;k]^{-1} Σ_j [k;j] q^{2jn} / ((-m-p+k+1,q)_j (m+p-k+1,q)_{k-j})`.
pub fn f_coeff(ctx: &QContext, k: i64, m: i64, n: i64) -> Result<CycloScalar> {
    check_k(ctx, k)?;
    let p = ctx.p();
    let mut sum = ctx.zero();
    for j in 0..=k {
        let den = ctx.inv_q_pochhammer(-m - p + k + 1, j)?
            * ctx.inv_q_pochhammer(m + p - k + 1, k - j)?;
        sum += &(ctx.q_binomial(k, j)? * ctx.q_pow(2 * j * n) * den);
    }
    // (q^{-1} - q)^{-k} = (-(q - q^{-1}))^{-k}
    let mut pre = ctx.inv_q_minus_qinv().pow(k)?;
    if k % 2 == 1 {
        pre = -pre;
    }
    let bin_inv = ctx.q_binomial(ctx.p(), k)?.inv()?;
    Ok(ctx.q_pow(-m * (n + k) - k * (k + 1) / 2) * pre * bin_inv * sum)
}

/// Right-hand side of the level-raising recursion:
/// `q^{-m-k-1}/(q-q^{-1}) [k+1]/[p-k] (q^{-2k} f^{(k)}_{m-2,n}/[m-2+p-k] - f^{(k)}_{m,n}/[m+p-k])`.
pub fn f_recursion_rhs(ctx: &QContext, k: i64, m: i64, n: i64) -> Result<CycloScalar> {
    let p = ctx.p();
    if k + 1 > p {
        return Err(Error::Range(format!("recursion needs k+1 <= p, got k={k}")));
    }
    let a = ctx.q_pow(-2 * k) * f_coeff(ctx, k, m - 2, n)? * ctx.inv_q_int(m - 2 + p - k)?;
    let b = f_coeff(ctx, k, m, n)? * ctx.inv_q_int(m + p - k)?;
    Ok(ctx.q_pow(-m - k - 1)
        * ctx.inv_q_minus_qinv()
        * ctx.q_int(k + 1)
        * ctx.inv_q_int(p - k)?
        * (a - b))
}

/// `q^{-2k(m+p-k)+2pn} f^{(k)}_{-m-2p+2k,-n}`.
pub fn f_reflected(ctx: &QContext, k: i64, m: i64, n: i64) -> Result<CycloScalar> {
    let p = ctx.p();
    Ok(ctx.q_pow(-2 * k * (m + p - k) + 2 * p * n) * f_coeff(ctx, k, -m - 2 * p + 2 * k, -n)?)
}

/// `f^{(k)}_{m,n}` over the admissible `m` and one period of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FCoeffTable {
    pub kappa: i64,
    pub p: i64,
    pub k: i64,
    #[serde(with = "pair_keys")]
    pub values: BTreeMap<(i64, i64), CycloScalar>,
}

impl FCoeffTable {
    pub fn build(ctx: &QContext, k: i64) -> Result<Self> {
        check_k(ctx, k)?;
        let keys: Vec<(i64, i64)> = admissible_m(ctx, k)
            .into_iter()
            .flat_map(|m| (0..2 * ctx.kappa()).map(move |n| (m, n)))
            .collect();
        let values = keys
            .par_iter()
            .map(|&(m, n)| Ok(((m, n), f_coeff(ctx, k, m, n)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(FCoeffTable {
            kappa: ctx.kappa(),
            p: ctx.p(),
            k,
            values,
        })
    }

    /// Looks up `f_{m,n}`, reducing `n` modulo `2κ`.
    pub fn get(&self, m: i64, n: i64) -> Option<&CycloScalar> {
        self.values.get(&(m, n.rem_euclid(2 * self.kappa)))
    }
}

mod pair_keys {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::qcore::CycloScalar;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        m: i64,
        n: i64,
        value: CycloScalar,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(i64, i64), CycloScalar>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = map
            .iter()
            .map(|(&(m, n), value)| Entry {
                m,
                n,
                value: value.clone(),
            })
            .collect();
        v.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<(i64, i64), CycloScalar>, D::Error> {
        let v = Vec::<Entry>::deserialize(de)?;
        Ok(v.into_iter().map(|e| ((e.m, e.n), e.value)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_is_plain_power() {
        let ctx = QContext::new(7, 2).unwrap();
        for m in admissible_m(&ctx, 0) {
            for n in -3..9 {
                assert_eq!(f_coeff(&ctx, 0, m, n).unwrap(), ctx.q_pow(-m * n));
            }
        }
    }

    #[test]
    fn reflection_example() {
        let ctx = QContext::new(6, 1).unwrap();
        let (m, n) = (2, 3);
        assert_eq!(
            f_coeff(&ctx, 1, m, n).unwrap(),
            f_reflected(&ctx, 1, m, n).unwrap()
        );
    }

    #[test]
    fn recursion_small() {
        let ctx = QContext::new(8, 2).unwrap();
        for k in 0..2 {
            for m in admissible_m(&ctx, k + 1) {
                for n in 0..16 {
                    assert_eq!(
                        f_coeff(&ctx, k + 1, m, n).unwrap(),
                        f_recursion_rhs(&ctx, k, m, n).unwrap(),
                        "k={k} m={m} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn periodic_in_both_indices() {
        let ctx = QContext::new(6, 1).unwrap();
        for m in admissible_m(&ctx, 1) {
            for n in 0..4 {
                let f = f_coeff(&ctx, 1, m, n).unwrap();
                assert_eq!(f, f_coeff(&ctx, 1, m, n + 12).unwrap());
                assert_eq!(f, f_coeff(&ctx, 1, m + 12, n).unwrap());
            }
        }
    }

    #[test]
    fn inadmissible_m_errors() {
        let ctx = QContext::new(6, 1).unwrap();
        // m = κ-p: (m+p-k+1, q)_1 = [κ] = 0
        assert!(matches!(
            f_coeff(&ctx, 1, 5, 0),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn table_roundtrip() {
        let ctx = QContext::new(6, 1).unwrap();
        let t = FCoeffTable::build(&ctx, 1).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: FCoeffTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.get(2, 15), t.get(2, 3));
    }
}
