//! JSON form `{ "order": N, "coeffs": [[num, den], …] }` for cyclotomic scalars.
//!
//! Numerators and denominators are written as JSON integers when they fit in
//! an `i64` and as decimal strings otherwise; both forms are accepted on input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cyclo::CycloScalar;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    pub(crate) fn from_big(b: &BigInt) -> Self {
        match b.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(b.to_string()),
        }
    }

    pub(crate) fn to_big(&self) -> Result<BigInt, String> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    order: usize,
    coeffs: Vec<(IntRepr, IntRepr)>,
}

impl Serialize for CycloScalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs()
            .iter()
            .map(|c| (IntRepr::from_big(c.numer()), IntRepr::from_big(c.denom())))
            .collect();
        CycloRepr {
            order: self.order(),
            coeffs,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CycloScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = CycloRepr::deserialize(de)?;
        if repr.order == 0 {
            return Err(D::Error::custom("cyclotomic order must be positive"));
        }
        let mut coeffs = Vec::with_capacity(repr.coeffs.len());
        for (n, d) in &repr.coeffs {
            let n = n.to_big().map_err(D::Error::custom)?;
            let d = d.to_big().map_err(D::Error::custom)?;
            if d.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            coeffs.push(BigRational::new(n, d));
        }
        Ok(CycloScalar::from_coeffs(repr.order, &coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let z = CycloScalar::zeta_pow(8, 1) + CycloScalar::from_int(8, 3);
        let v = serde_json::to_value(&z).unwrap();
        assert_eq!(v["order"], 8);
        assert_eq!(v["coeffs"][0], serde_json::json!([3, 1]));
        assert_eq!(v["coeffs"][1], serde_json::json!([1, 1]));
        assert_eq!(v["coeffs"].as_array().unwrap().len(), 8);
        let back: CycloScalar = serde_json::from_value(v).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn big_integers_as_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let z = CycloScalar::from_bigint(8, big);
        let s = serde_json::to_string(&z).unwrap();
        assert!(s.contains("\"123456789012345678901234567890\""));
        let back: CycloScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
    }
}
