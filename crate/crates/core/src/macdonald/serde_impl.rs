//! JSON forms: a formal scalar is `{ "num": [...], "den": [...] }` (ascending
//! powers of `q`); an x-even polynomial is
//! `{ "basis": "q^{dx}+q^{-dx}", "coeffs": { "d": scalar } }` with `d >= 0`,
//! where the entry at `d = 0` multiplies the constant `1`.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::formal::{FormalQScalar, ZPoly};
use super::poly::{Coeff, LaurentPolyX, SymLaurentPoly};
use crate::qcore::serde_impl::IntRepr;

pub const SYM_BASIS: &str = "q^{dx}+q^{-dx}";

#[derive(Serialize, Deserialize)]
struct FormalRepr {
    num: Vec<IntRepr>,
    den: Vec<IntRepr>,
}

impl Serialize for FormalQScalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let conv = |p: &ZPoly| p.coeffs().iter().map(IntRepr::from_big).collect();
        FormalRepr {
            num: conv(self.numerator()),
            den: conv(self.denominator()),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FormalQScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let r = FormalRepr::deserialize(de)?;
        let conv = |v: &[IntRepr]| -> Result<ZPoly, D::Error> {
            v.iter()
                .map(|x| x.to_big().map_err(D::Error::custom))
                .collect::<Result<Vec<_>, _>>()
                .map(ZPoly::new)
        };
        FormalQScalar::from_parts(conv(&r.num)?, conv(&r.den)?).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SymRepr<S> {
    basis: String,
    coeffs: BTreeMap<i64, S>,
}

impl<C: Coeff + Serialize> Serialize for SymLaurentPoly<C> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .as_laurent()
            .terms()
            .filter(|(d, _)| *d >= 0)
            .collect();
        SymRepr::<&C> {
            basis: SYM_BASIS.into(),
            coeffs,
        }
        .serialize(ser)
    }
}

impl<'de, C: Coeff + Deserialize<'de>> Deserialize<'de> for SymLaurentPoly<C> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let r = SymRepr::<C>::deserialize(de)?;
        if r.basis != SYM_BASIS {
            return Err(D::Error::custom(format!("unknown basis {:?}", r.basis)));
        }
        let mut p = LaurentPolyX::zero();
        for (d, c) in r.coeffs {
            if d < 0 {
                return Err(D::Error::custom("negative exponent in symmetric form"));
            }
            if d > 0 {
                p.add_term(-d, c.clone());
            }
            p.add_term(d, c);
        }
        SymLaurentPoly::new(p).map_err(D::Error::custom)
    }
}
