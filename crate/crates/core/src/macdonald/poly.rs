use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::qcore::{CycloScalar, QContext};

use super::formal::FormalQScalar;

/// Ring operations a coefficient type must provide.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Coeff for CycloScalar {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        CycloScalar::is_zero(self)
    }
}

impl Coeff for FormalQScalar {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        FormalQScalar::is_zero(self)
    }
}

/// A field containing `q`: either a root of unity or the formal variable.
pub trait QField: Sync {
    type Scalar: Coeff;
    fn int(&self, n: i64) -> Self::Scalar;
    fn q_pow(&self, e: i64) -> Self::Scalar;
    fn inv(&self, a: &Self::Scalar) -> Result<Self::Scalar>;

    fn zero(&self) -> Self::Scalar {
        self.int(0)
    }
    fn one(&self) -> Self::Scalar {
        self.int(1)
    }
    /// `(q^{-m} - q^m)^{-1}`, the divisor of one shift-operator step.
    fn inv_shift_divisor(&self, m: i64) -> Result<Self::Scalar> {
        let d = self.q_pow(-m).minus(&self.q_pow(m));
        self.inv(&d).map_err(|_| Error::VanishingDivisor { m })
    }
}

impl QField for QContext {
    type Scalar = CycloScalar;
    fn int(&self, n: i64) -> CycloScalar {
        QContext::int(self, n)
    }
    fn q_pow(&self, e: i64) -> CycloScalar {
        QContext::q_pow(self, e)
    }
    fn inv(&self, a: &CycloScalar) -> Result<CycloScalar> {
        a.inv()
    }
    fn inv_shift_divisor(&self, m: i64) -> Result<CycloScalar> {
        self.inv_q_diff(m)
            .map(|x| -x)
            .map_err(|_| Error::VanishingDivisor { m })
    }
}

/// The formal-q backend: `q` is an indeterminate.
#[derive(Clone, Copy, Debug, Default)]
pub struct FormalQ;

impl QField for FormalQ {
    type Scalar = FormalQScalar;
    fn int(&self, n: i64) -> FormalQScalar {
        FormalQScalar::from_int(n)
    }
    fn q_pow(&self, e: i64) -> FormalQScalar {
        FormalQScalar::q_pow(e)
    }
    fn inv(&self, a: &FormalQScalar) -> Result<FormalQScalar> {
        a.inv()
    }
}

/// `Σ c_d X^d` with `X = q^x`; zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct LaurentPolyX<S> {
    coeffs: BTreeMap<i64, S>,
}

impl<S: Coeff> LaurentPolyX<S> {
    pub fn zero() -> Self {
        LaurentPolyX {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn monomial(d: i64, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(d, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, S)>) -> Self {
        let mut p = Self::zero();
        for (d, c) in terms {
            p.add_term(d, c);
        }
        p
    }

    pub fn add_term(&mut self, d: i64, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&d) {
            Some(x) => {
                *x = x.plus(&c);
                if x.is_zero() {
                    self.coeffs.remove(&d);
                }
            }
            None => {
                self.coeffs.insert(d, c);
            }
        }
    }

    pub fn coeff(&self, d: i64) -> Option<&S> {
        self.coeffs.get(&d)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &S)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(lowest, highest)` exponent, `None` for zero.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        Some((
            *self.coeffs.keys().next()?,
            *self.coeffs.keys().next_back()?,
        ))
    }

    pub fn is_even(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(d, c)| self.coeffs.get(&-d) == Some(c))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (d, c) in &o.coeffs {
            r.add_term(*d, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (d, c) in &o.coeffs {
            r.add_term(*d, c.negated());
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                r.add_term(a + b, x.times(y));
            }
        }
        r
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(d, c)| (*d, c.times(s))))
    }

    pub fn map<T: Coeff>(&self, f: impl Fn(&S) -> T) -> LaurentPolyX<T> {
        LaurentPolyX::from_terms(self.coeffs.iter().map(|(d, c)| (*d, f(c))))
    }

    pub fn try_map<T: Coeff>(&self, f: impl Fn(&S) -> Result<T>) -> Result<LaurentPolyX<T>> {
        let mut out = LaurentPolyX::zero();
        for (d, c) in &self.coeffs {
            out.add_term(*d, f(c)?);
        }
        Ok(out)
    }

    /// Substitute `X = q^m`.
    pub fn eval_at<F: QField<Scalar = S>>(&self, field: &F, m: i64) -> S {
        self.coeffs
            .iter()
            .fold(field.zero(), |acc, (d, c)| acc.plus(&c.times(&field.q_pow(m * d))))
    }
}

impl<S: Coeff> fmt::Debug for LaurentPolyX<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

impl<S: Coeff> fmt::Display for LaurentPolyX<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.coeffs.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match d {
                0 => write!(f, "({c})")?,
                _ => write!(f, "({c}) X^{d}")?,
            }
        }
        Ok(())
    }
}

/// An x-even Laurent polynomial: `c_d = c_{-d}` for every `d`.
#[derive(Clone, PartialEq)]
pub struct SymLaurentPoly<S> {
    inner: LaurentPolyX<S>,
}

impl<S: Coeff> SymLaurentPoly<S> {
    pub fn new(p: LaurentPolyX<S>) -> Result<Self> {
        if !p.is_even() {
            return Err(Error::Invalid("Laurent polynomial is not x-even".into()));
        }
        Ok(SymLaurentPoly { inner: p })
    }

    /// `X^d + X^{-d}` for `d > 0`, and `1` for `d = 0`.
    pub fn basis(d: i64, one: S) -> Self {
        let d = d.abs();
        let inner = if d == 0 {
            LaurentPolyX::monomial(0, one)
        } else {
            LaurentPolyX::from_terms([(d, one.clone()), (-d, one)])
        };
        SymLaurentPoly { inner }
    }

    /// Coefficient of the pair `X^d + X^{-d}` (of `1` when `d = 0`).
    pub fn sym_coeff(&self, d: i64) -> Option<&S> {
        self.inner.coeff(d.abs())
    }

    pub fn as_laurent(&self) -> &LaurentPolyX<S> {
        &self.inner
    }

    pub fn into_laurent(self) -> LaurentPolyX<S> {
        self.inner
    }

    pub fn degree(&self) -> Option<i64> {
        self.inner.degree_range().map(|(_, hi)| hi)
    }

    pub fn map<T: Coeff>(&self, f: impl Fn(&S) -> T) -> SymLaurentPoly<T> {
        SymLaurentPoly {
            inner: self.inner.map(f),
        }
    }

    pub fn try_map<T: Coeff>(&self, f: impl Fn(&S) -> Result<T>) -> Result<SymLaurentPoly<T>> {
        Ok(SymLaurentPoly {
            inner: self.inner.try_map(f)?,
        })
    }
}

impl<S: Coeff> fmt::Debug for SymLaurentPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.inner, f)
    }
}

impl<S: Coeff> fmt::Display for SymLaurentPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.inner.terms().filter(|(d, _)| *d >= 0).collect::<Vec<_>>().into_iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "({c})")?,
                _ => write!(f, "({c})(X^{d} + X^-{d})")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
