use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::qcore::{CycloScalar, QContext};

/// Dense polynomial in `q` with integer coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ZPoly(Vec<BigInt>);

impl ZPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ZPoly(c)
    }

    pub fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c q^e`.
    pub fn monomial(c: BigInt, e: usize) -> Self {
        let mut v = vec![BigInt::zero(); e + 1];
        v[e] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lc(&self) -> &BigInt {
        self.0.last().expect("lc of zero polynomial")
    }

    /// Number of trailing factors of `q`.
    fn valuation(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    fn shift_down(&self, v: usize) -> Self {
        ZPoly(self.0[v..].to_vec())
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn div_scalar(&self, c: &BigInt) -> Self {
        ZPoly(self.0.iter().map(|x| x / c).collect())
    }

    fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lc().is_negative() {
            c = -c;
        }
        self.div_scalar(&c)
    }

    fn pseudo_rem(&self, d: &ZPoly) -> ZPoly {
        let dd = d.degree().expect("pseudo_rem by zero");
        let lc = d.lc().clone();
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let t = r[top].clone();
            for x in r.iter_mut() {
                *x *= &lc;
            }
            let off = top - dd;
            for (i, c) in d.0.iter().enumerate() {
                r[off + i] -= &t * c;
            }
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        ZPoly(r)
    }

    /// Primitive gcd with positive leading coefficient (primitive PRS).
    pub fn gcd(&self, other: &ZPoly) -> ZPoly {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    /// Exact quotient; fails if the division leaves a remainder over `Z`.
    pub fn exact_div(&self, d: &ZPoly) -> Result<ZPoly> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::DivisionByZero("polynomial division by 0".into()))?;
        if self.is_zero() {
            return Ok(ZPoly::zero());
        }
        let n = self.0.len();
        if n <= dd {
            return Err(Error::NonDivisible("polynomial quotient".into()));
        }
        let mut r = self.0.clone();
        let mut quo = vec![BigInt::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let (qk, rem) = r[k + dd].div_rem(d.lc());
            if !rem.is_zero() {
                return Err(Error::NonDivisible("polynomial quotient".into()));
            }
            for (i, c) in d.0.iter().enumerate() {
                r[k + i] -= &qk * c;
            }
            quo[k] = qk;
        }
        if r.iter().any(|x| !x.is_zero()) {
            return Err(Error::NonDivisible("polynomial quotient".into()));
        }
        Ok(ZPoly::new(quo))
    }

    /// Horner evaluation at a cyclotomic point.
    pub fn eval_cyclo(&self, x: &CycloScalar) -> CycloScalar {
        let mut acc = CycloScalar::zero(x.order());
        for c in self.0.iter().rev() {
            acc = &acc * x + CycloScalar::from_bigint(x.order(), c.clone());
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * x + c.to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, o: &ZPoly) -> ZPoly {
        let n = self.0.len().max(o.0.len());
        let z = BigInt::zero();
        ZPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, o: &ZPoly) -> ZPoly {
        let n = self.0.len().max(o.0.len());
        let z = BigInt::zero();
        ZPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) - o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        ZPoly::new(v)
    }
}

/// Element of `Q(q)` with `q` transcendental: `num / den`, both in `Z[q]`.
///
/// Canonical form: `gcd(num, den) = 1`, the contents of `num` and `den` are
/// coprime and `den` has positive leading coefficient. Two values are equal
/// iff their stored polynomials are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct FormalQScalar {
    num: ZPoly,
    den: ZPoly,
}

impl FormalQScalar {
    pub fn zero() -> Self {
        FormalQScalar {
            num: ZPoly::zero(),
            den: ZPoly::constant(BigInt::one()),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_parts(ZPoly::constant(n.into()), ZPoly::constant(BigInt::one()))
            .expect("nonzero denominator")
    }

    /// `q^e` for any integer `e`.
    pub fn q_pow(e: i64) -> Self {
        let m = ZPoly::monomial(BigInt::one(), e.unsigned_abs() as usize);
        let one = ZPoly::constant(BigInt::one());
        if e >= 0 {
            FormalQScalar { num: m, den: one }
        } else {
            FormalQScalar { num: one, den: m }
        }
    }

    pub fn from_parts(num: ZPoly, den: ZPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("formal-q denominator".into()));
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(mut num: ZPoly, mut den: ZPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let v = num.valuation().min(den.valuation());
        if v > 0 {
            num = num.shift_down(v);
            den = den.shift_down(v);
        }
        if den.degree() > Some(0) && num.degree() > Some(0) {
            let g = num.gcd(&den);
            if g.degree() > Some(0) {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
        }
        let mut c = num.content().gcd(&den.content());
        if den.lc().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            num = num.div_scalar(&c);
            den = den.div_scalar(&c);
        }
        FormalQScalar { num, den }
    }

    pub fn numerator(&self) -> &ZPoly {
        &self.num
    }

    pub fn denominator(&self) -> &ZPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of formal 0".into()));
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    /// Substitute `q = ζ_{8κ}^4`; fails if the denominator vanishes there.
    pub fn specialize(&self, ctx: &QContext) -> Result<CycloScalar> {
        let q = ctx.q_pow(1);
        let d = self.den.eval_cyclo(&q);
        if d.is_zero() {
            return Err(Error::ZeroDenominator(format!(
                "formal denominator vanishes at q = exp(pi i / {})",
                ctx.kappa()
            )));
        }
        Ok(self.num.eval_cyclo(&q) * d.inv()?)
    }

    /// Value at a real `q`.
    pub fn eval_f64(&self, q: f64) -> f64 {
        self.num.eval_f64(q) / self.den.eval_f64(q)
    }

    pub fn eval_complex(&self, q: Complex64) -> Complex64 {
        self.num.eval_complex(q) / self.den.eval_complex(q)
    }

    /// `self` rescaled by an integer, without a gcd pass.
    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        let k = BigInt::from(k);
        let g = k.gcd(&self.den.content());
        let num = self.num.scale(&(&k / &g));
        let den = self.den.div_scalar(&g);
        FormalQScalar { num, den }
    }
}

impl Add for &FormalQScalar {
    type Output = FormalQScalar;
    fn add(self, o: &FormalQScalar) -> FormalQScalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return FormalQScalar::normalize(&self.num + &o.num, self.den.clone());
        }
        FormalQScalar::normalize(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &FormalQScalar {
    type Output = FormalQScalar;
    fn sub(self, o: &FormalQScalar) -> FormalQScalar {
        self + &(-o)
    }
}

impl Mul for &FormalQScalar {
    type Output = FormalQScalar;
    fn mul(self, o: &FormalQScalar) -> FormalQScalar {
        if self.is_zero() || o.is_zero() {
            return FormalQScalar::zero();
        }
        FormalQScalar::normalize(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &FormalQScalar {
    type Output = FormalQScalar;
    fn neg(self) -> FormalQScalar {
        FormalQScalar {
            num: ZPoly(self.num.0.iter().map(|c| -c).collect()),
            den: self.den.clone(),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for FormalQScalar {
            type Output = FormalQScalar;
            fn $f(self, o: FormalQScalar) -> FormalQScalar {
                (&self).$f(&o)
            }
        }
        impl $tr<&FormalQScalar> for FormalQScalar {
            type Output = FormalQScalar;
            fn $f(self, o: &FormalQScalar) -> FormalQScalar {
                (&self).$f(o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for FormalQScalar {
    type Output = FormalQScalar;
    fn neg(self) -> FormalQScalar {
        -&self
    }
}

fn fmt_poly(p: &ZPoly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (e, c) in p.0.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        let a = c.abs();
        match (e, a.is_one()) {
            (0, _) => write!(f, "{a}")?,
            (1, true) => write!(f, "q")?,
            (1, false) => write!(f, "{a}q")?,
            (_, true) => write!(f, "q^{e}")?,
            (_, false) => write!(f, "{a}q^{e}")?,
        }
    }
    Ok(())
}

impl fmt::Display for FormalQScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.lc().is_one() {
            return fmt_poly(&self.num, f);
        }
        write!(f, "(")?;
        fmt_poly(&self.num, f)?;
        write!(f, ")/(")?;
        fmt_poly(&self.den, f)?;
        write!(f, ")")
    }
}

impl fmt::Debug for FormalQScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
