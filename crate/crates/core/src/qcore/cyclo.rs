//! Exact arithmetic in the cyclotomic field `Q(ζ_N)`.
//!
//! Elements are stored as polynomials in `ζ_N` reduced modulo the `N`-th
//! cyclotomic polynomial `Φ_N`, with integer numerators over one common
//! positive denominator. The representation is canonical, so equality and the
//! zero test are plain structural comparisons.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Shared per-order data: `Φ_N` and the table of `x^j mod Φ_N` for `0 <= j < N`.
#[derive(Debug)]
pub struct CycloField {
    order: usize,
    degree: usize,
    phi: Vec<i64>,
    pow_table: Vec<Vec<i64>>,
}

impl CycloField {
    /// Returns the (process-wide cached) field data for order `n`.
    pub fn get(order: usize) -> Arc<CycloField> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CycloField>>>> = OnceLock::new();
        assert!(order >= 1, "cyclotomic order must be positive");
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("cyclotomic cache poisoned");
        guard
            .entry(order)
            .or_insert_with(|| Arc::new(CycloField::build(order)))
            .clone()
    }

    fn build(order: usize) -> Self {
        let phi = cyclotomic_polynomial(order);
        let degree = phi.len() - 1;
        let mut pow_table = Vec::with_capacity(order);
        let mut cur = vec![0i64; degree];
        if degree > 0 {
            cur[0] = 1;
        }
        for _ in 0..order {
            pow_table.push(cur.clone());
            // multiply by x and reduce with the monic Φ_N
            let top = cur[degree - 1];
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..degree {
                    cur[i] = cur[i]
                        .checked_sub(top.checked_mul(phi[i]).expect("overflow in power table"))
                        .expect("overflow in power table");
                }
            }
        }
        CycloField {
            order,
            degree,
            phi,
            pow_table,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Degree of `Φ_N`, i.e. Euler's totient of the order.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Integer coefficients of `Φ_N`, lowest degree first.
    pub fn phi(&self) -> &[i64] {
        &self.phi
    }
}

/// Coefficients (lowest degree first) of the `n`-th cyclotomic polynomial,
/// obtained from `x^n - 1` by exact division by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    let mut poly = vec![0i64; n + 1];
    poly[0] = -1;
    poly[n] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let divisor = cyclotomic_polynomial(d);
            poly = exact_div_monic(&poly, &divisor);
        }
    }
    poly
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for j in 0..=dd {
                rem[i + j] -= c * den[j];
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "cyclotomic division not exact");
    quot
}

/// An exact element `Σ c_j ζ_N^j` of the cyclotomic field of order `N`.
#[derive(Clone)]
pub struct CycloScalar {
    field: Arc<CycloField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloScalar {
    fn from_parts(field: Arc<CycloField>, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut s = CycloScalar { field, num, den };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn zero(order: usize) -> Self {
        let field = CycloField::get(order);
        let d = field.degree;
        CycloScalar {
            field,
            num: vec![BigInt::zero(); d],
            den: BigInt::one(),
        }
    }

    pub fn one(order: usize) -> Self {
        Self::from_int(order, 1)
    }

    pub fn from_int(order: usize, n: i64) -> Self {
        Self::from_bigint(order, BigInt::from(n))
    }

    pub fn from_bigint(order: usize, n: BigInt) -> Self {
        let mut z = Self::zero(order);
        z.num[0] = n;
        z
    }

    pub fn from_rational(order: usize, r: &BigRational) -> Self {
        let mut z = Self::zero(order);
        z.num[0] = r.numer().clone();
        z.den = r.denom().clone();
        z.normalize();
        z
    }

    /// `ζ_N^j` for any integer `j`.
    pub fn zeta_pow(order: usize, j: i64) -> Self {
        let field = CycloField::get(order);
        let idx = j.rem_euclid(order as i64) as usize;
        let num = field.pow_table[idx].iter().map(|&c| BigInt::from(c)).collect();
        CycloScalar {
            field,
            num,
            den: BigInt::one(),
        }
    }

    /// Builds `Σ coeffs[j] ζ_N^j`; indices are taken modulo `N`.
    pub fn from_coeffs(order: usize, coeffs: &[BigRational]) -> Self {
        let field = CycloField::get(order);
        let mut den = BigInt::one();
        for c in coeffs {
            if !c.is_zero() {
                den = den.lcm(c.denom());
            }
        }
        let d = field.degree;
        let mut num = vec![BigInt::zero(); d];
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let scaled = c.numer() * (&den / c.denom());
            let row = &field.pow_table[j % order];
            for (i, &t) in row.iter().enumerate() {
                if t != 0 {
                    num[i] += &scaled * t;
                }
            }
        }
        Self::from_parts(field, num, den)
    }

    pub fn order(&self) -> usize {
        self.field.order
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    /// Coefficients of the canonical representative in the power basis
    /// `1, ζ, …, ζ^{N-1}`; entries beyond `deg Φ_N` are zero.
    pub fn coeffs(&self) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.field.order];
        for (i, c) in self.num.iter().enumerate() {
            out[i] = BigRational::new(c.clone(), self.den.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// Returns the rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(
            self.field.order, other.field.order,
            "mixing cyclotomic orders {} and {}",
            self.field.order, other.field.order
        );
    }

    fn add_signed(&self, other: &Self, negate: bool) -> Self {
        self.check_order(other);
        let (num, den) = if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| if negate { a - b } else { a + b })
                .collect();
            (num, self.den.clone())
        } else {
            let l = self.den.lcm(&other.den);
            let fa = &l / &self.den;
            let fb = &l / &other.den;
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| {
                    let x = a * &fa;
                    let y = b * &fb;
                    if negate {
                        x - y
                    } else {
                        x + y
                    }
                })
                .collect();
            (num, l)
        };
        Self::from_parts(self.field.clone(), num, den)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_order(other);
        let d = self.field.degree;
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field.order);
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut num: Vec<BigInt> = prod[..d].to_vec();
        for (j, c) in prod.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            for (i, &t) in self.field.pow_table[j].iter().enumerate() {
                if t != 0 {
                    num[i] += c * t;
                }
            }
        }
        Self::from_parts(self.field.clone(), num, &self.den * &other.den)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm with `Φ_N` over `Q`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(format!(
                "inverse of zero in Q(zeta_{})",
                self.field.order
            )));
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.field.order, &r.recip()));
        }
        let phi: Vec<BigRational> = self
            .field
            .phi
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let a: Vec<BigRational> = self
            .num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect();
        let mut r0 = trim(phi);
        let mut r1 = trim(a);
        let mut s0: Vec<BigRational> = Vec::new();
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 {
            let (quot, rem) = poly_divmod(&r0, &r1);
            let next_s = poly_sub(&s0, &poly_mul(&quot, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, next_s);
        }
        // r1 is now a nonzero constant since Φ_N is irreducible
        let c = r1[0].clone();
        let coeffs: Vec<BigRational> = s1.into_iter().map(|x| x / &c).collect();
        Ok(Self::from_coeffs(self.field.order, &coeffs))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Self::one(self.field.order);
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            n >>= 1;
            if n > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Complex conjugate (the Galois automorphism `ζ ↦ ζ^{-1}`).
    pub fn conj(&self) -> Self {
        let n = self.field.order;
        let mut coeffs = vec![BigRational::zero(); n];
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(n - j) % n] = BigRational::new(c.clone(), self.den.clone());
            }
        }
        Self::from_coeffs(n, &coeffs)
    }

    /// Embedding into `C` with `ζ_N = e^{2πi/N}`.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.field.order as f64;
        let den_f = self.den.to_f64().unwrap_or(f64::INFINITY);
        let exact_den = den_f.is_finite() && den_f < 1e300;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = if exact_den {
                match c.to_f64() {
                    Some(x) if x.is_finite() => x / den_f,
                    _ => BigRational::new(c.clone(), self.den.clone())
                        .to_f64()
                        .unwrap_or(f64::NAN),
                }
            } else {
                BigRational::new(c.clone(), self.den.clone())
                    .to_f64()
                    .unwrap_or(f64::NAN)
            };
            let ang = 2.0 * std::f64::consts::PI * (j as f64) / n;
            acc += Complex64::from_polar(v, ang);
        }
        acc
    }

    /// Scales by an integer.
    pub fn scale(&self, k: i64) -> Self {
        let num = self.num.iter().map(|c| c * k).collect();
        Self::from_parts(self.field.clone(), num, self.den.clone())
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(BigRational::zero());
    }
    p
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() <= db {
        return (vec![BigRational::zero()], trim(rem));
    }
    let lead = b[db].clone();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if !c.is_zero() {
            for j in 0..=db {
                let t = &c * &b[j];
                rem[i + j] -= t;
            }
        }
        quot[i] = c;
    }
    rem.truncate(db.max(1));
    (trim(quot), trim(rem))
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

impl PartialEq for CycloScalar {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.den == other.den && self.num == other.num
    }
}

impl Eq for CycloScalar {}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloScalar({})", self)
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.den.is_one() {
            write!(f, "(")?;
        }
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (j, mag.is_one()) {
                (0, _) => write!(f, "{}", mag)?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{}*z", mag)?,
                (_, true) => write!(f, "z^{}", j)?,
                (_, false) => write!(f, "{}*z^{}", mag, j)?,
            }
        }
        if !self.den.is_one() {
            write!(f, ")/{}", self.den)?;
        }
        write!(f, " [z=zeta_{}]", self.field.order)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b CycloScalar> for &'a CycloScalar {
            type Output = CycloScalar;
            fn $m(self, rhs: &'b CycloScalar) -> CycloScalar {
                $body(self, rhs)
            }
        }
        impl $tr<CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $m(self, rhs: CycloScalar) -> CycloScalar {
                $body(&self, &rhs)
            }
        }
        impl<'b> $tr<&'b CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $m(self, rhs: &'b CycloScalar) -> CycloScalar {
                $body(&self, rhs)
            }
        }
        impl<'a> $tr<CycloScalar> for &'a CycloScalar {
            type Output = CycloScalar;
            fn $m(self, rhs: CycloScalar) -> CycloScalar {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &CycloScalar, b: &CycloScalar| a.add_signed(b, false));
forward_binop!(Sub, sub, |a: &CycloScalar, b: &CycloScalar| a.add_signed(b, true));
forward_binop!(Mul, mul, |a: &CycloScalar, b: &CycloScalar| a.mul_impl(b));

impl AddAssign<&CycloScalar> for CycloScalar {
    fn add_assign(&mut self, rhs: &CycloScalar) {
        *self = self.add_signed(rhs, false);
    }
}

impl SubAssign<&CycloScalar> for CycloScalar {
    fn sub_assign(&mut self, rhs: &CycloScalar) {
        *self = self.add_signed(rhs, true);
    }
}

impl MulAssign<&CycloScalar> for CycloScalar {
    fn mul_assign(&mut self, rhs: &CycloScalar) {
        *self = self.mul_impl(rhs);
    }
}

impl Neg for CycloScalar {
    type Output = CycloScalar;
    fn neg(mut self) -> CycloScalar {
        for c in &mut self.num {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(CycloField::get(96).degree(), 32);
        assert_eq!(CycloField::get(88).degree(), 40);
    }

    #[test]
    fn zeta_to_the_order_is_one() {
        for n in [8usize, 24, 40, 96] {
            let z = CycloScalar::zeta_pow(n, 1);
            assert!(z.pow(n as i64).unwrap().is_one());
            assert!(!z.pow(n as i64 - 1).unwrap().is_one());
            assert_eq!(z.pow(-1).unwrap(), CycloScalar::zeta_pow(n, -1));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let n = 40;
        let a = CycloScalar::zeta_pow(n, 3) + CycloScalar::from_int(n, 2) - CycloScalar::zeta_pow(n, 17);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert!(CycloScalar::zero(n).inv().is_err());
    }

    #[test]
    fn embedding_and_conjugation() {
        let n = 24;
        let z = CycloScalar::zeta_pow(n, 5);
        let e = z.to_complex();
        let ang = 2.0 * std::f64::consts::PI * 5.0 / 24.0;
        assert!((e - Complex64::from_polar(1.0, ang)).norm() < 1e-14);
        assert!((z.conj().to_complex() - e.conj()).norm() < 1e-14);
    }

    #[test]
    fn canonical_equality() {
        let n = 12;
        // 1 + ζ^4 + ζ^8 = 0 in Q(ζ_12) since ζ^4 is a primitive cube root of unity
        let s = CycloScalar::one(n) + CycloScalar::zeta_pow(n, 4) + CycloScalar::zeta_pow(n, 8);
        assert!(s.is_zero());
        let half = CycloScalar::from_rational(n, &BigRational::new(1.into(), 2.into()));
        assert_eq!(&half + &half, CycloScalar::one(n));
    }
}
