//! Exact scalar arithmetic.
//!
//! Three layers, each closed under the operations the rest of the crate
//! performs:
//!
//! - [`Rational`]: arbitrary-precision rationals;
//! - [`QSqrt2`]: the real quadratic field Q(sqrt 2), elements `a + b*sqrt 2`
//!   with rational `a`, `b`. Sign and order are exactly decidable, so every
//!   inequality check in the crate is a finite computation;
//! - [`Scalar`]: complex numbers with real and imaginary parts in Q(sqrt 2).
//!
//! The representation `a + b*sqrt 2` is unique because sqrt 2 is irrational,
//! which makes structural equality the same as mathematical equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision rational number.
///
/// Thin wrapper around [`BigRational`] fixing the textual form used across
/// the crate: `p/q` in lowest terms, `q` omitted when it is 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; fails on a zero denominator.
    pub fn new(num: i64, den: i64) -> crate::Result<Self> {
        Self::from_big(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> crate::Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        let mag = BigInt::one() << (k.unsigned_abs() as usize);
        if k >= 0 {
            Rational(BigRational::from_integer(mag))
        } else {
            Rational(BigRational::new(BigInt::one(), mag))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// -1, 0 or 1.
    pub fn sign(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> crate::Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn pow(&self, e: u32) -> Self {
        Rational(self.0.pow(e as i32))
    }

    /// Numerator in lowest terms; the denominator is kept positive.
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Exact square root, if one exists in the rationals.
    pub fn sqrt(&self) -> Option<Self> {
        self.nth_root(2)
    }

    /// Exact `n`-th root, if one exists in the rationals. `n >= 1`.
    pub fn nth_root(&self, n: u32) -> Option<Self> {
        assert!(n >= 1, "root index must be at least 1");
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_negative() && n % 2 == 0 {
            return None;
        }
        let root_of = |x: &BigInt| -> Option<BigInt> {
            let r = x.nth_root(n);
            (r.pow(n) == *x).then_some(r)
        };
        let num = root_of(&self.numer().abs())?;
        let den = root_of(self.denom())?;
        let num = if self.is_negative() { -num } else { num };
        Some(Rational(BigRational::new(num, den)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in rational {s:?}")))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in rational {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in rational {s:?}")));
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

/// Forwards the owned and mixed-ownership forms of a binary operator to the
/// reference-on-reference implementation.
macro_rules! forward_binop {
    ($t:ty, $imp:ident, $method:ident) => {
        impl $imp<$t> for $t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t {
                (&self).$method(&rhs)
            }
        }
        impl $imp<&$t> for $t {
            type Output = $t;
            fn $method(self, rhs: &$t) -> $t {
                (&self).$method(rhs)
            }
        }
        impl $imp<$t> for &$t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}
impl Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}
impl Mul<&Rational> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}
forward_binop!(Rational, Add, add);
forward_binop!(Rational, Sub, sub);
forward_binop!(Rational, Mul, mul);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}
impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}
impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}
impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

/// Element `a + b*sqrt 2` of the field Q(sqrt 2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    /// Rational part.
    pub a: Rational,
    /// Coefficient of sqrt 2.
    pub b: Rational,
}

impl QSqrt2 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn zero() -> Self {
        QSqrt2::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        QSqrt2::new(Rational::one(), Rational::zero())
    }

    pub fn sqrt2() -> Self {
        QSqrt2::new(Rational::zero(), Rational::one())
    }

    pub fn from_rational(a: Rational) -> Self {
        QSqrt2::new(a, Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        QSqrt2::from_rational(Rational::from_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// -1, 0 or 1. Exact: when the two terms have opposite signs the winner
    /// is decided by comparing `a^2` with `2 b^2`.
    pub fn sign(&self) -> i32 {
        let sa = self.a.sign();
        let sb = self.b.sign();
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        let a2 = &self.a * &self.a;
        let two_b2 = &(&self.b * &self.b) * &Rational::from_int(2);
        match a2.cmp(&two_b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            // a^2 = 2 b^2 with both parts nonzero would make sqrt 2 rational.
            Ordering::Equal => unreachable!("sqrt 2 is irrational"),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QSqrt2::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Field conjugate `a - b*sqrt 2`.
    pub fn conj_sqrt2(&self) -> Self {
        QSqrt2::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a^2 - 2 b^2`; zero only at zero.
    pub fn norm(&self) -> Rational {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Rational::from_int(2))
    }

    pub fn recip(&self) -> crate::Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of zero".into()));
        }
        let inv = n.recip()?;
        let c = self.conj_sqrt2();
        Ok(QSqrt2::new(&c.a * &inv, &c.b * &inv))
    }

    /// Exact square root within Q(sqrt 2), if one exists there.
    ///
    /// For `x = c + d*sqrt 2` with `x^2 = a + b*sqrt 2`, the parts satisfy
    /// `c^2 + 2 d^2 = a` and `2 c d = b`, so `c^2` and `2 d^2` are the roots
    /// of `t^2 - a t + b^2 / 2`. Both candidate splittings are tried.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(QSqrt2::zero());
        }
        let disc = self.norm().sqrt()?;
        let half = Rational::new(1, 2).expect("nonzero denominator");
        for d in [disc.clone(), -&disc] {
            let c_sq = &(&self.a + &d) * &half;
            let two_d_sq = &(&self.a - &d) * &half;
            let (Some(c), Some(dd)) = (c_sq.sqrt(), (&two_d_sq * &half).sqrt()) else {
                continue;
            };
            // c >= 0 by construction; pick the sign of the sqrt-2 part so the
            // cross term reproduces b.
            for dd in [dd.clone(), -&dd] {
                let cand = QSqrt2::new(c.clone(), dd);
                if &(&cand * &cand) == self {
                    return Some(cand);
                }
            }
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * std::f64::consts::SQRT_2
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt2", self.b);
        }
        if self.b.is_negative() {
            write!(f, "{} - {}*sqrt2", self.a, self.b.abs())
        } else {
            write!(f, "{} + {}*sqrt2", self.a, self.b)
        }
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            0 => Ordering::Equal,
            s if s < 0 => Ordering::Less,
            _ => Ordering::Greater,
        }
    }
}

impl Add<&QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}
impl Sub<&QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}
impl Mul<&QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &QSqrt2) -> QSqrt2 {
        // The purely rational case is by far the most common; skip the
        // three multiplications that would only shuffle zeros.
        if self.b.is_zero() && rhs.b.is_zero() {
            return QSqrt2::new(&self.a * &rhs.a, Rational::zero());
        }
        if self.is_zero() || rhs.is_zero() {
            return QSqrt2::zero();
        }
        let two = Rational::from_int(2);
        let a = &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * &two);
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        QSqrt2::new(a, b)
    }
}
forward_binop!(QSqrt2, Add, add);
forward_binop!(QSqrt2, Sub, sub);
forward_binop!(QSqrt2, Mul, mul);

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-&self.a, -&self.b)
    }
}
impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -&self
    }
}

impl AddAssign<&QSqrt2> for QSqrt2 {
    fn add_assign(&mut self, rhs: &QSqrt2) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}
impl SubAssign<&QSqrt2> for QSqrt2 {
    fn sub_assign(&mut self, rhs: &QSqrt2) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}
impl MulAssign<&QSqrt2> for QSqrt2 {
    fn mul_assign(&mut self, rhs: &QSqrt2) {
        *self = &*self * rhs;
    }
}

impl Serialize for QSqrt2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string()].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSqrt2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [a, b] = <[String; 2]>::deserialize(deserializer)?;
        let a = a.parse().map_err(|e: Error| D::Error::custom(e.to_string()))?;
        let b = b.parse().map_err(|e: Error| D::Error::custom(e.to_string()))?;
        Ok(QSqrt2::new(a, b))
    }
}

/// Complex number with real and imaginary parts in Q(sqrt 2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl Scalar {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::new(QSqrt2::zero(), QSqrt2::zero())
    }

    pub fn one() -> Self {
        Scalar::new(QSqrt2::one(), QSqrt2::zero())
    }

    pub fn i() -> Self {
        Scalar::new(QSqrt2::zero(), QSqrt2::one())
    }

    pub fn from_real(re: QSqrt2) -> Self {
        Scalar::new(re, QSqrt2::zero())
    }

    pub fn from_rational(a: Rational) -> Self {
        Scalar::from_real(QSqrt2::from_rational(a))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_real(QSqrt2::from_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -&self.im)
    }

    /// `|z|^2 = re^2 + im^2`, a nonnegative element of Q(sqrt 2).
    pub fn modulus_squared(&self) -> QSqrt2 {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})*i", self.im)
        } else {
            write!(f, "({}) + ({})*i", self.re, self.im)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}
impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}
impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // Real-by-real products dominate; avoid touching the imaginary
        // parts when both are zero.
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::new(&self.re * &rhs.re, QSqrt2::zero());
        }
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        Scalar::new(re, im)
    }
}
forward_binop!(Scalar, Add, add);
forward_binop!(Scalar, Sub, sub);
forward_binop!(Scalar, Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-&self.re, -&self.im)
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}
impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [
            self.re.a.to_string(),
            self.re.b.to_string(),
            self.im.a.to_string(),
            self.im.b.to_string(),
        ]
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parts = <[String; 4]>::deserialize(deserializer)?;
        let mut parsed = Vec::with_capacity(4);
        for p in &parts {
            parsed.push(
                p.parse::<Rational>()
                    .map_err(|e| D::Error::custom(e.to_string()))?,
            );
        }
        let [rea, reb, ima, imb]: [Rational; 4] = parsed.try_into().expect("length checked");
        Ok(Scalar::new(QSqrt2::new(rea, reb), QSqrt2::new(ima, imb)))
    }
}
