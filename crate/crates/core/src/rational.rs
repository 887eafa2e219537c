//! Exact rational scalars.
//!
//! [`Rat`] keeps values that fit into a pair of `i64`s in an inline form and
//! promotes to arbitrary precision only when an intermediate result overflows.
//! Every value is stored in lowest terms with a positive denominator, and the
//! inline form is always used when it can represent the value, so structural
//! equality and hashing coincide with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

/// An exact rational number.
#[derive(Clone)]
pub struct Rat(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Rat {
    pub fn zero() -> Self {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_int(v: i64) -> Self {
        Rat(Repr::Small(v, 1))
    }

    /// `num / den`; panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(v))
    }

    pub fn from_big(v: BigRational) -> Self {
        // BigRational is already reduced with a positive denominator.
        if let (Some(n), Some(d)) = (v.numer().to_i64(), v.denom().to_i64()) {
            Rat(Repr::Small(n, d))
        } else {
            Rat(Repr::Big(v))
        }
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n, d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat::from_int(n.div_floor(d)),
            Repr::Big(b) => Rat::from_big(b.floor()),
        }
    }

    pub fn ceil(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => {
                let q = n.div_floor(d);
                if q * d == *n {
                    Rat::from_int(q)
                } else {
                    Rat::from_int(q + 1)
                }
            }
            Repr::Big(b) => Rat::from_big(b.ceil()),
        }
    }

    /// Fractional part `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> Rat {
        self - &self.floor()
    }

    /// The value as an `i64` when it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            Repr::Small(..) => None,
            Repr::Big(b) if b.is_integer() => b.numer().to_i64(),
            Repr::Big(_) => None,
        }
    }

    pub fn floor_i64(&self) -> Option<i64> {
        self.floor().to_i64()
    }

    pub fn ceil_i64(&self) -> Option<i64> {
        self.ceil().to_i64()
    }

    pub fn recip(&self) -> Rat {
        Rat::one() / self
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Rat) -> Rat {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

impl From<i32> for Rat {
    fn from(v: i32) -> Self {
        Rat::from_int(v as i64)
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::from_bigint(v)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_ref(x: &Rat, y: &Rat) -> Rat {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        if *b == 1 && *d == 1 {
            if let Some(s) = a.checked_add(*c) {
                return Rat(Repr::Small(s, 1));
            }
        }
        let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
        if let Some(n) = (a * d).checked_add(c * b) {
            return Rat::from_i128(n, b * d);
        }
    }
    Rat::from_big(x.to_big() + y.to_big())
}

fn sub_ref(x: &Rat, y: &Rat) -> Rat {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        if *b == 1 && *d == 1 {
            if let Some(s) = a.checked_sub(*c) {
                return Rat(Repr::Small(s, 1));
            }
        }
        let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
        if let Some(n) = (a * d).checked_sub(c * b) {
            return Rat::from_i128(n, b * d);
        }
    }
    Rat::from_big(x.to_big() - y.to_big())
}

fn mul_ref(x: &Rat, y: &Rat) -> Rat {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        if *a == 0 || *c == 0 {
            return Rat::zero();
        }
        return Rat::from_i128((*a as i128) * (*c as i128), (*b as i128) * (*d as i128));
    }
    Rat::from_big(x.to_big() * y.to_big())
}

fn div_ref(x: &Rat, y: &Rat) -> Rat {
    assert!(!y.is_zero(), "division by zero");
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        return Rat::from_i128((*a as i128) * (*d as i128), (*b as i128) * (*c as i128));
    }
    Rat::from_big(x.to_big() / y.to_big())
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $f:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $f(self, rhs)
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $f(&self, rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $f(self, &rhs)
            }
        }
        impl $assign_trait<&Rat> for Rat {
            fn $assign_method(&mut self, rhs: &Rat) {
                *self = $f(self, rhs);
            }
        }
        impl $assign_trait<Rat> for Rat {
            fn $assign_method(&mut self, rhs: Rat) {
                *self = $f(self, &rhs);
            }
        }
    };
}

forward_binop!(Add, add, add_ref, AddAssign, add_assign);
forward_binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
forward_binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
forward_binop!(Div, div, div_ref, DivAssign, div_assign);

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rat(Repr::Small(m, *d)),
                None => Rat::from_big(-self.to_big()),
            },
            Repr::Big(b) => Rat::from_big(-b.clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, allow_sign: bool) -> Option<BigInt> {
    let digits = match s.strip_prefix(['-', '+']) {
        Some(rest) if allow_sign => rest,
        Some(_) => return None,
        None => s,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `p` or `p/q`; only the numerator may carry a sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRatError(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            None => parse_int(t, true).map(Rat::from_bigint).ok_or_else(err),
            Some((p, q)) => {
                let n = parse_int(p, true).ok_or_else(err)?;
                let d = parse_int(q, false).ok_or_else(err)?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Rat::from_big(BigRational::new(n, d)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational string \"p\" or \"p/q\", or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
        Ok(Rat::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
        Ok(Rat::from_bigint(BigInt::from(v)))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RatVisitor)
    }
}

/// Shorthand for `Rat::new(num, den)`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// Dot product of a rational vector with an integer vector.
pub fn dot_int(a: &[Rat], x: &[i64]) -> Rat {
    a.iter()
        .zip(x)
        .filter(|(_, &xi)| xi != 0)
        .map(|(ai, &xi)| ai * &Rat::from_int(xi))
        .sum()
}

pub fn dot(a: &[Rat], x: &[Rat]) -> Rat {
    a.iter().zip(x).map(|(ai, xi)| ai * xi).sum()
}

/// Least common multiple of the denominators, as a big integer.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_sign() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(1, -2).to_string(), "-1/2");
        assert_eq!(rat(6, 3).to_string(), "2");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3".parse::<Rat>().unwrap(), Rat::from_int(3));
        assert_eq!("-7/14".parse::<Rat>().unwrap(), rat(-1, 2));
        assert_eq!("+5/10".parse::<Rat>().unwrap(), rat(1, 2));
        assert!("1/-2".parse::<Rat>().is_err());
        assert!("1/0".parse::<Rat>().is_err());
        assert!("a/2".parse::<Rat>().is_err());
        assert!("".parse::<Rat>().is_err());
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(rat(-3, 2).floor(), Rat::from_int(-2));
        assert_eq!(rat(-3, 2).ceil(), Rat::from_int(-1));
        assert_eq!(rat(7, 3).floor(), Rat::from_int(2));
        assert_eq!(rat(7, 3).fract(), rat(1, 3));
        assert_eq!(Rat::from_int(4).ceil(), Rat::from_int(4));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sum = &big + &big;
        assert_eq!(sum.to_string(), "18446744073709551614");
        let back = &sum - &big;
        assert_eq!(back, big);
        // Canonical repr after demotion keeps equality structural.
        assert!(matches!(back.0, Repr::Small(..)));
        let tiny = rat(1, i64::MAX);
        let prod = &tiny * &tiny;
        assert_eq!(&prod * &Rat::from_int(i64::MAX), tiny);
    }

    #[test]
    fn ordering_mixed_representations() {
        let big = &Rat::from_int(i64::MAX) * &Rat::from_int(4);
        assert!(Rat::from_int(1) < big);
        assert!(-&big < Rat::from_int(i64::MIN));
    }

    #[test]
    fn serde_roundtrip() {
        let v = vec![rat(1, 3), Rat::from_int(-4)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["1/3","-4"]"#);
        let back: Vec<Rat> = serde_json::from_str(r#"["1/3", -4]"#).unwrap();
        assert_eq!(back, v);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_rat() -> impl Strategy<Value = Rat> {
            (any::<i64>(), 1..i64::MAX).prop_map(|(n, d)| Rat::new(n, d))
        }

        proptest! {
            #[test]
            fn field_ops_match_bigrational(a in arb_rat(), b in arb_rat()) {
                let (ba, bb) = (a.to_big(), b.to_big());
                prop_assert_eq!((&a + &b).to_big(), &ba + &bb);
                prop_assert_eq!((&a - &b).to_big(), &ba - &bb);
                prop_assert_eq!((&a * &b).to_big(), &ba * &bb);
                if !b.is_zero() {
                    prop_assert_eq!((&a / &b).to_big(), &ba / &bb);
                }
                prop_assert_eq!(a.cmp(&b), ba.cmp(&bb));
            }

            #[test]
            fn display_parse_roundtrip(a in arb_rat()) {
                prop_assert_eq!(a.to_string().parse::<Rat>().unwrap(), a);
            }
        }
    }
}
