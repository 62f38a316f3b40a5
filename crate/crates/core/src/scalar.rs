//! Exact scalars: rationals and elements `a + b√D` of a real quadratic field.
//!
//! Coefficients are `i128` rationals with checked arithmetic. An overflow is a
//! hard failure (panic) rather than a silently wrong answer; the surfaces this
//! crate works with stay far below the limit.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Rational coefficient type.
pub type Q = Ratio<i128>;

#[inline]
fn overflow() -> ! {
    panic!("exact arithmetic overflow (i128 coefficients exhausted)")
}

/// Binary gcd; uses 64-bit steps once both operands fit.
#[inline]
fn gcd_u(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_u64(a as u64, b as u64) as u128;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
        if b <= u64::MAX as u128 && a <= u64::MAX as u128 {
            return (gcd_u64(a as u64, b as u64) as u128) << shift;
        }
    }
}

#[inline]
fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
fn gcd_i(a: i128, b: i128) -> i128 {
    gcd_u(a.unsigned_abs(), b.unsigned_abs()) as i128
}

/// Exact division by a positive divisor, with a 64-bit path for small operands.
#[inline]
fn div_exact(n: i128, g: i128) -> i128 {
    if g == 1 {
        return n;
    }
    if let (Ok(n64), Ok(g64)) = (i64::try_from(n), i64::try_from(g)) {
        return (n64 / g64) as i128;
    }
    n / g
}

#[inline]
fn cm(a: i128, b: i128) -> i128 {
    a.checked_mul(b).unwrap_or_else(|| overflow())
}

#[inline]
fn ca(a: i128, b: i128) -> i128 {
    a.checked_add(b).unwrap_or_else(|| overflow())
}

#[inline]
pub(crate) fn qadd(x: &Q, y: &Q) -> Q {
    let (a, b, c, d) = (*x.numer(), *x.denom(), *y.numer(), *y.denom());
    if a == 0 {
        return *y;
    }
    if c == 0 {
        return *x;
    }
    if b == d {
        let n = ca(a, c);
        let g = gcd_i(n, b);
        return Ratio::new_raw(div_exact(n, g), div_exact(b, g));
    }
    let g = gcd_i(b, d);
    let t = ca(cm(a, div_exact(d, g)), cm(c, div_exact(b, g)));
    let g2 = gcd_i(t, g);
    Ratio::new_raw(div_exact(t, g2), cm(div_exact(b, g), div_exact(d, g2)))
}

#[inline]
pub(crate) fn qsub(x: &Q, y: &Q) -> Q {
    qadd(x, &-*y)
}

#[inline]
pub(crate) fn qmul(x: &Q, y: &Q) -> Q {
    let (a, b, c, d) = (*x.numer(), *x.denom(), *y.numer(), *y.denom());
    if a == 0 || c == 0 {
        return Q::zero();
    }
    let g1 = gcd_i(a, d);
    let g2 = gcd_i(c, b);
    Ratio::new_raw(cm(div_exact(a, g1), div_exact(c, g2)), cm(div_exact(b, g2), div_exact(d, g1)))
}

#[inline]
pub(crate) fn qdiv(x: &Q, y: &Q) -> Q {
    assert!(!y.is_zero(), "division by zero");
    let (c, d) = (*y.numer(), *y.denom());
    let inv = if c < 0 { Ratio::new_raw(-d, -c) } else { Ratio::new_raw(d, c) };
    qmul(x, &inv)
}

/// Order of two rationals, cross-multiplying when that cannot overflow.
#[inline]
pub(crate) fn qcmp(x: &Q, y: &Q) -> Ordering {
    let (a, b, c, d) = (*x.numer(), *x.denom(), *y.numer(), *y.denom());
    if b == d {
        return a.cmp(&c);
    }
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => x.cmp(y),
    }
}

/// The number field a surface lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rational,
    /// `Q(√D)` with `D > 1` square-free.
    Quadratic(u32),
}

impl Field {
    pub fn quadratic(d: u32) -> Result<Field, Error> {
        if d < 2 || !is_square_free(d) {
            return Err(Error::InvalidField(d));
        }
        Ok(Field::Quadratic(d))
    }

    /// Smallest field containing both, or `None` when two distinct quadratic
    /// fields would have to mix.
    pub fn join(self, other: Field) -> Option<Field> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Some(f),
            (Field::Quadratic(a), Field::Quadratic(b)) if a == b => Some(self),
            _ => None,
        }
    }
}

pub fn is_square_free(n: u32) -> bool {
    if n == 0 {
        return false;
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// An exact real number `a + b√D`. Rationals carry `root == 1` and `b == 0`.
#[derive(Clone, Copy, Debug)]
pub struct Scalar {
    a: Q,
    b: Q,
    root: u32,
}

impl Scalar {
    pub const fn zero() -> Scalar {
        Scalar { a: Ratio::new_raw(0, 1), b: Ratio::new_raw(0, 1), root: 1 }
    }

    pub const fn one() -> Scalar {
        Scalar { a: Ratio::new_raw(1, 1), b: Ratio::new_raw(0, 1), root: 1 }
    }

    pub fn int(n: i128) -> Scalar {
        Scalar::rational(Q::from_integer(n))
    }

    pub fn ratio(num: i128, den: i128) -> Scalar {
        Scalar::rational(Q::new(num, den))
    }

    pub fn rational(a: Q) -> Scalar {
        Scalar { a, b: Q::zero(), root: 1 }
    }

    /// `a + b√d`; `d` must be square-free and greater than one.
    pub fn quadratic(a: Q, b: Q, d: u32) -> Result<Scalar, Error> {
        Field::quadratic(d)?;
        Ok(Scalar { a, b, root: d })
    }

    pub fn rational_part(&self) -> Q {
        self.a
    }

    pub fn irrational_part(&self) -> Q {
        self.b
    }

    /// Field this element is declared in.
    pub fn field(&self) -> Field {
        if self.root == 1 {
            Field::Rational
        } else {
            Field::Quadratic(self.root)
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn join_root(&self, other: &Scalar) -> u32 {
        if self.root == other.root {
            return self.root;
        }
        if self.b.is_zero() && (self.root == 1 || other.root != 1) {
            return other.root;
        }
        if other.b.is_zero() {
            return self.root;
        }
        panic!(
            "mixing elements of Q(√{}) and Q(√{})",
            self.root, other.root
        )
    }

    pub fn signum(&self) -> i32 {
        let sa = sign_q(&self.a);
        let sb = sign_q(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa >= 0 && sb > 0 {
            return 1;
        }
        if sa <= 0 && sb < 0 {
            return -1;
        }
        // opposite signs: compare a² with D b²
        let a2 = qmul(&self.a, &self.a);
        let db2 = qmul(&qmul(&self.b, &self.b), &Q::from_integer(self.root as i128));
        let c = match qcmp(&a2, &db2) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => 0,
        };
        if sa > 0 {
            c
        } else {
            -c
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.signum() < 0 {
            -*self
        } else {
            *self
        }
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero");
        if self.b.is_zero() {
            return Scalar { a: qdiv(&Q::one(), &self.a), b: Q::zero(), root: self.root };
        }
        let d = Q::from_integer(self.root as i128);
        let norm = qsub(&qmul(&self.a, &self.a), &qmul(&d, &qmul(&self.b, &self.b)));
        Scalar { a: qdiv(&self.a, &norm), b: qdiv(&-self.b, &norm), root: self.root }
    }

    pub fn square(&self) -> Scalar {
        *self * *self
    }

    /// Nearest-ish float view; for reporting only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.root as f64).sqrt()
    }

    /// Floor of a rational scalar.
    pub fn floor_rational(&self) -> Option<i128> {
        if !self.b.is_zero() {
            return None;
        }
        Some(self.a.floor().to_integer())
    }

    /// Largest power-free reduction: writes a rational as `n/d` with `d > 0`.
    pub fn as_rational(&self) -> Option<Q> {
        if self.b.is_zero() {
            Some(self.a)
        } else {
            None
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self >= other {
            self
        } else {
            other
        }
    }
}

fn sign_q(q: &Q) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i128> for Scalar {
    fn from(n: i128) -> Self {
        Scalar::int(n)
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Self {
        Scalar::rational(q)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.root == other.root)
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !self.b.is_zero() {
            self.root.hash(state);
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.b.is_zero() && other.b.is_zero() {
            return qcmp(&self.a, &other.a);
        }
        (*self - *other).signum().cmp(&0)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    #[inline]
    fn add(self, rhs: Scalar) -> Scalar {
        if self.b.is_zero() && rhs.b.is_zero() {
            return Scalar { a: qadd(&self.a, &rhs.a), b: Q::zero(), root: self.join_root(&rhs) };
        }
        let root = self.join_root(&rhs);
        Scalar { a: qadd(&self.a, &rhs.a), b: qadd(&self.b, &rhs.b), root }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    #[inline]
    fn sub(self, rhs: Scalar) -> Scalar {
        if self.b.is_zero() && rhs.b.is_zero() {
            return Scalar { a: qsub(&self.a, &rhs.a), b: Q::zero(), root: self.join_root(&rhs) };
        }
        let root = self.join_root(&rhs);
        Scalar { a: qsub(&self.a, &rhs.a), b: qsub(&self.b, &rhs.b), root }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    #[inline]
    fn mul(self, rhs: Scalar) -> Scalar {
        let root = self.join_root(&rhs);
        if self.b.is_zero() && rhs.b.is_zero() {
            return Scalar { a: qmul(&self.a, &rhs.a), b: Q::zero(), root };
        }
        if rhs.b.is_zero() {
            return Scalar { a: qmul(&self.a, &rhs.a), b: qmul(&self.b, &rhs.a), root };
        }
        if self.b.is_zero() {
            return Scalar { a: qmul(&self.a, &rhs.a), b: qmul(&self.a, &rhs.b), root };
        }
        let d = Q::from_integer(root as i128);
        let a = qadd(&qmul(&self.a, &rhs.a), &qmul(&d, &qmul(&self.b, &rhs.b)));
        let b = qadd(&qmul(&self.a, &rhs.b), &qmul(&self.b, &rhs.a));
        Scalar { a, b, root }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    #[inline]
    fn div(self, rhs: Scalar) -> Scalar {
        if rhs.b.is_zero() {
            let root = self.join_root(&rhs);
            return Scalar { a: qdiv(&self.a, &rhs.a), b: qdiv(&self.b, &rhs.a), root };
        }
        self * rhs.inv()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    #[inline]
    fn neg(self) -> Scalar {
        Scalar { a: -self.a, b: -self.b, root: self.root }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = *self + rhs;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = *self - rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    /// Canonical exact form: `p`, `p/q`, or `a+b√D` / `a-b√D`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_q(&self.a));
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}√{}", fmt_q(&self.a), sign, fmt_q(&self.b.abs()), self.root)
    }
}

fn parse_q(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p`, `p/q`, `a+b√D`, `b√D`, and the ASCII spelling `sqrt(D)` / `sqrtD`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.replace("sqrt(", "√").replace("sqrt", "√").replace(')', "");
        let Some(pos) = t.find('√') else {
            return Ok(Scalar::rational(parse_q(&t)?));
        };
        let root: u32 = t[pos + '√'.len_utf8()..]
            .parse()
            .map_err(|_| Error::Parse(format!("invalid radicand in '{s}'")))?;
        let head = &t[..pos];
        // split `head` into rational part and coefficient at the last interior sign
        let split = head
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (a, coeff) = match split {
            Some(i) => (parse_q(&head[..i])?, &head[i..]),
            None => (Q::zero(), head),
        };
        let coeff = coeff.strip_prefix('+').unwrap_or(coeff);
        let b = match coeff {
            "" => Q::one(),
            "-" => -Q::one(),
            c => parse_q(c.strip_suffix('*').unwrap_or(c))?,
        };
        if root == 1 {
            return Ok(Scalar::rational(qadd(&a, &b)));
        }
        if !is_square_free(root) {
            return Err(Error::InvalidField(root));
        }
        Ok(Scalar { a, b, root })
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Greatest common divisor helper re-exported for integer lattice code.
pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for t in ["0", "3", "-7/2", "1/2+1/2√5", "0-3√2", "-1/3+2/7√13"] {
            assert_eq!(s(t).to_string(), t);
        }
        assert_eq!(s("√5"), Scalar::quadratic(Q::zero(), Q::one(), 5).unwrap());
        assert_eq!(s("1/2 + sqrt(5)").to_string(), "1/2+1√5");
        assert_eq!(s("2-√3"), Scalar::quadratic(Q::from_integer(2), -Q::one(), 3).unwrap());
    }

    #[test]
    fn rejects_non_square_free_radicand() {
        assert!("1+√8".parse::<Scalar>().is_err());
        assert!(Field::quadratic(4).is_err());
        assert!(Field::quadratic(6).is_ok());
    }

    #[test]
    fn golden_ratio_identities() {
        let phi = s("1/2+1/2√5");
        assert_eq!(phi * phi, phi + Scalar::one());
        assert_eq!(phi.inv(), phi - Scalar::one());
        assert_eq!((phi - Scalar::int(2)).signum(), -1);
        assert!(phi > Scalar::ratio(161, 100) && phi < Scalar::ratio(162, 100));
    }

    #[test]
    fn sign_of_near_cancellation() {
        // 3363/2378 approximates √2 from above, 1393/985 from below
        assert_eq!(s("3363/2378-1√2").signum(), 1);
        assert_eq!(s("-3363/2378+1√2").signum(), -1);
        assert_eq!(s("1393/985-1√2").signum(), -1);
    }

    #[test]
    #[should_panic(expected = "mixing")]
    fn mixing_fields_panics() {
        let _ = s("√2") + s("√3");
    }

    #[test]
    fn rational_mixes_with_any_field() {
        let x = s("1/3") + s("√7");
        assert_eq!(x.field(), Field::Quadratic(7));
        assert_eq!(Field::Rational.join(Field::Quadratic(5)), Some(Field::Quadratic(5)));
        assert_eq!(Field::Quadratic(2).join(Field::Quadratic(5)), None);
    }
}
