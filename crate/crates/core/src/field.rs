//! Exact arithmetic in a real quadratic field ℚ(√d).
//!
//! A [`Quad`] is `a + b·√d` with rational `a`, `b` and a square-free `d > 1`.
//! Purely rational values carry no field tag and mix freely with any field;
//! mixing two different irrational fields is a logic error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Element `a + b·√d` of a real quadratic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    a: BigRational,
    b: BigRational,
    /// Square-free radicand; `0` whenever `b == 0`.
    d: u64,
}

/// The field a document or computation lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct QuadField {
    /// `None` for ℚ itself.
    pub d: Option<u64>,
}

impl QuadField {
    pub const RATIONAL: QuadField = QuadField { d: None };

    pub fn sqrt(d: u64) -> Result<Self, Error> {
        let (k, core) = split_square(d);
        if core <= 1 || k != 1 {
            return Err(Error::Parse(format!("sqrt{d} is not a square-free radicand > 1")));
        }
        Ok(QuadField { d: Some(d) })
    }

    /// Accepts `Q`, `rational`, `sqrt5`, `sqrt(5)`.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") || t.eq_ignore_ascii_case("rational") {
            return Ok(Self::RATIONAL);
        }
        let rest = t
            .strip_prefix("sqrt")
            .ok_or_else(|| Error::Parse(format!("unknown field descriptor {t:?}")))?;
        let rest = rest.trim_start_matches('(').trim_end_matches(')');
        let d: u64 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad radicand in field descriptor {t:?}")))?;
        Self::sqrt(d)
    }

    /// Checks that `x` lives in this field.
    pub fn contains(&self, x: &Quad) -> bool {
        x.is_rational() || Some(x.d) == self.d
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            None => f.write_str("Q"),
            Some(d) => write!(f, "sqrt{d}"),
        }
    }
}

/// Writes `n = k²·core` with `core` square-free.
pub fn split_square(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut k = 1u64;
    let mut core = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= p;
        }
        if e % 2 == 1 {
            core *= p;
        }
        p += 1;
    }
    core *= m;
    (k, core)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl Quad {
    /// `a + b·√d`; `d` must be square-free (or anything when `b == 0`).
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() {
            Quad { a, b, d: 0 }
        } else {
            assert!(d > 1, "radicand must exceed 1");
            Quad { a, b, d }
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn from_rational(a: BigRational) -> Self {
        Quad {
            a,
            b: BigRational::zero(),
            d: 0,
        }
    }

    pub fn frac(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn ratio(p: &BigInt, q: &BigInt) -> Self {
        Self::from_rational(BigRational::new(p.clone(), q.clone()))
    }

    /// `√n` for any `n ≥ 0`, pulling square factors out of the radical.
    pub fn sqrt_of(n: u64) -> Self {
        let (k, core) = split_square(n);
        if core <= 1 {
            Self::from_int(k as i64)
        } else {
            Quad::new(BigRational::zero(), rat(k as i64), core)
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// Radicand, or `None` for a rational value.
    pub fn radicand(&self) -> Option<u64> {
        (self.d != 0).then_some(self.d)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    fn join_d(&self, other: &Quad) -> u64 {
        match (self.d, other.d) {
            (0, d) | (d, 0) => d,
            (d, e) if d == e => d,
            (d, e) => panic!("mixed quadratic fields sqrt{d} and sqrt{e}"),
        }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rat(self.d as i64);
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Quad {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn conjugate(&self) -> Quad {
        Quad {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }

    /// Field norm `a² − d·b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat(self.d as i64)
    }

    pub fn recip(&self) -> Quad {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in quadratic field");
        Quad::new(&self.a / &n, -(&self.b / &n), self.d)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Approximate value with a bound on its absolute error.
    pub fn approx(&self) -> (f64, f64) {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let t = if self.b.is_zero() {
            0.0
        } else {
            self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
        };
        let err = (a.abs() + t.abs()) * 1e-15 + 1e-300;
        (a + t, if err.is_finite() { err } else { f64::INFINITY })
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        let approx = self.to_f64();
        let mut n = if approx.is_finite() && approx.abs() < 4.0e15 {
            BigInt::from(approx.floor() as i64)
        } else {
            // a + sign(b)·⌊√(b²d)⌋ is within a couple of units.
            let b2d = &self.b * &self.b * rat(self.d as i64);
            let root = b2d.to_integer().sqrt();
            let r = if self.b.is_negative() { -root } else { root };
            self.a.floor().to_integer() + r
        };
        loop {
            let nq = Quad::from_bigint(n.clone());
            if &nq > self {
                n -= 1;
                continue;
            }
            let up = Quad::from_bigint(&n + 1);
            if &up <= self {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Quad {
        self - &Quad::from_bigint(self.floor())
    }

    /// True if the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    pub fn min(self, other: Quad) -> Quad {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Quad) -> Quad {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn pow2_recip(k: u32) -> Quad {
        Quad::from_rational(BigRational::new(BigInt::one(), BigInt::one() << k))
    }
}

impl Default for Quad {
    fn default() -> Self {
        Quad::zero()
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.is_rational() && other.is_rational() {
            return self.a.cmp(&other.a);
        }
        // floating filter; exact sign only for near ties
        let (x, ex) = self.approx();
        let (y, ey) = other.approx();
        let margin = 4.0 * (ex + ey);
        if x - y > margin {
            return Ordering::Greater;
        }
        if y - x > margin {
            return Ordering::Less;
        }
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn add(self, rhs: &Quad) -> Quad {
        let d = self.join_d(rhs);
        Quad::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl<'a> Sub<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn sub(self, rhs: &Quad) -> Quad {
        let d = self.join_d(rhs);
        Quad::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl<'a> Mul<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn mul(self, rhs: &Quad) -> Quad {
        let d = self.join_d(rhs);
        if self.b.is_zero() {
            return Quad::new(&self.a * &rhs.a, &self.a * &rhs.b, d);
        }
        if rhs.b.is_zero() {
            return Quad::new(&self.a * &rhs.a, &self.b * &rhs.a, d);
        }
        let a = &self.a * &rhs.a + &self.b * &rhs.b * rat(d as i64);
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Quad::new(a, b, d)
    }
}

impl<'a> Div<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn div(self, rhs: &Quad) -> Quad {
        if rhs.b.is_zero() {
            assert!(!rhs.a.is_zero(), "division by zero in quadratic field");
            return Quad::new(&self.a / &rhs.a, &self.b / &rhs.a, self.d);
        }
        self * &rhs.recip()
    }
}

impl Neg for &Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Quad> for Quad {
            type Output = Quad;
            fn $m(self, rhs: Quad) -> Quad {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Quad> for Quad {
            type Output = Quad;
            fn $m(self, rhs: &Quad) -> Quad {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Quad> for &'a Quad {
            type Output = Quad;
            fn $m(self, rhs: Quad) -> Quad {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<i64> for Quad {
    fn from(n: i64) -> Self {
        Quad::from_int(n)
    }
}

impl From<BigRational> for Quad {
    fn from(r: BigRational) -> Self {
        Quad::from_rational(r)
    }
}

impl From<BigInt> for Quad {
    fn from(n: BigInt) -> Self {
        Quad::from_bigint(n)
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&fmt_rat(&self.a));
        }
        if !self.a.is_zero() {
            f.write_str(&fmt_rat(&self.a))?;
            if self.b.is_positive() {
                f.write_str("+")?;
            }
        }
        write!(f, "{}*sqrt{}", fmt_rat(&self.b), self.d)
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (~{:.6})", self.to_f64())
    }
}

/// Parses `7`, `-7/5`, `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("bad rational {t:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|c| c.is_ascii_digit()) || fp.len() > 64 {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        if !ip_digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: BigInt = format!("{}{}", if ip_digits.is_empty() { "0" } else { ip_digits }, fp)
            .parse()
            .map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(whole, den);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

fn parse_radical(s: &str) -> Result<Quad, Error> {
    // "sqrt5", "sqrt(5)"
    let rest = s
        .strip_prefix("sqrt")
        .ok_or_else(|| Error::Parse(format!("expected sqrt term in {s:?}")))?;
    let rest = rest.strip_prefix('(').map_or(rest, |r| r.strip_suffix(')').unwrap_or(r));
    let n: u64 = rest
        .parse()
        .map_err(|_| Error::Parse(format!("bad radicand in {s:?}")))?;
    Ok(Quad::sqrt_of(n))
}

impl FromStr for Quad {
    type Err = Error;

    /// Accepts the serialized form `a+b*sqrtd` and a few variants
    /// (`sqrt2`, `-sqrt(2)`, `3/2*sqrt5`, `1-sqrt2`).
    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty field element".into()));
        }
        let Some(pos) = t.find("sqrt") else {
            return Ok(Quad::from_rational(parse_rational(&t)?));
        };
        // The irrational term starts at the last sign before "sqrt", if any.
        let head = &t[..pos];
        let split = head
            .char_indices()
            .filter(|&(i, c)| (c == '+' || c == '-') && i > 0)
            .map(|(i, _)| i)
            .next_back();
        let (a_str, b_str) = match split {
            Some(i) => (&t[..i], &t[i..]),
            None => ("", &t[..]),
        };
        let a = if a_str.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(a_str)?
        };
        let (sign, body) = match b_str.as_bytes().first() {
            Some(b'-') => (-1, &b_str[1..]),
            Some(b'+') => (1, &b_str[1..]),
            _ => (1, b_str),
        };
        let (coef, radical) = match body.split_once('*') {
            Some((c, r)) => (parse_rational(c)?, r),
            None => (BigRational::one(), body),
        };
        let root = parse_radical(radical)?;
        let b_term = &Quad::from_rational(coef * rat(sign)) * &root;
        Ok(&Quad::from_rational(a) + &b_term)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Quad {
        s.parse().unwrap()
    }

    #[test]
    fn sign_of_mixed_terms() {
        assert_eq!(q("7-5*sqrt2").signum(), -1);
        assert_eq!(q("-7+5*sqrt2").signum(), 1);
        assert_eq!(q("3-2*sqrt2").signum(), 1);
        assert_eq!(Quad::zero().signum(), 0);
    }

    #[test]
    fn display_and_parse_round_trip() {
        for s in ["2-1*sqrt2", "1/2+1/2*sqrt5", "-1*sqrt2", "7/5", "-3", "1*sqrt3"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("sqrt(8)"), q("2*sqrt2"));
        assert_eq!(q("1-sqrt2"), q("1-1*sqrt2"));
        assert_eq!(q("0.25"), Quad::frac(1, 4));
    }

    #[test]
    fn floor_near_integers() {
        assert_eq!(q("sqrt2").floor(), BigInt::from(1));
        assert_eq!(q("-1*sqrt2").floor(), BigInt::from(-2));
        // 41·√2 ≈ 57.98
        assert_eq!((q("sqrt2") * Quad::from_int(41)).floor(), BigInt::from(57));
        assert_eq!(Quad::frac(-1, 3).floor(), BigInt::from(-1));
    }

    #[test]
    fn field_operations() {
        let g = q("1/2+1/2*sqrt5");
        // golden ratio: g² = g + 1
        assert_eq!(&g * &g, &g + &Quad::one());
        assert_eq!(&g * &g.recip(), Quad::one());
        assert_eq!((&g / &g), Quad::one());
    }

    #[test]
    fn bad_inputs_are_errors() {
        for s in ["", "1/0", "sqrtx", "1+*sqrt2", "abc", "1..2"] {
            assert!(s.parse::<Quad>().is_err(), "{s}");
        }
    }

    #[test]
    #[should_panic(expected = "mixed quadratic fields")]
    fn mixing_fields_panics() {
        let _ = q("sqrt2") + q("sqrt3");
    }
}
