//! Continued fractions for slopes θ: coefficient sources, convergents,
//! exact comparison and rational enclosures.
//!
//! θ is never held as a float. Rational and eventually periodic expansions
//! carry an exact [`Quad`] value; other sources are compared by refining
//! convergent enclosures.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{split_square, Quad};

/// Generator of coefficients `cᵢ` for `i ≥ prefix.len()`.
pub type CoefficientFn = Arc<dyn Fn(usize) -> u64 + Send + Sync>;

/// What follows the explicitly stored coefficients.
#[derive(Clone)]
pub enum Tail {
    /// Finite expansion: θ is rational.
    Terminates,
    /// The block repeats forever: θ is a quadratic irrational.
    Periodic(Vec<u64>),
    /// Coefficient `i` is `f(i)` (global index).
    Generated(CoefficientFn),
    /// Irrational, but nothing beyond the prefix is known.
    Unknown,
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Terminates => f.write_str("Terminates"),
            Tail::Periodic(p) => write!(f, "Periodic({p:?})"),
            Tail::Generated(_) => f.write_str("Generated(..)"),
            Tail::Unknown => f.write_str("Unknown"),
        }
    }
}

/// A slope θ = [c₀; c₁, c₂, …].
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    prefix: Vec<u64>,
    tail: Tail,
    value: Option<Quad>,
    name: Option<String>,
}

/// The k-th convergent pₖ/qₖ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub k: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> Quad {
        Quad::ratio(&self.p, &self.q)
    }

    pub fn rational(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    /// (p, q) as machine integers, when they fit.
    pub fn small(&self) -> Option<(u64, u64)> {
        Some((self.p.to_u64()?, self.q.to_u64()?))
    }
}

impl fmt::Display for Convergent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

fn check_coefficients(cs: &[u64], start: usize) -> Result<()> {
    for (i, &c) in cs.iter().enumerate() {
        if i + start >= 1 && c == 0 {
            return Err(Error::Parse(format!(
                "coefficient c{} must be positive",
                i + start
            )));
        }
    }
    Ok(())
}

/// Numerator and denominator recurrences over a coefficient list, returning
/// the last two (p, q) pairs: ((pₙ₋₁, qₙ₋₁), (pₙ₋₂, qₙ₋₂)).
fn recurrence(cs: &[u64]) -> ((BigInt, BigInt), (BigInt, BigInt)) {
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    for &c in cs {
        let c = BigInt::from(c);
        let p = &c * &p1 + &p2;
        let q = &c * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    ((p1, q1), (p2, q2))
}

/// Exact value of [prefix; period, period, …].
fn periodic_value(prefix: &[u64], period: &[u64]) -> Option<Quad> {
    // y = [period…] solves Q y² + (Q' − P) y − P' = 0.
    let ((p, q), (pp, qp)) = recurrence(period);
    let b = &qp - &p;
    let disc: BigInt = &b * &b + BigInt::from(4) * &q * &pp;
    let disc_u = disc.to_u64().filter(|&d| d < 1_000_000_000_000)?;
    let (k, core) = split_square(disc_u);
    let root = if core <= 1 {
        Quad::from_int(k as i64)
    } else {
        Quad::new(
            BigRational::zero(),
            BigRational::from_integer(BigInt::from(k)),
            core,
        )
    };
    let y = &(&Quad::from_bigint(&p - &qp) + &root) / &Quad::from_bigint(BigInt::from(2) * &q);
    let ((a, bq), (a2, b2)) = recurrence(prefix);
    let num = &(&Quad::from_bigint(a) * &y) + &Quad::from_bigint(a2);
    let den = &(&Quad::from_bigint(bq) * &y) + &Quad::from_bigint(b2);
    Some(&num / &den)
}

impl ContinuedFraction {
    /// Finite expansion of a rational; rewritten to canonical form.
    pub fn finite(mut cs: Vec<u64>) -> Result<Self> {
        if cs.is_empty() {
            return Err(Error::Parse("empty continued fraction".into()));
        }
        check_coefficients(&cs, 0)?;
        while cs.len() > 1 && *cs.last().unwrap() == 1 {
            cs.pop();
            *cs.last_mut().unwrap() += 1;
        }
        let ((p, q), _) = recurrence(&cs);
        Ok(ContinuedFraction {
            value: Some(Quad::ratio(&p, &q)),
            prefix: cs,
            tail: Tail::Terminates,
            name: None,
        })
    }

    /// [prefix; period, period, …]. `prefix` must hold at least c₀.
    pub fn periodic(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if prefix.is_empty() || period.is_empty() {
            return Err(Error::Parse("periodic expansion needs c0 and a period".into()));
        }
        check_coefficients(&prefix, 0)?;
        check_coefficients(&period, 1)?;
        let value = periodic_value(&prefix, &period);
        Ok(ContinuedFraction {
            prefix,
            tail: Tail::Periodic(period),
            value,
            name: None,
        })
    }

    /// Irrational θ known only through these leading coefficients.
    pub fn truncated(prefix: Vec<u64>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Parse("empty continued fraction".into()));
        }
        check_coefficients(&prefix, 0)?;
        Ok(ContinuedFraction {
            prefix,
            tail: Tail::Unknown,
            value: None,
            name: None,
        })
    }

    /// Lazily generated irrational expansion; `f(i)` must be ≥ 1 for `i ≥ 1`.
    pub fn generated(name: &str, f: CoefficientFn) -> Self {
        ContinuedFraction {
            prefix: Vec::new(),
            tail: Tail::Generated(f),
            value: None,
            name: Some(name.to_string()),
        }
    }

    /// e = [2; 1, 2, 1, 1, 4, 1, 1, 6, …].
    pub fn euler_e() -> Self {
        Self::generated(
            "e",
            Arc::new(|i| match i {
                0 => 2,
                i if i % 3 == 2 => 2 * (i as u64 + 1) / 3,
                _ => 1,
            }),
        )
    }

    pub fn sqrt2() -> Self {
        Self::periodic(vec![1], vec![2]).expect("valid")
    }

    pub fn golden() -> Self {
        Self::periodic(vec![1], vec![1]).expect("valid")
    }

    pub fn from_rational(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::InvalidSlope(format!("{r} is negative")));
        }
        let (mut n, mut d) = (r.numer().clone(), r.denom().clone());
        let mut cs = Vec::new();
        while !d.is_zero() {
            let c = &n / &d;
            cs.push(
                c.to_u64()
                    .ok_or_else(|| Error::InvalidSlope("coefficient overflow".into()))?,
            );
            let rem = &n - &c * &d;
            n = std::mem::replace(&mut d, rem);
        }
        Self::finite(cs)
    }

    /// Expansion of a positive element of ℚ(√d) (eventually periodic by
    /// Lagrange's theorem).
    pub fn from_quad(x: &Quad) -> Result<Self> {
        if !x.is_positive() && !x.is_zero() {
            return Err(Error::InvalidSlope(format!("{x} is negative")));
        }
        if let Some(r) = x.as_rational() {
            return Self::from_rational(r);
        }
        let mut cs = Vec::new();
        let mut seen: HashMap<Quad, usize> = HashMap::new();
        let mut cur = x.clone();
        for i in 0..100_000 {
            if i >= 1 {
                if let Some(&j) = seen.get(&cur) {
                    let period = cs.split_off(j);
                    let mut cf = Self::periodic(cs, period)?;
                    if cf.value.as_ref() != Some(x) {
                        cf.value = Some(x.clone());
                    }
                    return Ok(cf);
                }
                seen.insert(cur.clone(), i);
            }
            let c = cur.floor();
            cs.push(
                c.to_u64()
                    .ok_or_else(|| Error::InvalidSlope("coefficient overflow".into()))?,
            );
            cur = (&cur - &Quad::from_bigint(c)).recip();
        }
        Err(Error::PrecisionExhausted("period not found".into()))
    }

    /// `√n` for non-square `n`.
    pub fn sqrt_of(n: u64) -> Result<Self> {
        if n.sqrt() * n.sqrt() == n {
            return Self::from_rational(&BigRational::from_integer(BigInt::from(n.sqrt())));
        }
        Self::from_quad(&Quad::sqrt_of(n))
    }

    pub fn coefficient(&self, i: usize) -> Option<u64> {
        if let Some(&c) = self.prefix.get(i) {
            return Some(c);
        }
        match &self.tail {
            Tail::Terminates | Tail::Unknown => None,
            Tail::Periodic(p) => Some(p[(i - self.prefix.len()) % p.len()]),
            Tail::Generated(f) => Some(f(i)),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.tail, Tail::Terminates)
    }

    /// Number of coefficients, for a rational θ.
    pub fn finite_len(&self) -> Option<usize> {
        self.is_rational().then_some(self.prefix.len())
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Exact value, when θ is rational or a quadratic irrational.
    pub fn value(&self) -> Option<&Quad> {
        self.value.as_ref()
    }

    pub fn exact_value(&self) -> Result<&Quad> {
        self.value.as_ref().ok_or_else(|| {
            Error::PrecisionExhausted(format!("{self} has no exact closed form"))
        })
    }

    /// Square-free d with θ ∈ ℚ(√d).
    pub fn field_descriptor(&self) -> Option<u64> {
        self.value.as_ref().and_then(Quad::radicand)
    }

    /// ⌊θ⌋ = c₀.
    pub fn floor_part(&self) -> u64 {
        self.coefficient(0).expect("c0 always present")
    }

    fn missing(&self, k: usize) -> Error {
        if self.is_rational() {
            Error::IndexOutOfRange(format!(
                "{self} has only {} convergents, asked for index {k}",
                self.prefix.len()
            ))
        } else {
            Error::PrecisionExhausted(format!("coefficient c{k} of {self} is unknown"))
        }
    }

    /// p₀/q₀, …, p_{k_max}/q_{k_max}.
    pub fn convergents(&self, k_max: usize) -> Result<Vec<Convergent>> {
        let mut out = Vec::with_capacity(k_max + 1);
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
        for k in 0..=k_max {
            let c = BigInt::from(self.coefficient(k).ok_or_else(|| self.missing(k))?);
            let p = &c * &p1 + &p2;
            let q = &c * &q1 + &q2;
            out.push(Convergent {
                k,
                p: p.clone(),
                q: q.clone(),
            });
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
        }
        Ok(out)
    }

    pub fn convergent(&self, k: usize) -> Result<Convergent> {
        Ok(self.convergents(k)?.pop().expect("nonempty"))
    }

    /// Closed interval between the k-th and (k+1)-th convergents; an
    /// irrational θ lies strictly inside.
    pub fn enclosure(&self, k: usize) -> Result<(BigRational, BigRational)> {
        let cs = self.convergents(k + 1)?;
        let a = cs[k].rational();
        let b = cs[k + 1].rational();
        Ok(if a <= b { (a, b) } else { (b, a) })
    }

    /// Exact ordering of θ against a rational.
    pub fn compare(&self, r: &BigRational) -> Result<Ordering> {
        if let Some(v) = &self.value {
            return Ok(v.cmp(&Quad::from_rational(r.clone())));
        }
        let mut k = 0;
        loop {
            // Without a closed form θ is irrational, hence strictly inside.
            let (lo, hi) = self.enclosure(k)?;
            if r <= &lo {
                return Ok(Ordering::Greater);
            }
            if r >= &hi {
                return Ok(Ordering::Less);
            }
            k += 1;
        }
    }

    /// ⌊θ·m + s⌋ for rational `s`, exactly.
    pub fn floor_affine(&self, m: &BigInt, s: &BigRational) -> Result<BigInt> {
        if let Some(v) = &self.value {
            let x = &(v * &Quad::from_bigint(m.clone())) + &Quad::from_rational(s.clone());
            return Ok(x.floor());
        }
        let mq = BigRational::from_integer(m.clone());
        let mut k = 0;
        loop {
            let (lo, hi) = self.enclosure(k)?;
            let (a, b) = if m.is_negative() {
                (&hi * &mq + s, &lo * &mq + s)
            } else {
                (&lo * &mq + s, &hi * &mq + s)
            };
            let fa = a.floor();
            // θ is strictly inside, so only a hit at the upper end is ambiguous.
            if fa == b.floor() && (b != b.floor() || m.is_zero()) {
                return Ok(fa.to_integer());
            }
            k += 1;
        }
    }

    /// Exact |qₖθ − pₖ|.
    pub fn approximation_error(&self, k: usize) -> Result<Quad> {
        let c = self.convergent(k)?;
        let v = self.exact_value()?;
        Ok((&(v * &Quad::from_bigint(c.q)) - &Quad::from_bigint(c.p)).abs())
    }

    /// Whether |qₖθ − pₖ| < 1/qₖ₊₁, decided exactly (closed form) or by
    /// enclosure.
    pub fn satisfies_approximation_bound(&self, k: usize) -> Result<bool> {
        let cs = self.convergents(k + 1)?;
        let bound = BigRational::new(BigInt::one(), cs[k + 1].q.clone());
        if let Some(v) = &self.value {
            let err = (&(v * &Quad::from_bigint(cs[k].q.clone()))
                - &Quad::from_bigint(cs[k].p.clone()))
                .abs();
            return Ok(err < Quad::from_rational(bound));
        }
        // θ strictly between the (k+1)-th and (k+2)-th convergents.
        let (lo, hi) = self.enclosure(k + 1)?;
        let qk = BigRational::from_integer(cs[k].q.clone());
        let pk = BigRational::from_integer(cs[k].p.clone());
        let e1 = (&lo * &qk - &pk).abs();
        let e2 = (&hi * &qk - &pk).abs();
        Ok(e1.max(e2) <= bound)
    }

    /// Parses the text forms `cf:[1;2,2,2]`, `cf:[1;2]p`,
    /// `cf:[1;2,3]periodic(1)`, `cf:[1;2,2,2...]`, `p/q`, `sqrt2`,
    /// `sqrt(n)`, `golden`, `e`, and field elements such as `1/2+1/2*sqrt5`.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = t.strip_prefix("cf:") {
            return Self::parse_cf(body);
        }
        let named = match t.as_str() {
            "golden" | "phi" => Some(Self::golden()),
            "e" => Some(Self::euler_e()),
            _ => None,
        };
        if let Some(mut cf) = named {
            cf.name = Some(t);
            return Ok(cf);
        }
        let x: Quad = t.parse()?;
        let mut cf = Self::from_quad(&x)?;
        if t.starts_with("sqrt") {
            cf.name = Some(t);
        }
        Ok(cf)
    }

    fn parse_cf(body: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad continued fraction cf:{body}"));
        let inner_start = body.strip_prefix('[').ok_or_else(bad)?;
        let close = inner_start.find(']').ok_or_else(bad)?;
        let inner = &inner_start[..close];
        let suffix = &inner_start[close + 1..];
        let (inner, dots) = match inner.strip_suffix("...") {
            Some(rest) => (rest.trim_end_matches(','), true),
            None => (inner, false),
        };
        let (head, rest) = match inner.split_once(';') {
            Some((h, r)) => (h, r),
            None => (inner, ""),
        };
        let parse_u = |x: &str| x.parse::<u64>().map_err(|_| bad());
        let mut cs = vec![parse_u(head)?];
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            cs.push(parse_u(part)?);
        }
        if dots {
            if !suffix.is_empty() {
                return Err(bad());
            }
            return Self::truncated(cs);
        }
        match suffix {
            "" => Self::finite(cs),
            "p" => {
                if cs.len() < 2 {
                    return Err(bad());
                }
                let period = cs.split_off(1);
                Self::periodic(cs, period)
            }
            s => {
                let m = s
                    .strip_prefix("periodic(")
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let m: usize = m.parse().map_err(|_| bad())?;
                if m == 0 || m >= cs.len() {
                    return Err(bad());
                }
                let period = cs.split_off(cs.len() - m);
                Self::periodic(cs, period)
            }
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            return f.write_str(n);
        }
        let list = |cs: &[u64]| {
            let mut s = cs[0].to_string();
            if cs.len() > 1 {
                s.push(';');
                s.push_str(
                    &cs[1..]
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join(","),
                );
            }
            s
        };
        match &self.tail {
            Tail::Terminates => write!(f, "cf:[{}]", list(&self.prefix)),
            Tail::Unknown => write!(f, "cf:[{}...]", list(&self.prefix)),
            Tail::Periodic(p) => {
                let mut all = self.prefix.clone();
                all.extend(p);
                write!(f, "cf:[{}]periodic({})", list(&all), p.len())
            }
            Tail::Generated(_) => f.write_str("cf:generated"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(cf: &ContinuedFraction, k: usize) -> Vec<(i64, i64)> {
        cf.convergents(k)
            .unwrap()
            .iter()
            .map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap()))
            .collect()
    }

    /// Evaluates [c₀; …, cₖ] bottom-up, independent of the recurrence.
    fn eval_finite(cs: &[u64]) -> BigRational {
        let mut x = BigRational::from_integer(BigInt::from(*cs.last().unwrap()));
        for &c in cs[..cs.len() - 1].iter().rev() {
            x = BigRational::from_integer(BigInt::from(c)) + x.recip();
        }
        x
    }

    #[test]
    fn golden_convergents() {
        let g = ContinuedFraction::golden();
        assert_eq!(pairs(&g, 4), vec![(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]);
        for c in g.convergents(10).unwrap() {
            let cs: Vec<u64> = (0..=c.k).map(|i| g.coefficient(i).unwrap()).collect();
            assert_eq!(eval_finite(&cs), c.rational());
        }
    }

    #[test]
    fn sqrt2_convergents() {
        let s = ContinuedFraction::sqrt2();
        assert_eq!(pairs(&s, 4), vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
        assert_eq!(s.value().unwrap(), &"sqrt2".parse::<Quad>().unwrap());
        assert_eq!(s.field_descriptor(), Some(2));
    }

    #[test]
    fn zero_depth_rational() {
        let c = ContinuedFraction::finite(vec![4]).unwrap();
        assert_eq!(pairs(&c, 0), vec![(4, 1)]);
        assert!(matches!(c.convergents(1), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn canonical_form() {
        let c = ContinuedFraction::finite(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(c.to_string(), "cf:[1;1,2]");
        assert_eq!(c.value().unwrap(), &Quad::frac(5, 3));
        let r = ContinuedFraction::from_rational(&BigRational::new(5.into(), 3.into())).unwrap();
        assert_eq!(r.to_string(), "cf:[1;1,2]");
    }

    #[test]
    fn floor_parts() {
        assert_eq!(ContinuedFraction::sqrt2().floor_part(), 1);
        assert_eq!(ContinuedFraction::parse("5/3").unwrap().floor_part(), 1);
        assert_eq!(ContinuedFraction::golden().floor_part(), 1);
    }

    #[test]
    fn compare_against_convergents() {
        let s = ContinuedFraction::sqrt2();
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        assert_eq!(s.compare(&r(7, 5)).unwrap(), Ordering::Greater);
        assert_eq!(s.compare(&r(3, 2)).unwrap(), Ordering::Less);
        let f = ContinuedFraction::parse("5/3").unwrap();
        assert_eq!(f.compare(&r(5, 3)).unwrap(), Ordering::Equal);
        // enclosure route on a generated expansion
        let e = ContinuedFraction::euler_e();
        assert_eq!(e.compare(&r(2718, 1000)).unwrap(), Ordering::Greater);
        assert_eq!(e.compare(&r(2719, 1000)).unwrap(), Ordering::Less);
    }

    #[test]
    fn truncated_source_exhausts() {
        let t = ContinuedFraction::parse("cf:[1;2,2,2...]").unwrap();
        assert!(matches!(t.convergents(5), Err(Error::PrecisionExhausted(_))));
        let r = BigRational::new(7.into(), 5.into());
        assert_eq!(t.compare(&r).unwrap(), Ordering::Greater);
        let close = BigRational::new(41.into(), 29.into());
        assert!(matches!(t.compare(&close), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn text_forms() {
        let a = ContinuedFraction::parse("cf:[1;2]p").unwrap();
        assert_eq!(a.value(), ContinuedFraction::sqrt2().value());
        let b = ContinuedFraction::parse("cf:[1;2,2,2]periodic(1)").unwrap();
        assert_eq!(b.value(), a.value());
        let g = ContinuedFraction::parse("1/2+1/2*sqrt5").unwrap();
        assert_eq!(pairs(&g, 3), vec![(1, 1), (2, 1), (3, 2), (5, 3)]);
        let s3 = ContinuedFraction::parse("sqrt(3)").unwrap();
        assert_eq!(s3.coefficient(1), Some(1));
        assert_eq!(s3.coefficient(2), Some(2));
        for bad in ["cf:[", "cf:[1;0,2]", "cf:[1;2]q", "cf:[1]p", "cf:[;]", "cf:[1;2]periodic(5)"] {
            assert!(ContinuedFraction::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn floor_affine_matches_exact() {
        let e = ContinuedFraction::euler_e();
        // e·100 + 1/3 ≈ 272.15
        let f = e
            .floor_affine(&BigInt::from(100), &BigRational::new(1.into(), 3.into()))
            .unwrap();
        assert_eq!(f, BigInt::from(272));
    }
}
