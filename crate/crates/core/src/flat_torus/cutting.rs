use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::cf_arith::ContinuedFraction;
use crate::error::{Error, Result};
use crate::field::Quad;
use crate::torus_words::{Letter, LetterWord};

/// Crossing word of the line `y = θx + s` started at `(0, s)`: one `b`
/// per horizontal line, one `a` per vertical line, truncated to
/// `num_letters`.
pub fn cutting_sequence(s: &Quad, theta: &ContinuedFraction, num_letters: usize) -> Result<LetterWord> {
    if !(s.is_positive() && s < &Quad::one()) {
        return Err(Error::InvalidArgument(format!("start height {s} not in (0,1)")));
    }
    if theta.compare(&BigRational::zero())? != std::cmp::Ordering::Greater {
        return Err(Error::InvalidSlope("slope must be positive".into()));
    }
    let mut floors = FloorSource::new(theta, s)?;
    let mut out = Vec::with_capacity(num_letters);
    let mut prev = BigInt::zero();
    let mut j: u64 = 0;
    while out.len() < num_letters {
        j += 1;
        let f = floors.floor_at(j)?;
        let c = (&f - &prev).to_usize().expect("positive slope");
        prev = f;
        for _ in 0..c {
            if out.len() == num_letters {
                break;
            }
            out.push(Letter::B);
        }
        if out.len() < num_letters {
            out.push(Letter::A);
        }
    }
    Ok(LetterWord(out))
}

/// ⌊θj + s⌋ with an f64 filter in front of exact arithmetic; an exact
/// integer value is a lattice hit.
struct FloorSource<'a> {
    theta: &'a ContinuedFraction,
    exact: Option<Quad>,
    s: Quad,
    tf: f64,
    sf: f64,
}

impl<'a> FloorSource<'a> {
    fn new(theta: &'a ContinuedFraction, s: &Quad) -> Result<Self> {
        let exact = theta.value().cloned();
        if exact.is_none() && !s.is_rational() {
            return Err(Error::InvalidArgument(
                "irrational start height needs a closed-form slope".into(),
            ));
        }
        let tf = match &exact {
            Some(v) => v.to_f64(),
            None => {
                // deepest convergent available, at most 40
                let mut best = theta.convergent(0)?.rational();
                for k in 1..=40 {
                    match theta.convergent(k) {
                        Ok(c) => best = c.rational(),
                        Err(_) => break,
                    }
                }
                best.to_f64().unwrap_or(f64::NAN)
            }
        };
        Ok(FloorSource {
            theta,
            exact,
            s: s.clone(),
            tf,
            sf: s.to_f64(),
        })
    }

    fn floor_at(&mut self, j: u64) -> Result<BigInt> {
        let v = self.tf * j as f64 + self.sf;
        let fl = v.floor();
        let margin = 1e-6 + v.abs() * 1e-12;
        if v.is_finite() && v < 9.0e15 && v - fl > margin && fl + 1.0 - v > margin {
            return Ok(BigInt::from(fl as i64));
        }
        let jj = BigInt::from(j);
        match &self.exact {
            Some(t) => {
                let x = &(t * &Quad::from_bigint(jj.clone())) + &self.s;
                if x.is_integer() {
                    return Err(Error::SingularHit {
                        x: jj.to_string(),
                        y: x.to_string(),
                    });
                }
                Ok(x.floor())
            }
            None => {
                let s = self.s.as_rational().expect("checked rational").clone();
                self.theta.floor_affine(&jj, &s)
            }
        }
    }
}

/// Heights `s + (p/q)·l mod 1` for `l = 0..q`, sorted.
pub fn three_distance_points(s: &Quad, p: u64, q: u64) -> Result<Vec<Quad>> {
    if q == 0 || num_integer::gcd(p, q) != 1 {
        return Err(Error::InvalidSlope(format!("{p}/{q} not in lowest terms")));
    }
    let mut ys: Vec<Quad> = (0..q).map(|l| height(s, p, q, l)).collect();
    ys.sort();
    Ok(ys)
}

fn height(s: &Quad, p: u64, q: u64, l: u64) -> Quad {
    (s + &Quad::frac((p * l % q) as i64, q as i64)).fract()
}

/// Outcome of the lattice-clearance test between the θ-line and the
/// convergent line through the same start height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClearanceCertificate {
    pub k: usize,
    pub p: u64,
    pub q: u64,
    /// Index whose height is extremal (top for even k, bottom for odd k).
    pub l0: u64,
    pub heights: Vec<Quad>,
    /// `(l, ⌊θl+s⌋)` for every `l ≠ l₀`, equal to `⌊(p/q)l+s⌋`.
    pub agreements: Vec<(u64, BigInt)>,
}

pub fn homotopy_clearance(s: &Quad, theta: &ContinuedFraction, k: usize) -> Result<ClearanceCertificate> {
    if !(s.is_positive() && s < &Quad::one()) {
        return Err(Error::InvalidArgument(format!("start height {s} not in (0,1)")));
    }
    let c = theta.convergent(k)?;
    let (p, q) = c
        .small()
        .ok_or_else(|| Error::PrecisionExhausted(format!("convergent {k} too large")))?;
    let inv_q = Quad::frac(1, q as i64);
    let ok = if k.is_multiple_of(2) {
        inv_q < &Quad::one() - s
    } else {
        &inv_q < s
    };
    if !ok {
        return Err(Error::ClearanceViolated(format!(
            "1/{q} against start height {s} for k = {k}"
        )));
    }
    let heights: Vec<Quad> = (0..q).map(|l| height(s, p, q, l)).collect();
    let pick = |a: &Quad, b: &Quad| if k.is_multiple_of(2) { a > b } else { a < b };
    let mut l0 = 0;
    for l in 1..q as usize {
        if pick(&heights[l], &heights[l0]) {
            l0 = l;
        }
    }
    let l0 = l0 as u64;
    let mut agreements = Vec::with_capacity(q as usize);
    for l in (0..q).filter(|&l| l != l0) {
        let ll = BigInt::from(l);
        let lhs = match (theta.value(), s.as_rational()) {
            (_, Some(sr)) => theta.floor_affine(&ll, sr)?,
            (Some(t), None) => (&(t * &Quad::from_bigint(ll.clone())) + s).floor(),
            (None, None) => {
                return Err(Error::InvalidArgument(
                    "irrational start height needs a closed-form slope".into(),
                ))
            }
        };
        let rhs = (&Quad::frac((p * l) as i64, q as i64) + s).floor();
        if lhs != rhs {
            return Err(Error::ClearanceViolated(format!(
                "integer parts differ at l = {l}: {lhs} vs {rhs}"
            )));
        }
        agreements.push((l, lhs));
    }
    Ok(ClearanceCertificate {
        k,
        p,
        q,
        l0,
        heights,
        agreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str, th: &str, n: usize) -> Result<String> {
        cutting_sequence(&s.parse().unwrap(), &ContinuedFraction::parse(th).unwrap(), n)
            .map(|w| w.to_string())
    }

    #[test]
    fn five_thirds_sequence() {
        assert_eq!(word("1/4", "5/3", 8).unwrap(), "babbabba");
    }

    #[test]
    fn integer_slope() {
        assert_eq!(word("1/3", "2", 3).unwrap(), "bba");
    }

    #[test]
    fn singular_line() {
        match word("1/3", "5/3", 8) {
            Err(Error::SingularHit { x, y }) => assert_eq!((x.as_str(), y.as_str()), ("1", "2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generated_slope_matches_closed_form() {
        let a = word("1/4", "sqrt2", 500).unwrap();
        let b = word("1/4", "cf:[1;2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2...]", 500).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn three_distance() {
        let ys = three_distance_points(&Quad::frac(1, 4), 7, 5).unwrap();
        let want: Vec<Quad> = [1, 5, 9, 13, 17].iter().map(|&n| Quad::frac(n, 20)).collect();
        assert_eq!(ys, want);
        assert_eq!(three_distance_points(&Quad::frac(1, 3), 1, 1).unwrap(), vec![Quad::frac(1, 3)]);
    }

    #[test]
    fn clearance_examples() {
        let th = ContinuedFraction::sqrt2();
        let c = homotopy_clearance(&Quad::frac(1, 4), &th, 2).unwrap();
        assert_eq!(c.l0, 4);
        let ls: Vec<u64> = c.agreements.iter().map(|a| a.0).collect();
        assert_eq!(ls, vec![0, 1, 2, 3]);
        assert!(matches!(
            homotopy_clearance(&Quad::frac(9, 10), &th, 2),
            Err(Error::ClearanceViolated(_))
        ));
    }
}
