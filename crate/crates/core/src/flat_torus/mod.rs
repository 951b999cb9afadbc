//! Exact plane geometry on the unit-square torus `(ℂ − ℤ²)/ℤ²`.
//!
//! Paths live in the universal cover. A point lying on a grid line is read
//! as lying just above / to the right of it, so a crossing is recorded when
//! a path moves strictly past the line in the perturbed picture.

mod cutting;
mod growth;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::field::Quad;
use crate::torus_words::{Letter, LetterWord};

pub use cutting::{
    cutting_sequence, homotopy_clearance, three_distance_points, ClearanceCertificate,
};
pub use growth::{
    linear_growth_probe, prescribed_growth_path, Direction, GrowthRow, GrowthTable,
    PrescribedGrowth, TabulatedFunction,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatPoint {
    pub x: Quad,
    pub y: Quad,
}

impl FlatPoint {
    pub fn new(x: Quad, y: Quad) -> Self {
        FlatPoint { x, y }
    }

    pub fn is_lattice(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn translate(&self, dx: &Quad, dy: &Quad) -> FlatPoint {
        FlatPoint::new(&self.x + dx, &self.y + dy)
    }
}

impl fmt::Display for FlatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Tag attached to a path vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Marker {
    Start,
    /// Ordinary vertex between segments.
    Joint,
    /// End of a vertical hop joining two leaf representatives.
    Connector,
    /// `n` loops `BAba` around the cusp are inserted here; no measure.
    CuspLoop(u32),
}

impl Marker {
    pub fn name(&self) -> String {
        match self {
            Marker::Start => "start".into(),
            Marker::Joint => "joint".into(),
            Marker::Connector => "connector".into(),
            Marker::CuspLoop(n) => format!("cusp:{n}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "start" => Marker::Start,
            "joint" => Marker::Joint,
            "connector" => Marker::Connector,
            _ => {
                let n = s
                    .strip_prefix("cusp:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown marker {s:?}")))?;
                Marker::CuspLoop(n)
            }
        })
    }
}

/// Piecewise-linear path in the universal cover of the punctured torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatPath {
    vertices: Vec<FlatPoint>,
    markers: Vec<Marker>,
}

impl FlatPath {
    pub fn new(start: FlatPoint) -> Result<Self> {
        check_vertex(&start)?;
        Ok(FlatPath {
            vertices: vec![start],
            markers: vec![Marker::Start],
        })
    }

    pub fn from_parts(vertices: Vec<FlatPoint>, markers: Vec<Marker>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("path has no vertices".into()));
        }
        if markers.len() != vertices.len() {
            return Err(Error::InvalidArgument(format!(
                "{} markers for {} vertices",
                markers.len(),
                vertices.len()
            )));
        }
        for v in &vertices {
            check_vertex(v)?;
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "vertices {i} and {} coincide",
                i + 1
            )));
        }
        Ok(FlatPath { vertices, markers })
    }

    pub fn vertices(&self) -> &[FlatPoint] {
        &self.vertices
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    pub fn start(&self) -> &FlatPoint {
        &self.vertices[0]
    }

    pub fn end(&self) -> &FlatPoint {
        self.vertices.last().expect("nonempty path")
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Appends a segment to `p`. A zero-length step is ignored.
    pub fn line_to(&mut self, p: FlatPoint, marker: Marker) -> Result<()> {
        if &p == self.end() {
            return Ok(());
        }
        check_vertex(&p)?;
        self.vertices.push(p);
        self.markers.push(marker);
        Ok(())
    }

    /// Marks the current end point with `n` additional cusp loops.
    pub fn add_cusp_loops(&mut self, n: u32) {
        let m = self.markers.last_mut().expect("nonempty path");
        *m = match *m {
            Marker::CuspLoop(k) => Marker::CuspLoop(k + n),
            _ => Marker::CuspLoop(n),
        };
    }

    /// Appends `other` translated so that its start lands on this path's end.
    pub fn append_translated(&mut self, other: &FlatPath) -> Result<()> {
        let dx = &self.end().x - &other.start().x;
        let dy = &self.end().y - &other.start().y;
        for (v, m) in other.vertices.iter().zip(&other.markers).skip(1) {
            self.line_to(v.translate(&dx, &dy), *m)?;
        }
        if let Marker::CuspLoop(n) = other.markers[0] {
            // loops at the glued start were not carried over
            let last = self.vertices.len() - other.vertices.len();
            if let Marker::CuspLoop(k) = self.markers[last] {
                self.markers[last] = Marker::CuspLoop(k + n);
            } else {
                self.markers[last] = Marker::CuspLoop(n);
            }
        }
        Ok(())
    }

    /// Total number of cusp loops carried by the markers.
    pub fn cusp_loops(&self) -> u64 {
        self.markers
            .iter()
            .map(|m| match m {
                Marker::CuspLoop(n) => *n as u64,
                _ => 0,
            })
            .sum()
    }
}

fn check_vertex(p: &FlatPoint) -> Result<()> {
    if p.is_lattice() {
        return Err(Error::SingularHit {
            x: p.x.to_string(),
            y: p.y.to_string(),
        });
    }
    Ok(())
}

/// Transverse measure in the vertical-shift convention.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    pub value: Quad,
}

impl Measure {
    pub fn zero() -> Self {
        Measure { value: Quad::zero() }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Length measured perpendicular to the leaves of slope `theta`.
    pub fn perpendicular(&self, theta: &Quad) -> f64 {
        let t = theta.to_f64();
        self.to_f64() / (1.0 + t * t).sqrt()
    }
}

impl Add for Measure {
    type Output = Measure;
    fn add(self, rhs: Measure) -> Measure {
        Measure {
            value: &self.value + &rhs.value,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Σ |Δy − θΔx| over the segments of `path`.
pub fn transverse_measure(path: &FlatPath, theta: &Quad) -> Measure {
    let mut total = Quad::zero();
    for w in path.vertices.windows(2) {
        let dx = &w[1].x - &w[0].x;
        let dy = &w[1].y - &w[0].y;
        total = &total + &(&dy - &(theta * &dx)).abs();
    }
    Measure { value: total }
}

/// Measure of the single segment `p → q`.
pub fn segment_measure(p: &FlatPoint, q: &FlatPoint, theta: &Quad) -> Quad {
    let dx = &q.x - &p.x;
    let dy = &q.y - &p.y;
    (&dy - &(theta * &dx)).abs()
}

const CUSP_LOOP: [Letter; 4] = [Letter::BInv, Letter::AInv, Letter::B, Letter::A];

/// Word of grid-line crossings along `path`: `a`/`A` for vertical lines
/// crossed rightwards/leftwards, `b`/`B` for horizontal lines crossed
/// upwards/downwards. Cusp-loop markers insert `BAba` per loop.
pub fn path_word(path: &FlatPath) -> Result<LetterWord> {
    let mut out = Vec::new();
    push_loops(&mut out, path.markers[0]);
    for (w, m) in path.vertices.windows(2).zip(&path.markers[1..]) {
        segment_word(&w[0], &w[1], &mut out)?;
        push_loops(&mut out, *m);
    }
    Ok(LetterWord(out))
}

fn push_loops(out: &mut Vec<Letter>, m: Marker) {
    if let Marker::CuspLoop(n) = m {
        for _ in 0..n {
            out.extend_from_slice(&CUSP_LOOP);
        }
    }
}

/// Grid lines crossed along one axis: the values in (min cell, max cell],
/// listed in travel order.
fn crossed_lines(from: &Quad, to: &Quad) -> (Vec<BigInt>, bool) {
    let a = from.floor();
    let b = to.floor();
    match a.cmp(&b) {
        Ordering::Less => {
            let n = (&b - &a).to_usize().unwrap_or(usize::MAX);
            let mut v = Vec::with_capacity(n.min(1 << 24));
            let mut m = &a + BigInt::one();
            while m <= b {
                v.push(m.clone());
                m += 1;
            }
            (v, true)
        }
        Ordering::Greater => {
            let mut v = Vec::new();
            let mut m = a.clone();
            while m > b {
                v.push(m.clone());
                m -= 1;
            }
            (v, false)
        }
        Ordering::Equal => (Vec::new(), true),
    }
}

fn segment_word(p: &FlatPoint, q: &FlatPoint, out: &mut Vec<Letter>) -> Result<()> {
    let dx = (&q.x - &p.x).abs();
    let dy = (&q.y - &p.y).abs();
    let (xs, right) = crossed_lines(&p.x, &q.x);
    let (ys, up) = crossed_lines(&p.y, &q.y);
    let la = if right { Letter::A } else { Letter::AInv };
    let lb = if up { Letter::B } else { Letter::BInv };
    if xs.is_empty() {
        out.extend(std::iter::repeat_n(lb, ys.len()));
        return Ok(());
    }
    if ys.is_empty() {
        out.extend(std::iter::repeat_n(la, xs.len()));
        return Ok(());
    }
    // Crossing parameter of x = m is |m − pₓ|/|Δx|; compare by cross
    // multiplication, |m − pₓ|·|Δy| against |n − p_y|·|Δx|.
    let key_x = |m: &BigInt| (&Quad::from_bigint(m.clone()) - &p.x).abs() * dy.clone();
    let key_y = |n: &BigInt| (&Quad::from_bigint(n.clone()) - &p.y).abs() * dx.clone();
    let (mut i, mut j) = (0, 0);
    let mut kx = key_x(&xs[0]);
    let mut ky = key_y(&ys[0]);
    while i < xs.len() && j < ys.len() {
        match kx.cmp(&ky) {
            Ordering::Less => {
                out.push(la);
                i += 1;
                if i < xs.len() {
                    kx = key_x(&xs[i]);
                }
            }
            Ordering::Greater => {
                out.push(lb);
                j += 1;
                if j < ys.len() {
                    ky = key_y(&ys[j]);
                }
            }
            Ordering::Equal => {
                return Err(Error::SingularHit {
                    x: xs[i].to_string(),
                    y: ys[j].to_string(),
                })
            }
        }
    }
    out.extend(std::iter::repeat_n(la, xs.len() - i));
    out.extend(std::iter::repeat_n(lb, ys.len() - j));
    Ok(())
}

/// Whether the straight segment `p → q` passes through a lattice point.
pub fn segment_hits_lattice(p: &FlatPoint, q: &FlatPoint) -> bool {
    let mut scratch = Vec::new();
    if p.is_lattice() || q.is_lattice() {
        return true;
    }
    let dx = &q.x - &p.x;
    let dy = &q.y - &p.y;
    if dx.is_zero() {
        return p.x.is_integer() && p.y.floor() != q.y.floor();
    }
    if dy.is_zero() {
        return p.y.is_integer() && p.x.floor() != q.x.floor();
    }
    segment_word(p, q, &mut scratch).is_err()
}
