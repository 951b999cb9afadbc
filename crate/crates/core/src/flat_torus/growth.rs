use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use super::{segment_measure, FlatPath, FlatPoint, Marker};
use crate::error::{Error, Result};
use crate::field::Quad;

/// Direction of a straight probe path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Slope `m`; the parameter is the horizontal extent.
    Slope(Quad),
    /// The parameter is the height.
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthTable {
    pub rows: Vec<(Quad, Quad)>,
}

impl GrowthTable {
    /// `I(t₂) − I(t₁) = (t₂ − t₁)·I(1)` for all pairs of rows, checked
    /// exactly against the first nonzero parameter.
    pub fn is_linear(&self) -> bool {
        let Some((t1, i1)) = self.rows.iter().find(|(t, _)| !t.is_zero()) else {
            return true;
        };
        let rate = i1 / t1;
        self.rows
            .windows(2)
            .all(|w| &w[1].1 - &w[0].1 == &(&w[1].0 - &w[0].0) * &rate)
    }
}

/// `I(t)` of straight paths from a fixed start in direction `dir`, for
/// `samples + 1` equally spaced parameters in `[0, t_max]`.
pub fn linear_growth_probe(theta: &Quad, dir: &Direction, t_max: &Quad, samples: usize) -> Result<GrowthTable> {
    if !t_max.is_positive() || samples == 0 {
        return Err(Error::InvalidArgument("t_max and samples must be positive".into()));
    }
    let start = FlatPoint::new(Quad::frac(1, 3), Quad::frac(1, 5));
    let rows = (0..=samples)
        .map(|i| {
            let t = &(t_max * &Quad::from_int(i as i64)) / &Quad::from_int(samples as i64);
            let (dx, dy) = match dir {
                Direction::Slope(m) => (t.clone(), m * &t),
                Direction::Vertical => (Quad::zero(), t.clone()),
            };
            let end = start.translate(&dx, &dy);
            let i_t = segment_measure(&start, &end, theta);
            (t, i_t)
        })
        .collect();
    Ok(GrowthTable { rows })
}

/// Piecewise-linear function given by a table of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulatedFunction {
    pub name: String,
    t: Vec<BigRational>,
    f: Vec<BigRational>,
}

const DENOM: u64 = 1 << 32;

fn rationalize(x: f64) -> BigRational {
    if (x - x.round()).abs() < 1e-12 {
        return BigRational::from_integer(BigInt::from(x.round() as i64));
    }
    let n = BigInt::from_f64((x * DENOM as f64).round()).unwrap_or_default();
    BigRational::new(n, BigInt::from(DENOM))
}

impl TabulatedFunction {
    pub fn new(name: &str, points: Vec<(BigRational, BigRational)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidGrowthFunction(format!("{name}: {m}")));
        if points.len() < 2 {
            return bad("need at least two points");
        }
        if !points[0].0.is_zero() || !points[0].1.is_zero() {
            return bad("table must start at (0, 0)");
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return bad("parameters must increase strictly");
            }
            if w[1].1 < w[0].1 {
                return bad("values must not decrease");
            }
        }
        let (t, f) = points.into_iter().unzip();
        Ok(TabulatedFunction {
            name: name.to_string(),
            t,
            f,
        })
    }

    /// Samples `func` at `0, step, 2·step, …` up to `t_max`; values are
    /// rounded to multiples of 2⁻³² unless integral.
    pub fn sampled(name: &str, t_max: u64, step: u64, func: impl Fn(f64) -> f64) -> Result<Self> {
        if step == 0 || t_max < step {
            return Err(Error::InvalidGrowthFunction(format!("{name}: empty range")));
        }
        let pts = (0..=t_max / step)
            .map(|i| {
                let t = i * step;
                (
                    BigRational::from_integer(t.into()),
                    rationalize(func(t as f64)),
                )
            })
            .collect();
        Self::new(name, pts)
    }

    pub fn sqrt(t_max: u64) -> Result<Self> {
        Self::sampled("sqrt", t_max, 1, f64::sqrt)
    }

    pub fn log1p(t_max: u64) -> Result<Self> {
        Self::sampled("log1p", t_max, 1, f64::ln_1p)
    }

    pub fn zero(t_max: u64) -> Result<Self> {
        Self::sampled("zero", t_max, 1, |_| 0.0)
    }

    /// Reference closed form for the built-in tables.
    pub fn reference(&self, t: f64) -> Option<f64> {
        match self.name.as_str() {
            "sqrt" => Some(t.sqrt()),
            "log1p" => Some(t.ln_1p()),
            "zero" => Some(0.0),
            _ => None,
        }
    }

    pub fn t_max(&self) -> &BigRational {
        self.t.last().expect("nonempty table")
    }

    pub fn max_value(&self) -> &BigRational {
        self.f.last().expect("nonempty table")
    }

    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        if t.is_negative() || t > self.t_max() {
            return None;
        }
        let i = self.t.partition_point(|x| x < t);
        if self.t[i] == *t {
            return Some(self.f[i].clone());
        }
        let (t0, t1, f0, f1) = (&self.t[i - 1], &self.t[i], &self.f[i - 1], &self.f[i]);
        Some(f0 + (f1 - f0) * (t - t0) / (t1 - t0))
    }

    /// Smallest `t` with `f(t) = level`.
    pub fn solve(&self, level: &BigRational) -> Option<BigRational> {
        if !level.is_positive() {
            return Some(BigRational::zero());
        }
        let i = self.f.iter().position(|v| v >= level)?;
        let (t0, t1, f0, f1) = (&self.t[i - 1], &self.t[i], &self.f[i - 1], &self.f[i]);
        Some(t0 + (level - f0) * (t1 - t0) / (f1 - f0))
    }
}

/// One joint of a prescribed-growth path.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: u64,
    /// Total leaf length `d₁ + … + d_n`.
    pub t: Quad,
    pub measure_before_jump: Quad,
    pub measure_after_jump: Quad,
    pub f_value: Quad,
    pub f_reference: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PrescribedGrowth {
    pub path: FlatPath,
    pub lengths: Vec<Quad>,
    pub rows: Vec<GrowthRow>,
}

impl PrescribedGrowth {
    /// Largest `|I − f|` over the joints, both sides of each jump.
    pub fn max_joint_error(&self) -> Quad {
        self.rows
            .iter()
            .flat_map(|r| {
                [
                    (&r.measure_before_jump - &r.f_value).abs(),
                    (&r.measure_after_jump - &r.f_value).abs(),
                ]
            })
            .max()
            .unwrap_or_else(Quad::zero)
    }
}

/// Path along slope-θ leaves with unit vertical jumps placed so that the
/// n-th jump happens at total leaf length `T_n`, `f(T_n) = n`.
/// Dyadic `t` just below the solution of `reference(t) = level`, so the
/// closed form itself stays at or under the level when the jump happens.
/// Table chords of concave functions lie below the curve; solving on the
/// table would overshoot.
fn reference_time(f: &TabulatedFunction, level: f64) -> Option<BigRational> {
    let r = |t: f64| f.reference(t);
    let (mut lo, mut hi) = (0.0f64, f.t_max().to_f64()?);
    if r(hi)? < level {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r(mid)? < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n = BigInt::from_f64((lo * DENOM as f64).floor() - 4.0)?;
    let t = BigRational::new(n, BigInt::from(DENOM));
    (t.is_positive() && r(t.to_f64()?)? <= level).then_some(t)
}

pub fn prescribed_growth_path(theta: &Quad, f: &TabulatedFunction, n_segments: usize) -> Result<PrescribedGrowth> {
    let y0 = Quad::frac(1, 4);
    let one = BigRational::one();
    if f.max_value() < &one {
        // never reaches the first level: one leaf over the whole range
        let t = Quad::from_rational(f.t_max().clone());
        let mut path = FlatPath::new(FlatPoint::new(Quad::frac(1, 2), y0.clone()))?;
        let end = FlatPoint::new(&Quad::frac(1, 2) + &t, &y0 + &(theta * &t));
        path.line_to(end, Marker::Joint)?;
        let row = GrowthRow {
            n: 0,
            t: t.clone(),
            measure_before_jump: Quad::zero(),
            measure_after_jump: Quad::zero(),
            f_value: Quad::from_rational(f.eval(f.t_max()).expect("in range")),
            f_reference: f.reference(t.to_f64()),
        };
        return Ok(PrescribedGrowth {
            path,
            lengths: vec![t],
            rows: vec![row],
        });
    }
    let mut ts = Vec::with_capacity(n_segments);
    for n in 1..=n_segments as u64 {
        let level = BigRational::from_integer(n.into());
        let t = f.solve(&level).ok_or_else(|| {
            Error::InvalidGrowthFunction(format!("{}: level {n} not reached on the table", f.name))
        })?;
        let over = t.to_f64().and_then(|x| f.reference(x)).is_some_and(|v| v > n as f64);
        ts.push(if over { reference_time(f, n as f64).unwrap_or(t) } else { t });
    }
    // horizontal offset keeping every jump off the vertical grid lines
    let x0 = [2u32, 3, 5, 7, 11, 13]
        .iter()
        .map(|&d| BigRational::new(1.into(), d.into()))
        .find(|x0| ts.iter().all(|t| !(t + x0).is_integer()))
        .ok_or_else(|| Error::InvalidGrowthFunction("no admissible horizontal offset".into()))?;
    let x0 = Quad::from_rational(x0);
    let mut path = FlatPath::new(FlatPoint::new(x0.clone(), y0.clone()))?;
    let mut rows = Vec::with_capacity(n_segments);
    let mut lengths = Vec::with_capacity(n_segments);
    let mut measure = Quad::zero();
    let mut prev_t = Quad::zero();
    for (i, t) in ts.iter().enumerate() {
        let n = i as u64 + 1;
        let t = Quad::from_rational(t.clone());
        let d = &t - &prev_t;
        let here = path.end().clone();
        let leaf_end = here.translate(&d, &(theta * &d));
        measure = &measure + &segment_measure(&here, &leaf_end, theta);
        path.line_to(leaf_end.clone(), Marker::Joint)?;
        let before = measure.clone();
        let hop_end = leaf_end.translate(&Quad::zero(), &Quad::one());
        measure = &measure + &segment_measure(&leaf_end, &hop_end, theta);
        path.line_to(hop_end, Marker::Connector)?;
        let fv = f
            .eval(t.as_rational().expect("rational"))
            .expect("solved inside the table");
        rows.push(GrowthRow {
            n,
            t: t.clone(),
            measure_before_jump: before,
            measure_after_jump: measure.clone(),
            f_value: Quad::from_rational(fv),
            f_reference: f.reference(t.to_f64()),
        });
        lengths.push(d);
        prev_t = t;
    }
    let _ = one.to_f64();
    Ok(PrescribedGrowth {
        path,
        lengths,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_torus::transverse_measure;

    #[test]
    fn horizontal_probe() {
        let th = Quad::sqrt_of(2);
        let tab = linear_growth_probe(&th, &Direction::Slope(Quad::zero()), &Quad::from_int(10), 10).unwrap();
        for (t, i) in &tab.rows {
            assert_eq!(i, &(&th * t));
        }
        assert!(tab.is_linear());
    }

    #[test]
    fn vertical_and_leaf_probe() {
        let th = Quad::sqrt_of(2);
        let v = linear_growth_probe(&th, &Direction::Vertical, &Quad::from_int(4), 8).unwrap();
        assert!(v.rows.iter().all(|(t, i)| t == i));
        let l = linear_growth_probe(&th, &Direction::Slope(th.clone()), &Quad::from_int(4), 8).unwrap();
        assert!(l.rows.iter().all(|(_, i)| i.is_zero()));
    }

    #[test]
    fn sqrt_growth_lengths() {
        let th = Quad::sqrt_of(2);
        let f = TabulatedFunction::sqrt(400).unwrap();
        let g = prescribed_growth_path(&th, &f, 20).unwrap();
        for (i, d) in g.lengths.iter().enumerate() {
            let n = i as i64 + 1;
            assert_eq!(d, &Quad::from_int(2 * n - 1));
        }
        for r in &g.rows {
            assert_eq!(r.measure_after_jump, Quad::from_int(r.n as i64));
            assert_eq!(r.f_value, Quad::from_int(r.n as i64));
        }
        assert!(g.max_joint_error() <= Quad::one());
        assert_eq!(transverse_measure(&g.path, &th).value, Quad::from_int(20));
    }

    #[test]
    fn zero_growth_is_single_leaf() {
        let th = Quad::sqrt_of(2);
        let g = prescribed_growth_path(&th, &TabulatedFunction::zero(50).unwrap(), 5).unwrap();
        assert_eq!(g.path.segment_count(), 1);
        assert!(transverse_measure(&g.path, &th).value.is_zero());
    }

    #[test]
    fn log_growth_lengths() {
        let th = Quad::sqrt_of(2);
        let f = TabulatedFunction::log1p(3000).unwrap();
        let g = prescribed_growth_path(&th, &f, 8).unwrap();
        for (i, d) in g.lengths.iter().enumerate().skip(1) {
            let n = i as i32 + 1;
            let want = std::f64::consts::E.powi(n) - std::f64::consts::E.powi(n - 1);
            assert!((d.to_f64() - want).abs() / want < 1e-2, "n={n} d={} want={want}", d.to_f64());
        }
        assert!(g.max_joint_error() <= Quad::one());
        for r in &g.rows {
            assert!((r.measure_after_jump.to_f64() - r.f_reference.unwrap()).abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn unreachable_level() {
        let f = TabulatedFunction::sqrt(10).unwrap();
        assert!(matches!(
            prescribed_growth_path(&Quad::sqrt_of(2), &f, 5),
            Err(Error::InvalidGrowthFunction(_))
        ));
    }
}
