//! First-return maps to a transversal edge, level-set partitions and
//! saddle connections.

use serde::Serialize;

use super::surface::{Dir, EdgeId, Position, Separatrix, Step, TranslationSurface};
use crate::error::{Error, Result};
use crate::field::Quad;
use crate::flat_torus::FlatPoint;

/// Crossings allowed between two consecutive returns before giving up.
pub const MAX_STEPS_PER_RETURN: usize = 100_000;

/// A non-horizontal paired edge, parametrized by `λ ∈ (0, 1)` from its
/// start. The stored edge is the one the rightward flow leaves from
/// (it descends in its polygon).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    edge: EdgeId,
}

impl Transversal {
    /// Accepts either label of a glued pair.
    pub fn new(s: &TranslationSurface, label: &str) -> Result<Self> {
        let id = s
            .edge_by_label(label)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown edge label {label}")))?;
        Self::from_edge(s, id)
    }

    pub fn from_edge(s: &TranslationSurface, id: EdgeId) -> Result<Self> {
        let e = s.edge(id);
        if e.is_horizontal() {
            return Err(Error::InvalidArgument(format!("transversal {} is horizontal", e.label)));
        }
        let Some(f) = e.partner else {
            return Err(Error::InvalidArgument(format!("transversal {} is a boundary edge", e.label)));
        };
        let edge = if e.dy().is_negative() { id } else { f };
        Ok(Transversal { edge })
    }

    /// First non-horizontal paired edge in label order.
    pub fn default_for(s: &TranslationSurface) -> Result<Self> {
        let mut ids: Vec<EdgeId> = (0..s.edges().len())
            .filter(|&i| !s.edge(i).is_horizontal() && !s.edge(i).is_boundary())
            .collect();
        ids.sort_by(|&a, &b| s.edge(a).label.cmp(&s.edge(b).label));
        match ids.first() {
            Some(&i) => Self::from_edge(s, i),
            None => Err(Error::InvalidSurface("no non-horizontal paired edge".into())),
        }
    }

    pub fn edge(&self) -> EdgeId {
        self.edge
    }

    /// `|Δy|` of the edge: the transverse measure of moving along all of it.
    pub fn height(&self, s: &TranslationSurface) -> Quad {
        s.edge(self.edge).dy().abs()
    }

    pub fn point(&self, s: &TranslationSurface, lambda: &Quad) -> FlatPoint {
        s.edge(self.edge).point_at(lambda)
    }

    pub fn position(&self, s: &TranslationSurface, lambda: &Quad) -> Position {
        Position {
            polygon: s.edge(self.edge).polygon,
            point: self.point(s, lambda),
            entry: Some(self.edge),
        }
    }

    /// Parameter of a point lying on the edge.
    pub fn lambda_of(&self, s: &TranslationSurface, p: &FlatPoint) -> Quad {
        let e = s.edge(self.edge);
        &(&p.y - &e.start.y) / &e.dy()
    }
}

fn check_lambda(lambda: &Quad) -> Result<()> {
    if !lambda.is_positive() || lambda >= &Quad::one() {
        return Err(Error::InvalidArgument(format!("parameter {lambda} outside (0, 1)")));
    }
    Ok(())
}

/// Piece of a forward orbit inside one polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPiece {
    pub polygon: usize,
    pub from: FlatPoint,
    pub to: FlatPoint,
}

/// Result of [`first_return`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub start: Quad,
    pub end: Quad,
    pub returns: usize,
    /// Exit edges in order; the last one of each return is the partner of
    /// the transversal.
    pub word: Vec<EdgeId>,
    pub pieces: Vec<FlowPiece>,
}

/// Follows the rightward flow from `λ` on the transversal for `n` returns.
pub fn first_return(s: &TranslationSurface, tr: &Transversal, lambda: &Quad, n: usize) -> Result<Orbit> {
    check_lambda(lambda)?;
    let mut pos = tr.position(s, lambda);
    let mut word = Vec::new();
    let mut pieces = Vec::new();
    let mut since = 0;
    let mut returns = 0;
    while returns < n {
        match s.flow_step(&pos, Dir::Right) {
            Step::Crossing { exit, at, next } => {
                pieces.push(FlowPiece {
                    polygon: pos.polygon,
                    from: pos.point.clone(),
                    to: at,
                });
                word.push(exit);
                pos = next;
                since += 1;
                if pos.entry == Some(tr.edge) {
                    returns += 1;
                    since = 0;
                } else if since > MAX_STEPS_PER_RETURN {
                    return Err(Error::BudgetExhausted(format!(
                        "no return to the transversal within {MAX_STEPS_PER_RETURN} crossings"
                    )));
                }
            }
            Step::Vertex { at, .. } => {
                return Err(Error::VertexHit {
                    step: returns as u64 + 1,
                    x: at.x.to_string(),
                    y: at.y.to_string(),
                })
            }
            Step::Boundary { exit, .. } => return Err(Error::BoundaryHit(s.edge(exit).label.clone())),
        }
    }
    Ok(Orbit {
        start: lambda.clone(),
        end: tr.lambda_of(s, &pos.point),
        returns,
        word,
        pieces,
    })
}

/// Where a traced separatrix ended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Ending {
    Vertex { class: usize, x: String, y: String },
    Boundary(String),
    /// Still running after the step budget.
    Open,
}

/// Trace of one separatrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub separatrix: Separatrix,
    pub word: Vec<EdgeId>,
    pub ending: Ending,
    /// Parameters where the trace crossed the transversal, in order.
    pub hits: Vec<Quad>,
}

/// Follows a separatrix for at most `max_steps` crossings, or until it has
/// crossed `tr` `max_hits` times.
pub fn trace_separatrix(
    s: &TranslationSurface,
    sep: &Separatrix,
    tr: Option<&Transversal>,
    max_steps: usize,
    max_hits: usize,
) -> Trace {
    let mut word = Vec::new();
    let mut hits = Vec::new();
    if let Some(e) = sep.along_edge {
        let edge = s.edge(e);
        let (p, c) = (edge.polygon, (edge.index + 1) % s.polygons()[edge.polygon].len());
        return Trace {
            separatrix: sep.clone(),
            word,
            ending: Ending::Vertex {
                class: s.vertex_class(p, c),
                x: edge.end.x.to_string(),
                y: edge.end.y.to_string(),
            },
            hits,
        };
    }
    let mut pos = s.separatrix_start(sep);
    for _ in 0..max_steps {
        if hits.len() >= max_hits {
            break;
        }
        match s.flow_step(&pos, sep.dir) {
            Step::Crossing { exit, at, next } => {
                word.push(exit);
                // leftward traces cross the transversal through it, rightward
                // ones through its partner
                if let Some(t) = tr {
                    let on = match sep.dir {
                        Dir::Left => exit == t.edge,
                        Dir::Right => next.entry == Some(t.edge),
                    };
                    if on {
                        let p = if sep.dir == Dir::Left { &at } else { &next.point };
                        hits.push(t.lambda_of(s, p));
                    }
                }
                pos = next;
            }
            Step::Vertex { polygon, corner, at } => {
                return Trace {
                    separatrix: sep.clone(),
                    word,
                    ending: Ending::Vertex {
                        class: s.vertex_class(polygon, corner),
                        x: at.x.to_string(),
                        y: at.y.to_string(),
                    },
                    hits,
                }
            }
            Step::Boundary { exit, .. } => {
                return Trace {
                    separatrix: sep.clone(),
                    word,
                    ending: Ending::Boundary(s.edge(exit).label.clone()),
                    hits,
                }
            }
        }
    }
    Trace {
        separatrix: sep.clone(),
        word,
        ending: Ending::Open,
        hits,
    }
}

/// A rightward separatrix that ends at a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaddleConnection {
    pub from_class: usize,
    pub from: FlatPoint,
    pub to_class: usize,
    pub to: (String, String),
    pub word: Vec<EdgeId>,
}

/// All rightward separatrices that reach a vertex within `max_steps`
/// crossings.
pub fn saddle_connections(s: &TranslationSurface, max_steps: usize) -> Vec<SaddleConnection> {
    let mut out = Vec::new();
    for sep in s.separatrices(Dir::Right) {
        let t = trace_separatrix(s, &sep, None, max_steps, usize::MAX);
        if let Ending::Vertex { class, x, y } = t.ending {
            out.push(SaddleConnection {
                from_class: s.vertex_class(sep.polygon, sep.corner),
                from: s.polygons()[sep.polygon][sep.corner].clone(),
                to_class: class,
                to: (x, y),
                word: t.word,
            });
        }
    }
    out
}

/// Whether every horizontal separatrix ends (at a vertex or the boundary)
/// within `max_steps` crossings, i.e. all leaves are closed.
pub fn is_cylinder_decomposition(s: &TranslationSurface, max_steps: usize) -> bool {
    s.separatrices(Dir::Right)
        .iter()
        .chain(s.separatrices(Dir::Left).iter())
        .all(|sep| trace_separatrix(s, sep, None, max_steps, usize::MAX).ending != Ending::Open)
}

/// A discontinuity of the `n`-step return word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutPoint {
    pub lambda: Quad,
    /// Return trip (1-based) during which the forward orbit meets a vertex.
    pub depth: usize,
    /// Index into `TranslationSurface::separatrices(Dir::Left)`.
    pub separatrix: usize,
}

/// Backward crossings of the incoming separatrices with the transversal,
/// up to `n` per separatrix, sorted by parameter.
pub fn cut_points(s: &TranslationSurface, tr: &Transversal, n: usize) -> Vec<CutPoint> {
    let map = ReturnMap::new(s, tr);
    let mut out = map.map(|m| m.cut_points(n)).unwrap_or_else(|_| {
        // no clean depth-1 map (e.g. closed leaves avoid the edge): trace directly
        let mut v = Vec::new();
        for (i, sep) in s.separatrices(Dir::Left).iter().enumerate() {
            let t = trace_separatrix(s, sep, Some(tr), n.saturating_mul(MAX_STEPS_PER_RETURN), n);
            for (j, l) in t.hits.into_iter().enumerate() {
                v.push(CutPoint {
                    lambda: l,
                    depth: j + 1,
                    separatrix: i,
                });
            }
        }
        v
    });
    out.sort_by(|a, b| a.lambda.cmp(&b.lambda));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Quad,
    pub hi: Quad,
    pub word: Vec<EdgeId>,
    /// `T^n` on this interval is `λ ↦ λ + shift`.
    pub shift: Quad,
}

impl Interval {
    pub fn len(&self) -> Quad {
        &self.hi - &self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, l: &Quad) -> bool {
        &self.lo < l && l < &self.hi
    }

    pub fn midpoint(&self) -> Quad {
        &(&self.lo + &self.hi) * &Quad::frac(1, 2)
    }
}

/// The partition 𝓘ₙ of the transversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnPartition {
    pub depth: usize,
    pub cuts: Vec<CutPoint>,
    pub intervals: Vec<Interval>,
}

impl ReturnPartition {
    pub fn max_len(&self) -> Quad {
        self.intervals.iter().map(Interval::len).max().unwrap_or_else(Quad::zero)
    }

    /// Interval containing `λ`, or `None` at a cut point.
    pub fn locate(&self, l: &Quad) -> Option<usize> {
        let i = self.intervals.partition_point(|iv| &iv.hi <= l);
        (i < self.intervals.len() && self.intervals[i].contains(l)).then_some(i)
    }
}

/// Intervals between consecutive cut points (repeated points collapse).
pub fn split_at(cuts: &[Quad]) -> Vec<(Quad, Quad)> {
    let mut pts = vec![Quad::zero()];
    for c in cuts {
        if pts.last() != Some(c) {
            pts.push(c.clone());
        }
    }
    pts.push(Quad::one());
    pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

pub fn return_partition(s: &TranslationSurface, tr: &Transversal, n: usize) -> Result<ReturnPartition> {
    if is_cylinder_decomposition(s, 64) {
        return Err(Error::CylinderDecomposition);
    }
    let map = ReturnMap::new(s, tr)?;
    let mut cuts = map.cut_points(n);
    cuts.sort_by(|a, b| a.lambda.cmp(&b.lambda));
    let lams: Vec<Quad> = cuts.iter().map(|c| c.lambda.clone()).collect();
    let mut intervals = Vec::new();
    for (lo, hi) in split_at(&lams) {
        let mid = &(&lo + &hi) * &Quad::frac(1, 2);
        let (end, word) = map.orbit(&mid, n)?;
        intervals.push(Interval {
            shift: &end - &mid,
            lo,
            hi,
            word,
        });
    }
    Ok(ReturnPartition {
        depth: n,
        cuts,
        intervals,
    })
}

/// The first-return map to a transversal as an exact interval exchange:
/// a translation on each interval of 𝓘₁.
#[derive(Clone, Debug)]
pub struct ReturnMap {
    /// Depth-1 cut points with the separatrix each lies on.
    first: Vec<CutPoint>,
    cuts: Vec<Quad>,
    cuts_f: Vec<f64>,
    intervals: Vec<Interval>,
    /// Image intervals `(lo + shift, hi + shift, index)` sorted by `lo`.
    images: Vec<(Quad, Quad, usize)>,
    images_f: Vec<f64>,
    images_cut: Vec<Quad>,
}

const LOCATE_TOL: f64 = 1e-9;

/// Index of the gap of `cuts` containing `x`, or `None` if `x` is a cut.
fn locate_in(cuts: &[Quad], cuts_f: &[f64], x: &Quad) -> Option<usize> {
    let (xf, err) = x.approx();
    if err < 1e-12 {
        let i = cuts_f.partition_point(|&c| c < xf);
        let near_lo = i > 0 && (xf - cuts_f[i - 1]).abs() <= LOCATE_TOL;
        let near_hi = i < cuts_f.len() && (cuts_f[i] - xf).abs() <= LOCATE_TOL;
        if !near_lo && !near_hi {
            return Some(i);
        }
    }
    let i = cuts.partition_point(|c| c < x);
    (i == cuts.len() || &cuts[i] != x).then_some(i)
}

impl ReturnMap {
    pub fn new(s: &TranslationSurface, tr: &Transversal) -> Result<Self> {
        let mut first = Vec::new();
        for (i, sep) in s.separatrices(Dir::Left).iter().enumerate() {
            let t = trace_separatrix(s, sep, Some(tr), MAX_STEPS_PER_RETURN, 1);
            if let Some(l) = t.hits.into_iter().next() {
                first.push(CutPoint {
                    lambda: l,
                    depth: 1,
                    separatrix: i,
                });
            }
        }
        first.sort_by(|a, b| a.lambda.cmp(&b.lambda));
        let mut cuts: Vec<Quad> = first.iter().map(|c| c.lambda.clone()).collect();
        cuts.dedup();
        let mut intervals = Vec::new();
        for (lo, hi) in split_at(&cuts) {
            let mid = &(&lo + &hi) * &Quad::frac(1, 2);
            let o = first_return(s, tr, &mid, 1)?;
            intervals.push(Interval {
                shift: &o.end - &mid,
                lo,
                hi,
                word: o.word,
            });
        }
        let mut images: Vec<(Quad, Quad, usize)> = intervals
            .iter()
            .enumerate()
            .map(|(i, iv)| (&iv.lo + &iv.shift, &iv.hi + &iv.shift, i))
            .collect();
        images.sort_by(|a, b| a.0.cmp(&b.0));
        let images_cut: Vec<Quad> = images.iter().skip(1).map(|im| im.0.clone()).collect();
        Ok(ReturnMap {
            cuts_f: cuts.iter().map(Quad::to_f64).collect(),
            images_f: images_cut.iter().map(Quad::to_f64).collect(),
            first,
            cuts,
            intervals,
            images,
            images_cut,
        })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Depth-1 interval containing `λ`; `None` at a cut point.
    pub fn locate(&self, l: &Quad) -> Option<usize> {
        locate_in(&self.cuts, &self.cuts_f, l)
    }

    /// `T(λ)` and the interval used; `None` when the orbit meets a vertex.
    pub fn apply(&self, l: &Quad) -> Option<(Quad, usize)> {
        let i = self.locate(l)?;
        Some((l + &self.intervals[i].shift, i))
    }

    /// `T^{-1}(μ)`; `None` when the backward orbit meets a vertex.
    pub fn apply_inverse(&self, m: &Quad) -> Option<Quad> {
        let j = locate_in(&self.images_cut, &self.images_f, m)?;
        let i = self.images[j].2;
        Some(m - &self.intervals[i].shift)
    }

    /// `T^n(λ)` with the crossing word `w_{T^n}(λ)`.
    pub fn orbit(&self, l: &Quad, n: usize) -> Result<(Quad, Vec<EdgeId>)> {
        check_lambda(l)?;
        let mut cur = l.clone();
        let mut word = Vec::new();
        for step in 0..n {
            let Some((next, i)) = self.apply(&cur) else {
                return Err(Error::VertexHit {
                    step: step as u64 + 1,
                    x: "transversal".into(),
                    y: cur.to_string(),
                });
            };
            word.extend_from_slice(&self.intervals[i].word);
            cur = next;
        }
        Ok((cur, word))
    }

    /// Cut points of 𝓘ₙ: the first `n` backward crossings of every
    /// incoming separatrix.
    pub fn cut_points(&self, n: usize) -> Vec<CutPoint> {
        let mut out = Vec::new();
        for c in &self.first {
            if n == 0 {
                break;
            }
            out.push(c.clone());
            let mut cur = c.lambda.clone();
            for depth in 2..=n {
                match self.apply_inverse(&cur) {
                    Some(prev) => {
                        out.push(CutPoint {
                            lambda: prev.clone(),
                            depth,
                            separatrix: c.separatrix,
                        });
                        cur = prev;
                    }
                    None => break,
                }
            }
        }
        out
    }
}

/// A depth-1 cut point whose incoming separatrix is not a saddle
/// connection within the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonSaddlePoint {
    pub lambda: Quad,
    pub separatrix: usize,
    pub vertex_class: usize,
    /// Backward crossings checked without meeting a vertex.
    pub checked_steps: usize,
    /// Depth-1 cut points rejected before this one.
    pub rejected: Vec<Quad>,
}

pub fn find_non_saddle_point(s: &TranslationSurface, tr: &Transversal, budget: usize) -> Result<NonSaddlePoint> {
    if is_cylinder_decomposition(s, budget.min(256)) {
        return Err(Error::CylinderDecomposition);
    }
    let seps = s.separatrices(Dir::Left);
    let mut cands = cut_points(s, tr, 1);
    cands.retain(|c| c.depth == 1);
    let mut rejected = Vec::new();
    for c in cands {
        let sep = &seps[c.separatrix];
        let t = trace_separatrix(s, sep, None, budget, usize::MAX);
        if t.ending == Ending::Open {
            return Ok(NonSaddlePoint {
                lambda: c.lambda,
                separatrix: c.separatrix,
                vertex_class: s.vertex_class(sep.polygon, sep.corner),
                checked_steps: t.word.len(),
                rejected,
            });
        }
        rejected.push(c.lambda);
    }
    Err(Error::BudgetExhausted(format!(
        "every depth-1 cut point lies on a saddle connection within {budget} crossings"
    )))
}
