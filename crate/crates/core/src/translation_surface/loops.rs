//! Closed curves of small transverse measure whose crossing words never
//! occur along a leaf, and their concatenation into exotic words.

use std::collections::{BTreeMap, BTreeSet};

use super::cylinder::realizing_set;
use super::flow::{find_non_saddle_point, first_return, split_at, FlowPiece, NonSaddlePoint, ReturnMap, Transversal};
use super::surface::{EdgeId, TranslationSurface};
use crate::error::{Error, Result};
use crate::field::Quad;

/// Default number of returns allowed when searching for `n` and `m`.
pub const DEFAULT_RETURN_BUDGET: usize = 1 << 15;

/// Cut points of 𝓘ₙ for growing `n`, with the longest interval recorded
/// for every depth reached.
struct CutTracer<'a> {
    map: &'a ReturnMap,
    fronts: Vec<Option<Quad>>,
    hits: Vec<(usize, Quad)>,
    points: BTreeSet<Quad>,
    gaps: BTreeMap<Quad, usize>,
    /// `longest[n - 1]` is the longest interval of 𝓘ₙ.
    longest: Vec<Quad>,
}

impl<'a> CutTracer<'a> {
    fn new(map: &'a ReturnMap) -> Self {
        let mut gaps = BTreeMap::new();
        gaps.insert(Quad::one(), 1);
        CutTracer {
            map,
            fronts: Vec::new(),
            hits: Vec::new(),
            points: [Quad::zero(), Quad::one()].into_iter().collect(),
            gaps,
            longest: Vec::new(),
        }
    }

    fn insert(&mut self, x: Quad) {
        if self.points.contains(&x) {
            return;
        }
        let lo = self.points.range(..&x).next_back().unwrap().clone();
        let hi = self.points.range(&x..).next().unwrap().clone();
        let old = &hi - &lo;
        if let Some(c) = self.gaps.get_mut(&old) {
            *c -= 1;
            if *c == 0 {
                self.gaps.remove(&old);
            }
        }
        *self.gaps.entry(&x - &lo).or_insert(0) += 1;
        *self.gaps.entry(&hi - &x).or_insert(0) += 1;
        self.points.insert(x);
    }

    fn extend_to(&mut self, n: usize) {
        while self.longest.len() < n {
            let depth = self.longest.len() + 1;
            let fresh: Vec<Quad> = if depth == 1 {
                let f: Vec<Quad> = self.map.cut_points(1).into_iter().map(|c| c.lambda).collect();
                self.fronts = f.iter().cloned().map(Some).collect();
                f
            } else {
                let map = self.map;
                self.fronts
                    .iter_mut()
                    .filter_map(|f| {
                        let prev = map.apply_inverse(f.as_ref()?);
                        *f = prev.clone();
                        prev
                    })
                    .collect()
            };
            for x in fresh {
                self.hits.push((depth, x.clone()));
                self.insert(x);
            }
            let top = self.gaps.keys().next_back().unwrap().clone();
            self.longest.push(top);
        }
    }

    /// Least `n ≤ budget` whose partition intervals are all shorter than `a`.
    fn least_depth(&mut self, a: &Quad, budget: usize) -> Option<usize> {
        let found = self.longest.partition_point(|l| l >= a);
        if found < self.longest.len() {
            return Some(found + 1);
        }
        while self.longest.len() < budget {
            self.extend_to(self.longest.len() + 1);
            if self.longest.last().unwrap() < a {
                return Some(self.longest.len());
            }
        }
        None
    }

    /// Level set of `w_{T^n}` containing `l`.
    fn level_set(&mut self, n: usize, l: &Quad) -> (Quad, Quad) {
        self.extend_to(n);
        let mut lo = Quad::zero();
        let mut hi = Quad::one();
        for (d, x) in &self.hits {
            if *d <= n {
                if x < l && x > &lo {
                    lo = x.clone();
                } else if x > l && x < &hi {
                    hi = x.clone();
                }
            }
        }
        (lo, hi)
    }
}

/// Which side of `P` the base point `Q` sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Below => Side::Above,
            Side::Above => Side::Below,
        }
    }

    /// The point at distance `d` from `p` on this side.
    fn step(self, p: &Quad, d: &Quad) -> Quad {
        match self {
            Side::Below => p - d,
            Side::Above => p + d,
        }
    }
}

/// A closed curve `C_k` with inadmissible crossing word `A_k`: flow `n`
/// returns from `Q`, move along the transversal to `R`, flow `m` returns,
/// move back to `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopCertificate {
    pub k: u32,
    pub side: Side,
    pub p: Quad,
    pub q: Quad,
    pub r: Quad,
    /// `a = |PQ|/3`.
    pub a: Quad,
    pub n: usize,
    pub m: usize,
    pub tn_q: Quad,
    pub tm_r: Quad,
    /// Level set of `w_{T^n}` containing `Q`; shorter than `a`.
    pub level_set: (Quad, Quad),
    /// Depth-1 intervals `I` (containing `Q`) and `I′` (containing `R`).
    pub i_near: (Quad, Quad),
    pub i_far: (Quad, Quad),
    pub word_near: Vec<EdgeId>,
    pub word_far: Vec<EdgeId>,
    pub word: Vec<EdgeId>,
    /// Length of the factor `w_{T^n}(Q)` at the start of the word.
    pub head_len: usize,
    pub measure: Quad,
    /// `c` with `measure < c·2^{−k}`.
    pub constant: Quad,
    /// The word preceded by a crossing onto the transversal is read by no leaf.
    pub aligned_inadmissible: bool,
    /// The bare word is read by no leaf.
    pub inadmissible: bool,
}

impl LoopCertificate {
    pub fn bound(&self) -> Quad {
        &self.constant * &Quad::pow2_recip(self.k)
    }

    pub fn labels(&self, s: &TranslationSurface) -> Vec<String> {
        self.word.iter().map(|&e| s.edge(e).label.clone()).collect()
    }

    /// The polyline `C_k`: flow pieces inside polygons and the two moves
    /// along the transversal, in order.
    pub fn path(&self, s: &TranslationSurface, tr: &Transversal) -> Result<Vec<FlowPiece>> {
        let mut out = first_return(s, tr, &self.q, self.n)?.pieces;
        out.push(move_piece(s, tr, &self.tn_q, &self.r));
        out.extend(first_return(s, tr, &self.r, self.m)?.pieces);
        out.push(move_piece(s, tr, &self.tm_r, &self.q));
        Ok(out)
    }

    /// Re-derives the measure from the path: the sum of `|Δy|` over pieces.
    pub fn path_measure(&self, s: &TranslationSurface, tr: &Transversal) -> Result<Quad> {
        Ok(self
            .path(s, tr)?
            .iter()
            .fold(Quad::zero(), |acc, p| &acc + &(&p.to.y - &p.from.y).abs()))
    }
}

/// `c` for loops on `tr`: twice the height of the edge.
pub fn loop_constant(s: &TranslationSurface, tr: &Transversal) -> Quad {
    &tr.height(s) * &Quad::from_int(2)
}

fn move_piece(s: &TranslationSurface, tr: &Transversal, from: &Quad, to: &Quad) -> FlowPiece {
    FlowPiece {
        polygon: s.edge(tr.edge()).polygon,
        from: tr.point(s, from),
        to: tr.point(s, to),
    }
}

/// Builds `C_k` from the non-saddle cut point `np`.
pub fn build_inadmissible_loop(
    s: &TranslationSurface,
    tr: &Transversal,
    np: &NonSaddlePoint,
    k: u32,
    budget: usize,
) -> Result<LoopCertificate> {
    let map = ReturnMap::new(s, tr)?;
    build_with_map(s, tr, &map, np, k, budget)
}

fn build_with_map(
    s: &TranslationSurface,
    tr: &Transversal,
    map: &ReturnMap,
    np: &NonSaddlePoint,
    k: u32,
    budget: usize,
) -> Result<LoopCertificate> {
    if k == 0 {
        return Err(Error::InvalidArgument("level k must be at least 1".into()));
    }
    let p = &np.lambda;
    let mut tracer = CutTracer::new(map);
    let cuts: Vec<Quad> = map.intervals().iter().skip(1).map(|iv| iv.lo.clone()).collect();
    let d1 = split_at(&cuts);
    let below = d1.iter().position(|(_, b)| b == p);
    let above = d1.iter().position(|(a, _)| a == p);
    let (Some(below), Some(above)) = (below, above) else {
        return Err(Error::InvalidArgument(format!("{p} is not a depth-1 cut point")));
    };
    let mut last_err = None;
    for side in [Side::Below, Side::Above] {
        let (near, far) = match side {
            Side::Below => (below, above),
            Side::Above => (above, below),
        };
        match attempt(s, tr, map, &mut tracer, p, side, near, far, k, budget) {
            Ok(c) => return Ok(c),
            Err(e) if e.is_exhaustion() => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

/// Applies `T` at least `min` times and then until `stop` holds,
/// collecting the crossing word. `None` when the orbit meets a vertex.
fn run_until(
    map: &ReturnMap,
    from: &Quad,
    min: usize,
    budget: usize,
    stop: impl Fn(&Quad) -> bool,
) -> Result<Option<(usize, Quad, Vec<EdgeId>)>> {
    let mut cur = from.clone();
    let mut word = Vec::new();
    let mut n = 0;
    while n < min || !stop(&cur) {
        if n >= budget {
            return Err(Error::BudgetExhausted(format!(
                "orbit does not come back close enough within {budget} returns"
            )));
        }
        let Some((next, i)) = map.apply(&cur) else {
            return Ok(None);
        };
        word.extend_from_slice(&map.intervals()[i].word);
        cur = next;
        n += 1;
    }
    Ok(Some((n, cur, word)))
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    s: &TranslationSurface,
    tr: &Transversal,
    map: &ReturnMap,
    tracer: &mut CutTracer,
    p: &Quad,
    side: Side,
    near: usize,
    far: usize,
    k: u32,
    budget: usize,
) -> Result<LoopCertificate> {
    let ivs = map.intervals();
    let eps = Quad::pow2_recip(k);
    let half = Quad::pow2_recip(k + 1);
    let quarter = Quad::frac(1, 4);
    let shrink = Quad::frac(7, 8);
    let mut delta = half.clone().min(&ivs[near].len() * &quarter);
    let mut delta_far = half.min(&ivs[far].len() * &quarter);
    for _ in 0..16 {
        let q = side.step(p, &delta);
        let a = &delta * &Quad::frac(1, 3);
        // least n with every interval of 𝓘ₙ shorter than a
        let Some(n0) = tracer.least_depth(&a, budget) else {
            return Err(Error::BudgetExhausted(format!(
                "partition intervals stay above {:.3e} up to depth {budget}",
                a.to_f64()
            )));
        };
        // then the first n ≥ n0 with T^n(Q) strictly between Q and P, within a of Q
        let between = |x: &Quad| match side {
            Side::Below => &q < x && x < p && (x - &q) < a,
            Side::Above => p < x && x < &q && (&q - x) < a,
        };
        let Some((n, tn_q, mut word)) = run_until(map, &q, n0, budget, between)? else {
            delta = &delta * &shrink;
            continue;
        };
        let level = tracer.level_set(n, &q);
        // R across P in I′, then flow back to within 2^{−k} of Q
        let mut closed = None;
        for _ in 0..16 {
            let r = side.other().step(p, &delta_far);
            match run_until(map, &r, 1, budget, |x| (x - &q).abs() < eps)? {
                Some(found) => {
                    closed = Some((r, found));
                    break;
                }
                None => delta_far = &delta_far * &shrink,
            }
        }
        let Some((r, (m, tm_r, tail))) = closed else {
            return Err(Error::BudgetExhausted("no regular point R found near P".into()));
        };
        let head_len = word.len();
        word.extend(tail);
        let measure = &tr.height(s) * &(&(&r - &tn_q).abs() + &(&tm_r - &q).abs());
        let back = s.edge(tr.edge()).partner.expect("transversal is paired");
        let mut aligned = vec![back];
        aligned.extend_from_slice(&word);
        return Ok(LoopCertificate {
            k,
            side,
            p: p.clone(),
            q,
            r,
            a,
            n,
            m,
            tn_q,
            tm_r,
            level_set: level,
            i_near: (ivs[near].lo.clone(), ivs[near].hi.clone()),
            i_far: (ivs[far].lo.clone(), ivs[far].hi.clone()),
            word_near: ivs[near].word.clone(),
            word_far: ivs[far].word.clone(),
            aligned_inadmissible: realizing_set(s, &aligned).is_empty(),
            inadmissible: realizing_set(s, &word).is_empty(),
            word,
            head_len,
            measure,
            constant: loop_constant(s, tr),
        });
    }
    Err(Error::BudgetExhausted("every perturbation of Q met a vertex".into()))
}

/// Checks the level-set argument recorded in a certificate: the level set
/// of `Q` is shorter than `a`, `T^n` carries it into `I`, the return words
/// of `I` and `I′` differ, and the word continues with that of `I′`.
pub fn check_level_set_argument(c: &LoopCertificate) -> bool {
    let (lo, hi) = &c.level_set;
    let shift = &c.tn_q - &c.q;
    let (ilo, ihi) = &c.i_near;
    (hi - lo) < c.a
        && lo < &c.q
        && &c.q < hi
        && ilo <= &(lo + &shift)
        && &(hi + &shift) <= ihi
        && c.word_near != c.word_far
        && c.word[c.head_len..].starts_with(&c.word_far)
}

/// Builds the loop at level `k` from scratch.
pub fn inadmissible_loop(s: &TranslationSurface, tr: &Transversal, k: u32, budget: usize) -> Result<LoopCertificate> {
    let np = find_non_saddle_point(s, tr, 1000)?;
    build_inadmissible_loop(s, tr, &np, k, budget)
}

/// One loop of an exotic word and the move along the transversal that
/// leads to its base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePiece {
    pub certificate: LoopCertificate,
    /// Move from the previous base point; zero for the first piece.
    pub connector: Quad,
    pub cumulative: Quad,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceExoticPrefix {
    pub pieces: Vec<SurfacePiece>,
    pub skipped: Vec<u32>,
    pub constant: Quad,
    pub connector_constant: Quad,
}

impl SurfaceExoticPrefix {
    pub fn levels(&self) -> Vec<u32> {
        self.pieces.iter().map(|p| p.certificate.k).collect()
    }

    pub fn word(&self) -> Vec<EdgeId> {
        self.pieces.iter().flat_map(|p| p.certificate.word.iter().copied()).collect()
    }

    pub fn measure(&self) -> Quad {
        self.pieces.last().map(|p| p.cumulative.clone()).unwrap_or_else(Quad::zero)
    }

    /// `c·Σ2^{−k} + c′·Σ2^{−k}` over the kept levels.
    pub fn ledger_bound(&self) -> Quad {
        let sum = self
            .pieces
            .iter()
            .fold(Quad::zero(), |acc, p| &acc + &Quad::pow2_recip(p.certificate.k));
        &(&self.constant + &self.connector_constant) * &sum
    }

    pub fn measure_signature(&self) -> Vec<Quad> {
        self.pieces.iter().map(|p| p.certificate.measure.clone()).collect()
    }
}

/// Concatenates loops at increasing levels, joined by moves along the
/// transversal. A level is kept only if its loop measure is below a
/// quarter of the previous kept one.
pub fn synthesize_exotic(
    s: &TranslationSurface,
    tr: &Transversal,
    levels: &[u32],
    budget: usize,
) -> Result<SurfaceExoticPrefix> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("levels must increase".into()));
    }
    let mut out = SurfaceExoticPrefix {
        pieces: Vec::new(),
        skipped: Vec::new(),
        constant: loop_constant(s, tr),
        connector_constant: tr.height(s),
    };
    if levels.is_empty() {
        return Ok(out);
    }
    let np = find_non_saddle_point(s, tr, 1000)?;
    let map = ReturnMap::new(s, tr)?;
    let quarter = Quad::frac(1, 4);
    for &k in levels {
        let cert = build_with_map(s, tr, &map, &np, k, budget)?;
        let (connector, total) = match out.pieces.last() {
            None => (Quad::zero(), Quad::zero()),
            Some(prev) => {
                if cert.measure >= &prev.certificate.measure * &quarter {
                    out.skipped.push(k);
                    continue;
                }
                let c = &tr.height(s) * &(&cert.q - &prev.certificate.q).abs();
                (c, prev.cumulative.clone())
            }
        };
        let cumulative = &(&total + &connector) + &cert.measure;
        out.pieces.push(SurfacePiece {
            certificate: cert,
            connector,
            cumulative,
        });
    }
    Ok(out)
}
