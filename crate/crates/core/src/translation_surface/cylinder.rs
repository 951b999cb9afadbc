//! Exact sets of leaf points realizing a crossing word.

use super::surface::{Dir, EdgeId, Position, Step, TranslationSurface};
use crate::field::Quad;
use crate::flat_torus::FlatPoint;

/// Open height interval on an edge, in the chart of that edge's polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpan {
    pub edge: EdgeId,
    pub lo: Quad,
    pub hi: Quad,
}

/// Corner heights strictly inside `(lo, hi)`, sorted.
fn inner_heights(s: &TranslationSurface, poly: usize, lo: &Quad, hi: &Quad) -> Vec<Quad> {
    let (lf, le) = lo.approx();
    let (hf, he) = hi.approx();
    let mut out = Vec::new();
    for (c, vy) in s.corner_heights_f64(poly) {
        if vy < lf - le - 1e-12 || vy > hf + he + 1e-12 {
            continue;
        }
        let y = &s.polygons()[poly][c].y;
        let clear = vy > lf + le + 1e-12 && vy < hf - he - 1e-12;
        if clear || (lo < y && y < hi) {
            out.push(y.clone());
        }
    }
    out.sort();
    out.dedup();
    out
}

fn exit_between(s: &TranslationSurface, span: &EdgeId, lo: &Quad, hi: &Quad) -> Option<EdgeId> {
    let entry = s.edge(*span);
    let (lf, le) = lo.approx();
    let (hf, he) = hi.approx();
    if hf - lf > 1e-7 && le < 1e-12 && he < 1e-12 {
        if let Some(e) = s.exit_at_height_f64(entry.polygon, *span, 0.5 * (lf + hf)) {
            return Some(e);
        }
    }
    let mid = &(lo + hi) * &Quad::frac(1, 2);
    let t = &(&mid - &entry.start.y) / &entry.dy();
    let x = &entry.start.x + &(&entry.dx() * &t);
    let pos = Position {
        polygon: entry.polygon,
        point: FlatPoint::new(x, mid),
        entry: Some(*span),
    };
    match s.flow_step(&pos, Dir::Right) {
        Step::Crossing { exit, .. } | Step::Boundary { exit, .. } => Some(exit),
        Step::Vertex { .. } => None,
    }
}

/// Points just past the last crossing of the word, over all non-singular
/// leaf segments whose consecutive rightward crossings spell `word`.
/// Empty exactly when no leaf reads the word.
pub fn realizing_set(s: &TranslationSurface, word: &[EdgeId]) -> Vec<EdgeSpan> {
    let Some((&first, rest)) = word.split_first() else {
        return Vec::new();
    };
    let e = s.edge(first);
    let Some(f) = e.partner else {
        return Vec::new();
    };
    let fe = s.edge(f);
    let lo = fe.start.y.clone().min(fe.end.y.clone());
    let hi = fe.start.y.clone().max(fe.end.y.clone());
    let mut set = vec![EdgeSpan { edge: f, lo, hi }];
    for &letter in rest {
        let mut next = Vec::new();
        let exit = s.edge(letter);
        let (Some(g), Some((_, dy))) = (exit.partner, &exit.shift) else {
            return Vec::new();
        };
        for span in &set {
            let poly = s.edge(span.edge).polygon;
            let mut bounds = vec![span.lo.clone()];
            bounds.extend(inner_heights(s, poly, &span.lo, &span.hi));
            bounds.push(span.hi.clone());
            for w in bounds.windows(2) {
                if exit_between(s, &span.edge, &w[0], &w[1]) == Some(letter) {
                    next.push(EdgeSpan {
                        edge: g,
                        lo: &w[0] + dy,
                        hi: &w[1] + dy,
                    });
                }
            }
        }
        set = next;
        if set.is_empty() {
            break;
        }
    }
    set
}

/// Whether some non-singular leaf reads `word`.
pub fn is_leaf_word(s: &TranslationSurface, word: &[EdgeId]) -> bool {
    word.is_empty() || !realizing_set(s, word).is_empty()
}
