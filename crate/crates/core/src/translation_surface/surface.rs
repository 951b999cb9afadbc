//! Polygons with edges glued by translations, and the exact horizontal
//! flow on them.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{Quad, QuadField};
use crate::flat_torus::FlatPoint;

pub type EdgeId = usize;

fn cross(ax: &Quad, ay: &Quad, bx: &Quad, by: &Quad) -> Quad {
    &(ax * by) - &(ay * bx)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub polygon: usize,
    pub index: usize,
    pub start: FlatPoint,
    pub end: FlatPoint,
    pub label: String,
    pub partner: Option<EdgeId>,
    /// Translation carrying this edge onto its partner.
    pub shift: Option<(Quad, Quad)>,
}

impl Edge {
    pub fn dx(&self) -> Quad {
        &self.end.x - &self.start.x
    }

    pub fn dy(&self) -> Quad {
        &self.end.y - &self.start.y
    }

    pub fn is_horizontal(&self) -> bool {
        self.start.y == self.end.y
    }

    pub fn is_boundary(&self) -> bool {
        self.partner.is_none()
    }

    /// Point at parameter `t` from start to end.
    pub fn point_at(&self, t: &Quad) -> FlatPoint {
        FlatPoint::new(&self.start.x + &(&self.dx() * t), &self.start.y + &(&self.dy() * t))
    }
}

/// Horizontal flow direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Right,
    Left,
}

impl Dir {
    fn sign(self) -> i64 {
        match self {
            Dir::Right => 1,
            Dir::Left => -1,
        }
    }
}

/// A point of the surface given in the chart of one polygon, with the
/// edge it was entered through (if it lies on that edge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Position {
    pub polygon: usize,
    pub point: FlatPoint,
    pub entry: Option<EdgeId>,
}

/// Result of flowing to the polygon boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Left the polygon through `exit` at `at` and continues from `next`.
    Crossing {
        exit: EdgeId,
        at: FlatPoint,
        next: Position,
    },
    /// Ran into a polygon corner.
    Vertex { polygon: usize, corner: usize, at: FlatPoint },
    /// Left through an unpaired edge.
    Boundary { exit: EdgeId, at: FlatPoint },
}

/// A horizontal ray leaving a corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separatrix {
    pub polygon: usize,
    pub corner: usize,
    pub dir: Dir,
    /// Set when the ray runs along a horizontal edge.
    pub along_edge: Option<EdgeId>,
}

#[derive(Clone, Debug)]
pub struct TranslationSurface {
    pub field: QuadField,
    polygons: Vec<Vec<FlatPoint>>,
    edges: Vec<Edge>,
    poly_edges: Vec<Vec<EdgeId>>,
    labels: HashMap<String, EdgeId>,
    corner_class: Vec<Vec<usize>>,
    vertex_classes: usize,
    geo: Vec<EdgeGeo>,
    corners_f: Vec<Vec<(f64, f64)>>,
}

/// Per-edge data for the flow step: exact inverse slope and y-range,
/// plus floating approximations used to skip most exact comparisons.
#[derive(Clone, Debug)]
struct EdgeGeo {
    inv: Option<Quad>,
    ylo: Quad,
    yhi: Quad,
    sx: f64,
    sy: f64,
    inv_f: f64,
    ylo_f: f64,
    yhi_f: f64,
    tol: f64,
}

/// Floating decisions closer than this to a tie fall back to exact ones.
const TOL: f64 = 1e-9;

fn geo_of(e: &Edge) -> EdgeGeo {
    let inv = (!e.is_horizontal()).then(|| &e.dx() / &e.dy());
    let ylo = e.start.y.clone().min(e.end.y.clone());
    let yhi = e.start.y.clone().max(e.end.y.clone());
    let inv_f = inv.as_ref().map_or(0.0, Quad::to_f64);
    let scale = [e.start.x.to_f64(), e.start.y.to_f64(), e.end.x.to_f64(), e.end.y.to_f64()]
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    EdgeGeo {
        sx: e.start.x.to_f64(),
        sy: e.start.y.to_f64(),
        ylo_f: ylo.to_f64(),
        yhi_f: yhi.to_f64(),
        tol: TOL * (1.0 + inv_f.abs()) * scale,
        inv,
        inv_f,
        ylo,
        yhi,
    }
}

impl TranslationSurface {
    /// Builds and validates a surface. `labels[i][j]` names the edge from
    /// corner `j` to corner `j+1` of polygon `i`; `pairs` lists glued
    /// label pairs.
    pub fn new(
        field: QuadField,
        polygons: Vec<Vec<FlatPoint>>,
        labels: Vec<Vec<String>>,
        pairs: &[(String, String)],
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidSurface(m));
        if polygons.is_empty() {
            return bad("no polygons".into());
        }
        if labels.len() != polygons.len() {
            return bad("one label list per polygon required".into());
        }
        let mut edges = Vec::new();
        let mut poly_edges = Vec::new();
        let mut by_label = HashMap::new();
        for (i, (poly, labs)) in polygons.iter().zip(&labels).enumerate() {
            if poly.len() < 3 {
                return bad(format!("polygon {i} has fewer than 3 vertices"));
            }
            if labs.len() != poly.len() {
                return bad(format!("polygon {i}: {} labels for {} edges", labs.len(), poly.len()));
            }
            for p in poly {
                if !field.contains(&p.x) || !field.contains(&p.y) {
                    return bad(format!("polygon {i}: vertex {p} outside the field {field}"));
                }
            }
            check_simple_ccw(i, poly)?;
            let mut ids = Vec::new();
            for j in 0..poly.len() {
                let id = edges.len();
                if by_label.insert(labs[j].clone(), id).is_some() {
                    return bad(format!("label {} used twice", labs[j]));
                }
                edges.push(Edge {
                    polygon: i,
                    index: j,
                    start: poly[j].clone(),
                    end: poly[(j + 1) % poly.len()].clone(),
                    label: labs[j].clone(),
                    partner: None,
                    shift: None,
                });
                ids.push(id);
            }
            poly_edges.push(ids);
        }
        for (a, b) in pairs {
            let (&ea, &eb) = match (by_label.get(a), by_label.get(b)) {
                (Some(x), Some(y)) => (x, y),
                _ => return bad(format!("unknown label in pair ({a}, {b})")),
            };
            if ea == eb {
                return bad(format!("edge {a} glued to itself"));
            }
            if edges[ea].partner.is_some() || edges[eb].partner.is_some() {
                return bad(format!("edge in pair ({a}, {b}) already glued"));
            }
            let (ax, ay, bx, by) = (edges[ea].dx(), edges[ea].dy(), edges[eb].dx(), edges[eb].dy());
            if ax != -bx.clone() || ay != -by.clone() {
                if cross(&ax, &ay, &bx, &by).is_zero() {
                    return bad(format!("edges {a} and {b} differ in length or orientation"));
                }
                return bad(format!("edges {a} and {b} are not parallel"));
            }
            let sa = (&edges[eb].end.x - &edges[ea].start.x, &edges[eb].end.y - &edges[ea].start.y);
            let sb = (-sa.0.clone(), -sa.1.clone());
            edges[ea].partner = Some(eb);
            edges[ea].shift = Some(sa);
            edges[eb].partner = Some(ea);
            edges[eb].shift = Some(sb);
        }
        let (corner_class, vertex_classes) = vertex_classes(&polygons, &edges);
        let s = TranslationSurface {
            field,
            polygons,
            edges,
            poly_edges,
            labels: by_label,
            corner_class,
            vertex_classes,
            geo: Vec::new(),
            corners_f: Vec::new(),
        };
        let mut s = s;
        s.geo = s.edges.iter().map(geo_of).collect();
        s.corners_f = s
            .polygons
            .iter()
            .map(|p| p.iter().map(|v| (v.x.to_f64(), v.y.to_f64())).collect())
            .collect();
        if !s.is_connected() {
            return bad("surface is not connected".into());
        }
        Ok(s)
    }

    pub fn polygons(&self) -> &[Vec<FlatPoint>] {
        &self.polygons
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_by_label(&self, label: &str) -> Option<EdgeId> {
        self.labels.get(label).copied()
    }

    pub fn labels(&self) -> Vec<Vec<String>> {
        self.poly_edges
            .iter()
            .map(|ids| ids.iter().map(|&e| self.edges[e].label.clone()).collect())
            .collect()
    }

    /// Glued pairs, each listed once in edge order.
    pub fn pairs(&self) -> Vec<(EdgeId, EdgeId)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.partner.filter(|&p| p > i).map(|p| (i, p)))
            .collect()
    }

    pub fn vertex_class(&self, polygon: usize, corner: usize) -> usize {
        self.corner_class[polygon][corner]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_classes
    }

    /// V − E + F with glued pairs counted once.
    pub fn euler_characteristic(&self) -> i64 {
        let boundary = self.edges.iter().filter(|e| e.is_boundary()).count();
        let e = self.pairs().len() + boundary;
        self.vertex_classes as i64 - e as i64 + self.polygons.len() as i64
    }

    pub fn has_boundary(&self) -> bool {
        self.edges.iter().any(|e| e.is_boundary())
    }

    /// Genus of a closed surface, from the Euler characteristic.
    pub fn genus(&self) -> Option<i64> {
        if self.has_boundary() {
            return None;
        }
        let chi = self.euler_characteristic();
        if chi % 2 != 0 || chi > 2 {
            return None;
        }
        Some((2 - chi) / 2)
    }

    fn is_connected(&self) -> bool {
        let n = self.polygons.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for &e in &self.poly_edges[p] {
                if let Some(q) = self.edges[e].partner.map(|f| self.edges[f].polygon) {
                    if !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Flows horizontally from `pos` to the boundary of its polygon.
    pub fn flow_step(&self, pos: &Position, dir: Dir) -> Step {
        match self.filtered_event(pos, dir) {
            Some(ev) => self.finish(pos, ev),
            None => self.flow_step_exact(pos, dir),
        }
    }

    /// The nearest event decided in floating point, or `None` when any
    /// comparison is too close to call.
    fn filtered_event(&self, pos: &Position, dir: Dir) -> Option<Event> {
        let (xf, xe) = pos.point.x.approx();
        let (yf, ye) = pos.point.y.approx();
        if !(xe < 1e-12 && ye < 1e-12) {
            return None;
        }
        let sgn = dir.sign() as f64;
        let mut best: Option<(f64, Event)> = None;
        let mut second = f64::INFINITY;
        let mut offer = |d: f64, ev: Event, best: &mut Option<(f64, Event)>| {
            if d <= 0.0 {
                return;
            }
            match best {
                Some((b, _)) if d >= *b => second = second.min(d),
                _ => {
                    if let Some((b, _)) = best.take() {
                        second = second.min(b);
                    }
                    *best = Some((d, ev));
                }
            }
        };
        for (c, &(vx, vy)) in self.corners_f[pos.polygon].iter().enumerate() {
            if (vy - yf).abs() <= TOL {
                if self.polygons[pos.polygon][c].y != pos.point.y {
                    continue;
                }
                let d = (vx - xf) * sgn;
                if d.abs() <= TOL {
                    return None;
                }
                offer(d, Event::Corner(c), &mut best);
            }
        }
        for &eid in &self.poly_edges[pos.polygon] {
            if Some(eid) == pos.entry {
                continue;
            }
            let g = &self.geo[eid];
            if g.inv.is_none() || yf < g.ylo_f - g.tol || yf > g.yhi_f + g.tol {
                continue;
            }
            if (yf - g.ylo_f).abs() <= g.tol || (yf - g.yhi_f).abs() <= g.tol {
                let y = &pos.point.y;
                if !(&g.ylo < y && y < &g.yhi) {
                    continue;
                }
            }
            let d = (g.sx + (yf - g.sy) * g.inv_f - xf) * sgn;
            if d.abs() <= g.tol {
                return None;
            }
            offer(d, Event::Edge(eid, Quad::zero()), &mut best);
        }
        let (b, ev) = best?;
        if second - b <= TOL * 16.0 {
            return None;
        }
        Some(match ev {
            Event::Edge(eid, _) => {
                let e = &self.edges[eid];
                let inv = self.geo[eid].inv.as_ref().unwrap();
                Event::Edge(eid, &e.start.x + &(&(&pos.point.y - &e.start.y) * inv))
            }
            c => c,
        })
    }

    /// Edge through which the rightward ray entering `polygon` through
    /// `entry` at height `y` leaves, decided in floating point. `None` if
    /// that is too close to call or the ray meets a corner.
    pub(crate) fn exit_at_height_f64(&self, polygon: usize, entry: EdgeId, y: f64) -> Option<EdgeId> {
        let ge = &self.geo[entry];
        let x = ge.sx + (y - ge.sy) * ge.inv_f;
        let mut best: Option<(f64, EdgeId)> = None;
        let mut second = f64::INFINITY;
        for &(_, vy) in &self.corners_f[polygon] {
            if (vy - y).abs() <= TOL {
                return None;
            }
        }
        for &eid in &self.poly_edges[polygon] {
            if eid == entry {
                continue;
            }
            let g = &self.geo[eid];
            if g.inv.is_none() || y <= g.ylo_f || y >= g.yhi_f {
                continue;
            }
            let d = g.sx + (y - g.sy) * g.inv_f - x;
            if d.abs() <= g.tol {
                return None;
            }
            if d > 0.0 {
                match best {
                    Some((b, _)) if d >= b => second = second.min(d),
                    _ => {
                        if let Some((b, _)) = best {
                            second = second.min(b);
                        }
                        best = Some((d, eid));
                    }
                }
            }
        }
        let (b, e) = best?;
        (second - b > TOL * 16.0).then_some(e)
    }

    pub(crate) fn corner_heights_f64(&self, polygon: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.corners_f[polygon].iter().enumerate().map(|(i, &(_, y))| (i, y))
    }

    fn finish(&self, pos: &Position, ev: Event) -> Step {
        match ev {
            Event::Corner(c) => Step::Vertex {
                polygon: pos.polygon,
                corner: c,
                at: self.polygons[pos.polygon][c].clone(),
            },
            Event::Edge(eid, xe) => {
                let at = FlatPoint::new(xe, pos.point.y.clone());
                let e = &self.edges[eid];
                match (e.partner, &e.shift) {
                    (Some(f), Some((sx, sy))) => Step::Crossing {
                        exit: eid,
                        next: Position {
                            polygon: self.edges[f].polygon,
                            point: at.translate(sx, sy),
                            entry: Some(f),
                        },
                        at,
                    },
                    _ => Step::Boundary { exit: eid, at },
                }
            }
        }
    }

    fn flow_step_exact(&self, pos: &Position, dir: Dir) -> Step {
        let sgn = Quad::from_int(dir.sign());
        let (x, y) = (&pos.point.x, &pos.point.y);
        // nearest boundary event strictly ahead
        let mut best: Option<(Quad, Event)> = None;
        let mut consider = |dist: Quad, ev: Event| {
            if dist.is_positive() && best.as_ref().is_none_or(|(d, _)| dist < *d) {
                best = Some((dist, ev));
            }
        };
        let poly = &self.polygons[pos.polygon];
        for (c, v) in poly.iter().enumerate() {
            if &v.y == y {
                consider(&(&v.x - x) * &sgn, Event::Corner(c));
            }
        }
        for &eid in &self.poly_edges[pos.polygon] {
            if Some(eid) == pos.entry {
                continue;
            }
            let e = &self.edges[eid];
            let (lo, hi) = if e.start.y < e.end.y {
                (&e.start.y, &e.end.y)
            } else {
                (&e.end.y, &e.start.y)
            };
            if !(lo < y && y < hi) {
                continue;
            }
            let xe = &e.start.x + &(&(y - &e.start.y) * self.geo[eid].inv.as_ref().unwrap());
            consider(&(&xe - x) * &sgn, Event::Edge(eid, xe));
        }
        match best {
            None => Step::Vertex {
                polygon: pos.polygon,
                corner: usize::MAX,
                at: pos.point.clone(),
            },
            Some((_, ev)) => self.finish(pos, ev),
        }
    }

    /// Horizontal rays leaving corners in direction `dir`: one per corner
    /// whose interior sector contains the direction, plus horizontal edges
    /// pointing that way.
    pub fn separatrices(&self, dir: Dir) -> Vec<Separatrix> {
        let d = Quad::from_int(dir.sign());
        let z = Quad::zero();
        let mut out = Vec::new();
        for (i, poly) in self.polygons.iter().enumerate() {
            let n = poly.len();
            for c in 0..n {
                let v = &poly[c];
                let u = &poly[(c + n - 1) % n];
                let w = &poly[(c + 1) % n];
                let (e1x, e1y) = (&w.x - &v.x, &w.y - &v.y);
                let (e0x, e0y) = (&u.x - &v.x, &u.y - &v.y);
                if e1y.is_zero() && e1x.signum() == d.signum() {
                    out.push(Separatrix {
                        polygon: i,
                        corner: c,
                        dir,
                        along_edge: Some(self.poly_edges[i][c]),
                    });
                    continue;
                }
                let turn = cross(&e1x, &e1y, &e0x, &e0y);
                let c1 = cross(&e1x, &e1y, &d, &z);
                let c0 = cross(&d, &z, &e0x, &e0y);
                let inside = match turn.signum() {
                    1 => c1.is_positive() && c0.is_positive(),
                    -1 => !(!c1.is_positive() && !c0.is_positive()),
                    _ => c1.is_positive(),
                };
                if inside {
                    out.push(Separatrix {
                        polygon: i,
                        corner: c,
                        dir,
                        along_edge: None,
                    });
                }
            }
        }
        out
    }

    /// Start position of a separatrix (the corner itself, no entry edge).
    pub fn separatrix_start(&self, s: &Separatrix) -> Position {
        Position {
            polygon: s.polygon,
            point: self.polygons[s.polygon][s.corner].clone(),
            entry: None,
        }
    }

    /// Whether the point lies in the closed polygon.
    pub fn contains(&self, polygon: usize, p: &FlatPoint) -> bool {
        let poly = &self.polygons[polygon];
        let n = poly.len();
        // winding via crossings of the rightward ray; boundary counts as inside
        let mut inside = false;
        for j in 0..n {
            let a = &poly[j];
            let b = &poly[(j + 1) % n];
            let ex = &b.x - &a.x;
            let ey = &b.y - &a.y;
            let c = cross(&ex, &ey, &(&p.x - &a.x), &(&p.y - &a.y));
            let within = |u: &Quad, v: &Quad, t: &Quad| (u <= t && t <= v) || (v <= t && t <= u);
            if c.is_zero() && within(&a.x, &b.x, &p.x) && within(&a.y, &b.y, &p.y) {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let t = &(&p.y - &a.y) / &ey;
                let xe = &a.x + &(&ex * &t);
                if xe > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

enum Event {
    Corner(usize),
    Edge(EdgeId, Quad),
}

fn check_simple_ccw(i: usize, poly: &[FlatPoint]) -> Result<()> {
    let n = poly.len();
    let mut area2 = Quad::zero();
    for j in 0..n {
        let a = &poly[j];
        let b = &poly[(j + 1) % n];
        area2 = &area2 + &cross(&a.x, &a.y, &b.x, &b.y);
        if a == b {
            return Err(Error::InvalidSurface(format!("polygon {i}: repeated vertex {a}")));
        }
    }
    if !area2.is_positive() {
        return Err(Error::InvalidSurface(format!(
            "polygon {i} is not counterclockwise (signed area {area2})"
        )));
    }
    for j in 0..n {
        for k in j + 1..n {
            if k == j + 1 || (j == 0 && k == n - 1) {
                continue;
            }
            if segments_meet(&poly[j], &poly[(j + 1) % n], &poly[k], &poly[(k + 1) % n]) {
                return Err(Error::InvalidSurface(format!("polygon {i}: edges {j} and {k} intersect")));
            }
        }
    }
    Ok(())
}

fn orient(a: &FlatPoint, b: &FlatPoint, c: &FlatPoint) -> i8 {
    cross(&(&b.x - &a.x), &(&b.y - &a.y), &(&c.x - &a.x), &(&c.y - &a.y)).signum()
}

fn on_segment(a: &FlatPoint, b: &FlatPoint, p: &FlatPoint) -> bool {
    let lo_x = a.x.clone().min(b.x.clone());
    let hi_x = a.x.clone().max(b.x.clone());
    let lo_y = a.y.clone().min(b.y.clone());
    let hi_y = a.y.clone().max(b.y.clone());
    lo_x <= p.x && p.x <= hi_x && lo_y <= p.y && p.y <= hi_y
}

fn segments_meet(a: &FlatPoint, b: &FlatPoint, c: &FlatPoint, d: &FlatPoint) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

/// Union-find of polygon corners under the gluings: the start of an edge
/// is identified with the end of its partner and vice versa.
fn vertex_classes(polygons: &[Vec<FlatPoint>], edges: &[Edge]) -> (Vec<Vec<usize>>, usize) {
    let offsets: Vec<usize> = polygons
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.len();
            Some(o)
        })
        .collect();
    let total: usize = polygons.iter().map(Vec::len).sum();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let corner = |e: &Edge, end: bool| {
        let n = polygons[e.polygon].len();
        offsets[e.polygon] + if end { (e.index + 1) % n } else { e.index }
    };
    for e in edges {
        if let Some(f) = e.partner {
            let f = &edges[f];
            for (a, b) in [(corner(e, false), corner(f, true)), (corner(e, true), corner(f, false))] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut ids = HashMap::new();
    let mut classes = Vec::new();
    for (i, p) in polygons.iter().enumerate() {
        let mut row = Vec::new();
        for c in 0..p.len() {
            let r = find(&mut parent, offsets[i] + c);
            let next = ids.len();
            row.push(*ids.entry(r).or_insert(next));
        }
        classes.push(row);
    }
    (classes, ids.len())
}
