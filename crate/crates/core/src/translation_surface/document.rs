//! JSON surface documents and the built-in example surfaces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::surface::TranslationSurface;
use crate::error::{Error, Result};
use crate::field::{Quad, QuadField};
use crate::flat_torus::FlatPoint;

/// On-disk form of a surface. Coordinates are field elements written as
/// sums of terms; a term is a product of literals and constant names,
/// e.g. `"1+g"`, `"2*g"`, `"sqrt2-1"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDocument {
    pub field: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
    pub polygons: Vec<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
    pub identify: Vec<[String; 2]>,
    /// Label of the default transversal edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversal: Option<String>,
}

impl SurfaceDocument {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("surface json: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("surface document serializes")
    }

    pub fn build(&self) -> Result<TranslationSurface> {
        let field = QuadField::parse(&self.field)?;
        let mut consts: BTreeMap<String, Quad> = BTreeMap::new();
        // constants may refer to earlier ones in name order
        for (k, v) in &self.constants {
            if !k.chars().all(|c| c.is_ascii_alphabetic() || c == '_') || k.starts_with("sqrt") {
                return Err(Error::Parse(format!("bad constant name {k:?}")));
            }
            let q = eval_expr(v, &consts)?;
            consts.insert(k.clone(), q);
        }
        let mut polys = Vec::new();
        for poly in &self.polygons {
            let mut pts = Vec::new();
            for [x, y] in poly {
                pts.push(FlatPoint::new(eval_expr(x, &consts)?, eval_expr(y, &consts)?));
            }
            polys.push(pts);
        }
        let labels = match &self.labels {
            Some(l) => l.clone(),
            None => {
                let mut n = 0;
                polys
                    .iter()
                    .map(|p| {
                        (0..p.len())
                            .map(|_| {
                                n += 1;
                                format!("s{}", n - 1)
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        let pairs: Vec<(String, String)> = self.identify.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
        let s = TranslationSurface::new(field, polys, labels, &pairs)?;
        if let Some(t) = &self.transversal {
            if s.edge_by_label(t).is_none() {
                return Err(Error::InvalidSurface(format!("unknown transversal label {t}")));
            }
        }
        Ok(s)
    }

    /// Document for an existing surface with coordinates written out.
    pub fn from_surface(s: &TranslationSurface, transversal: Option<&str>) -> Self {
        let polygons = s
            .polygons()
            .iter()
            .map(|p| p.iter().map(|v| [v.x.to_string(), v.y.to_string()]).collect())
            .collect();
        let identify = s
            .pairs()
            .into_iter()
            .map(|(a, b)| [s.edge(a).label.clone(), s.edge(b).label.clone()])
            .collect();
        SurfaceDocument {
            field: s.field.to_string(),
            constants: BTreeMap::new(),
            polygons,
            labels: Some(s.labels()),
            identify,
            transversal: transversal.map(str::to_string),
        }
    }
}

/// Evaluates `term (± term)*`, each term a `*`-product of field literals
/// and constant names.
pub fn eval_expr(s: &str, consts: &BTreeMap<String, Quad>) -> Result<Quad> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse("empty coordinate".into()));
    }
    let bytes = t.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'*' | b'/' | b'(' | b'+' | b'-') {
            terms.push(&t[start..i]);
            start = i;
        }
    }
    terms.push(&t[start..]);
    let mut total = Quad::zero();
    for term in terms {
        let (neg, body) = match term.as_bytes()[0] {
            b'-' => (true, &term[1..]),
            b'+' => (false, &term[1..]),
            _ => (false, term),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {s:?}")));
        }
        let mut v = Quad::one();
        for f in body.split('*') {
            let x = match consts.get(f) {
                Some(c) => c.clone(),
                None if f.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) && !f.starts_with("sqrt") => {
                    return Err(Error::Parse(format!("unknown constant {f:?}")))
                }
                None => f.parse::<Quad>()?,
            };
            v = &v * &x;
        }
        total = if neg { &total - &v } else { &total + &v };
    }
    Ok(total)
}

fn pts(v: &[(Quad, Quad)]) -> Vec<FlatPoint> {
    v.iter().map(|(x, y)| FlatPoint::new(x.clone(), y.clone())).collect()
}

fn field_of(g: &Quad) -> QuadField {
    QuadField { d: g.radicand() }
}

fn labels(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// Unit square sheared by `(x, y) ↦ (x, y + γx)`. The left edge `E1` is
/// the usual transversal; its first-return map is `λ ↦ λ + γ mod 1`.
pub fn sheared_torus(gamma: &Quad) -> Result<TranslationSurface> {
    let (z, o) = (Quad::zero(), Quad::one());
    let poly = pts(&[
        (z.clone(), z.clone()),
        (o.clone(), gamma.clone()),
        (o.clone(), gamma + &o),
        (z.clone(), o.clone()),
    ]);
    TranslationSurface::new(
        field_of(gamma),
        vec![poly],
        vec![labels(&["e0", "e1", "E0", "E1"])],
        &pairs(&[("e0", "E0"), ("e1", "E1")]),
    )
}

/// Three-square L-shaped surface of genus 2, sheared by
/// `(x, y) ↦ (x, y + γx)`. Polygon 0 is the column `[0,1]×[0,2]`,
/// polygon 1 the square `[1,2]×[0,1]`. Transversal `E4`.
pub fn genus_two(gamma: &Quad) -> Result<TranslationSurface> {
    let q = |x: i64, y: i64| (Quad::from_int(x), &Quad::from_int(y) + &(gamma * &Quad::from_int(x)));
    let a = pts(&[q(0, 0), q(1, 0), q(1, 1), q(1, 2), q(0, 2), q(0, 1)]);
    let b = pts(&[q(1, 0), q(2, 0), q(2, 1), q(1, 1)]);
    TranslationSurface::new(
        field_of(gamma),
        vec![a, b],
        vec![labels(&["e0", "e1", "e2", "E0", "E2", "E4"]), labels(&["e3", "e4", "E3", "E1"])],
        &pairs(&[("e0", "E0"), ("e1", "E1"), ("e2", "E2"), ("e3", "E3"), ("e4", "E4")]),
    )
}

/// Unit square with only its vertical sides glued: a flat annulus whose
/// horizontal leaves are all closed.
pub fn square_annulus() -> Result<TranslationSurface> {
    let p = pts(&[
        (Quad::zero(), Quad::zero()),
        (Quad::one(), Quad::zero()),
        (Quad::one(), Quad::one()),
        (Quad::zero(), Quad::one()),
    ]);
    TranslationSurface::new(
        QuadField::RATIONAL,
        vec![p],
        vec![labels(&["b0", "r", "b1", "l"])],
        &pairs(&[("r", "l")]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        let mut c = BTreeMap::new();
        c.insert("g".to_string(), "-1+sqrt2".parse::<Quad>().unwrap());
        assert_eq!(eval_expr("g+1", &c).unwrap(), Quad::sqrt_of(2));
        assert_eq!(eval_expr("2*g - g", &c).unwrap(), c["g"]);
        assert_eq!(eval_expr("sqrt2-1", &c).unwrap(), c["g"]);
        assert_eq!(eval_expr("-1/2", &c).unwrap(), Quad::frac(-1, 2));
        assert!(eval_expr("h", &c).is_err());
        assert!(eval_expr("1+", &c).is_err());
    }

    #[test]
    fn fixtures_topology() {
        let g = "-1+sqrt2".parse::<Quad>().unwrap();
        let t = sheared_torus(&g).unwrap();
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.genus(), Some(1));
        let l = genus_two(&g).unwrap();
        assert_eq!(l.vertex_count(), 1);
        assert_eq!(l.euler_characteristic(), -2);
        assert_eq!(l.genus(), Some(2));
        let a = square_annulus().unwrap();
        assert!(a.has_boundary());
        assert_eq!(a.euler_characteristic(), 0);
    }

    #[test]
    fn document_roundtrip() {
        let doc = SurfaceDocument::from_json(
            r#"{"field":"sqrt2","constants":{"g":"sqrt2-1"},
                "polygons":[[["0","0"],["1","g"],["1","g+1"],["0","1"]]],
                "identify":[["s0","s2"],["s1","s3"]]}"#,
        )
        .unwrap();
        let s = doc.build().unwrap();
        assert_eq!(s.genus(), Some(1));
        let back = SurfaceDocument::from_surface(&s, None);
        let s2 = SurfaceDocument::from_json(&back.to_json()).unwrap().build().unwrap();
        assert_eq!(s2.polygons(), s.polygons());
    }

    #[test]
    fn rejects_bad_gluings() {
        let mk = |ident: &str| {
            SurfaceDocument::from_json(&format!(
                r#"{{"field":"Q","polygons":[[["0","0"],["1","0"],["1","1"],["0","1"]]],"identify":{ident}}}"#
            ))
            .unwrap()
            .build()
        };
        assert!(mk(r#"[["s0","s2"],["s1","s3"]]"#).is_ok());
        assert!(matches!(mk(r#"[["s0","s1"]]"#), Err(Error::InvalidSurface(_))));
        assert!(matches!(mk(r#"[["s0","s0"]]"#), Err(Error::InvalidSurface(_))));
        assert!(matches!(mk(r#"[["s0","s9"]]"#), Err(Error::InvalidSurface(_))));
        let cw = SurfaceDocument::from_json(
            r#"{"field":"Q","polygons":[[["0","0"],["0","1"],["1","1"],["1","0"]]],"identify":[]}"#,
        )
        .unwrap();
        assert!(matches!(cw.build(), Err(Error::InvalidSurface(_))));
        let bow = SurfaceDocument::from_json(
            r#"{"field":"Q","polygons":[[["0","0"],["1","1"],["1","0"],["0","1"]]],"identify":[]}"#,
        )
        .unwrap();
        assert!(bow.build().is_err());
    }
}
