//! JSON documents for words, paths and certificates. Exact values are
//! always strings; `*_decimal` fields are approximations for plotting.

use serde::{Deserialize, Serialize};

use crate::cf_arith::ContinuedFraction;
use crate::admissibility::{AdmissibilityCertificate, Verdict};
use crate::error::{Error, Result};
use crate::field::{Quad, QuadField};
use crate::flat_torus::{FlatPath, FlatPoint, Marker};
use crate::torus_words::{BlockWord, LetterWord, Orientation};
use crate::translation_surface::{
    check_level_set_argument, realizing_set, EdgeId, LoopCertificate, ReturnPartition, Side, TranslationSurface,
    Transversal,
};

fn json_err(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what} json: {e}"))
}

fn q(s: &str) -> Result<Quad> {
    s.parse()
}

fn dec(x: &Quad) -> f64 {
    // rounded so the text form is stable
    let v = x.to_f64();
    format!("{v:.12e}").parse().unwrap_or(v)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("documents serialize")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordDoc {
    pub alphabet: String,
    pub letters: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_decimal: Option<f64>,
}

impl WordDoc {
    pub fn from_letters(w: &LetterWord, measure: Option<&Quad>) -> Self {
        WordDoc {
            alphabet: "abAB".into(),
            letters: w.to_string(),
            blocks: None,
            orientation: None,
            measure: measure.map(Quad::to_string),
            measure_decimal: measure.map(dec),
        }
    }

    pub fn from_blocks(w: &BlockWord, measure: Option<&Quad>) -> Self {
        WordDoc {
            blocks: Some(w.blocks().to_vec()),
            orientation: Some(w.orientation()),
            ..Self::from_letters(&w.to_letters(), measure)
        }
    }

    /// Parses and checks that letters, blocks and measure agree.
    pub fn parse(s: &str) -> Result<Self> {
        let d: WordDoc = serde_json::from_str(s).map_err(|e| json_err("word", e))?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<LetterWord> {
        if self.alphabet != "abAB" {
            return Err(Error::Parse(format!("unsupported alphabet {:?}", self.alphabet)));
        }
        let w: LetterWord = self.letters.parse()?;
        if let Some(b) = &self.blocks {
            let bw = BlockWord::from_blocks(b.clone(), self.orientation.unwrap_or(Orientation::BA))?;
            if bw.to_letters() != w {
                return Err(Error::Parse("blocks do not expand to the letters".into()));
            }
        }
        if let Some(m) = &self.measure {
            q(m)?;
        }
        Ok(w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDoc {
    pub field: String,
    pub vertices: Vec<[String; 2]>,
    pub markers: Vec<String>,
}

impl PathDoc {
    pub fn from_path(p: &FlatPath) -> Self {
        let field = p
            .vertices()
            .iter()
            .find_map(|v| v.x.radicand().or(v.y.radicand()))
            .map_or(QuadField::RATIONAL, |d| QuadField { d: Some(d) });
        PathDoc {
            field: field.to_string(),
            vertices: p.vertices().iter().map(|v| [v.x.to_string(), v.y.to_string()]).collect(),
            markers: p.markers().iter().map(Marker::name).collect(),
        }
    }

    pub fn parse(s: &str) -> Result<FlatPath> {
        let d: PathDoc = serde_json::from_str(s).map_err(|e| json_err("path", e))?;
        d.to_path()
    }

    pub fn to_path(&self) -> Result<FlatPath> {
        let field = QuadField::parse(&self.field)?;
        let mut vs = Vec::with_capacity(self.vertices.len());
        for [x, y] in &self.vertices {
            let p = FlatPoint::new(q(x)?, q(y)?);
            if !field.contains(&p.x) || !field.contains(&p.y) {
                return Err(Error::Parse(format!("vertex {p} outside the field {field}")));
            }
            vs.push(p);
        }
        let ms = self.markers.iter().map(|m| Marker::parse(m)).collect::<Result<Vec<_>>>()?;
        FlatPath::from_parts(vs, ms)
    }
}

/// Seeded search for a word among sampled leaves: `starts` leaves of
/// `length` letters (torus) or returns (surfaces).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingDoc {
    pub seed: u64,
    pub starts: usize,
    pub length: usize,
    pub seen: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub start: String,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibilityDoc {
    pub theta: String,
    pub word: String,
    pub verdict: String,
    pub word_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergent: Option<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingDoc>,
}

impl AdmissibilityDoc {
    pub fn new(theta: &ContinuedFraction, word: &LetterWord, c: &AdmissibilityCertificate) -> Self {
        AdmissibilityDoc {
            theta: theta.to_string(),
            word: word.to_string(),
            verdict: match c.verdict {
                Verdict::Admissible => "admissible",
                Verdict::Inadmissible => "inadmissible",
            }
            .into(),
            word_len: c.word_len,
            convergent: c
                .convergent
                .as_ref()
                .map(|(l, p, q)| [l.to_string(), p.to_string(), q.to_string()]),
            witness: c.witness.as_ref().map(|w| WitnessDoc {
                start: w.start.to_string(),
                offset: w.offset,
            }),
            reason: c.reason.clone(),
            sampling: None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let d: AdmissibilityDoc = serde_json::from_str(s).map_err(|e| json_err("certificate", e))?;
        ContinuedFraction::parse(&d.theta)?;
        d.word.parse::<LetterWord>()?;
        if !matches!(d.verdict.as_str(), "admissible" | "inadmissible") {
            return Err(Error::Parse(format!("unknown verdict {:?}", d.verdict)));
        }
        if let Some(w) = &d.witness {
            q(&w.start)?;
        }
        Ok(d)
    }
}

fn labels(s: &TranslationSurface, w: &[EdgeId]) -> Vec<String> {
    w.iter().map(|&e| s.edge(e).label.clone()).collect()
}

fn edges(s: &TranslationSurface, w: &[String]) -> Result<Vec<EdgeId>> {
    w.iter()
        .map(|l| {
            s.edge_by_label(l)
                .ok_or_else(|| Error::Parse(format!("unknown edge label {l}")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalDoc {
    pub lo: String,
    pub hi: String,
    pub shift: String,
    pub word: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub transversal: String,
    pub depth: usize,
    pub cut_points: Vec<String>,
    pub intervals: Vec<IntervalDoc>,
    pub max_length: String,
    pub max_length_decimal: f64,
}

impl PartitionDoc {
    pub fn new(s: &TranslationSurface, tr: &Transversal, p: &ReturnPartition) -> Self {
        let m = p.max_len();
        PartitionDoc {
            transversal: s.edge(tr.edge()).label.clone(),
            depth: p.depth,
            cut_points: p.cuts.iter().map(|c| c.lambda.to_string()).collect(),
            intervals: p
                .intervals
                .iter()
                .map(|iv| IntervalDoc {
                    lo: iv.lo.to_string(),
                    hi: iv.hi.to_string(),
                    shift: iv.shift.to_string(),
                    word: labels(s, &iv.word),
                })
                .collect(),
            max_length: m.to_string(),
            max_length_decimal: dec(&m),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| json_err("partition", e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopDoc {
    pub transversal: String,
    pub k: u32,
    pub side: String,
    pub p: String,
    pub q: String,
    pub r: String,
    pub a: String,
    pub n: usize,
    pub m: usize,
    pub tn_q: String,
    pub tm_r: String,
    pub level_set: [String; 2],
    pub interval_near: [String; 2],
    pub interval_far: [String; 2],
    pub word_near: Vec<String>,
    pub word_far: Vec<String>,
    pub word: Vec<String>,
    pub head_len: usize,
    pub measure: String,
    pub measure_decimal: f64,
    pub constant: String,
    pub bound: String,
    pub aligned_inadmissible: bool,
    pub inadmissible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingDoc>,
}


fn pair(x: &(Quad, Quad)) -> [String; 2] {
    [x.0.to_string(), x.1.to_string()]
}

fn unpair(x: &[String; 2]) -> Result<(Quad, Quad)> {
    Ok((q(&x[0])?, q(&x[1])?))
}

impl LoopDoc {
    pub fn new(s: &TranslationSurface, tr: &Transversal, c: &LoopCertificate) -> Self {
        LoopDoc {
            transversal: s.edge(tr.edge()).label.clone(),
            k: c.k,
            side: match c.side {
                Side::Below => "below",
                Side::Above => "above",
            }
            .into(),
            p: c.p.to_string(),
            q: c.q.to_string(),
            r: c.r.to_string(),
            a: c.a.to_string(),
            n: c.n,
            m: c.m,
            tn_q: c.tn_q.to_string(),
            tm_r: c.tm_r.to_string(),
            level_set: pair(&c.level_set),
            interval_near: pair(&c.i_near),
            interval_far: pair(&c.i_far),
            word_near: labels(s, &c.word_near),
            word_far: labels(s, &c.word_far),
            word: labels(s, &c.word),
            head_len: c.head_len,
            measure: c.measure.to_string(),
            measure_decimal: dec(&c.measure),
            constant: c.constant.to_string(),
            bound: c.bound().to_string(),
            aligned_inadmissible: c.aligned_inadmissible,
            inadmissible: c.inadmissible,
            sampling: None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| json_err("loop certificate", e))
    }

    pub fn to_certificate(&self, s: &TranslationSurface) -> Result<(Transversal, LoopCertificate)> {
        let tr = Transversal::new(s, &self.transversal)?;
        let side = match self.side.as_str() {
            "below" => Side::Below,
            "above" => Side::Above,
            x => return Err(Error::Parse(format!("unknown side {x:?}"))),
        };
        let c = LoopCertificate {
            k: self.k,
            side,
            p: q(&self.p)?,
            q: q(&self.q)?,
            r: q(&self.r)?,
            a: q(&self.a)?,
            n: self.n,
            m: self.m,
            tn_q: q(&self.tn_q)?,
            tm_r: q(&self.tm_r)?,
            level_set: unpair(&self.level_set)?,
            i_near: unpair(&self.interval_near)?,
            i_far: unpair(&self.interval_far)?,
            word_near: edges(s, &self.word_near)?,
            word_far: edges(s, &self.word_far)?,
            word: edges(s, &self.word)?,
            head_len: self.head_len,
            measure: q(&self.measure)?,
            constant: q(&self.constant)?,
            aligned_inadmissible: self.aligned_inadmissible,
            inadmissible: self.inadmissible,
        };
        if c.head_len > c.word.len() {
            return Err(Error::Parse("head length exceeds the word".into()));
        }
        Ok((tr, c))
    }

    /// Re-checks a parsed certificate against the surface: the orbit data
    /// reproduce the word, the measure and bound hold, the level-set
    /// argument holds and no leaf reads the aligned word.
    pub fn verify(&self, s: &TranslationSurface) -> Result<bool> {
        let (tr, c) = self.to_certificate(s)?;
        let map = crate::translation_surface::ReturnMap::new(s, &tr)?;
        let (tn, head) = map.orbit(&c.q, c.n)?;
        let (tm, tail) = map.orbit(&c.r, c.m)?;
        let mut word = head.clone();
        word.extend(tail);
        let h = tr.height(s);
        let measure = &h * &(&(&c.r - &tn).abs() + &(&tm - &c.q).abs());
        let back = s.edge(tr.edge()).partner.expect("transversal is paired");
        let mut aligned = vec![back];
        aligned.extend_from_slice(&c.word);
        Ok(tn == c.tn_q
            && tm == c.tm_r
            && word == c.word
            && head.len() == c.head_len
            && measure == c.measure
            && c.measure < c.bound()
            && check_level_set_argument(&c)
            && realizing_set(s, &aligned).is_empty())
    }
}
