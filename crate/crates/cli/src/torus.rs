use std::fs;

use clap::{Args, ValueEnum};
use laminath::admissibility::{factor_count, is_admissible, is_admissible_blocks, occurs_in_samples};
use laminath::flat_torus::{
    cutting_sequence, linear_growth_probe, path_word, prescribed_growth_path, transverse_measure, Direction,
    TabulatedFunction,
};
use laminath::serial::{AdmissibilityDoc, PathDoc, SamplingDoc, WordDoc};
use laminath::torus_words::{
    cusp_exotic_word, exotic_word, inadmissible_segment, inadmissible_word, simple_word, BlockWord, LetterWord,
};
use laminath::{ContinuedFraction, Error, Quad, Result};
use num_traits::ToPrimitive;
use rand::Rng;
use serde_json::{json, Value};

use crate::output::{lines, to_value, Report};
use crate::Ctx;

fn dec(x: &Quad) -> f64 {
    let v = x.to_f64();
    format!("{v:.12e}").parse().unwrap_or(v)
}

fn exact(x: &Quad) -> Value {
    json!({ "exact": x.to_string(), "decimal": dec(x) })
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} {t:?}")))
        })
        .collect()
}

#[derive(Args, Debug)]
pub struct Theta {
    /// Slope: cf:[1;2]p, cf:[1;2,2], sqrt2, golden, e, p/q or a field
    /// element. Defaults to the square root generating the field.
    #[arg(long)]
    pub theta: Option<String>,
}

impl Theta {
    pub fn get(&self, ctx: &Ctx) -> Result<ContinuedFraction> {
        match &self.theta {
            Some(t) => ContinuedFraction::parse(t),
            None => match ctx.field.d {
                Some(d) => ContinuedFraction::parse(&format!("sqrt{d}")),
                None => Err(Error::InvalidArgument("--theta is required over the rationals".into())),
            },
        }
    }
}

fn closed(theta: &ContinuedFraction) -> Result<Quad> {
    theta.exact_value().cloned()
}

#[derive(Args, Debug)]
pub struct ConvergentsArgs {
    #[command(flatten)]
    theta: Theta,
    /// Largest index.
    #[arg(long, default_value_t = 10)]
    k: usize,
}

pub fn convergents(ctx: &Ctx, a: &ConvergentsArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let cs = theta.convergents(a.k)?;
    let mut rows = Vec::new();
    let mut text = format!("theta: {theta}\n");
    for c in &cs {
        let err = match theta.value() {
            Some(_) => Some(theta.approximation_error(c.k)?),
            None => None,
        };
        // the last convergent of a rational slope has no successor
        let holds = theta.satisfies_approximation_bound(c.k).ok();
        text.push_str(&format!("{} {}/{}", c.k, c.p, c.q));
        if let Some(e) = &err {
            text.push_str(&format!(" err={e}"));
        }
        if let Some(h) = holds {
            text.push_str(&format!(" bound={h}"));
        }
        text.push('\n');
        rows.push(json!({
            "k": c.k,
            "p": c.p.to_string(),
            "q": c.q.to_string(),
            "error": err.as_ref().map(exact),
            "bound_holds": holds,
        }));
    }
    Ok(Report::new(json!({ "theta": theta.to_string(), "convergents": rows }), text))
}

#[derive(Args, Debug)]
pub struct SimpleWordArgs {
    /// Rational slope p/q with p > q ≥ 1.
    #[arg(long)]
    slope: String,
    /// Starting index l1 in 1..=q.
    #[arg(long, default_value_t = 1)]
    start: u64,
}

fn parse_slope(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::Parse(format!("slope must be p/q, got {s:?}"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
}

fn word_report(mut head: Vec<(&str, String)>, w: &BlockWord, measure: Option<&Quad>, extra: Value) -> Report {
    let doc = WordDoc::from_blocks(w, measure);
    head.push(("blocks", w.to_string()));
    head.push(("letters", w.to_letters().to_string()));
    if let Some(m) = measure {
        head.push(("measure", m.to_string()));
    }
    let mut j = json!({ "word": to_value(&doc) });
    if let (Value::Object(o), Value::Object(e)) = (&mut j, extra) {
        o.extend(e);
    }
    Report::new(j, lines(&head))
}

pub fn simple(a: &SimpleWordArgs) -> Result<Report> {
    let (p, q) = parse_slope(&a.slope)?;
    let w = simple_word(p, q, a.start)?;
    Ok(word_report(
        vec![("slope", format!("{p}/{q}")), ("start", a.start.to_string())],
        &w,
        None,
        json!({ "slope": format!("{p}/{q}"), "start": a.start }),
    ))
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[command(flatten)]
    theta: Theta,
    /// Convergent index, at least 2.
    #[arg(long)]
    k: usize,
}

pub fn inadmissible(ctx: &Ctx, a: &IndexArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let w = inadmissible_word(&theta, a.k)?;
    let c = theta.convergent(a.k)?;
    let cert = is_admissible_blocks(&w, &theta, a.k + 24)?;
    Ok(word_report(
        vec![
            ("theta", theta.to_string()),
            ("k", a.k.to_string()),
            ("convergent", c.to_string()),
            ("admissible", cert.is_admissible().to_string()),
        ],
        &w,
        None,
        json!({ "theta": theta.to_string(), "k": a.k, "convergent": c.to_string(), "admissible": cert.is_admissible() }),
    ))
}

pub fn segment(ctx: &Ctx, a: &IndexArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let seg = inadmissible_segment(&theta, a.k)?;
    let bound = seg.measure_bound();
    let mut head = vec![
        ("theta", theta.to_string()),
        ("k", a.k.to_string()),
        ("convergent", format!("{}/{}", seg.p, seg.q)),
        ("head_blocks", seg.head_blocks.to_string()),
        ("letter_count", seg.letter_count().to_string()),
        ("length_bound", (2 * (seg.p + seg.q)).to_string()),
    ];
    if let Some(b) = &bound {
        head.push(("measure_bound", b.to_string()));
    }
    let extra = json!({
        "theta": theta.to_string(),
        "k": a.k,
        "convergent": format!("{}/{}", seg.p, seg.q),
        "head_blocks": seg.head_blocks,
        "letter_count": seg.letter_count(),
        "length_bound": 2 * (seg.p + seg.q),
        "measure_bound": bound.as_ref().map(Quad::to_string),
        "path": to_value(&PathDoc::from_path(&seg.representative)),
    });
    Ok(word_report(head, &seg.word, seg.measure.as_ref(), extra))
}

#[derive(Args, Debug)]
pub struct ExoticArgs {
    #[command(flatten)]
    theta: Theta,
    /// Increasing convergent indices of one parity.
    #[arg(long, default_value = "2,4,6")]
    indices: String,
    /// Truncate the emitted word to this many blocks.
    #[arg(long)]
    prefix_blocks: Option<usize>,
}

pub fn exotic(ctx: &Ctx, a: &ExoticArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let idx: Vec<usize> = list(&a.indices, "index")?;
    let mut ew = exotic_word(&theta, &idx)?;
    let pre = ew.prefix(idx.len())?;
    let skipped = ew.skipped().to_vec();
    let full = pre
        .blocks()
        .ok_or_else(|| Error::InvalidArgument("no indices given".into()))?;
    let cut = a.prefix_blocks.unwrap_or(full.len()).min(full.len());
    let w = BlockWord::new(full.base(), full.blocks()[..cut].to_vec(), full.orientation())?;
    let ledger: Vec<Value> = pre
        .pieces
        .iter()
        .map(|p| {
            json!({
                "index": p.index,
                "convergent": format!("{}/{}", p.segment.p, p.segment.q),
                "blocks": p.segment.word.len(),
                "segment_measure": p.segment_measure().to_string(),
                "connector": p.connector.to_string(),
                "cumulative": p.cumulative.to_string(),
            })
        })
        .collect();
    let m = pre.measure();
    let csv_rows = pre
        .pieces
        .iter()
        .map(|p| {
            vec![
                p.index.to_string(),
                p.segment.p.to_string(),
                p.segment.q.to_string(),
                p.segment_measure().to_string(),
                p.connector.to_string(),
                p.cumulative.to_string(),
            ]
        })
        .collect();
    let extra = json!({
        "theta": theta.to_string(),
        "indices": pre.kept_indices(),
        "skipped": skipped,
        "total_blocks": full.len(),
        "prefix_blocks": cut,
        "ledger": ledger,
        "measure": exact(&m),
        "reciprocal_sum": pre.reciprocal_sum().to_string(),
    });
    let head = vec![
        ("theta", theta.to_string()),
        ("indices", format!("{:?}", pre.kept_indices())),
        ("skipped", format!("{skipped:?}")),
        ("prefix_blocks", format!("{cut} of {}", full.len())),
    ];
    Ok(word_report(head, &w, Some(&m), extra).with_csv(
        &["index", "p", "q", "segment_measure", "connector", "cumulative"],
        csv_rows,
    ))
}

#[derive(Args, Debug)]
pub struct CuspArgs {
    #[command(flatten)]
    theta: Theta,
    /// Number of cusp loops after each convergent word.
    #[arg(long, default_value = "1,1,1")]
    loops: String,
}

pub fn cusp(ctx: &Ctx, a: &CuspArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let counts: Vec<u32> = list(&a.loops, "loop count")?;
    let n = counts.len();
    let mut cw = cusp_exotic_word(&theta, counts.into_iter())?;
    let pre = cw.prefix(n)?;
    let letters = pre.letters();
    let m = pre.measure();
    let rows: Vec<Vec<String>> = pre
        .pieces
        .iter()
        .map(|p| {
            vec![
                p.k.to_string(),
                p.p.to_string(),
                p.q.to_string(),
                p.loops.to_string(),
                p.lattice_measure.to_string(),
                p.connector.to_string(),
                p.lattice_sum.to_string(),
            ]
        })
        .collect();
    let ledger: Vec<Value> = pre
        .pieces
        .iter()
        .map(|p| {
            json!({
                "k": p.k,
                "convergent": format!("{}/{}", p.p, p.q),
                "loops": p.loops,
                "lattice_measure": p.lattice_measure.to_string(),
                "connector": p.connector.to_string(),
                "lattice_sum": p.lattice_sum.to_string(),
            })
        })
        .collect();
    let j = json!({
        "word": to_value(&WordDoc::from_letters(&letters, Some(&m))),
        "theta": theta.to_string(),
        "ledger": ledger,
        "lattice_sum": pre.lattice_sum().to_string(),
    });
    let text = lines(&[
        ("theta", theta.to_string()),
        ("pieces", pre.pieces.len().to_string()),
        ("letters", letters.to_string()),
        ("lattice_sum", pre.lattice_sum().to_string()),
        ("measure", m.to_string()),
    ]);
    Ok(Report::new(j, text).with_csv(
        &["k", "p", "q", "loops", "lattice_measure", "connector", "lattice_sum"],
        rows,
    ))
}

#[derive(Args, Debug)]
pub struct CutArgs {
    #[command(flatten)]
    theta: Theta,
    /// Height where the leaf crosses x = 0.
    #[arg(long, default_value = "1/4")]
    start: String,
    #[arg(long, default_value_t = 64)]
    letters: usize,
}

pub fn cut(ctx: &Ctx, a: &CutArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let s: Quad = a.start.parse()?;
    let w = cutting_sequence(&s, &theta, a.letters)?;
    let j = json!({
        "word": to_value(&WordDoc::from_letters(&w, None)),
        "theta": theta.to_string(),
        "start": s.to_string(),
    });
    let text = lines(&[("theta", theta.to_string()), ("start", s.to_string()), ("letters", w.to_string())]);
    Ok(Report::new(j, text))
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(flatten)]
    theta: Theta,
    /// Path JSON file.
    #[arg(long)]
    path: String,
}

pub fn measure(ctx: &Ctx, a: &MeasureArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let t = closed(&theta)?;
    let src = fs::read_to_string(&a.path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", a.path)))?;
    let path = PathDoc::parse(&src)?;
    let m = transverse_measure(&path, &t);
    let word = path_word(&path)?;
    let j = json!({
        "theta": theta.to_string(),
        "segments": path.segment_count(),
        "measure": exact(&m.value),
        "perpendicular": m.perpendicular(&t),
        "word": word.to_string(),
    });
    let text = lines(&[
        ("theta", theta.to_string()),
        ("segments", path.segment_count().to_string()),
        ("measure", m.value.to_string()),
        ("word", word.to_string()),
    ]);
    Ok(Report::new(j, text))
}

#[derive(Args, Debug)]
pub struct AdmissibleArgs {
    #[command(flatten)]
    theta: Theta,
    /// Letters over abAB, or a block word such as (1,2,2)@ba.
    #[arg(long)]
    word: String,
    /// Largest convergent index consulted.
    #[arg(long, default_value_t = 40)]
    depth: usize,
    /// Random start heights for a sampled cross-check (0 disables).
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 100_000)]
    sample_letters: usize,
}

pub fn admissible(ctx: &Ctx, a: &AdmissibleArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let (word, cert) = if a.word.trim_start().starts_with('(') {
        let b: BlockWord = a.word.parse()?;
        let c = is_admissible_blocks(&b, &theta, a.depth)?;
        (laminath::admissibility::block_aligned(&b), c)
    } else {
        let w: LetterWord = a.word.parse()?;
        let c = is_admissible(&w, &theta, a.depth)?;
        (w, c)
    };
    let mut doc = AdmissibilityDoc::new(&theta, &word, &cert);
    let mut head = vec![
        ("theta", theta.to_string()),
        ("word", word.to_string()),
        ("verdict", doc.verdict.clone()),
    ];
    if let Some(w) = &doc.witness {
        head.push(("witness", format!("start {} offset {}", w.start, w.offset)));
    }
    if a.samples > 0 {
        let mut rng = ctx.rng();
        let starts: Vec<Quad> = (0..a.samples)
            .map(|_| Quad::frac(rng.gen_range(1..(1i64 << 40)), 1i64 << 40))
            .collect();
        let seen = occurs_in_samples(&word, &theta, &starts, a.sample_letters)?;
        head.push(("sampled", seen.to_string()));
        head.push(("consistent", (seen || cert.is_admissible()).to_string()));
        doc.sampling = Some(SamplingDoc {
            seed: ctx.seed,
            starts: a.samples,
            length: a.sample_letters,
            seen,
        });
    }
    let j = to_value(&doc);
    Ok(Report::new(j, lines(&head)))
}

#[derive(Args, Debug)]
pub struct FactorsArgs {
    #[command(flatten)]
    theta: Theta,
    /// Largest factor length.
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 60)]
    depth: usize,
}

pub fn factors(ctx: &Ctx, a: &FactorsArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let mut rows = Vec::new();
    let mut text = format!("theta: {theta}\n");
    let mut js = Vec::new();
    for m in 1..=a.m {
        let n = factor_count(&theta, m, a.depth)?;
        text.push_str(&format!("{m} {n}\n"));
        rows.push(vec![m.to_string(), n.to_string()]);
        js.push(json!({ "m": m, "count": n }));
    }
    Ok(Report::new(json!({ "theta": theta.to_string(), "factors": js }), text).with_csv(&["m", "count"], rows))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GrowthMode {
    Linear,
    Prescribed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GrowthFn {
    Sqrt,
    Log1p,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    theta: Theta,
    #[arg(long, value_enum)]
    mode: GrowthMode,
    /// Probe slope for linear mode, or "vertical".
    #[arg(long, default_value = "vertical")]
    direction: String,
    #[arg(long, default_value_t = 100)]
    t_max: u64,
    /// Linear mode: number of sample steps.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Prescribed mode: target function.
    #[arg(long, value_enum, default_value = "sqrt")]
    function: GrowthFn,
    /// Prescribed mode: number of jumps. Defaults to every level the
    /// function reaches on [0, t-max].
    #[arg(long)]
    segments: Option<usize>,
}

pub fn growth(ctx: &Ctx, a: &GrowthArgs) -> Result<Report> {
    let theta = a.theta.get(ctx)?;
    let t = closed(&theta)?;
    match a.mode {
        GrowthMode::Linear => {
            let dir = if a.direction == "vertical" {
                Direction::Vertical
            } else {
                Direction::Slope(a.direction.parse()?)
            };
            let table = linear_growth_probe(&t, &dir, &Quad::from_int(a.t_max as i64), a.samples)?;
            let linear = table.is_linear();
            let rows: Vec<Vec<String>> = table.rows.iter().map(|(x, i)| vec![x.to_string(), i.to_string()]).collect();
            let mut text = format!("theta: {theta}\nlinear: {linear}\n");
            for (x, i) in &table.rows {
                text.push_str(&format!("{x} {i}\n"));
            }
            let j = json!({
                "theta": theta.to_string(),
                "mode": "linear",
                "direction": a.direction,
                "linear": linear,
                "rows": table.rows.iter().map(|(x, i)| json!({ "t": x.to_string(), "I": exact(i) })).collect::<Vec<_>>(),
            });
            Ok(Report::new(j, text).with_csv(&["t", "I"], rows))
        }
        GrowthMode::Prescribed => {
            let f = match a.function {
                GrowthFn::Sqrt => TabulatedFunction::sqrt(a.t_max)?,
                GrowthFn::Log1p => TabulatedFunction::log1p(a.t_max)?,
            };
            let levels = f.max_value().floor().to_usize().unwrap_or(usize::MAX);
            let g = prescribed_growth_path(&t, &f, a.segments.unwrap_or(levels))?;
            let err = g.max_joint_error();
            let mut csv_rows = Vec::new();
            let mut text = format!("theta: {theta}\nmax_joint_error: {err}\n");
            for r in &g.rows {
                csv_rows.push(vec![r.t.to_string(), r.measure_before_jump.to_string()]);
                csv_rows.push(vec![r.t.to_string(), r.measure_after_jump.to_string()]);
                text.push_str(&format!(
                    "{} t={} I={}..{} f={}\n",
                    r.n, r.t, r.measure_before_jump, r.measure_after_jump, r.f_value
                ));
            }
            let j = json!({
                "theta": theta.to_string(),
                "mode": "prescribed",
                "function": format!("{:?}", a.function).to_lowercase(),
                "max_joint_error": exact(&err),
                "rows": g.rows.iter().map(|r| json!({
                    "n": r.n,
                    "t": exact(&r.t),
                    "I_before": r.measure_before_jump.to_string(),
                    "I_after": r.measure_after_jump.to_string(),
                    "f": r.f_value.to_string(),
                    "f_reference": r.f_reference,
                })).collect::<Vec<_>>(),
                "path": to_value(&PathDoc::from_path(&g.path)),
            });
            Ok(Report::new(j, text).with_csv(&["t", "I"], csv_rows))
        }
    }
}
