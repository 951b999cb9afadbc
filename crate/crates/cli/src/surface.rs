use std::fs;

use clap::{Args, Subcommand};
use laminath::serial::{LoopDoc, PartitionDoc, SamplingDoc};
use laminath::translation_surface::{
    genus_two, inadmissible_loop, is_cylinder_decomposition, return_partition, saddle_connections, sheared_torus,
    square_annulus, synthesize_exotic, EdgeId, ReturnMap, SurfaceDocument, TranslationSurface, Transversal,
    DEFAULT_RETURN_BUDGET,
};
use laminath::{Error, Quad, Result};
use rand::Rng;
use serde_json::{json, Value};

use crate::output::{lines, to_value, Report};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct TsArgs {
    /// Surface JSON file, or one of the built-in surfaces torus, genus2,
    /// annulus.
    #[arg(long, default_value = "torus")]
    surface: String,
    /// Shear of the built-in surfaces. Defaults to the fractional part of
    /// the square root generating the field.
    #[arg(long)]
    gamma: Option<String>,
    /// Label of the transversal edge.
    #[arg(long)]
    transversal: Option<String>,
    /// Largest number of returns tried by loop searches.
    #[arg(long, default_value_t = DEFAULT_RETURN_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    action: TsAction,
}

#[derive(Subcommand, Debug)]
enum TsAction {
    /// Topology and saddle connections of the surface.
    Validate,
    /// Interval exchange of the first return to the transversal.
    ReturnMap {
        /// Random points to push through the map.
        #[arg(long, default_value_t = 0)]
        points: usize,
    },
    /// Level-set partition of the n-step return word.
    Partition {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Inadmissible closed loop of measure below c/2^k.
    Loop {
        #[arg(long)]
        k: u32,
        /// Random leaves searched for the loop word (0 disables).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        sample_returns: usize,
    },
    /// Re-verifies a loop certificate.
    Check {
        #[arg(long)]
        cert: String,
    },
    /// Concatenated loops at increasing levels with a measure ledger.
    Exotic {
        #[arg(long, default_value = "1,2,3")]
        levels: String,
        /// Keep at most this many pieces.
        #[arg(long)]
        prefix: Option<usize>,
    },
}

fn load(ctx: &Ctx, a: &TsArgs) -> Result<(TranslationSurface, Transversal)> {
    let gamma = || -> Result<Quad> {
        match &a.gamma {
            Some(g) => g.parse(),
            None => match ctx.field.d {
                Some(d) => Ok(Quad::sqrt_of(d).fract()),
                None => Err(Error::InvalidArgument("--gamma is required over the rationals".into())),
            },
        }
    };
    let (s, label) = match a.surface.as_str() {
        "torus" => (sheared_torus(&gamma()?)?, Some("E1".to_string())),
        "genus2" => (genus_two(&gamma()?)?, Some("E4".to_string())),
        "annulus" => (square_annulus()?, Some("r".to_string())),
        file => {
            let src =
                fs::read_to_string(file).map_err(|e| Error::InvalidArgument(format!("cannot read {file}: {e}")))?;
            let doc = SurfaceDocument::from_json(&src)?;
            (doc.build()?, doc.transversal.clone())
        }
    };
    let tr = match a.transversal.as_ref().or(label.as_ref()) {
        Some(l) => Transversal::new(&s, l)?,
        None => Transversal::default_for(&s)?,
    };
    Ok((s, tr))
}

fn labels(s: &TranslationSurface, w: &[EdgeId]) -> Vec<String> {
    w.iter().map(|&e| s.edge(e).label.clone()).collect()
}

fn dec(x: &Quad) -> f64 {
    let v = x.to_f64();
    format!("{v:.12e}").parse().unwrap_or(v)
}

fn random_lambda(rng: &mut impl Rng) -> Quad {
    Quad::frac(rng.gen_range(1..(1i64 << 40)), 1i64 << 40)
}

pub fn run(ctx: &Ctx, a: &TsArgs) -> Result<Report> {
    let (s, tr) = load(ctx, a)?;
    let tr_label = s.edge(tr.edge()).label.clone();
    match &a.action {
        TsAction::Validate => {
            let cyl = is_cylinder_decomposition(&s, 256);
            let conns = saddle_connections(&s, 256);
            let j = json!({
                "field": s.field.to_string(),
                "polygons": s.polygons().len(),
                "edges": s.edges().len(),
                "vertices": s.vertex_count(),
                "euler_characteristic": s.euler_characteristic(),
                "genus": s.genus(),
                "boundary": s.has_boundary(),
                "transversal": tr_label,
                "cylinder_decomposition": cyl,
                "saddle_connections": conns.iter().map(|c| json!({
                    "from": [c.from.x.to_string(), c.from.y.to_string()],
                    "to": [c.to.0, c.to.1],
                    "word": labels(&s, &c.word),
                })).collect::<Vec<_>>(),
                "document": to_value(&SurfaceDocument::from_surface(&s, Some(&tr_label))),
            });
            let text = lines(&[
                ("field", s.field.to_string()),
                ("vertices", s.vertex_count().to_string()),
                ("euler_characteristic", s.euler_characteristic().to_string()),
                ("genus", s.genus().map_or("-".into(), |g| g.to_string())),
                ("boundary", s.has_boundary().to_string()),
                ("transversal", tr_label),
                ("cylinder_decomposition", cyl.to_string()),
                ("saddle_connections", conns.len().to_string()),
            ]);
            Ok(Report::new(j, text))
        }
        TsAction::ReturnMap { points } => {
            let map = ReturnMap::new(&s, &tr)?;
            let mut text = format!("transversal: {tr_label}\n");
            let ivs: Vec<Value> = map
                .intervals()
                .iter()
                .map(|iv| {
                    text.push_str(&format!(
                        "({}, {}) +{} {}\n",
                        iv.lo,
                        iv.hi,
                        iv.shift,
                        labels(&s, &iv.word).join(" ")
                    ));
                    json!({
                        "lo": iv.lo.to_string(),
                        "hi": iv.hi.to_string(),
                        "shift": iv.shift.to_string(),
                        "word": labels(&s, &iv.word),
                    })
                })
                .collect();
            let mut rng = ctx.rng();
            let mut pts = Vec::new();
            for _ in 0..*points {
                let l = random_lambda(&mut rng);
                let img = map.apply(&l).map(|(m, _)| m.to_string());
                text.push_str(&format!("T({l}) = {}\n", img.as_deref().unwrap_or("-")));
                pts.push(json!({ "lambda": l.to_string(), "image": img }));
            }
            let mut j = json!({ "transversal": tr_label, "intervals": ivs });
            if *points > 0 {
                j["seed"] = json!(ctx.seed);
                j["points"] = json!(pts);
            }
            Ok(Report::new(j, text))
        }
        TsAction::Partition { n } => {
            let p = return_partition(&s, &tr, *n)?;
            let doc = PartitionDoc::new(&s, &tr, &p);
            let text = lines(&[
                ("transversal", tr_label),
                ("depth", n.to_string()),
                ("intervals", doc.intervals.len().to_string()),
                ("max_length", doc.max_length.clone()),
            ]);
            Ok(Report::new(to_value(&doc), text))
        }
        TsAction::Loop { k, samples, sample_returns } => {
            let c = inadmissible_loop(&s, &tr, *k, a.budget)?;
            let mut doc = LoopDoc::new(&s, &tr, &c);
            let mut head = vec![
                ("transversal", tr_label),
                ("k", k.to_string()),
                ("side", doc.side.clone()),
                ("n", doc.n.to_string()),
                ("m", doc.m.to_string()),
                ("word_length", doc.word.len().to_string()),
                ("measure", doc.measure.clone()),
                ("bound", doc.bound.clone()),
                ("inadmissible", c.aligned_inadmissible.to_string()),
            ];
            if *samples > 0 {
                let seen = sample_leaves(ctx, &s, &tr, &c.word, *samples, *sample_returns)?;
                head.push(("sampled", seen.to_string()));
                doc.sampling = Some(SamplingDoc {
                    seed: ctx.seed,
                    starts: *samples,
                    length: *sample_returns,
                    seen,
                });
            }
            Ok(Report::new(to_value(&doc), lines(&head)))
        }
        TsAction::Check { cert } => {
            let src =
                fs::read_to_string(cert).map_err(|e| Error::InvalidArgument(format!("cannot read {cert}: {e}")))?;
            let doc = LoopDoc::parse(&src)?;
            let ok = doc.verify(&s)?;
            if !ok {
                return Err(Error::InvalidArgument(format!("certificate {cert} does not verify")));
            }
            Ok(Report::new(
                json!({ "certificate": cert, "verified": ok }),
                lines(&[("certificate", cert.clone()), ("verified", ok.to_string())]),
            ))
        }
        TsAction::Exotic { levels, prefix } => {
            let mut ls: Vec<u32> = levels
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad level {t:?}"))))
                .collect::<Result<_>>()?;
            if let Some(p) = prefix {
                ls.truncate(*p);
            }
            let e = synthesize_exotic(&s, &tr, &ls, a.budget)?;
            let mut rows = Vec::new();
            let ledger: Vec<Value> = e
                .pieces
                .iter()
                .map(|p| {
                    rows.push(vec![
                        p.certificate.k.to_string(),
                        p.certificate.measure.to_string(),
                        p.connector.to_string(),
                        p.cumulative.to_string(),
                    ]);
                    json!({
                        "k": p.certificate.k,
                        "measure": p.certificate.measure.to_string(),
                        "connector": p.connector.to_string(),
                        "cumulative": p.cumulative.to_string(),
                        "word_length": p.certificate.word.len(),
                    })
                })
                .collect();
            let m = e.measure();
            let b = e.ledger_bound();
            let j = json!({
                "transversal": tr_label,
                "levels": e.levels(),
                "skipped": e.skipped,
                "word": labels(&s, &e.word()),
                "ledger": ledger,
                "measure": m.to_string(),
                "measure_decimal": dec(&m),
                "constant": e.constant.to_string(),
                "connector_constant": e.connector_constant.to_string(),
                "ledger_bound": b.to_string(),
                "within_bound": m <= b,
            });
            let text = lines(&[
                ("transversal", tr_label),
                ("levels", format!("{:?}", e.levels())),
                ("skipped", format!("{:?}", e.skipped)),
                ("word_length", e.word().len().to_string()),
                ("measure", m.to_string()),
                ("ledger_bound", b.to_string()),
            ]);
            Ok(Report::new(j, text).with_csv(&["k", "measure", "connector", "cumulative"], rows))
        }
    }
}

/// Whether `word` occurs among the crossings of seeded random leaves.
fn sample_leaves(
    ctx: &Ctx,
    s: &TranslationSurface,
    tr: &Transversal,
    word: &[EdgeId],
    starts: usize,
    returns: usize,
) -> Result<bool> {
    let map = ReturnMap::new(s, tr)?;
    let mut rng = ctx.rng();
    let mut found = 0;
    while found < starts {
        let l = random_lambda(&mut rng);
        let seq = match map.orbit(&l, returns) {
            Ok((_, w)) => w,
            // a leaf through a vertex is not a sample
            Err(Error::VertexHit { .. }) => continue,
            Err(e) => return Err(e),
        };
        found += 1;
        if seq.windows(word.len()).any(|w| w == word) {
            return Ok(true);
        }
    }
    Ok(false)
}
