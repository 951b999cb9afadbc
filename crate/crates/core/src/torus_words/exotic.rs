//! Infinite words of finite transverse measure assembled from closed
//! segments, produced lazily.

use super::letters::{BlockWord, Letter, LetterWord, Orientation};
use super::simple::{block_path, inadmissible_segment, SegmentCertificate, SimpleSlope};
use crate::cf_arith::ContinuedFraction;
use crate::error::{Error, Result};
use crate::field::Quad;
use crate::flat_torus::{transverse_measure, FlatPath, FlatPoint, Marker};

/// One emitted segment together with its share of the measure.
#[derive(Clone, Debug)]
pub struct ExoticPiece {
    pub index: usize,
    pub segment: SegmentCertificate,
    /// Vertical hop from the previous segment's start height.
    pub connector: Quad,
    pub cumulative: Quad,
}

impl ExoticPiece {
    pub fn segment_measure(&self) -> &Quad {
        self.segment.measure.as_ref().expect("closed-form slope")
    }
}

/// Lazy concatenation `w_{i₁} w_{i₂} …` of inadmissible segments.
///
/// Indices whose segment measure is not below a quarter of the last kept
/// one are skipped, so every kept measure exceeds three times the sum of
/// all later ones.
pub struct ExoticWord {
    theta: ContinuedFraction,
    indices: Box<dyn Iterator<Item = usize>>,
    parity: Option<usize>,
    last_index: Option<usize>,
    last_kept: Option<(Quad, Quad)>,
    cumulative: Quad,
    skipped: Vec<usize>,
}

/// Builds the lazy word after checking a finite index list up front.
pub fn exotic_word(theta: &ContinuedFraction, indices: &[usize]) -> Result<ExoticWord> {
    check_indices(indices)?;
    ExoticWord::new(theta, indices.to_vec().into_iter())
}

fn check_indices(indices: &[usize]) -> Result<()> {
    if let Some(&i) = indices.iter().find(|&&i| i < 2) {
        return Err(Error::IndexOutOfRange(format!("index {i} below 2")));
    }
    if let Some(w) = indices.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "indices must increase: {} then {}",
            w[0], w[1]
        )));
    }
    if let Some(w) = indices.windows(2).find(|w| (w[1] - w[0]) % 2 != 0) {
        return Err(Error::ParityMismatch(format!("{} and {}", w[0], w[1])));
    }
    Ok(())
}

impl ExoticWord {
    pub fn new(theta: &ContinuedFraction, indices: impl Iterator<Item = usize> + 'static) -> Result<Self> {
        if theta.value().is_none() {
            return Err(Error::PrecisionExhausted(
                "exact segment measures need a closed-form slope".into(),
            ));
        }
        Ok(ExoticWord {
            theta: theta.clone(),
            indices: Box::new(indices),
            parity: None,
            last_index: None,
            last_kept: None,
            cumulative: Quad::zero(),
            skipped: Vec::new(),
        })
    }

    /// Indices dropped so far by the thinning rule.
    pub fn skipped(&self) -> &[usize] {
        &self.skipped
    }

    fn next_piece(&mut self) -> Result<Option<ExoticPiece>> {
        loop {
            let Some(i) = self.indices.next() else {
                return Ok(None);
            };
            if i < 2 {
                return Err(Error::IndexOutOfRange(format!("index {i} below 2")));
            }
            if let Some(last) = self.last_index {
                if i <= last {
                    return Err(Error::InvalidArgument(format!("indices must increase: {last} then {i}")));
                }
            }
            match self.parity {
                Some(p) if p != i % 2 => {
                    return Err(Error::ParityMismatch(format!("index {i} after parity {p}")))
                }
                _ => self.parity = Some(i % 2),
            }
            self.last_index = Some(i);
            let seg = inadmissible_segment(&self.theta, i)?;
            let m = seg.measure.clone().expect("closed-form slope");
            let connector = match &self.last_kept {
                Some((prev_m, prev_h)) => {
                    if &m * &Quad::from_int(4) >= *prev_m {
                        self.skipped.push(i);
                        continue;
                    }
                    (seg.start_height() - prev_h).abs()
                }
                None => Quad::zero(),
            };
            self.cumulative = &(&self.cumulative + &connector) + &m;
            self.last_kept = Some((m, seg.start_height().clone()));
            return Ok(Some(ExoticPiece {
                index: i,
                segment: seg,
                connector,
                cumulative: self.cumulative.clone(),
            }));
        }
    }

    /// Collects the first `pieces` kept segments (fewer if the index
    /// source runs out).
    pub fn prefix(&mut self, pieces: usize) -> Result<ExoticPrefix> {
        let mut out = Vec::new();
        while out.len() < pieces {
            match self.next_piece()? {
                Some(p) => out.push(p),
                None => break,
            }
        }
        Ok(ExoticPrefix { pieces: out })
    }
}

impl Iterator for ExoticWord {
    type Item = Result<ExoticPiece>;
    fn next(&mut self) -> Option<Self::Item> {
        self.next_piece().transpose()
    }
}

/// Finite prefix of an exotic word with its measure ledger.
#[derive(Clone, Debug)]
pub struct ExoticPrefix {
    pub pieces: Vec<ExoticPiece>,
}

impl ExoticPrefix {
    pub fn kept_indices(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.index).collect()
    }

    pub fn measure(&self) -> Quad {
        self.pieces
            .last()
            .map(|p| p.cumulative.clone())
            .unwrap_or_else(Quad::zero)
    }

    /// Segment measures in order; two prefixes with different kept tails
    /// have different signatures.
    pub fn measure_signature(&self) -> Vec<Quad> {
        self.pieces.iter().map(|p| p.segment_measure().clone()).collect()
    }

    /// Σ 1/q over the kept segments.
    pub fn reciprocal_sum(&self) -> Quad {
        self.pieces
            .iter()
            .fold(Quad::zero(), |acc, p| &acc + &Quad::frac(1, p.segment.q as i64))
    }

    pub fn blocks(&self) -> Option<BlockWord> {
        let mut it = self.pieces.iter();
        let mut w = it.next()?.segment.word.clone();
        for p in it {
            w = w.concat(&p.segment.word).expect("segments share block base");
        }
        Some(w)
    }

    pub fn letters(&self) -> LetterWord {
        let mut w = LetterWord::new();
        for p in &self.pieces {
            w.extend_from(&p.segment.letters());
        }
        w
    }

    /// Block lengths of each piece, in order.
    pub fn piece_lengths(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.segment.word.len()).collect()
    }

    /// Segment representatives joined by vertical connectors.
    pub fn representative(&self) -> Result<Option<FlatPath>> {
        let mut it = self.pieces.iter();
        let Some(first) = it.next() else {
            return Ok(None);
        };
        let mut path = first.segment.representative.clone();
        for p in it {
            let end = path.end().clone();
            let hop = FlatPoint::new(end.x.clone(), &floor_quad(&end.y) + p.segment.start_height());
            path.line_to(hop, Marker::Connector)?;
            path.append_translated(&p.segment.representative)?;
        }
        Ok(Some(path))
    }

    /// Checks the ledger against the measure of the assembled path.
    pub fn ledger_matches(&self, theta: &Quad) -> Result<bool> {
        Ok(match self.representative()? {
            Some(path) => transverse_measure(&path, theta).value == self.measure(),
            None => true,
        })
    }
}

fn floor_quad(x: &Quad) -> Quad {
    Quad::from_bigint(x.floor())
}

/// One stage of the cusp construction: a closed convergent word followed
/// by loops around the cusp.
#[derive(Clone, Debug)]
pub struct CuspPiece {
    pub k: usize,
    pub p: u64,
    pub q: u64,
    pub word: BlockWord,
    pub loops: u32,
    /// `|q_kθ − p_k|`.
    pub lattice_measure: Quad,
    pub connector: Quad,
    /// Running Σ |q_jθ − p_j| over the pieces so far.
    pub lattice_sum: Quad,
    pub representative: FlatPath,
}

impl CuspPiece {
    pub fn letters(&self) -> LetterWord {
        let mut w = self.word.to_letters();
        for _ in 0..self.loops {
            for l in [Letter::BInv, Letter::AInv, Letter::B, Letter::A] {
                w.push(l);
            }
        }
        w
    }
}

/// Lazy word `w₁ wᶜ¹ w₂ wᶜ² …` with `w_k` the convergent word started at
/// its lowest block and `w = BAba` a loop around the cusp.
pub struct CuspExoticWord {
    theta: ContinuedFraction,
    value: Quad,
    counts: Box<dyn Iterator<Item = u32>>,
    k: usize,
    lattice_sum: Quad,
    prev_height: Option<Quad>,
}

pub fn cusp_exotic_word(
    theta: &ContinuedFraction,
    loop_counts: impl Iterator<Item = u32> + 'static,
) -> Result<CuspExoticWord> {
    let value = theta
        .value()
        .cloned()
        .ok_or_else(|| Error::PrecisionExhausted("cusp measures need a closed-form slope".into()))?;
    if value <= Quad::one() || value.is_rational() {
        return Err(Error::InvalidSlope("slope must be irrational and above 1".into()));
    }
    Ok(CuspExoticWord {
        theta: theta.clone(),
        value,
        counts: Box::new(loop_counts),
        k: 1,
        lattice_sum: Quad::zero(),
        prev_height: None,
    })
}

impl CuspExoticWord {
    fn next_piece(&mut self) -> Result<Option<CuspPiece>> {
        let Some(loops) = self.counts.next() else {
            return Ok(None);
        };
        if loops == 0 {
            return Err(Error::InvalidArgument("loop counts must be positive".into()));
        }
        let k = self.k;
        self.k += 1;
        let c = self.theta.convergent(k)?;
        let (p, q) = c
            .small()
            .ok_or_else(|| Error::PrecisionExhausted(format!("convergent {k} exceeds 64 bits")))?;
        let sl = SimpleSlope::new(p, q)?;
        let idx = sl.run(q, q)?;
        let word = BlockWord::new(sl.n, idx.iter().map(|&l| sl.block(l)).collect(), Orientation::BA)?;
        let (mut representative, _) = block_path(&sl, &idx)?;
        representative.add_cusp_loops(loops);
        let lattice_measure =
            (&(&self.value * &Quad::from_int(q as i64)) - &Quad::from_int(p as i64)).abs();
        self.lattice_sum = &self.lattice_sum + &lattice_measure;
        let h = sl.height(q);
        let connector = match &self.prev_height {
            Some(prev) => (&h - prev).abs(),
            None => Quad::zero(),
        };
        self.prev_height = Some(h);
        Ok(Some(CuspPiece {
            k,
            p,
            q,
            word,
            loops,
            lattice_measure,
            connector,
            lattice_sum: self.lattice_sum.clone(),
            representative,
        }))
    }

    /// First `pieces` stages, their letters and the assembled path.
    pub fn prefix(&mut self, pieces: usize) -> Result<CuspPrefix> {
        let mut out = Vec::new();
        while out.len() < pieces {
            match self.next_piece()? {
                Some(p) => out.push(p),
                None => break,
            }
        }
        Ok(CuspPrefix { pieces: out })
    }
}

impl Iterator for CuspExoticWord {
    type Item = Result<CuspPiece>;
    fn next(&mut self) -> Option<Self::Item> {
        self.next_piece().transpose()
    }
}

#[derive(Clone, Debug)]
pub struct CuspPrefix {
    pub pieces: Vec<CuspPiece>,
}

impl CuspPrefix {
    pub fn letters(&self) -> LetterWord {
        let mut w = LetterWord::new();
        for p in &self.pieces {
            w.extend_from(&p.letters());
        }
        w
    }

    pub fn lattice_sum(&self) -> Quad {
        self.pieces
            .last()
            .map(|p| p.lattice_sum.clone())
            .unwrap_or_else(Quad::zero)
    }

    /// Lattice measures plus connector hops.
    pub fn measure(&self) -> Quad {
        self.pieces.iter().fold(Quad::zero(), |acc, p| {
            &(&acc + &p.lattice_measure) + &p.connector
        })
    }

    pub fn representative(&self) -> Result<Option<FlatPath>> {
        let mut it = self.pieces.iter();
        let Some(first) = it.next() else {
            return Ok(None);
        };
        let mut path = first.representative.clone();
        for p in it {
            let end = path.end().clone();
            let h = p.representative.start().y.clone();
            path.line_to(FlatPoint::new(end.x.clone(), &floor_quad(&end.y) + &h), Marker::Connector)?;
            path.append_translated(&p.representative)?;
        }
        Ok(Some(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_torus::path_word;

    #[test]
    fn empty_indices() {
        let th = ContinuedFraction::sqrt2();
        let mut w = exotic_word(&th, &[]).unwrap();
        let p = w.prefix(10).unwrap();
        assert!(p.letters().is_empty());
        assert!(p.measure().is_zero());
    }

    #[test]
    fn parity_mismatch() {
        let th = ContinuedFraction::sqrt2();
        assert!(matches!(exotic_word(&th, &[2, 3]), Err(Error::ParityMismatch(_))));
        let mut lazy = ExoticWord::new(&th, [2usize, 4, 7].into_iter()).unwrap();
        assert!(matches!(lazy.prefix(3), Err(Error::ParityMismatch(_))));
    }

    #[test]
    fn two_segments() {
        let th = ContinuedFraction::sqrt2();
        let mut w = exotic_word(&th, &[2, 4]).unwrap();
        let p = w.prefix(2).unwrap();
        assert_eq!(p.kept_indices(), vec![2, 4]);
        let qs: Vec<u64> = p.pieces.iter().map(|x| x.segment.q).collect();
        assert_eq!(qs, vec![5, 29]);
        assert!(p.ledger_matches(th.value().unwrap()).unwrap());
        let path = p.representative().unwrap().unwrap();
        assert_eq!(path_word(&path).unwrap(), p.letters());
        // connector from 1/10 up to 1/58 in absolute value
        assert_eq!(p.pieces[1].connector, &Quad::frac(1, 10) - &Quad::frac(1, 58));
    }

    #[test]
    fn thinning_enforces_domination() {
        let th = ContinuedFraction::sqrt2();
        let mut w = ExoticWord::new(&th, (1..).map(|i| 2 * i)).unwrap();
        let p = w.prefix(5).unwrap();
        let sig = p.measure_signature();
        for i in 0..sig.len() {
            let rest = sig[i + 1..].iter().fold(Quad::zero(), |a, b| &a + b);
            assert!(&rest * &Quad::from_int(3) < sig[i]);
        }
    }

    #[test]
    fn cusp_first_stage() {
        let th = ContinuedFraction::sqrt2();
        let mut w = cusp_exotic_word(&th, std::iter::repeat(1)).unwrap();
        let p = w.prefix(3).unwrap();
        assert_eq!(p.pieces[0].word.blocks(), &[1, 2]);
        assert!(p.letters().to_string().starts_with("babbaBAba"));
        let path = p.representative().unwrap().unwrap();
        assert_eq!(path_word(&path).unwrap(), p.letters());
        assert_eq!(transverse_measure(&path, th.value().unwrap()).value, p.measure());
        let want = "-7+5*sqrt2".parse::<Quad>().unwrap()
            + "3-2*sqrt2".parse::<Quad>().unwrap()
            + "17-12*sqrt2".parse::<Quad>().unwrap();
        assert_eq!(p.lattice_sum(), want);
    }

    #[test]
    fn cusp_zero_count_rejected() {
        let th = ContinuedFraction::sqrt2();
        let mut w = cusp_exotic_word(&th, [1u32, 0].into_iter()).unwrap();
        assert!(matches!(w.prefix(2), Err(Error::InvalidArgument(_))));
    }
}
