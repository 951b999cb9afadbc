//! Simple words of rational slopes and the inadmissible words and segments
//! built from convergents.

use num_integer::Integer;

use super::letters::{BlockWord, LetterWord, Orientation};
use crate::cf_arith::ContinuedFraction;
use crate::error::{Error, Result};
use crate::field::Quad;
use crate::flat_torus::{transverse_measure, FlatPath, FlatPoint, Marker};

/// Slope `p/q > 1` with the block data `n`, `s = (n+1)q − p`, `t = p − nq`.
/// Block start indices run over `1..=q`; index `l` starts a block of
/// `n + 1` letters `b` when `l ≤ t`, of `n` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimpleSlope {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    pub s: u64,
    pub t: u64,
}

impl SimpleSlope {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p <= q {
            return Err(Error::InvalidSlope(format!("{p}/{q} is not greater than 1")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidSlope(format!("{p}/{q} not in lowest terms")));
        }
        let n = if p.is_multiple_of(q) { p / q - 1 } else { p / q };
        let s = (n + 1) * q - p;
        let t = p - n * q;
        Ok(SimpleSlope { p, q, n, s, t })
    }

    pub fn block(&self, l: u64) -> u64 {
        if l <= self.t {
            self.n + 1
        } else {
            self.n
        }
    }

    pub fn next(&self, l: u64) -> u64 {
        if l <= self.t {
            self.s + l
        } else {
            l - self.t
        }
    }

    fn check_index(&self, l: u64) -> Result<()> {
        if l == 0 || l > self.q {
            return Err(Error::IndexOutOfRange(format!("start index {l} not in 1..={}", self.q)));
        }
        Ok(())
    }

    /// Start indices visited from `l1` until the index `stop` comes up
    /// again; `stop` itself is not included. The check happens after each
    /// step, so `run(l, l)` is a full period.
    pub fn run(&self, l1: u64, stop: u64) -> Result<Vec<u64>> {
        self.check_index(l1)?;
        self.check_index(stop)?;
        let mut out = Vec::new();
        let mut l = l1;
        loop {
            out.push(l);
            l = self.next(l);
            if l == stop {
                break;
            }
        }
        Ok(out)
    }

    /// Start height of the block with index `l` on the leaves through
    /// height `1/(2q)`: `1/(2q) + (q − l)/q`.
    pub fn height(&self, l: u64) -> Quad {
        Quad::frac((2 * (self.q - l) + 1) as i64, (2 * self.q) as i64)
    }

    fn blocks(&self, idx: &[u64]) -> Result<BlockWord> {
        BlockWord::new(self.n, idx.iter().map(|&l| self.block(l)).collect(), Orientation::BA)
    }
}

/// Output of the Algorithm-1 loop for `p/q` started at index `l1`.
pub fn simple_word(p: u64, q: u64, l1: u64) -> Result<BlockWord> {
    let sl = SimpleSlope::new(p, q)?;
    let idx = sl.run(l1, l1)?;
    sl.blocks(&idx)
}

/// Leaf representative following slope-`p/q` blocks through the given
/// start indices, with a vertical hop wherever the next index is not the
/// natural successor. Returns the path and the indices where hops occur.
pub fn block_path(sl: &SimpleSlope, idx: &[u64]) -> Result<(FlatPath, usize)> {
    let first = *idx
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty index list".into()))?;
    let mut x: i64 = 0;
    let mut y: i64 = 0;
    let mut path = FlatPath::new(FlatPoint::new(Quad::zero(), sl.height(first)))?;
    let mut hops = 0;
    for (i, &l) in idx.iter().enumerate() {
        x += 1;
        y += sl.block(l) as i64;
        let nat = sl.next(l);
        match idx.get(i + 1) {
            Some(&m) if m != nat => {
                path.line_to(pt(x, y, sl.height(nat)), Marker::Joint)?;
                path.line_to(pt(x, y, sl.height(m)), Marker::Connector)?;
                hops += 1;
            }
            Some(_) => {}
            None => path.line_to(pt(x, y, sl.height(nat)), Marker::Joint)?,
        }
    }
    Ok((path, hops))
}

fn pt(x: i64, y: i64, h: Quad) -> FlatPoint {
    FlatPoint::new(Quad::from_int(x), &Quad::from_int(y) + &h)
}

fn convergent_slope(theta: &ContinuedFraction, k: usize) -> Result<SimpleSlope> {
    if k < 2 {
        return Err(Error::IndexOutOfRange(format!("k = {k} must be at least 2")));
    }
    let c = theta.convergent(k)?;
    let (p, q) = c
        .small()
        .ok_or_else(|| Error::PrecisionExhausted(format!("convergent {k} exceeds 64 bits")))?;
    SimpleSlope::new(p, q)
}

/// Index lists for Algorithms 2 and 3: the Algorithm-2 indices with the
/// flipped block replaced by the index whose block has the flipped length,
/// and the trailing partial run.
struct SegmentIndices {
    flipped: Vec<u64>,
    flipped_from: u64,
    tail: Vec<u64>,
}

fn segment_indices(sl: &SimpleSlope, k: usize) -> Result<SegmentIndices> {
    if sl.t == 0 || sl.s == 0 {
        return Err(Error::InvalidSlope(format!("{}/{} has a single block type", sl.p, sl.q)));
    }
    let (start, flip_to) = if k.is_multiple_of(2) {
        (sl.q, sl.t + 1)
    } else {
        (1, sl.t)
    };
    let mut flipped = sl.run(start, start)?;
    let flipped_from = flipped.pop().expect("nonempty run");
    flipped.push(flip_to);
    let mut tail = sl.run(flip_to, start)?;
    tail.remove(0);
    Ok(SegmentIndices {
        flipped,
        flipped_from,
        tail,
    })
}

/// The `p_k/q_k`-word started at the lowest (even `k`) or
/// highest (odd `k`) block, with its last block flipped.
pub fn inadmissible_word(theta: &ContinuedFraction, k: usize) -> Result<BlockWord> {
    let sl = convergent_slope(theta, k)?;
    let si = segment_indices(&sl, k)?;
    sl.blocks(&si.flipped)
}

/// [`inadmissible_word`] with the last block restored.
pub fn reverted_word(theta: &ContinuedFraction, k: usize) -> Result<BlockWord> {
    let sl = convergent_slope(theta, k)?;
    let si = segment_indices(&sl, k)?;
    let mut idx = si.flipped;
    *idx.last_mut().expect("nonempty") = si.flipped_from;
    sl.blocks(&idx)
}

/// Closed inadmissible segment with a representative path.
#[derive(Clone, Debug)]
pub struct SegmentCertificate {
    pub k: usize,
    pub p: u64,
    pub q: u64,
    pub word: BlockWord,
    /// Number of leading blocks coming from [`inadmissible_word`].
    pub head_blocks: usize,
    pub representative: FlatPath,
    /// Exact transverse measure of the representative, when θ has a
    /// closed form.
    pub measure: Option<Quad>,
    /// `|q_kθ − p_k|`, when θ has a closed form.
    pub approximation_error: Option<Quad>,
}

impl SegmentCertificate {
    pub fn letters(&self) -> LetterWord {
        self.word.to_letters()
    }

    pub fn letter_count(&self) -> u64 {
        self.word.letter_count()
    }

    /// `3|q_kθ − p_k| + 2/q_k`.
    pub fn measure_bound(&self) -> Option<Quad> {
        self.approximation_error
            .as_ref()
            .map(|e| &(e * &Quad::from_int(3)) + &Quad::frac(2, self.q as i64))
    }

    /// Start height of the closed representative.
    pub fn start_height(&self) -> &Quad {
        &self.representative.start().y
    }
}

/// The inadmissible word followed by the rest of the partial
/// block run that closes it up.
pub fn inadmissible_segment(theta: &ContinuedFraction, k: usize) -> Result<SegmentCertificate> {
    let sl = convergent_slope(theta, k)?;
    let si = segment_indices(&sl, k)?;
    let mut idx = si.flipped.clone();
    idx.extend_from_slice(&si.tail);
    let word = sl.blocks(&idx)?;
    let (representative, hops) = block_path(&sl, &idx)?;
    debug_assert_eq!(hops, 1);
    debug_assert_eq!(representative.end().y.fract(), representative.start().y);
    let (measure, approximation_error) = match theta.value() {
        Some(v) => {
            let m = transverse_measure(&representative, v).value;
            let e = (&(v * &Quad::from_int(sl.q as i64)) - &Quad::from_int(sl.p as i64)).abs();
            (Some(m), Some(e))
        }
        None => (None, None),
    };
    Ok(SegmentCertificate {
        k,
        p: sl.p,
        q: sl.q,
        word,
        head_blocks: si.flipped.len(),
        representative,
        measure,
        approximation_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_torus::path_word;

    fn blocks(w: &BlockWord) -> Vec<u64> {
        w.blocks().to_vec()
    }

    #[test]
    fn five_thirds() {
        assert_eq!(blocks(&simple_word(5, 3, 1).unwrap()), vec![2, 2, 1]);
        assert_eq!(blocks(&simple_word(5, 3, 3).unwrap()), vec![1, 2, 2]);
        assert_eq!(blocks(&simple_word(2, 1, 1).unwrap()), vec![2]);
    }

    #[test]
    fn slope_errors() {
        assert!(matches!(simple_word(3, 3, 1), Err(Error::InvalidSlope(_))));
        assert!(matches!(simple_word(6, 4, 1), Err(Error::InvalidSlope(_))));
        assert!(matches!(simple_word(1, 2, 1), Err(Error::InvalidSlope(_))));
        assert!(matches!(simple_word(5, 3, 4), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn sqrt2_inadmissible_words() {
        let th = ContinuedFraction::sqrt2();
        assert_eq!(blocks(&inadmissible_word(&th, 2).unwrap()), vec![1, 1, 2, 1, 1]);
        assert_eq!(
            blocks(&inadmissible_word(&th, 3).unwrap()),
            vec![2, 1, 2, 1, 2, 1, 1, 2, 1, 2, 1, 2]
        );
        assert_eq!(blocks(&reverted_word(&th, 2).unwrap()), vec![1, 1, 2, 1, 2]);
        assert!(matches!(inadmissible_word(&th, 1), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn sqrt2_segment() {
        let th = ContinuedFraction::sqrt2();
        let c = inadmissible_segment(&th, 2).unwrap();
        assert_eq!(blocks(&c.word), vec![1, 1, 2, 1, 1, 2, 1, 2]);
        assert_eq!(c.letter_count(), 19);
        assert_eq!(path_word(&c.representative).unwrap(), c.letters());
        let m = c.measure.clone().unwrap();
        assert!(m < c.measure_bound().unwrap());
        assert!(m.is_positive());
    }

    #[test]
    fn representatives_read_their_words() {
        let th = ContinuedFraction::sqrt2();
        for k in 2..=9 {
            let c = inadmissible_segment(&th, k).unwrap();
            assert_eq!(path_word(&c.representative).unwrap(), c.letters(), "k={k}");
            assert!(c.letter_count() <= 2 * (c.p + c.q));
            assert!(c.measure.clone().unwrap() < c.measure_bound().unwrap());
        }
    }
}
