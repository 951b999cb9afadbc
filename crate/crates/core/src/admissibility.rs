//! Deciding whether a finite word occurs in some leaf word of slope θ.
//!
//! The length-`m` factors of the cutting sequences of slope θ are those of
//! the periodic word of any convergent `p_l/q_l` with `q_l > m + 1`: the
//! points `jθ mod 1`, `j ≤ m + 1`, sit in the same cyclic order for θ and
//! for such a convergent, and every gap of the rational partition contains
//! a point of the periodic orbit. Membership in a periodic word is a
//! substring search over one period plus an overlap.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cf_arith::ContinuedFraction;
use crate::error::{Error, Result};
use crate::field::Quad;
use crate::flat_torus::cutting_sequence;
use crate::torus_words::{BlockWord, Letter, LetterWord, Orientation};

/// One period of the cutting word of slope `p/q`, read from height
/// `1/(2q)`; `p + q` letters.
pub fn periodic_word(p: u64, q: u64) -> Result<LetterWord> {
    if q == 0 || p == 0 || num_integer::gcd(p, q) != 1 {
        return Err(Error::InvalidSlope(format!("{p}/{q} not a positive reduced fraction")));
    }
    let theta = ContinuedFraction::from_rational(&num_rational::BigRational::new(p.into(), q.into()))?;
    cutting_sequence(&Quad::frac(1, 2 * q as i64), &theta, (p + q) as usize)
}

/// Length-`m` factors of a bi-infinite periodic word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSet {
    pub p: u64,
    pub q: u64,
    pub m: usize,
    pub factors: BTreeSet<LetterWord>,
}

impl FactorSet {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn contains(&self, w: &LetterWord) -> bool {
        self.factors.contains(w)
    }
}

fn cyclic_windows(period: &[u8], m: usize) -> impl Iterator<Item = Vec<u8>> + '_ {
    let n = period.len();
    (0..n).map(move |i| (0..m).map(|j| period[(i + j) % n]).collect())
}

/// Letter factors of length `m` of the periodic word of slope `p/q`.
pub fn rational_factors(p: u64, q: u64, m: usize) -> Result<FactorSet> {
    if m == 0 {
        return Err(Error::InvalidArgument("factor length must be positive".into()));
    }
    let per = periodic_word(p, q)?.to_bytes();
    let factors = cyclic_windows(&per, m)
        .map(|w| LetterWord::from_bytes(&w).expect("letters from abAB"))
        .collect();
    Ok(FactorSet { p, q, m, factors })
}

/// Block factors with `m` blocks of the periodic word of slope `p/q > 1`.
pub fn rational_block_factors(p: u64, q: u64, m: usize) -> Result<BTreeSet<Vec<u64>>> {
    if m == 0 {
        return Err(Error::InvalidArgument("factor length must be positive".into()));
    }
    let w = crate::torus_words::simple_word(p, q, 1)?;
    let b = w.blocks();
    let n = b.len();
    Ok((0..n).map(|i| (0..m).map(|j| b[(i + j) % n]).collect()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Admissible,
    Inadmissible,
}

/// Where an admissible word was found in an actual cutting sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub start: Quad,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityCertificate {
    pub verdict: Verdict,
    pub word_len: usize,
    /// Convergent whose periodic word decided the question; `None` for the
    /// empty word.
    pub convergent: Option<(usize, BigInt, BigInt)>,
    pub witness: Option<Witness>,
    pub reason: Option<String>,
}

impl AdmissibilityCertificate {
    pub fn is_admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }
}

/// First convergent index `l ≤ k_max` with `q_l > m + 1`, or the last
/// convergent of a rational θ.
fn deciding_convergent(theta: &ContinuedFraction, m: usize, k_max: usize) -> Result<(usize, u64, u64)> {
    let need = BigInt::from(m as u64 + 1);
    for l in 0..=k_max {
        let c = match theta.convergent(l) {
            Ok(c) => c,
            Err(_) if theta.finite_len() == Some(l) && l > 0 => {
                let c = theta.convergent(l - 1)?;
                return small(&c.p, &c.q).map(|(p, q)| (l - 1, p, q));
            }
            Err(e) if e.is_exhaustion() => {
                return Err(Error::DepthInsufficient(format!(
                    "coefficients run out before a denominator exceeds {need}"
                )))
            }
            Err(e) => return Err(e),
        };
        if c.q > need || theta.finite_len() == Some(l + 1) {
            return small(&c.p, &c.q).map(|(p, q)| (l, p, q));
        }
    }
    Err(Error::DepthInsufficient(format!(
        "no denominator above {need} up to depth {k_max}"
    )))
}

fn small(p: &BigInt, q: &BigInt) -> Result<(u64, u64)> {
    match (p.to_u64(), q.to_u64()) {
        (Some(p), Some(q)) if p > 0 => Ok((p, q)),
        (Some(_), Some(_)) => Err(Error::InvalidSlope("slope must be positive".into())),
        _ => Err(Error::BudgetExhausted("convergent exceeds 64 bits".into())),
    }
}

/// Substring test against the bi-infinite periodic word.
pub fn occurs_cyclically(period: &[u8], word: &[u8]) -> bool {
    if word.is_empty() {
        return true;
    }
    let mut hay = Vec::with_capacity(period.len() * (word.len() / period.len().max(1) + 2));
    while hay.len() < period.len() + word.len() {
        hay.extend_from_slice(period);
    }
    memchr::memmem::find(&hay, word).is_some()
}

/// Decides admissibility of `word` for slope θ, looking at convergents up
/// to `k_max`.
pub fn is_admissible(word: &LetterWord, theta: &ContinuedFraction, k_max: usize) -> Result<AdmissibilityCertificate> {
    let m = word.len();
    if m == 0 {
        return Ok(AdmissibilityCertificate {
            verdict: Verdict::Admissible,
            word_len: 0,
            convergent: None,
            witness: Some(Witness {
                start: Quad::frac(1, 4),
                offset: 0,
            }),
            reason: None,
        });
    }
    if !word.is_positive() {
        return Ok(AdmissibilityCertificate {
            verdict: Verdict::Inadmissible,
            word_len: m,
            convergent: None,
            witness: None,
            reason: Some("leaf words contain no inverse letters".into()),
        });
    }
    let (l, p, q) = deciding_convergent(theta, m, k_max)?;
    let per = periodic_word(p, q)?.to_bytes();
    let bytes = word.to_bytes();
    let found = occurs_cyclically(&per, &bytes);
    let convergent = Some((l, BigInt::from(p), BigInt::from(q)));
    if !found {
        return Ok(AdmissibilityCertificate {
            verdict: Verdict::Inadmissible,
            word_len: m,
            convergent,
            witness: None,
            reason: Some(format!("not a factor of the {p}/{q} periodic word")),
        });
    }
    let witness = find_witness(&bytes, theta, p + q)?;
    Ok(AdmissibilityCertificate {
        verdict: Verdict::Admissible,
        word_len: m,
        convergent,
        witness: Some(witness),
        reason: None,
    })
}

/// Searches growing prefixes of the cutting sequence from height 1/4.
fn find_witness(word: &[u8], theta: &ContinuedFraction, period: u64) -> Result<Witness> {
    let start = Quad::frac(1, 4);
    let mut len = (8 * period as usize + 4 * word.len()).max(256);
    while len <= 1 << 24 {
        let seq = cutting_sequence(&start, theta, len)?.to_bytes();
        if let Some(offset) = memchr::memmem::find(&seq, word) {
            return Ok(Witness { start, offset });
        }
        len *= 4;
    }
    Err(Error::BudgetExhausted("no occurrence in the searched prefixes".into()))
}

/// Re-checks a witness against the cutting sequence.
pub fn check_witness(word: &LetterWord, theta: &ContinuedFraction, w: &Witness) -> Result<bool> {
    let seq = cutting_sequence(&w.start, theta, w.offset + word.len())?;
    Ok(seq.letters()[w.offset..] == word.letters()[..])
}

/// Block words are read from a block boundary: the letters are preceded
/// by the separator closing the previous block, so the first block cannot
/// merge with it.
pub fn block_aligned(word: &BlockWord) -> LetterWord {
    let sep = match word.orientation() {
        Orientation::BA => Letter::A,
        Orientation::AB => Letter::B,
    };
    let mut w = LetterWord(vec![sep]);
    w.extend_from(&word.to_letters());
    w
}

/// Block word variant of [`is_admissible`], on [`block_aligned`] letters.
pub fn is_admissible_blocks(word: &BlockWord, theta: &ContinuedFraction, k_max: usize) -> Result<AdmissibilityCertificate> {
    is_admissible(&block_aligned(word), theta, k_max)
}

/// Number of admissible factors of length `m`.
pub fn factor_count(theta: &ContinuedFraction, m: usize, k_max: usize) -> Result<usize> {
    if m == 0 {
        return Ok(1);
    }
    let (_, p, q) = deciding_convergent(theta, m, k_max)?;
    Ok(rational_factors(p, q, m)?.len())
}

/// Every length-`m` factor met in `letters`-long cutting sequences from the
/// given start heights.
pub fn sampled_factors(theta: &ContinuedFraction, m: usize, starts: &[Quad], letters: usize) -> Result<BTreeSet<Vec<u8>>> {
    let mut out = BTreeSet::new();
    for s in starts {
        let seq = cutting_sequence(s, theta, letters)?.to_bytes();
        for w in seq.windows(m) {
            if !out.contains(w) {
                out.insert(w.to_vec());
            }
        }
    }
    Ok(out)
}

/// Start heights `(2i + 1)/(2n)`, `i < n`.
pub fn sample_heights(n: usize) -> Vec<Quad> {
    (0..n)
        .map(|i| Quad::frac(2 * i as i64 + 1, 2 * n as i64))
        .collect()
}

/// Whether `word` occurs in any of the sampled cutting sequences.
pub fn occurs_in_samples(word: &LetterWord, theta: &ContinuedFraction, starts: &[Quad], letters: usize) -> Result<bool> {
    let w = word.to_bytes();
    for s in starts {
        let seq = cutting_sequence(s, theta, letters)?.to_bytes();
        if memchr::memmem::find(&seq, &w).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Blocks in the `ba` orientation, for callers holding block lists.
pub fn blocks_word(blocks: &[u64]) -> Result<LetterWord> {
    Ok(BlockWord::from_blocks(blocks.to_vec(), Orientation::BA)?.to_letters())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_words::{inadmissible_word, reverted_word, simple_word};

    fn lw(s: &str) -> LetterWord {
        s.parse().unwrap()
    }

    #[test]
    fn periodic_word_is_simple_word_rotation() {
        for (p, q) in [(7, 5), (5, 3), (2, 1), (17, 12), (13, 4)] {
            let per = periodic_word(p, q).unwrap();
            let sw = simple_word(p, q, 1).unwrap().to_letters();
            assert_eq!(per.len(), sw.len());
            assert!(occurs_cyclically(&per.to_bytes(), &sw.to_bytes()) && per.len() == sw.len());
        }
    }

    #[test]
    fn factor_sets() {
        let f = rational_factors(2, 1, 3).unwrap();
        let want: BTreeSet<LetterWord> = ["bba", "bab", "abb"].iter().map(|s| lw(s)).collect();
        assert_eq!(f.factors, want);
        let b = rational_block_factors(5, 3, 2).unwrap();
        let want: BTreeSet<Vec<u64>> = [vec![2, 2], vec![2, 1], vec![1, 2]].into_iter().collect();
        assert_eq!(b, want);
        assert_eq!(rational_block_factors(7, 5, 5).unwrap().len(), 5);
    }

    #[test]
    fn spec_verdicts() {
        let th = ContinuedFraction::sqrt2();
        let c = is_admissible(&blocks_word(&[2, 2]).unwrap(), &th, 30).unwrap();
        assert_eq!(c.verdict, Verdict::Inadmissible);
        let c = is_admissible(&blocks_word(&[1, 2]).unwrap(), &th, 30).unwrap();
        assert!(c.is_admissible());
        assert!(check_witness(&blocks_word(&[1, 2]).unwrap(), &th, c.witness.as_ref().unwrap()).unwrap());
        assert!(is_admissible(&LetterWord::new(), &th, 0).unwrap().is_admissible());
    }

    #[test]
    fn algorithm_two_words() {
        let th = ContinuedFraction::sqrt2();
        for k in 2..=7 {
            let w = inadmissible_word(&th, k).unwrap();
            assert!(!is_admissible_blocks(&w, &th, 40).unwrap().is_admissible(), "k={k}");
            let r = reverted_word(&th, k).unwrap();
            assert!(is_admissible_blocks(&r, &th, 40).unwrap().is_admissible(), "k={k}");
        }
    }

    #[test]
    fn counts() {
        let th = ContinuedFraction::sqrt2();
        assert_eq!(factor_count(&th, 1, 30).unwrap(), 2);
        assert_eq!(factor_count(&th, 3, 30).unwrap(), 4);
        for m in 1..=20 {
            assert_eq!(factor_count(&th, m, 30).unwrap(), m + 1);
        }
    }

    #[test]
    fn depth_insufficient() {
        let th = ContinuedFraction::sqrt2();
        let w = lw(&"ba".repeat(40));
        assert!(matches!(is_admissible(&w, &th, 2), Err(Error::DepthInsufficient(_))));
    }

    #[test]
    fn sampling_agrees_on_small_lengths() {
        let th = ContinuedFraction::sqrt2();
        let starts = sample_heights(10);
        for m in 1..=8 {
            let sampled = sampled_factors(&th, m, &starts, 5000).unwrap();
            let (_, p, q) = deciding_convergent(&th, m, 30).unwrap();
            let exact: BTreeSet<Vec<u8>> =
                rational_factors(p, q, m).unwrap().factors.iter().map(|w| w.to_bytes()).collect();
            assert_eq!(sampled, exact, "m={m}");
        }
    }
}
