//! Words over the torus alphabet {a, b, A, B} and their block shorthand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator or inverse generator; `A = a⁻¹`, `B = b⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    AInv,
    BInv,
}

impl Letter {
    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::AInv => 'A',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'a' => Letter::A,
            'b' => Letter::B,
            'A' => Letter::AInv,
            'B' => Letter::BInv,
            _ => return None,
        })
    }

    pub fn inverse(self) -> Self {
        match self {
            Letter::A => Letter::AInv,
            Letter::B => Letter::BInv,
            Letter::AInv => Letter::A,
            Letter::BInv => Letter::B,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Letter::A | Letter::B)
    }

    pub fn to_byte(self) -> u8 {
        self.to_char() as u8
    }
}

/// Finite word over {a, b, A, B}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterWord(pub Vec<Letter>);

impl LetterWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &LetterWord) {
        self.0.extend_from_slice(&other.0);
    }

    /// No adjacent inverse pair.
    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0].inverse() != w[1])
    }

    /// Only the letters a and b occur.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_positive())
    }

    pub fn contains_letter(&self, l: Letter) -> bool {
        self.0.contains(&l)
    }

    pub fn count(&self, l: Letter) -> usize {
        self.0.iter().filter(|&&x| x == l).count()
    }

    /// ASCII encoding, one byte per letter.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().map(|l| l.to_byte()).collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        bytes
            .iter()
            .map(|&c| {
                Letter::from_char(c as char)
                    .ok_or_else(|| Error::Parse(format!("letter {:?} not in abAB", c as char)))
            })
            .collect::<Result<Vec<_>>>()
            .map(LetterWord)
    }
}

impl fmt::Display for LetterWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for LetterWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_bytes(s.trim().as_bytes())
    }
}

/// Which letter is repeated inside a block: `BA` means blocks `bⁿa`
/// (slopes above 1), `AB` means `aⁿb`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    BA,
    AB,
}

impl Orientation {
    fn letters(self) -> (Letter, Letter) {
        match self {
            Orientation::BA => (Letter::B, Letter::A),
            Orientation::AB => (Letter::A, Letter::B),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Orientation::BA => "ba",
            Orientation::AB => "ab",
        }
    }
}

/// Word `(n₁, …, n_k)` in block shorthand; every entry is `n` or `n + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockWord {
    base: u64,
    blocks: Vec<u64>,
    orientation: Orientation,
}

impl BlockWord {
    pub fn new(base: u64, blocks: Vec<u64>, orientation: Orientation) -> Result<Self> {
        if base == 0 {
            return Err(Error::InvalidArgument("block base must be positive".into()));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("block word must be nonempty".into()));
        }
        if let Some(bad) = blocks.iter().find(|&&b| b != base && b != base + 1) {
            return Err(Error::InvalidArgument(format!(
                "block {bad} is neither {base} nor {}",
                base + 1
            )));
        }
        Ok(BlockWord {
            base,
            blocks,
            orientation,
        })
    }

    /// Infers the base from the entries (the smaller value, or the only one).
    pub fn from_blocks(blocks: Vec<u64>, orientation: Orientation) -> Result<Self> {
        let min = *blocks
            .iter()
            .min()
            .ok_or_else(|| Error::InvalidArgument("block word must be nonempty".into()))?;
        Self::new(min, blocks, orientation)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of letters once expanded.
    pub fn letter_count(&self) -> u64 {
        self.blocks.iter().sum::<u64>() + self.blocks.len() as u64
    }

    pub fn to_letters(&self) -> LetterWord {
        blocks_to_letters(self)
    }

    /// Appends another block word with the same base and orientation.
    pub fn concat(&self, other: &BlockWord) -> Result<BlockWord> {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(&other.blocks);
        let base = self.base.min(other.base);
        BlockWord::new(base, blocks, self.orientation)
    }

    /// Whether `other` is a cyclic rotation of `self`.
    pub fn is_rotation_of(&self, other: &BlockWord) -> bool {
        if self.blocks.len() != other.blocks.len() || self.orientation != other.orientation {
            return false;
        }
        let n = self.blocks.len();
        let mut doubled = self.blocks.clone();
        doubled.extend_from_slice(&self.blocks);
        (0..n).any(|i| doubled[i..i + n] == other.blocks[..])
    }
}

impl fmt::Display for BlockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.blocks.iter().map(u64::to_string).collect();
        write!(f, "({})@{}", inner.join(","), self.orientation.tag())
    }
}

impl FromStr for BlockWord {
    type Err = Error;

    /// `(n1,...,nk)@ba` or `(n1,...,nk)@ab`; the orientation suffix
    /// defaults to `ba`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad block word {t:?}"));
        let (body, orient) = match t.rsplit_once('@') {
            Some((b, "ba")) => (b, Orientation::BA),
            Some((b, "ab")) => (b, Orientation::AB),
            Some(_) => return Err(bad()),
            None => (t.as_str(), Orientation::BA),
        };
        let inner = body
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(bad)?;
        let blocks = inner
            .split(',')
            .map(|x| x.parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(blocks, orient)
    }
}

/// Expands `(n₁, …, n_k)_{b,a}` to `b^{n₁} a … b^{n_k} a`.
pub fn blocks_to_letters(w: &BlockWord) -> LetterWord {
    let (rep, sep) = w.orientation.letters();
    let mut out = Vec::with_capacity(w.letter_count() as usize);
    for &n in &w.blocks {
        out.extend(std::iter::repeat_n(rep, n as usize));
        out.push(sep);
    }
    LetterWord(out)
}

/// Inverse of [`blocks_to_letters`] for positive words of block shape.
pub fn letters_to_blocks(w: &LetterWord, orientation: Orientation) -> Result<BlockWord> {
    let (rep, sep) = orientation.letters();
    let mut blocks = Vec::new();
    let mut run = 0u64;
    for (i, &l) in w.0.iter().enumerate() {
        if l == rep {
            run += 1;
        } else if l == sep {
            if run == 0 {
                return Err(Error::NotBlockShaped(format!("empty block at letter {i}")));
            }
            blocks.push(run);
            run = 0;
        } else {
            return Err(Error::NotBlockShaped(format!(
                "letter {} at position {i}",
                l.to_char()
            )));
        }
    }
    if run != 0 {
        return Err(Error::NotBlockShaped("word does not end with a block separator".into()));
    }
    let (min, max) = match (blocks.iter().min(), blocks.iter().max()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::NotBlockShaped("empty word".into())),
    };
    if max > min + 1 {
        return Err(Error::NotBlockShaped(format!(
            "block lengths {min} and {max} differ by more than one"
        )));
    }
    BlockWord::new(min, blocks, orientation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_blocks() {
        let w: BlockWord = "(2,2,1)@ba".parse().unwrap();
        assert_eq!(w.to_letters().to_string(), "bbabbaba");
        assert_eq!(w.letter_count(), 8);
    }

    #[test]
    fn collapse_letters() {
        let w: LetterWord = "baba".parse().unwrap();
        let b = letters_to_blocks(&w, Orientation::BA).unwrap();
        assert_eq!(b.blocks(), &[1, 1]);
        assert_eq!(b.to_string(), "(1,1)@ba");
    }

    #[test]
    fn reject_non_block_shapes() {
        for s in ["aBa", "ab", "bbb", "abba", "bbbabaa"] {
            let w: LetterWord = s.parse().unwrap();
            assert!(
                matches!(letters_to_blocks(&w, Orientation::BA), Err(Error::NotBlockShaped(_))),
                "{s}"
            );
        }
    }

    #[test]
    fn reduced_flag() {
        assert!("abAB".parse::<LetterWord>().unwrap().is_reduced());
        assert!(!"abBa".parse::<LetterWord>().unwrap().is_reduced());
    }

    #[test]
    fn rotation_check() {
        let a: BlockWord = "(1,1,2,1,2)".parse().unwrap();
        let b: BlockWord = "(1,2,1,1,2)".parse().unwrap();
        let c: BlockWord = "(1,1,1,2,2)".parse().unwrap();
        assert!(a.is_rotation_of(&b));
        assert!(!a.is_rotation_of(&c));
    }

    proptest::proptest! {
        #[test]
        fn blocks_letters_inverse(base in 1u64..5, bits in proptest::collection::vec(proptest::bool::ANY, 1..30)) {
            let blocks: Vec<u64> = bits.iter().map(|&b| base + b as u64).collect();
            let w = BlockWord::new(base, blocks, Orientation::BA).unwrap();
            let back = letters_to_blocks(&w.to_letters(), Orientation::BA).unwrap();
            proptest::prop_assert_eq!(back.blocks(), w.blocks());
        }
    }
}
