//! Words on the once-punctured square torus: block words of rational
//! slopes, inadmissible words and segments, and exotic words.

mod exotic;
mod letters;
mod simple;

pub use exotic::{
    cusp_exotic_word, exotic_word, CuspExoticWord, CuspPiece, CuspPrefix, ExoticPiece,
    ExoticPrefix, ExoticWord,
};
pub use letters::{blocks_to_letters, letters_to_blocks, BlockWord, Letter, LetterWord, Orientation};
pub use simple::{
    block_path, inadmissible_segment, inadmissible_word, reverted_word, simple_word,
    SegmentCertificate, SimpleSlope,
};
