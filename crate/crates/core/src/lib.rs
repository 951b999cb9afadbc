//! Exact constructions of exotic rays for measured foliations.
//!
//! The crate covers the once-punctured torus (slope-θ line foliations,
//! Sturmian words, inadmissible words of small transverse measure) and
//! general translation surfaces (horizontal flow, first-return maps,
//! level-set partitions, inadmissible loops). All geometry is exact over a
//! real quadratic field.

pub mod cf_arith;
pub mod admissibility;
pub mod error;
pub mod field;
pub mod flat_torus;
pub mod torus_words;
pub mod serial;
pub mod translation_surface;

pub use cf_arith::{ContinuedFraction, Convergent};
pub use error::{Error, Result};
pub use field::{Quad, QuadField};
