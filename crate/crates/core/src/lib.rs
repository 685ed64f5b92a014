//! Limit sets and tessellations of Kleinian groups.
//!
//! * [`moebius`]: linear fractional maps, circle inversions and circle images.
//! * [`groups`]: generator sets, words and cancellation rules.
//! * [`enumerate`]: the word-tree and integer-index word enumerators.
//! * [`render`]: orbit evaluation and rasterization to PPM.
//! * [`bench`]: instrumented comparison of the enumerators.
//! * [`config`]: the text group-definition format and built-in presets.

pub mod bench;
pub mod config;
pub mod enumerate;
pub mod groups;
pub mod moebius;
pub mod render;

pub use enumerate::{EnumerationMode, EnumeratorConfig, WordSink};
pub use groups::{CancellationRules, Generator, GeneratorSet, Word};
pub use moebius::{Circle, Complex, MoebiusMap, Point};
