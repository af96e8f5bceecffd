//! Path spaces: sets of complete linear orders closed under segments,
//! concatenations and (optionally) inverses, with a Menger solver built on
//! augmenting alternating trails.

pub mod order;
pub mod space;
pub mod walks;
pub mod menger;
pub mod graph;
pub mod document;
pub mod report;
pub mod sample;

/// Cap on the least common multiple of strides used for residue reasoning.
pub const MAX_PERIOD: u64 = 1 << 12;
