//! Paths as symbolic complete linear orders.
//!
//! A [`SymbolicPath`] is a finite chain of [`Block`]s. Each block is either an
//! explicit run of distinct vertices, an ascending progression of family
//! members followed by its limit (order type ω+1), or the mirror image
//! (limit first, then the members in descending order, order type 1+ω*).
//! Every such chain is a complete linear order, so all suprema and infima
//! asked for below exist.

mod arith;
mod ops;
mod path;
mod points;

pub use arith::progression_meet;
pub use ops::EdgeRun;
pub use path::{Block, SymbolicPath};
pub use points::{Completeness, PointRef, PointSet, Position, Tail};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A point of the ground set.
///
/// Equality is syntactic: `r[3]` is never equal to an atom spelled `r3`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexId {
    Atom(String),
    Member { family: String, index: u64 },
}

impl VertexId {
    pub fn atom(name: impl Into<String>) -> Self {
        VertexId::Atom(name.into())
    }

    pub fn member(family: impl Into<String>, index: u64) -> Self {
        VertexId::Member {
            family: family.into(),
            index,
        }
    }

    /// Family and index if this is a family member.
    pub fn as_member(&self) -> Option<(&str, u64)> {
        match self {
            VertexId::Member { family, index } => Some((family.as_str(), *index)),
            VertexId::Atom(_) => None,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Atom(name) => write!(f, "{name}"),
            VertexId::Member { family, index } => write!(f, "{family}[{index}]"),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for VertexId {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OrderError::BadVertex(s.to_string());
        match s.find('[') {
            None if is_identifier(s) => Ok(VertexId::atom(s)),
            None => Err(bad()),
            Some(open) => {
                let family = &s[..open];
                let rest = s[open + 1..].strip_suffix(']').ok_or_else(bad)?;
                if !is_identifier(family) || rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let index = rest.parse().map_err(|_| bad())?;
                Ok(VertexId::member(family, index))
            }
        }
    }
}

impl Serialize for VertexId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The affine map `i ↦ stride·i + offset` on the naturals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexMap {
    stride: u64,
    offset: u64,
}

impl IndexMap {
    pub fn new(stride: u64, offset: u64) -> Result<Self, OrderError> {
        if stride == 0 {
            return Err(OrderError::ZeroStride);
        }
        Ok(IndexMap { stride, offset })
    }

    /// `i ↦ i`.
    pub fn identity() -> Self {
        IndexMap { stride: 1, offset: 0 }
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn apply(&self, i: u64) -> u64 {
        self.stride * i + self.offset
    }

    /// The preimage of `value`, if it lies in the image.
    pub fn preimage(&self, value: u64) -> Option<u64> {
        if value < self.offset || !(value - self.offset).is_multiple_of(self.stride) {
            None
        } else {
            Some((value - self.offset) / self.stride)
        }
    }

    /// The map `i ↦ self(i + by)`: the progression with its first `by` terms dropped.
    pub fn shifted(&self, by: u64) -> Self {
        IndexMap {
            stride: self.stride,
            offset: self.apply(by),
        }
    }

    /// `i ↦ self(inner(i))`.
    pub fn compose(&self, inner: IndexMap) -> Self {
        IndexMap {
            stride: self.stride * inner.stride,
            offset: self.apply(inner.offset),
        }
    }

    /// True when both progressions contain the same values from some point on.
    pub fn eventually_equal(&self, other: &IndexMap) -> bool {
        self.stride == other.stride && self.offset % self.stride == other.offset % other.stride
    }
}

impl fmt::Display for IndexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i↦{}i+{}", self.stride, self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("stride must be positive")]
    ZeroStride,
    #[error("malformed vertex `{0}`")]
    BadVertex(String),
    #[error("a path needs at least one block")]
    NoBlocks,
    #[error("finite block {0} is empty")]
    EmptyFiniteBlock(usize),
    #[error("vertex {0} occurs at two positions")]
    RepeatedVertex(VertexId),
    #[error("invalid point reference: {field} out of range ({detail})")]
    InvalidPoint { field: &'static str, detail: String },
    #[error("empty subset has no supremum")]
    EmptySubset,
    #[error("inverted segment bounds")]
    InvertedSegment,
    #[error("paths do not connect (shared vertices: {})", format_vertices(.shared))]
    PathsDoNotConnect { shared: Vec<VertexId> },
    #[error("order type outside the block grammar: {0}")]
    NotRepresentable(String),
    #[error("invalid point set: {0}")]
    InvalidPointSet(String),
}

fn format_vertices(vs: &[VertexId]) -> String {
    if vs.is_empty() {
        return "none".into();
    }
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_equality_is_syntactic() {
        assert_ne!(VertexId::atom("r3"), VertexId::member("r", 3));
        assert_eq!(VertexId::member("r", 3), VertexId::member("r", 3));
        assert_ne!(VertexId::member("r", 3), VertexId::member("s", 3));
    }

    #[test]
    fn vertex_round_trips_through_text() {
        for v in [VertexId::atom("apex"), VertexId::member("r", 12)] {
            assert_eq!(v.to_string().parse::<VertexId>().unwrap(), v);
        }
        assert!("r[".parse::<VertexId>().is_err());
        assert!("3a".parse::<VertexId>().is_err());
        assert!("r[x]".parse::<VertexId>().is_err());
    }

    #[test]
    fn zero_stride_rejected() {
        assert_eq!(IndexMap::new(0, 4), Err(OrderError::ZeroStride));
    }

    #[test]
    fn preimage_inverts_apply() {
        let m = IndexMap::new(3, 2).unwrap();
        assert_eq!(m.preimage(m.apply(7)), Some(7));
        assert_eq!(m.preimage(1), None);
        assert_eq!(m.preimage(6), None);
        assert_eq!(m.shifted(2).apply(0), 8);
    }
}
