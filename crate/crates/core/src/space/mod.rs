//! Path spaces given by finite presentations: explicit generator paths plus
//! affine schemas, closed under segments, concatenation and, for undirected
//! spaces, inverses.

mod closure;
mod compat;
mod components;
mod delete;
mod directions;
mod schema;

pub use closure::{close, Membership, SpaceHandle, WitnessPiece};
pub use compat::{check_compatible, Violation};
pub use components::{chain_witness, components, Component, GroundSetDescription};
pub use delete::delete;
pub use directions::{in_directions, out_directions, Degree, Directions, Germ};
pub use schema::{IndexExpr, Instances, PathSchema, TemplateBlock, TemplateVertex};

use crate::order::{Block, OrderError, SymbolicPath, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("incompatible presentation: {0}")]
    Incompatible(Box<Violation>),
    #[error("{0} is not a point of the space")]
    NotInGroundSet(VertexId),
    #[error("outside the supported fragment: {0}")]
    Unsupported(String),
}

/// Where a path of the space comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Generator { index: usize, reversed: bool },
    Schema { index: usize, j: u64, reversed: bool },
}

impl Source {
    fn flipped(self) -> Source {
        match self {
            Source::Generator { index, reversed } => Source::Generator {
                index,
                reversed: !reversed,
            },
            Source::Schema { index, j, reversed } => Source::Schema {
                index,
                j,
                reversed: !reversed,
            },
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, rev) = match self {
            Source::Generator { index, reversed } => (format!("generator {index}"), *reversed),
            Source::Schema { index, j, reversed } => (format!("schema {index} at j={j}"), *reversed),
        };
        write!(f, "{name}{}", if rev { " (inverse)" } else { "" })
    }
}

/// A finite description of a path space.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Presentation {
    pub directed: bool,
    pub generators: Vec<SymbolicPath>,
    #[serde(default)]
    pub schemas: Vec<PathSchema>,
}

impl Presentation {
    pub fn new(directed: bool, generators: Vec<SymbolicPath>, schemas: Vec<PathSchema>) -> Self {
        Presentation {
            directed,
            generators,
            schemas,
        }
    }

    pub fn finite(directed: bool, generators: Vec<SymbolicPath>) -> Self {
        Self::new(directed, generators, vec![])
    }

    /// No schemas and no ω-blocks.
    pub fn is_finite(&self) -> bool {
        self.schemas.is_empty() && self.generators.iter().all(SymbolicPath::is_finite)
    }

    /// Every generator and schema inverted. Out-directions of the result are
    /// in-directions of `self`.
    pub fn reversed(&self) -> Presentation {
        Presentation {
            directed: self.directed,
            generators: self.generators.iter().map(SymbolicPath::reverse).collect(),
            schemas: self.schemas.iter().map(PathSchema::reversed).collect(),
        }
    }

    /// Largest explicit family index mentioned anywhere.
    pub fn index_bound(&self) -> u64 {
        let g = self.generators.iter().map(SymbolicPath::max_explicit_index).max().unwrap_or(0);
        let s = self.schemas.iter().map(PathSchema::max_constant).max().unwrap_or(0);
        g.max(s)
    }

    /// Least common multiple of every stride and coefficient.
    pub fn period(&self) -> u64 {
        let mut p = 1u64;
        for g in &self.generators {
            for b in g.blocks() {
                if let Some((_, m)) = b.progression() {
                    p = num_integer::lcm(p, m.stride()).min(crate::MAX_PERIOD);
                }
            }
        }
        for s in &self.schemas {
            p = num_integer::lcm(p, s.period()).min(crate::MAX_PERIOD);
        }
        p
    }

    /// Schema variable values up to which instances are inspected one by one.
    /// Beyond it everything repeats with the period.
    pub fn reach(&self) -> u64 {
        self.index_bound() + 2 * self.period() + 2
    }

    /// The path a source names.
    pub fn source_path(&self, source: Source) -> Result<SymbolicPath, SpaceError> {
        let (path, rev) = match source {
            Source::Generator { index, reversed } => (
                self.generators
                    .get(index)
                    .cloned()
                    .ok_or_else(|| SpaceError::Schema(format!("no generator {index}")))?,
                reversed,
            ),
            Source::Schema { index, j, reversed } => {
                let s = self
                    .schemas
                    .get(index)
                    .ok_or_else(|| SpaceError::Schema(format!("no schema {index}")))?;
                if s.domain().preimage(j).is_none() {
                    return Err(SpaceError::Schema(format!("j={j} is outside the domain of schema {index}")));
                }
                (s.instantiate(j)?, reversed)
            }
        };
        Ok(if rev { path.reverse() } else { path })
    }

    /// Generators and schema instances with variable at most `bound`, as given.
    pub fn groups(&self, bound: u64) -> Vec<(Source, SymbolicPath)> {
        let mut out: Vec<(Source, SymbolicPath)> = self
            .generators
            .iter()
            .enumerate()
            .map(|(index, g)| (Source::Generator { index, reversed: false }, g.clone()))
            .collect();
        for (index, s) in self.schemas.iter().enumerate() {
            for n in 0.. {
                let j = s.domain().apply(n);
                if j > bound {
                    break;
                }
                let path = s.instantiate(j).expect("validated schema");
                out.push((Source::Schema { index, j, reversed: false }, path));
            }
        }
        out
    }

    /// Sources whose path might contain `v`, each in every available orientation.
    ///
    /// Schema instances are listed exactly when `v` pins down the variable;
    /// otherwise one instance per residue class is listed.
    pub fn oriented_candidates(&self, v: &VertexId) -> Vec<(Source, SymbolicPath)> {
        self.oriented_candidates_all(&[v])
    }

    /// Sources whose path might contain every vertex of `vs`.
    pub fn oriented_candidates_all(&self, vs: &[&VertexId]) -> Vec<(Source, SymbolicPath)> {
        let mut out = Vec::new();
        for (index, g) in self.generators.iter().enumerate() {
            if vs.iter().all(|v| g.contains(v)) {
                out.push((Source::Generator { index, reversed: false }, g.clone()));
            }
        }
        for (index, s) in self.schemas.iter().enumerate() {
            let mut pinned: Option<BTreeSet<u64>> = None;
            for v in vs {
                if let Instances::Some(js) = s.instances_containing(v) {
                    let js: BTreeSet<u64> = js.into_iter().collect();
                    pinned = Some(match pinned {
                        None => js,
                        Some(prev) => prev.intersection(&js).copied().collect(),
                    });
                }
            }
            let js: Vec<u64> = match pinned {
                Some(js) => js.into_iter().collect(),
                None => (0..s.period()).map(|n| s.domain().apply(n)).collect(),
            };
            for j in js {
                let path = s.instantiate(j).expect("validated schema");
                if vs.iter().all(|v| path.contains(v)) {
                    out.push((Source::Schema { index, j, reversed: false }, path));
                }
            }
        }
        if !self.directed {
            let inverses: Vec<_> = out.iter().map(|(s, p)| (s.flipped(), p.reverse())).collect();
            out.extend(inverses);
        }
        out
    }

    /// Whether `v` lies on some generator or schema instance.
    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.generators.iter().any(|g| g.contains(v))
            || self.schemas.iter().any(|s| match s.instances_containing(v) {
                Instances::All => true,
                Instances::Some(js) => !js.is_empty(),
            })
    }

    /// Points of the space whose family index is at most `bound`.
    pub fn vertices_upto(&self, bound: u64) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for (_, p) in self.groups(bound) {
            out.extend(p.truncated_vertices(bound));
        }
        out
    }

    /// Every family named by a generator or schema.
    pub fn families(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for g in &self.generators {
            for b in g.blocks() {
                match b {
                    Block::Finite { vertices } => {
                        out.extend(vertices.iter().filter_map(|v| v.as_member()).map(|(f, _)| f.to_string()))
                    }
                    _ => {
                        out.insert(b.progression().unwrap().0.to_string());
                        if let Some((f, _)) = b.limit().unwrap().as_member() {
                            out.insert(f.to_string());
                        }
                    }
                }
            }
        }
        for s in &self.schemas {
            out.extend(s.families());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::IndexMap;

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    #[test]
    fn candidates_include_inverses_when_undirected() {
        let p = Presentation::finite(false, vec![SymbolicPath::finite([v("a"), v("b")]).unwrap()]);
        let c = p.oriented_candidates(&v("a"));
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].1.first(), v("b"));
        assert!(Presentation::finite(true, p.generators.clone()).oriented_candidates(&v("a")).len() == 1);
    }

    #[test]
    fn reach_covers_constants_and_period() {
        let ray = SymbolicPath::new(vec![Block::omega_up("r", IndexMap::new(3, 5).unwrap(), v("d"))]).unwrap();
        let p = Presentation::finite(true, vec![ray]);
        assert_eq!(p.index_bound(), 5);
        assert_eq!(p.period(), 3);
        assert_eq!(p.reach(), 5 + 6 + 2);
        assert!(p.contains_vertex(&v("r[8]")));
        assert!(!p.contains_vertex(&v("r[9]")));
    }
}
