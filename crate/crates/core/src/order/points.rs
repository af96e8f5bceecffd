use super::path::Block;
use super::{IndexMap, OrderError, SymbolicPath, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Where a point sits inside its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "at", content = "n", rename_all = "snake_case")]
pub enum Position {
    /// Offset into a finite block.
    Finite(usize),
    /// The `t`-th member of an ω-block's progression.
    Member(u64),
    /// The limit point of an ω-block.
    Limit,
}

/// A point of a particular [`SymbolicPath`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointRef {
    pub block: usize,
    pub position: Position,
}

impl PointRef {
    pub fn new(block: usize, position: Position) -> Self {
        PointRef { block, position }
    }
}

/// The members `t ∈ progression(ℕ)` of an ω-block, optionally with its limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tail {
    pub block: usize,
    pub progression: IndexMap,
    pub include_limit: bool,
}

/// A finitely described subset of one path's points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    pub explicit: BTreeSet<PointRef>,
    pub tails: BTreeSet<Tail>,
}

/// Outcome of a completeness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    /// `witness` is a nonempty subset whose supremum or infimum escapes the set.
    Incomplete { witness: PointSet },
}

impl PointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_refs<I: IntoIterator<Item = PointRef>>(refs: I) -> Self {
        PointSet {
            explicit: refs.into_iter().collect(),
            tails: BTreeSet::new(),
        }
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tails.insert(tail);
        self
    }

    pub fn insert(&mut self, p: PointRef) {
        self.explicit.insert(p);
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.tails.is_empty()
    }

    /// Every point of `path`.
    pub fn whole(path: &SymbolicPath) -> Self {
        let mut set = PointSet::new();
        for (b, block) in path.blocks().iter().enumerate() {
            match block {
                Block::Finite { vertices } => {
                    set.explicit
                        .extend((0..vertices.len()).map(|i| PointRef::new(b, Position::Finite(i))));
                }
                _ => {
                    set.tails.insert(Tail {
                        block: b,
                        progression: IndexMap::identity(),
                        include_limit: true,
                    });
                }
            }
        }
        set
    }

    pub fn contains(&self, p: PointRef) -> bool {
        if self.explicit.contains(&p) {
            return true;
        }
        self.tails.iter().any(|tail| {
            tail.block == p.block
                && match p.position {
                    Position::Member(t) => tail.progression.preimage(t).is_some(),
                    Position::Limit => tail.include_limit,
                    Position::Finite(_) => false,
                }
        })
    }

    /// Checks that every reference is a point of `path`.
    pub fn validate(&self, path: &SymbolicPath) -> Result<(), OrderError> {
        for &p in &self.explicit {
            path.check_ref(p)?;
        }
        for tail in &self.tails {
            match path.blocks().get(tail.block) {
                Some(b) if b.progression().is_some() => {}
                _ => {
                    return Err(OrderError::InvalidPointSet(format!(
                        "tail refers to block {} which is not an ω-block",
                        tail.block
                    )))
                }
            }
        }
        Ok(())
    }

    /// Vertices of the set whose family index is at most `bound`.
    pub fn truncated_vertices(&self, path: &SymbolicPath, bound: u64) -> BTreeSet<VertexId> {
        path.truncated_points(bound)
            .into_iter()
            .filter(|&p| self.contains(p))
            .map(|p| path.vertex(p))
            .collect()
    }

    /// True if the set has infinitely many points.
    pub fn is_infinite(&self) -> bool {
        !self.tails.is_empty()
    }

    fn blocks_used(&self) -> impl Iterator<Item = usize> + '_ {
        self.explicit
            .iter()
            .map(|p| p.block)
            .chain(self.tails.iter().map(|t| t.block))
    }
}

impl SymbolicPath {
    /// Least upper bound of a nonempty subset.
    pub fn sup(&self, zs: &PointSet) -> Result<PointRef, OrderError> {
        zs.validate(self)?;
        let b = zs.blocks_used().max().ok_or(OrderError::EmptySubset)?;
        let explicit = zs.explicit.iter().filter(|p| p.block == b).map(|p| p.position);
        let tails: Vec<&Tail> = zs.tails.iter().filter(|t| t.block == b).collect();
        let pos = match &self.blocks()[b] {
            Block::Finite { .. } => explicit.max().expect("finite block point"),
            Block::OmegaUp { .. } => {
                if !tails.is_empty() {
                    Position::Limit
                } else {
                    explicit
                        .max_by(|x, y| self.blocks()[b].compare_positions(*x, *y))
                        .expect("point in block")
                }
            }
            Block::OmegaDown { .. } => {
                let smallest_member = explicit
                    .filter_map(|p| match p {
                        Position::Member(t) => Some(t),
                        _ => None,
                    })
                    .chain(tails.iter().map(|t| t.progression.offset()))
                    .min();
                smallest_member.map_or(Position::Limit, Position::Member)
            }
        };
        Ok(PointRef::new(b, pos))
    }

    /// Greatest lower bound of a nonempty subset.
    pub fn inf(&self, zs: &PointSet) -> Result<PointRef, OrderError> {
        zs.validate(self)?;
        let b = zs.blocks_used().min().ok_or(OrderError::EmptySubset)?;
        let explicit = zs.explicit.iter().filter(|p| p.block == b).map(|p| p.position);
        let tails: Vec<&Tail> = zs.tails.iter().filter(|t| t.block == b).collect();
        let pos = match &self.blocks()[b] {
            Block::Finite { .. } => explicit.min().expect("finite block point"),
            Block::OmegaUp { .. } => {
                let smallest_member = explicit
                    .filter_map(|p| match p {
                        Position::Member(t) => Some(t),
                        _ => None,
                    })
                    .chain(tails.iter().map(|t| t.progression.offset()))
                    .min();
                smallest_member.map_or(Position::Limit, Position::Member)
            }
            Block::OmegaDown { .. } => {
                if !tails.is_empty() {
                    Position::Limit
                } else {
                    explicit
                        .min_by(|x, y| self.blocks()[b].compare_positions(*x, *y))
                        .expect("point in block")
                }
            }
        };
        Ok(PointRef::new(b, pos))
    }

    /// Whether every nonempty subset of `ys` has its supremum and infimum in `ys`.
    ///
    /// Finite parts are always complete; an infinite tail needs its block's limit.
    pub fn is_complete_in(&self, ys: &PointSet) -> Result<Completeness, OrderError> {
        ys.validate(self)?;
        for tail in &ys.tails {
            let limit = PointRef::new(tail.block, Position::Limit);
            if !ys.contains(limit) {
                return Ok(Completeness::Incomplete {
                    witness: PointSet::new().with_tail(Tail {
                        include_limit: false,
                        ..*tail
                    }),
                });
            }
        }
        Ok(Completeness::Complete)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn ray() -> SymbolicPath {
        SymbolicPath::new(vec![Block::omega_up("r", IndexMap::identity(), v("d"))]).unwrap()
    }

    #[test]
    fn sup_of_finite_set_is_its_max() {
        let p = SymbolicPath::finite([v("a"), v("b"), v("c")]).unwrap();
        let zs = PointSet::from_refs([p.locate(&v("a")).unwrap(), p.locate(&v("b")).unwrap()]);
        assert_eq!(p.vertex(p.sup(&zs).unwrap()), v("b"));
        assert_eq!(p.vertex(p.inf(&zs).unwrap()), v("a"));
    }

    #[test]
    fn sup_of_cofinal_tail_is_the_limit() {
        let p = ray();
        let zs = PointSet::new().with_tail(Tail {
            block: 0,
            progression: IndexMap::new(2, 0).unwrap(),
            include_limit: false,
        });
        assert_eq!(p.vertex(p.sup(&zs).unwrap()), v("d"));
        assert_eq!(p.vertex(p.inf(&zs).unwrap()), v("r[0]"));
    }

    #[test]
    fn empty_subset_has_no_supremum() {
        assert_eq!(ray().sup(&PointSet::new()), Err(OrderError::EmptySubset));
        assert_eq!(
            OrderError::EmptySubset.to_string(),
            "empty subset has no supremum"
        );
    }

    #[test]
    fn descending_tail_has_limit_as_infimum() {
        let p = ray().reverse();
        let zs = PointSet::new().with_tail(Tail {
            block: 0,
            progression: IndexMap::new(1, 3).unwrap(),
            include_limit: false,
        });
        assert_eq!(p.vertex(p.inf(&zs).unwrap()), v("d"));
        assert_eq!(p.vertex(p.sup(&zs).unwrap()), v("r[3]"));
    }

    #[test]
    fn completeness_examples() {
        let p = ray();
        assert_eq!(p.is_complete_in(&PointSet::whole(&p)), Ok(Completeness::Complete));
        let tail = Tail {
            block: 0,
            progression: IndexMap::identity(),
            include_limit: false,
        };
        let ys = PointSet::new().with_tail(tail);
        assert_eq!(
            p.is_complete_in(&ys),
            Ok(Completeness::Incomplete { witness: ys.clone() })
        );
        let finite = PointSet::from_refs([PointRef::new(0, Position::Member(4)), PointRef::new(0, Position::Member(9))]);
        assert_eq!(p.is_complete_in(&finite), Ok(Completeness::Complete));
    }

    #[test]
    fn tails_must_live_in_omega_blocks() {
        let p = SymbolicPath::finite([v("a")]).unwrap();
        let zs = PointSet::new().with_tail(Tail {
            block: 0,
            progression: IndexMap::identity(),
            include_limit: true,
        });
        assert!(matches!(p.sup(&zs), Err(OrderError::InvalidPointSet(_))));
    }
}
