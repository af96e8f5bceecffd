use super::path::Block;
use super::points::{PointRef, PointSet, Position, Tail};
use super::{progression_meet, OrderError, SymbolicPath, VertexId};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Longest explicit run a segment may expand an ω-block into.
const MAX_FINITE_RUN: u64 = 1 << 22;

/// Consecutive point pairs of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRun {
    /// `(p, q)` with `q` the immediate successor of `p`.
    Pair(PointRef, PointRef),
    /// Every pair of consecutive family members of an ω-block whose smaller
    /// progression parameter is at least `from`.
    Ray { block: usize, from: u64 },
}

/// A consecutive pair of `self` that is also consecutive in another path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharedPair {
    /// The earlier point of the pair in `self`.
    pub at: PointRef,
    /// Whether the other path traverses the pair in the same direction.
    pub same_direction: bool,
}

/// A final run of an ω-block's member pairs shared with another path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharedRay {
    pub block: usize,
    pub from: u64,
    pub same_direction: bool,
}

/// All nontrivial segments two paths have in common, as consecutive pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SharedEdges {
    pub pairs: Vec<SharedPair>,
    pub rays: Vec<SharedRay>,
}

impl SharedEdges {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() && self.rays.is_empty()
    }
}

fn partial_block(block: &Block, from: Position, to: Position) -> Result<Block, OrderError> {
    use Position::*;
    let run = |a: u64, b: u64| -> Result<(), OrderError> {
        if b - a > MAX_FINITE_RUN {
            Err(OrderError::NotRepresentable(format!(
                "segment would list {} explicit members",
                b - a + 1
            )))
        } else {
            Ok(())
        }
    };
    Ok(match (block, from, to) {
        (Block::Finite { vertices }, Finite(i), Finite(j)) => Block::finite(vertices[i..=j].iter().cloned()),
        (_, Limit, Limit) => Block::finite([block.limit().unwrap().clone()]),
        (Block::OmegaUp { family, map, limit }, Member(t), Limit) => {
            Block::omega_up(family.clone(), map.shifted(t), limit.clone())
        }
        (Block::OmegaUp { .. }, Member(s), Member(t)) => {
            run(s, t)?;
            Block::finite((s..=t).map(|k| block.member(k).unwrap()))
        }
        (Block::OmegaDown { limit, family, map }, Limit, Member(t)) => {
            Block::omega_down(limit.clone(), family.clone(), map.shifted(t))
        }
        (Block::OmegaDown { .. }, Member(s), Member(t)) => {
            run(t, s)?;
            Block::finite((t..=s).rev().map(|k| block.member(k).unwrap()))
        }
        _ => unreachable!("ordered positions within a block"),
    })
}

impl SymbolicPath {
    /// The closed interval `[x, y]` with the induced order.
    pub fn segment(&self, x: PointRef, y: PointRef) -> Result<SymbolicPath, OrderError> {
        if self.compare_points(x, y)? == Ordering::Greater {
            return Err(OrderError::InvertedSegment);
        }
        let mut blocks = Vec::with_capacity(y.block - x.block + 1);
        for b in x.block..=y.block {
            let block = &self.blocks()[b];
            let from = if b == x.block { x.position } else { block.first_position() };
            let to = if b == y.block { y.position } else { block.last_position() };
            blocks.push(partial_block(block, from, to)?);
        }
        Ok(SymbolicPath::from_valid(blocks))
    }

    /// Segment between two vertices of the path.
    pub fn segment_between(&self, x: &VertexId, y: &VertexId) -> Result<SymbolicPath, OrderError> {
        let missing = |v: &VertexId| OrderError::InvalidPoint {
            field: "vertex",
            detail: format!("{v} is not on the path"),
        };
        let px = self.locate(x).ok_or_else(|| missing(x))?;
        let py = self.locate(y).ok_or_else(|| missing(y))?;
        self.segment(px, py)
    }

    /// The inverse path.
    pub fn reverse(&self) -> SymbolicPath {
        SymbolicPath::from_valid(self.blocks().iter().rev().map(Block::reversed).collect())
    }

    /// The concatenation of `self` with a path it connects to.
    pub fn concatenate(&self, q: &SymbolicPath) -> Result<SymbolicPath, OrderError> {
        let shared = self.intersect(q);
        let last = self.last_ref();
        let connects = shared.tails.is_empty()
            && shared.explicit.len() == 1
            && shared.explicit.contains(&last)
            && q.first() == self.last();
        if !connects {
            let mut vs: Vec<VertexId> = shared.explicit.iter().map(|&p| self.vertex(p)).collect();
            for tail in &shared.tails {
                vs.push(self.vertex(PointRef::new(tail.block, Position::Member(tail.progression.offset()))));
            }
            return Err(OrderError::PathsDoNotConnect { shared: vs });
        }
        let mut left: Vec<Block> = self.blocks().to_vec();
        let mut right: Vec<Block> = q.blocks().to_vec();
        match (left.last_mut().unwrap(), right.first_mut().unwrap()) {
            (Block::OmegaUp { limit, .. }, Block::OmegaDown { .. }) => {
                return Err(OrderError::NotRepresentable(format!(
                    "ascending and descending progressions meeting at limit {limit}"
                )))
            }
            (_, Block::Finite { vertices }) => {
                vertices.remove(0);
            }
            (_, Block::OmegaUp { map, .. }) => *map = map.shifted(1),
            (Block::Finite { vertices }, Block::OmegaDown { .. }) => {
                vertices.pop();
            }
            (Block::OmegaDown { map, .. }, Block::OmegaDown { .. }) => *map = map.shifted(1),
        }
        left.extend(right);
        Ok(SymbolicPath::from_valid(left))
    }

    /// Points of `self` whose vertex also lies on `q`.
    pub fn intersect(&self, q: &SymbolicPath) -> PointSet {
        let mut out = PointSet::new();
        for (bi, block) in self.blocks().iter().enumerate() {
            match block {
                Block::Finite { vertices } => {
                    for (i, v) in vertices.iter().enumerate() {
                        if q.contains(v) {
                            out.insert(PointRef::new(bi, Position::Finite(i)));
                        }
                    }
                }
                _ => {
                    let (family, map) = block.progression().unwrap();
                    if q.contains(block.limit().unwrap()) {
                        out.insert(PointRef::new(bi, Position::Limit));
                    }
                    let hit = |out: &mut PointSet, w: &VertexId| {
                        if let Some(pos @ Position::Member(_)) = block.locate(w) {
                            out.insert(PointRef::new(bi, pos));
                        }
                    };
                    for qb in q.blocks() {
                        match qb {
                            Block::Finite { vertices } => vertices.iter().for_each(|w| hit(&mut out, w)),
                            _ => {
                                hit(&mut out, qb.limit().unwrap());
                                let (g, m2) = qb.progression().unwrap();
                                if g == family {
                                    if let Some(meet) = progression_meet(map, m2) {
                                        out.tails.insert(Tail {
                                            block: bi,
                                            progression: meet,
                                            include_limit: false,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// All consecutive pairs, as explicit pairs plus ω-block member runs.
    pub fn edges(&self) -> Vec<EdgeRun> {
        let mut out = Vec::new();
        let blocks = self.blocks();
        for (b, block) in blocks.iter().enumerate() {
            match block {
                Block::Finite { vertices } => {
                    for i in 0..vertices.len().saturating_sub(1) {
                        out.push(EdgeRun::Pair(
                            PointRef::new(b, Position::Finite(i)),
                            PointRef::new(b, Position::Finite(i + 1)),
                        ));
                    }
                }
                _ => out.push(EdgeRun::Ray { block: b, from: 0 }),
            }
            if b + 1 < blocks.len() {
                out.push(EdgeRun::Pair(
                    PointRef::new(b, block.last_position()),
                    PointRef::new(b + 1, blocks[b + 1].first_position()),
                ));
            }
        }
        out
    }

    /// Whether `v` immediately follows `u`.
    pub fn consecutive(&self, u: &VertexId, v: &VertexId) -> bool {
        match (self.locate(u), self.locate(v)) {
            (Some(pu), Some(pv)) => self.successor(pu) == Some(pv),
            _ => false,
        }
    }

    /// The explicit consecutive vertex pairs (ω-block member runs excluded).
    pub fn explicit_pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.edges()
            .into_iter()
            .filter_map(|e| match e {
                EdgeRun::Pair(p, q) => Some((self.vertex(p), self.vertex(q))),
                EdgeRun::Ray { .. } => None,
            })
            .collect()
    }

    /// Consecutive pairs of `self` that are consecutive in `q` in either direction.
    ///
    /// Two paths share a nontrivial segment (up to inversion) exactly when this
    /// is nonempty.
    pub fn shared_edges(&self, q: &SymbolicPath) -> SharedEdges {
        let mut pairs: BTreeMap<PointRef, bool> = BTreeMap::new();
        for (u, v) in self.explicit_pairs() {
            if q.consecutive(&u, &v) || q.consecutive(&v, &u) {
                pairs.entry(self.locate(&u).unwrap()).or_insert(q.consecutive(&u, &v));
            }
        }
        for (u, v) in q.explicit_pairs() {
            if self.consecutive(&u, &v) {
                pairs.entry(self.locate(&u).unwrap()).or_insert(true);
            } else if self.consecutive(&v, &u) {
                pairs.entry(self.locate(&v).unwrap()).or_insert(false);
            }
        }
        // rays against rays
        let mut rays = Vec::new();
        for (b, block) in self.blocks().iter().enumerate() {
            let Some((family, map)) = block.progression() else { continue };
            for qb in q.blocks() {
                let Some((g, m2)) = qb.progression() else { continue };
                if g != family || !map.eventually_equal(&m2) {
                    continue;
                }
                let from = if m2.offset() > map.offset() {
                    (m2.offset() - map.offset()).div_ceil(map.stride())
                } else {
                    0
                };
                rays.push(SharedRay {
                    block: b,
                    from,
                    same_direction: block.is_ascending() == qb.is_ascending(),
                });
            }
        }
        SharedEdges {
            pairs: pairs
                .into_iter()
                .map(|(at, same_direction)| SharedPair { at, same_direction })
                .collect(),
            rays,
        }
    }

    /// Some consecutive pair shared with `q` (either direction), if any.
    pub fn shared_pair_witness(&self, q: &SymbolicPath) -> Option<(VertexId, VertexId)> {
        let shared = self.shared_edges(q);
        if let Some(p) = shared.pairs.first() {
            let next = self.successor(p.at).expect("pair has a successor");
            return Some((self.vertex(p.at), self.vertex(next)));
        }
        shared.rays.first().map(|r| {
            let a = PointRef::new(r.block, Position::Member(r.from));
            let blk = &self.blocks()[r.block];
            let b = PointRef::new(r.block, Position::Member(r.from + 1));
            if blk.is_ascending() {
                (self.vertex(a), self.vertex(b))
            } else {
                (self.vertex(b), self.vertex(a))
            }
        })
    }
}
