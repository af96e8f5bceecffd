use super::points::{PointRef, Position};
use super::{progression_meet, IndexMap, OrderError, VertexId};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

/// One maximal piece of a path's order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Block {
    /// Explicit vertices in ascending order.
    Finite { vertices: Vec<VertexId> },
    /// `family(map(0)) < family(map(1)) < … < limit`.
    OmegaUp {
        family: String,
        map: IndexMap,
        limit: VertexId,
    },
    /// `limit < … < family(map(1)) < family(map(0))`.
    OmegaDown {
        limit: VertexId,
        family: String,
        map: IndexMap,
    },
}

impl Block {
    pub fn finite<I: IntoIterator<Item = VertexId>>(vertices: I) -> Self {
        Block::Finite {
            vertices: vertices.into_iter().collect(),
        }
    }

    pub fn omega_up(family: impl Into<String>, map: IndexMap, limit: VertexId) -> Self {
        Block::OmegaUp {
            family: family.into(),
            map,
            limit,
        }
    }

    pub fn omega_down(limit: VertexId, family: impl Into<String>, map: IndexMap) -> Self {
        Block::OmegaDown {
            limit,
            family: family.into(),
            map,
        }
    }

    /// Family and progression of an ω-block.
    pub fn progression(&self) -> Option<(&str, IndexMap)> {
        match self {
            Block::Finite { .. } => None,
            Block::OmegaUp { family, map, .. } | Block::OmegaDown { family, map, .. } => {
                Some((family.as_str(), *map))
            }
        }
    }

    pub fn limit(&self) -> Option<&VertexId> {
        match self {
            Block::Finite { .. } => None,
            Block::OmegaUp { limit, .. } | Block::OmegaDown { limit, .. } => Some(limit),
        }
    }

    pub fn is_ascending(&self) -> bool {
        matches!(self, Block::OmegaUp { .. })
    }

    /// The `t`-th member of an ω-block's progression.
    pub fn member(&self, t: u64) -> Option<VertexId> {
        self.progression()
            .map(|(family, map)| VertexId::member(family, map.apply(t)))
    }

    pub(crate) fn vertex_at(&self, position: Position) -> Option<VertexId> {
        match (self, position) {
            (Block::Finite { vertices }, Position::Finite(i)) => vertices.get(i).cloned(),
            (Block::Finite { .. }, _) => None,
            (_, Position::Member(t)) => self.member(t),
            (_, Position::Limit) => self.limit().cloned(),
            (_, Position::Finite(_)) => None,
        }
    }

    pub(crate) fn locate(&self, v: &VertexId) -> Option<Position> {
        match self {
            Block::Finite { vertices } => vertices.iter().position(|w| w == v).map(Position::Finite),
            Block::OmegaUp { family, map, limit } | Block::OmegaDown { limit, family, map, .. } => {
                if v == limit {
                    return Some(Position::Limit);
                }
                let (f, index) = v.as_member()?;
                if f != family {
                    return None;
                }
                map.preimage(index).map(Position::Member)
            }
        }
    }

    pub(crate) fn first_position(&self) -> Position {
        match self {
            Block::Finite { .. } => Position::Finite(0),
            Block::OmegaUp { .. } => Position::Member(0),
            Block::OmegaDown { .. } => Position::Limit,
        }
    }

    pub(crate) fn last_position(&self) -> Position {
        match self {
            Block::Finite { vertices } => Position::Finite(vertices.len() - 1),
            Block::OmegaUp { .. } => Position::Limit,
            Block::OmegaDown { .. } => Position::Member(0),
        }
    }

    /// Order of two positions inside this block.
    pub(crate) fn compare_positions(&self, a: Position, b: Position) -> Ordering {
        use Position::*;
        match self {
            Block::Finite { .. } => match (a, b) {
                (Finite(i), Finite(j)) => i.cmp(&j),
                _ => unreachable!("validated positions"),
            },
            Block::OmegaUp { .. } => match (a, b) {
                (Member(s), Member(t)) => s.cmp(&t),
                (Member(_), Limit) => Ordering::Less,
                (Limit, Member(_)) => Ordering::Greater,
                (Limit, Limit) => Ordering::Equal,
                _ => unreachable!("validated positions"),
            },
            Block::OmegaDown { .. } => match (a, b) {
                (Member(s), Member(t)) => t.cmp(&s),
                (Member(_), Limit) => Ordering::Greater,
                (Limit, Member(_)) => Ordering::Less,
                (Limit, Limit) => Ordering::Equal,
                _ => unreachable!("validated positions"),
            },
        }
    }

    pub(crate) fn reversed(&self) -> Block {
        match self {
            Block::Finite { vertices } => Block::finite(vertices.iter().rev().cloned()),
            Block::OmegaUp { family, map, limit } => Block::omega_down(limit.clone(), family.clone(), *map),
            Block::OmegaDown { limit, family, map } => Block::omega_up(family.clone(), *map, limit.clone()),
        }
    }
}

/// A complete linear order presented as a finite chain of blocks.
///
/// Values are kept in a canonical form (adjacent finite runs merged, ω-blocks
/// extended over any explicit members that continue their progression), so
/// structural equality is equality of ordered point sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPath", into = "RawPath")]
pub struct SymbolicPath {
    blocks: Vec<Block>,
}

#[derive(Serialize, Deserialize)]
struct RawPath {
    blocks: Vec<Block>,
}

impl TryFrom<RawPath> for SymbolicPath {
    type Error = OrderError;
    fn try_from(raw: RawPath) -> Result<Self, OrderError> {
        SymbolicPath::new(raw.blocks)
    }
}

impl From<SymbolicPath> for RawPath {
    fn from(p: SymbolicPath) -> Self {
        RawPath { blocks: p.blocks }
    }
}

impl SymbolicPath {
    pub fn new(blocks: Vec<Block>) -> Result<Self, OrderError> {
        if blocks.is_empty() {
            return Err(OrderError::NoBlocks);
        }
        for (i, b) in blocks.iter().enumerate() {
            if let Block::Finite { vertices } = b {
                if vertices.is_empty() {
                    return Err(OrderError::EmptyFiniteBlock(i));
                }
            }
        }
        validate_distinct(&blocks)?;
        Ok(SymbolicPath {
            blocks: canonicalize(blocks),
        })
    }

    /// A path through explicit vertices.
    pub fn finite<I: IntoIterator<Item = VertexId>>(vertices: I) -> Result<Self, OrderError> {
        Self::new(vec![Block::finite(vertices)])
    }

    /// The trivial path on one point.
    pub fn point(v: VertexId) -> Self {
        SymbolicPath {
            blocks: vec![Block::finite([v])],
        }
    }

    /// Builds from blocks already known to be valid, canonicalizing.
    pub(crate) fn from_valid(blocks: Vec<Block>) -> Self {
        let blocks: Vec<Block> = blocks
            .into_iter()
            .filter(|b| !matches!(b, Block::Finite { vertices } if vertices.is_empty()))
            .collect();
        debug_assert!(!blocks.is_empty());
        debug_assert!(validate_distinct(&blocks).is_ok());
        SymbolicPath {
            blocks: canonicalize(blocks),
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// The explicit vertex list if every block is finite.
    pub fn finite_vertices(&self) -> Option<&[VertexId]> {
        match self.blocks.as_slice() {
            [Block::Finite { vertices }] => Some(vertices),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.finite_vertices().is_some()
    }

    /// True for a single-point path.
    pub fn is_trivial(&self) -> bool {
        matches!(self.finite_vertices(), Some(vs) if vs.len() == 1)
    }

    pub fn first_ref(&self) -> PointRef {
        PointRef::new(0, self.blocks[0].first_position())
    }

    pub fn last_ref(&self) -> PointRef {
        let b = self.blocks.len() - 1;
        PointRef::new(b, self.blocks[b].last_position())
    }

    pub fn first(&self) -> VertexId {
        self.vertex(self.first_ref())
    }

    pub fn last(&self) -> VertexId {
        self.vertex(self.last_ref())
    }

    pub(crate) fn vertex(&self, p: PointRef) -> VertexId {
        self.blocks[p.block]
            .vertex_at(p.position)
            .expect("validated point reference")
    }

    pub fn check_ref(&self, p: PointRef) -> Result<(), OrderError> {
        let block = self.blocks.get(p.block).ok_or_else(|| OrderError::InvalidPoint {
            field: "block_index",
            detail: format!("{} ≥ {}", p.block, self.blocks.len()),
        })?;
        match (block, p.position) {
            (Block::Finite { vertices }, Position::Finite(i)) if i < vertices.len() => Ok(()),
            (Block::Finite { vertices }, Position::Finite(i)) => Err(OrderError::InvalidPoint {
                field: "position",
                detail: format!("finite offset {i} ≥ {}", vertices.len()),
            }),
            (Block::Finite { .. }, _) => Err(OrderError::InvalidPoint {
                field: "position",
                detail: format!("{:?} in a finite block", p.position),
            }),
            (_, Position::Finite(_)) => Err(OrderError::InvalidPoint {
                field: "position",
                detail: "finite offset in an ω-block".into(),
            }),
            _ => Ok(()),
        }
    }

    /// The vertex at a point reference.
    pub fn vertex_at(&self, p: PointRef) -> Result<VertexId, OrderError> {
        self.check_ref(p)?;
        Ok(self.vertex(p))
    }

    /// Position of a vertex in this path.
    pub fn locate(&self, v: &VertexId) -> Option<PointRef> {
        self.blocks
            .iter()
            .enumerate()
            .find_map(|(i, b)| b.locate(v).map(|pos| PointRef::new(i, pos)))
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.locate(v).is_some()
    }

    /// The linear order on points.
    pub fn compare_points(&self, p: PointRef, q: PointRef) -> Result<Ordering, OrderError> {
        self.check_ref(p)?;
        self.check_ref(q)?;
        Ok(self.cmp_unchecked(p, q))
    }

    pub(crate) fn cmp_unchecked(&self, p: PointRef, q: PointRef) -> Ordering {
        p.block
            .cmp(&q.block)
            .then_with(|| self.blocks[p.block].compare_positions(p.position, q.position))
    }

    fn block_first(&self, b: usize) -> Option<PointRef> {
        self.blocks
            .get(b)
            .map(|blk| PointRef::new(b, blk.first_position()))
    }

    fn block_last(&self, b: usize) -> PointRef {
        PointRef::new(b, self.blocks[b].last_position())
    }

    /// The immediate successor, if the point has one.
    pub fn successor(&self, p: PointRef) -> Option<PointRef> {
        let next_block = || self.block_first(p.block + 1);
        match (&self.blocks[p.block], p.position) {
            (Block::Finite { vertices }, Position::Finite(i)) => {
                if i + 1 < vertices.len() {
                    Some(PointRef::new(p.block, Position::Finite(i + 1)))
                } else {
                    next_block()
                }
            }
            (Block::OmegaUp { .. }, Position::Member(t)) => Some(PointRef::new(p.block, Position::Member(t + 1))),
            (Block::OmegaUp { .. }, Position::Limit) => next_block(),
            (Block::OmegaDown { .. }, Position::Limit) => None,
            (Block::OmegaDown { .. }, Position::Member(0)) => next_block(),
            (Block::OmegaDown { .. }, Position::Member(t)) => Some(PointRef::new(p.block, Position::Member(t - 1))),
            _ => unreachable!("validated point reference"),
        }
    }

    /// The immediate predecessor, if the point has one.
    pub fn predecessor(&self, p: PointRef) -> Option<PointRef> {
        let prev_block = || (p.block > 0).then(|| self.block_last(p.block - 1));
        match (&self.blocks[p.block], p.position) {
            (Block::Finite { .. }, Position::Finite(0)) => prev_block(),
            (Block::Finite { .. }, Position::Finite(i)) => Some(PointRef::new(p.block, Position::Finite(i - 1))),
            (Block::OmegaUp { .. }, Position::Member(0)) => prev_block(),
            (Block::OmegaUp { .. }, Position::Member(t)) => Some(PointRef::new(p.block, Position::Member(t - 1))),
            (Block::OmegaUp { .. }, Position::Limit) => None,
            (Block::OmegaDown { .. }, Position::Limit) => prev_block(),
            (Block::OmegaDown { .. }, Position::Member(t)) => Some(PointRef::new(p.block, Position::Member(t + 1))),
            _ => unreachable!("validated point reference"),
        }
    }

    /// Points in order, keeping only family members whose index is at most `bound`.
    pub fn truncated_points(&self, bound: u64) -> Vec<PointRef> {
        let mut out = Vec::new();
        for (b, block) in self.blocks.iter().enumerate() {
            match block {
                Block::Finite { vertices } => {
                    out.extend((0..vertices.len()).map(|i| PointRef::new(b, Position::Finite(i))))
                }
                Block::OmegaUp { map, .. } => {
                    out.extend(members_upto(*map, bound).map(|t| PointRef::new(b, Position::Member(t))));
                    out.push(PointRef::new(b, Position::Limit));
                }
                Block::OmegaDown { map, .. } => {
                    out.push(PointRef::new(b, Position::Limit));
                    let ts: Vec<u64> = members_upto(*map, bound).collect();
                    out.extend(ts.into_iter().rev().map(|t| PointRef::new(b, Position::Member(t))));
                }
            }
        }
        out
    }

    /// Vertices of [`truncated_points`](Self::truncated_points).
    pub fn truncated_vertices(&self, bound: u64) -> Vec<VertexId> {
        self.truncated_points(bound)
            .into_iter()
            .map(|p| self.vertex(p))
            .collect()
    }

    /// Largest explicit index mentioned anywhere (members, limits, progression offsets).
    pub fn max_explicit_index(&self) -> u64 {
        let index = |v: &VertexId| v.as_member().map_or(0, |(_, i)| i);
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Finite { vertices } => vertices.iter().map(index).max().unwrap_or(0),
                Block::OmegaUp { map, limit, .. } | Block::OmegaDown { map, limit, .. } => {
                    index(limit).max(map.offset())
                }
            })
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn members_upto(map: IndexMap, bound: u64) -> impl Iterator<Item = u64> {
    (0u64..)
        .take_while(move |&t| map.apply(t) <= bound)
}

impl fmt::Display for SymbolicPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for b in &self.blocks {
            if !first {
                write!(f, " · ")?;
            }
            first = false;
            match b {
                Block::Finite { vertices } => {
                    let vs: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
                    write!(f, "[{}]", vs.join(","))?
                }
                Block::OmegaUp { family, map, limit } => write!(f, "↑{family}({map})→{limit}")?,
                Block::OmegaDown { limit, family, map } => write!(f, "{limit}←↓{family}({map})")?,
            }
        }
        Ok(())
    }
}

fn in_block_progression(v: &VertexId, family: &str, map: IndexMap) -> bool {
    matches!(v.as_member(), Some((f, i)) if f == family && map.preimage(i).is_some())
}

fn validate_distinct(blocks: &[Block]) -> Result<(), OrderError> {
    let mut seen: HashSet<&VertexId> = HashSet::new();
    let mut singles: Vec<&VertexId> = Vec::new();
    for b in blocks {
        match b {
            Block::Finite { vertices } => singles.extend(vertices.iter()),
            Block::OmegaUp { limit, .. } | Block::OmegaDown { limit, .. } => singles.push(limit),
        }
    }
    for v in &singles {
        if !seen.insert(v) {
            return Err(OrderError::RepeatedVertex((*v).clone()));
        }
    }
    let omegas: Vec<(&str, IndexMap)> = blocks.iter().filter_map(Block::progression).collect();
    for &(family, map) in &omegas {
        if let Some(v) = singles.iter().find(|v| in_block_progression(v, family, map)) {
            return Err(OrderError::RepeatedVertex((*v).clone()));
        }
    }
    for (i, &(f1, m1)) in omegas.iter().enumerate() {
        for &(f2, m2) in &omegas[i + 1..] {
            if f1 == f2 {
                if let Some(meet) = progression_meet(m1, m2) {
                    return Err(OrderError::RepeatedVertex(VertexId::member(
                        f1,
                        m1.apply(meet.offset()),
                    )));
                }
            }
        }
    }
    Ok(())
}

fn canonicalize(mut blocks: Vec<Block>) -> Vec<Block> {
    loop {
        let mut changed = false;
        blocks.retain(|b| !matches!(b, Block::Finite { vertices } if vertices.is_empty()));
        let mut i = 0;
        while i + 1 < blocks.len() {
            let (left, right) = blocks.split_at_mut(i + 1);
            match (&mut left[i], &mut right[0]) {
                (Block::Finite { vertices: a }, Block::Finite { vertices: b }) => {
                    a.append(b);
                    changed = true;
                }
                (Block::OmegaDown { family, map, .. }, Block::Finite { vertices }) => {
                    if map.offset() >= map.stride()
                        && vertices[0] == VertexId::member(family.as_str(), map.offset() - map.stride())
                    {
                        vertices.remove(0);
                        *map = IndexMap::new(map.stride(), map.offset() - map.stride()).unwrap();
                        changed = true;
                    }
                }
                (Block::Finite { vertices }, Block::OmegaUp { family, map, .. })
                    if map.offset() >= map.stride()
                        && vertices.last() == Some(&VertexId::member(family.as_str(), map.offset() - map.stride()))
                    => {
                        vertices.pop();
                        *map = IndexMap::new(map.stride(), map.offset() - map.stride()).unwrap();
                        changed = true;
                    }
                _ => {}
            }
            i += 1;
        }
        if !changed {
            blocks.retain(|b| !matches!(b, Block::Finite { vertices } if vertices.is_empty()));
            return blocks;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn ray(family: &str, stride: u64, offset: u64, limit: &str) -> Block {
        Block::omega_up(family, IndexMap::new(stride, offset).unwrap(), v(limit))
    }

    #[test]
    fn rejects_repeated_vertices() {
        assert!(matches!(
            SymbolicPath::finite([v("a"), v("b"), v("a")]),
            Err(OrderError::RepeatedVertex(_))
        ));
        // r[4] is already in the progression 2ℕ.
        assert!(SymbolicPath::new(vec![Block::finite([v("r[4]")]), ray("r", 2, 0, "d")]).is_err());
        // limit inside its own family progression
        assert!(SymbolicPath::new(vec![ray("r", 1, 0, "r[7]")]).is_err());
        // overlapping progressions
        assert!(SymbolicPath::new(vec![ray("r", 2, 0, "d"), ray("r", 3, 1, "e")]).is_err());
        // disjoint progressions are fine
        assert!(SymbolicPath::new(vec![ray("r", 2, 0, "d"), ray("r", 2, 1, "e")]).is_ok());
    }

    #[test]
    fn canonical_form_absorbs_progression_members() {
        let a = SymbolicPath::new(vec![Block::finite([v("r[0]")]), ray("r", 1, 1, "d")]).unwrap();
        let b = SymbolicPath::new(vec![ray("r", 1, 0, "d")]).unwrap();
        assert_eq!(a, b);
        let c = SymbolicPath::new(vec![Block::finite([v("a")]), Block::finite([v("b")])]).unwrap();
        assert_eq!(c, SymbolicPath::finite([v("a"), v("b")]).unwrap());
    }

    #[test]
    fn compare_points_examples() {
        let p = SymbolicPath::finite([v("a"), v("b"), v("c")]).unwrap();
        let a = p.locate(&v("a")).unwrap();
        let c = p.locate(&v("c")).unwrap();
        assert_eq!(p.compare_points(a, c), Ok(Ordering::Less));
        assert_eq!(p.compare_points(a, a), Ok(Ordering::Equal));

        let r = SymbolicPath::new(vec![ray("r", 1, 0, "d")]).unwrap();
        let r5 = PointRef::new(0, Position::Member(5));
        let lim = PointRef::new(0, Position::Limit);
        assert_eq!(r.compare_points(r5, lim), Ok(Ordering::Less));
    }

    #[test]
    fn invalid_refs_name_the_field() {
        let p = SymbolicPath::finite([v("a")]).unwrap();
        let err = p.compare_points(PointRef::new(3, Position::Finite(0)), p.first_ref()).unwrap_err();
        assert!(matches!(err, OrderError::InvalidPoint { field: "block_index", .. }));
        let err = p.vertex_at(PointRef::new(0, Position::Limit)).unwrap_err();
        assert!(matches!(err, OrderError::InvalidPoint { field: "position", .. }));
    }

    #[test]
    fn successor_and_predecessor_around_limits() {
        let p = SymbolicPath::new(vec![
            Block::finite([v("a")]),
            ray("r", 1, 0, "d"),
            Block::omega_down(v("e"), "s", IndexMap::identity()),
            Block::finite([v("z")]),
        ])
        .unwrap();
        let d = p.locate(&v("d")).unwrap();
        let e = p.locate(&v("e")).unwrap();
        assert_eq!(p.predecessor(d), None);
        assert_eq!(p.successor(d), Some(e));
        assert_eq!(p.successor(e), None);
        let s0 = p.locate(&v("s[0]")).unwrap();
        assert_eq!(p.successor(s0), p.locate(&v("z")));
        assert_eq!(p.predecessor(s0), p.locate(&v("s[1]")));
        assert_eq!(p.successor(p.first_ref()), p.locate(&v("r[0]")));
    }

    #[test]
    fn truncation_lists_points_in_order() {
        let p = SymbolicPath::new(vec![
            Block::omega_down(v("e"), "s", IndexMap::new(2, 0).unwrap()),
            Block::finite([v("z")]),
        ])
        .unwrap();
        let names: Vec<String> = p.truncated_vertices(4).iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["e", "s[4]", "s[2]", "s[0]", "z"]);
    }
}
