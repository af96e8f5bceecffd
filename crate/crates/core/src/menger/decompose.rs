use super::MengerError;
use crate::order::{progression_meet, Block, IndexMap, SymbolicPath, VertexId};
use crate::space::{Instances, Presentation};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One component of a unit-degree space: a maximal dipath or a directed circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    /// Consecutive segments, each connecting to the next (and, when closed,
    /// the last back to the first).
    pub segments: Vec<SymbolicPath>,
    pub closed: bool,
}

impl Chain {
    /// The dipath itself, when the chain is open and expressible as one path.
    pub fn path(&self) -> Option<SymbolicPath> {
        if self.closed {
            return None;
        }
        let mut acc = self.segments[0].clone();
        for s in &self.segments[1..] {
            acc = acc.concatenate(s).ok()?;
        }
        Some(acc)
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.segments.iter().any(|s| s.contains(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Decomposition {
    Parts { chains: Vec<Chain> },
    /// Extension kept entering schema instances past the inspected range
    /// without closing up.
    Failure { witness: Vec<SymbolicPath> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Edge(VertexId, VertexId),
    Up { family: String, map: IndexMap, limit: VertexId },
    Down { limit: VertexId, family: String, map: IndexMap },
}

impl Piece {
    fn first(&self) -> VertexId {
        match self {
            Piece::Edge(u, _) => u.clone(),
            Piece::Up { family, map, .. } => VertexId::member(family.clone(), map.offset()),
            Piece::Down { limit, .. } => limit.clone(),
        }
    }

    fn last(&self) -> VertexId {
        match self {
            Piece::Edge(_, v) => v.clone(),
            Piece::Up { limit, .. } => limit.clone(),
            Piece::Down { family, map, .. } => VertexId::member(family.clone(), map.offset()),
        }
    }

    fn ray(&self) -> Option<(&str, IndexMap, &VertexId, bool)> {
        match self {
            Piece::Edge(..) => None,
            Piece::Up { family, map, limit } => Some((family, *map, limit, true)),
            Piece::Down { limit, family, map } => Some((family, *map, limit, false)),
        }
    }

    /// Whether `u → v` runs along the ray.
    fn covers_pair(&self, u: &VertexId, v: &VertexId) -> bool {
        let Some((family, map, _, up)) = self.ray() else { return false };
        let (Some((f, i)), Some((g, k))) = (u.as_member(), v.as_member()) else { return false };
        if f != family || g != family {
            return false;
        }
        let (lo, hi) = if up { (i, k) } else { (k, i) };
        matches!((map.preimage(lo), map.preimage(hi)), (Some(a), Some(b)) if b == a + 1)
    }

    /// Whether `v` is a member of the ray other than its first or last point.
    fn interior(&self, v: &VertexId) -> bool {
        let Some((family, map, _, _)) = self.ray() else { return false };
        matches!(v.as_member(), Some((f, i)) if f == family && map.preimage(i).is_some_and(|t| t > 0))
    }

    fn segment(&self) -> SymbolicPath {
        match self {
            Piece::Edge(u, v) => SymbolicPath::finite([u.clone(), v.clone()]).expect("edge"),
            Piece::Up { family, map, limit } => {
                SymbolicPath::new(vec![Block::omega_up(family.clone(), *map, limit.clone())]).expect("ray")
            }
            Piece::Down { limit, family, map } => {
                SymbolicPath::new(vec![Block::omega_down(limit.clone(), family.clone(), *map)]).expect("ray")
            }
        }
    }
}

fn pieces_of(path: &SymbolicPath, out: &mut Vec<Piece>) {
    for (u, v) in path.explicit_pairs() {
        out.push(Piece::Edge(u, v));
    }
    for b in path.blocks() {
        match b {
            Block::Finite { .. } => {}
            Block::OmegaUp { family, map, limit } => out.push(Piece::Up {
                family: family.clone(),
                map: *map,
                limit: limit.clone(),
            }),
            Block::OmegaDown { limit, family, map } => out.push(Piece::Down {
                limit: limit.clone(),
                family: family.clone(),
                map: *map,
            }),
        }
    }
}

fn all_points(path: &SymbolicPath, bound: u64, out: &mut BTreeSet<VertexId>) {
    out.extend(path.truncated_vertices(bound));
}

/// Splits a space with every in- and out-degree at most one into its
/// components, each a maximal dipath or a directed circuit.
///
/// Generators are cut into single edges and maximal ω-runs, duplicates are
/// merged, and the pieces are chained greedily through their unique
/// successor. Schema instances are unrolled up to the presentation's reach.
pub fn decompose_unit_degree(pres: &Presentation) -> Result<Decomposition, MengerError> {
    if !pres.directed {
        return Err(MengerError::InvalidInput(
            "unit-degree decomposition needs a dipath space; an undirected edge has degree two".into(),
        ));
    }
    let reach = pres.reach();
    let groups = pres.groups(reach);
    let mut raw = Vec::new();
    let mut points = BTreeSet::new();
    for (_, p) in &groups {
        pieces_of(p, &mut raw);
        all_points(p, pres.index_bound(), &mut points);
        points.insert(p.first());
        points.insert(p.last());
    }

    // merge rays and drop duplicates
    let mut rays: Vec<Piece> = Vec::new();
    for p in raw.iter().filter(|p| p.ray().is_some()) {
        let (f, m, l, up) = p.ray().unwrap();
        if let Some(existing) = rays.iter_mut().find(|r| {
            let (g, m2, l2, up2) = r.ray().unwrap();
            g == f && l2 == l && up2 == up && m2.eventually_equal(&m)
        }) {
            let (_, m2, _, _) = existing.ray().unwrap();
            if m.offset() < m2.offset() {
                *existing = p.clone();
            }
        } else {
            rays.push(p.clone());
        }
    }
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for p in &raw {
        if let Piece::Edge(u, v) = p {
            if !rays.iter().any(|r| r.covers_pair(u, v)) {
                edges.insert((u.clone(), v.clone()));
            }
        }
    }
    let pieces: Vec<Piece> = edges
        .into_iter()
        .map(|(u, v)| Piece::Edge(u, v))
        .chain(rays.iter().cloned())
        .collect();

    // degree checks
    let mut out_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut into: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, p) in pieces.iter().enumerate() {
        if out_of.insert(p.first(), i).is_some() {
            return Err(MengerError::Degree {
                vertex: p.first(),
                direction: "out",
            });
        }
        if into.insert(p.last(), i).is_some() {
            return Err(MengerError::Degree {
                vertex: p.last(),
                direction: "in",
            });
        }
    }
    for r in &rays {
        for p in &pieces {
            if r.interior(&p.first()) {
                return Err(MengerError::Degree {
                    vertex: p.first(),
                    direction: "out",
                });
            }
            if r.interior(&p.last()) {
                return Err(MengerError::Degree {
                    vertex: p.last(),
                    direction: "in",
                });
            }
        }
    }
    for (i, r) in rays.iter().enumerate() {
        for s in &rays[i + 1..] {
            let (f, m, _, _) = r.ray().unwrap();
            let (g, m2, _, _) = s.ray().unwrap();
            if f == g {
                if let Some(meet) = progression_meet(m, m2) {
                    return Err(MengerError::Degree {
                        vertex: VertexId::member(f, m.apply(meet.offset())),
                        direction: "out",
                    });
                }
            }
        }
    }

    // chaining
    let mut used = vec![false; pieces.len()];
    let mut chains = Vec::new();
    let follow = |start: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut seq = vec![start];
        used[start] = true;
        let mut cur = pieces[start].last();
        loop {
            match out_of.get(&cur) {
                Some(&next) if !used[next] => {
                    used[next] = true;
                    seq.push(next);
                    cur = pieces[next].last();
                }
                Some(&next) => return (seq, next == start),
                None => return (seq, false),
            }
        }
    };
    let starts: Vec<usize> = (0..pieces.len())
        .filter(|&i| !into.contains_key(&pieces[i].first()))
        .collect();
    for s in starts {
        let (seq, closed) = follow(s, &mut used);
        chains.push((seq, closed));
    }
    for i in 0..pieces.len() {
        if !used[i] {
            let (seq, closed) = follow(i, &mut used);
            chains.push((seq, closed));
        }
    }

    let mut out: Vec<Chain> = Vec::new();
    for (seq, closed) in chains {
        out.push(Chain {
            segments: merge_segments(seq.iter().map(|&i| pieces[i].segment()).collect()),
            closed,
        });
    }
    // points not touched by any piece are trivial dipaths
    for v in points {
        let touched = pieces
            .iter()
            .any(|p| p.first() == v || p.last() == v || p.interior(&v));
        if !touched {
            out.push(Chain {
                segments: vec![SymbolicPath::point(v)],
                closed: false,
            });
        }
    }

    // an open end lying on a schema instance past the reach means the chain
    // continues into territory that was not unrolled
    for c in &out {
        if c.closed {
            continue;
        }
        let ends = [c.segments[0].first(), c.segments.last().unwrap().last()];
        for v in &ends {
            for s in &pres.schemas {
                let beyond = match s.instances_containing(v) {
                    Instances::All => true,
                    Instances::Some(js) => js.iter().any(|&j| j > reach),
                };
                if beyond {
                    return Ok(Decomposition::Failure {
                        witness: c.segments.clone(),
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| a.segments[0].first().cmp(&b.segments[0].first()));
    Ok(Decomposition::Parts { chains: out })
}

fn merge_segments(segs: Vec<SymbolicPath>) -> Vec<SymbolicPath> {
    let mut out: Vec<SymbolicPath> = Vec::new();
    for s in segs {
        if let Some(prev) = out.last_mut() {
            if let Ok(joined) = prev.concatenate(&s) {
                *prev = joined;
                continue;
            }
        }
        out.push(s);
    }
    out
}
