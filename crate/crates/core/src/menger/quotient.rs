//! Finite stand-ins for infinite presentations.
//!
//! Members of a family with index at least the window collapse into a single
//! zone vertex per family. Paths found in the quotient are turned back into
//! concrete paths by routing through actual members above the window.

use crate::order::{Block, IndexMap, PointRef, PointSet, Position, SymbolicPath, Tail, VertexId};
use crate::space::{Instances, Presentation};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Cap on schema instances enumerated for a point lying on all of them.
const INSTANCE_CAP: u64 = 4096;

/// Zone vertex standing for the members of `family` above the window. The
/// trailing `~` cannot occur in a parsed atom.
pub(crate) fn zone(family: &str) -> VertexId {
    VertexId::Atom(format!("{family}~"))
}

pub(crate) fn zone_family(v: &VertexId) -> Option<&str> {
    match v {
        VertexId::Atom(s) => s.strip_suffix('~'),
        _ => None,
    }
}

fn token(v: &VertexId, window: u64) -> VertexId {
    match v.as_member() {
        Some((f, i)) if i >= window => zone(f),
        _ => v.clone(),
    }
}

fn first_at_least(map: IndexMap, bound: u64) -> u64 {
    if map.offset() >= bound {
        0
    } else {
        (bound - map.offset()).div_ceil(map.stride())
    }
}

fn below(map: IndexMap, window: u64) -> impl Iterator<Item = u64> {
    (0u64..).take_while(move |&t| map.apply(t) < window)
}

/// Token sequence of a path with consecutive repeats merged.
fn tokens(p: &SymbolicPath, window: u64) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = Vec::new();
    let mut push = |v: VertexId| {
        if out.last() != Some(&v) {
            out.push(v);
        }
    };
    for b in p.blocks() {
        match b {
            Block::Finite { vertices } => vertices.iter().for_each(|v| push(token(v, window))),
            Block::OmegaUp { family, map, limit } => {
                below(*map, window).for_each(|t| push(VertexId::member(family, map.apply(t))));
                push(zone(family));
                push(token(limit, window));
            }
            Block::OmegaDown { limit, family, map } => {
                push(token(limit, window));
                push(zone(family));
                let ts: Vec<u64> = below(*map, window).collect();
                ts.into_iter().rev().for_each(|t| push(VertexId::member(family, map.apply(t))));
            }
        }
    }
    out
}

/// Generators and schema instances up to the window plus one instance
/// beyond it, inverses included when undirected.
fn oriented_sources(pres: &Presentation, window: u64) -> Vec<SymbolicPath> {
    let mut out: Vec<SymbolicPath> = pres.generators.clone();
    for s in &pres.schemas {
        for n in 0.. {
            let j = s.domain().apply(n);
            out.push(s.instantiate(j).expect("validated schema"));
            if j > window {
                break;
            }
        }
    }
    if !pres.directed {
        let inv: Vec<SymbolicPath> = out.iter().map(SymbolicPath::reverse).collect();
        out.extend(inv);
    }
    out
}

/// Window used for a presentation and a set of points of interest, widened
/// on each retry. Finite presentations need no zones.
pub(crate) fn window_for<'a>(pres: &Presentation, points: impl IntoIterator<Item = &'a VertexId>, attempt: u32) -> u64 {
    if pres.is_finite() {
        return u64::MAX;
    }
    let top = points
        .into_iter()
        .filter_map(|v| v.as_member().map(|(_, i)| i))
        .max()
        .unwrap_or(0)
        .max(pres.index_bound());
    let pad = (2 * pres.period() + 2) << attempt;
    top + 1 + pad
}

/// Directed presentation of token edges and points. With `strict` set, edges
/// into `A` and out of `B` are left out.
pub(crate) fn build(
    pres: &Presentation,
    window: u64,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    strict: bool,
) -> Presentation {
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut points: BTreeSet<VertexId> = BTreeSet::new();
    for p in oriented_sources(pres, window) {
        let ts = tokens(&p, window);
        for w in ts.windows(2) {
            if strict && (a.contains(&w[1]) || b.contains(&w[0])) {
                continue;
            }
            edges.insert((w[0].clone(), w[1].clone()));
        }
        points.extend(ts);
    }
    for v in a.iter().chain(b) {
        if pres.contains_vertex(v) {
            points.insert(token(v, window));
        }
    }
    let mut gens: Vec<SymbolicPath> = edges
        .into_iter()
        .map(|(u, w)| SymbolicPath::finite([u, w]).expect("distinct tokens"))
        .collect();
    gens.extend(points.into_iter().map(SymbolicPath::point));
    Presentation::finite(true, gens)
}

/// Turns quotient paths into paths of the original presentation.
pub(crate) struct Concretizer<'a> {
    pres: &'a Presentation,
    window: u64,
    hi: u64,
}

impl<'a> Concretizer<'a> {
    pub fn new(pres: &'a Presentation, window: u64) -> Self {
        let span = 4 * pres.period() + 8;
        Concretizer {
            pres,
            window,
            hi: window.saturating_add(span),
        }
    }

    fn in_zone(&self, v: &VertexId, families: &BTreeSet<&str>) -> bool {
        matches!(v.as_member(), Some((f, i)) if families.contains(f) && i >= self.window && i < self.hi)
    }

    /// Oriented sources containing `v`, with schema instances below `hi`.
    fn sources(&self, v: &VertexId) -> Vec<SymbolicPath> {
        let mut out: Vec<SymbolicPath> = self.pres.generators.iter().filter(|g| g.contains(v)).cloned().collect();
        for s in &self.pres.schemas {
            let js: Vec<u64> = match s.instances_containing(v) {
                Instances::Some(js) => js,
                Instances::All => (0..INSTANCE_CAP)
                    .map(|n| s.domain().apply(n))
                    .take_while(|&j| j < self.hi)
                    .collect(),
            };
            for j in js {
                if let Ok(p) = s.instantiate(j) {
                    if p.contains(v) {
                        out.push(p);
                    }
                }
            }
        }
        if !self.pres.directed {
            let inv: Vec<SymbolicPath> = out.iter().map(SymbolicPath::reverse).collect();
            out.extend(inv);
        }
        out
    }

    /// Pieces leaving `u` into the zone, keyed by the zone point reached.
    fn entries(&self, u: &VertexId, families: &BTreeSet<&str>) -> Vec<(VertexId, SymbolicPath)> {
        let mut out = Vec::new();
        for s in self.sources(u) {
            let at = s.locate(u).unwrap();
            if let Some(next) = s.successor(at) {
                let x = s.vertex_at(next).unwrap();
                if self.in_zone(&x, families) {
                    out.push((x, s.segment(at, next).unwrap()));
                }
            } else if let (Block::OmegaDown { family, map, .. }, Position::Limit) = (&s.blocks()[at.block], at.position) {
                let t = first_at_least(*map, self.window);
                let x = VertexId::member(family, map.apply(t));
                if self.in_zone(&x, families) {
                    out.push((x, s.segment(at, PointRef::new(at.block, Position::Member(t))).unwrap()));
                }
            }
        }
        out
    }

    /// Pieces arriving at `v` from the zone, keyed by the zone point left.
    fn exits(&self, v: &VertexId, families: &BTreeSet<&str>) -> Vec<(VertexId, SymbolicPath)> {
        let mut out = Vec::new();
        for s in self.sources(v) {
            let at = s.locate(v).unwrap();
            if let Some(prev) = s.predecessor(at) {
                let y = s.vertex_at(prev).unwrap();
                if self.in_zone(&y, families) {
                    out.push((y, s.segment(prev, at).unwrap()));
                }
            } else if let (Block::OmegaUp { family, map, .. }, Position::Limit) = (&s.blocks()[at.block], at.position) {
                let t = first_at_least(*map, self.window);
                let y = VertexId::member(family, map.apply(t));
                if self.in_zone(&y, families) {
                    out.push((y, s.segment(PointRef::new(at.block, Position::Member(t)), at).unwrap()));
                }
            }
        }
        out
    }

    /// A concrete path from `u` to `v` whose interior lies in the zones of `families`.
    fn passage(&self, u: &VertexId, families: &BTreeSet<&str>, v: &VertexId) -> Option<SymbolicPath> {
        let exits: BTreeMap<VertexId, Vec<SymbolicPath>> =
            self.exits(v, families).into_iter().fold(BTreeMap::new(), |mut m, (y, p)| {
                m.entry(y).or_default().push(p);
                m
            });
        for (x, entry) in self.entries(u, families) {
            let mut parent: BTreeMap<VertexId, Option<VertexId>> = BTreeMap::from([(x.clone(), None)]);
            let mut queue = VecDeque::from([x.clone()]);
            while let Some(y) = queue.pop_front() {
                if let Some(outs) = exits.get(&y) {
                    let mut route = vec![y.clone()];
                    while let Some(Some(p)) = parent.get(route.last().unwrap()) {
                        route.push(p.clone());
                    }
                    route.reverse();
                    let middle = SymbolicPath::finite(route).ok()?;
                    for out in outs {
                        if let Ok(p) = entry
                            .concatenate(&middle)
                            .and_then(|p| p.concatenate(out))
                        {
                            return Some(p);
                        }
                    }
                }
                for s in self.sources(&y) {
                    let at = s.locate(&y).unwrap();
                    if let Some(next) = s.successor(at) {
                        let z = s.vertex_at(next).unwrap();
                        if self.in_zone(&z, families) && !parent.contains_key(&z) {
                            parent.insert(z.clone(), Some(y.clone()));
                            queue.push_back(z);
                        }
                    }
                }
            }
        }
        None
    }

    /// Concrete path following a finite quotient path, or `None` if some
    /// zone run could not be routed within the search band.
    pub fn path(&self, q: &SymbolicPath) -> Option<SymbolicPath> {
        let ts = q.finite_vertices()?;
        if zone_family(&ts[0]).is_some() {
            return None;
        }
        let mut acc = SymbolicPath::point(ts[0].clone());
        let mut i = 0;
        while i + 1 < ts.len() {
            let u = &ts[i];
            let mut j = i + 1;
            let mut families: BTreeSet<&str> = BTreeSet::new();
            while let Some(f) = zone_family(&ts[j]) {
                families.insert(f);
                j += 1;
                if j == ts.len() {
                    return None;
                }
            }
            let piece = if families.is_empty() {
                SymbolicPath::finite([u.clone(), ts[j].clone()]).ok()?
            } else {
                self.passage(u, &families, &ts[j])?
            };
            acc = acc.concatenate(&piece).ok()?;
            i = j;
        }
        Some(acc)
    }

    /// Points of a concrete path whose token lies in `reach`, a point set of
    /// the quotient path `q`.
    pub fn lift_reach(&self, q: &SymbolicPath, reach: &PointSet, concrete: &SymbolicPath) -> PointSet {
        let tokens: BTreeSet<VertexId> = reach.explicit.iter().filter_map(|&p| q.vertex_at(p).ok()).collect();
        let mut out = PointSet::new();
        for (bi, b) in concrete.blocks().iter().enumerate() {
            match b {
                Block::Finite { vertices } => {
                    for (k, v) in vertices.iter().enumerate() {
                        if tokens.contains(&token(v, self.window)) {
                            out.insert(PointRef::new(bi, Position::Finite(k)));
                        }
                    }
                }
                Block::OmegaUp { family, map, limit } | Block::OmegaDown { limit, family, map } => {
                    if tokens.contains(&token(limit, self.window)) {
                        out.insert(PointRef::new(bi, Position::Limit));
                    }
                    for t in below(*map, self.window) {
                        if tokens.contains(&VertexId::member(family, map.apply(t))) {
                            out.insert(PointRef::new(bi, Position::Member(t)));
                        }
                    }
                    if tokens.contains(&zone(family)) {
                        let t0 = first_at_least(*map, self.window);
                        out.tails.insert(Tail {
                            block: bi,
                            progression: IndexMap::new(1, t0).unwrap(),
                            include_limit: false,
                        });
                    }
                }
            }
        }
        out
    }
}
