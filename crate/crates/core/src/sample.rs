//! Random member paths and trails of a presentation, built only from
//! segments of generators and schema instances and their concatenations.

use crate::order::SymbolicPath;
use crate::space::Presentation;
use crate::walks::{Step, Trail};
use rand::seq::SliceRandom;
use rand::Rng;

/// Oriented sources with schema instances up to `bound`.
fn sources(pres: &Presentation, bound: u64) -> Vec<SymbolicPath> {
    let mut out: Vec<SymbolicPath> = pres.groups(bound).into_iter().map(|(_, p)| p).collect();
    if !pres.directed {
        let inv: Vec<SymbolicPath> = out.iter().map(SymbolicPath::reverse).collect();
        out.extend(inv);
    }
    out
}

/// A random segment of a random source.
pub fn segment_of_source(pres: &Presentation, rng: &mut impl Rng, bound: u64) -> Option<SymbolicPath> {
    let src = sources(pres, bound);
    let s = src.choose(rng)?;
    let pts = s.truncated_points(bound);
    let i = rng.gen_range(0..pts.len());
    let j = rng.gen_range(i..pts.len());
    s.segment(pts[i], pts[j]).ok()
}

/// A random nontrivial segment starting at the last point of `p`, taken from
/// some source through that point.
pub fn continuation(pres: &Presentation, rng: &mut impl Rng, p: &SymbolicPath, bound: u64) -> Option<SymbolicPath> {
    let v = p.last();
    let mut cands: Vec<SymbolicPath> = sources(pres, bound).into_iter().filter(|s| s.contains(&v)).collect();
    cands.shuffle(rng);
    for s in cands {
        let at = s.locate(&v)?;
        let later: Vec<_> = s
            .truncated_points(bound)
            .into_iter()
            .filter(|&q| s.compare_points(at, q).is_ok_and(|o| o.is_lt()))
            .collect();
        if let Some(&y) = later.choose(rng) {
            return s.segment(at, y).ok();
        }
    }
    None
}

/// A member made of up to `pieces` concatenated segments.
pub fn member(pres: &Presentation, rng: &mut impl Rng, bound: u64, pieces: usize) -> Option<SymbolicPath> {
    let mut p = segment_of_source(pres, rng, bound)?;
    for _ in 1..pieces {
        match continuation(pres, rng, &p, bound).and_then(|q| p.concatenate(&q).ok()) {
            Some(longer) => p = longer,
            None => break,
        }
    }
    Some(p)
}

/// Members `p`, `q` with `q` starting where `p` ends.
pub fn connecting_pair(pres: &Presentation, rng: &mut impl Rng, bound: u64) -> Option<(SymbolicPath, SymbolicPath)> {
    let p = member(pres, rng, bound, 2)?;
    let q = continuation(pres, rng, &p, bound)?;
    Some((p, q))
}

/// A chain of up to `steps` forward steps, each a continuation of the last.
/// Steps may revisit points; validity is left to the caller.
pub fn trail(pres: &Presentation, rng: &mut impl Rng, bound: u64, steps: usize) -> Option<Trail> {
    let first = loop {
        let s = segment_of_source(pres, rng, bound)?;
        if !s.is_trivial() {
            break s;
        }
    };
    let mut out = vec![Step::forward(first)];
    while out.len() < steps {
        let last = out.last().unwrap().segment.clone();
        match continuation(pres, rng, &last, bound) {
            Some(next) => out.push(Step::forward(next)),
            None => break,
        }
    }
    Trail::new(out).ok()
}

/// One component planted in a random unit-degree space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Planted {
    /// The whole dipath, or one lap of the circuit starting anywhere.
    pub path: SymbolicPath,
    pub closed: bool,
}

/// A directed space whose components are the planted dipaths and circuits,
/// presented by overlapping pieces of each, plus edges inside any ray that
/// the ray already covers.
pub fn unit_degree_space(rng: &mut impl Rng, components: usize) -> (Presentation, Vec<Planted>) {
    use crate::order::{Block, IndexMap, VertexId};
    let mut gens = Vec::new();
    let mut planted = Vec::new();
    for c in 0..components {
        let len = rng.gen_range(1..=6);
        let atoms: Vec<VertexId> = (0..len).map(|i| VertexId::atom(format!("c{c}x{i}"))).collect();
        match rng.gen_range(0..3) {
            0 => {
                let path = SymbolicPath::finite(atoms.clone()).expect("fresh atoms");
                gens.extend(cover(rng, &atoms));
                planted.push(Planted { path, closed: false });
            }
            1 if len >= 3 => {
                let mut lap = atoms.clone();
                lap.push(atoms[0].clone());
                gens.extend(cover(rng, &lap));
                let path = SymbolicPath::finite(atoms).expect("fresh atoms");
                planted.push(Planted { path, closed: true });
            }
            _ => {
                let family = format!("c{c}r");
                let stride = rng.gen_range(1..=3);
                let map = IndexMap::new(stride, rng.gen_range(0..3)).expect("positive stride");
                let limit = VertexId::atom(format!("c{c}end"));
                let after = VertexId::atom(format!("c{c}out"));
                let path = SymbolicPath::new(vec![
                    Block::finite(atoms.clone()),
                    Block::omega_up(&family, map, limit.clone()),
                    Block::finite([after.clone()]),
                ])
                .expect("fresh names");
                gens.extend(cover(rng, &atoms));
                let last = atoms.last().unwrap().clone();
                gens.push(
                    SymbolicPath::new(vec![Block::finite([last]), Block::omega_up(&family, map, limit.clone())])
                        .expect("fresh names"),
                );
                gens.push(SymbolicPath::finite([limit, after]).expect("fresh names"));
                for _ in 0..rng.gen_range(0..3) {
                    let t = rng.gen_range(0..6);
                    gens.push(
                        SymbolicPath::finite([
                            VertexId::member(&family, map.apply(t)),
                            VertexId::member(&family, map.apply(t + 1)),
                        ])
                        .expect("distinct members"),
                    );
                }
                planted.push(Planted { path, closed: false });
            }
        }
    }
    gens.shuffle(rng);
    (Presentation::finite(true, gens), planted)
}

/// Overlapping segments covering every consecutive pair of `vs` (which may
/// end where it starts).
fn cover(rng: &mut impl Rng, vs: &[crate::order::VertexId]) -> Vec<SymbolicPath> {
    if vs.len() == 1 {
        return vec![SymbolicPath::point(vs[0].clone())];
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < vs.len() {
        let j = rng.gen_range(i + 1..vs.len()).min(i + 3);
        let back = if i > 0 && rng.gen_bool(0.3) { i - 1 } else { i };
        let piece = &vs[back..=j];
        // a closing lap repeats its first vertex; split it there
        if piece.first() == piece.last() {
            out.push(SymbolicPath::finite(piece[..piece.len() - 1].to_vec()).expect("simple"));
            out.push(SymbolicPath::finite(piece[piece.len() - 2..].to_vec()).expect("simple"));
        } else {
            out.push(SymbolicPath::finite(piece.to_vec()).expect("simple"));
        }
        i = j;
    }
    out
}
