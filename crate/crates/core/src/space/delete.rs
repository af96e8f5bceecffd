use super::{IndexExpr, PathSchema, Presentation, SpaceError, TemplateBlock, TemplateVertex};
use crate::order::{Block, IndexMap, PointRef, Position, SymbolicPath};

/// Removes every generating path that shares a nontrivial segment with a
/// member of `qs`, keeping what is left of it.
///
/// A generator is cut at each consecutive pair it shares with some `Q`
/// (in either direction). The pieces stay as generators, so every point of
/// the old ground set remains a point. Members of a shared ω-run become
/// one-point paths described by a one-vertex schema.
pub fn delete(pres: &Presentation, qs: &[SymbolicPath]) -> Result<Presentation, SpaceError> {
    let mut out = Presentation::new(pres.directed, vec![], vec![]);
    for g in &pres.generators {
        split_into(&mut out, g, qs)?;
    }
    let bound = qs.iter().map(SymbolicPath::max_explicit_index).max().unwrap_or(0) + pres.reach();
    for s in &pres.schemas {
        for n in 0.. {
            let j = s.domain().apply(n);
            if j > bound {
                break;
            }
            split_into(&mut out, &s.instantiate(j)?, qs)?;
        }
        let rest = s.restricted_from(bound + 1);
        let reps = 2 * s.period().max(pres.period());
        for n in 0..reps {
            let inst = rest.instance(n)?;
            if qs.iter().any(|q| !inst.shared_edges(q).is_empty()) {
                return Err(SpaceError::Unsupported(format!(
                    "deleted paths touch instance j={} of a schema beyond every explicit index",
                    rest.domain().apply(n)
                )));
            }
        }
        out.schemas.push(rest);
    }
    Ok(out)
}

enum Cut {
    /// Drop the pair starting at this point.
    Pair(PointRef),
    /// Drop every member pair of the block from parameter `from` on.
    Ray { block: usize, from: u64 },
}

fn split_into(out: &mut Presentation, g: &SymbolicPath, qs: &[SymbolicPath]) -> Result<(), SpaceError> {
    let mut cuts: Vec<Cut> = Vec::new();
    for q in qs {
        let shared = g.shared_edges(q);
        cuts.extend(shared.pairs.iter().map(|p| Cut::Pair(p.at)));
        cuts.extend(shared.rays.iter().map(|r| Cut::Ray {
            block: r.block,
            from: r.from,
        }));
    }
    if cuts.is_empty() {
        out.generators.push(g.clone());
        return Ok(());
    }
    // One ray cut per block suffices: keep the earliest.
    let mut ray_from: Vec<Option<u64>> = vec![None; g.blocks().len()];
    for c in &cuts {
        if let Cut::Ray { block, from } = c {
            ray_from[*block] = Some(ray_from[*block].map_or(*from, |f: u64| f.min(*from)));
        }
    }
    // (end of the piece before the break, start of the piece after it)
    let mut breaks: Vec<(PointRef, PointRef)> = Vec::new();
    for c in &cuts {
        if let Cut::Pair(at) = c {
            let covered = match (ray_from[at.block], at.position, &g.blocks()[at.block]) {
                (Some(f), Position::Member(t), Block::OmegaUp { .. }) => t >= f,
                (Some(f), Position::Member(t), Block::OmegaDown { .. }) => t > f,
                _ => false,
            };
            if !covered {
                breaks.push((*at, g.successor(*at).expect("pair has a successor")));
            }
        }
    }
    for (block, from) in ray_from.iter().enumerate() {
        let Some(from) = *from else { continue };
        let blk = &g.blocks()[block];
        let (family, map) = blk.progression().unwrap();
        let member = PointRef::new(block, Position::Member(from));
        let limit = PointRef::new(block, Position::Limit);
        if blk.is_ascending() {
            breaks.push((member, limit));
        } else {
            breaks.push((limit, member));
        }
        out.schemas.push(singletons(family, map.shifted(from + 1))?);
    }
    breaks.sort_by(|a, b| g.cmp_unchecked(a.0, b.0));
    breaks.dedup();
    let mut start = g.first_ref();
    for (end, next) in breaks {
        out.generators.push(g.segment(start, end)?);
        start = next;
    }
    out.generators.push(g.segment(start, g.last_ref())?);
    Ok(())
}

/// The one-point paths `family(map(i))`, `i ≥ 0`.
fn singletons(family: &str, map: IndexMap) -> Result<PathSchema, SpaceError> {
    PathSchema::new(
        "j",
        map,
        vec![TemplateBlock::Finite {
            vertices: vec![TemplateVertex::Member {
                family: family.to_string(),
                index: IndexExpr::var_plus(0),
            }],
        }],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::VertexId;
    use crate::space::close;

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn path(names: &[&str]) -> SymbolicPath {
        SymbolicPath::finite(names.iter().map(|s| v(s))).unwrap()
    }

    #[test]
    fn shared_pair_is_cut_out() {
        let pres = Presentation::finite(true, vec![path(&["a", "b", "c", "d"])]);
        let out = delete(&pres, &[path(&["c", "b"])]).unwrap();
        assert_eq!(out.generators, vec![path(&["a", "b"]), path(&["c", "d"])]);
        let h = close(&out).unwrap();
        assert!(!h.member(&path(&["a", "b", "c"])).is_member);
        assert!(h.member(&SymbolicPath::point(v("b"))).is_member);
    }

    #[test]
    fn untouched_generators_survive() {
        let pres = Presentation::finite(true, vec![path(&["a", "b"]), path(&["x", "y"])]);
        let out = delete(&pres, &[path(&["b", "c"])]).unwrap();
        assert_eq!(out.generators, pres.generators);
    }

    #[test]
    fn shared_ray_leaves_singletons() {
        let ray = SymbolicPath::new(vec![Block::omega_up("r", IndexMap::identity(), v("d")), Block::finite([v("e")])])
            .unwrap();
        let q = SymbolicPath::new(vec![Block::omega_up("r", IndexMap::new(1, 5).unwrap(), v("d"))]).unwrap();
        let out = delete(&Presentation::finite(true, vec![ray]), &[q]).unwrap();
        assert_eq!(out.generators[0], path(&["r[0]", "r[1]", "r[2]", "r[3]", "r[4]", "r[5]"]));
        assert_eq!(out.generators[1], path(&["d", "e"]));
        let h = close(&out).unwrap();
        assert!(h.member(&SymbolicPath::point(v("r[40]"))).is_member);
        assert!(!h.member(&path(&["r[40]", "r[41]"])).is_member);
    }
}
