use super::{check_compatible, Presentation, Source, SpaceError};
use crate::order::{Block, IndexMap, SymbolicPath, VertexId};
use serde::{Deserialize, Serialize};

/// The space generated by a compatible presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceHandle {
    presentation: Presentation,
}

/// One segment of a generating path used to assemble a member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPiece {
    pub source: Source,
    pub segment: SymbolicPath,
}

/// Result of a membership query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub is_member: bool,
    /// For members: the candidate as a concatenation of these pieces, in order.
    pub witness: Vec<WitnessPiece>,
    /// For non-members: what could not be covered.
    pub reason: Option<String>,
}

/// Validates compatibility and returns a handle on the generated space.
pub fn close(pres: &Presentation) -> Result<SpaceHandle, SpaceError> {
    check_compatible(pres).map_err(|v| SpaceError::Incompatible(Box::new(v)))?;
    Ok(SpaceHandle {
        presentation: pres.clone(),
    })
}

impl SpaceHandle {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn is_directed(&self) -> bool {
        self.presentation.directed
    }

    /// Decides whether `candidate` is a finite concatenation of segments of
    /// generating paths (and their inverses, when undirected).
    ///
    /// Consecutive pairs are matched against generators one at a time and every
    /// ω-block needs a single source carrying its progression into the same
    /// limit from some point on.
    pub fn member(&self, candidate: &SymbolicPath) -> Membership {
        let mut pieces: Vec<WitnessPiece> = Vec::new();
        let reject = |reason: String| Membership {
            is_member: false,
            witness: vec![],
            reason: Some(reason),
        };
        if candidate.is_trivial() {
            let v = candidate.first();
            return match self.presentation.oriented_candidates(&v).into_iter().next() {
                Some((source, _)) => Membership {
                    is_member: true,
                    witness: vec![WitnessPiece {
                        source,
                        segment: candidate.clone(),
                    }],
                    reason: None,
                },
                None => reject(format!("{v} is not a point of the space")),
            };
        }
        let blocks = candidate.blocks();
        for (b, block) in blocks.iter().enumerate() {
            let step = |pieces: &mut Vec<WitnessPiece>, u: VertexId, w: VertexId| -> Result<(), String> {
                let source = self
                    .pair_source(&u, &w)
                    .ok_or_else(|| format!("no generating path has {w} right after {u}"))?;
                pieces.push(WitnessPiece {
                    source,
                    segment: SymbolicPath::finite([u, w]).expect("distinct pair"),
                });
                Ok(())
            };
            let outcome: Result<(), String> = (|| {
                match block {
                    Block::Finite { vertices } => {
                        for w in vertices.windows(2) {
                            step(&mut pieces, w[0].clone(), w[1].clone())?;
                        }
                    }
                    Block::OmegaUp { family, map, limit } => {
                        let (t0, source) = self
                            .germ_source(family, *map, limit, true)
                            .ok_or_else(|| format!("no generating path ascends along {family}({map}) to {limit}"))?;
                        for t in 0..t0 {
                            step(&mut pieces, block.member(t).unwrap(), block.member(t + 1).unwrap())?;
                        }
                        pieces.push(WitnessPiece {
                            source,
                            segment: SymbolicPath::new(vec![Block::omega_up(
                                family.clone(),
                                map.shifted(t0),
                                limit.clone(),
                            )])
                            .expect("tail of a valid block"),
                        });
                    }
                    Block::OmegaDown { limit, family, map } => {
                        let (t0, source) = self
                            .germ_source(family, *map, limit, false)
                            .ok_or_else(|| format!("no generating path descends along {family}({map}) from {limit}"))?;
                        pieces.push(WitnessPiece {
                            source,
                            segment: SymbolicPath::new(vec![Block::omega_down(
                                limit.clone(),
                                family.clone(),
                                map.shifted(t0),
                            )])
                            .expect("tail of a valid block"),
                        });
                        for t in (1..=t0).rev() {
                            step(&mut pieces, block.member(t).unwrap(), block.member(t - 1).unwrap())?;
                        }
                    }
                }
                if let Some(next) = blocks.get(b + 1) {
                    let last = candidate.vertex_at(crate::order::PointRef::new(b, block.last_position())).unwrap();
                    let first = candidate
                        .vertex_at(crate::order::PointRef::new(b + 1, next.first_position()))
                        .unwrap();
                    step(&mut pieces, last, first)?;
                }
                Ok(())
            })();
            if let Err(reason) = outcome {
                return reject(reason);
            }
        }
        Membership {
            is_member: true,
            witness: merge_pieces(pieces),
            reason: None,
        }
    }

    /// A source in which `w` immediately follows `u`.
    fn pair_source(&self, u: &VertexId, w: &VertexId) -> Option<Source> {
        self.presentation
            .oriented_candidates_all(&[u, w])
            .into_iter()
            .find(|(_, p)| p.consecutive(u, w))
            .map(|(s, _)| s)
    }

    /// A source with an ω-block of the given direction whose progression is
    /// eventually `map` with limit `limit`, and the least parameter `t0` with
    /// `family(map(t))` in that block for all `t ≥ t0`.
    fn germ_source(&self, family: &str, map: IndexMap, limit: &VertexId, ascending: bool) -> Option<(u64, Source)> {
        let mut best: Option<(u64, Source)> = None;
        for (source, path) in self.presentation.oriented_candidates(limit) {
            for blk in path.blocks() {
                let Some((g, m2)) = blk.progression() else { continue };
                if g != family || blk.limit() != Some(limit) || blk.is_ascending() != ascending {
                    continue;
                }
                if !map.eventually_equal(&m2) {
                    continue;
                }
                let t0 = if m2.offset() > map.offset() {
                    (m2.offset() - map.offset()).div_ceil(map.stride())
                } else {
                    0
                };
                if best.is_none_or(|(b, _)| t0 < b) {
                    best = Some((t0, source));
                }
            }
        }
        best
    }
}

/// Joins adjacent pieces from the same source.
fn merge_pieces(pieces: Vec<WitnessPiece>) -> Vec<WitnessPiece> {
    let mut out: Vec<WitnessPiece> = Vec::new();
    for piece in pieces {
        if let Some(prev) = out.last_mut() {
            if prev.source == piece.source {
                if let Ok(joined) = prev.segment.concatenate(&piece.segment) {
                    prev.segment = joined;
                    continue;
                }
            }
        }
        out.push(piece);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{IndexExpr, PathSchema, TemplateBlock, TemplateVertex};

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn path(names: &[&str]) -> SymbolicPath {
        SymbolicPath::finite(names.iter().map(|s| v(s))).unwrap()
    }

    #[test]
    fn concatenation_of_generator_segments_is_a_member() {
        let h = close(&Presentation::finite(true, vec![path(&["a", "b", "c"]), path(&["c", "d"])])).unwrap();
        let m = h.member(&path(&["b", "c", "d"]));
        assert!(m.is_member);
        assert_eq!(m.witness.len(), 2);
        assert_eq!(m.witness[0].segment, path(&["b", "c"]));
        assert!(!h.member(&path(&["d", "c"])).is_member);
    }

    #[test]
    fn inverses_only_when_undirected() {
        let h = close(&Presentation::finite(false, vec![path(&["a", "b", "c"])])).unwrap();
        let m = h.member(&path(&["c", "b"]));
        assert!(m.is_member);
        assert_eq!(m.witness[0].source, Source::Generator { index: 0, reversed: true });
    }

    #[test]
    fn omega_tail_needs_matching_limit() {
        let ray = SymbolicPath::new(vec![Block::omega_up("r", IndexMap::identity(), v("d"))]).unwrap();
        let h = close(&Presentation::finite(true, vec![ray.clone(), path(&["d", "e"])])).unwrap();
        let later = SymbolicPath::new(vec![
            Block::omega_up("r", IndexMap::new(1, 3).unwrap(), v("d")),
            Block::finite([v("e")]),
        ])
        .unwrap();
        assert!(h.member(&later).is_member);
        let stride2 = SymbolicPath::new(vec![Block::omega_up("r", IndexMap::new(2, 0).unwrap(), v("d"))]).unwrap();
        assert!(!h.member(&stride2).is_member);
        assert!(h.member(&SymbolicPath::point(v("r[7]"))).is_member);
        assert!(!h.member(&SymbolicPath::point(v("x"))).is_member);
    }

    #[test]
    fn schema_instances_supply_pairs() {
        let s = PathSchema::new(
            "j",
            IndexMap::identity(),
            vec![TemplateBlock::Finite {
                vertices: vec![
                    TemplateVertex::Member {
                        family: "r".into(),
                        index: IndexExpr::var_plus(0),
                    },
                    TemplateVertex::Atom("hub".into()),
                ],
            }],
        )
        .unwrap();
        let h = close(&Presentation::new(false, vec![], vec![s])).unwrap();
        let m = h.member(&path(&["r[4]", "hub", "r[9]"]));
        assert!(m.is_member);
        assert_eq!(
            m.witness[1].source,
            Source::Schema {
                index: 0,
                j: 9,
                reversed: true
            }
        );
    }
}
