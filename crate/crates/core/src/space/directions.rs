use super::{Instances, Presentation, SpaceError};
use crate::order::{Block, Position, SymbolicPath, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// How a member path can leave a point: the class of its nontrivial initial
/// segments under "one is an initial segment of the other".
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Germ {
    /// The path continues to this immediate successor.
    Step { to: VertexId },
    /// The point is a limit and the path descends through `family(i)` with
    /// `i ≡ residue (mod stride)`.
    Descend { family: String, stride: u64, residue: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Degree {
    Finite(usize),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Directions {
    /// Every germ when finite; a sample otherwise.
    pub germs: BTreeSet<Germ>,
    /// Schemas producing a different germ for each instance.
    pub unbounded: Vec<usize>,
}

impl Directions {
    pub fn degree(&self) -> Degree {
        if self.unbounded.is_empty() {
            Degree::Finite(self.germs.len())
        } else {
            Degree::Infinite
        }
    }
}

fn germ_at(path: &SymbolicPath, v: &VertexId) -> Option<Germ> {
    let p = path.locate(v)?;
    if let Some(next) = path.successor(p) {
        return Some(Germ::Step {
            to: path.vertex_at(next).unwrap(),
        });
    }
    match (&path.blocks()[p.block], p.position) {
        (Block::OmegaDown { family, map, .. }, Position::Limit) => Some(Germ::Descend {
            family: family.clone(),
            stride: map.stride(),
            residue: map.offset() % map.stride(),
        }),
        _ => None,
    }
}

/// Germs of member paths starting at `v`.
pub fn out_directions(pres: &Presentation, v: &VertexId) -> Result<Directions, SpaceError> {
    if !pres.contains_vertex(v) {
        return Err(SpaceError::NotInGroundSet(v.clone()));
    }
    let mut germs = BTreeSet::new();
    let mut unbounded = Vec::new();
    let both = |p: SymbolicPath| -> Vec<SymbolicPath> {
        if pres.directed {
            vec![p]
        } else {
            vec![p.reverse(), p]
        }
    };
    for g in &pres.generators {
        for p in both(g.clone()) {
            germs.extend(germ_at(&p, v));
        }
    }
    for (index, s) in pres.schemas.iter().enumerate() {
        match s.instances_containing(v) {
            Instances::Some(js) => {
                for j in js {
                    for p in both(s.instantiate(j)?) {
                        germs.extend(germ_at(&p, v));
                    }
                }
            }
            Instances::All => {
                let period = s.period();
                let at = |n: u64| -> Result<Vec<Option<Germ>>, SpaceError> {
                    Ok(both(s.instance(n)?).iter().map(|p| germ_at(p, v)).collect())
                };
                for n in 0..period {
                    let now = at(n)?;
                    if now != at(n + period)? {
                        unbounded.push(index);
                    }
                    germs.extend(now.into_iter().flatten());
                }
                unbounded.dedup();
            }
        }
    }
    Ok(Directions { germs, unbounded })
}

/// Germs of member paths ending at `v`, read backwards from `v`.
pub fn in_directions(pres: &Presentation, v: &VertexId) -> Result<Directions, SpaceError> {
    out_directions(&pres.reversed(), v)
}
