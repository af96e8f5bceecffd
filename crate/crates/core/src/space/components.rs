use super::{Presentation, Source, SpaceError, TemplateBlock, TemplateVertex};
use crate::order::{Block, IndexMap, SymbolicPath, VertexId};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A finite description of a set of points: atoms, explicit family members
/// and whole family progressions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundSetDescription {
    pub atoms: BTreeSet<String>,
    pub members: BTreeSet<VertexId>,
    pub family_tails: BTreeSet<(String, IndexMap)>,
}

impl GroundSetDescription {
    pub fn contains(&self, v: &VertexId) -> bool {
        match v {
            VertexId::Atom(a) => self.atoms.contains(a),
            VertexId::Member { family, index } => {
                self.members.contains(v)
                    || self
                        .family_tails
                        .iter()
                        .any(|(f, m)| f == family && m.preimage(*index).is_some())
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.family_tails.is_empty()
    }

    fn add_vertex(&mut self, v: &VertexId) {
        match v {
            VertexId::Atom(a) => {
                self.atoms.insert(a.clone());
            }
            VertexId::Member { .. } => {
                self.members.insert(v.clone());
            }
        }
    }

    fn add_path(&mut self, p: &SymbolicPath) {
        for b in p.blocks() {
            match b {
                Block::Finite { vertices } => vertices.iter().for_each(|v| self.add_vertex(v)),
                _ => {
                    self.add_vertex(b.limit().unwrap());
                    let (f, m) = b.progression().unwrap();
                    self.family_tails.insert((f.to_string(), m));
                }
            }
        }
    }

    /// Drops explicit members already covered by a tail.
    fn tidy(&mut self) {
        let tails = self.family_tails.clone();
        self.members.retain(|v| {
            let (f, i) = v.as_member().unwrap();
            !tails.iter().any(|(g, m)| g == f && m.preimage(i).is_some())
        });
    }
}

/// One connected component of the generated space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub ground: GroundSetDescription,
    /// Generators and schema instances (up to the reach) lying in it.
    pub sources: Vec<Source>,
    /// Schemas all of whose later instances also lie in it.
    pub schema_tails: Vec<usize>,
    /// Set when this entry stands for infinitely many components, one per
    /// instance `j ≥ from` of the schema, each being that instance's points.
    pub per_instance: Option<(usize, u64)>,
}

/// Partitions the ground set into classes of the relation "joined by a member path".
///
/// Two generating paths are in the same class iff they are linked by a chain of
/// paths that pairwise share a point. Schema instances past the reach are
/// represented by their next `2·period` instances; these must either all join
/// one class or each stay alone.
pub fn components(pres: &Presentation) -> Result<Vec<Component>, SpaceError> {
    let reach = pres.reach();
    let mut groups = pres.groups(reach);
    let in_range = groups.len();
    let period = pres.period();
    let mut rep_owner: Vec<usize> = Vec::new();
    let mut first_rep: Vec<u64> = Vec::new();
    for (index, s) in pres.schemas.iter().enumerate() {
        let n0 = (0..).find(|&n| s.domain().apply(n) > reach).unwrap();
        first_rep.push(s.domain().apply(n0));
        for n in n0..n0 + 2 * period.max(1) {
            let j = s.domain().apply(n);
            groups.push((Source::Schema { index, j, reversed: false }, s.instantiate(j)?));
            rep_owner.push(index);
        }
    }
    let mut uf: UnionFind<usize> = UnionFind::new(groups.len());
    let mut touched = vec![false; groups.len()];
    for i in 0..groups.len() {
        for k in i + 1..groups.len() {
            if !groups[i].1.intersect(&groups[k].1).is_empty() {
                uf.union(i, k);
                touched[i] = true;
                touched[k] = true;
            }
        }
    }

    let mut tail_of = vec![None; pres.schemas.len()];
    let mut isolated = vec![false; pres.schemas.len()];
    for (index, _) in pres.schemas.iter().enumerate() {
        let reps: Vec<usize> = (in_range..groups.len())
            .filter(|&g| rep_owner[g - in_range] == index)
            .collect();
        let roots: BTreeSet<usize> = reps.iter().map(|&g| uf.find(g)).collect();
        if roots.len() == 1 {
            tail_of[index] = Some(reps[0]);
        } else if reps.iter().all(|&g| !touched[g]) {
            isolated[index] = true;
        } else {
            return Err(SpaceError::Unsupported(format!(
                "later instances of schema {index} split into several components in a pattern not captured by one period"
            )));
        }
    }

    let mut classes: Vec<(usize, Component)> = Vec::new();
    let class_of = |root: usize, classes: &mut Vec<(usize, Component)>| -> usize {
        if let Some(pos) = classes.iter().position(|(r, _)| *r == root) {
            return pos;
        }
        classes.push((
            root,
            Component {
                ground: GroundSetDescription::default(),
                sources: vec![],
                schema_tails: vec![],
                per_instance: None,
            },
        ));
        classes.len() - 1
    };
    for (g, (source, path)) in groups.iter().enumerate().take(in_range) {
        let c = class_of(uf.find(g), &mut classes);
        classes[c].1.ground.add_path(path);
        classes[c].1.sources.push(*source);
    }
    for (index, s) in pres.schemas.iter().enumerate() {
        if let Some(rep) = tail_of[index] {
            let c = class_of(uf.find(rep), &mut classes);
            add_schema_tail(&mut classes[c].1.ground, s, first_rep[index]);
            classes[c].1.schema_tails.push(index);
        }
    }
    let mut out: Vec<Component> = classes
        .into_iter()
        .map(|(_, mut c)| {
            c.ground.tidy();
            c
        })
        .collect();
    for (index, s) in pres.schemas.iter().enumerate() {
        if isolated[index] {
            let mut ground = GroundSetDescription::default();
            add_schema_tail(&mut ground, s, first_rep[index]);
            ground.tidy();
            out.push(Component {
                ground,
                sources: vec![],
                schema_tails: vec![],
                per_instance: Some((index, first_rep[index])),
            });
        }
    }
    out.sort_by(|a, b| a.ground.cmp(&b.ground));
    Ok(out)
}

/// Adds the points of every instance `j ≥ from` of `s`.
/// From witnesses `p` (first `x`, last `y`) and `q` (first `y`, last `z`), a
/// path from `x` to `z`: `p` up to the last point `m` of `q` on `p`, then `q`
/// from `m`.
pub fn chain_witness(p: &SymbolicPath, q: &SymbolicPath) -> Result<SymbolicPath, SpaceError> {
    let common = q.intersect(p);
    let m = q.vertex_at(q.sup(&common)?)?;
    let (Some(at_p), Some(at_q)) = (p.locate(&m), q.locate(&m)) else {
        return Err(SpaceError::Unsupported(format!("{m} is a supremum of the overlap but not on both paths")));
    };
    let head = p.segment(p.first_ref(), at_p)?;
    let tail = q.segment(at_q, q.last_ref())?;
    Ok(head.concatenate(&tail)?)
}

fn add_schema_tail(ground: &mut GroundSetDescription, s: &super::PathSchema, from: u64) {
    let dom = s.restricted_from(from).domain();
    let vertex = |ground: &mut GroundSetDescription, tv: &TemplateVertex| match tv {
        TemplateVertex::Atom(a) => {
            ground.atoms.insert(a.clone());
        }
        TemplateVertex::Member { family, index } => {
            if index.coeff == 0 {
                ground.members.insert(VertexId::member(family.clone(), index.constant));
            } else {
                let m = IndexMap::new(index.coeff * dom.stride(), index.eval(dom.offset())).unwrap();
                ground.family_tails.insert((family.clone(), m));
            }
        }
    };
    for b in s.blocks() {
        match b {
            TemplateBlock::Finite { vertices } => vertices.iter().for_each(|v| vertex(ground, v)),
            TemplateBlock::OmegaUp {
                family,
                stride,
                offset,
                limit,
            }
            | TemplateBlock::OmegaDown {
                limit,
                family,
                stride,
                offset,
            } => {
                vertex(ground, limit);
                let base = offset.eval(dom.offset());
                let step = offset.coeff * dom.stride();
                let (explicit, tail) = semigroup_cover(*stride, step);
                for x in explicit {
                    ground.members.insert(VertexId::member(family.clone(), base + x));
                }
                ground.family_tails.insert((family.clone(), IndexMap::new(tail.stride(), tail.offset() + base).unwrap()));
            }
        }
    }
}

/// The set `{a·x + b·y : x, y ≥ 0}` as explicit small values plus one progression.
fn semigroup_cover(a: u64, b: u64) -> (Vec<u64>, IndexMap) {
    if b == 0 {
        return (vec![], IndexMap::new(a, 0).unwrap());
    }
    let g = num_integer::gcd(a, b);
    // Every multiple of g from a·b/g on is representable.
    let bound = a * b / g;
    let explicit: Vec<u64> = (0..bound)
        .step_by(g as usize)
        .filter(|&v| (0..=v / a).any(|x| (v - a * x).is_multiple_of(b)))
        .collect();
    (explicit, IndexMap::new(g, bound).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{IndexExpr, PathSchema};

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn path(names: &[&str]) -> SymbolicPath {
        SymbolicPath::finite(names.iter().map(|s| v(s))).unwrap()
    }

    #[test]
    fn finite_components() {
        let p = Presentation::finite(true, vec![path(&["a", "b"]), path(&["c", "b"]), path(&["x", "y"])]);
        let cs = components(&p).unwrap();
        assert_eq!(cs.len(), 2);
        let big = cs.iter().find(|c| c.ground.contains(&v("a"))).unwrap();
        assert!(big.ground.contains(&v("c")));
        assert!(!big.ground.contains(&v("x")));
    }

    #[test]
    fn schema_chain_is_one_component() {
        let s = PathSchema::new(
            "j",
            IndexMap::identity(),
            vec![TemplateBlock::Finite {
                vertices: vec![
                    TemplateVertex::Member {
                        family: "r".into(),
                        index: IndexExpr::var_plus(0),
                    },
                    TemplateVertex::Member {
                        family: "r".into(),
                        index: IndexExpr::var_plus(1),
                    },
                ],
            }],
        )
        .unwrap();
        let cs = components(&Presentation::new(false, vec![], vec![s])).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].ground.contains(&v("r[1000]")));
        assert_eq!(cs[0].schema_tails, vec![0]);
    }

    #[test]
    fn isolated_instances_are_reported_per_instance() {
        let s = PathSchema::new(
            "j",
            IndexMap::new(2, 1).unwrap(),
            vec![TemplateBlock::Finite {
                vertices: vec![TemplateVertex::Member {
                    family: "r".into(),
                    index: IndexExpr::var_plus(0),
                }],
            }],
        )
        .unwrap();
        let cs = components(&Presentation::new(true, vec![], vec![s])).unwrap();
        let fam = cs.iter().find(|c| c.per_instance.is_some()).unwrap();
        assert!(fam.ground.contains(&v("r[101]")));
        assert!(!fam.ground.contains(&v("r[100]")));
    }

    #[test]
    fn semigroup_cover_matches_enumeration() {
        for a in 1..7u64 {
            for b in 0..7u64 {
                let (explicit, tail) = semigroup_cover(a, b);
                for value in 0..80u64 {
                    let expected = (0..=value / a).any(|x| {
                        let rest = value - a * x;
                        if b == 0 {
                            rest == 0
                        } else {
                            rest % b == 0
                        }
                    });
                    let got = explicit.contains(&value) || tail.preimage(value).is_some();
                    assert_eq!(got, expected, "a={a} b={b} value={value}");
                }
            }
        }
    }

    #[test]
    fn chain_witness_cuts_at_the_last_common_point() {
        let p = SymbolicPath::finite(["x", "a", "m", "b", "y"].map(VertexId::atom)).unwrap();
        let q = SymbolicPath::finite(["y", "b", "m", "c", "z"].map(VertexId::atom)).unwrap();
        let w = chain_witness(&p, &q).unwrap();
        assert_eq!(w, SymbolicPath::finite(["x", "a", "m", "c", "z"].map(VertexId::atom)).unwrap());
    }
}
