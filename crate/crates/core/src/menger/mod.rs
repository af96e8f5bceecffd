//! Disjoint `A`–`B` paths and separators in path spaces.
//!
//! [`menger`] grows a system of disjoint paths by alternating trails until it
//! has `k` of them or no trail exists, in which case the supremum of each
//! path's reach gives a separator. Spaces with ω-blocks or schemas are solved
//! on a finite quotient and every answer is checked against the original
//! space before it is returned.

mod decompose;
mod quotient;
mod search;
mod symdiff;

pub use decompose::{decompose_unit_degree, Chain, Decomposition};
pub use search::{augment, extract_separator, find_alternating_trail, AlternatingTrail, TrailSearch};
pub use symdiff::symmetric_difference;

use crate::order::{OrderError, SymbolicPath, VertexId};
use crate::space::{close, SpaceError, SpaceHandle};
use crate::walks::{check_alternating, WalkError};
use quotient::{build, window_for, Concretizer};
use search::Adjacency;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Quotient windows tried before giving up.
const ATTEMPTS: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MengerError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("{vertex} has {direction}-degree above one")]
    Degree { vertex: VertexId, direction: &'static str },
    #[error("not a finite presentation: {0}")]
    NotFinite(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("no certified answer: {}", .0.join("; "))]
    Uncertified(Vec<String>),
}

/// Which paths count as `A`–`B` paths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// First point in `A`, last in `B`, no other point in `A ∪ B`.
    #[default]
    Strict,
    /// First point in `A`, last in `B`.
    EndpointsOnly,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::EndpointsOnly => "endpoints",
        })
    }
}

impl FromStr for Mode {
    type Err = MengerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Mode::Strict),
            "endpoints" | "endpoints_only" => Ok(Mode::EndpointsOnly),
            other => Err(MengerError::InvalidInput(format!("unknown mode `{other}`"))),
        }
    }
}

/// Pairwise disjoint paths of a space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointSystem {
    pub paths: Vec<SymbolicPath>,
}

impl DisjointSystem {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn check_disjoint(&self) -> Result<(), MengerError> {
        for (i, p) in self.paths.iter().enumerate() {
            for q in &self.paths[i + 1..] {
                if !p.intersect(q).is_empty() {
                    return Err(MengerError::Inconsistent(format!("paths {p} and {q} meet")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SeparatorVerdict {
    #[default]
    Unchecked,
    Ok,
    /// An `A`–`B` path avoiding the set.
    Violation { witness: SymbolicPath },
    /// The search found a quotient route it could not turn into a path.
    Inconclusive { reason: String },
}

/// One point from each path of a maximal system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorCertificate {
    pub points: BTreeSet<VertexId>,
    /// The system the points were chosen from.
    pub system: Vec<SymbolicPath>,
    /// `origin[i]` is the point chosen on `system[i]`.
    pub origin: Vec<VertexId>,
    pub verdict: SeparatorVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum MengerAnswer {
    Paths { system: DisjointSystem },
    Separator { certificate: SeparatorCertificate },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PathsVerdict {
    Ok,
    Violation { path: usize, reason: String },
}

fn is_ab_path(p: &SymbolicPath, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>, mode: Mode) -> Result<(), String> {
    if !a.contains(&p.first()) {
        return Err(format!("starts at {} outside A", p.first()));
    }
    if !b.contains(&p.last()) {
        return Err(format!("ends at {} outside B", p.last()));
    }
    if mode == Mode::Strict {
        let (first, last) = (p.first_ref(), p.last_ref());
        for v in a.iter().chain(b) {
            if let Some(at) = p.locate(v) {
                if at != first && at != last {
                    return Err(format!("passes through {v} in A ∪ B"));
                }
            }
        }
        if !p.is_trivial() && (b.contains(&p.first()) || a.contains(&p.last())) {
            return Err("meets A ∪ B at an endpoint twice".into());
        }
    }
    Ok(())
}

/// Checks that `paths` are pairwise disjoint member `A`–`B` paths.
pub fn verify_paths(
    h: &SpaceHandle,
    paths: &[SymbolicPath],
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    mode: Mode,
) -> PathsVerdict {
    for (i, p) in paths.iter().enumerate() {
        let m = h.member(p);
        if !m.is_member {
            return PathsVerdict::Violation {
                path: i,
                reason: format!("not a member: {}", m.reason.unwrap_or_default()),
            };
        }
        if let Err(reason) = is_ab_path(p, a, b, mode) {
            return PathsVerdict::Violation { path: i, reason };
        }
        for (j, q) in paths.iter().enumerate().skip(i + 1) {
            if !p.intersect(q).is_empty() {
                return PathsVerdict::Violation {
                    path: i,
                    reason: format!("meets path {j}"),
                };
            }
        }
    }
    PathsVerdict::Ok
}

/// Checks that every `A`–`B` path of the space meets `s`.
pub fn verify_separator(
    h: &SpaceHandle,
    s: &BTreeSet<VertexId>,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    mode: Mode,
) -> SeparatorVerdict {
    let pres = h.presentation();
    let window = window_for(pres, s.iter().chain(a).chain(b), 0);
    let q = build(pres, window, a, b, mode == Mode::Strict);
    let adj = Adjacency::of(&q).expect("quotients are finite");
    let mut parent: BTreeMap<VertexId, Option<VertexId>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for v in a.iter().filter(|v| !s.contains(*v) && adj.vertices.contains(*v)) {
        parent.insert(v.clone(), None);
        queue.push_back(v.clone());
    }
    let mut goal = None;
    while let Some(v) = queue.pop_front() {
        if b.contains(&v) {
            goal = Some(v);
            break;
        }
        for w in adj.successors(&v) {
            if !s.contains(w) && !parent.contains_key(w) {
                parent.insert(w.clone(), Some(v.clone()));
                queue.push_back(w.clone());
            }
        }
    }
    let Some(goal) = goal else {
        return SeparatorVerdict::Ok;
    };
    let mut route = vec![goal];
    while let Some(Some(p)) = parent.get(route.last().unwrap()) {
        route.push(p.clone());
    }
    route.reverse();
    let qpath = SymbolicPath::finite(route).expect("breadth-first routes are simple");
    let witness = Concretizer::new(pres, window).path(&qpath);
    match witness {
        Some(w) if verify_paths(h, std::slice::from_ref(&w), a, b, mode) == PathsVerdict::Ok
            && s.iter().all(|v| !w.contains(v)) =>
        {
            SeparatorVerdict::Violation { witness: w }
        }
        _ => SeparatorVerdict::Inconclusive {
            reason: format!("quotient route {qpath} avoids the set but has no concrete counterpart"),
        },
    }
}

/// `k` disjoint `A`–`B` paths, or fewer than `k` points meeting every one.
pub fn menger(
    h: &SpaceHandle,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    k: usize,
    mode: Mode,
) -> Result<MengerAnswer, MengerError> {
    let pres = h.presentation();
    if let Some(v) = a.iter().chain(b).find(|v| !pres.contains_vertex(v)) {
        return Err(MengerError::Space(SpaceError::NotInGroundSet(v.clone())));
    }
    let attempts = if pres.is_finite() { 1 } else { ATTEMPTS };
    let mut failures = Vec::new();
    for attempt in 0..attempts {
        let window = window_for(pres, a.iter().chain(b), attempt);
        match solve_at(h, a, b, k, mode, window) {
            Ok(answer) => return Ok(answer),
            Err(MengerError::Uncertified(why)) => failures.extend(why),
            Err(e) => return Err(e),
        }
    }
    Err(MengerError::Uncertified(failures))
}

fn solve_at(
    h: &SpaceHandle,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    k: usize,
    mode: Mode,
    window: u64,
) -> Result<MengerAnswer, MengerError> {
    let pres = h.presentation();
    let quotient = close(&build(pres, window, a, b, mode == Mode::Strict))?;
    let concretizer = Concretizer::new(pres, window);
    let mut system = DisjointSystem::default();
    while system.len() < k {
        match find_alternating_trail(&quotient, &system, a, b)? {
            TrailSearch::Found { trail } => {
                let verdict = check_alternating(&trail.trail, &system.paths, a, &quotient);
                if !verdict.is_ok() {
                    return Err(MengerError::Inconsistent(format!(
                        "search produced a trail failing the alternating conditions: {verdict:?}"
                    )));
                }
                system = augment(&quotient, &system, &trail)?;
            }
            TrailSearch::Exhausted { reach } => {
                return lift_separator(h, &concretizer, &system, &reach, a, b, mode, window);
            }
        }
    }
    let mut paths = Vec::new();
    for q in &system.paths {
        match concretizer.path(q) {
            Some(p) => paths.push(p),
            None => return Err(uncertified(window, format!("no concrete path follows {q}"))),
        }
    }
    match verify_paths(h, &paths, a, b, mode) {
        PathsVerdict::Ok => Ok(MengerAnswer::Paths {
            system: DisjointSystem { paths },
        }),
        PathsVerdict::Violation { path, reason } => {
            Err(uncertified(window, format!("path {} rejected: {reason}", paths[path])))
        }
    }
}

fn uncertified(window: u64, why: String) -> MengerError {
    MengerError::Uncertified(vec![format!("window {window}: {why}")])
}

#[allow(clippy::too_many_arguments)]
fn lift_separator(
    h: &SpaceHandle,
    concretizer: &Concretizer<'_>,
    system: &DisjointSystem,
    reach: &[crate::order::PointSet],
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    mode: Mode,
    window: u64,
) -> Result<MengerAnswer, MengerError> {
    let mut concrete = DisjointSystem::default();
    let mut lifted = Vec::new();
    for (q, r) in system.paths.iter().zip(reach) {
        let Some(p) = concretizer.path(q) else {
            return Err(uncertified(window, format!("no concrete path follows {q}")));
        };
        lifted.push(concretizer.lift_reach(q, r, &p));
        concrete.paths.push(p);
    }
    let mut certificate = extract_separator(&concrete, &lifted)?;
    certificate.verdict = verify_separator(h, &certificate.points, a, b, mode);
    match &certificate.verdict {
        SeparatorVerdict::Ok => Ok(MengerAnswer::Separator { certificate }),
        other => Err(uncertified(window, format!("separator {:?} rejected: {other:?}", certificate.points))),
    }
}

/// A member path from `x` to `y`, if one exists.
pub fn connecting_path(h: &SpaceHandle, x: &VertexId, y: &VertexId) -> Result<Option<SymbolicPath>, MengerError> {
    let (a, b) = (BTreeSet::from([x.clone()]), BTreeSet::from([y.clone()]));
    Ok(match menger(h, &a, &b, 1, Mode::EndpointsOnly)? {
        MengerAnswer::Paths { mut system } => system.paths.pop(),
        MengerAnswer::Separator { .. } => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Presentation;

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<VertexId> {
        names.iter().map(|s| v(s)).collect()
    }

    fn path(names: &[&str]) -> SymbolicPath {
        SymbolicPath::finite(names.iter().map(|s| v(s))).unwrap()
    }

    fn edges(directed: bool, es: &[(&str, &str)]) -> SpaceHandle {
        close(&Presentation::finite(directed, es.iter().map(|(a, b)| path(&[a, b])).collect())).unwrap()
    }

    #[test]
    fn disjoint_edges_give_two_paths() {
        let h = edges(true, &[("a1", "c1"), ("a2", "c2")]);
        let ans = menger(&h, &set(&["a1", "a2"]), &set(&["c1", "c2"]), 2, Mode::Strict).unwrap();
        let MengerAnswer::Paths { system } = ans else { panic!("{ans:?}") };
        assert_eq!(system.len(), 2);
    }

    #[test]
    fn star_centre_separates() {
        let h = edges(false, &[("x", "m"), ("y", "m"), ("m", "u"), ("m", "v")]);
        let ans = menger(&h, &set(&["x", "y"]), &set(&["u", "v"]), 2, Mode::Strict).unwrap();
        let MengerAnswer::Separator { certificate } = ans else { panic!("{ans:?}") };
        assert_eq!(certificate.points, set(&["m"]));
        assert_eq!(certificate.verdict, SeparatorVerdict::Ok);
    }

    #[test]
    fn separator_verifier_examples() {
        let h = close(&Presentation::finite(true, vec![path(&["a", "b", "c"])])).unwrap();
        let (a, c) = (set(&["a"]), set(&["c"]));
        assert_eq!(verify_separator(&h, &set(&["b"]), &a, &c, Mode::Strict), SeparatorVerdict::Ok);
        assert_eq!(
            verify_separator(&h, &BTreeSet::new(), &a, &c, Mode::Strict),
            SeparatorVerdict::Violation {
                witness: path(&["a", "b", "c"])
            }
        );
    }

    #[test]
    fn strict_mode_forbids_passing_through_b() {
        // a→b→c with B = {b, c}: the strict path is [a, b]; [a, b, c] is not.
        let h = close(&Presentation::finite(true, vec![path(&["a", "b", "c"])])).unwrap();
        let (a, b) = (set(&["a"]), set(&["b", "c"]));
        assert!(matches!(
            verify_paths(&h, &[path(&["a", "b", "c"])], &a, &b, Mode::Strict),
            PathsVerdict::Violation { .. }
        ));
        assert_eq!(
            verify_paths(&h, &[path(&["a", "b", "c"])], &a, &b, Mode::EndpointsOnly),
            PathsVerdict::Ok
        );
    }

    #[test]
    fn shared_endpoint_is_a_trivial_path() {
        let h = edges(true, &[("a", "b")]);
        let ans = menger(&h, &set(&["a"]), &set(&["a"]), 1, Mode::Strict).unwrap();
        let MengerAnswer::Paths { system } = ans else { panic!() };
        assert_eq!(system.paths, vec![SymbolicPath::point(v("a"))]);
    }

    #[test]
    fn connecting_path_follows_edges() {
        let h = edges(false, &[("a", "b"), ("c", "b")]);
        assert_eq!(connecting_path(&h, &v("a"), &v("c")).unwrap(), Some(path(&["a", "b", "c"])));
        let h = edges(true, &[("a", "b"), ("c", "b")]);
        assert_eq!(connecting_path(&h, &v("a"), &v("c")).unwrap(), None);
    }

    #[test]
    fn mode_round_trips() {
        for m in [Mode::Strict, Mode::EndpointsOnly] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
    }
}
