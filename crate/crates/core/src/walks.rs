//! Trails as finite chains of oriented segments, the space a trail induces,
//! and the conditions making a trail alternating with respect to a system of
//! disjoint paths.

use crate::order::{Position, SymbolicPath, VertexId};
use crate::space::{Presentation, SpaceHandle};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// The segment is a member path, traversed in its own order.
    Forward,
    /// The segment is traversed against the order of a member path.
    Reversed,
}

/// One step of a trail. `segment` lists the points in the order the trail
/// visits them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub segment: SymbolicPath,
    pub orientation: Orientation,
}

impl Step {
    pub fn forward(segment: SymbolicPath) -> Self {
        Step {
            segment,
            orientation: Orientation::Forward,
        }
    }

    pub fn reversed(segment: SymbolicPath) -> Self {
        Step {
            segment,
            orientation: Orientation::Reversed,
        }
    }

    /// The member path this step runs along, in the member's own order.
    pub fn member_path(&self) -> SymbolicPath {
        match self.orientation {
            Orientation::Forward => self.segment.clone(),
            Orientation::Reversed => self.segment.reverse(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("a trail needs at least one step")]
    Empty,
    #[error("step {step} ends at {end} but step {} starts at {start}", step + 1)]
    BrokenChain { step: usize, end: VertexId, start: VertexId },
}

/// A finite chain of oriented segments, each starting where the previous ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Step>", into = "Vec<Step>")]
pub struct Trail {
    steps: Vec<Step>,
}

impl TryFrom<Vec<Step>> for Trail {
    type Error = WalkError;
    fn try_from(steps: Vec<Step>) -> Result<Self, WalkError> {
        Trail::new(steps)
    }
}

impl From<Trail> for Vec<Step> {
    fn from(t: Trail) -> Self {
        t.steps
    }
}

impl Trail {
    pub fn new(steps: Vec<Step>) -> Result<Self, WalkError> {
        if steps.is_empty() {
            return Err(WalkError::Empty);
        }
        for (i, w) in steps.windows(2).enumerate() {
            let (end, start) = (w[0].segment.last(), w[1].segment.first());
            if end != start {
                return Err(WalkError::BrokenChain { step: i, end, start });
            }
        }
        Ok(Trail { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn first(&self) -> VertexId {
        self.steps[0].segment.first()
    }

    pub fn last(&self) -> VertexId {
        self.steps.last().unwrap().segment.last()
    }

    /// The first `n` steps.
    pub fn prefix(&self, n: usize) -> Result<Trail, WalkError> {
        Trail::new(self.steps[..n.min(self.steps.len())].to_vec())
    }

    /// The visited points as one path, when no point is visited twice.
    pub fn as_path(&self) -> Option<SymbolicPath> {
        let mut acc = self.steps[0].segment.clone();
        for s in &self.steps[1..] {
            acc = acc.concatenate(&s.segment).ok()?;
        }
        Some(acc)
    }

    /// Visited vertices with family index at most `bound`, in visiting order,
    /// junctions listed once.
    pub fn truncated_vertices(&self, bound: u64) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            let vs = s.segment.truncated_vertices(bound);
            let skip = usize::from(i > 0 && vs.first() == out.last());
            out.extend(vs.into_iter().skip(skip));
        }
        out
    }
}

impl fmt::Display for Trail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            let mark = match s.orientation {
                Orientation::Forward => "",
                Orientation::Reversed => "rev ",
            };
            write!(f, "{mark}{}", s.segment)?;
        }
        Ok(())
    }
}

/// The space generated by the member paths the trail runs along.
///
/// It is finitary (finitely many generators) and connected since consecutive
/// steps share their junction point.
pub fn induced_space(t: &Trail, directed: bool) -> Presentation {
    Presentation::finite(directed, t.steps.iter().map(Step::member_path).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TrailVerdict {
    Ok,
    NotMember { step: usize, reason: String },
    Repeated { first: usize, second: usize, pair: (VertexId, VertexId) },
}

/// Checks membership of every step and that no consecutive pair is traversed
/// twice, in the same or opposite direction.
pub fn verify_trail(t: &Trail, h: &SpaceHandle) -> TrailVerdict {
    for (i, s) in t.steps.iter().enumerate() {
        let m = h.member(&s.member_path());
        if !m.is_member {
            return TrailVerdict::NotMember {
                step: i,
                reason: m.reason.unwrap_or_default(),
            };
        }
    }
    for i in 0..t.steps.len() {
        for k in i + 1..t.steps.len() {
            if let Some(pair) = t.steps[i].segment.shared_pair_witness(&t.steps[k].segment) {
                return TrailVerdict::Repeated {
                    first: i,
                    second: k,
                    pair,
                };
            }
        }
    }
    TrailVerdict::Ok
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AlternatingVerdict {
    Ok,
    Violated { condition: u8, step: Option<usize>, witness: String },
}

impl AlternatingVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, AlternatingVerdict::Ok)
    }
}

fn on_system(system: &[SymbolicPath], v: &VertexId) -> bool {
    system.iter().any(|p| p.contains(v))
}

/// Whether the step runs backwards along a segment of one system path.
pub fn runs_back_along(system: &[SymbolicPath], segment: &SymbolicPath) -> bool {
    if segment.is_trivial() {
        return false;
    }
    system.iter().any(|p| {
        p.contains(&segment.first())
            && p.contains(&segment.last())
            && p.segment_between(&segment.last(), &segment.first()).ok().as_ref() == Some(&segment.reverse())
    })
}

/// A few points of the set `step ∩ other`, enough to decide questions that
/// are constant along a progression once the progression is known to be
/// shared or not.
fn shared_points(step: &SymbolicPath, other: &SymbolicPath) -> Vec<VertexId> {
    let meet = step.intersect(other);
    let mut out: Vec<VertexId> = meet.explicit.iter().map(|&p| step.vertex_at(p).unwrap()).collect();
    for tail in &meet.tails {
        for n in 0..4 {
            let p = crate::order::PointRef::new(tail.block, Position::Member(tail.progression.apply(n)));
            out.push(step.vertex_at(p).unwrap());
        }
    }
    out
}

/// Checks the five conditions for `t` to be alternating with respect to the
/// disjoint paths `system`, starting from `a`.
pub fn check_alternating(
    t: &Trail,
    system: &[SymbolicPath],
    a: &BTreeSet<VertexId>,
    h: &SpaceHandle,
) -> AlternatingVerdict {
    let violated = |condition: u8, step: Option<usize>, witness: String| AlternatingVerdict::Violated {
        condition,
        step,
        witness,
    };
    let first = t.first();
    if !a.contains(&first) || on_system(system, &first) {
        return violated(1, Some(0), format!("trail starts at {first}, which is not in A minus the system"));
    }

    let backwards: Vec<bool> = t.steps.iter().map(|s| runs_back_along(system, &s.segment)).collect();
    for (i, s) in t.steps.iter().enumerate() {
        if backwards[i] {
            continue;
        }
        if let Some((u, v)) = system.iter().find_map(|p| s.segment.shared_pair_witness(p)) {
            return violated(
                2,
                Some(i),
                format!("step {i} shares the pair {u},{v} with the system without running back along it"),
            );
        }
        if h.is_directed() && s.orientation == Orientation::Reversed && !s.segment.is_trivial() {
            return violated(
                2,
                Some(i),
                format!("step {i} runs against a path that shares no segment with the system"),
            );
        }
    }

    // (3): off-system points at most once
    for i in 0..t.steps.len() {
        for k in i + 1..t.steps.len() {
            let junction = (k == i + 1).then(|| t.steps[k].segment.first());
            for v in shared_points(&t.steps[i].segment, &t.steps[k].segment) {
                if Some(&v) != junction.as_ref() && !on_system(system, &v) {
                    return violated(3, Some(k), format!("{v} is visited twice"));
                }
            }
        }
    }

    // (4): system points are covered by backward steps, except the final one
    let last = t.last();
    for (i, s) in t.steps.iter().enumerate() {
        for p in system {
            for v in shared_points(&s.segment, p) {
                if v == last {
                    continue;
                }
                let covered = t
                    .steps
                    .iter()
                    .zip(&backwards)
                    .any(|(st, &back)| back && st.segment.contains(&v));
                if !covered {
                    return violated(
                        4,
                        Some(i),
                        format!("system point {v} is met outside every backward step"),
                    );
                }
            }
        }
    }
    // (5) holds for every finite chain: each step meets each system path in
    // finitely many intervals, the number of blocks bounding it.
    AlternatingVerdict::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{close, components};

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn path(names: &[&str]) -> SymbolicPath {
        SymbolicPath::finite(names.iter().map(|s| v(s))).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<VertexId> {
        names.iter().map(|s| v(s)).collect()
    }

    fn edges(es: &[(&str, &str)]) -> SpaceHandle {
        close(&Presentation::finite(true, es.iter().map(|(a, b)| path(&[a, b])).collect())).unwrap()
    }

    #[test]
    fn broken_chain_is_rejected() {
        let err = Trail::new(vec![Step::forward(path(&["a", "b"])), Step::forward(path(&["c", "d"]))]);
        assert_eq!(
            err,
            Err(WalkError::BrokenChain {
                step: 0,
                end: v("b"),
                start: v("c")
            })
        );
    }

    #[test]
    fn induced_space_is_connected() {
        let t = Trail::new(vec![Step::forward(path(&["a", "b"])), Step::forward(path(&["b", "c"]))]).unwrap();
        let p = induced_space(&t, true);
        assert_eq!(p.generators.len(), 2);
        assert_eq!(components(&p).unwrap().len(), 1);
    }

    #[test]
    fn trail_verdicts() {
        let h = close(&Presentation::finite(false, vec![path(&["a", "b", "c"])])).unwrap();
        let back = Trail::new(vec![Step::forward(path(&["a", "b"])), Step::forward(path(&["b", "a"]))]).unwrap();
        assert!(matches!(verify_trail(&back, &h), TrailVerdict::Repeated { .. }));
        let ok = Trail::new(vec![Step::forward(path(&["a", "b"])), Step::forward(path(&["b", "c"]))]).unwrap();
        assert_eq!(verify_trail(&ok, &h), TrailVerdict::Ok);
        let skip = Trail::new(vec![Step::forward(path(&["a", "c"]))]).unwrap();
        assert!(matches!(verify_trail(&skip, &h), TrailVerdict::NotMember { step: 0, .. }));
    }

    #[test]
    fn empty_system_trail_is_alternating() {
        let h = edges(&[("a", "b"), ("b", "c")]);
        let t = Trail::new(vec![Step::forward(path(&["a", "b", "c"]))]).unwrap();
        assert_eq!(check_alternating(&t, &[], &set(&["a"]), &h), AlternatingVerdict::Ok);
        assert!(matches!(
            check_alternating(&t, &[], &set(&["b"]), &h),
            AlternatingVerdict::Violated { condition: 1, .. }
        ));
    }

    #[test]
    fn entering_system_without_turning_back_violates_four() {
        // system x→y→z; trail s→y→t passes through y without a backward step
        let h = edges(&[("x", "y"), ("y", "z"), ("s", "y"), ("y", "t")]);
        let system = vec![path(&["x", "y", "z"])];
        let t = Trail::new(vec![Step::forward(path(&["s", "y"])), Step::forward(path(&["y", "t"]))]).unwrap();
        assert!(matches!(
            check_alternating(&t, &system, &set(&["s"]), &h),
            AlternatingVerdict::Violated { condition: 4, .. }
        ));
        // turning back along y→x is fine, and x may be the final point
        let good = Trail::new(vec![Step::forward(path(&["s", "y"])), Step::reversed(path(&["y", "x"]))]).unwrap();
        assert_eq!(check_alternating(&good, &system, &set(&["s"]), &h), AlternatingVerdict::Ok);
    }

    #[test]
    fn revisiting_off_system_point_violates_three() {
        let h = edges(&[("a", "b"), ("b", "c"), ("c", "b")]);
        let t = Trail::new(vec![Step::forward(path(&["a", "b", "c"])), Step::forward(path(&["c", "b"]))]).unwrap();
        assert_eq!(
            check_alternating(&t, &[], &set(&["a"]), &h),
            AlternatingVerdict::Violated {
                condition: 3,
                step: Some(1),
                witness: "b is visited twice".into()
            }
        );
    }

    #[test]
    fn walking_forward_along_system_violates_two() {
        let h = edges(&[("s", "x"), ("x", "y")]);
        let system = vec![path(&["x", "y"])];
        let t = Trail::new(vec![Step::forward(path(&["s", "x", "y"]))]).unwrap();
        assert!(matches!(
            check_alternating(&t, &system, &set(&["s"]), &h),
            AlternatingVerdict::Violated { condition: 2, .. }
        ));
    }
}
