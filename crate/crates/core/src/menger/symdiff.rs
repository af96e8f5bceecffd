use super::MengerError;
use crate::order::SymbolicPath;
use crate::space::{close, delete, Presentation};

/// The closure of `a ∪ b` with every path that shares a nontrivial segment
/// with both spaces removed.
///
/// Consecutive pairs count as shared in either direction, so a segment and
/// its inverse cancel. Schema instances of one side are matched against the
/// other up to the union's reach.
pub fn symmetric_difference(a: &Presentation, b: &Presentation) -> Result<Presentation, MengerError> {
    let directed = a.directed && b.directed;
    let union = Presentation::new(
        directed,
        a.generators.iter().chain(&b.generators).cloned().collect(),
        a.schemas.iter().chain(&b.schemas).cloned().collect(),
    );
    close(&union)?;
    let bound = union.reach();
    let instances = |p: &Presentation| -> Vec<SymbolicPath> { p.groups(bound).into_iter().map(|(_, q)| q).collect() };
    let left = delete(&Presentation { directed, ..a.clone() }, &instances(b))?;
    let right = delete(&Presentation { directed, ..b.clone() }, &instances(a))?;
    Ok(Presentation::new(
        directed,
        left.generators.into_iter().chain(right.generators).collect(),
        left.schemas.into_iter().chain(right.schemas).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::VertexId;

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    fn path(names: &[&str]) -> SymbolicPath {
        SymbolicPath::finite(names.iter().map(|s| v(s))).unwrap()
    }

    fn nontrivial(p: &Presentation) -> Vec<SymbolicPath> {
        p.generators.iter().filter(|g| !g.is_trivial()).cloned().collect()
    }

    #[test]
    fn shared_segment_cancels() {
        let a = Presentation::finite(true, vec![path(&["x", "y", "z"])]);
        let b = Presentation::finite(true, vec![path(&["y", "z"])]);
        assert_eq!(nontrivial(&symmetric_difference(&a, &b).unwrap()), vec![path(&["x", "y"])]);
    }

    #[test]
    fn self_difference_has_no_nontrivial_paths() {
        let a = Presentation::finite(true, vec![path(&["x", "y", "z"]), path(&["z", "w"])]);
        let d = symmetric_difference(&a, &a).unwrap();
        assert!(nontrivial(&d).is_empty());
        assert!(d.contains_vertex(&v("y")));
    }

    #[test]
    fn disjoint_spaces_are_united() {
        let a = Presentation::finite(true, vec![path(&["p", "q"])]);
        let b = Presentation::finite(true, vec![path(&["r", "s"])]);
        assert_eq!(nontrivial(&symmetric_difference(&a, &b).unwrap()), vec![path(&["p", "q"]), path(&["r", "s"])]);
    }

    #[test]
    fn inverse_segments_cancel() {
        let a = Presentation::finite(true, vec![path(&["x", "y", "z"])]);
        let b = Presentation::finite(true, vec![path(&["z", "y"])]);
        assert_eq!(nontrivial(&symmetric_difference(&a, &b).unwrap()), vec![path(&["x", "y"])]);
    }
}
