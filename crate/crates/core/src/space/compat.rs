use super::{Presentation, Source};
use crate::order::{Completeness, PointSet};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Two paths whose intersection is not complete in one of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub first: Source,
    pub second: Source,
    /// Points of `first` forming a tail whose limit is missing from the intersection.
    pub witness: PointSet,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} and {} meet in an infinite set whose limit is not shared",
            self.first, self.second
        )
    }
}

/// Checks that every two generating paths meet in a complete subset of each.
///
/// Only pairs sharing an ω-progression family can fail. Schema instances are
/// checked up to the presentation's reach; past it, instance pairs repeat the
/// pattern of some pair inside it up to a common index shift.
pub fn check_compatible(pres: &Presentation) -> Result<(), Violation> {
    let groups: Vec<_> = pres
        .groups(pres.reach())
        .into_iter()
        .filter(|(_, p)| !p.is_finite())
        .collect();
    for (i, (sa, pa)) in groups.iter().enumerate() {
        for (sb, pb) in &groups[i + 1..] {
            for (x, sx, y, sy) in [(pa, sa, pb, sb), (pb, sb, pa, sa)] {
                let meet = x.intersect(y);
                if let Ok(Completeness::Incomplete { witness }) = x.is_complete_in(&meet) {
                    return Err(Violation {
                        first: *sx,
                        second: *sy,
                        witness,
                    });
                }
            }
        }
    }
    Ok(())
}
