//! Running a document's directives and re-checking the resulting report.

use crate::document::{Directive, Document};
use crate::menger::{
    menger, verify_paths, verify_separator, MengerAnswer, Mode, PathsVerdict, SeparatorVerdict,
};
use crate::space::{check_compatible, close, components, Component, SpaceHandle, Violation};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SolveOutcome {
    Answer { answer: MengerAnswer, verified: bool },
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "directive", rename_all = "snake_case")]
pub enum Entry {
    CheckCompatible {
        compatible: bool,
        violation: Option<Violation>,
    },
    Components {
        components: Option<Vec<Component>>,
        error: Option<String>,
    },
    Solve {
        a: String,
        b: String,
        k: usize,
        mode: Mode,
        #[serde(flatten)]
        outcome: SolveOutcome,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub entries: Vec<Entry>,
}

impl Report {
    /// Whether every solve produced an answer that passed its verifier.
    pub fn all_verified(&self) -> bool {
        self.entries.iter().all(|e| match e {
            Entry::Solve { outcome, .. } => matches!(outcome, SolveOutcome::Answer { verified: true, .. }),
            _ => true,
        })
    }

    /// One line per entry.
    pub fn summary(&self) -> String {
        let mut lines = Vec::new();
        for e in &self.entries {
            lines.push(match e {
                Entry::CheckCompatible { compatible, .. } => {
                    format!("compatible: {}", if *compatible { "yes" } else { "no" })
                }
                Entry::Components { components: Some(cs), .. } => format!("components: {}", cs.len()),
                Entry::Components { error: e, .. } => format!("components: error: {}", e.clone().unwrap_or_default()),
                Entry::Solve { a, b, k, mode, outcome } => {
                    let head = format!("menger {a} {b} k={k} {mode}:");
                    match outcome {
                        SolveOutcome::Answer { answer, verified } => {
                            let tag = if *verified { "verified" } else { "NOT VERIFIED" };
                            match answer {
                                MengerAnswer::Paths { system } => {
                                    let ps: Vec<String> = system.paths.iter().map(ToString::to_string).collect();
                                    format!("{head} {} disjoint paths ({tag})\n  {}", ps.len(), ps.join("\n  "))
                                }
                                MengerAnswer::Separator { certificate } => {
                                    let pts: Vec<String> = certificate.points.iter().map(ToString::to_string).collect();
                                    format!("{head} separator {{{}}} ({tag})", pts.join(", "))
                                }
                            }
                        }
                        SolveOutcome::Error { message } => format!("{head} error: {message}"),
                    }
                }
            });
        }
        lines.join("\n")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("the presentation is not compatible: {0}")]
    Space(#[from] crate::space::SpaceError),
}

fn sets_of(doc: &Document, a: &str, b: &str) -> (BTreeSet<crate::order::VertexId>, BTreeSet<crate::order::VertexId>) {
    (doc.sets[a].clone(), doc.sets[b].clone())
}

/// Checks an answer against the space independently of how it was found.
pub fn verify_answer(
    h: &SpaceHandle,
    answer: &MengerAnswer,
    a: &BTreeSet<crate::order::VertexId>,
    b: &BTreeSet<crate::order::VertexId>,
    k: usize,
    mode: Mode,
) -> Result<(), String> {
    match answer {
        MengerAnswer::Paths { system } => {
            if system.paths.len() != k {
                return Err(format!("{} paths where {k} were asked for", system.paths.len()));
            }
            match verify_paths(h, &system.paths, a, b, mode) {
                PathsVerdict::Ok => Ok(()),
                PathsVerdict::Violation { path, reason } => Err(format!("path {path}: {reason}")),
            }
        }
        MengerAnswer::Separator { certificate } => {
            if certificate.points.len() >= k {
                return Err(format!("separator of size {} is not below {k}", certificate.points.len()));
            }
            for (p, x) in certificate.system.iter().zip(&certificate.origin) {
                if !p.contains(x) {
                    return Err(format!("chosen point {x} is not on {p}"));
                }
            }
            match verify_separator(h, &certificate.points, a, b, mode) {
                SeparatorVerdict::Ok => Ok(()),
                other => Err(format!("{other:?}")),
            }
        }
    }
}

/// Executes every directive in order.
pub fn run(doc: &Document) -> Result<Report, RunError> {
    let mut entries = Vec::new();
    let mut handle: Option<SpaceHandle> = None;
    let mut space = || -> Result<SpaceHandle, RunError> {
        if handle.is_none() {
            handle = Some(close(&doc.presentation)?);
        }
        Ok(handle.clone().unwrap())
    };
    for d in &doc.directives {
        entries.push(match d {
            Directive::CheckCompatible => {
                let verdict = check_compatible(&doc.presentation);
                Entry::CheckCompatible {
                    compatible: verdict.is_ok(),
                    violation: verdict.err(),
                }
            }
            Directive::Components => match components(&doc.presentation) {
                Ok(cs) => Entry::Components {
                    components: Some(cs),
                    error: None,
                },
                Err(e) => Entry::Components {
                    components: None,
                    error: Some(e.to_string()),
                },
            },
            Directive::Solve { a, b, k, mode } => {
                let h = space()?;
                let (sa, sb) = sets_of(doc, a, b);
                let outcome = match menger(&h, &sa, &sb, *k, *mode) {
                    Ok(answer) => {
                        let verified = verify_answer(&h, &answer, &sa, &sb, *k, *mode).is_ok();
                        SolveOutcome::Answer { answer, verified }
                    }
                    Err(e) => SolveOutcome::Error { message: e.to_string() },
                };
                Entry::Solve {
                    a: a.clone(),
                    b: b.clone(),
                    k: *k,
                    mode: *mode,
                    outcome,
                }
            }
        });
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        entries,
    })
}

/// Re-checks every answer in `report` against `doc`; one result per solve entry.
pub fn verify_report(doc: &Document, report: &Report) -> Result<Vec<Result<(), String>>, RunError> {
    let h = close(&doc.presentation)?;
    let mut out = Vec::new();
    for e in &report.entries {
        if let Entry::Solve { a, b, k, mode, outcome } = e {
            out.push(match outcome {
                SolveOutcome::Answer { answer, .. } => match (doc.sets.get(a), doc.sets.get(b)) {
                    (Some(sa), Some(sb)) => verify_answer(&h, answer, sa, sb, *k, *mode),
                    _ => Err(format!("unknown set {a} or {b}")),
                },
                SolveOutcome::Error { message } => Err(message.clone()),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::{fixture_document, parse};
    use crate::graph::fixture;

    #[test]
    fn star_document_gives_a_size_one_separator() {
        let doc = fixture_document(&fixture("star").unwrap());
        let report = run(&doc).unwrap();
        assert!(report.all_verified());
        let Entry::Solve {
            outcome: SolveOutcome::Answer {
                answer: MengerAnswer::Separator { certificate },
                ..
            },
            ..
        } = &report.entries[1]
        else {
            panic!("{report:?}")
        };
        assert_eq!(certificate.points.len(), 1);
    }

    #[test]
    fn report_survives_json_and_reverifies() {
        let doc = fixture_document(&fixture("dominated_ray").unwrap());
        let report = run(&doc).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(verify_report(&doc, &back).unwrap().iter().all(Result::is_ok));
    }

    #[test]
    fn tampered_certificate_fails() {
        let doc = parse("space directed\npath a b c\nset A = {a}\nset B = {c}\nsolve menger A B 2\n").unwrap();
        let mut report = run(&doc).unwrap();
        if let Entry::Solve {
            outcome: SolveOutcome::Answer {
                answer: MengerAnswer::Separator { certificate },
                ..
            },
            ..
        } = &mut report.entries[0]
        {
            certificate.points.clear();
        } else {
            panic!()
        }
        assert!(verify_report(&doc, &report).unwrap()[0].is_err());
    }

    #[test]
    fn incompatible_presentation_is_an_error() {
        // the two rays meet in every r[i] but only one reaches d
        let doc = parse(
            "space directed\npath\n  omega r 1 0 limit d\nend\npath\n  omega r 1 0 limit e\nend\nset A = {d}\nsolve menger A A 1\n",
        )
        .unwrap();
        assert!(run(&doc).is_err());
    }
}
