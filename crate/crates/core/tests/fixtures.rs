use pathspace::graph::{enumerate_paths, fixture, from_graph, oracle_menger, Digraph, FIXTURE_NAMES};
use pathspace::menger::{connecting_path, menger, MengerAnswer, Mode};
use pathspace::order::{Block, SymbolicPath, VertexId};
use pathspace::report::verify_answer;
use pathspace::space::{check_compatible, close, components, SpaceHandle};
use std::collections::BTreeSet;

fn v(s: &str) -> VertexId {
    s.parse().unwrap()
}

fn set(names: &[&str]) -> BTreeSet<VertexId> {
    names.iter().map(|s| v(s)).collect()
}

/// The dominated ray cut off after `r[n]`, with `r[n]` joined straight to the end.
fn truncated_dominated_ray(n: u64) -> Digraph {
    let mut edges: Vec<(VertexId, VertexId)> = [("a", "b"), ("a", "c"), ("a", "r[0]"), ("a", "apex"), ("apex", "b"), ("apex", "c"), ("d", "e"), ("d", "f")]
        .iter()
        .map(|(x, y)| (v(x), v(y)))
        .collect();
    for i in 0..=n {
        edges.push((v("apex"), VertexId::member("r", i)));
        if i < n {
            edges.push((VertexId::member("r", i), VertexId::member("r", i + 1)));
        }
    }
    edges.push((VertexId::member("r", n), v("d")));
    Digraph::new([], edges).unwrap().symmetric()
}

fn solve(name: &str, k: usize) -> (SpaceHandle, MengerAnswer) {
    let f = fixture(name).unwrap();
    let h = close(&f.presentation).unwrap();
    let ans = menger(&h, &f.a, &f.b, k, f.mode).unwrap();
    verify_answer(&h, &ans, &f.a, &f.b, k, f.mode).unwrap();
    (h, ans)
}

#[test]
fn truncations_of_the_dominated_ray_have_one_path_and_cut_d() {
    for n in 1..=8 {
        let g = truncated_dominated_ray(n);
        let (a, b) = (set(&["b", "c"]), set(&["e", "f"]));
        assert_eq!(oracle_menger(&g, &a, &b, Mode::Strict).0, 1, "truncation at {n}");
        let paths = enumerate_paths(&g, &a, &b, Mode::Strict);
        assert!(!paths.is_empty() && paths.iter().all(|p| p.contains(&v("d"))), "truncation at {n}");
    }
}

#[test]
fn dominated_ray_separator_is_d() {
    let f = fixture("dominated_ray").unwrap();
    assert_eq!(check_compatible(&f.presentation), Ok(()));
    let (_, ans) = solve("dominated_ray", 2);
    let MengerAnswer::Separator { certificate } = ans else { panic!("{ans:?}") };
    assert_eq!(certificate.points, set(&["d"]));
}

#[test]
fn dominated_ray_single_path_runs_through_the_ray_tail() {
    let (h, ans) = solve("dominated_ray", 1);
    let MengerAnswer::Paths { system } = ans else { panic!("{ans:?}") };
    let p = &system.paths[0];
    assert!(p.blocks().iter().any(|b| matches!(b, Block::OmegaUp { limit, .. } if *limit == v("d"))));
    let m = h.member(p);
    assert!(m.is_member);
    let pieces: Vec<SymbolicPath> = m.witness.iter().map(|w| w.segment.clone()).collect();
    let glued = pieces[1..].iter().try_fold(pieces[0].clone(), |acc, q| acc.concatenate(q)).unwrap();
    assert_eq!(&glued, p);
}

#[test]
fn other_fixtures() {
    let (_, ans) = solve("star", 2);
    assert!(matches!(ans, MengerAnswer::Separator { certificate } if certificate.points == set(&["c"])));
    let (_, ans) = solve("ray_with_end", 1);
    assert!(matches!(ans, MengerAnswer::Paths { system } if !system.paths[0].is_finite()));
    let (_, ans) = solve("long_concat_demo", 1);
    let MengerAnswer::Paths { system } = ans else { panic!() };
    let ups = system.paths[0].blocks().iter().filter(|b| matches!(b, Block::OmegaUp { .. })).count();
    assert_eq!(ups, 2);
    let (_, ans) = solve("graph_k4", 2);
    assert!(matches!(ans, MengerAnswer::Paths { system } if system.len() == 2));
    let (_, ans) = solve("graph_k4", 3);
    assert!(matches!(ans, MengerAnswer::Separator { certificate } if certificate.points.len() == 2));
}

#[test]
fn undirected_fixtures_are_connected() {
    for name in ["dominated_ray", "star", "graph_k4"] {
        let f = fixture(name).unwrap();
        assert_eq!(components(&f.presentation).unwrap().len(), 1, "{name}");
    }
    let h = close(&fixture("dominated_ray").unwrap().presentation).unwrap();
    for (x, y) in [("e", "b"), ("r[3]", "f"), ("apex", "d")] {
        let p = connecting_path(&h, &v(x), &v(y)).unwrap().unwrap();
        assert_eq!((p.first(), p.last()), (v(x), v(y)));
        assert!(h.member(&p).is_member);
    }
}

#[test]
fn k4_matches_the_oracle() {
    let f = fixture("graph_k4").unwrap();
    let g = pathspace::graph::to_digraph(&f.presentation).unwrap();
    assert_eq!(from_graph(&g).generators.len(), 12);
    assert_eq!(oracle_menger(&g, &f.a, &f.b, Mode::Strict).0, 2);
}

#[test]
fn every_fixture_loads() {
    for name in FIXTURE_NAMES {
        assert!(close(&fixture(name).unwrap().presentation).is_ok(), "{name}");
    }
}
