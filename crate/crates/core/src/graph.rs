//! Finite (di)graphs as path spaces, a max-flow oracle for disjoint paths,
//! named fixtures and seeded random instances.

use crate::menger::Mode;
use crate::order::{Block, IndexMap, SymbolicPath, VertexId};
use crate::space::{IndexExpr, PathSchema, Presentation, TemplateBlock, TemplateVertex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at {0}")]
    SelfLoop(VertexId),
    #[error("not a graph-representable space: {0}")]
    NotRepresentable(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<(VertexId, VertexId)>,
}

impl Digraph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut g = Digraph {
            vertices: vertices.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for (u, w) in edges {
            if u == w {
                return Err(GraphError::SelfLoop(u));
            }
            g.vertices.insert(u.clone());
            g.vertices.insert(w.clone());
            g.edges.insert((u, w));
        }
        Ok(g)
    }

    /// Every edge in both orientations.
    pub fn symmetric(&self) -> Digraph {
        let mut g = self.clone();
        g.edges.extend(self.edges.iter().map(|(u, w)| (w.clone(), u.clone())));
        g
    }

    fn successors(&self) -> BTreeMap<&VertexId, Vec<&VertexId>> {
        let mut out: BTreeMap<&VertexId, Vec<&VertexId>> = BTreeMap::new();
        for (u, w) in &self.edges {
            out.entry(u).or_default().push(w);
        }
        out
    }
}

fn presentation_of(g: &Digraph, directed: bool) -> Presentation {
    let mut gens: Vec<SymbolicPath> = g
        .edges
        .iter()
        .map(|(u, w)| SymbolicPath::finite([u.clone(), w.clone()]).expect("no self-loops"))
        .collect();
    let touched: BTreeSet<&VertexId> = g.edges.iter().flat_map(|(u, w)| [u, w]).collect();
    gens.extend(g.vertices.iter().filter(|v| !touched.contains(v)).cloned().map(SymbolicPath::point));
    Presentation::finite(directed, gens)
}

/// The dipath space of `g`.
pub fn from_digraph(g: &Digraph) -> Presentation {
    presentation_of(g, true)
}

/// The path space of `g` read as an undirected graph.
pub fn from_graph(g: &Digraph) -> Presentation {
    presentation_of(g, false)
}

/// Vertices and 2-point segments of a presentation whose paths are all finite.
pub fn to_digraph(pres: &Presentation) -> Result<Digraph, GraphError> {
    if !pres.is_finite() {
        return Err(GraphError::NotRepresentable(
            "the presentation has ω-blocks or schemas".into(),
        ));
    }
    let mut g = Digraph::default();
    for p in &pres.generators {
        let vs = p.finite_vertices().unwrap();
        g.vertices.extend(vs.iter().cloned());
        for w in vs.windows(2) {
            g.edges.insert((w[0].clone(), w[1].clone()));
        }
    }
    Ok(if pres.directed { g } else { g.symmetric() })
}

/// Size of a largest set of disjoint `A`–`B` paths and a smallest set
/// meeting all of them, by unit-capacity max-flow on the split digraph.
pub fn oracle_menger(
    g: &Digraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    mode: Mode,
) -> (usize, BTreeSet<VertexId>) {
    let names: Vec<&VertexId> = g.vertices.iter().collect();
    let index: BTreeMap<&VertexId, usize> = names.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = names.len();
    // v_in = 2i, v_out = 2i + 1, source 2n, sink 2n + 1
    let (s, t) = (2 * n, 2 * n + 1);
    let big = n as i64 + 1;
    let mut cap = vec![vec![0i64; 2 * n + 2]; 2 * n + 2];
    for i in 0..n {
        cap[2 * i][2 * i + 1] = 1;
    }
    for (u, w) in &g.edges {
        if mode == Mode::Strict && (a.contains(w) || b.contains(u)) {
            continue;
        }
        cap[2 * index[u] + 1][2 * index[w]] = big;
    }
    for v in a.iter().filter_map(|v| index.get(v)) {
        cap[s][2 * v] = big;
    }
    for v in b.iter().filter_map(|v| index.get(v)) {
        cap[2 * v + 1][t] = big;
    }

    let size = 2 * n + 2;
    let mut flow = 0usize;
    loop {
        let mut prev = vec![usize::MAX; size];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for y in 0..size {
                if prev[y] == usize::MAX && cap[x][y] > 0 {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[t] == usize::MAX {
            let cut = (0..n)
                .filter(|&i| prev[2 * i] != usize::MAX && prev[2 * i + 1] == usize::MAX)
                .map(|i| names[i].clone())
                .collect();
            return (flow, cut);
        }
        let mut y = t;
        while y != s {
            let x = prev[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
}

/// All simple `A`–`B` paths of `g`, by depth-first enumeration.
pub fn enumerate_paths(g: &Digraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>, mode: Mode) -> Vec<Vec<VertexId>> {
    let succ = g.successors();
    let mut out = Vec::new();
    fn go<'g>(
        stack: &mut Vec<&'g VertexId>,
        succ: &BTreeMap<&'g VertexId, Vec<&'g VertexId>>,
        a: &BTreeSet<VertexId>,
        b: &BTreeSet<VertexId>,
        mode: Mode,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        let v = *stack.last().unwrap();
        if b.contains(v) {
            out.push(stack.iter().map(|v| (*v).clone()).collect());
            if mode == Mode::Strict {
                return;
            }
        }
        for w in succ.get(v).into_iter().flatten() {
            if stack.contains(w) || (mode == Mode::Strict && a.contains(*w)) {
                continue;
            }
            stack.push(w);
            go(stack, succ, a, b, mode, out);
            stack.pop();
        }
    }
    for v in g.vertices.iter().filter(|v| a.contains(*v)) {
        go(&mut vec![v], &succ, a, b, mode, &mut out);
    }
    out
}

/// Exhaustive counterpart of [`oracle_menger`] for small graphs: the largest
/// family of disjoint paths and the size of a smallest meeting set.
pub fn brute_force_menger(g: &Digraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>, mode: Mode) -> (usize, usize) {
    let paths: Vec<BTreeSet<VertexId>> = enumerate_paths(g, a, b, mode)
        .into_iter()
        .map(|p| p.into_iter().collect())
        .collect();
    fn pack(paths: &[BTreeSet<VertexId>], used: &BTreeSet<VertexId>) -> usize {
        let Some((first, rest)) = paths.split_first() else { return 0 };
        let skip = pack(rest, used);
        if first.is_disjoint(used) {
            let mut more = used.clone();
            more.extend(first.iter().cloned());
            skip.max(1 + pack(rest, &more))
        } else {
            skip
        }
    }
    let packing = pack(&paths, &BTreeSet::new());
    let vs: Vec<&VertexId> = g.vertices.iter().collect();
    let mut best = vs.len();
    for mask in 0u32..(1 << vs.len()) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let chosen: BTreeSet<&VertexId> = (0..vs.len()).filter(|i| mask >> i & 1 == 1).map(|i| vs[i]).collect();
        if paths.iter().all(|p| p.iter().any(|v| chosen.contains(v))) {
            best = size;
        }
    }
    (packing, best)
}

/// Random digraph on `v0 … v{n-1}` with each ordered pair an edge with
/// probability `density`.
pub fn random_digraph(n: usize, density: f64, rng: &mut impl Rng) -> Digraph {
    let vs: Vec<VertexId> = (0..n).map(|i| VertexId::atom(format!("v{i}"))).collect();
    let mut edges = Vec::new();
    for u in &vs {
        for w in &vs {
            if u != w && rng.gen_bool(density) {
                edges.push((u.clone(), w.clone()));
            }
        }
    }
    Digraph::new(vs, edges).expect("no self-loops drawn")
}

/// A random digraph with random nonempty terminal sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomInstance {
    pub seed: u64,
    pub density: f64,
    pub graph: Digraph,
    pub a: BTreeSet<VertexId>,
    pub b: BTreeSet<VertexId>,
}

pub fn random_instance(seed: u64, max_n: usize, densities: (f64, f64)) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n.max(2));
    let density = rng.gen_range(densities.0..=densities.1);
    let graph = random_digraph(n, density, &mut rng);
    let vs: Vec<&VertexId> = graph.vertices.iter().collect();
    let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<VertexId> {
        let size = rng.gen_range(1..=(n / 2).max(1));
        (0..size).map(|_| vs[rng.gen_range(0..n)].clone()).collect()
    };
    let a = pick(&mut rng);
    let b = pick(&mut rng);
    RandomInstance {
        seed,
        density,
        graph,
        a,
        b,
    }
}

/// A directed ray `from < f(0) < f(s) < f(2s) < … < to` glued into a digraph,
/// optionally with `hub → f(sj)` for every `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluedRay {
    pub family: String,
    pub stride: u64,
    pub from: VertexId,
    pub to: VertexId,
    pub hub: Option<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayInstance {
    pub seed: u64,
    pub graph: Digraph,
    pub rays: Vec<GluedRay>,
    pub a: BTreeSet<VertexId>,
    pub b: BTreeSet<VertexId>,
}

impl RayInstance {
    pub fn presentation(&self) -> Presentation {
        let mut pres = from_digraph(&self.graph);
        for r in &self.rays {
            let map = IndexMap::new(r.stride, 0).expect("positive stride");
            pres.generators.push(
                SymbolicPath::new(vec![Block::finite([r.from.clone()]), Block::omega_up(&r.family, map, r.to.clone())])
                    .expect("glued ray"),
            );
            if let Some(h) = &r.hub {
                let spokes = PathSchema::new(
                    "j",
                    map,
                    vec![TemplateBlock::Finite {
                        vertices: vec![h.clone().into(), member(&r.family, IndexExpr::var_plus(0))],
                    }],
                )
                .expect("spoke schema");
                pres.schemas.push(spokes);
            }
        }
        pres
    }

    /// The digraph with each ray replaced by edges into its end: a path that
    /// enters a ray can only leave it through the end.
    pub fn reduced(&self) -> Digraph {
        let mut g = self.graph.clone();
        for r in &self.rays {
            g.edges.insert((r.from.clone(), r.to.clone()));
            if let Some(h) = &r.hub {
                g.edges.insert((h.clone(), r.to.clone()));
            }
        }
        g
    }
}

pub fn random_ray_instance(seed: u64, max_n: usize, densities: (f64, f64)) -> RayInstance {
    let base = random_instance(seed, max_n.max(3), densities);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_7a75);
    let vs: Vec<VertexId> = base.graph.vertices.iter().cloned().collect();
    let mut rays = Vec::new();
    for i in 0..rng.gen_range(1..=2) {
        let from = vs[rng.gen_range(0..vs.len())].clone();
        let to = loop {
            let w = &vs[rng.gen_range(0..vs.len())];
            if *w != from {
                break w.clone();
            }
        };
        let hub = if rng.gen_bool(0.5) {
            Some(vs[rng.gen_range(0..vs.len())].clone()).filter(|h| *h != to)
        } else {
            None
        };
        rays.push(GluedRay {
            family: format!("f{i}"),
            stride: rng.gen_range(1..=3),
            from,
            to,
            hub,
        });
    }
    RayInstance {
        seed,
        graph: base.graph,
        rays,
        a: base.a,
        b: base.b,
    }
}

/// A named presentation with terminals and a default `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub presentation: Presentation,
    pub a: BTreeSet<VertexId>,
    pub b: BTreeSet<VertexId>,
    pub k: usize,
    pub mode: Mode,
}

pub const FIXTURE_NAMES: [&str; 5] = ["dominated_ray", "ray_with_end", "star", "long_concat_demo", "graph_k4"];

fn v(name: &str) -> VertexId {
    name.parse().expect("fixture vertex")
}

fn set(names: &[&str]) -> BTreeSet<VertexId> {
    names.iter().map(|s| v(s)).collect()
}

fn edge(x: &str, y: &str) -> SymbolicPath {
    SymbolicPath::finite([v(x), v(y)]).expect("fixture edge")
}

fn member(family: &str, index: IndexExpr) -> TemplateVertex {
    TemplateVertex::Member {
        family: family.into(),
        index,
    }
}

fn schema(blocks: Vec<TemplateBlock>) -> PathSchema {
    PathSchema::new("j", IndexMap::identity(), blocks).expect("fixture schema")
}

pub fn fixture(name: &str) -> Result<Fixture, GraphError> {
    let f = match name {
        "dominated_ray" => {
            let gens: Vec<SymbolicPath> = [
                ("a", "b"),
                ("a", "c"),
                ("a", "r[0]"),
                ("a", "apex"),
                ("apex", "b"),
                ("apex", "c"),
                ("d", "e"),
                ("d", "f"),
            ]
            .iter()
            .map(|(x, y)| edge(x, y))
            .collect();
            let schemas = vec![
                schema(vec![TemplateBlock::Finite {
                    vertices: vec![member("r", IndexExpr::var_plus(0)), member("r", IndexExpr::var_plus(1))],
                }]),
                schema(vec![TemplateBlock::Finite {
                    vertices: vec![TemplateVertex::Atom("apex".into()), member("r", IndexExpr::var_plus(0))],
                }]),
                schema(vec![TemplateBlock::OmegaUp {
                    family: "r".into(),
                    stride: 1,
                    offset: IndexExpr::var_plus(0),
                    limit: TemplateVertex::Atom("d".into()),
                }]),
            ];
            Fixture {
                name: name.into(),
                description: "a ray from a dominated by apex, with end d; b, c hang off a and apex, e, f off d".into(),
                presentation: Presentation::new(false, gens, schemas),
                a: set(&["b", "c"]),
                b: set(&["e", "f"]),
                k: 2,
                mode: Mode::Strict,
            }
        }
        "ray_with_end" => {
            let ray = SymbolicPath::new(vec![
                Block::finite([v("s")]),
                Block::omega_up("r", IndexMap::identity(), v("d")),
                Block::finite([v("t")]),
            ])
            .expect("fixture ray");
            Fixture {
                name: name.into(),
                description: "a directed ray from s closed by its end d, followed by t".into(),
                presentation: Presentation::finite(true, vec![ray]),
                a: set(&["s"]),
                b: set(&["t"]),
                k: 1,
                mode: Mode::Strict,
            }
        }
        "star" => Fixture {
            name: name.into(),
            description: "centre c with leaves x, y, z".into(),
            presentation: Presentation::finite(false, vec![edge("c", "x"), edge("c", "y"), edge("c", "z")]),
            a: set(&["x", "y"]),
            b: set(&["z"]),
            k: 2,
            mode: Mode::Strict,
        },
        "long_concat_demo" => {
            let first = SymbolicPath::new(vec![
                Block::finite([v("a")]),
                Block::omega_up("r", IndexMap::identity(), v("m")),
            ])
            .expect("fixture path");
            let second = SymbolicPath::new(vec![
                Block::finite([v("m")]),
                Block::omega_up("s", IndexMap::new(2, 1).expect("stride"), v("n")),
            ])
            .expect("fixture path");
            Fixture {
                name: name.into(),
                description: "two ω+1 pieces and an edge that only combine into one path by concatenation".into(),
                presentation: Presentation::finite(true, vec![first, second, edge("n", "z")]),
                a: set(&["a"]),
                b: set(&["z"]),
                k: 1,
                mode: Mode::Strict,
            }
        }
        "graph_k4" => {
            let names = ["p", "q", "u", "w"];
            let mut gens = Vec::new();
            for (i, x) in names.iter().enumerate() {
                for y in &names[i + 1..] {
                    gens.push(edge(x, y));
                }
            }
            Fixture {
                name: name.into(),
                description: "the complete graph on four vertices".into(),
                presentation: Presentation::finite(false, gens),
                a: set(&["p", "q"]),
                b: set(&["u", "w"]),
                k: 2,
                mode: Mode::Strict,
            }
        }
        other => return Err(GraphError::UnknownFixture(other.into())),
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{check_compatible, close};

    fn g(edges: &[(&str, &str)]) -> Digraph {
        Digraph::new([], edges.iter().map(|(x, y)| (v(x), v(y)))).unwrap()
    }

    #[test]
    fn single_edge_presentation() {
        assert_eq!(from_digraph(&g(&[("a", "b")])).generators, vec![edge("a", "b")]);
        assert_eq!(Digraph::new([], [(v("a"), v("a"))]), Err(GraphError::SelfLoop(v("a"))));
    }

    #[test]
    fn triangle_closure() {
        let h = close(&from_digraph(&g(&[("a", "b"), ("b", "c"), ("c", "a")]))).unwrap();
        assert!(h.member(&SymbolicPath::finite([v("a"), v("b"), v("c")]).unwrap()).is_member);
        assert!(!h.member(&edge("a", "c")).is_member);
    }

    #[test]
    fn to_digraph_examples() {
        let p = Presentation::finite(true, vec![SymbolicPath::finite([v("a"), v("b"), v("c")]).unwrap()]);
        assert_eq!(to_digraph(&p).unwrap().edges, g(&[("a", "b"), ("b", "c")]).edges);
        let both = Presentation::finite(true, vec![edge("a", "b"), edge("b", "a")]);
        assert_eq!(to_digraph(&both).unwrap().edges.len(), 2);
        assert!(to_digraph(&fixture("ray_with_end").unwrap().presentation).is_err());
    }

    #[test]
    fn oracle_examples() {
        let parallel = g(&[("a1", "x"), ("x", "b1"), ("a2", "y"), ("y", "b2")]);
        let (n, cut) = oracle_menger(&parallel, &set(&["a1", "a2"]), &set(&["b1", "b2"]), Mode::Strict);
        assert_eq!((n, cut.len()), (2, 2));
        let via_m = g(&[("x", "m"), ("y", "m"), ("m", "u"), ("m", "w")]);
        let (n, cut) = oracle_menger(&via_m, &set(&["x", "y"]), &set(&["u", "w"]), Mode::Strict);
        assert_eq!((n, cut), (1, set(&["m"])));
    }

    #[test]
    fn oracle_agrees_with_enumeration() {
        for seed in 0..150 {
            let inst = random_instance(seed, 7, (0.1, 0.5));
            for mode in [Mode::Strict, Mode::EndpointsOnly] {
                let (flow, cut) = oracle_menger(&inst.graph, &inst.a, &inst.b, mode);
                let (packing, min_cut) = brute_force_menger(&inst.graph, &inst.a, &inst.b, mode);
                assert_eq!((flow, cut.len()), (packing, min_cut), "seed {seed} {mode}");
            }
        }
    }

    #[test]
    fn fixtures_are_compatible() {
        for name in FIXTURE_NAMES {
            let f = fixture(name).unwrap();
            assert_eq!(check_compatible(&f.presentation), Ok(()), "{name}");
        }
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn k4_round_trips() {
        let p = fixture("graph_k4").unwrap().presentation;
        let back = from_graph(&to_digraph(&p).unwrap());
        let (h1, h2) = (close(&p).unwrap(), close(&back).unwrap());
        let dg = to_digraph(&p).unwrap();
        for path in enumerate_paths(&dg, &dg.vertices, &dg.vertices, Mode::EndpointsOnly) {
            let sp = SymbolicPath::finite(path).unwrap();
            assert_eq!(h1.member(&sp).is_member, h2.member(&sp).is_member);
        }
    }

    #[test]
    fn random_instances_are_reproducible() {
        assert_eq!(random_instance(7, 12, (0.1, 0.5)), random_instance(7, 12, (0.1, 0.5)));
    }

    #[test]
    fn ray_instances_match_their_reduction() {
        use crate::menger::{menger, MengerAnswer};
        for seed in 0..40 {
            let inst = random_ray_instance(seed, 6, (0.1, 0.4));
            let h = close(&inst.presentation()).unwrap();
            let (m, _) = oracle_menger(&inst.reduced(), &inst.a, &inst.b, Mode::Strict);
            let ans = menger(&h, &inst.a, &inst.b, m + 1, Mode::Strict).unwrap();
            let MengerAnswer::Separator { certificate } = ans else { panic!("seed {seed}: {ans:?}") };
            assert_eq!(certificate.points.len(), m, "seed {seed}");
        }
    }
}
