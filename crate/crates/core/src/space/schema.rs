use super::SpaceError;
use crate::order::{Block, IndexMap, SymbolicPath, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// `coeff·j + constant` in the schema variable `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexExpr {
    pub coeff: u64,
    pub constant: u64,
}

impl IndexExpr {
    pub fn constant(c: u64) -> Self {
        IndexExpr { coeff: 0, constant: c }
    }

    pub fn var_plus(c: u64) -> Self {
        IndexExpr { coeff: 1, constant: c }
    }

    pub fn eval(&self, j: u64) -> u64 {
        self.coeff * j + self.constant
    }

    /// Values of `j` with `eval(j) == value`; `None` means every `j`.
    fn solve(&self, value: u64) -> Option<Vec<u64>> {
        if self.coeff == 0 {
            return if self.constant == value { None } else { Some(vec![]) };
        }
        if value < self.constant || !(value - self.constant).is_multiple_of(self.coeff) {
            Some(vec![])
        } else {
            Some(vec![(value - self.constant) / self.coeff])
        }
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, "j")
    }
}

impl IndexExpr {
    pub(crate) fn write_with(&self, f: &mut impl fmt::Write, var: &str) -> fmt::Result {
        match (self.coeff, self.constant) {
            (0, c) => write!(f, "{c}"),
            (1, 0) => write!(f, "{var}"),
            (1, c) => write!(f, "{var}+{c}"),
            (k, 0) => write!(f, "{k}{var}"),
            (k, c) => write!(f, "{k}{var}+{c}"),
        }
    }
}

/// A vertex name that may depend on the schema variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemplateVertex {
    Atom(String),
    Member { family: String, index: IndexExpr },
}

impl TemplateVertex {
    pub fn eval(&self, j: u64) -> VertexId {
        match self {
            TemplateVertex::Atom(a) => VertexId::atom(a.clone()),
            TemplateVertex::Member { family, index } => VertexId::member(family.clone(), index.eval(j)),
        }
    }

    fn depends_on_var(&self) -> bool {
        matches!(self, TemplateVertex::Member { index, .. } if index.coeff > 0)
    }

    /// `None` if every `j` matches.
    fn solve(&self, v: &VertexId) -> Option<Vec<u64>> {
        match (self, v) {
            (TemplateVertex::Atom(a), VertexId::Atom(b)) if a == b => None,
            (TemplateVertex::Member { family, index }, VertexId::Member { family: g, index: i }) if family == g => {
                index.solve(*i)
            }
            _ => Some(vec![]),
        }
    }

    fn max_constant(&self) -> u64 {
        match self {
            TemplateVertex::Atom(_) => 0,
            TemplateVertex::Member { index, .. } => index.constant,
        }
    }
}

impl From<VertexId> for TemplateVertex {
    fn from(v: VertexId) -> Self {
        match v {
            VertexId::Atom(a) => TemplateVertex::Atom(a),
            VertexId::Member { family, index } => TemplateVertex::Member {
                family,
                index: IndexExpr::constant(index),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemplateBlock {
    Finite {
        vertices: Vec<TemplateVertex>,
    },
    OmegaUp {
        family: String,
        stride: u64,
        offset: IndexExpr,
        limit: TemplateVertex,
    },
    OmegaDown {
        limit: TemplateVertex,
        family: String,
        stride: u64,
        offset: IndexExpr,
    },
}

impl TemplateBlock {
    fn eval(&self, j: u64) -> Result<Block, SpaceError> {
        Ok(match self {
            TemplateBlock::Finite { vertices } => Block::finite(vertices.iter().map(|v| v.eval(j))),
            TemplateBlock::OmegaUp {
                family,
                stride,
                offset,
                limit,
            } => Block::omega_up(family.clone(), IndexMap::new(*stride, offset.eval(j))?, limit.eval(j)),
            TemplateBlock::OmegaDown {
                limit,
                family,
                stride,
                offset,
            } => Block::omega_down(limit.eval(j), family.clone(), IndexMap::new(*stride, offset.eval(j))?),
        })
    }

    fn reversed(&self) -> TemplateBlock {
        match self.clone() {
            TemplateBlock::Finite { mut vertices } => {
                vertices.reverse();
                TemplateBlock::Finite { vertices }
            }
            TemplateBlock::OmegaUp {
                family,
                stride,
                offset,
                limit,
            } => TemplateBlock::OmegaDown {
                limit,
                family,
                stride,
                offset,
            },
            TemplateBlock::OmegaDown {
                limit,
                family,
                stride,
                offset,
            } => TemplateBlock::OmegaUp {
                family,
                stride,
                offset,
                limit,
            },
        }
    }
}

/// Which instances of a schema contain some vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instances {
    /// Every instance.
    All,
    /// The listed values of the schema variable, ascending.
    Some(Vec<u64>),
}

/// A family of paths indexed by a schema variable `j` ranging over `domain(ℕ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathSchema {
    var: String,
    domain: IndexMap,
    blocks: Vec<TemplateBlock>,
}

impl PathSchema {
    pub fn new(var: impl Into<String>, domain: IndexMap, blocks: Vec<TemplateBlock>) -> Result<Self, SpaceError> {
        let schema = PathSchema {
            var: var.into(),
            domain,
            blocks,
        };
        if schema.blocks.is_empty() {
            return Err(SpaceError::Schema("schema has no blocks".into()));
        }
        if !schema.depends_on_var() {
            return Err(SpaceError::Schema(
                "schema never mentions its variable, so its instances coincide".into(),
            ));
        }
        for n in 0..schema.validation_count() {
            schema
                .instance(n)
                .map_err(|e| SpaceError::Schema(format!("instance {} is invalid: {e}", schema.domain.apply(n))))?;
        }
        Ok(schema)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn domain(&self) -> IndexMap {
        self.domain
    }

    pub fn blocks(&self) -> &[TemplateBlock] {
        &self.blocks
    }

    fn depends_on_var(&self) -> bool {
        self.blocks.iter().any(|b| match b {
            TemplateBlock::Finite { vertices } => vertices.iter().any(TemplateVertex::depends_on_var),
            TemplateBlock::OmegaUp { offset, limit, .. } | TemplateBlock::OmegaDown { offset, limit, .. } => {
                offset.coeff > 0 || limit.depends_on_var()
            }
        })
    }

    /// Number of leading instances checked at construction. Collisions between
    /// affine index expressions either happen for a bounded `j` or recur with
    /// period dividing the strides, so this range sees every kind of clash.
    fn validation_count(&self) -> u64 {
        let reach = self.max_constant() + 2 * self.period() + 2;
        (0..).take_while(|&n| self.domain.apply(n) <= reach).count().max(2) as u64
    }

    /// Largest constant appearing in the template or domain.
    pub fn max_constant(&self) -> u64 {
        let mut m = self.domain.offset();
        for b in &self.blocks {
            match b {
                TemplateBlock::Finite { vertices } => {
                    m = m.max(vertices.iter().map(TemplateVertex::max_constant).max().unwrap_or(0))
                }
                TemplateBlock::OmegaUp { offset, limit, .. } | TemplateBlock::OmegaDown { offset, limit, .. } => {
                    m = m.max(offset.constant).max(limit.max_constant())
                }
            }
        }
        m
    }

    /// Least common multiple of the strides and coefficients involved.
    pub fn period(&self) -> u64 {
        let mut p = self.domain.stride();
        let mut fold = |x: u64| {
            if x > 0 {
                p = num_integer::lcm(p, x).min(crate::MAX_PERIOD);
            }
        };
        for b in &self.blocks {
            match b {
                TemplateBlock::Finite { vertices } => {
                    for v in vertices {
                        if let TemplateVertex::Member { index, .. } = v {
                            fold(index.coeff);
                        }
                    }
                }
                TemplateBlock::OmegaUp { stride, offset, .. } | TemplateBlock::OmegaDown { stride, offset, .. } => {
                    fold(*stride);
                    fold(offset.coeff);
                }
            }
        }
        p
    }

    pub fn families(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut add = |v: &TemplateVertex| {
            if let TemplateVertex::Member { family, .. } = v {
                out.insert(family.clone());
            }
        };
        for b in &self.blocks {
            match b {
                TemplateBlock::Finite { vertices } => vertices.iter().for_each(&mut add),
                TemplateBlock::OmegaUp { family, limit, .. } | TemplateBlock::OmegaDown { family, limit, .. } => {
                    add(limit);
                    add(&TemplateVertex::Member {
                        family: family.clone(),
                        index: IndexExpr::constant(0),
                    });
                }
            }
        }
        out
    }

    /// The path for a concrete value `j` of the variable.
    pub fn instantiate(&self, j: u64) -> Result<SymbolicPath, SpaceError> {
        let blocks = self.blocks.iter().map(|b| b.eval(j)).collect::<Result<Vec<_>, _>>()?;
        Ok(SymbolicPath::new(blocks)?)
    }

    /// The `n`-th instance, i.e. `j = domain(n)`.
    pub fn instance(&self, n: u64) -> Result<SymbolicPath, SpaceError> {
        self.instantiate(self.domain.apply(n))
    }

    /// The inverse of every instance.
    pub fn reversed(&self) -> PathSchema {
        PathSchema {
            var: self.var.clone(),
            domain: self.domain,
            blocks: self.blocks.iter().rev().map(TemplateBlock::reversed).collect(),
        }
    }

    /// The same schema restricted to `j ≥ from`.
    pub fn restricted_from(&self, from: u64) -> PathSchema {
        let n = (0..).find(|&n| self.domain.apply(n) >= from).unwrap();
        PathSchema {
            domain: self.domain.shifted(n),
            ..self.clone()
        }
    }

    /// Values of `j` whose instance contains `v`.
    pub fn instances_containing(&self, v: &VertexId) -> Instances {
        let mut js: BTreeSet<u64> = BTreeSet::new();
        let mut all = false;
        let mut take = |sol: Option<Vec<u64>>| match sol {
            None => all = true,
            Some(list) => js.extend(list),
        };
        for b in &self.blocks {
            match b {
                TemplateBlock::Finite { vertices } => {
                    for tv in vertices {
                        take(tv.solve(v));
                    }
                }
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
                    take(limit.solve(v));
                    if let Some((f, idx)) = v.as_member() {
                        if f == family {
                            // idx = stride·t + offset(j) with t ≥ 0
                            if offset.coeff == 0 {
                                if offset.constant <= idx && (idx - offset.constant) % stride == 0 {
                                    take(None);
                                }
                            } else if idx >= offset.constant {
                                let top = (idx - offset.constant) / offset.coeff;
                                take(Some(
                                    (0..=top)
                                        .filter(|&j| (idx - offset.eval(j)) % stride == 0)
                                        .collect(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        if all {
            Instances::All
        } else {
            Instances::Some(js.into_iter().filter(|&j| self.domain.preimage(j).is_some()).collect())
        }
    }
}
