//! A line-oriented text format for presentations, named vertex sets and
//! solver directives.
//!
//! ```text
//! space undirected
//! path a b c
//! path
//!   s
//!   omega r 1 0 limit d
//! end
//! schema j: apex r[j]
//! schema j step 2 from 1:
//!   omega r 1 j limit d
//! end
//! set A = {a, s}
//! solve menger A B 2 strict
//! ```
//!
//! `limit d omega r 1 0` is the descending block ending a path at `d`'s side.

use crate::menger::Mode;
use crate::order::{Block, IndexMap, SymbolicPath, VertexId};
use crate::space::{IndexExpr, PathSchema, Presentation, TemplateBlock, TemplateVertex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize, Deserialize)]
#[error("{kind:?} error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "directive", rename_all = "snake_case")]
pub enum Directive {
    CheckCompatible,
    Components,
    Solve { a: String, b: String, k: usize, mode: Mode },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub presentation: Presentation,
    pub sets: BTreeMap<String, BTreeSet<VertexId>>,
    pub directives: Vec<Directive>,
}

#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        let punct = matches!(ch, '{' | '}' | ',' | '=' | ':');
        if ch.is_whitespace() || punct {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
            if punct {
                out.push(Token {
                    text: &line[i..i + 1],
                    column: i + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

struct Parser<'a> {
    lines: Vec<(usize, Vec<Token<'a>>)>,
    pos: usize,
}

type Res<T> = Result<T, ParseError>;

fn err(kind: ErrorKind, line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        kind,
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, tokenize(l.split('#').next().unwrap_or(""))))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Parser { lines, pos: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, Vec<Token<'a>>)> {
        let l = self.lines.get(self.pos).cloned();
        self.pos += 1;
        l
    }

    /// Lines up to the matching `end`.
    fn block(&mut self, opened: usize) -> Res<Vec<(usize, Vec<Token<'a>>)>> {
        let mut out = Vec::new();
        loop {
            match self.next_line() {
                None => return Err(err(ErrorKind::Syntax, opened, 1, "block is not closed by `end`")),
                Some((_, toks)) if toks.len() == 1 && toks[0].text == "end" => return Ok(out),
                Some(l) => out.push(l),
            }
        }
    }
}

fn number(line: usize, t: &Token<'_>) -> Res<u64> {
    t.text
        .parse()
        .map_err(|_| err(ErrorKind::Syntax, line, t.column, format!("expected a number, found `{}`", t.text)))
}

fn vertex(line: usize, t: &Token<'_>) -> Res<VertexId> {
    if t.text.ends_with('~') {
        return Err(err(ErrorKind::Syntax, line, t.column, format!("malformed vertex `{}`", t.text)));
    }
    t.text
        .parse()
        .map_err(|_| err(ErrorKind::Syntax, line, t.column, format!("malformed vertex `{}`", t.text)))
}

/// `7`, `j`, `j+2`, `3j`, `3j+1`.
fn index_expr(line: usize, t: &Token<'_>, text: &str, var: &str) -> Res<IndexExpr> {
    let bad = || err(ErrorKind::Syntax, line, t.column, format!("malformed index `{text}`"));
    if let Ok(c) = text.parse::<u64>() {
        return Ok(IndexExpr::constant(c));
    }
    let (term, constant) = match text.split_once('+') {
        Some((a, b)) => (a, b.parse::<u64>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let Some(coeff) = term.strip_suffix(var) else {
        return Err(err(
            ErrorKind::Semantic,
            line,
            t.column,
            format!("index `{text}` does not use the schema variable `{var}`"),
        ));
    };
    let coeff = if coeff.is_empty() { 1 } else { coeff.parse().map_err(|_| bad())? };
    if coeff == 0 {
        return Err(bad());
    }
    Ok(IndexExpr { coeff, constant })
}

fn template_vertex(line: usize, t: &Token<'_>, var: &str) -> Res<TemplateVertex> {
    match t.text.split_once('[') {
        None => Ok(vertex(line, t)?.into()),
        Some((family, rest)) => {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| err(ErrorKind::Syntax, line, t.column, format!("malformed vertex `{}`", t.text)))?;
            if !crate::order::is_identifier(family) {
                return Err(err(ErrorKind::Syntax, line, t.column, format!("malformed family `{family}`")));
            }
            Ok(TemplateVertex::Member {
                family: family.into(),
                index: index_expr(line, t, inner, var)?,
            })
        }
    }
}

fn family(line: usize, t: &Token<'_>) -> Res<String> {
    if crate::order::is_identifier(t.text) {
        Ok(t.text.to_string())
    } else {
        Err(err(ErrorKind::Syntax, line, t.column, format!("malformed family `{}`", t.text)))
    }
}

fn stride(line: usize, t: &Token<'_>) -> Res<u64> {
    match number(line, t)? {
        0 => Err(err(ErrorKind::Syntax, line, t.column, "stride must be positive")),
        s => Ok(s),
    }
}

fn keyword(line: usize, t: Option<&Token<'_>>, want: &str, after: usize) -> Res<()> {
    match t {
        Some(t) if t.text == want => Ok(()),
        Some(t) => Err(err(
            ErrorKind::Syntax,
            line,
            t.column,
            format!("expected `{want}`, found `{}`", t.text),
        )),
        None => Err(err(ErrorKind::Syntax, line, after, format!("expected `{want}`"))),
    }
}

fn arity(line: usize, toks: &[Token<'_>], n: usize) -> Res<()> {
    match toks.len().cmp(&n) {
        std::cmp::Ordering::Equal => Ok(()),
        std::cmp::Ordering::Less => Err(err(
            ErrorKind::Syntax,
            line,
            toks.last().map_or(1, |t| t.column + t.text.len()),
            "line ends too early",
        )),
        std::cmp::Ordering::Greater => Err(err(
            ErrorKind::Syntax,
            line,
            toks[n].column,
            format!("unexpected `{}`", toks[n].text),
        )),
    }
}

/// Blocks of a `path` body: runs of vertex lines and ω lines.
fn path_blocks(body: &[(usize, Vec<Token<'_>>)]) -> Res<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (line, toks) in body {
        let line = *line;
        match toks[0].text {
            "omega" => {
                arity(line, toks, 6)?;
                keyword(line, toks.get(4), "limit", 1)?;
                let map = IndexMap::new(stride(line, &toks[2])?, number(line, &toks[3])?).expect("positive stride");
                blocks.push(Block::omega_up(family(line, &toks[1])?, map, vertex(line, &toks[5])?));
            }
            "limit" => {
                arity(line, toks, 6)?;
                keyword(line, toks.get(2), "omega", 1)?;
                let map = IndexMap::new(stride(line, &toks[4])?, number(line, &toks[5])?).expect("positive stride");
                blocks.push(Block::omega_down(vertex(line, &toks[1])?, family(line, &toks[3])?, map));
            }
            _ => {
                let vs = toks.iter().map(|t| vertex(line, t)).collect::<Res<Vec<_>>>()?;
                match blocks.last_mut() {
                    Some(Block::Finite { vertices }) => vertices.extend(vs),
                    _ => blocks.push(Block::finite(vs)),
                }
            }
        }
    }
    Ok(blocks)
}

fn schema_blocks(body: &[(usize, Vec<Token<'_>>)], var: &str) -> Res<Vec<TemplateBlock>> {
    let mut blocks: Vec<TemplateBlock> = Vec::new();
    for (line, toks) in body {
        let line = *line;
        match toks[0].text {
            "omega" => {
                arity(line, toks, 6)?;
                keyword(line, toks.get(4), "limit", 1)?;
                blocks.push(TemplateBlock::OmegaUp {
                    family: family(line, &toks[1])?,
                    stride: stride(line, &toks[2])?,
                    offset: index_expr(line, &toks[3], toks[3].text, var)?,
                    limit: template_vertex(line, &toks[5], var)?,
                });
            }
            "limit" => {
                arity(line, toks, 6)?;
                keyword(line, toks.get(2), "omega", 1)?;
                blocks.push(TemplateBlock::OmegaDown {
                    limit: template_vertex(line, &toks[1], var)?,
                    family: family(line, &toks[3])?,
                    stride: stride(line, &toks[4])?,
                    offset: index_expr(line, &toks[5], toks[5].text, var)?,
                });
            }
            _ => {
                let vs = toks.iter().map(|t| template_vertex(line, t, var)).collect::<Res<Vec<_>>>()?;
                match blocks.last_mut() {
                    Some(TemplateBlock::Finite { vertices }) => vertices.extend(vs),
                    _ => blocks.push(TemplateBlock::Finite { vertices: vs }),
                }
            }
        }
    }
    Ok(blocks)
}

/// Parses a document. Semantic checks that only need the text (set names,
/// path and schema validity) happen here; compatibility is left to the caller.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut p = Parser::new(text);
    let mut directed: Option<bool> = None;
    let mut generators = Vec::new();
    let mut schemas = Vec::new();
    let mut sets: BTreeMap<String, BTreeSet<VertexId>> = BTreeMap::new();
    let mut pending: Vec<(usize, Vec<Token<'_>>)> = Vec::new();
    while let Some((line, toks)) = p.next_line() {
        let head = &toks[0];
        match head.text {
            "space" => {
                arity(line, &toks, 2)?;
                if directed.is_some() {
                    return Err(err(ErrorKind::Semantic, line, head.column, "`space` given twice"));
                }
                directed = Some(match toks[1].text {
                    "directed" => true,
                    "undirected" => false,
                    other => {
                        return Err(err(
                            ErrorKind::Syntax,
                            line,
                            toks[1].column,
                            format!("expected `directed` or `undirected`, found `{other}`"),
                        ))
                    }
                });
            }
            "path" => {
                let body = if toks.len() == 1 {
                    p.block(line)?
                } else {
                    vec![(line, toks[1..].to_vec())]
                };
                let blocks = path_blocks(&body)?;
                let path = SymbolicPath::new(blocks)
                    .map_err(|e| err(ErrorKind::Semantic, line, head.column, e.to_string()))?;
                generators.push(path);
            }
            "schema" => {
                let var = toks.get(1).ok_or_else(|| err(ErrorKind::Syntax, line, 7, "expected a variable"))?;
                if !crate::order::is_identifier(var.text) {
                    return Err(err(ErrorKind::Syntax, line, var.column, format!("malformed variable `{}`", var.text)));
                }
                let colon = toks
                    .iter()
                    .position(|t| t.text == ":")
                    .ok_or_else(|| err(ErrorKind::Syntax, line, head.column, "expected `:`"))?;
                let domain = match colon {
                    2 => IndexMap::identity(),
                    6 => {
                        keyword(line, toks.get(2), "step", 1)?;
                        keyword(line, toks.get(4), "from", 1)?;
                        IndexMap::new(stride(line, &toks[3])?, number(line, &toks[5])?).expect("positive stride")
                    }
                    _ => return Err(err(ErrorKind::Syntax, line, toks[colon].column, "malformed schema header")),
                };
                let body = if colon + 1 == toks.len() {
                    p.block(line)?
                } else {
                    vec![(line, toks[colon + 1..].to_vec())]
                };
                let blocks = schema_blocks(&body, var.text)?;
                let s = PathSchema::new(var.text, domain, blocks)
                    .map_err(|e| err(ErrorKind::Semantic, line, head.column, e.to_string()))?;
                schemas.push(s);
            }
            "set" => {
                let name = toks.get(1).ok_or_else(|| err(ErrorKind::Syntax, line, 5, "expected a set name"))?;
                keyword(line, toks.get(2), "=", name.column + name.text.len())?;
                keyword(line, toks.get(3), "{", toks[2].column + 1)?;
                let close = toks.len() - 1;
                keyword(line, toks.last(), "}", 1)?;
                let mut members = BTreeSet::new();
                let inner = &toks[4..close];
                for (i, t) in inner.iter().enumerate() {
                    if i % 2 == 1 {
                        keyword(line, Some(t), ",", t.column)?;
                    } else {
                        members.insert(vertex(line, t)?);
                    }
                }
                if inner.len() % 2 == 0 && !inner.is_empty() {
                    return Err(err(ErrorKind::Syntax, line, toks[close].column, "trailing `,`"));
                }
                if sets.insert(name.text.to_string(), members).is_some() {
                    return Err(err(
                        ErrorKind::Semantic,
                        line,
                        name.column,
                        format!("set `{}` defined twice", name.text),
                    ));
                }
            }
            "solve" | "check" | "components" => pending.push((line, toks)),
            other => {
                return Err(err(ErrorKind::Syntax, line, head.column, format!("unknown statement `{other}`")));
            }
        }
    }
    let Some(directed) = directed else {
        return Err(err(ErrorKind::Semantic, 1, 1, "missing `space directed|undirected`"));
    };
    let mut directives = Vec::new();
    for (line, toks) in pending {
        directives.push(match toks[0].text {
            "check" => {
                arity(line, &toks, 2)?;
                keyword(line, toks.get(1), "compatible", 1)?;
                Directive::CheckCompatible
            }
            "components" => {
                arity(line, &toks, 1)?;
                Directive::Components
            }
            _ => {
                if toks.len() < 5 {
                    arity(line, &toks, 5)?;
                }
                keyword(line, toks.get(1), "menger", 1)?;
                let mode = match toks.get(5) {
                    None => Mode::Strict,
                    Some(t) => t
                        .text
                        .parse()
                        .map_err(|_| err(ErrorKind::Syntax, line, t.column, format!("unknown mode `{}`", t.text)))?,
                };
                arity(line, &toks, toks.len().clamp(5, 6))?;
                for t in &toks[2..4] {
                    if !sets.contains_key(t.text) {
                        return Err(err(
                            ErrorKind::Semantic,
                            line,
                            t.column,
                            format!("unknown set `{}`", t.text),
                        ));
                    }
                }
                let k = number(line, &toks[4])?;
                if k == 0 {
                    return Err(err(ErrorKind::Semantic, line, toks[4].column, "k must be positive"));
                }
                Directive::Solve {
                    a: toks[2].text.into(),
                    b: toks[3].text.into(),
                    k: k as usize,
                    mode,
                }
            }
        });
    }
    Ok(Document {
        presentation: Presentation::new(directed, generators, schemas),
        sets,
        directives,
    })
}

fn write_template(out: &mut String, v: &TemplateVertex, var: &str) {
    match v {
        TemplateVertex::Atom(a) => out.push_str(a),
        TemplateVertex::Member { family, index } => {
            let _ = write!(out, "{family}[");
            let _ = index.write_with(out, var);
            out.push(']');
        }
    }
}

fn write_path(out: &mut String, p: &SymbolicPath) {
    if let Some(vs) = p.finite_vertices() {
        let names: Vec<String> = vs.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "path {}", names.join(" "));
        return;
    }
    out.push_str("path\n");
    for b in p.blocks() {
        let _ = match b {
            Block::Finite { vertices } => {
                let names: Vec<String> = vertices.iter().map(ToString::to_string).collect();
                writeln!(out, "  {}", names.join(" "))
            }
            Block::OmegaUp { family, map, limit } => {
                writeln!(out, "  omega {family} {} {} limit {limit}", map.stride(), map.offset())
            }
            Block::OmegaDown { limit, family, map } => {
                writeln!(out, "  limit {limit} omega {family} {} {}", map.stride(), map.offset())
            }
        };
    }
    out.push_str("end\n");
}

fn write_schema(out: &mut String, s: &PathSchema) {
    let var = s.var();
    let d = s.domain();
    if d == IndexMap::identity() {
        let _ = write!(out, "schema {var}:");
    } else {
        let _ = write!(out, "schema {var} step {} from {}:", d.stride(), d.offset());
    }
    if let [TemplateBlock::Finite { vertices }] = s.blocks() {
        for v in vertices {
            out.push(' ');
            write_template(out, v, var);
        }
        out.push('\n');
        return;
    }
    out.push('\n');
    for b in s.blocks() {
        out.push_str("  ");
        match b {
            TemplateBlock::Finite { vertices } => {
                for (i, v) in vertices.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    write_template(out, v, var);
                }
            }
            TemplateBlock::OmegaUp {
                family,
                stride,
                offset,
                limit,
            } => {
                let _ = write!(out, "omega {family} {stride} ");
                let _ = offset.write_with(out, var);
                out.push_str(" limit ");
                write_template(out, limit, var);
            }
            TemplateBlock::OmegaDown {
                limit,
                family,
                stride,
                offset,
            } => {
                out.push_str("limit ");
                write_template(out, limit, var);
                let _ = write!(out, " omega {family} {stride} ");
                let _ = offset.write_with(out, var);
            }
        }
        out.push('\n');
    }
    out.push_str("end\n");
}

/// Canonical text of a document; `parse(&print(d)) == Ok(d)`.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    let pres = &doc.presentation;
    let _ = writeln!(out, "space {}", if pres.directed { "directed" } else { "undirected" });
    for g in &pres.generators {
        write_path(&mut out, g);
    }
    for s in &pres.schemas {
        write_schema(&mut out, s);
    }
    for (name, members) in &doc.sets {
        let names: Vec<String> = members.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "set {name} = {{{}}}", names.join(", "));
    }
    for d in &doc.directives {
        let _ = match d {
            Directive::CheckCompatible => writeln!(out, "check compatible"),
            Directive::Components => writeln!(out, "components"),
            Directive::Solve { a, b, k, mode } => writeln!(out, "solve menger {a} {b} {k} {mode}"),
        };
    }
    out
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// Document for a fixture: its presentation, `A`, `B`, a compatibility check
/// and one solve directive.
pub fn fixture_document(f: &crate::graph::Fixture) -> Document {
    Document {
        presentation: f.presentation.clone(),
        sets: BTreeMap::from([("A".to_string(), f.a.clone()), ("B".to_string(), f.b.clone())]),
        directives: vec![
            Directive::CheckCompatible,
            Directive::Solve {
                a: "A".into(),
                b: "B".into(),
                k: f.k,
                mode: f.mode,
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixture, FIXTURE_NAMES};

    fn v(s: &str) -> VertexId {
        s.parse().unwrap()
    }

    #[test]
    fn single_line_path() {
        let d = parse("space directed\npath a b c\n").unwrap();
        assert_eq!(d.presentation.generators, vec![SymbolicPath::finite([v("a"), v("b"), v("c")]).unwrap()]);
    }

    #[test]
    fn omega_line_in_a_path_block() {
        let d = parse("space directed\npath\n  omega r 1 0 limit d\nend\n").unwrap();
        assert_eq!(
            d.presentation.generators[0].blocks(),
            &[Block::omega_up("r", IndexMap::identity(), v("d"))]
        );
    }

    #[test]
    fn zero_stride_is_rejected_with_position() {
        let e = parse("space directed\npath\n  omega r 0 0 limit d\nend\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Syntax, 3, 11));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("space directed\npath a b\nsolve menger A B 1\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Semantic, 3, 14));
        let e = parse("space sideways\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Syntax, 1, 7));
        let e = parse("path a\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        let e = parse("space directed\npath a b a\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        let e = parse("space directed\nset A = {a,}\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        let e = parse("space directed\npath\n a b\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn schemas_and_sets_parse() {
        let text = "# fixture\nspace undirected\nschema j: apex r[j]   # spokes\nschema n step 2 from 1:\n  limit d omega r 3 2n+1\nend\nset A = {apex, r[2]}\nset E = {}\nsolve menger A E 1 endpoints\n";
        let d = parse(text).unwrap();
        assert_eq!(d.presentation.schemas.len(), 2);
        assert_eq!(d.sets["A"].len(), 2);
        assert!(d.sets["E"].is_empty());
        assert_eq!(
            d.directives,
            vec![Directive::Solve {
                a: "A".into(),
                b: "E".into(),
                k: 1,
                mode: Mode::EndpointsOnly
            }]
        );
        assert_eq!(parse(&print(&d)).unwrap(), d);
    }

    #[test]
    fn fixture_documents_round_trip() {
        for name in FIXTURE_NAMES {
            let d = fixture_document(&fixture(name).unwrap());
            let text = print(&d);
            assert_eq!(parse(&text).unwrap(), d, "{name}:\n{text}");
        }
    }

    #[test]
    fn zone_names_are_not_vertices() {
        assert!(parse("space directed\npath r~ a\n").is_err());
    }
}
