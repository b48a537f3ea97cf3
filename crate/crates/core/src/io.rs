//! Plain-text formats for systems, hypertrees, embeddings and split plans.
//!
//! All formats are line based; blank lines and anything after `#` are
//! ignored. Writers emit canonical text, so `write(read(write(x)))` is
//! byte-identical to `write(x)`.
//!
//! ```text
//! sts 7            htree 5          0 -> 3
//! 0 1 2            0 1 2            1 -> 0
//! 0 3 4            2 3 4            ...
//! ```
//!
//! The split plan grammar is documented on [`write_split_plan`].

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::embed::Embedding;
use crate::hypertree::{validate_hypertree_on, Hypertree, HypertreeError};
use crate::split::{Attached, BaseStage, PathPiece, SplitPlan, Stage, Star};
use crate::sts::{LinearThreeGraph, SteinerTripleSystem, StsError, Triple, Vertex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("not a valid system: {0}")]
    Sts(#[from] StsError),
    #[error("not a valid hypertree: {0}")]
    Hypertree(#[from] HypertreeError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Non-empty content lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn number<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T, ParseError> {
    tok.parse().map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

fn header(line: usize, l: &str, tag: &'static str) -> Result<usize, ParseError> {
    let toks: Vec<&str> = l.split_whitespace().collect();
    match toks.as_slice() {
        [t, n] if *t == tag => number(n, line, "vertex count"),
        _ => Err(syntax(line, format!("expected `{tag} <n>`"))),
    }
}

/// Reads a header line `<tag> <n>` followed by one triple per line.
fn read_triples(text: &str, tag: &'static str) -> Result<(usize, Vec<Triple>), ParseError> {
    let mut lines = content_lines(text);
    let (hl, h) = lines.next().ok_or(ParseError::MissingHeader(tag))?;
    let n = header(hl, h, tag)?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(syntax(line, format!("expected three vertices, found {}", toks.len())));
        }
        let mut e = [0; 3];
        for (slot, tok) in e.iter_mut().zip(&toks) {
            let v: Vertex = number(tok, line, "vertex")?;
            if v as usize >= n {
                return Err(syntax(line, format!("vertex {v} out of range for n = {n}")));
            }
            *slot = v;
        }
        edges.push(e);
    }
    Ok((n, edges))
}

fn write_triples(tag: &str, n: usize, edges: &[Triple]) -> String {
    let mut s = String::with_capacity(12 * edges.len() + 16);
    writeln!(s, "{tag} {n}").unwrap();
    for e in edges {
        writeln!(s, "{} {} {}", e[0], e[1], e[2]).unwrap();
    }
    s
}

pub fn write_sts(g: &LinearThreeGraph) -> String {
    write_triples("sts", g.n(), g.edges())
}

/// Reads an `sts` file and checks that it is a Steiner triple system.
pub fn read_sts(text: &str) -> Result<SteinerTripleSystem, ParseError> {
    let (n, edges) = read_triples(text, "sts")?;
    Ok(SteinerTripleSystem::from_edges(n, edges)?)
}

/// Reads an `sts` file as a linear 3-graph without checking completeness.
pub fn read_linear(text: &str) -> Result<LinearThreeGraph, ParseError> {
    let (n, edges) = read_triples(text, "sts")?;
    Ok(LinearThreeGraph::new(n, edges)?)
}

pub fn write_hypertree(t: &Hypertree) -> String {
    write_triples("htree", t.n(), t.edges())
}

pub fn read_hypertree(text: &str) -> Result<Hypertree, ParseError> {
    let (n, edges) = read_triples(text, "htree")?;
    Ok(validate_hypertree_on(n, &edges)?)
}

/// One `t -> g` line per mapped tree vertex, in tree order.
pub fn write_embedding(phi: &Embedding) -> String {
    let mut s = String::new();
    for (t, g) in phi.pairs() {
        writeln!(s, "{t} -> {g}").unwrap();
    }
    s
}

/// Reads `t -> g` lines. Repeated tree vertices and out-of-range labels are
/// parse errors; repeated images are accepted so that verification can
/// report them.
pub fn read_embedding(text: &str, tree_n: usize, host_n: usize) -> Result<Embedding, ParseError> {
    let mut forward = vec![None; tree_n];
    for (line, l) in content_lines(text) {
        let (a, b) = l
            .split_once("->")
            .ok_or_else(|| syntax(line, "expected `t -> g`"))?;
        let t: Vertex = number(a.trim(), line, "tree vertex")?;
        let g: Vertex = number(b.trim(), line, "host vertex")?;
        if t as usize >= tree_n {
            return Err(syntax(line, format!("tree vertex {t} out of range for {tree_n} vertices")));
        }
        if g as usize >= host_n {
            return Err(syntax(line, format!("host vertex {g} out of range for {host_n} vertices")));
        }
        if forward[t as usize].replace(g).is_some() {
            return Err(syntax(line, format!("tree vertex {t} mapped twice")));
        }
    }
    Ok(Embedding::from_map(forward, host_n))
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Serializes a split plan, one record per line:
///
/// ```text
/// plan <n> <D> <mu> <m>
/// base <v> <v> ... | <e> <e> ...
/// stars <c>:<e>,<e>,... <c>:<e>,...
/// matching <e>@<v> <e>@<v> ...
/// paths <e>,<e>,<e>@<v>,<v>,<v>,<v>,<v>,<v>,<v> ...
/// ```
///
/// `plan` and `base` come first; every further line is one stage, in chain
/// order. `base` lists the base vertices, then `|`, then the base edge ids.
/// A star item is a centre and its edges. A matching item is an edge and the
/// vertex through which it attaches. A path item is three edge ids and the
/// seven path vertices from end to end. Stages may be empty.
pub fn write_split_plan(plan: &SplitPlan) -> String {
    let mut s = String::new();
    writeln!(s, "plan {} {} {} {}", plan.n, plan.degree_threshold, plan.mu, plan.path_length).unwrap();
    let mut base = String::from("base");
    for v in &plan.base.vertices {
        write!(base, " {v}").unwrap();
    }
    base.push_str(" |");
    for e in &plan.base.edges {
        write!(base, " {e}").unwrap();
    }
    writeln!(s, "{base}").unwrap();
    for stage in &plan.stages {
        let items: Vec<String> = match stage {
            Stage::Stars(stars) => stars
                .iter()
                .map(|st| format!("{}:{}", st.center, join(&st.edges, ",")))
                .collect(),
            Stage::Matching(m) => m.iter().map(|a| format!("{}@{}", a.edge, a.attach)).collect(),
            Stage::Paths(p) => p
                .iter()
                .map(|p| format!("{}@{}", join(p.edges, ","), join(p.vertices, ",")))
                .collect(),
        };
        let mut line = stage.kind().to_string();
        for it in items {
            line.push(' ');
            line.push_str(&it);
        }
        writeln!(s, "{line}").unwrap();
    }
    s
}

fn list<T: FromStr>(s: &str, line: usize, what: &str) -> Result<Vec<T>, ParseError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| number(t, line, what)).collect()
}

fn fixed<T: FromStr + Copy + Default, const K: usize>(s: &str, line: usize, what: &str) -> Result<[T; K], ParseError> {
    let v: Vec<T> = list(s, line, what)?;
    if v.len() != K {
        return Err(syntax(line, format!("expected {K} {what}s, found {}", v.len())));
    }
    let mut out = [T::default(); K];
    out.copy_from_slice(&v);
    Ok(out)
}

/// Parses the format written by [`write_split_plan`]. Only the syntax is
/// checked; use `validate_split` against the tree for semantics.
pub fn read_split_plan(text: &str) -> Result<SplitPlan, ParseError> {
    let mut lines = content_lines(text);
    let (hl, h) = lines.next().ok_or(ParseError::MissingHeader("plan"))?;
    let toks: Vec<&str> = h.split_whitespace().collect();
    let ["plan", n, d, mu, m] = toks.as_slice() else {
        return Err(syntax(hl, "expected `plan <n> <D> <mu> <m>`"));
    };
    let (n, degree_threshold, mu, path_length) = (
        number(n, hl, "scale")?,
        number(d, hl, "degree threshold")?,
        number::<f64>(mu, hl, "mu")?,
        number(m, hl, "path length")?,
    );

    let (bl, b) = lines.next().ok_or(ParseError::MissingHeader("base"))?;
    let rest = b
        .strip_prefix("base")
        .ok_or_else(|| syntax(bl, "expected `base` line"))?;
    let (vs, es) = rest
        .split_once('|')
        .ok_or_else(|| syntax(bl, "expected `|` between base vertices and edges"))?;
    let base = BaseStage {
        vertices: vs.split_whitespace().map(|t| number(t, bl, "vertex")).collect::<Result<_, _>>()?,
        edges: es.split_whitespace().map(|t| number(t, bl, "edge")).collect::<Result<_, _>>()?,
    };

    let mut stages = Vec::new();
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let tag = toks.next().unwrap_or("");
        let items: Vec<&str> = toks.collect();
        let stage = match tag {
            "stars" => Stage::Stars(
                items
                    .iter()
                    .map(|it| {
                        let (c, es) = it.split_once(':').ok_or_else(|| syntax(line, "expected `<c>:<edges>`"))?;
                        Ok(Star {
                            center: number(c, line, "centre")?,
                            edges: list(es, line, "edge")?,
                        })
                    })
                    .collect::<Result<_, ParseError>>()?,
            ),
            "matching" => Stage::Matching(
                items
                    .iter()
                    .map(|it| {
                        let (e, v) = it.split_once('@').ok_or_else(|| syntax(line, "expected `<e>@<v>`"))?;
                        Ok(Attached {
                            edge: number(e, line, "edge")?,
                            attach: number(v, line, "vertex")?,
                        })
                    })
                    .collect::<Result<_, ParseError>>()?,
            ),
            "paths" => Stage::Paths(
                items
                    .iter()
                    .map(|it| {
                        let (es, vs) = it.split_once('@').ok_or_else(|| syntax(line, "expected `<edges>@<vertices>`"))?;
                        Ok(PathPiece {
                            edges: fixed(es, line, "edge")?,
                            vertices: fixed(vs, line, "vertex")?,
                        })
                    })
                    .collect::<Result<_, ParseError>>()?,
            ),
            other => return Err(syntax(line, format!("unknown stage `{other}`"))),
        };
        stages.push(stage);
    }
    Ok(SplitPlan {
        degree_threshold,
        mu,
        n,
        path_length,
        base,
        stages,
    })
}
