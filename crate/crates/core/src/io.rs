//! Line-oriented text formats for graphs, hierarchies, queries and results.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Numbers are
//! written with the shortest representation that parses back to the same
//! value, so serializing a parsed file reproduces it.
//!
//! Graph files:
//! ```text
//! tdg 1
//! <nodes> <edges> <period>
//! <tail> <head> <k> <t1> <w1> ... <tk> <wk>
//! ```
//!
//! Hierarchy files:
//! ```text
//! tch 1 <exact|approx> <epsilon>
//! <nodes> <original edges> <period> <hierarchy edges>
//! order <node of rank 0> <node of rank 1> ...
//! <u|d> <tail> <head> <middle|-1> <original|-1> e <ttf> <validity>
//! <u|d> <tail> <head> <middle|-1> <original|-1> b <lower ttf> <upper ttf> <validity>
//! ```
//! where `<ttf>` is `<k> <t1> <w1> ...` and `<validity>` is `-` or
//! `<m> <begin1> <end1> ...`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::query::QueryResult;
use crate::tdgraph::{Edge, EdgeWeight, GraphError, Hierarchy, HierarchyEdge, Mode, NodeId, NodeOrder, TdGraph};
use crate::ttf::{BoundPair, Point, TimeInterval, Ttf, TtfError};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

/// Whitespace-separated tokens of one line.
struct Tokens<'a> {
    line: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn next_str(&mut self, what: &str) -> Result<&'a str, ParseError> {
        match self.iter.next() {
            Some(tok) => Ok(tok),
            None => err(self.line, format!("missing {what}")),
        }
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let tok = self.next_str(what)?;
        tok.parse().or_else(|_| err(self.line, format!("invalid {what} '{tok}'")))
    }

    /// A node id, or `None` for `-1`.
    fn optional_id(&mut self, what: &str) -> Result<Option<u32>, ParseError> {
        match self.next_str(what)? {
            "-1" => Ok(None),
            tok => tok.parse().map(Some).or_else(|_| err(self.line, format!("invalid {what} '{tok}'"))),
        }
    }

    fn ttf(&mut self, period: f64) -> Result<Ttf, ParseError> {
        let k: usize = self.next("point count")?;
        let mut points = Vec::with_capacity(k);
        for _ in 0..k {
            let at = self.next("breakpoint time")?;
            let val = self.next("breakpoint value")?;
            points.push(Point { at, val });
        }
        Ttf::new(points, period).or_else(|e: TtfError| err(self.line, e.to_string()))
    }

    fn end(mut self) -> Result<(), ParseError> {
        match self.iter.next() {
            Some(tok) => err(self.line, format!("unexpected trailing token '{tok}'")),
            None => Ok(()),
        }
    }
}

/// Content lines with 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    fn next_line(&mut self) -> Option<Tokens<'a>> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some(Tokens { line: i + 1, iter: trimmed.split_whitespace() });
        }
        None
    }

    fn expect_line(&mut self, what: &str) -> Result<Tokens<'a>, ParseError> {
        match self.next_line() {
            Some(t) => Ok(t),
            None => err(self.last + 1, format!("unexpected end of file, expected {what}")),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.next_line() {
            Some(t) => err(t.line, "unexpected extra line"),
            None => Ok(()),
        }
    }
}

/// Shortest round-trip representation, `inf` for infinity.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn write_ttf(out: &mut String, ttf: &Ttf) {
    write!(out, "{}", ttf.len()).unwrap();
    for p in ttf.points() {
        write!(out, " {} {}", Num(p.at), Num(p.val)).unwrap();
    }
}

pub fn write_graph(graph: &TdGraph) -> String {
    let mut out = String::new();
    writeln!(out, "tdg 1").unwrap();
    writeln!(out, "{} {} {}", graph.node_count(), graph.edge_count(), Num(graph.period())).unwrap();
    for e in graph.edges() {
        write!(out, "{} {} ", e.tail, e.head).unwrap();
        write_ttf(&mut out, &e.ttf);
        out.push('\n');
    }
    out
}

fn header<'a>(lines: &mut Lines<'a>, magic: &str) -> Result<Tokens<'a>, ParseError> {
    let mut t = lines.expect_line("header")?;
    let tag = t.next_str("header")?;
    let version = t.next_str("version")?;
    if tag != magic || version != "1" {
        return err(t.line, format!("expected header '{magic} 1', found '{tag} {version}'"));
    }
    Ok(t)
}

fn graph_error(line: usize, e: GraphError) -> ParseError {
    ParseError { line, message: e.to_string() }
}

pub fn parse_graph(text: &str) -> Result<TdGraph, ParseError> {
    let mut lines = Lines::new(text);
    header(&mut lines, "tdg")?.end()?;
    let mut t = lines.expect_line("size line")?;
    let size_line = t.line;
    let nodes: usize = t.next("node count")?;
    let count: usize = t.next("edge count")?;
    let period: f64 = t.next("period")?;
    t.end()?;
    if !(period.is_finite() && period > 0.0) {
        return err(size_line, format!("invalid period {period}"));
    }
    let mut edges = Vec::with_capacity(count);
    for _ in 0..count {
        let mut t = lines.expect_line("edge line")?;
        let line = t.line;
        let tail: NodeId = t.next("tail")?;
        let head: NodeId = t.next("head")?;
        let ttf = t.ttf(period)?;
        t.end()?;
        if tail as usize >= nodes || head as usize >= nodes {
            return err(line, format!("edge {tail} -> {head} has an endpoint outside 0..{nodes}"));
        }
        edges.push(Edge { tail, head, ttf });
    }
    lines.expect_end()?;
    TdGraph::new(nodes, edges, period).map_err(|e| graph_error(size_line, e))
}

pub fn write_hierarchy(h: &Hierarchy) -> String {
    let mut out = String::new();
    match h.mode() {
        Mode::Exact => writeln!(out, "tch 1 exact 0").unwrap(),
        Mode::Approx(eps) => writeln!(out, "tch 1 approx {}", Num(eps)).unwrap(),
    }
    let g = h.graph();
    writeln!(out, "{} {} {} {}", g.node_count(), g.edge_count(), Num(g.period()), h.edges().len()).unwrap();
    out.push_str("order");
    for v in h.order().sequence() {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
    let opt = |x: Option<u32>| x.map_or("-1".to_string(), |v| v.to_string());
    for (id, e) in h.edges().iter().enumerate() {
        let dir = if h.is_up(id as u32) { 'u' } else { 'd' };
        write!(out, "{dir} {} {} {} {} ", e.tail, e.head, opt(e.middle), opt(e.original)).unwrap();
        match &e.weight {
            EdgeWeight::Exact(ttf) => {
                out.push_str("e ");
                write_ttf(&mut out, ttf);
            }
            EdgeWeight::Bounds(b) => {
                out.push_str("b ");
                write_ttf(&mut out, &b.lower);
                out.push(' ');
                write_ttf(&mut out, &b.upper);
            }
        }
        match &e.validity {
            None => out.push_str(" -"),
            Some(ivs) => {
                write!(out, " {}", ivs.len()).unwrap();
                for iv in ivs {
                    write!(out, " {} {}", Num(iv.begin), Num(iv.end)).unwrap();
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_hierarchy(text: &str) -> Result<Hierarchy, ParseError> {
    let mut lines = Lines::new(text);
    let mut t = header(&mut lines, "tch")?;
    let line = t.line;
    let mode = match t.next_str("mode")? {
        "exact" => {
            let _: f64 = t.next("epsilon")?;
            Mode::Exact
        }
        "approx" => {
            let eps: f64 = t.next("epsilon")?;
            if !(eps.is_finite() && eps >= 0.0) {
                return err(line, format!("invalid epsilon {eps}"));
            }
            Mode::Approx(eps)
        }
        other => return err(line, format!("unknown mode '{other}'")),
    };
    t.end()?;

    let mut t = lines.expect_line("size line")?;
    let size_line = t.line;
    let nodes: usize = t.next("node count")?;
    let originals: usize = t.next("original edge count")?;
    let period: f64 = t.next("period")?;
    let count: usize = t.next("hierarchy edge count")?;
    t.end()?;
    if !(period.is_finite() && period > 0.0) {
        return err(size_line, format!("invalid period {period}"));
    }

    let mut t = lines.expect_line("order line")?;
    let order_line = t.line;
    if t.next_str("order")? != "order" {
        return err(order_line, "expected 'order'");
    }
    let mut sequence = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        sequence.push(t.next::<NodeId>("node")?);
    }
    t.end()?;
    let order = NodeOrder::from_sequence(&sequence).map_err(|e| graph_error(order_line, e))?;

    let mut edges = Vec::with_capacity(count);
    let mut original_edges: Vec<Option<Edge>> = vec![None; originals];
    let mut directions = Vec::with_capacity(count);
    for _ in 0..count {
        let mut t = lines.expect_line("hierarchy edge line")?;
        let line = t.line;
        let up = match t.next_str("direction")? {
            "u" => true,
            "d" => false,
            other => return err(line, format!("invalid direction '{other}'")),
        };
        let tail: NodeId = t.next("tail")?;
        let head: NodeId = t.next("head")?;
        if tail as usize >= nodes || head as usize >= nodes {
            return err(line, format!("edge {tail} -> {head} has an endpoint outside 0..{nodes}"));
        }
        let middle = t.optional_id("middle node")?;
        let original = t.optional_id("original edge id")?;
        let weight = match t.next_str("weight kind")? {
            "e" => EdgeWeight::Exact(t.ttf(period)?),
            "b" => {
                let lower = t.ttf(period)?;
                let upper = t.ttf(period)?;
                EdgeWeight::Bounds(BoundPair { lower, upper })
            }
            other => return err(line, format!("invalid weight kind '{other}'")),
        };
        let validity = match t.next_str("validity")? {
            "-" => None,
            tok => {
                let m: usize = tok.parse().or_else(|_| err(line, format!("invalid validity count '{tok}'")))?;
                let mut ivs = Vec::with_capacity(m);
                for _ in 0..m {
                    let begin = t.next("interval begin")?;
                    let end = t.next("interval end")?;
                    ivs.push(TimeInterval { begin, end });
                }
                Some(ivs)
            }
        };
        t.end()?;
        if let Some(id) = original {
            let slot = original_edges.get_mut(id as usize);
            let Some(slot) = slot else {
                return err(line, format!("original edge id {id} out of range"));
            };
            let Some(ttf) = weight.exact() else {
                return err(line, "original edges need an exact weight");
            };
            *slot = Some(Edge { tail, head, ttf: ttf.clone() });
        }
        directions.push((line, up));
        edges.push(HierarchyEdge { tail, head, weight, middle, original, validity });
    }
    lines.expect_end()?;

    let mut graph_edges = Vec::with_capacity(originals);
    for (id, e) in original_edges.into_iter().enumerate() {
        match e {
            Some(e) => graph_edges.push(e),
            None => return err(size_line, format!("original edge {id} missing")),
        }
    }
    let graph = TdGraph::new(nodes, graph_edges, period).map_err(|e| graph_error(size_line, e))?;
    for (e, &(line, up)) in edges.iter().zip(&directions) {
        if (order.rank(e.tail) < order.rank(e.head)) != up {
            return err(line, "direction flag disagrees with the node order");
        }
    }
    Hierarchy::new(graph, order, mode, edges).map_err(|e| graph_error(size_line, e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Query {
    pub source: NodeId,
    pub target: NodeId,
    pub departure: f64,
}

pub fn parse_queries(text: &str) -> Result<Vec<Query>, ParseError> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while let Some(mut t) = lines.next_line() {
        let source = t.next("source")?;
        let target = t.next("target")?;
        let departure: f64 = t.next("departure")?;
        let line = t.line;
        t.end()?;
        if !departure.is_finite() {
            return err(line, format!("invalid departure {departure}"));
        }
        out.push(Query { source, target, departure });
    }
    Ok(out)
}

pub fn write_queries(queries: &[Query]) -> String {
    let mut out = String::new();
    for q in queries {
        writeln!(out, "{} {} {}", q.source, q.target, Num(q.departure)).unwrap();
    }
    out
}

/// `<s> <t> <tau> <arrival> <travel_time> <settled>`; `inf` when unreachable.
pub fn format_result(r: &QueryResult) -> String {
    let arrival = r.arrival.unwrap_or(f64::INFINITY);
    let travel = r.travel_time().unwrap_or(f64::INFINITY);
    format!("{} {} {} {} {} {}", r.source, r.target, Num(r.departure), Num(arrival), Num(travel), r.stats.settled)
}
