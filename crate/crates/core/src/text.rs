//! Versioned plain-text formats for trees, colorings and finite sets.
//!
//! Every file starts with a `<kind> v1 key=value` header. Blank lines and
//! lines starting with `#` are ignored. Errors carry 1-based line numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::colorings::{Coloring, DENSE_MAX_DEPTH};
use crate::error::{parse_err, Error, Result};
use crate::ideals::{GridSet, NatSet, NodeSet};
use crate::treecore::{BinaryString, LevelTree};

/// Largest depth the coloring writer will emit node by node.
pub const COLORING_WRITE_MAX_DEPTH: usize = 20;

struct Body<'a> {
    header_line: usize,
    fields: BTreeMap<&'a str, &'a str>,
    lines: Vec<(usize, &'a str)>,
}

fn split<'a>(text: &'a str, kind: &str) -> Result<Body<'a>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, format!("empty file, expected `{kind} v1` header")))?;
    let mut words = header.split_whitespace();
    if words.next() != Some(kind) {
        return Err(parse_err(header_line, format!("expected `{kind} v1` header")));
    }
    match words.next() {
        Some("v1") => {}
        Some(v) => return Err(parse_err(header_line, format!("unsupported version {v:?}"))),
        None => return Err(parse_err(header_line, "missing version")),
    }
    let mut fields = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| parse_err(header_line, format!("header field {w:?} is not key=value")))?;
        if fields.insert(k, v).is_some() {
            return Err(parse_err(header_line, format!("duplicate header field {k}")));
        }
    }
    Ok(Body {
        header_line,
        fields,
        lines: lines.collect(),
    })
}

impl Body<'_> {
    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self
            .fields
            .get(key)
            .ok_or_else(|| parse_err(self.header_line, format!("header lacks {key}=")))?;
        v.parse()
            .map_err(|_| parse_err(self.header_line, format!("{key}={v} is not a natural number")))
    }
}

fn node(line: usize, word: &str, depth: usize) -> Result<BinaryString> {
    let s = BinaryString::parse(word).map_err(|e| parse_err(line, e.to_string()))?;
    if s.len() >= depth {
        return Err(parse_err(line, format!("node {word} has length ≥ depth {depth}")));
    }
    Ok(s)
}

/// Reads a tree and validates it; the validator's first violation is
/// reported at the line of the offending node.
pub fn parse_tree(text: &str) -> Result<LevelTree> {
    let body = split(text, "tree")?;
    let depth: usize = body.number("depth")?;
    if depth == 0 || depth > crate::treecore::MAX_DEPTH {
        return Err(parse_err(body.header_line, format!("depth {depth} out of range")));
    }
    let mut levels = vec![BTreeSet::new(); depth];
    let mut line_of = BTreeMap::new();
    for &(no, line) in &body.lines {
        let mut words = line.split_whitespace();
        let s = node(no, words.next().unwrap_or_default(), depth)?;
        if words.next().is_some() {
            return Err(parse_err(no, "expected one node per line"));
        }
        if line_of.insert(s, no).is_some() {
            return Err(parse_err(no, format!("node {} listed twice", s.token())));
        }
        levels[s.len()].insert(s);
    }
    let candidate = LevelTree::from_levels_unchecked(levels);
    let report = crate::treecore::validate(&candidate);
    if let Some(v) = report.violations.first() {
        let line = line_of.get(&v.node).copied().unwrap_or(body.header_line);
        return Err(parse_err(line, format!("node {}: {} rule violated", v.node.token(), v.rule)));
    }
    Ok(candidate)
}

pub fn write_tree(t: &LevelTree) -> String {
    let mut out = format!("tree v1 depth={}\n", t.depth());
    for s in t.nodes() {
        out.push_str(&s.token());
        out.push('\n');
    }
    out
}

/// Reads a coloring. Nodes not listed are colored 0.
pub fn parse_coloring(text: &str) -> Result<Coloring> {
    let body = split(text, "coloring")?;
    let depth: usize = body.number("depth")?;
    if depth == 0 || depth > crate::treecore::MAX_DEPTH {
        return Err(parse_err(body.header_line, format!("depth {depth} out of range")));
    }
    let mut seen = BTreeSet::new();
    let mut ones = BTreeSet::new();
    for &(no, line) in &body.lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        let [word, color] = words[..] else {
            return Err(parse_err(no, "expected `<node> <0|1>`"));
        };
        let s = node(no, word, depth)?;
        let c = match color {
            "0" => 0,
            "1" => 1,
            other => return Err(parse_err(no, format!("color {other:?} is not 0 or 1"))),
        };
        if !seen.insert(s) {
            return Err(parse_err(no, format!("node {} colored twice", s.token())));
        }
        if c == 1 {
            ones.insert(s);
        }
    }
    if depth <= DENSE_MAX_DEPTH {
        Coloring::from_fn(depth, |s| u8::from(ones.contains(s)))
    } else {
        let mut c = Coloring::constant(depth, 0)?;
        for s in &ones {
            c.set(s, 1);
        }
        Ok(c)
    }
}

/// Writes every node of `2^{<D}` in length-lexicographic order.
pub fn write_coloring(c: &Coloring) -> Result<String> {
    let depth = c.depth();
    if depth > COLORING_WRITE_MAX_DEPTH {
        return Err(Error::Range(format!(
            "coloring writer limited to depth {COLORING_WRITE_MAX_DEPTH}, got {depth}"
        )));
    }
    let mut out = format!("coloring v1 depth={depth}\n");
    for idx in 0..(1usize << depth) - 1 {
        let s = BinaryString::from_index(idx);
        let _ = writeln!(out, "{} {}", s.token(), c.color(&s));
    }
    Ok(out)
}

pub fn parse_natset(text: &str) -> Result<NatSet> {
    let body = split(text, "natset")?;
    let bound: u64 = body.number("bound")?;
    let mut members = BTreeSet::new();
    for &(no, line) in &body.lines {
        let n: u64 = line
            .parse()
            .map_err(|_| parse_err(no, format!("{line:?} is not a natural number")))?;
        if n >= bound {
            return Err(parse_err(no, format!("{n} is not below bound {bound}")));
        }
        members.insert(n);
    }
    NatSet::new(bound, members)
}

pub fn write_natset(a: &NatSet) -> String {
    let mut out = format!("natset v1 bound={}\n", a.bound());
    for n in a.members() {
        let _ = writeln!(out, "{n}");
    }
    out
}

pub fn parse_gridset(text: &str) -> Result<GridSet> {
    let body = split(text, "gridset")?;
    let bound: u64 = body.number("bound")?;
    let mut cells = BTreeSet::new();
    for &(no, line) in &body.lines {
        let nums: Vec<u64> = line
            .split_whitespace()
            .map(|w| w.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(no, "expected `<col> <row>`"))?;
        let [c, r] = nums[..] else {
            return Err(parse_err(no, "expected `<col> <row>`"));
        };
        if c >= bound || r >= bound {
            return Err(parse_err(no, format!("cell ({c}, {r}) is not below bound {bound}")));
        }
        cells.insert((c, r));
    }
    GridSet::new(bound, cells)
}

pub fn write_gridset(g: &GridSet) -> String {
    let mut out = format!("gridset v1 bound={}\n", g.bound());
    for (c, r) in g.cells() {
        let _ = writeln!(out, "{c} {r}");
    }
    out
}

/// `nodeset v1 depth=<D>`, one node of `2^{<D}` per line.
pub fn parse_nodeset(text: &str) -> Result<NodeSet> {
    let body = split(text, "nodeset")?;
    let depth: usize = body.number("depth")?;
    if depth == 0 || depth > crate::treecore::MAX_DEPTH {
        return Err(parse_err(body.header_line, format!("depth {depth} out of range")));
    }
    let mut nodes = BTreeSet::new();
    for &(no, line) in &body.lines {
        nodes.insert(node(no, line, depth)?);
    }
    NodeSet::new(depth, nodes)
}

pub fn write_nodeset(a: &NodeSet) -> String {
    let mut out = format!("nodeset v1 depth={}\n", a.depth());
    for s in a.nodes() {
        let _ = writeln!(out, "{}", s.token());
    }
    out
}
