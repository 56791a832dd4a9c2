//! Text formats: edge lists (`u v cap`), vertex weights (`v w`) and demand lists (one
//! balanced demand vector per line). Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexWeights};

fn input(line: usize, msg: impl Into<String>) -> Error {
    Error::Input { line, msg: msg.into() }
}

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| input(line, format!("missing {what}")))?;
    token.parse().map_err(|_| input(line, format!("invalid {what} {token:?}")))
}

fn no_trailing<'a>(line: usize, mut rest: impl Iterator<Item = &'a str>) -> Result<()> {
    match rest.next() {
        Some(tok) => Err(input(line, format!("unexpected trailing field {tok:?}"))),
        None => Ok(()),
    }
}

/// Parses an edge list. The vertex count is one more than the largest id, or `n` when
/// given and at least that large.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id = None;
    for (line, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let u: usize = field(line, it.next(), "vertex id")?;
        let v: usize = field(line, it.next(), "vertex id")?;
        let cap: u64 = field(line, it.next(), "capacity")?;
        no_trailing(line, it)?;
        if u == v {
            return Err(input(line, format!("self-loop at vertex {u}")));
        }
        if cap == 0 {
            return Err(input(line, "capacity must be positive"));
        }
        max_id = max_id.max(Some(u.max(v)));
        edges.push((line, u, v, cap));
    }
    let count = max_id.map_or(0, |m| m + 1);
    let n = match n {
        Some(n) if n < count => return Err(input(0, format!("vertex id {} exceeds the vertex count {n}", count - 1))),
        Some(n) => n,
        None => count,
    };
    // Overflow from aggregating parallel edges is the only remaining failure.
    let mut sums: std::collections::BTreeMap<(usize, usize), (usize, u64)> = Default::default();
    for (line, u, v, cap) in edges {
        let key = (u.min(v), u.max(v));
        let entry = sums.entry(key).or_insert((line, 0));
        entry.1 = entry.1.checked_add(cap).ok_or_else(|| input(line, "aggregated capacity overflows"))?;
    }
    Graph::new(n, sums.into_iter().map(|((u, v), (_, c))| (u, v, c)))
}

/// Writes `u v cap` lines preceded by a comment with the sizes.
pub fn write_edge_list(g: &Graph) -> String {
    let mut s = format!("# vertices {} edges {}\n", g.n(), g.m());
    for e in g.edges() {
        writeln!(s, "{} {} {}", e.u, e.v, e.cap).expect("writing to a string");
    }
    s
}

/// Parses `v w` weight lines for `n` vertices; unlisted vertices get weight 0.
pub fn parse_weights(text: &str, n: usize) -> Result<VertexWeights> {
    let mut pi = vec![0u64; n];
    let mut seen = vec![false; n];
    for (line, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let v: usize = field(line, it.next(), "vertex id")?;
        let w: u64 = field(line, it.next(), "weight")?;
        no_trailing(line, it)?;
        if v >= n {
            return Err(input(line, format!("vertex {v} outside 0..{n}")));
        }
        if seen[v] {
            return Err(input(line, format!("vertex {v} listed twice")));
        }
        seen[v] = true;
        pi[v] = w;
    }
    Ok(pi)
}

pub fn write_weights(pi: &[u64]) -> String {
    pi.iter().enumerate().fold(String::new(), |mut s, (v, w)| {
        writeln!(s, "{v} {w}").expect("writing to a string");
        s
    })
}

/// Parses demand vectors of length `n`, one per line; each must sum to zero.
pub fn parse_demands(text: &str, n: usize) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let d = l
            .split_whitespace()
            .map(|tok| tok.parse::<i64>().map_err(|_| input(line, format!("invalid demand entry {tok:?}"))))
            .collect::<Result<Vec<i64>>>()?;
        if d.len() != n {
            return Err(input(line, format!("demand has {} entries for {n} vertices", d.len())));
        }
        if d.iter().map(|&x| x as i128).sum::<i128>() != 0 {
            return Err(input(line, "demand does not sum to zero"));
        }
        out.push(d);
    }
    Ok(out)
}

pub fn write_demands(demands: &[Vec<i64>]) -> String {
    let mut s = String::new();
    for d in demands {
        let row: Vec<String> = d.iter().map(i64::to_string).collect();
        writeln!(s, "{}", row.join(" ")).expect("writing to a string");
    }
    s
}
