//! Decomposition of a flow into source-to-sink paths and cycles.

use crate::error::{Error, Result};
use crate::flow::FlowAssignment;
use crate::graph::Graph;

/// One path or cycle of a decomposition, with its weight in units of `1/den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPath {
    pub start: usize,
    pub end: usize,
    /// Vertex sequence from `start` to `end` (for a cycle `start == end`).
    pub vertices: Vec<usize>,
    /// Edge indices traversed in order.
    pub edges: Vec<usize>,
    pub weight: i128,
}

/// Paths from positive-excess to negative-excess vertices, plus any leftover circulation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathDecomposition {
    pub paths: Vec<FlowPath>,
    pub cycles: Vec<FlowPath>,
    pub den: i128,
}

impl PathDecomposition {
    /// Re-accumulates paths and cycles into a per-edge flow.
    pub fn to_flow(&self, g: &Graph) -> FlowAssignment {
        let mut num = vec![0i128; g.m()];
        for p in self.paths.iter().chain(&self.cycles) {
            for (i, &e) in p.edges.iter().enumerate() {
                let from = p.vertices[i];
                num[e] += if g.edge(e).u == from { p.weight } else { -p.weight };
            }
        }
        FlowAssignment { num, den: self.den.max(1) }
    }
}

/// Splits `f` into simple paths and simple cycles whose per-edge sums reproduce `f` exactly.
///
/// With `excess_allowed`, every vertex with nonzero net outflow must be marked there;
/// otherwise a consistency error is returned.
pub fn path_decomposition(
    g: &Graph,
    f: &FlowAssignment,
    excess_allowed: Option<&[bool]>,
) -> Result<PathDecomposition> {
    let n = g.n();
    if f.num.len() != g.m() {
        return Err(Error::Argument(format!("flow has {} entries for {} edges", f.num.len(), g.m())));
    }
    let excess = f.net_out_units(g);
    if let Some(ok) = excess_allowed {
        if let Some(v) = (0..n).find(|&v| excess[v] != 0 && !ok[v]) {
            return Err(Error::Consistency(format!(
                "vertex {v} has net outflow {}/{} but is not a declared source or sink",
                excess[v], f.den
            )));
        }
    }
    let mut out: Vec<Vec<(usize, usize, i128)>> = vec![Vec::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        let x = f.num[e];
        if x > 0 {
            out[edge.u].push((edge.v, e, x));
        } else if x < 0 {
            out[edge.v].push((edge.u, e, -x));
        }
    }
    let mut peeler = Peeler { out, cursor: vec![0; n], on_walk: vec![usize::MAX; n], excess };
    let mut result = PathDecomposition { den: f.den, ..Default::default() };
    for v in 0..n {
        while peeler.excess[v] > 0 {
            peeler.peel(v, true, &mut result)?;
        }
    }
    // What remains is a circulation.
    for v in 0..n {
        while peeler.next_arc(v).is_some() {
            peeler.peel(v, false, &mut result)?;
        }
    }
    Ok(result)
}

struct Peeler {
    /// Remaining flow per outgoing arc: (head, edge, amount).
    out: Vec<Vec<(usize, usize, i128)>>,
    cursor: Vec<usize>,
    /// Position of a vertex on the current walk.
    on_walk: Vec<usize>,
    excess: Vec<i128>,
}

impl Peeler {
    fn next_arc(&mut self, x: usize) -> Option<usize> {
        while self.cursor[x] < self.out[x].len() {
            if self.out[x][self.cursor[x]].2 > 0 {
                return Some(self.cursor[x]);
            }
            self.cursor[x] += 1;
        }
        None
    }

    /// Removes `w` units along `arcs` and returns the traversed vertices and edges.
    fn take(&mut self, arcs: &[(usize, usize)], w: i128, last: usize) -> (Vec<usize>, Vec<usize>) {
        let mut vertices = Vec::with_capacity(arcs.len() + 1);
        let mut edges = Vec::with_capacity(arcs.len());
        for &(v, i) in arcs {
            self.out[v][i].2 -= w;
            vertices.push(v);
            edges.push(self.out[v][i].1);
        }
        vertices.push(last);
        (vertices, edges)
    }

    /// Walks from `start`, cancelling any cycle closed on the way, until it reaches a
    /// deficit vertex (`to_sink`) or runs out of arcs.
    fn peel(&mut self, start: usize, to_sink: bool, result: &mut PathDecomposition) -> Result<()> {
        let mut walk: Vec<(usize, usize)> = Vec::new();
        let mut x = start;
        self.on_walk[x] = 0;
        loop {
            if to_sink && x != start && self.excess[x] < 0 {
                let w = walk
                    .iter()
                    .map(|&(v, i)| self.out[v][i].2)
                    .fold(self.excess[start].min(-self.excess[x]), i128::min);
                let (vertices, edges) = self.take(&walk, w, x);
                for &v in &vertices {
                    self.on_walk[v] = usize::MAX;
                }
                self.excess[start] -= w;
                self.excess[x] += w;
                result.paths.push(FlowPath { start, end: x, vertices, edges, weight: w });
                return Ok(());
            }
            let Some(i) = self.next_arc(x) else {
                for &(v, _) in &walk {
                    self.on_walk[v] = usize::MAX;
                }
                self.on_walk[x] = usize::MAX;
                if to_sink {
                    return Err(Error::Consistency(format!(
                        "flow from vertex {start} is stuck at vertex {x}"
                    )));
                }
                return Ok(());
            };
            walk.push((x, i));
            let y = self.out[x][i].0;
            if self.on_walk[y] == usize::MAX {
                self.on_walk[y] = walk.len();
                x = y;
                continue;
            }
            let cyc = walk.split_off(self.on_walk[y]);
            let w = cyc.iter().map(|&(v, i)| self.out[v][i].2).min().unwrap_or(0);
            let (vertices, edges) = self.take(&cyc, w, y);
            for &(v, _) in cyc.iter().skip(1) {
                self.on_walk[v] = usize::MAX;
            }
            result.cycles.push(FlowPath { start: y, end: y, vertices, edges, weight: w });
            x = y;
        }
    }
}
