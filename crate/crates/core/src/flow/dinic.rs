//! Dinic's blocking-flow algorithm over exact 128-bit capacities.

use std::collections::VecDeque;

use crate::graph::Graph;

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    rev: usize,
    res: i128,
}

/// Residual network with arcs stored per tail vertex.
#[derive(Clone, Debug)]
pub(crate) struct Network {
    adj: Vec<Vec<Arc>>,
    level: Vec<u32>,
    cursor: Vec<usize>,
}

impl Network {
    pub fn new(n: usize) -> Self {
        Network { adj: vec![Vec::new(); n], level: vec![0; n], cursor: vec![0; n] }
    }

    /// Adds an arc pair and returns the position `(tail, index)` of the forward arc.
    ///
    /// `cap_back` is the capacity of the reverse arc (equal to `cap` for undirected edges).
    pub fn add(&mut self, a: usize, b: usize, cap: i128, cap_back: i128) -> (usize, usize) {
        let ia = self.adj[a].len();
        let ib = self.adj[b].len();
        self.adj[a].push(Arc { to: b, rev: ib, res: cap });
        self.adj[b].push(Arc { to: a, rev: ia, res: cap_back });
        (a, ia)
    }

    pub fn residual(&self, at: (usize, usize)) -> i128 {
        self.adj[at.0][at.1].res
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = u32::MAX);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for a in &self.adj[x] {
                if a.res > 0 && self.level[a.to] == u32::MAX {
                    self.level[a.to] = self.level[x] + 1;
                    q.push_back(a.to);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    /// Sends up to `limit` units from `s` to `t` along the level graph without recursion.
    fn augment(&mut self, s: usize, t: usize, limit: i128) -> i128 {
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut x = s;
        loop {
            if x == t {
                let push = path
                    .iter()
                    .map(|&(v, i)| self.adj[v][i].res)
                    .fold(limit, i128::min);
                for &(v, i) in &path {
                    self.adj[v][i].res -= push;
                    let Arc { to, rev, .. } = self.adj[v][i];
                    self.adj[to][rev].res += push;
                }
                return push;
            }
            let mut advanced = false;
            while self.cursor[x] < self.adj[x].len() {
                let a = self.adj[x][self.cursor[x]];
                if a.res > 0 && self.level[a.to] == self.level[x] + 1 {
                    path.push((x, self.cursor[x]));
                    x = a.to;
                    advanced = true;
                    break;
                }
                self.cursor[x] += 1;
            }
            if !advanced {
                // Dead end: retreat and skip the arc that led here.
                self.level[x] = u32::MAX;
                match path.pop() {
                    Some((v, i)) => {
                        self.cursor[v] = i + 1;
                        x = v;
                    }
                    None => return 0,
                }
            }
        }
    }

    /// Maximum flow value from `s` to `t`; the residual state is kept for cut queries.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i128 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let f = self.augment(s, t, i128::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// Vertices reachable from `s` in the residual network.
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for a in &self.adj[x] {
                if a.res > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

/// A solved single-commodity flow problem on an undirected graph.
#[derive(Clone, Debug)]
pub(crate) struct Solved {
    pub value: i128,
    /// Net flow on each edge in the orientation `edge.u → edge.v`.
    pub edge_flow: Vec<i128>,
    /// Residual-reachable side of the minimum cut, over original vertices.
    pub source_side: Vec<bool>,
}

/// Max flow on `g` with edge capacities `edge_mult·cap(e)`, a super-source feeding
/// `supply(v)` into each vertex and a super-sink draining `demand(v)`.
pub(crate) fn solve(g: &Graph, edge_mult: i128, supply: &[i128], demand: &[i128]) -> Solved {
    let n = g.n();
    let (s, t) = (n, n + 1);
    let mut net = Network::new(n + 2);
    let arcs: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| {
            let c = edge_mult * e.cap as i128;
            net.add(e.u, e.v, c, c)
        })
        .collect();
    for v in 0..n {
        if supply[v] > 0 {
            net.add(s, v, supply[v], 0);
        }
        if demand[v] > 0 {
            net.add(v, t, demand[v], 0);
        }
    }
    let value = net.max_flow(s, t);
    let edge_flow = g
        .edges()
        .iter()
        .zip(&arcs)
        .map(|(e, &at)| edge_mult * e.cap as i128 - net.residual(at))
        .collect();
    let mut source_side = net.reachable(s);
    source_side.truncate(n);
    Solved { value, edge_flow, source_side }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS example, max flow 23.
        let mut net = Network::new(6);
        for (a, b, c) in
            [(0, 1, 16), (0, 2, 13), (1, 3, 12), (2, 1, 4), (2, 4, 14), (3, 2, 9), (3, 5, 20), (4, 3, 7), (4, 5, 4)]
        {
            net.add(a, b, c, 0);
        }
        assert_eq!(net.max_flow(0, 5), 23);
        let side = net.reachable(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn undirected_edge_carries_flow_both_ways() {
        let g = Graph::new(3, [(0, 1, 2), (1, 2, 5)]).unwrap();
        let r = solve(&g, 1, &[0, 0, 4], &[4, 0, 0]);
        assert_eq!(r.value, 2);
        assert_eq!(r.edge_flow, vec![-2, -2]);
    }
}
