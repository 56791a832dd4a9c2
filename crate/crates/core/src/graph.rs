//! Undirected capacitated graphs, vertex weights and partitions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

/// One aggregated undirected edge, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cap: u64,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u { self.v } else { self.u }
    }
}

/// Undirected graph with positive integer capacities; parallel edges are merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

/// Non-negative integer weight per vertex (indexed by vertex id).
pub type VertexWeights = Vec<u64>;

impl Graph {
    /// Builds a graph, summing the capacities of parallel edges.
    ///
    /// Rejects self-loops, zero capacities and out-of-range endpoints.
    /// Connectivity is not required; see [`Graph::new_connected`].
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let mut agg: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (a, b, cap) in edges {
            if a >= n || b >= n {
                return arg(format!("edge ({a},{b}) has an endpoint outside 0..{n}"));
            }
            if a == b {
                return arg(format!("self-loop at vertex {a}"));
            }
            if cap == 0 {
                return arg(format!("edge ({a},{b}) has zero capacity"));
            }
            let key = (a.min(b), a.max(b));
            let slot = agg.entry(key).or_insert(0);
            *slot = slot
                .checked_add(cap)
                .ok_or_else(|| Error::Argument(format!("capacity overflow on edge {key:?}")))?;
        }
        let edges: Vec<Edge> = agg.into_iter().map(|((u, v), cap)| Edge { u, v, cap }).collect();
        let mut adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        Ok(Graph { n, edges, adj })
    }

    /// Like [`Graph::new`] but also rejects disconnected input.
    pub fn new_connected(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self> {
        let g = Self::new(n, edges)?;
        if n == 0 {
            return arg("graph has no vertices");
        }
        if !g.is_connected() {
            return arg(format!(
                "graph is disconnected ({} components)",
                g.components().iter().max().map_or(0, |c| c + 1)
            ));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of aggregated edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// `(neighbour, edge index)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Weighted degree of `v`.
    pub fn degree(&self, v: usize) -> u128 {
        self.adj[v].iter().map(|&(_, e)| self.edges[e].cap as u128).sum()
    }

    /// Weighted degrees of all vertices.
    pub fn degrees(&self) -> VertexWeights {
        (0..self.n).map(|v| self.degree(v) as u64).collect()
    }

    /// Sum of all edge capacities.
    pub fn total_capacity(&self) -> u128 {
        self.edges.iter().map(|e| e.cap as u128).sum()
    }

    /// Component label per vertex, labelled in order of smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().iter().all(|&c| c == 0)
    }

    /// Induced subgraph `G[vertices]` with local ids following the order of `vertices`.
    pub fn induced(&self, vertices: &[usize]) -> Subgraph {
        let mut to_local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            to_local[v] = i;
        }
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (idx, e) in self.edges.iter().enumerate() {
            let (a, b) = (to_local[e.u], to_local[e.v]);
            if a != usize::MAX && b != usize::MAX {
                edges.push((a, b, e.cap));
                edge_map.push(idx);
            }
        }
        let graph = Graph::new(vertices.len(), edges).expect("induced subgraph of a valid graph");
        // Local edges come out sorted by local endpoints; recover the global index of each.
        let mut by_key: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &idx in &edge_map {
            let e = &self.edges[idx];
            let (a, b) = (to_local[e.u], to_local[e.v]);
            by_key.insert((a.min(b), a.max(b)), idx);
        }
        let global_edge = graph.edges.iter().map(|e| by_key[&(e.u, e.v)]).collect();
        Subgraph { graph, to_global: vertices.to_vec(), to_local, global_edge }
    }
}

/// An induced subgraph together with its vertex and edge maps.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    /// Local vertex id to global vertex id.
    pub to_global: Vec<usize>,
    /// Global vertex id to local id, `usize::MAX` when absent.
    pub to_local: Vec<usize>,
    /// Local edge index to global edge index.
    pub global_edge: Vec<usize>,
}

impl Subgraph {
    pub fn local(&self, v: usize) -> Option<usize> {
        match self.to_local[v] {
            usize::MAX => None,
            x => Some(x),
        }
    }

    /// Maps a set of local ids back to sorted global ids.
    pub fn globals(&self, local: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = local.iter().map(|&x| self.to_global[x]).collect();
        out.sort_unstable();
        out
    }
}

/// Membership mask of `set` over `0..n`.
pub fn mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Sorted list of the indices set in `mask`.
pub fn members(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// Sorted `ground \ s`.
pub fn difference(ground: &[usize], s: &[usize]) -> Vec<usize> {
    let drop: std::collections::HashSet<usize> = s.iter().copied().collect();
    let mut out: Vec<usize> = ground.iter().copied().filter(|v| !drop.contains(v)).collect();
    out.sort_unstable();
    out
}

/// `π(S)` for integer weights.
pub fn weight_of(pi: &[u64], s: &[usize]) -> u128 {
    s.iter().map(|&v| pi[v] as u128).sum()
}

/// `π|_S`: weights outside `S` set to zero.
pub fn restrict(pi: &[u64], s: &[usize]) -> VertexWeights {
    let mut out = vec![0; pi.len()];
    for &v in s {
        out[v] = pi[v];
    }
    out
}

/// `cap(S, ground \ S)` inside `G[ground]`.
pub fn boundary_capacity(g: &Graph, s: &[usize], ground: &[usize]) -> Result<u128> {
    let in_ground = mask(g.n(), ground);
    let in_s = mask(g.n(), s);
    if let Some(&v) = s.iter().find(|&&v| !in_ground[v]) {
        return arg(format!("vertex {v} of S is outside the ground set"));
    }
    Ok(cut_capacity_masked(g, &in_s, &in_ground))
}

/// `cap(S, ground \ S)` for membership masks; assumes `S ⊆ ground`.
pub fn cut_capacity_masked(g: &Graph, in_s: &[bool], in_ground: &[bool]) -> u128 {
    g.edges()
        .iter()
        .filter(|e| in_ground[e.u] && in_ground[e.v] && in_s[e.u] != in_s[e.v])
        .map(|e| e.cap as u128)
        .sum()
}

/// `cap(A, B)` for disjoint vertex sets.
pub fn cap_between(g: &Graph, a: &[usize], b: &[usize]) -> u128 {
    let ma = mask(g.n(), a);
    let mb = mask(g.n(), b);
    g.edges()
        .iter()
        .filter(|e| (ma[e.u] && mb[e.v]) || (ma[e.v] && mb[e.u]))
        .map(|e| e.cap as u128)
        .sum()
}

/// `deg_{E(A,B)}` restricted to vertices of `A`: capacity from each `v ∈ A` into `B`.
pub fn degree_into(g: &Graph, a: &[usize], b: &[usize]) -> VertexWeights {
    let mb = mask(g.n(), b);
    let mut out = vec![0u64; g.n()];
    for &v in a {
        out[v] = g.neighbors(v).iter().filter(|(w, _)| mb[*w]).map(|&(_, e)| g.edge(e).cap).sum();
    }
    out
}

/// Disjoint cover of a ground set by non-empty clusters.
///
/// Clusters are kept sorted internally and ordered by their smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    ground: Vec<usize>,
    cluster_of: Vec<usize>,
    clusters: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition of the union of `clusters` over vertex ids `0..n`.
    pub fn new(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut cluster_of = vec![usize::MAX; n];
        let mut cl: Vec<Vec<usize>> = Vec::with_capacity(clusters.len());
        for mut c in clusters {
            if c.is_empty() {
                return arg("partition contains an empty cluster");
            }
            c.sort_unstable();
            c.dedup();
            for &v in &c {
                if v >= n {
                    return arg(format!("vertex {v} outside 0..{n}"));
                }
                if cluster_of[v] != usize::MAX {
                    return arg(format!("vertex {v} appears in two clusters"));
                }
                cluster_of[v] = 0;
            }
            cl.push(c);
        }
        cl.sort_by_key(|c| c[0]);
        for (i, c) in cl.iter().enumerate() {
            for &v in c {
                cluster_of[v] = i;
            }
        }
        let ground = members(&cluster_of.iter().map(|&c| c != usize::MAX).collect::<Vec<_>>());
        Ok(Partition { n, ground, cluster_of, clusters: cl })
    }

    /// Every vertex of `ground` in its own cluster.
    pub fn singletons(n: usize, ground: &[usize]) -> Self {
        Self::new(n, ground.iter().map(|&v| vec![v]).collect()).expect("singletons are a partition")
    }

    /// The one-cluster partition `{ground}`.
    pub fn trivial(n: usize, ground: &[usize]) -> Self {
        Self::new(n, vec![ground.to_vec()]).expect("a non-empty set is a partition")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.cluster_of[v] != usize::MAX
    }

    /// Index of the cluster holding `v`.
    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        match self.cluster_of[v] {
            usize::MAX => None,
            c => Some(c),
        }
    }

    /// Largest cluster cardinality.
    pub fn max_cluster_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `(X − T) ∪ {T}`: removes `T` from every cluster and adds it as one cluster.
    pub fn fuse(&self, t: &[usize]) -> Result<Partition> {
        if t.is_empty() {
            return arg("cannot fuse an empty set");
        }
        if let Some(&v) = t.iter().find(|&&v| v >= self.n || !self.contains(v)) {
            return arg(format!("vertex {v} of T is outside the ground set"));
        }
        let in_t = mask(self.n, t);
        let mut out: Vec<Vec<usize>> = self
            .clusters
            .iter()
            .map(|c| c.iter().copied().filter(|&v| !in_t[v]).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect();
        out.push(t.to_vec());
        Partition::new(self.n, out)
    }

    /// The partition restricted to `sub`, keeping only clusters' intersections with it.
    pub fn restricted_to(&self, sub: &[usize]) -> Partition {
        let in_sub = mask(self.n, sub);
        let parts = self
            .clusters
            .iter()
            .map(|c| c.iter().copied().filter(|&v| in_sub[v]).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect();
        Partition::new(self.n, parts).expect("restriction of a partition")
    }
}

/// `deg_∂X(v)` for every vertex: capacity of incident edges leaving `v`'s cluster,
/// including edges leaving the ground set. Zero outside the ground set.
pub fn boundary_degrees(g: &Graph, x: &Partition) -> VertexWeights {
    let mut out = vec![0u64; g.n()];
    for &v in x.ground() {
        let cv = x.cluster_of(v);
        out[v] = g
            .neighbors(v)
            .iter()
            .filter(|&&(w, _)| x.cluster_of(w) != cv)
            .map(|&(_, e)| g.edge(e).cap)
            .sum();
    }
    out
}

/// `deg_∂X(S) = Σ_{v∈S} deg_∂X(v)`.
pub fn partition_boundary_degree(g: &Graph, x: &Partition, s: &[usize]) -> Result<u128> {
    if let Some(&v) = s.iter().find(|&&v| !x.contains(v)) {
        return arg(format!("vertex {v} of S is outside the ground set"));
    }
    let deg = boundary_degrees(g, x);
    Ok(weight_of(&deg, s))
}

/// Fuses `T` into `X` and checks the boundary bound
/// `deg_∂Y(C) ≤ deg_∂X(C) − deg_∂X(T) + 2·cap(T, C∖T) + cap(T, V∖C)` in debug builds.
pub fn fuse(g: &Graph, x: &Partition, t: &[usize]) -> Result<Partition> {
    let y = x.fuse(t)?;
    if cfg!(debug_assertions) {
        let c = x.ground();
        let before = partition_boundary_degree(g, x, c)?;
        let after = partition_boundary_degree(g, &y, c)?;
        let t_deg = partition_boundary_degree(g, x, t)?;
        let rest = difference(c, t);
        let outside = difference(&(0..g.n()).collect::<Vec<_>>(), c);
        let bound = before - t_deg + 2 * cap_between(g, t, &rest) + cap_between(g, t, &outside);
        debug_assert!(after <= bound, "fuse bound violated: {after} > {bound}");
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    fn two_k4_bridge() -> Graph {
        let mut e = Vec::new();
        for base in [0, 4] {
            for a in 0..4 {
                for b in a + 1..4 {
                    e.push((base + a, base + b, 1));
                }
            }
        }
        e.push((3, 4, 1));
        Graph::new_connected(8, e).unwrap()
    }

    #[test]
    fn parallel_edges_are_aggregated() {
        let g = Graph::new(2, [(0, 1, 2), (1, 0, 3)]).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edge(0).cap, 5);
    }

    #[test]
    fn invalid_edges_are_rejected() {
        assert!(Graph::new(2, [(0, 0, 1)]).is_err());
        assert!(Graph::new(2, [(0, 1, 0)]).is_err());
        assert!(Graph::new(2, [(0, 2, 1)]).is_err());
        assert!(Graph::new_connected(3, [(0, 1, 1)]).is_err());
    }

    #[test]
    fn boundary_capacity_examples() {
        let g = path3();
        let all = [0, 1, 2];
        assert_eq!(boundary_capacity(&g, &all, &all).unwrap(), 0);
        assert_eq!(boundary_capacity(&g, &[], &all).unwrap(), 0);
        assert_eq!(boundary_capacity(&g, &[1], &all).unwrap(), 2);
        assert!(boundary_capacity(&g, &[2], &[0, 1]).is_err());
    }

    #[test]
    fn partition_boundary_degree_examples() {
        let g = path3();
        let all = [0, 1, 2];
        assert_eq!(partition_boundary_degree(&g, &Partition::trivial(3, &all), &all).unwrap(), 0);
        assert_eq!(partition_boundary_degree(&g, &Partition::singletons(3, &all), &[1]).unwrap(), 2);
        let g = two_k4_bridge();
        let all: Vec<usize> = (0..8).collect();
        assert_eq!(partition_boundary_degree(&g, &Partition::singletons(8, &all), &all).unwrap(), 26);
    }

    #[test]
    fn boundary_degree_counts_edges_leaving_the_ground_set() {
        let g = path3();
        let x = Partition::trivial(3, &[0, 1]);
        assert_eq!(boundary_degrees(&g, &x), vec![0, 1, 0]);
    }

    #[test]
    fn fuse_examples() {
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        let x = Partition::singletons(2, &[0, 1]);
        let y = fuse(&g, &x, &[0, 1]).unwrap();
        assert_eq!(y.len(), 1);
        assert_eq!(partition_boundary_degree(&g, &y, &[0, 1]).unwrap(), 0);

        let tri = Graph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let x = Partition::singletons(3, &[0, 1, 2]);
        let y = fuse(&tri, &x, &[0, 1]).unwrap();
        assert_eq!(y.clusters(), &[vec![0, 1], vec![2]]);
        assert_eq!(partition_boundary_degree(&tri, &y, &[0, 1, 2]).unwrap(), 4);

        let same = fuse(&tri, &y, &[0, 1]).unwrap();
        assert_eq!(same, y);
        assert!(y.fuse(&[]).is_err());
    }

    #[test]
    fn induced_subgraph_maps_edges_back() {
        let g = two_k4_bridge();
        let sub = g.induced(&[3, 4, 5]);
        assert_eq!(sub.graph.n(), 3);
        assert_eq!(sub.graph.m(), 2);
        for (i, e) in sub.graph.edges().iter().enumerate() {
            let ge = g.edge(sub.global_edge[i]);
            assert_eq!(ge.cap, e.cap);
            let mut ends = [sub.to_global[e.u], sub.to_global[e.v]];
            ends.sort_unstable();
            assert_eq!(ends, [ge.u, ge.v]);
        }
    }
}
