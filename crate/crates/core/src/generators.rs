//! Graph generators and demand samplers for experiments and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{arg, Error, Result};
use crate::graph::Graph;
use crate::hierarchy::TreeSparsifier;

/// Largest supported diamond order.
pub const DIAMOND_MAX_ORDER: u32 = 8;

/// Complete graph `K_n` with unit capacities.
pub fn complete(n: usize) -> Result<Graph> {
    Graph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, 1))))
}

/// Two `K_size` cliques joined by `bridges` unit edges `(size−1−i, size+i)`.
pub fn dumbbell(size: usize, bridges: usize) -> Result<Graph> {
    if size < 1 || bridges < 1 || bridges > size {
        return arg(format!("dumbbell needs 1 ≤ bridges ≤ clique size, got {bridges} and {size}"));
    }
    let mut e = Vec::new();
    for base in [0, size] {
        for a in 0..size {
            for b in a + 1..size {
                e.push((base + a, base + b, 1));
            }
        }
    }
    for i in 0..bridges {
        e.push((size - 1 - i, size + i, 1));
    }
    Graph::new(2 * size, e)
}

/// `w × h` grid with unit capacities; vertex `(x, y)` has id `y·w + x`.
pub fn grid(w: usize, h: usize) -> Result<Graph> {
    if w == 0 || h == 0 {
        return arg("grid dimensions must be positive");
    }
    let mut e = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                e.push((v, v + 1, 1));
            }
            if y + 1 < h {
                e.push((v, v + w, 1));
            }
        }
    }
    Graph::new(w * h, e)
}

/// Joins the components of an edge list by linking consecutive component
/// representatives in a random order.
fn connect(n: usize, mut edges: Vec<(usize, usize, u64)>, rng: &mut impl Rng, max_cap: u64) -> Result<Graph> {
    let g = Graph::new(n, edges.iter().copied())?;
    let comp = g.components();
    let mut reps: Vec<usize> = Vec::new();
    let mut seen = vec![false; n];
    for v in 0..n {
        if !seen[comp[v]] {
            seen[comp[v]] = true;
            reps.push(v);
        }
    }
    if reps.len() == 1 {
        return Ok(g);
    }
    reps.shuffle(rng);
    for w in reps.windows(2) {
        edges.push((w[0], w[1], rng.random_range(1..=max_cap)));
    }
    Graph::new(n, edges)
}

/// `G(n, p)` with unit capacities, made connected by linking its components.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Result<Graph> {
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return arg(format!("invalid Erdős–Rényi parameters n = {n}, p = {p}"));
    }
    let mut e = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                e.push((a, b, 1));
            }
        }
    }
    connect(n, e, rng, 1)
}

/// Random connected graph: a random spanning tree plus `extra` random edges, all with
/// capacities uniform in `1..=max_cap`.
pub fn random_connected(n: usize, extra: usize, max_cap: u64, rng: &mut impl Rng) -> Result<Graph> {
    if n == 0 || max_cap == 0 {
        return arg("random graph needs n ≥ 1 and max_cap ≥ 1");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut e = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        e.push((order[i], order[j], rng.random_range(1..=max_cap)));
    }
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n - 1);
            let b = if b >= a { b + 1 } else { b };
            e.push((a, b, rng.random_range(1..=max_cap)));
        }
    }
    Graph::new(n, e)
}

/// `groups` random connected groups of `size` vertices with internal capacities in
/// `1..=inner_cap`, linked into a connected whole by `links` unit edges between groups.
pub fn planted_clusters(groups: usize, size: usize, inner_cap: u64, links: usize, rng: &mut impl Rng) -> Result<Graph> {
    if groups == 0 || size == 0 || inner_cap == 0 {
        return arg("planted clusters need positive group count, size and capacity");
    }
    let n = groups * size;
    let mut e = Vec::new();
    for gi in 0..groups {
        let inner = random_connected(size, size, inner_cap, rng)?;
        e.extend(inner.edges().iter().map(|x| (gi * size + x.u, gi * size + x.v, x.cap)));
    }
    for gi in 1..groups {
        let other = rng.random_range(0..gi);
        e.push((gi * size + rng.random_range(0..size), other * size + rng.random_range(0..size), 1));
    }
    if groups >= 2 {
        for _ in 0..links {
            let a = rng.random_range(0..groups);
            let b = (a + rng.random_range(1..groups)) % groups;
            e.push((a * size + rng.random_range(0..size), b * size + rng.random_range(0..size), 1));
        }
    }
    Graph::new(n, e)
}

/// Recursive diamond graph `D_k` between `s = 0` and `t = 1` together with its
/// recursive structure.
#[derive(Clone, Debug)]
pub struct Diamond {
    pub graph: Graph,
    pub k: u32,
    root: Part,
}

/// `D_j^{s,t}`: for `j ≥ 1`, a left path through `ℓ` and a right path through `r`.
#[derive(Clone, Debug)]
struct Part {
    s: usize,
    t: usize,
    halves: Option<Box<[(usize, Part, Part); 2]>>,
}

/// Two consecutive sub-diamonds `x → m → y` of the same order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiamondPath {
    pub start: usize,
    pub middle: usize,
    pub end: usize,
    pub order: u32,
}

fn build_part(k: u32, s: usize, t: usize, next: &mut usize, edges: &mut Vec<(usize, usize, u64)>) -> Part {
    if k == 0 {
        edges.push((s, t, 1));
        return Part { s, t, halves: None };
    }
    let mut side = || {
        let mid = *next;
        *next += 1;
        let first = build_part(k - 1, s, mid, next, edges);
        let second = build_part(k - 1, mid, t, next, edges);
        (mid, first, second)
    };
    let left = side();
    let right = side();
    Part { s, t, halves: Some(Box::new([left, right])) }
}

/// Builds `D_k`; vertex ids follow construction order with `s = 0`, `t = 1`.
pub fn diamond(k: u32) -> Result<Diamond> {
    if k > DIAMOND_MAX_ORDER {
        return Err(Error::Refused(format!("diamond order {k} exceeds {DIAMOND_MAX_ORDER}")));
    }
    let mut edges = Vec::new();
    let mut next = 2;
    let root = build_part(k, 0, 1, &mut next, &mut edges);
    Ok(Diamond { graph: Graph::new(next, edges)?, k, root })
}

impl Diamond {
    /// Locates the sub-diamond with endpoints `(s, t)`.
    fn find(&self, s: usize, t: usize) -> Option<&Part> {
        fn go(p: &Part, s: usize, t: usize) -> Option<&Part> {
            if p.s == s && p.t == t {
                return Some(p);
            }
            p.halves.as_ref()?.iter().find_map(|(_, a, b)| go(a, s, t).or_else(|| go(b, s, t)))
        }
        go(&self.root, s, t)
    }

    /// The two paths of order `k−1` making up the whole graph.
    pub fn top_paths(&self) -> Vec<DiamondPath> {
        paths_of(&self.root, self.k)
    }

    /// The four paths of order `order − 1` inside path `p`.
    pub fn sub_paths(&self, p: &DiamondPath) -> Vec<DiamondPath> {
        if p.order == 0 {
            return Vec::new();
        }
        let first = self.find(p.start, p.middle).expect("path halves are sub-diamonds");
        let second = self.find(p.middle, p.end).expect("path halves are sub-diamonds");
        let mut out = paths_of(first, p.order);
        out.extend(paths_of(second, p.order));
        out
    }

    /// Edges `(u, v)` of the path.
    pub fn path_edges(&self, p: &DiamondPath) -> Vec<(usize, usize)> {
        fn collect(part: &Part, out: &mut Vec<(usize, usize)>) {
            match &part.halves {
                None => out.push((part.s, part.t)),
                Some(h) => {
                    for (_, a, b) in h.iter() {
                        collect(a, out);
                        collect(b, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (s, t) in [(p.start, p.middle), (p.middle, p.end)] {
            collect(self.find(s, t).expect("path halves are sub-diamonds"), &mut out);
        }
        out
    }
}

fn paths_of(part: &Part, order: u32) -> Vec<DiamondPath> {
    match &part.halves {
        None => Vec::new(),
        Some(h) => h
            .iter()
            .map(|(mid, _, _)| DiamondPath { start: part.s, middle: *mid, end: part.t, order: order - 1 })
            .collect(),
    }
}

/// Single-commodity demand of `amount` from `a` to `b` on `n` vertices.
pub fn pair_demand(n: usize, a: usize, b: usize, amount: i64) -> Vec<i64> {
    let mut d = vec![0; n];
    d[a] += amount;
    d[b] -= amount;
    d
}

/// `count` demands, each between a random distinct pair with magnitude in `1..=max_amount`.
pub fn random_pair_demands(n: usize, count: usize, max_amount: i64, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    if n < 2 {
        return vec![vec![0; n]; count];
    }
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n - 1);
            let b = if b >= a { b + 1 } else { b };
            pair_demand(n, a, b, rng.random_range(1..=max_amount.max(1)))
        })
        .collect()
}

/// Random balanced demand with entries in `-max_amount..=max_amount`.
pub fn random_balanced_demand(n: usize, max_amount: i64, rng: &mut impl Rng) -> Vec<i64> {
    let mut d: Vec<i64> = (0..n).map(|_| rng.random_range(-max_amount..=max_amount)).collect();
    if n > 0 {
        let s: i64 = d.iter().sum();
        d[n - 1] -= s;
    }
    d
}

/// Adversarial demand sequence on `D_k`: at depth `i` demands of `2^{k−i}` between the
/// current path's endpoints and its middle vertex, then recursion into the sub-path
/// picked by `choose(demands so far, candidates)`.
pub fn diamond_adversarial_demands(
    d: &Diamond,
    mut choose: impl FnMut(&[Vec<i64>], &[DiamondPath]) -> usize,
) -> Result<Vec<Vec<i64>>> {
    if d.k == 0 {
        return arg("adversarial demands need a diamond of order at least 1");
    }
    let n = d.graph.n();
    let mut out = Vec::new();
    let mut candidates = d.top_paths();
    for i in 1..=d.k {
        let pick = choose(&out, &candidates);
        let Some(&p) = candidates.get(pick) else {
            return arg(format!("path choice {pick} out of {} candidates", candidates.len()));
        };
        let amount = 1i64 << (d.k - i);
        out.push(pair_demand(n, p.start, p.middle, amount));
        out.push(pair_demand(n, p.middle, p.end, amount));
        candidates = d.sub_paths(&p);
    }
    Ok(out)
}

/// Path chooser that picks the candidate whose edges carry the largest average load
/// when all demands so far are routed along the tree: every tree cut `X` spreads
/// `|d(X)|` over its boundary edges in proportion to capacity. Ties go to the first.
pub fn tree_load_chooser<'a>(
    d: &'a Diamond,
    tree: &'a TreeSparsifier,
) -> impl FnMut(&[Vec<i64>], &[DiamondPath]) -> usize + 'a {
    let members = tree.node_members();
    let n = d.graph.n();
    let mut side = vec![vec![false; n]; tree.nodes.len()];
    for (id, m) in members.iter().enumerate() {
        for &v in m {
            side[id][v] = true;
        }
    }
    move |demands, candidates| {
        let mut load = vec![0f64; tree.nodes.len()];
        for dem in demands {
            for (id, m) in members.iter().enumerate().skip(1) {
                let dx: i64 = m.iter().map(|&v| dem[v]).sum();
                load[id] += dx.unsigned_abs() as f64 / tree.nodes[id].cap.max(1) as f64;
            }
        }
        let score = |p: &DiamondPath| {
            let edges = d.path_edges(p);
            let total: f64 = edges
                .iter()
                .map(|&(u, v)| (1..load.len()).filter(|&x| side[x][u] != side[x][v]).map(|x| load[x]).sum::<f64>())
                .sum();
            total / edges.len() as f64
        };
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, p) in candidates.iter().enumerate() {
            let s = score(p);
            if s > best_score {
                best = i;
                best_score = s;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    fn distance(g: &Graph, s: usize, t: usize) -> usize {
        let mut dist = vec![usize::MAX; g.n()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &(w, _) in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist[t]
    }

    #[test]
    fn diamond_sizes() {
        let expect = [(0, 2, 1), (1, 4, 4), (2, 12, 16), (3, 44, 64)];
        for (k, n, m) in expect {
            let d = diamond(k).unwrap();
            assert_eq!((d.graph.n(), d.graph.m()), (n, m), "k = {k}");
            assert_eq!(distance(&d.graph, 0, 1), 1 << k);
        }
        assert!(matches!(diamond(9), Err(Error::Refused(_))));
    }

    #[test]
    fn diamond_d1_ids() {
        let d = diamond(1).unwrap();
        let e: Vec<(usize, usize)> = d.graph.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(e, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
    }

    #[test]
    fn adversarial_demand_values() {
        let d1 = diamond(1).unwrap();
        let dem = diamond_adversarial_demands(&d1, |_, _| 0).unwrap();
        assert_eq!(dem.len(), 2);
        assert!(dem.iter().all(|x| x.iter().map(|v| v.abs()).max() == Some(1)));
        let d2 = diamond(2).unwrap();
        let dem = diamond_adversarial_demands(&d2, |_, c| c.len() - 1).unwrap();
        let mags: Vec<i64> = dem.iter().map(|x| x.iter().copied().max().unwrap()).collect();
        assert_eq!(mags, vec![2, 2, 1, 1]);
        assert!(dem.iter().all(|x| x.iter().sum::<i64>() == 0));
    }

    #[test]
    fn sub_paths_have_expected_edges() {
        let d = diamond(2).unwrap();
        let top = d.top_paths();
        assert_eq!(top.len(), 2);
        assert_eq!(d.path_edges(&top[0]).len(), 8);
        let subs = d.sub_paths(&top[0]);
        assert_eq!(subs.len(), 4);
        assert!(subs.iter().all(|p| d.path_edges(p).len() == 2));
    }

    #[test]
    fn random_generators_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 7, 30] {
            assert!(erdos_renyi(n, 0.05, &mut rng).unwrap().is_connected());
            assert!(random_connected(n, 3, 4, &mut rng).unwrap().is_connected());
        }
        assert_eq!(dumbbell(8, 1).unwrap().m(), 57);
        assert_eq!(grid(3, 2).unwrap().m(), 7);
        assert_eq!(complete(8).unwrap().m(), 28);
    }
}
