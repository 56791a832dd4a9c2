//! Hierarchical decompositions, their tree cut sparsifiers, congestion prediction and
//! quality certification.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cutmatch::CutParameters;
use crate::error::{arg, internal, Error, Result};
use crate::flow::opt_congestion;
use crate::graph::{
    boundary_capacity, boundary_degrees, cap_between, cut_capacity_masked, difference, mask, partition_boundary_degree,
    Graph, Partition,
};
use crate::oracle::{check_expanding, ORACLE_MAX_VERTICES};
use crate::partition::{partition_cluster, PartitionConfig};
use crate::rational::{ceil_log2, from_f64_ceil, from_f64_floor, int, rat, Rational};

/// Denominator used when an irrational parameter is rounded to a rational.
const ROUNDING_DEN: i128 = 1 << 20;

/// Largest cluster that [`certify_well_expanding`] checks exhaustively.
pub const CERTIFY_MAX_VERTICES: usize = 20;

/// `max(1, log₂ log₂ n)`.
pub fn loglog(n: usize) -> f64 {
    (n.max(2) as f64).log2().log2().max(1.0)
}

/// Expansion bound of a cluster of size `size` whose parent has `parent` vertices,
/// or of the root when `parent` is `None`.
pub fn expansion_bound_for(n: usize, size: usize, parent: Option<usize>) -> f64 {
    match parent {
        None => 1.0,
        Some(p) => 3.0 * loglog(n) * (2.0 * p as f64 / size as f64).log2(),
    }
}

/// Expansion parameter handed to the cluster partitioner: `min(1/f, 1/4)`, rounded
/// down to a multiple of `2⁻²⁰`.
pub fn expansion_parameter(bound: f64) -> Rational {
    let phi = from_f64_floor(1.0 / bound, ROUNDING_DEN);
    let phi = phi.min(rat(1, 4));
    if phi.is_positive() { phi } else { rat(1, ROUNDING_DEN) }
}

/// Well-expansion constant `γ = 1/(1000·e·q*)`, rounded up.
pub fn default_gamma(g: &Graph) -> Rational {
    let q = CutParameters::new(2 * g.total_capacity(), g.n()).q_star as f64;
    from_f64_ceil(1.0 / (1000.0 * std::f64::consts::E * q), 1 << 40)
}

/// Tunables for [`construct_hierarchy`].
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyConfig {
    pub seed: u64,
    /// Round-budget constant of the cut-matching game.
    pub round_constant: f64,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        HierarchyConfig { seed: 0, round_constant: PartitionConfig::default().round_constant }
    }
}

/// Counters collected while building a hierarchy.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub partition_calls: usize,
    pub bad_child_events: usize,
    pub sparse_cut_calls: usize,
}

/// Refinement chain `P_1 = {V}, …, P_L` of partitions of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchicalDecomposition {
    n: usize,
    levels: Vec<Partition>,
    pub stats: BuildStats,
}

impl HierarchicalDecomposition {
    /// Wraps explicit levels; they must form a laminar refinement chain starting at `{V}`.
    pub fn from_levels(n: usize, levels: Vec<Partition>) -> Result<Self> {
        if levels.is_empty() || levels[0].len() != 1 || levels[0].ground().len() != n {
            return arg("the first level must be the single cluster V");
        }
        if !crate::oracle::check_laminar(n, &levels, false) {
            return arg("levels do not form a laminar refinement chain");
        }
        Ok(HierarchicalDecomposition { n, levels, stats: BuildStats::default() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    /// Number of levels `L`.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Whether the last level consists of singletons.
    pub fn is_complete(&self) -> bool {
        self.levels.last().is_some_and(|p| p.max_cluster_size() == 1)
    }

    pub fn cluster(&self, level: usize, idx: usize) -> &[usize] {
        &self.levels[level].clusters()[idx]
    }

    /// Index of the cluster at `level − 1` containing cluster `idx` of `level`.
    pub fn parent(&self, level: usize, idx: usize) -> Option<usize> {
        if level == 0 {
            return None;
        }
        self.levels[level - 1].cluster_of(self.cluster(level, idx)[0])
    }

    /// `f_P(X)`: 1 for the root, `3·loglog n·log₂(2|par(X)|/|X|)` otherwise.
    pub fn expansion_bound(&self, level: usize, idx: usize) -> f64 {
        let parent = self.parent(level, idx).map(|p| self.cluster(level - 1, p).len());
        expansion_bound_for(self.n, self.cluster(level, idx).len(), parent)
    }

    /// Clusters violating `|X| ≤ |grandparent(X)|/2`, as `(level, index)`.
    pub fn grandparent_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for level in 2..self.levels.len() {
            for (idx, c) in self.levels[level].clusters().iter().enumerate() {
                let gp = self.levels[level - 2].cluster_of(c[0]).expect("laminar levels");
                if 2 * c.len() > self.cluster(level - 2, gp).len() {
                    out.push((level, idx));
                }
            }
        }
        out
    }

    /// Height bound `2⌈log₂ n⌉ + 2`.
    pub fn height_bound(&self) -> usize {
        2 * ceil_log2(self.n as u128) as usize + 2
    }
}

struct Work {
    set: Vec<usize>,
    x: Partition,
    parent_size: usize,
    processed: bool,
}

/// Builds a complete hierarchical decomposition whose non-leaf clusters are well
/// expanding with high probability.
pub fn construct_hierarchy(g: &Graph, config: &HierarchyConfig) -> Result<HierarchicalDecomposition> {
    let n = g.n();
    if n < 2 {
        return arg(format!("graph has {n} vertices; at least 2 are needed"));
    }
    if !g.is_connected() {
        return arg("graph is not connected");
    }
    let params = CutParameters::new(2 * g.total_capacity(), n);
    let tau = params.tau_star;
    let all: Vec<usize> = (0..n).collect();
    let mut stats = BuildStats::default();
    let mut call = 0u64;
    let mut next_config = || {
        call += 1;
        PartitionConfig {
            round_constant: config.round_constant,
            seed: config.seed.wrapping_add(call.wrapping_mul(0xD1B5_4A32_D192_ED03)),
        }
    };

    let root_phi = expansion_parameter(expansion_bound_for(n, n, None));
    let first = partition_cluster(g, &all, &Partition::singletons(n, &all), &root_phi, &next_config())?;
    stats.partition_calls += 1;
    stats.sparse_cut_calls += first.iterations;
    if !first.u.is_empty() {
        return internal("the root call produced a bad child");
    }
    let mut levels = vec![Partition::trivial(n, &all), first.y];
    let level_cap = 4 * ceil_log2(n as u128) as usize + 8;

    while levels.last().is_some_and(|p| p.max_cluster_size() > 1) {
        if levels.len() >= level_cap {
            return internal(format!("hierarchy exceeded {level_cap} levels"));
        }
        let prev = &levels[levels.len() - 2];
        let last = &levels[levels.len() - 1];
        // Keyed by smallest vertex, so clusters are processed in a fixed order.
        let mut work: BTreeMap<usize, Work> = BTreeMap::new();
        for c in last.clusters() {
            let parent = prev.cluster_of(c[0]).expect("laminar levels");
            work.insert(
                c[0],
                Work {
                    set: c.clone(),
                    x: Partition::singletons(n, c),
                    parent_size: prev.clusters()[parent].len(),
                    processed: c.len() == 1,
                },
            );
        }
        while let Some(key) = work.iter().find(|(_, w)| !w.processed).map(|(&k, _)| k) {
            let w = work.remove(&key).expect("present");
            let phi = expansion_parameter(expansion_bound_for(n, w.set.len(), Some(w.parent_size)));
            let res = partition_cluster(g, &w.set, &w.x, &phi, &next_config())?;
            stats.partition_calls += 1;
            stats.sparse_cut_calls += res.iterations;
            if res.u.is_empty() {
                work.insert(key, Work { x: res.y, processed: true, ..w });
                continue;
            }
            stats.bad_child_events += 1;
            let u = res.u;
            let rest = difference(&w.set, &u);
            let deg_y_u = partition_boundary_degree(g, &res.y, &u)?;
            let deg_y_c = partition_boundary_degree(g, &res.y, &w.set)?;
            let deg_x_c = partition_boundary_degree(g, &w.x, &w.set)?;
            let balanced = int(deg_y_u as i128) * int(20) >= tau * int(deg_y_c as i128)
                && deg_y_c <= deg_x_c + 2 * cap_between(g, &u, &rest);
            let rest_x = res.y.restricted_to(&rest);
            work.insert(
                rest[0],
                Work { set: rest.clone(), x: rest_x, parent_size: w.parent_size, processed: !balanced || rest.len() == 1 },
            );
            work.insert(
                u[0],
                Work { set: u.clone(), x: Partition::trivial(n, &u), parent_size: w.parent_size, processed: u.len() == 1 },
            );
        }
        let current = Partition::new(n, work.values().map(|w| w.set.clone()).collect())?;
        let next = Partition::new(n, work.values().flat_map(|w| w.x.clusters().to_vec()).collect())?;
        let l = levels.len();
        levels[l - 1] = current;
        levels.push(next);
    }
    let mut h = HierarchicalDecomposition::from_levels(n, levels)?;
    h.stats = stats;
    Ok(h)
}

/// One node of a [`TreeSparsifier`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// `cap(∂X)` in `G`; 0 for the root.
    pub cap: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_vertex: Option<usize>,
}

/// Rooted tree whose non-root nodes are the clusters of a hierarchy, each weighted by
/// the capacity of its boundary in `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSparsifier {
    pub n: usize,
    pub nodes: Vec<TreeNode>,
}

/// Converts a complete hierarchy into a tree sparsifier.
///
/// A cluster equal to its parent is merged into it. Node 0 is the root and children
/// are numbered level by level in order of their smallest vertex.
pub fn to_tree_sparsifier(h: &HierarchicalDecomposition, g: &Graph) -> Result<TreeSparsifier> {
    if !h.is_complete() {
        return arg("the hierarchy is not complete");
    }
    if g.n() != h.n() {
        return arg("graph and hierarchy disagree on the vertex count");
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let mut nodes = vec![TreeNode { id: 0, parent: None, cap: 0, leaf_vertex: (g.n() == 1).then_some(0) }];
    let mut prev_ids = vec![0usize];
    for level in 1..h.height() {
        let mut ids = Vec::with_capacity(h.levels()[level].len());
        for (idx, c) in h.levels()[level].clusters().iter().enumerate() {
            let p = h.parent(level, idx).expect("non-root level");
            let parent_id = prev_ids[p];
            if h.cluster(level - 1, p).len() == c.len() {
                ids.push(parent_id);
                continue;
            }
            let id = nodes.len();
            nodes.push(TreeNode {
                id,
                parent: Some(parent_id),
                cap: boundary_capacity(g, c, &all)?,
                leaf_vertex: None,
            });
            ids.push(id);
        }
        prev_ids = ids;
    }
    for (idx, c) in h.levels().last().expect("non-empty").clusters().iter().enumerate() {
        nodes[prev_ids[idx]].leaf_vertex = Some(c[0]);
    }
    Ok(TreeSparsifier { n: g.n(), nodes })
}

impl TreeSparsifier {
    /// Checks structure: ids in order, parents precede children, one leaf per vertex.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() || self.nodes[0].parent.is_some() {
            return arg("node 0 must be the root");
        }
        let mut seen = vec![false; self.n];
        let mut has_child = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return arg(format!("node {i} has id {}", node.id));
            }
            if i > 0 {
                match node.parent {
                    Some(p) if p < i => has_child[p] = true,
                    _ => return arg(format!("node {i} must have a parent with a smaller id")),
                }
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node.leaf_vertex {
                Some(v) if v < self.n && !seen[v] && !has_child[i] => seen[v] = true,
                Some(v) => return arg(format!("leaf vertex {v} at node {i} is invalid")),
                None if !has_child[i] => return arg(format!("node {i} is a leaf without a vertex")),
                None => {}
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return arg(format!("vertex {v} has no leaf"));
        }
        Ok(())
    }

    /// Vertex set below each node.
    pub fn node_members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for node in self.nodes.iter().rev() {
            if let Some(v) = node.leaf_vertex {
                out[node.id].push(v);
            }
            if let Some(p) = node.parent {
                let mine = std::mem::take(&mut out[node.id]);
                out[p].extend_from_slice(&mine);
                out[node.id] = mine;
            }
        }
        for s in &mut out {
            s.sort_unstable();
        }
        out
    }

    /// Graphviz rendering; edges are labelled with capacities.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph tree {\n");
        for node in &self.nodes {
            match node.leaf_vertex {
                Some(v) => writeln!(s, "  n{} [label=\"v{v}\", shape=box];", node.id),
                None => writeln!(s, "  n{} [label=\"{}\"];", node.id, node.id),
            }
            .expect("writing to a string");
        }
        for node in &self.nodes {
            if let Some(p) = node.parent {
                writeln!(s, "  n{p} -- n{} [label=\"{}\"];", node.id, node.cap).expect("writing to a string");
            }
        }
        s.push_str("}\n");
        s
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for node in &self.nodes {
            if let Some(p) = node.parent {
                depth[node.id] = depth[p] + 1;
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }
}

fn check_demand(n: usize, d: &[i64]) -> Result<()> {
    if d.len() != n {
        return arg(format!("demand has {} entries for {n} vertices", d.len()));
    }
    if d.iter().map(|&x| x as i128).sum::<i128>() != 0 {
        return arg("demand does not sum to zero");
    }
    Ok(())
}

/// `max_X |d(X)| / cap(∂X)` over the non-root nodes of the tree.
pub fn predict_congestion(t: &TreeSparsifier, d: &[i64]) -> Result<Rational> {
    check_demand(t.n, d)?;
    let mut sum = vec![0i128; t.nodes.len()];
    for node in t.nodes.iter().rev() {
        if let Some(v) = node.leaf_vertex {
            sum[node.id] += d[v] as i128;
        }
        if let Some(p) = node.parent {
            sum[p] += sum[node.id];
        }
    }
    let mut best = Rational::zero();
    for node in t.nodes.iter().skip(1) {
        let dx = sum[node.id].abs();
        if dx == 0 {
            continue;
        }
        if node.cap == 0 {
            return Err(Error::Argument(format!("demand crosses the zero-capacity cut of node {}", node.id)));
        }
        best = best.max(rat(dx, node.cap as i128));
    }
    Ok(best)
}

/// One row of a [`QualityReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualityRow {
    pub predict: Rational,
    pub opt: Rational,
    /// `opt/predict`, with `0/0 = 1`.
    pub ratio: Rational,
}

/// Result of [`quality_ratio`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualityReport {
    pub max_ratio: Rational,
    pub rows: Vec<QualityRow>,
}

/// Compares tree predictions against exact optimal congestion for each demand.
///
/// Fails with an internal error if a prediction exceeds the optimum, which would mean
/// a tree cut is not a cut of `G`.
pub fn quality_ratio(g: &Graph, t: &TreeSparsifier, demands: &[Vec<i64>]) -> Result<QualityReport> {
    let mut rows = Vec::with_capacity(demands.len());
    let mut max_ratio = Rational::one();
    for d in demands {
        let predict = predict_congestion(t, d)?;
        let opt = opt_congestion(g, d)?;
        if predict > opt {
            return internal(format!("tree predicts {predict} above the optimum {opt}"));
        }
        let ratio = if predict.is_zero() {
            if opt.is_zero() { Rational::one() } else { return internal("positive optimum with zero prediction") }
        } else {
            opt / predict
        };
        max_ratio = max_ratio.max(ratio);
        rows.push(QualityRow { predict, opt, ratio });
    }
    Ok(QualityReport { max_ratio, rows })
}

/// `6·loglog n·(L + log₂ n)/γ`.
pub fn approximation_bound(n: usize, height: usize, gamma: &Rational) -> f64 {
    6.0 * loglog(n) * (height as f64 + (n.max(1) as f64).log2()) / crate::rational::to_f64(gamma)
}

/// Per-cluster verdict of [`certify_well_expanding`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClusterStatus {
    Pass,
    Fail,
    /// Too large for exhaustive search.
    Skipped,
}

/// Certification record of one non-leaf cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterCertificate {
    pub level: usize,
    pub cluster: Vec<usize>,
    pub quality: Rational,
    pub status: ClusterStatus,
    /// Cut with the smallest ratio, when any cut exists.
    pub worst: Option<(Vec<usize>, Rational)>,
}

/// Result of [`certify_well_expanding`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyReport {
    pub clusters: Vec<ClusterCertificate>,
}

impl CertifyReport {
    /// No cluster failed (skipped clusters are not failures).
    pub fn all_pass(&self) -> bool {
        self.clusters.iter().all(|c| c.status != ClusterStatus::Fail)
    }

    pub fn skipped(&self) -> usize {
        self.clusters.iter().filter(|c| c.status == ClusterStatus::Skipped).count()
    }

    /// The failing cluster whose worst cut falls furthest below the required quality.
    pub fn worst_failure(&self) -> Option<&ClusterCertificate> {
        self.clusters
            .iter()
            .filter(|c| c.status == ClusterStatus::Fail)
            .min_by(|a, b| {
                let ra = a.worst.as_ref().map(|w| w.1 / a.quality).unwrap_or_default();
                let rb = b.worst.as_ref().map(|w| w.1 / b.quality).unwrap_or_default();
                ra.cmp(&rb)
            })
    }
}

/// Checks that each non-leaf cluster `X` at level `i` is `deg_∂P_{i+1}`-expanding in
/// `G[X]` with quality `γ/f_P(X)` (rounded up), by exhaustive search.
pub fn certify_well_expanding(g: &Graph, h: &HierarchicalDecomposition, gamma: &Rational) -> Result<CertifyReport> {
    if !gamma.is_positive() {
        return arg(format!("γ = {gamma} is not positive"));
    }
    let mut clusters = Vec::new();
    for level in 0..h.height().saturating_sub(1) {
        let pi = boundary_degrees(g, &h.levels()[level + 1]);
        for (idx, c) in h.levels()[level].clusters().iter().enumerate() {
            if c.len() <= 1 {
                continue;
            }
            let f = h.expansion_bound(level, idx);
            let quality = from_f64_ceil(crate::rational::to_f64(gamma) / f, 1 << 40);
            let limit = CERTIFY_MAX_VERTICES.min(ORACLE_MAX_VERTICES);
            let (status, worst) = if c.len() > limit {
                (ClusterStatus::Skipped, None)
            } else {
                let check = check_expanding(g, c, &pi, &quality)?;
                (if check.expanding { ClusterStatus::Pass } else { ClusterStatus::Fail }, check.worst)
            };
            clusters.push(ClusterCertificate { level, cluster: c.clone(), quality, status, worst });
        }
    }
    Ok(CertifyReport { clusters })
}

/// Whether every non-root cluster of the tree is a cut of `G` with the recorded capacity.
pub fn check_tree_capacities(g: &Graph, t: &TreeSparsifier) -> bool {
    let everything = vec![true; g.n()];
    let members = t.node_members();
    t.nodes
        .iter()
        .skip(1)
        .all(|node| cut_capacity_masked(g, &mask(g.n(), &members[node.id]), &everything) == node.cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_bound_values() {
        assert_eq!(expansion_bound_for(256, 256, None), 1.0);
        assert!((expansion_bound_for(256, 64, Some(256)) - 27.0).abs() < 1e-12);
        assert!((expansion_bound_for(256, 10, Some(10)) - 9.0).abs() < 1e-12);
        assert_eq!(expansion_parameter(1.0), rat(1, 4));
        assert_eq!(expansion_parameter(27.0), rat(ROUNDING_DEN / 27, ROUNDING_DEN));
    }

    #[test]
    fn single_edge_hierarchy_and_tree() {
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        let h = construct_hierarchy(&g, &HierarchyConfig::default()).unwrap();
        assert_eq!(h.height(), 2);
        assert!(h.is_complete());
        let t = to_tree_sparsifier(&h, &g).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert!(t.nodes[1..].iter().all(|x| x.cap == 1));
        t.validate().unwrap();
        assert_eq!(predict_congestion(&t, &[1, -1]).unwrap(), int(1));
        assert_eq!(predict_congestion(&t, &[0, 0]).unwrap(), int(0));
        assert!(predict_congestion(&t, &[1, 0]).is_err());
    }

    #[test]
    fn triangle_leaf_caps() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let h = construct_hierarchy(&g, &HierarchyConfig::default()).unwrap();
        let t = to_tree_sparsifier(&h, &g).unwrap();
        assert!(t.nodes.iter().filter(|x| x.leaf_vertex.is_some()).all(|x| x.cap == 2));
        assert!(check_tree_capacities(&g, &t));
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::new(3, [(0, 1, 2), (1, 2, 1)]).unwrap();
        let h = construct_hierarchy(&g, &HierarchyConfig::default()).unwrap();
        let t = to_tree_sparsifier(&h, &g).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.starts_with("{\"n\":3,\"nodes\":[{\"id\":0,\"parent\":null,\"cap\":0}"));
        let back: TreeSparsifier = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        assert!(t.to_dot().starts_with("graph tree {"));
    }

    #[test]
    fn incomplete_hierarchy_is_rejected() {
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        let h = HierarchicalDecomposition::from_levels(2, vec![Partition::trivial(2, &[0, 1])]).unwrap();
        assert!(to_tree_sparsifier(&h, &g).is_err());
    }
}
