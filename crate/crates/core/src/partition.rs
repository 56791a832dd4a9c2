//! Cluster partitioning: the two-way trim around a sparse cut and the iterative
//! partitioning loop that either certifies expansion or emits a border-routable child.

use num_traits::{One, Zero};

use crate::cutmatch::{sparsest_cut_apx, CutParameters, GameConfig};
use crate::error::{arg, internal, Result};
use crate::flow::{fair_cut, solve};
use crate::graph::{
    boundary_degrees, cap_between, degree_into, difference, fuse, mask, members, weight_of, Graph, Partition,
};
use crate::rational::{common_denominator, int, rat, scaled, Rational};

/// Three-way split `C = A ⊎ B ⊎ U` returned by [`two_way_trim`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimResult {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub u: Vec<usize>,
}

/// Indices of the checkable trim guarantees, used by [`check_trim`].
pub mod property {
    /// `A ⊆ C∖R` and `cap(A, C∖A) ≤ 2·cap(R, C∖R)`.
    pub const A_BOUNDARY: u8 = 1;
    /// `π(B ∪ U) ≤ (11/δ)·π(R)`.
    pub const TRIMMED_WEIGHT: u8 = 2;
    /// `E(U, C∖U)` is `1/φ`-border-routable through `U` with congestion 2.
    pub const U_BORDER_ROUTABLE: u8 = 3;
}

fn check_cluster(g: &Graph, c: &[usize]) -> Result<Vec<bool>> {
    if c.is_empty() {
        return arg("cluster is empty");
    }
    if let Some(&v) = c.iter().find(|&&v| v >= g.n()) {
        return arg(format!("vertex {v} outside 0..{}", g.n()));
    }
    Ok(mask(g.n(), c))
}

/// Splits `C` around a sparse cut `R ⊂ C` into `(A, B, U)` using two 2-fair cuts.
///
/// `A` avoids `R` and has small boundary, `B ∪ U` has weight `O(π(R)/δ)`, and the cut
/// around `U` can be routed inside `U` to the edges leaving `C`.
pub fn two_way_trim(
    g: &Graph,
    c: &[usize],
    r: &[usize],
    pi: &[u64],
    phi: &Rational,
    delta: &Rational,
) -> Result<TrimResult> {
    let in_c = check_cluster(g, c)?;
    if pi.len() != g.n() {
        return arg(format!("weights have {} entries for {} vertices", pi.len(), g.n()));
    }
    if *phi <= Rational::zero() {
        return arg(format!("expansion parameter {phi} is not positive"));
    }
    if *delta <= Rational::zero() || *delta > Rational::one() {
        return arg(format!("slack {delta} is outside (0, 1]"));
    }
    if let Some(&v) = r.iter().find(|&&v| v >= g.n() || !in_c[v]) {
        return arg(format!("vertex {v} of R is outside C"));
    }
    let c = members(&in_c);
    let r = members(&mask(g.n(), r));
    if r.len() == c.len() {
        return arg("R must be a proper subset of C");
    }
    let rest = difference(&c, &r);
    let cap_r = cap_between(g, &r, &rest);
    if int(cap_r as i128) > phi * int(weight_of(pi, &r) as i128) {
        return arg(format!("cap(R, C∖R) = {cap_r} exceeds φ·π(R)"));
    }
    let outside = difference(&(0..g.n()).collect::<Vec<_>>(), &c);

    // First cut: push R's boundary into C∖R against a budget proportional to π.
    let sub = g.induced(&rest);
    let into_r = degree_into(g, &rest, &r);
    let t_scale = delta * phi / int(5);
    let s1: Vec<Rational> = rest.iter().map(|&v| int(into_r[v] as i128)).collect();
    let t1: Vec<Rational> = rest.iter().map(|&v| t_scale * int(pi[v] as i128)).collect();
    let x0 = sub.globals(&fair_cut(&sub.graph, &s1, &t1, &rat(2, 1))?.u);
    let mut x1 = x0;
    x1.extend_from_slice(&r);
    x1.sort_unstable();
    let a = difference(&c, &x1);

    // Second cut: push A's boundary into X1 against the edges leaving C.
    let sub = g.induced(&x1);
    let into_a = degree_into(g, &x1, &a);
    let out_c = degree_into(g, &x1, &outside);
    let half_phi = phi / int(2);
    let s2: Vec<Rational> = x1.iter().map(|&v| int(into_a[v] as i128)).collect();
    let t2: Vec<Rational> = x1.iter().map(|&v| half_phi * int(out_c[v] as i128)).collect();
    let b = sub.globals(&fair_cut(&sub.graph, &s2, &t2, &rat(2, 1))?.u);
    let u = difference(&x1, &b);
    Ok(TrimResult { a, b, u })
}

/// Checks the exactly checkable trim guarantees and returns the violated ones.
///
/// The expansion guarantee of `G[A ∪ B]` needs exhaustive search and is left to
/// [`crate::oracle::check_expanding`].
pub fn check_trim(
    g: &Graph,
    c: &[usize],
    r: &[usize],
    pi: &[u64],
    phi: &Rational,
    delta: &Rational,
    trim: &TrimResult,
) -> Result<Vec<u8>> {
    let mut bad = Vec::new();
    let in_r = mask(g.n(), r);
    let cap_r = cap_between(g, r, &difference(c, r));
    let cap_a = cap_between(g, &trim.a, &difference(c, &trim.a));
    if trim.a.iter().any(|&v| in_r[v]) || cap_a > 2 * cap_r {
        bad.push(property::A_BOUNDARY);
    }
    let bu = weight_of(pi, &trim.b) + weight_of(pi, &trim.u);
    if *delta * int(bu as i128) > int(11 * weight_of(pi, r) as i128) {
        bad.push(property::TRIMMED_WEIGHT);
    }
    if !check_border_routable(g, c, &trim.u, &(Rational::one() / phi), &int(2))? {
        bad.push(property::U_BORDER_ROUTABLE);
    }
    Ok(bad)
}

/// Whether `E(U, C∖U)` is `γ`-border-routable through `U` at the given congestion.
///
/// Routes the worst-case source `deg_{E(U,C∖U)}` inside `G[U]` with edge capacities
/// `congestion·cap` into sinks of capacity `deg_{E(U,V∖C)}/γ`; smaller sources route
/// by dropping flow paths.
pub fn check_border_routable(
    g: &Graph,
    c: &[usize],
    u: &[usize],
    gamma: &Rational,
    congestion: &Rational,
) -> Result<bool> {
    let in_c = check_cluster(g, c)?;
    if let Some(&v) = u.iter().find(|&&v| v >= g.n() || !in_c[v]) {
        return arg(format!("vertex {v} of U is outside C"));
    }
    if *gamma <= Rational::zero() || *congestion <= Rational::zero() {
        return arg("border routability needs positive γ and congestion");
    }
    if u.is_empty() {
        return Ok(true);
    }
    let c = members(&in_c);
    let u = members(&mask(g.n(), u));
    let inside = degree_into(g, &u, &difference(&c, &u));
    let border = degree_into(g, &u, &difference(&(0..g.n()).collect::<Vec<_>>(), &c));
    let per_border = gamma.recip();
    let den = common_denominator([&per_border, congestion]);
    let sub = g.induced(&u);
    let supply: Vec<i128> = u.iter().map(|&v| inside[v] as i128 * den).collect();
    let sink: Vec<i128> = u.iter().map(|&v| scaled(&(per_border * int(border[v] as i128)), den)).collect();
    let need: i128 = supply.iter().sum();
    if need == 0 {
        return Ok(true);
    }
    let solved = solve(&sub.graph, scaled(congestion, den), &supply, &sink);
    Ok(solved.value == need)
}

/// How [`partition_cluster`] finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterOutcome {
    /// The trim left a large expanding remainder; `U` may be empty.
    Imbalanced,
    /// A trimmed side was returned as a balanced bad child.
    Balanced,
}

/// Result of [`partition_cluster`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionClusterResult {
    /// Border-routable child, empty when the whole cluster was certified.
    pub u: Vec<usize>,
    pub y: Partition,
    pub outcome: ClusterOutcome,
    /// Number of sparse-cut computations performed.
    pub iterations: usize,
}

/// Tunables for [`partition_cluster`].
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionConfig {
    pub round_constant: f64,
    pub seed: u64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { round_constant: GameConfig::default().round_constant, seed: 0 }
    }
}

/// Iteration cap `4·log₂(vol)/τ* + 4`.
fn iteration_budget(vol: u128, tau: &Rational) -> usize {
    let lg = (vol.max(2) as f64).log2();
    (4.0 * lg * (*tau.denom() as f64) / (*tau.numer() as f64)).ceil() as usize + 4
}

fn fuse_all(g: &Graph, x: Partition, sets: &[&[usize]]) -> Result<Partition> {
    sets.iter().filter(|s| !s.is_empty()).try_fold(x, |x, s| fuse(g, &x, s))
}

/// Refines the partition `X` of cluster `C` at expansion parameter `φ ∈ (0, 1/4]`.
///
/// Returns a set `U` with `|U| ≤ |C|/2` whose cut is `1/φ`-border-routable through
/// `U` at congestion 2, and a partition `Y` of `C` containing `U` (when non-empty)
/// whose clusters are no larger than `max(z, |C|/2)`.
pub fn partition_cluster(
    g: &Graph,
    c: &[usize],
    x: &Partition,
    phi: &Rational,
    config: &PartitionConfig,
) -> Result<PartitionClusterResult> {
    let in_c = check_cluster(g, c)?;
    let c = members(&in_c);
    if *phi <= Rational::zero() || *phi > rat(1, 4) {
        return arg(format!("expansion parameter {phi} is outside (0, 1/4]"));
    }
    if x.n() != g.n() || x.ground() != c.as_slice() {
        return arg("X must partition C");
    }
    let vol = 2 * g.total_capacity();
    let params = CutParameters::new(vol, g.n());
    let tau = params.tau_star;
    let trim_delta = rat(1, 20 * params.q_star as i128);
    let outside = difference(&(0..g.n()).collect::<Vec<_>>(), &c);
    let leave = degree_into(g, &c, &outside);
    let sub = g.induced(&c);
    let budget = iteration_budget(vol, &tau);
    let mut x = x.clone();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > budget {
            return internal(format!("cluster partitioning exceeded {budget} iterations"));
        }
        let pi = boundary_degrees(g, &x);
        let pi_c = weight_of(&pi, &c);
        let r = if pi_c < 2 {
            Vec::new()
        } else {
            let local: Vec<u64> = c.iter().map(|&v| pi[v]).collect();
            let game = GameConfig {
                round_constant: config.round_constant,
                seed: config.seed ^ (iterations as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                ..GameConfig::default()
            };
            sub.globals(&sparsest_cut_apx(&sub.graph, &local, &(phi / int(20)), game)?.cut)
        };
        let pi_r = weight_of(&pi, &r);

        let t = if int(pi_r as i128) <= tau * int(pi_c as i128) {
            let trim = two_way_trim(g, &c, &r, &pi, phi, &trim_delta)?;
            if 2 * trim.a.len() >= c.len() {
                let y = fuse_all(g, x, &[&trim.b, &trim.u])?;
                return Ok(PartitionClusterResult {
                    u: trim.u,
                    y,
                    outcome: ClusterOutcome::Imbalanced,
                    iterations,
                });
            }
            trim.a
        } else {
            let other = difference(&c, &r);
            if r.len() < other.len() || (r.len() == other.len() && r[0] < other[0]) {
                r
            } else {
                other
            }
        };

        let rest = difference(&c, &t);
        let pi_t = weight_of(&pi, &t);
        let cap_t = cap_between(g, &t, &rest);
        if t.is_empty() || 2 * t.len() > c.len() {
            return internal(format!("trim side has {} of {} vertices", t.len(), c.len()));
        }
        if int(pi_t as i128) < tau * int(pi_c as i128) {
            return internal(format!("trim side weight {pi_t} is below τ*·{pi_c}"));
        }
        if int(cap_t as i128) > phi / int(10) * int(pi_t as i128) {
            return internal(format!("trim side cut {cap_t} exceeds φ/10·{pi_t}"));
        }

        let leave_t = weight_of(&leave, &t);
        if 2 * leave_t <= pi_t {
            x = fuse(g, &x, &t)?;
            let after = weight_of(&boundary_degrees(g, &x), &c);
            if int(after as i128) > (Rational::one() - tau / int(4)) * int(pi_c as i128) {
                return internal(format!("fusing did not shrink the boundary enough: {pi_c} -> {after}"));
            }
            continue;
        }

        let tsub = g.induced(&t);
        let into_rest = degree_into(g, &t, &rest);
        let half_phi = phi / int(2);
        let s: Vec<Rational> = t.iter().map(|&v| int(into_rest[v] as i128)).collect();
        let tt: Vec<Rational> = t.iter().map(|&v| half_phi * int(leave[v] as i128)).collect();
        let cut = tsub.globals(&fair_cut(&tsub.graph, &s, &tt, &rat(2, 1))?.u);
        let child = difference(&t, &cut);
        if child.is_empty() {
            return internal("trimming removed the whole side");
        }
        let y = fuse(g, &x, &child)?;
        return Ok(PartitionClusterResult { u: child, y, outcome: ClusterOutcome::Balanced, iterations });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Partition;

    fn two_cliques(size: usize) -> Graph {
        let mut e = Vec::new();
        for base in [0, size] {
            for a in 0..size {
                for b in a + 1..size {
                    e.push((base + a, base + b, 1));
                }
            }
        }
        e.push((size - 1, size, 1));
        Graph::new(2 * size, e).unwrap()
    }

    #[test]
    fn trim_on_two_k4() {
        let g = two_cliques(4);
        let c: Vec<usize> = (0..8).collect();
        let pi = g.degrees();
        let r: Vec<usize> = (0..4).collect();
        let phi = rat(1, 4);
        let trim = two_way_trim(&g, &c, &r, &pi, &phi, &int(1)).unwrap();
        let mut all = [trim.a.clone(), trim.b.clone(), trim.u.clone()].concat();
        all.sort_unstable();
        assert_eq!(all, c);
        assert!(check_trim(&g, &c, &r, &pi, &phi, &int(1), &trim).unwrap().is_empty());
    }

    #[test]
    fn trim_rejects_dense_r() {
        let g = two_cliques(4);
        let c: Vec<usize> = (0..8).collect();
        let err = two_way_trim(&g, &c, &[0], &g.degrees(), &rat(1, 4), &int(1));
        assert!(matches!(err, Err(crate::Error::Argument(_))));
    }

    #[test]
    fn trim_boundary_case_is_accepted() {
        // cap(R, C∖R) = 1 and φ·π(R) = 1 exactly.
        let g = two_cliques(4);
        let c: Vec<usize> = (0..8).collect();
        let pi = vec![1, 1, 1, 1, 0, 0, 0, 0];
        let trim = two_way_trim(&g, &c, &[0, 1, 2, 3], &pi, &rat(1, 4), &int(1)).unwrap();
        assert_eq!(trim.a.len() + trim.b.len() + trim.u.len(), 8);
    }

    #[test]
    fn border_routable_trivial_cases() {
        let g = two_cliques(4);
        let c: Vec<usize> = (0..4).collect();
        // Nothing crosses inside C.
        assert!(check_border_routable(&g, &c, &c, &int(1), &int(1)).unwrap());
        assert!(check_border_routable(&g, &c, &[], &int(1), &int(1)).unwrap());
        // {0} has an inside cut and no border to V∖C.
        assert!(!check_border_routable(&g, &c, &[0], &rat(1, 1_000_000), &int(1)).unwrap());
        // {3} carries the bridge: inside degree 3, border 1.
        assert!(check_border_routable(&g, &c, &[3], &rat(1, 3), &int(1)).unwrap());
        assert!(!check_border_routable(&g, &c, &[3], &rat(2, 5), &int(1)).unwrap());
    }

    #[test]
    fn root_call_returns_empty_child() {
        let g = two_cliques(8);
        let c: Vec<usize> = (0..16).collect();
        let x = Partition::singletons(16, &c);
        let res = partition_cluster(&g, &c, &x, &rat(1, 4), &PartitionConfig::default()).unwrap();
        assert!(res.u.is_empty());
        assert!(res.y.max_cluster_size() <= 8);
        assert_eq!(res.y.ground(), c.as_slice());
    }

    #[test]
    fn rejects_large_phi() {
        let g = two_cliques(4);
        let c: Vec<usize> = (0..8).collect();
        let x = Partition::singletons(8, &c);
        assert!(partition_cluster(&g, &c, &x, &rat(1, 2), &PartitionConfig::default()).is_err());
    }
}
