//! Exhaustive reference oracles for small graphs.
//!
//! These enumerate every cut and exist to cross-check the fast algorithms.

use num_traits::Zero;

use crate::error::{arg, Error, Result};
use crate::graph::{Graph, Partition};
use crate::rational::{rat, Rational};

/// Largest vertex count the exhaustive oracles accept.
pub const ORACLE_MAX_VERTICES: usize = 24;

fn refuse_oversize(k: usize) -> Result<()> {
    if k > ORACLE_MAX_VERTICES {
        return Err(Error::Refused(format!(
            "exhaustive enumeration over {k} vertices exceeds the limit of {ORACLE_MAX_VERTICES}"
        )));
    }
    Ok(())
}

/// Local edge list `(a, b, cap)` over positions in `set`, for edges of `G[set]`.
fn local_edges(g: &Graph, set: &[usize]) -> Vec<(usize, usize, u128)> {
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in set.iter().enumerate() {
        pos[v] = i;
    }
    g.edges()
        .iter()
        .filter(|e| pos[e.u] != usize::MAX && pos[e.v] != usize::MAX)
        .map(|e| (pos[e.u], pos[e.v], e.cap as u128))
        .collect()
}

fn cut_of(edges: &[(usize, usize, u128)], mask: u32) -> u128 {
    edges
        .iter()
        .filter(|&&(a, b, _)| ((mask >> a) ^ (mask >> b)) & 1 == 1)
        .map(|&(_, _, c)| c)
        .sum()
}

fn mask_weight(w: &[u128], mask: u32) -> u128 {
    let mut total = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        total += w[i];
        m &= m - 1;
    }
    total
}

fn mask_members(set: &[usize], mask: u32) -> Vec<usize> {
    let mut out: Vec<usize> =
        (0..set.len()).filter(|&i| (mask >> i) & 1 == 1).map(|i| set[i]).collect();
    out.sort_unstable();
    out
}

/// Minimum sparsity `cap(S, V∖S)/π(S)` over all `S` with `0 < π(S) ≤ π(V∖S)`.
///
/// Ties go to the numerically smallest membership bitmask.
pub fn brute_force_sparsest_cut(g: &Graph, pi: &[u64]) -> Result<(Vec<usize>, Rational)> {
    refuse_oversize(g.n())?;
    let n = g.n();
    let w: Vec<u128> = pi.iter().map(|&x| x as u128).collect();
    let total: u128 = w.iter().sum();
    if total == 0 {
        return arg("vertex weights are identically zero");
    }
    let all: Vec<usize> = (0..n).collect();
    let edges = local_edges(g, &all);
    let mut best: Option<(u32, Rational)> = None;
    for mask in 1u32..(1u32 << n) {
        let ws = mask_weight(&w, mask);
        if ws == 0 || ws > total - ws {
            continue;
        }
        let sp = rat(cut_of(&edges, mask) as i128, ws as i128);
        if best.as_ref().is_none_or(|(_, b)| sp < *b) {
            best = Some((mask, sp));
        }
    }
    match best {
        Some((mask, sp)) => Ok((mask_members(&all, mask), sp)),
        None => arg("no cut has positive weight on its lighter side"),
    }
}

/// Outcome of an exhaustive expansion check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCheck {
    pub expanding: bool,
    /// The cut with the smallest ratio `cap(X, C∖X)/π(X)` among those with
    /// `0 < π(X) ≤ π(C∖X)`, if any such cut exists.
    pub worst: Option<(Vec<usize>, Rational)>,
}

impl ExpansionCheck {
    /// The worst cut when it violates the requested quality.
    pub fn witness(&self) -> Option<&[usize]> {
        if self.expanding { None } else { self.worst.as_ref().map(|(s, _)| s.as_slice()) }
    }
}

/// Checks that every `X ⊆ C` with `π(X) ≤ π(C∖X)` has `cap(X, C∖X) ≥ q·π(X)` in `G[C]`.
pub fn check_expanding(g: &Graph, c: &[usize], pi: &[u64], q: &Rational) -> Result<ExpansionCheck> {
    let k = c.len();
    refuse_oversize(k)?;
    if k <= 1 {
        return Ok(ExpansionCheck { expanding: true, worst: None });
    }
    let w: Vec<u128> = c.iter().map(|&v| pi[v] as u128).collect();
    let total: u128 = w.iter().sum();
    let edges = local_edges(g, c);
    let mut worst: Option<(u32, Rational)> = None;
    // Enumerate sets avoiding the last position and test both sides of each cut.
    let top = k - 1;
    for mask in 1u32..(1u32 << top) {
        let cut = cut_of(&edges, mask) as i128;
        let ws = mask_weight(&w, mask);
        let full = (1u32 << k) - 1;
        for (side, weight) in [(mask, ws), (full & !mask, total - ws)] {
            if weight == 0 || weight > total - weight {
                continue;
            }
            let ratio = rat(cut, weight as i128);
            if worst.as_ref().is_none_or(|(m, r)| ratio < *r || (ratio == *r && side < *m)) {
                worst = Some((side, ratio));
            }
        }
    }
    let expanding = worst.as_ref().is_none_or(|(_, r)| r >= q);
    Ok(ExpansionCheck { expanding, worst: worst.map(|(m, r)| (mask_members(c, m), r)) })
}

/// Optimal single-commodity congestion `max_S |d(S)|/cap(S, V∖S)` by enumeration.
pub fn brute_force_opt_congestion(g: &Graph, d: &[i64]) -> Result<Rational> {
    let n = g.n();
    refuse_oversize(n)?;
    if d.len() != n {
        return arg(format!("demand has {} entries for {} vertices", d.len(), n));
    }
    if d.iter().map(|&x| x as i128).sum::<i128>() != 0 {
        return arg("demand does not sum to zero");
    }
    if n <= 1 {
        return Ok(Rational::zero());
    }
    let all: Vec<usize> = (0..n).collect();
    let edges = local_edges(g, &all);
    let mut best = Rational::zero();
    for mask in 1u32..(1u32 << (n - 1)) {
        let ds: i128 = (0..n).filter(|&i| (mask >> i) & 1 == 1).map(|i| d[i] as i128).sum();
        if ds == 0 {
            continue;
        }
        let cap = cut_of(&edges, mask);
        if cap == 0 {
            return arg("demand crosses a zero-capacity cut (graph is disconnected)");
        }
        best = best.max(rat(ds.abs(), cap as i128));
    }
    Ok(best)
}

/// Checks that `levels` starts at `{V}` and that each level refines the previous one.
///
/// With `require_complete`, the last level must also be all singletons.
pub fn check_laminar(n: usize, levels: &[Partition], require_complete: bool) -> bool {
    let Some(first) = levels.first() else { return false };
    if first.len() != 1 || first.ground().len() != n {
        return false;
    }
    for pair in levels.windows(2) {
        let (parent, child) = (&pair[0], &pair[1]);
        if child.ground() != parent.ground() {
            return false;
        }
        for cl in child.clusters() {
            let p = parent.cluster_of(cl[0]);
            if cl.iter().any(|&v| parent.cluster_of(v) != p) {
                return false;
            }
        }
    }
    !require_complete || levels.last().is_some_and(|p| p.max_cluster_size() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

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
    fn sparsest_cut_examples() {
        let g = two_k4_bridge();
        let (s, sp) = brute_force_sparsest_cut(&g, &g.degrees()).unwrap();
        assert_eq!(sp, rat(1, 13));
        assert_eq!(s, vec![0, 1, 2, 3]);

        let e = Graph::new(2, [(0, 1, 1)]).unwrap();
        assert_eq!(brute_force_sparsest_cut(&e, &[1, 1]).unwrap().1, int(1));

        let mut k4 = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                k4.push((a, b, 1));
            }
        }
        let k4 = Graph::new(4, k4).unwrap();
        assert!(brute_force_sparsest_cut(&k4, &k4.degrees()).unwrap().1 <= int(1));
        assert!(brute_force_sparsest_cut(&k4, &[0; 4]).is_err());
    }

    #[test]
    fn expansion_examples() {
        let g = two_k4_bridge();
        let deg = g.degrees();
        let all: Vec<usize> = (0..8).collect();
        assert!(check_expanding(&g, &all, &deg, &rat(1, 13)).unwrap().expanding);
        let bad = check_expanding(&g, &all, &deg, &rat(1, 12)).unwrap();
        assert!(!bad.expanding);
        let w = bad.witness().unwrap();
        assert!(w == [0, 1, 2, 3] || w == [4, 5, 6, 7]);

        assert!(check_expanding(&g, &[3], &deg, &int(1000)).unwrap().expanding);
        let split = check_expanding(&g, &[0, 1, 6, 7], &deg, &rat(1, 1_000_000)).unwrap();
        assert!(!split.expanding);
    }

    #[test]
    fn opt_congestion_examples() {
        let g = two_k4_bridge();
        assert_eq!(brute_force_opt_congestion(&g, &[0; 8]).unwrap(), int(0));
        let mut d = [0i64; 8];
        d[0] = 2;
        d[7] = -2;
        assert_eq!(brute_force_opt_congestion(&g, &d).unwrap(), int(2));

        let star = Graph::new(4, [(0, 3, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        assert_eq!(brute_force_opt_congestion(&star, &[1, 1, 1, -3]).unwrap(), int(1));
        let e = Graph::new(2, [(0, 1, 1)]).unwrap();
        assert_eq!(brute_force_opt_congestion(&e, &[3, -3]).unwrap(), int(3));
        assert!(brute_force_opt_congestion(&e, &[1, 0]).is_err());
    }

    #[test]
    fn laminar_examples() {
        let one = vec![Partition::trivial(2, &[0, 1])];
        assert!(check_laminar(2, &one, false));
        assert!(!check_laminar(2, &one, true));
        let two = vec![Partition::trivial(2, &[0, 1]), Partition::singletons(2, &[0, 1])];
        assert!(check_laminar(2, &two, true));

        let all: Vec<usize> = (0..4).collect();
        let bad = vec![
            Partition::trivial(4, &all),
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::new(4, vec![vec![0], vec![1, 2], vec![3]]).unwrap(),
        ];
        assert!(!check_laminar(4, &bad, false));
    }

    #[test]
    fn oversize_inputs_are_refused() {
        let edges: Vec<_> = (0..25).map(|i| (i, i + 1, 1)).collect();
        let g = Graph::new(26, edges).unwrap();
        assert!(matches!(brute_force_sparsest_cut(&g, &g.degrees()), Err(Error::Refused(_))));
    }
}
