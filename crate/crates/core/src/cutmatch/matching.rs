//! Matching player: answers a cut-player bisection with a matching embedded in `G`,
//! deleting units on sparse cuts when the bisection cannot be routed.

use num_traits::ToPrimitive;

use crate::error::{internal, Result};
use crate::flow::{fair_cut, path_decomposition, solve, FlowAssignment};
use crate::graph::{mask, Graph};
use crate::rational::{int, rat, Rational};

use super::walk::Matching;

/// Maps units `0..k` to vertices; vertex `v` owns a contiguous range of `π(v)` units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitMapping {
    start: Vec<usize>,
    owner: Vec<usize>,
}

impl UnitMapping {
    pub fn new(pi: &[u64]) -> Self {
        let mut start = Vec::with_capacity(pi.len() + 1);
        let mut owner = Vec::new();
        start.push(0);
        for (v, &w) in pi.iter().enumerate() {
            owner.extend(std::iter::repeat_n(v, w as usize));
            start.push(owner.len());
        }
        UnitMapping { start, owner }
    }

    /// Number of units `k = π(V)`.
    pub fn k(&self) -> usize {
        self.owner.len()
    }

    /// `θ(i)`.
    pub fn vertex(&self, unit: usize) -> usize {
        self.owner[unit]
    }

    /// `θ⁻¹(v)`.
    pub fn units(&self, v: usize) -> std::ops::Range<usize> {
        self.start[v]..self.start[v + 1]
    }
}

/// Outcome of one matching-player round.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchingRound {
    /// Vertices removed this round (`S`).
    pub cut: Vec<usize>,
    /// Units deleted this round (`D = θ⁻¹(S)`).
    pub deleted: Vec<usize>,
    pub matching: Matching,
    /// Largest number of matched pairs routed over a single unit of capacity this round.
    pub round_load: Rational,
}

/// Matching player with fairness `α = 3/2` and sparsity parameter `c`.
#[derive(Clone, Debug)]
pub struct MatchingPlayer<'g> {
    g: &'g Graph,
    pi: Vec<u64>,
    theta: UnitMapping,
    c: u64,
    removed: Vec<bool>,
    load: Vec<u128>,
    rounds: usize,
}

impl<'g> MatchingPlayer<'g> {
    pub fn new(g: &'g Graph, pi: &[u64], c: u64) -> Self {
        MatchingPlayer {
            g,
            pi: pi.to_vec(),
            theta: UnitMapping::new(pi),
            c,
            removed: vec![false; g.n()],
            load: vec![0; g.m()],
            rounds: 0,
        }
    }

    pub fn theta(&self) -> &UnitMapping {
        &self.theta
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    /// Inactive vertices `R`, sorted.
    pub fn removed(&self) -> Vec<usize> {
        (0..self.g.n()).filter(|&v| self.removed[v]).collect()
    }

    /// Cumulative number of matched pairs embedded through each edge.
    pub fn load(&self) -> &[u128] {
        &self.load
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Capacity multiplier `⌈cα⌉` applied before the fair cut.
    fn scale(&self) -> u64 {
        (3 * self.c).div_ceil(2)
    }

    /// Runs one round on active units `A` with bisection `(A^ℓ, A^r)`.
    pub fn step(&mut self, active: &[bool], left: &[usize], right: &[usize]) -> Result<MatchingRound> {
        let g = self.g;
        let n = g.n();
        let mut s_cnt = vec![0u64; n];
        let mut r_cnt = vec![0u64; n];
        for &i in left {
            s_cnt[self.theta.vertex(i)] += 1;
        }
        for &i in right {
            r_cnt[self.theta.vertex(i)] += 1;
        }
        let mut in_vp = vec![false; n];
        for (i, &a) in active.iter().enumerate() {
            if a {
                in_vp[self.theta.vertex(i)] = true;
            }
        }
        let vp: Vec<usize> = (0..n).filter(|&v| in_vp[v]).collect();

        // Fair cut on G[V'] with capacities scaled by ⌈cα⌉.
        let sub = g.induced(&vp);
        let scale = self.scale();
        let scaled = Graph::new(
            vp.len(),
            sub.graph.edges().iter().map(|e| (e.u, e.v, e.cap * scale)),
        )?;
        let s: Vec<Rational> = vp.iter().map(|&v| int(s_cnt[v] as i128)).collect();
        let t: Vec<Rational> = vp.iter().map(|&v| rat(2 * r_cnt[v] as i128, 3)).collect();
        let fc = fair_cut(&scaled, &s, &t, &rat(3, 2))?;
        let cut = sub.globals(&fc.u);
        let mut deleted = Vec::new();
        for &v in &cut {
            self.removed[v] = true;
            deleted.extend(self.theta.units(v));
        }
        let in_cut = mask(n, &cut);

        // Pair units that share a vertex, then route the rest integrally in G[V'∖S].
        let mut matching: Matching = Vec::new();
        let mut left_at: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut right_at: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &i in left {
            if !in_cut[self.theta.vertex(i)] {
                left_at[self.theta.vertex(i)].push(i);
            }
        }
        for &j in right {
            if !in_cut[self.theta.vertex(j)] {
                right_at[self.theta.vertex(j)].push(j);
            }
        }
        for v in 0..n {
            while !left_at[v].is_empty() && !right_at[v].is_empty() {
                matching.push((left_at[v].pop().unwrap(), right_at[v].pop().unwrap()));
            }
        }
        let rest: Vec<usize> = vp.iter().copied().filter(|&v| !in_cut[v]).collect();
        let rsub = g.induced(&rest);
        let supply: Vec<i128> = rest.iter().map(|&v| left_at[v].len() as i128).collect();
        let demand: Vec<i128> = rest.iter().map(|&v| right_at[v].len() as i128).collect();
        let need: i128 = supply.iter().sum();
        let mut round_load = Rational::from_integer(0);
        if need > 0 {
            let solved = solve(&rsub.graph, 2 * scale as i128, &supply, &demand);
            if solved.value != need {
                return internal(format!(
                    "matching flow routes {} of {} units after the fair cut",
                    solved.value, need
                ));
            }
            let flow = FlowAssignment { num: solved.edge_flow, den: 1 };
            let ends: Vec<bool> = (0..rest.len()).map(|x| supply[x] > 0 || demand[x] > 0).collect();
            let dec = path_decomposition(&rsub.graph, &flow, Some(&ends))?;
            let mut round = vec![0u128; g.m()];
            for p in &dec.paths {
                let (a, b) = (rsub.to_global[p.start], rsub.to_global[p.end]);
                for _ in 0..p.weight {
                    let (Some(x), Some(y)) = (left_at[a].pop(), right_at[b].pop()) else {
                        return internal("flow path endpoint has no unit left to match");
                    };
                    matching.push((x, y));
                }
                for &e in &p.edges {
                    round[rsub.global_edge[e]] += p.weight as u128;
                }
            }
            for (e, &x) in round.iter().enumerate() {
                self.load[e] += x;
                round_load = round_load.max(rat(x as i128, g.edge(e).cap as i128));
            }
        }
        if let Some(v) = (0..n).find(|&v| !left_at[v].is_empty()) {
            return internal(format!("source units at vertex {v} were left unmatched"));
        }
        self.rounds += 1;
        Ok(MatchingRound { cut, deleted, matching, round_load })
    }

    /// Checks the player's invariants against the game's active set.
    ///
    /// Returns a description of the first violation: deleted units must be exactly
    /// `θ⁻¹(R)`, `c·cap(R, V∖R) ≤ π(R)`, and every edge load at most `4c·t·cap(e)`.
    pub fn check_invariants(&self, active: &[bool]) -> std::result::Result<(), String> {
        for v in 0..self.g.n() {
            for i in self.theta.units(v) {
                if active[i] == self.removed[v] {
                    return Err(format!("unit {i} of vertex {v} disagrees with R"));
                }
            }
        }
        let r = self.removed();
        let cap = crate::graph::cut_capacity_masked(self.g, &self.removed, &vec![true; self.g.n()]);
        let pi_r = crate::graph::weight_of(&self.pi, &r);
        if self.c as u128 * cap > pi_r {
            return Err(format!("R is not 1/c-sparse: c·cap = {} > π(R) = {pi_r}", self.c as u128 * cap));
        }
        let bound = 4 * self.c as u128 * self.rounds as u128;
        for (e, &x) in self.load.iter().enumerate() {
            if x > bound * self.g.edge(e).cap as u128 {
                return Err(format!("edge {e} carries load {x} above 4ct·cap"));
            }
        }
        Ok(())
    }

    /// Largest cumulative load relative to capacity.
    pub fn max_relative_load(&self) -> f64 {
        self.load
            .iter()
            .enumerate()
            .map(|(e, &x)| rat(x as i128, self.g.edge(e).cap as i128).to_f64().unwrap_or(0.0))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mapping_ranges() {
        let th = UnitMapping::new(&[2, 0, 3]);
        assert_eq!(th.k(), 5);
        assert_eq!(th.units(0), 0..2);
        assert!(th.units(1).is_empty());
        assert_eq!(th.vertex(4), 2);
    }

    #[test]
    fn empty_source_side() {
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        let mut mp = MatchingPlayer::new(&g, &[1, 1], 40);
        let r = mp.step(&[true, true], &[], &[1]).unwrap();
        assert!(r.matching.is_empty());
        assert!(r.cut.is_empty());
    }

    #[test]
    fn single_edge_matches_across_when_targets_suffice() {
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        let mut mp = MatchingPlayer::new(&g, &[1, 2], 40);
        let active = [true; 3];
        let r = mp.step(&active, &[0], &[1, 2]).unwrap();
        assert!(r.deleted.is_empty());
        assert_eq!(r.matching.len(), 1);
        assert_eq!(mp.load(), &[1]);
        mp.check_invariants(&active).unwrap();
    }

    #[test]
    fn single_edge_with_surplus_source_deletes() {
        // One source unit against 2/3 of a target: the whole instance is source-heavy.
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        let mut mp = MatchingPlayer::new(&g, &[1, 1], 40);
        let r = mp.step(&[true, true], &[0], &[1]).unwrap();
        assert!(r.deleted.contains(&0));
        assert!(r.matching.is_empty());
        mp.check_invariants(&[false, false]).unwrap();
    }

    #[test]
    fn colocated_units_match_locally() {
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        let mut mp = MatchingPlayer::new(&g, &[4, 1], 40);
        let r = mp.step(&[true; 5], &[0], &[1, 2]).unwrap();
        assert!(r.cut.is_empty());
        assert_eq!(r.matching.len(), 1);
        let (x, y) = r.matching[0];
        assert_eq!(mp.theta().vertex(x), mp.theta().vertex(y));
        assert!(mp.load().iter().all(|&l| l == 0));
    }
}
