//! Exact max flow, fair cut/flow pairs, path decomposition and optimal congestion.

mod dinic;
mod paths;

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::graph::{mask, Graph};
use crate::rational::{common_denominator, int, is_nonneg, rat, scaled, Rational};

pub(crate) use dinic::solve;
pub use paths::{path_decomposition, FlowPath, PathDecomposition};

/// Per-edge net flow `num[e]/den` in the orientation `edge.u → edge.v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowAssignment {
    pub num: Vec<i128>,
    pub den: i128,
}

impl FlowAssignment {
    pub fn zero(g: &Graph) -> Self {
        FlowAssignment { num: vec![0; g.m()], den: 1 }
    }

    /// Flow on edge `e` in the direction `from → other endpoint`, in units of `1/den`.
    pub fn toward(&self, g: &Graph, e: usize, from: usize) -> i128 {
        if g.edge(e).u == from { self.num[e] } else { -self.num[e] }
    }

    /// Flow on edge `e` leaving `from`, as an exact rational.
    pub fn value(&self, g: &Graph, e: usize, from: usize) -> Rational {
        rat(self.toward(g, e, from), self.den)
    }

    /// Net outflow `f(v)` of every vertex, in units of `1/den`.
    pub fn net_out_units(&self, g: &Graph) -> Vec<i128> {
        let mut out = vec![0i128; g.n()];
        for (e, edge) in g.edges().iter().enumerate() {
            out[edge.u] += self.num[e];
            out[edge.v] -= self.num[e];
        }
        out
    }

    /// Net outflow `f(v)` of every vertex.
    pub fn net_out(&self, g: &Graph) -> Vec<Rational> {
        self.net_out_units(g).into_iter().map(|x| rat(x, self.den)).collect()
    }

    /// Smallest `κ` with `|f(e)| ≤ κ·cap(e)` on every edge.
    pub fn congestion(&self, g: &Graph) -> Rational {
        g.edges()
            .iter()
            .zip(&self.num)
            .map(|(e, &x)| rat(x.abs(), self.den * e.cap as i128))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// One `"u v num den"` line per directed edge carrying positive flow.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut s = String::new();
        for (e, edge) in g.edges().iter().enumerate() {
            let x = self.num[e];
            if x > 0 {
                let _ = writeln!(s, "{} {} {} {}", edge.u, edge.v, x, self.den);
            } else if x < 0 {
                let _ = writeln!(s, "{} {} {} {}", edge.v, edge.u, -x, self.den);
            }
        }
        s
    }
}

/// Maximum flow from a super-source with arcs `supply(v)` to a super-sink with arcs `demand(v)`.
pub fn max_flow(g: &Graph, supply: &[u64], demand: &[u64]) -> Result<(u128, FlowAssignment)> {
    check_len(g, supply.len(), "supply")?;
    check_len(g, demand.len(), "demand")?;
    let sup: Vec<i128> = supply.iter().map(|&x| x as i128).collect();
    let dem: Vec<i128> = demand.iter().map(|&x| x as i128).collect();
    let r = solve(g, 1, &sup, &dem);
    Ok((r.value as u128, FlowAssignment { num: r.edge_flow, den: 1 }))
}

fn check_len(g: &Graph, len: usize, what: &str) -> Result<()> {
    if len != g.n() {
        return arg(format!("{what} has {len} entries for {} vertices", g.n()));
    }
    Ok(())
}

/// A fair cut/flow pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairCutResult {
    /// The cut side `U`, sorted.
    pub u: Vec<usize>,
    pub f: FlowAssignment,
    pub alpha: Rational,
}

/// Computes an `α`-fair `(s, t)`-cut/flow pair from one exact max flow.
///
/// Each vertex gets a source arc of capacity `s(v) − t(v)` or a sink arc of capacity
/// `t(v) − s(v)`; `U` is the residual-reachable side of the minimum cut. The result is
/// 1-fair and therefore `α`-fair for every `α ≥ 1`.
pub fn fair_cut(g: &Graph, s: &[Rational], t: &[Rational], alpha: &Rational) -> Result<FairCutResult> {
    check_len(g, s.len(), "s")?;
    check_len(g, t.len(), "t")?;
    if let Some(v) = (0..g.n()).find(|&v| !is_nonneg(&s[v]) || !is_nonneg(&t[v])) {
        return arg(format!("negative source or target weight at vertex {v}"));
    }
    if *alpha < Rational::one() {
        return arg(format!("fairness parameter {alpha} is below 1"));
    }
    let den = common_denominator(s.iter().chain(t.iter()));
    let mut supply = vec![0i128; g.n()];
    let mut demand = vec![0i128; g.n()];
    for v in 0..g.n() {
        let diff = scaled(&(s[v] - t[v]), den);
        if diff > 0 {
            supply[v] = diff;
        } else {
            demand[v] = -diff;
        }
    }
    let r = solve(g, den, &supply, &demand);
    let u = (0..g.n()).filter(|&v| r.source_side[v]).collect();
    Ok(FairCutResult { u, f: FlowAssignment { num: r.edge_flow, den }, alpha: *alpha })
}

/// Integer-weight convenience wrapper around [`fair_cut`].
pub fn fair_cut_int(g: &Graph, s: &[u64], t: &[u64], alpha: &Rational) -> Result<FairCutResult> {
    let s: Vec<Rational> = s.iter().map(|&x| int(x as i128)).collect();
    let t: Vec<Rational> = t.iter().map(|&x| int(x as i128)).collect();
    fair_cut(g, &s, &t, alpha)
}

/// Indices of fair-cut conditions, used in [`FairCutReport::violated`].
pub mod property {
    /// The flow exceeds an edge capacity or the input is malformed.
    pub const FEASIBLE: u8 = 0;
    pub const NET_SOURCES_BOUNDED: u8 = 1;
    pub const NET_TARGETS_BOUNDED: u8 = 2;
    pub const SOURCES_OUTSIDE_SATURATED: u8 = 3;
    pub const TARGETS_INSIDE_SATURATED: u8 = 4;
    pub const CUT_EDGES_SATURATED: u8 = 5;
    /// `cap(U, V∖U) + t(U) ≤ α·s(U)`.
    pub const SOURCE_SIDE_BALANCE: u8 = 6;
    /// `cap(U, V∖U) + s(V∖U) ≤ α·t(V∖U)`.
    pub const TARGET_SIDE_BALANCE: u8 = 7;
}

/// Result of [`verify_fair_cut`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairCutReport {
    pub ok: bool,
    /// Sorted, deduplicated indices from [`property`].
    pub violated: Vec<u8>,
}

/// Checks every fair-cut condition and both derived balance inequalities exactly.
pub fn verify_fair_cut(
    g: &Graph,
    s: &[Rational],
    t: &[Rational],
    alpha: &Rational,
    u: &[usize],
    f: &FlowAssignment,
) -> FairCutReport {
    use property::*;
    let n = g.n();
    let mut bad = Vec::new();
    if s.len() != n || t.len() != n || f.num.len() != g.m() || f.den <= 0 || u.iter().any(|&v| v >= n) {
        return FairCutReport { ok: false, violated: vec![FEASIBLE] };
    }
    let in_u = mask(n, u);
    let den = int(f.den);
    for (e, edge) in g.edges().iter().enumerate() {
        if f.num[e].abs() > f.den * edge.cap as i128 {
            bad.push(FEASIBLE);
        }
        let (a, b) = (edge.u, edge.v);
        if in_u[a] != in_u[b] {
            let from = if in_u[a] { a } else { b };
            let sent = f.value(g, e, from);
            if sent * alpha < int(edge.cap as i128) {
                bad.push(CUT_EDGES_SATURATED);
            }
        }
    }
    let out = f.net_out_units(g);
    for v in 0..n {
        let net = s[v] - t[v];
        let fv = rat(out[v], 1) / den;
        if !net.is_negative() && (fv.is_negative() || fv > net) {
            bad.push(NET_SOURCES_BOUNDED);
        }
        if !net.is_positive() && (fv.is_positive() || fv < net) {
            bad.push(NET_TARGETS_BOUNDED);
        }
        if !net.is_negative() && !in_u[v] && fv * alpha < net {
            bad.push(SOURCES_OUTSIDE_SATURATED);
        }
        if !net.is_positive() && in_u[v] && fv * alpha > net {
            bad.push(TARGETS_INSIDE_SATURATED);
        }
    }
    let cut = int(crate::graph::cut_capacity_masked(g, &in_u, &vec![true; n]) as i128);
    let sum = |w: &[Rational], side: bool| -> Rational {
        (0..n).filter(|&v| in_u[v] == side).map(|v| w[v]).sum()
    };
    if cut + sum(t, true) > alpha * sum(s, true) {
        bad.push(SOURCE_SIDE_BALANCE);
    }
    if cut + sum(s, false) > alpha * sum(t, false) {
        bad.push(TARGET_SIDE_BALANCE);
    }
    bad.sort_unstable();
    bad.dedup();
    FairCutReport { ok: bad.is_empty(), violated: bad }
}

/// Exact optimal congestion for routing the balanced demand `d`.
///
/// Runs a parametric (Newton) iteration: starting from `λ = 0`, while the max flow with
/// capacities `λ·cap` cannot route `d`, the minimum cut `S` certifies `λ < d(S)/cap(S)`,
/// and `λ` jumps to that ratio. The ratio strictly increases over finitely many cuts and
/// stops at the maximum of `|d(S)|/cap(S)`.
pub fn opt_congestion(g: &Graph, d: &[i64]) -> Result<Rational> {
    check_len(g, d.len(), "demand")?;
    if d.iter().map(|&x| x as i128).sum::<i128>() != 0 {
        return arg("demand does not sum to zero");
    }
    let need: i128 = d.iter().filter(|&&x| x > 0).map(|&x| x as i128).sum();
    if need == 0 {
        return Ok(Rational::zero());
    }
    if !g.is_connected() {
        return arg("graph is disconnected");
    }
    let mut lambda = Rational::zero();
    loop {
        let (p, q) = (*lambda.numer(), *lambda.denom());
        let supply: Vec<i128> = d.iter().map(|&x| q * (x.max(0) as i128)).collect();
        let demand: Vec<i128> = d.iter().map(|&x| q * ((-x).max(0) as i128)).collect();
        let r = solve(g, p, &supply, &demand);
        if r.value == q * need {
            return Ok(lambda);
        }
        let ds: i128 = (0..g.n()).filter(|&v| r.source_side[v]).map(|v| d[v] as i128).sum();
        let cap = crate::graph::cut_capacity_masked(g, &r.source_side, &vec![true; g.n()]) as i128;
        let next = rat(ds, cap);
        debug_assert!(next > lambda, "parametric search failed to increase");
        lambda = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn ints(v: &[i128]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn max_flow_examples() {
        let e = Graph::new(2, [(0, 1, 1)]).unwrap();
        let (v, f) = max_flow(&e, &[0, 0], &[0, 0]).unwrap();
        assert_eq!((v, f.num), (0, vec![0]));
        assert_eq!(max_flow(&e, &[2, 0], &[0, 2]).unwrap().0, 1);
        let g = two_k4_bridge();
        let (v, _) = max_flow(&g, &[3, 3, 3, 3, 0, 0, 0, 0], &[0, 0, 0, 0, 3, 3, 3, 3]).unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn fair_cut_examples() {
        let e = Graph::new(2, [(0, 1, 1)]).unwrap();
        let one = int(1);
        let r = fair_cut(&e, &ints(&[2, 0]), &ints(&[0, 2]), &one).unwrap();
        assert_eq!(r.u, vec![0]);
        assert_eq!(r.f.value(&e, 0, 0), int(1));
        let rep = verify_fair_cut(&e, &ints(&[2, 0]), &ints(&[0, 2]), &one, &r.u, &r.f);
        assert!(rep.ok, "{rep:?}");

        let same = fair_cut(&e, &ints(&[1, 1]), &ints(&[1, 1]), &one).unwrap();
        assert!(same.u.is_empty());
        assert_eq!(same.f.num, vec![0]);

        let g = two_k4_bridge();
        let deg = g.degrees();
        let s: Vec<Rational> = (0..8).map(|v| if v < 4 { int(deg[v] as i128) } else { int(0) }).collect();
        let t: Vec<Rational> = (0..8).map(|v| if v >= 4 { int(deg[v] as i128) } else { int(0) }).collect();
        let r = fair_cut(&g, &s, &t, &one).unwrap();
        assert_eq!(r.u, vec![0, 1, 2, 3]);
        let bridge = g.edges().iter().position(|e| (e.u, e.v) == (3, 4)).unwrap();
        assert_eq!(r.f.value(&g, bridge, 3), int(1));
        assert!(verify_fair_cut(&g, &s, &t, &one, &r.u, &r.f).ok);
    }

    #[test]
    fn fair_cut_with_fractional_weights() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let s = vec![rat(5, 2), int(0), int(0)];
        let t = vec![int(0), rat(1, 3), rat(2, 3)];
        let alpha = rat(3, 2);
        let r = fair_cut(&g, &s, &t, &alpha).unwrap();
        assert!(verify_fair_cut(&g, &s, &t, &alpha, &r.u, &r.f).ok);
        assert_eq!(r.u, vec![0]);
    }

    #[test]
    fn verify_detects_violations() {
        use property::*;
        let e = Graph::new(2, [(0, 1, 1)]).unwrap();
        let one = int(1);
        let rep = verify_fair_cut(&e, &ints(&[2, 0]), &ints(&[0, 2]), &one, &[0], &FlowAssignment::zero(&e));
        assert!(!rep.ok);
        assert!(rep.violated.contains(&CUT_EDGES_SATURATED));

        // Vertex 1 is a net source outside U that sends nothing.
        let rep = verify_fair_cut(&e, &ints(&[0, 1]), &ints(&[0, 0]), &one, &[0], &FlowAssignment::zero(&e));
        assert!(rep.violated.contains(&SOURCES_OUTSIDE_SATURATED));

        let over = FlowAssignment { num: vec![2], den: 1 };
        let rep = verify_fair_cut(&e, &ints(&[2, 0]), &ints(&[0, 2]), &one, &[0], &over);
        assert!(rep.violated.contains(&FEASIBLE));
    }

    #[test]
    fn opt_congestion_examples() {
        let e = Graph::new(2, [(0, 1, 1)]).unwrap();
        assert_eq!(opt_congestion(&e, &[0, 0]).unwrap(), int(0));
        assert_eq!(opt_congestion(&e, &[3, -3]).unwrap(), int(3));
        assert!(opt_congestion(&e, &[1, 1]).is_err());
        let g = two_k4_bridge();
        let mut d = [0i64; 8];
        d[0] = 2;
        d[7] = -2;
        assert_eq!(opt_congestion(&g, &d).unwrap(), int(2));
        let star = Graph::new(4, [(0, 3, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        assert_eq!(opt_congestion(&star, &[1, 1, 1, -3]).unwrap(), int(1));
    }

    #[test]
    fn flow_text_lists_positive_directions() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let f = FlowAssignment { num: vec![1, -2], den: 3 };
        assert_eq!(f.to_text(&g), "0 1 1 3\n2 1 2 3\n");
    }
}
