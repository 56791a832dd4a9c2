use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treecut::cutmatch::{
    check_sweep_cut, dense_flow_matrix, sweep_cut, walk::apply_p, CutMatchingGame, GameConfig,
};
use treecut::flow::{fair_cut, path_decomposition, property, verify_fair_cut};
use treecut::generators::{diamond, diamond_adversarial_demands, random_connected};
use treecut::graph::{boundary_degrees, cap_between, difference, fuse, partition_boundary_degree, Partition};
use treecut::hierarchy::{check_tree_capacities, construct_hierarchy, predict_congestion, to_tree_sparsifier};
use treecut::io::{parse_edge_list, write_edge_list};
use treecut::oracle::{brute_force_opt_congestion, check_laminar};
use treecut::partition::{check_trim, two_way_trim};
use treecut::rational::{int, rat, Rational};
use treecut::{max_flow, opt_congestion, Graph, HierarchyConfig};

/// Graph on `2..=max_n` vertices; with `connected`, a spanning path is added first.
fn graph(max_n: usize, connected: bool) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(move |n| {
        let path = if connected { prop::collection::vec(1..=4u64, n - 1).boxed() } else { Just(vec![]).boxed() };
        (Just(n), path, prop::collection::vec((0..n, 0..n, 1..=8u64), 0..2 * n))
    })
    .prop_map(|(n, path, extra)| {
        let mut e: Vec<(usize, usize, u64)> = path.iter().enumerate().map(|(i, &c)| (i, i + 1, c)).collect();
        e.extend(extra.into_iter().filter(|(a, b, _)| a != b));
        Graph::new(n, e).unwrap()
    })
}

fn weights(n: usize, max: i128) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0..=max, 1..=3i128), n).prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
}

fn balanced_demand(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, n).prop_map(|mut d| {
        let s: i64 = d.iter().sum();
        *d.last_mut().unwrap() -= s;
        d
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fair_cut_satisfies_every_condition(
        (g, s, t, alpha) in graph(9, false).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), weights(n, 8), weights(n, 8), prop_oneof![Just(rat(1, 1)), Just(rat(3, 2)), Just(rat(2, 1))])
        })
    ) {
        let fc = fair_cut(&g, &s, &t, &alpha).unwrap();
        let report = verify_fair_cut(&g, &s, &t, &alpha, &fc.u, &fc.f);
        prop_assert!(report.ok, "violated {:?}", report.violated);
    }

    #[test]
    fn verifier_rejects_a_weakened_flow(g in graph(7, true)) {
        // Full supply at vertex 0 against full demand at the last vertex, flow dropped.
        let n = g.n();
        let mut s = vec![Rational::zero(); n];
        let mut t = vec![Rational::zero(); n];
        s[0] = int(1);
        t[n - 1] = int(1);
        let fc = fair_cut(&g, &s, &t, &int(1)).unwrap();
        let zero = treecut::FlowAssignment::zero(&g);
        let report = verify_fair_cut(&g, &s, &t, &int(1), &fc.u, &zero);
        prop_assert!(!report.ok);
        prop_assert!(!report.violated.contains(&property::FEASIBLE));
    }

    #[test]
    fn max_flow_matches_brute_force_cut(g in graph(8, true)) {
        let n = g.n();
        let mut supply = vec![0u64; n];
        let mut demand = vec![0u64; n];
        supply[0] = 1000;
        demand[n - 1] = 1000;
        let (value, f) = max_flow(&g, &supply, &demand).unwrap();
        let best = (0u32..1 << n)
            .filter(|m| m & 1 == 1 && m >> (n - 1) & 1 == 0)
            .map(|m| {
                let in_s: Vec<bool> = (0..n).map(|v| m >> v & 1 == 1).collect();
                treecut::graph::cut_capacity_masked(&g, &in_s, &vec![true; n])
            })
            .min()
            .unwrap();
        prop_assert_eq!(value, best.min(1000));
        prop_assert!(f.congestion(&g) <= int(1));
    }

    #[test]
    fn path_decomposition_reassembles_the_flow(g in graph(8, true)) {
        let n = g.n();
        let mut supply = vec![0u64; n];
        let mut demand = vec![0u64; n];
        supply[0] = 7;
        demand[n - 1] = 4;
        demand[n / 2] += 3;
        let (_, f) = max_flow(&g, &supply, &demand).unwrap();
        let dec = path_decomposition(&g, &f, None).unwrap();
        prop_assert_eq!(dec.to_flow(&g).num, f.num);
        prop_assert!(dec.paths.iter().all(|p| p.edges.len() + 1 == p.vertices.len()));
    }

    #[test]
    fn opt_congestion_matches_enumeration(
        (g, d) in graph(8, true).prop_flat_map(|g| { let n = g.n(); (Just(g), balanced_demand(n)) })
    ) {
        prop_assert_eq!(opt_congestion(&g, &d).unwrap(), brute_force_opt_congestion(&g, &d).unwrap());
    }

    #[test]
    fn sweep_cut_meets_its_guarantees(u in prop::collection::vec(-100.0f64..100.0, 4..60)) {
        let mut u = u;
        let active: Vec<usize> = (0..u.len()).collect();
        let all = vec![true; u.len()];
        apply_p(&mut u, &all);
        prop_assume!(u.iter().any(|x| x.abs() > 1e-6));
        let cut = sweep_cut(&active, &u).unwrap();
        prop_assert!(check_sweep_cut(&active, &u, &cut).is_empty());
    }

    #[test]
    fn flow_matrix_is_doubly_stochastic(seed in any::<u64>(), k in 2usize..24, rounds in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let matchings: Vec<Vec<(usize, usize)>> = (0..rounds).map(|_| {
            use rand::seq::SliceRandom;
            let mut p: Vec<usize> = (0..k).collect();
            p.shuffle(&mut rng);
            p.chunks_exact(2).map(|c| (c[0], c[1])).collect()
        }).collect();
        let f = dense_flow_matrix::<f64>(k, &matchings, 2).unwrap();
        for i in 0..k {
            let row: f64 = (0..k).map(|j| f.get(i, j)).sum();
            let col: f64 = (0..k).map(|j| f.get(j, i)).sum();
            prop_assert!((row - 1.0).abs() < 1e-12 && (col - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fuse_respects_the_boundary_bound(
        (g, t) in graph(9, true).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n))
        })
    ) {
        let all: Vec<usize> = (0..g.n()).collect();
        let x = Partition::singletons(g.n(), &all);
        let y = fuse(&g, &x, &t).unwrap();
        prop_assert_eq!(y.ground(), all.as_slice());
        prop_assert!(y.clusters().contains(&t));
        let before = partition_boundary_degree(&g, &x, &all).unwrap();
        let after = partition_boundary_degree(&g, &y, &all).unwrap();
        let t_deg = partition_boundary_degree(&g, &x, &t).unwrap();
        prop_assert!(after <= before - t_deg + 2 * cap_between(&g, &t, &difference(&all, &t)));
    }

    #[test]
    fn trim_partitions_the_cluster(
        (g, r) in graph(9, true).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..n))
        }),
        delta_den in 1i128..4,
    ) {
        let all: Vec<usize> = (0..g.n()).collect();
        let pi = boundary_degrees(&g, &Partition::singletons(g.n(), &all));
        let cap_r = cap_between(&g, &r, &difference(&all, &r));
        let pi_r: u64 = r.iter().map(|&v| pi[v]).sum();
        // Smallest φ meeting the sparsity requirement on R.
        let phi = rat(cap_r as i128, pi_r as i128);
        let delta = rat(1, delta_den);
        let trim = two_way_trim(&g, &all, &r, &pi, &phi, &delta).unwrap();
        let mut parts = [trim.a.clone(), trim.b.clone(), trim.u.clone()].concat();
        parts.sort_unstable();
        prop_assert_eq!(parts, all.clone());
        let bad = check_trim(&g, &all, &r, &pi, &phi, &delta, &trim).unwrap();
        prop_assert!(bad.is_empty(), "violated {:?}", bad);
    }

    #[test]
    fn edge_list_round_trips(g in graph(12, false)) {
        let text = write_edge_list(&g);
        let back = parse_edge_list(&text, Some(g.n())).unwrap();
        prop_assert_eq!(write_edge_list(&back), text);
        prop_assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matching_player_invariants_hold_each_round(
        seed in any::<u64>(),
        n in 2usize..8,
        c in prop_oneof![Just(2u64), Just(5), Just(12), Just(40)],
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(n, n, 3, &mut rng).unwrap();
        let pi: Vec<u64> = (0..n).map(|v| 1 + (seed >> v) % 4).collect();
        let config = GameConfig { seed, round_constant: 2.0, ..GameConfig::default() };
        let mut game = CutMatchingGame::new(&g, &pi, c, config).unwrap();
        while let Some((_, round)) = game.step().unwrap() {
            prop_assert!(game.player().check_invariants(game.active()).is_ok(),
                "{:?}", game.player().check_invariants(game.active()));
            let matched: std::collections::HashSet<usize> =
                round.matching.iter().flat_map(|&(a, b)| [a, b]).collect();
            prop_assert_eq!(matched.len(), 2 * round.matching.len());
        }
    }

    #[test]
    fn hierarchy_structure_and_tree_predictions(
        seed in any::<u64>(),
        n in 2usize..11,
        d in prop::collection::vec(-4i64..=4, 11),
        scale in 1i64..5,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(n, n / 2, 3, &mut rng).unwrap();
        let h = construct_hierarchy(&g, &HierarchyConfig { seed, ..HierarchyConfig::default() }).unwrap();
        prop_assert!(check_laminar(n, h.levels(), true));
        prop_assert!(h.grandparent_violations().is_empty());
        prop_assert!(h.height() <= h.height_bound());
        let t = to_tree_sparsifier(&h, &g).unwrap();
        t.validate().unwrap();
        prop_assert!(check_tree_capacities(&g, &t));
        let mut d: Vec<i64> = d[..n].to_vec();
        let s: i64 = d.iter().sum();
        d[n - 1] -= s;
        let p = predict_congestion(&t, &d).unwrap();
        prop_assert!(p <= opt_congestion(&g, &d).unwrap());
        let scaled: Vec<i64> = d.iter().map(|x| x * scale).collect();
        prop_assert_eq!(predict_congestion(&t, &scaled).unwrap(), p * int(scale as i128));
    }
}

#[test]
fn diamond_demands_are_balanced_for_every_choice() {
    for k in 1..=4 {
        let d = diamond(k).unwrap();
        for pick in 0..2 {
            let dem = diamond_adversarial_demands(&d, |_, c| pick.min(c.len() - 1)).unwrap();
            assert_eq!(dem.len(), 2 * k as usize);
            assert!(dem.iter().all(|x| x.iter().sum::<i64>() == 0));
        }
        assert_eq!(d.graph.m(), 4usize.pow(k));
    }
}
