mod common;

use hc2l::contraction::contract_degree_one;
use hc2l::hierarchy::{lca_level, NodeId};
use hc2l::label::{dist_and_prune, rank_cut};
use hc2l::mincut::FlowGraph;
use hc2l::partition::balanced_cut;
use hc2l::shortcut::add_shortcuts;
use hc2l::store::{from_bytes, to_bytes};
use hc2l::workload::{generate_workload, BenchConfig};
use hc2l::{dijkstra, Beta, BuildConfig, DistanceIndex, Graph, Vertex, INFINITY};
use proptest::prelude::*;

use common::{bellman_ford, floyd_warshall};

/// Arbitrary graph, possibly disconnected, with small weights so that
/// equal-length paths are common.
fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n as Vertex, 0..n as Vertex, 1..=6u32), 0..=2 * n)
            .prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, 0..=max_n, 1..=50u32, any::<u64>())
        .prop_map(|(n, extra, w, seed)| common::random_connected(n, extra, w, seed))
}

fn any_config() -> impl Strategy<Value = BuildConfig> {
    (
        prop::sample::select(vec![(1, 10), (3, 20), (1, 5), (1, 4), (3, 10), (1, 2)]),
        1..=4usize,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|((num, den), leaf_size, tail_pruning, contraction)| BuildConfig {
            beta: Beta::new(num, den).unwrap(),
            leaf_size,
            threads: 1,
            tail_pruning,
            contraction,
        })
}

fn naive_peel_count(g: &Graph) -> usize {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n as Vertex).map(|v| g.degree(v)).collect();
    let mut gone = vec![false; n];
    while let Some(v) = (0..n).find(|&v| !gone[v] && deg[v] == 1) {
        gone[v] = true;
        for (w, _) in g.neighbors(v as Vertex) {
            if !gone[w as usize] {
                deg[w as usize] -= 1;
            }
        }
    }
    gone.iter().filter(|&&x| !x).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dijkstra_agrees_with_bellman_ford(g in any_graph(30), s in any::<prop::sample::Index>()) {
        let s = s.index(g.vertex_count()) as Vertex;
        prop_assert_eq!(dijkstra(&g, s), bellman_ford(&g, s));
    }

    #[test]
    fn queries_are_exact_and_symmetric(g in any_graph(40), cfg in any_config()) {
        let (idx, _) = DistanceIndex::build(&g, &cfg).unwrap();
        let d = floyd_warshall(&g);
        let n = g.vertex_count() as Vertex;
        for s in 0..n {
            for t in 0..n {
                let q = idx.query(s, t).unwrap();
                prop_assert_eq!(q, d[s as usize][t as usize], "pair ({}, {})", s, t);
                prop_assert_eq!(q, idx.query(t, s).unwrap());
            }
        }
        prop_assert!(idx.query(n, 0).is_err());
    }

    #[test]
    fn connected_queries_are_exact(g in connected_graph(80), cfg in any_config()) {
        let (idx, report) = DistanceIndex::build(&g, &cfg).unwrap();
        prop_assert!(report.height <= report.height_bound);
        let d = floyd_warshall(&g);
        let n = g.vertex_count() as Vertex;
        let pairs: Vec<_> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
        let got = idx.par_batch_query(&pairs).unwrap();
        for (&(s, t), q) in pairs.iter().zip(got) {
            prop_assert_eq!(q, d[s as usize][t as usize]);
        }
    }

    #[test]
    fn prune_flags_match_definition(g in any_graph(12), root in any::<prop::sample::Index>(), mask in any::<u16>()) {
        let n = g.vertex_count();
        let root = root.index(n) as Vertex;
        let prune: Vec<Vertex> = (0..n as Vertex).filter(|&v| mask >> v & 1 == 1).collect();
        let d = floyd_warshall(&g);
        let r = root as usize;
        let got = dist_and_prune(&g, root, &prune);
        prop_assert_eq!(&got.dist, &d[r]);
        for u in 0..n {
            let expected = u != r
                && d[r][u] != INFINITY
                && prune.iter().any(|&p| {
                    let p = p as usize;
                    p != r && d[r][p] != INFINITY && d[p][u] != INFINITY && d[r][p] + d[p][u] == d[r][u]
                });
            prop_assert_eq!(got.pruned[u], expected, "vertex {}", u);
        }
    }

    #[test]
    fn ranking_counts_match_definition(g in any_graph(12), mask in 1..u16::MAX) {
        let n = g.vertex_count();
        let cut: Vec<Vertex> = (0..n as Vertex).filter(|&v| mask >> v & 1 == 1).collect();
        prop_assume!(!cut.is_empty());
        let d = floyd_warshall(&g);
        let ranking = rank_cut(&g, &cut);
        let mut sorted = ranking.order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(&sorted, &cut);
        let count = |c: Vertex| {
            let c = c as usize;
            (0..n)
                .filter(|&u| {
                    u != c
                        && d[c][u] != INFINITY
                        && cut.iter().any(|&p| {
                            let p = p as usize;
                            p != c && d[c][p] != INFINITY && d[p][u] != INFINITY && d[c][p] + d[p][u] == d[c][u]
                        })
                })
                .count()
        };
        for (i, &c) in ranking.order.iter().enumerate() {
            prop_assert_eq!(ranking.counts[i], count(c));
            prop_assert_eq!(ranking.cover[i], n - ranking.counts[i]);
        }
        for w in ranking.order.windows(2).zip(ranking.counts.windows(2)) {
            prop_assert!((w.1[0], w.0[0]) < (w.1[1], w.0[1]));
        }
    }

    #[test]
    fn contraction_keeps_distances(g in any_graph(30)) {
        let c = contract_degree_one(&g);
        let d = floyd_warshall(&g);
        let core = floyd_warshall(&c.core);
        let to_orig = c.map.core_to_original();
        prop_assert_eq!(c.core.vertex_count(), naive_peel_count(&g));
        for i in 0..to_orig.len() {
            for j in 0..to_orig.len() {
                prop_assert_eq!(core[i][j], d[to_orig[i] as usize][to_orig[j] as usize]);
            }
        }
        let n = g.vertex_count() as Vertex;
        for v in 0..n {
            let a = c.map.anchor(v);
            let root = to_orig[a.core as usize] as usize;
            prop_assert_eq!(a.offset, d[v as usize][root]);
            for w in 0..n {
                if let Ok(x) = c.map.pair_distance(v, w) {
                    prop_assert_eq!(x, d[v as usize][w as usize]);
                }
            }
        }
    }

    #[test]
    fn lca_level_is_common_prefix(a in prop::collection::vec(any::<bool>(), 0..=58), b in prop::collection::vec(any::<bool>(), 0..=58)) {
        let id = |bits: &[bool]| bits.iter().try_fold(NodeId::ROOT, |x, &r| x.child(r)).unwrap();
        let common = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
        prop_assert_eq!(lca_level(id(&a), id(&b)), common);
        prop_assert_eq!(id(&a).prefix(common), id(&b).prefix(common));
    }

    #[test]
    fn store_round_trips(g in any_graph(40), cfg in any_config()) {
        let (idx, _) = DistanceIndex::build(&g, &cfg).unwrap();
        let bytes = to_bytes(&idx);
        let back = from_bytes(&bytes).unwrap();
        prop_assert_eq!(&back, &idx);
        prop_assert_eq!(to_bytes(&back), bytes);
    }

    #[test]
    fn flow_equals_disjoint_paths(g in any_graph(12), order in Just(()).prop_perturb(|_, mut rng| {
        let mut v: Vec<u8> = (0..12).collect();
        for i in (1..12).rev() {
            v.swap(i, rng.random_range(0..=i));
        }
        v
    }), ns in 1..=3usize, nt in 1..=3usize) {
        let n = g.vertex_count();
        let order: Vec<Vertex> = order.into_iter().map(Vertex::from).filter(|&v| (v as usize) < n).collect();
        prop_assume!(ns + nt <= n);
        let (sources, sinks) = (&order[..ns], &order[ns..ns + nt]);
        let mut fg = FlowGraph::new(&g, sources, sinks).unwrap();
        let flow = fg.max_flow();
        prop_assert_eq!(flow.value, common::disjoint_paths(&g, sources, sinks));
        prop_assert_eq!(flow.value, common::brute_force_vertex_cut(&g, sources, sinks));
        prop_assert!(flow.phases <= flow.value + 1);
    }

    #[test]
    fn shortcut_children_preserve_distances(g in connected_graph(60), beta in prop::sample::select(vec![(1, 5), (1, 4), (3, 10)])) {
        let cut = balanced_cut(&g, Beta::new(beta.0, beta.1).unwrap());
        prop_assume!(!cut.cut.is_empty());
        let searches: Vec<_> = cut.cut.iter().map(|&c| dijkstra(&g, c)).collect();
        let rows: Vec<&[u64]> = searches.iter().map(|r| r.as_slice()).collect();
        let d = floyd_warshall(&g);
        for part in [&cut.side_a, &cut.side_b] {
            let shortcuts = add_shortcuts(&g, &rows, &cut.cut, part).unwrap();
            let local = |v: Vertex| part.binary_search(&v).unwrap() as Vertex;
            let child = g.induced_with(part, shortcuts.iter().map(|s| (local(s.a), local(s.b), s.weight)));
            let dc = floyd_warshall(&child);
            for i in 0..part.len() {
                for j in 0..part.len() {
                    prop_assert_eq!(dc[i][j], d[part[i] as usize][part[j] as usize]);
                }
            }
        }
    }

    #[test]
    fn bucket_pairs_fall_in_their_bucket(g in connected_graph(60), seed in any::<u64>(), buckets in 1..=5usize) {
        let d = floyd_warshall(&g);
        let w = generate_workload(&g, &BenchConfig::buckets(buckets, 4, 1, seed));
        let diameter = d.iter().flatten().copied().max().unwrap();
        prop_assert!(w.l_max <= diameter);
        if let Some(last) = w.buckets.last() {
            prop_assert_eq!(last.upper, w.l_max as f64);
        }
        for (i, b) in w.buckets.iter().enumerate() {
            prop_assert!(b.pairs.len() <= 4);
            prop_assert_eq!(w.underfilled.contains(&i), b.pairs.len() < 4);
            for &(s, t) in &b.pairs {
                prop_assert!(b.contains(d[s as usize][t as usize]));
            }
        }
        prop_assert_eq!(&w, &generate_workload(&g, &BenchConfig::buckets(buckets, 4, 1, seed)));
    }
}
