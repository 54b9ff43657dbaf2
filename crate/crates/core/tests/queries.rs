mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdch::generator::{generate, GeneratorSpec};
use tdch::preprocess::{condense, preprocess, ContractionConfig, OrderingStrategy};
use common::{brute_force_arrival, small_graph};
use tdch::preprocess::build_hierarchy;
use tdch::query::{
    atch_query, backward_mark, profile_query, pruned_tch_query, tch_query, unpack_path, BackwardMethod, Pruning,
    QueryError,
};
use tdch::tdgraph::{Edge, NodeOrder};
use tdch::ttf::{TimeInterval, Ttf};
use tdch::search::{td_dijkstra, ScalarOptions};
use tdch::tdgraph::{Hierarchy, TdGraph};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * b.abs().max(1.0)
}

fn queries(graph: &TdGraph, n: usize, seed: u64) -> Vec<(u32, u32, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = graph.node_count() as u32;
    (0..n)
        .map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes), rng.gen_range(0.0..graph.period())))
        .collect()
}

fn dijkstra(graph: &TdGraph, s: u32, t: u32, tau: f64) -> f64 {
    td_dijkstra(graph, s, tau, &ScalarOptions { target: Some(t), ..Default::default() }).arrival(t)
}

fn exact_hierarchy(graph: &TdGraph) -> Hierarchy {
    preprocess(graph, &OrderingStrategy::default(), &ContractionConfig::exact())
}

#[test]
fn tch_variants_match_dijkstra_on_grid() {
    let graph = generate(&GeneratorSpec::grid(8, 8, 5)).unwrap();
    let h = exact_hierarchy(&graph);
    for (s, t, tau) in queries(&graph, 200, 1) {
        let want = dijkstra(&graph, s, t, tau);
        let plain = tch_query(&h, s, t, tau).unwrap();
        assert!(close(plain.arrival.unwrap(), want), "{s}->{t}@{tau}: {:?} vs {want}", plain.arrival);
        let path = plain.path.as_ref().unwrap();
        assert!(path.is_consistent(&graph, 1e-6));
        assert!(close(path.arrival(), want));
        for pruning in [Pruning::Static, Pruning::Interval] {
            let pruned = pruned_tch_query(&h, s, t, tau, pruning).unwrap();
            assert!(close(pruned.arrival.unwrap(), want));
            assert!(pruned.stats.settled <= plain.stats.settled);
        }
    }
}

#[test]
fn atch_matches_dijkstra_on_random_graph() {
    let graph = generate(&GeneratorSpec::random(150, 3.0, 9)).unwrap();
    for eps in [0.1, 1.0] {
        let h = preprocess(&graph, &OrderingStrategy::default(), &ContractionConfig::approx(eps));
        let c = condense(&h);
        for (s, t, tau) in queries(&graph, 100, 2) {
            let want = dijkstra(&graph, s, t, tau);
            let got = atch_query(&h, s, t, tau).unwrap();
            assert!(close(got.arrival.unwrap(), want), "eps {eps} {s}->{t}@{tau}: {:?} vs {want}", got.arrival);
            assert!(got.path.unwrap().is_consistent(&graph, 1e-6));
            let condensed = tch_query(&c, s, t, tau).unwrap();
            assert!(close(condensed.arrival.unwrap(), want));
        }
    }
}

#[test]
fn profile_matches_scalar_queries() {
    let graph = generate(&GeneratorSpec::grid(5, 5, 3)).unwrap();
    let h = exact_hierarchy(&graph);
    for (s, t, _) in queries(&graph, 20, 3) {
        let profile = profile_query(&h, s, t).unwrap().unwrap();
        for k in 0..50 {
            let tau = graph.period() * k as f64 / 50.0;
            assert!(close(tau + profile.eval(tau), dijkstra(&graph, s, t, tau)));
        }
    }
}

#[test]
fn wrong_mode_and_bad_nodes_are_errors() {
    let graph = generate(&GeneratorSpec::grid(3, 3, 1)).unwrap();
    let h = exact_hierarchy(&graph);
    assert!(matches!(atch_query(&h, 0, 1, 0.0), Err(QueryError::WrongMode { .. })));
    assert!(matches!(tch_query(&h, 0, 99, 0.0), Err(QueryError::NodeOutOfRange { node: 99, .. })));
    let up = h.up_edges().next().unwrap();
    let other = h.up_edges().find(|&e| h.edge(e).tail != h.edge(up).head).unwrap();
    assert!(matches!(unpack_path(&h, &[up, other], 0.0), Err(QueryError::Disconnected { index: 0 })));
}

#[test]
fn all_algorithms_match_path_enumeration_on_small_graphs() {
    for seed in 0..30 {
        let g = small_graph(8, 0.3, 900 + seed);
        let h = exact_hierarchy(&g);
        let a = preprocess(&g, &OrderingStrategy::default(), &ContractionConfig::approx(0.5));
        for s in 0..8 {
            for t in 0..8 {
                let tau = 37.0 * (s * 8 + t) as f64;
                let want = brute_force_arrival(&g, s, t, tau);
                let answers = [
                    tch_query(&h, s, t, tau).unwrap(),
                    pruned_tch_query(&h, s, t, tau, Pruning::Static).unwrap(),
                    pruned_tch_query(&h, s, t, tau, Pruning::Interval).unwrap(),
                    atch_query(&a, s, t, tau).unwrap(),
                ];
                for r in answers {
                    let got = r.arrival.unwrap_or(f64::INFINITY);
                    assert!(common::close(got, want, 1e-9), "seed {seed} {s}->{t}@{tau}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn same_source_and_target_is_free() {
    let graph = generate(&GeneratorSpec::grid(3, 3, 1)).unwrap();
    let h = exact_hierarchy(&graph);
    let r = tch_query(&h, 4, 4, 500.0).unwrap();
    assert_eq!(r.travel_time(), Some(0.0));
    assert!(r.path.unwrap().edges.is_empty());
    assert_eq!(profile_query(&h, 4, 4).unwrap().unwrap().global_max(), 0.0);
}

#[test]
fn unreachable_targets_report_no_arrival() {
    let period = 100.0;
    let edges = vec![Edge::new(0, 1, Ttf::constant(3.0, period)), Edge::new(2, 3, Ttf::constant(4.0, period))];
    let g = TdGraph::new(4, edges, period).unwrap();
    let h = exact_hierarchy(&g);
    assert_eq!(tch_query(&h, 0, 3, 0.0).unwrap().arrival, None);
    assert_eq!(pruned_tch_query(&h, 0, 3, 0.0, Pruning::Interval).unwrap().arrival, None);
    assert_eq!(profile_query(&h, 1, 0).unwrap(), None);
    assert_eq!(tch_query(&h, 0, 1, 0.0).unwrap().travel_time(), Some(3.0));
}

#[test]
fn backward_marking_of_a_down_chain() {
    // Node 0 has the highest rank, so both edges of 0 -> 1 -> 2 point down.
    let period = 100.0;
    let edges = vec![
        Edge::new(0, 1, Ttf::from_pairs(&[(0.0, 5.0), (50.0, 8.0)], period).unwrap()),
        Edge::new(1, 2, Ttf::constant(7.0, period)),
    ];
    let g = TdGraph::new(3, edges, period).unwrap();
    let h = build_hierarchy(&g, &NodeOrder::from_sequence(&[2, 1, 0]).unwrap(), &ContractionConfig::exact());
    let space = backward_mark(&h, 2, BackwardMethod::StaticMin).unwrap();
    assert_eq!(space.reached_count, 3);
    assert_eq!(space.marked_edges, 2);
    assert_eq!(space.lower_bound(2), 0.0);
    assert_eq!(space.lower_bound(1), 7.0);
    assert_eq!(space.lower_bound(0), 12.0);
    let plain = backward_mark(&h, 2, BackwardMethod::ReachabilityOnly).unwrap();
    assert_eq!(plain.lower_bound(0), 0.0);
    let window = backward_mark(&h, 2, BackwardMethod::Interval(TimeInterval::new(20.0, 40.0))).unwrap();
    assert_eq!(window.lower_bound(1), 7.0);
    // Edge 0 -> 1 taken within [20, 40 - 7]: at least 5 + 3 * 20 / 50.
    assert!((window.lower_bound(0) - (6.2 + 7.0)).abs() < 1e-9, "{}", window.lower_bound(0));
    assert!(matches!(backward_mark(&h, 9, BackwardMethod::StaticMin), Err(QueryError::NodeOutOfRange { .. })));
}
