mod common;

use common::{brute_force_arrival, close, small_graph, PERIOD};
use tdch::search::{
    interval_dijkstra, profile_dijkstra, reverse_interval_dijkstra, static_dijkstra, td_dijkstra, ProfileOptions,
    ReversedGraph, ScalarOptions, StaticWeight,
};
use tdch::ttf::TimeInterval;

fn departures() -> impl Iterator<Item = f64> {
    (0..40).map(|k| k as f64 * PERIOD / 40.0 + 3.7)
}

#[test]
fn td_dijkstra_matches_path_enumeration() {
    for seed in 0..40 {
        let g = small_graph(8, 0.3, seed);
        for s in 0..8 {
            for tau in departures().step_by(8) {
                let labels = td_dijkstra(&g, s, tau, &ScalarOptions::default());
                for t in 0..8 {
                    let want = brute_force_arrival(&g, s, t, tau);
                    assert!(close(labels.arrival(t), want, 1e-9), "seed {seed} {s}->{t}@{tau}");
                }
            }
        }
    }
}

#[test]
fn reported_paths_reproduce_arrivals() {
    for seed in 0..20 {
        let g = small_graph(8, 0.35, seed);
        let labels = td_dijkstra(&g, 0, 123.0, &ScalarOptions::default());
        for t in 0..8 {
            let Some(path) = labels.path_to(t) else { continue };
            let mut time = 123.0;
            let mut at = 0;
            for id in path {
                let e = g.edge(id);
                assert_eq!(e.tail, at);
                time += e.ttf.eval(time);
                at = e.head;
            }
            assert_eq!(at, t);
            assert!(close(time, labels.arrival(t), 1e-12));
        }
    }
}

#[test]
fn profile_labels_agree_with_scalar_searches() {
    for seed in 0..25 {
        let g = small_graph(8, 0.3, 100 + seed);
        let s = (seed % 8) as u32;
        let profiles = profile_dijkstra(&g, s, &ProfileOptions::default());
        assert!(!profiles.truncated);
        for tau in departures() {
            let labels = td_dijkstra(&g, s, tau, &ScalarOptions::default());
            for t in 0..8 {
                match profiles.label(t) {
                    Some(f) => assert!(close(tau + f.eval(tau), labels.arrival(t), 1e-9), "seed {seed} {s}->{t}@{tau}"),
                    None => assert!(labels.arrival(t).is_infinite()),
                }
            }
        }
    }
}

#[test]
fn static_distances_bracket_travel_times() {
    for seed in 0..20 {
        let g = small_graph(8, 0.3, 200 + seed);
        let lo = static_dijkstra(&g, 0, StaticWeight::Min, None);
        let hi = static_dijkstra(&g, 0, StaticWeight::Max, None);
        for tau in departures() {
            let labels = td_dijkstra(&g, 0, tau, &ScalarOptions::default());
            for t in 0..8 {
                let Some(tt) = labels.travel_time(t) else {
                    assert!(lo.distance(t).is_infinite());
                    continue;
                };
                assert!(lo.distance(t) <= tt + 1e-9);
                assert!(tt <= hi.distance(t) + 1e-9);
            }
        }
    }
}

#[test]
fn interval_bounds_hold_for_every_departure_in_the_window() {
    for seed in 0..20 {
        let g = small_graph(8, 0.3, 300 + seed);
        for (begin, end) in [(100.0, 180.0), (900.0, 1100.0), (0.0, 2000.0)] {
            let window = TimeInterval::new(begin, end);
            let fwd = interval_dijkstra(&g, 0, window);
            let mut samples: Vec<f64> = (0..=50).map(|k| begin + (end - begin) * k as f64 / 50.0).collect();
            samples.dedup();
            for &tau in &samples {
                let labels = td_dijkstra(&g, 0, tau, &ScalarOptions::default());
                for t in 0..8 {
                    let Some(tt) = labels.travel_time(t) else { continue };
                    assert!(fwd.lower(t) <= tt + 1e-9, "seed {seed} lower {t}");
                    assert!(tt <= fwd.upper(t) + 1e-9, "seed {seed} upper {t}");
                }
            }

            // Backward: bound on the travel time to node 7 for routes leaving
            // within the window and arriving by its end.
            let bwd = reverse_interval_dijkstra(&ReversedGraph(&g), 7, window);
            for v in 0..8 {
                for &tau in &samples {
                    let tt = brute_force_arrival(&g, v, 7, tau) - tau;
                    if tt.is_finite() && tau + tt <= end {
                        assert!(bwd.lower(v) <= tt + 1e-9, "seed {seed} backward {v}@{tau}");
                    }
                }
            }
        }
    }
}
