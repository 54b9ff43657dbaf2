use proptest::prelude::*;
use tdch::ttf::{Point, Ttf};

const P: f64 = 1000.0;
const MIN_SLOPE: f64 = -1.0 + 1e-6;

/// Raises values until no segment, including the wrap-around one, falls
/// steeper than `MIN_SLOPE`.
fn make_fifo(mut pts: Vec<(f64, f64)>) -> Ttf {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let n = pts.len();
    for _ in 0..2 {
        for i in 0..n {
            let j = (i + 1) % n;
            let dt = if j == 0 { pts[0].0 + P - pts[i].0 } else { pts[j].0 - pts[i].0 };
            let floor = pts[i].1 + MIN_SLOPE * dt;
            if pts[j].1 < floor {
                pts[j].1 = floor;
            }
        }
    }
    Ttf::new(pts.into_iter().map(|(at, val)| Point { at, val }).collect(), P).unwrap()
}

fn ttf() -> impl Strategy<Value = Ttf> {
    prop::collection::vec((0u32..1000, 1.0f64..200.0), 1..8)
        .prop_map(|v| make_fifo(v.into_iter().map(|(t, w)| (t as f64, w)).collect()))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * b.abs().max(1.0)
}

/// Breakpoints of all functions, their midpoints and a few fixed times.
fn probes(fs: &[&Ttf]) -> Vec<f64> {
    let mut ts: Vec<f64> = fs.iter().flat_map(|f| f.points().iter().map(|p| p.at)).collect();
    ts.extend((0..20).map(|k| k as f64 * 50.0 + 0.5));
    ts.sort_by(f64::total_cmp);
    let mids: Vec<f64> = ts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    ts.extend(mids);
    ts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn link_is_pointwise_and_fifo(f in ttf(), g in ttf(), tau in 0.0f64..P) {
        let h = f.link(&g).unwrap();
        prop_assert!(h.is_fifo());
        for t in probes(&[&f, &g]).into_iter().chain([tau]) {
            prop_assert!(close(h.eval(t), f.eval(t) + g.eval(t + f.eval(t))), "at {}", t);
        }
    }

    #[test]
    fn link_is_associative(f in ttf(), g in ttf(), h in ttf()) {
        let left = f.link(&g).unwrap().link(&h).unwrap();
        let right = f.link(&g.link(&h).unwrap()).unwrap();
        for t in probes(&[&f, &g, &h, &left, &right]) {
            prop_assert!(close(left.eval(t), right.eval(t)), "at {}", t);
        }
    }

    #[test]
    fn minimum_is_pointwise_and_fifo(f in ttf(), g in ttf()) {
        let m = f.minimum(&g).unwrap();
        prop_assert!(m.is_fifo());
        for t in probes(&[&f, &g, &m]) {
            prop_assert!(close(m.eval(t), f.eval(t).min(g.eval(t))), "at {}", t);
        }
    }

    #[test]
    fn undercut_intervals_are_exactly_where_f_is_below(f in ttf(), g in ttf()) {
        let ivs = f.undercut_intervals(&g).unwrap();
        for iv in &ivs {
            let mid = 0.5 * (iv.begin + iv.end);
            prop_assert!(f.eval(mid) < g.eval(mid) + 1e-9, "mid {}", mid);
        }
        for t in probes(&[&f, &g]) {
            if f.eval(t) < g.eval(t) - 1e-6 {
                prop_assert!(ivs.iter().any(|iv| iv.contains(t, P)), "{} not covered by {:?}", t, ivs);
            }
        }
    }

    #[test]
    fn approximation_sandwiches(f in ttf(), eps in 0.0f64..2.0) {
        let b = f.approximate(eps).unwrap();
        prop_assert!(b.lower.len() <= f.len() && b.upper.len() <= f.len());
        for t in probes(&[&f, &b.lower, &b.upper]) {
            let v = f.eval(t);
            prop_assert!(b.lower.eval(t) <= v + 1e-9);
            prop_assert!(v <= b.upper.eval(t) + 1e-9);
            prop_assert!(b.upper.eval(t) <= (1.0 + eps) * v + 1e-9);
        }
    }

    #[test]
    fn evaluation_is_periodic(f in ttf(), tau in -5000.0f64..5000.0, k in -3i32..4) {
        prop_assert!(close(f.eval(tau), f.eval(tau + k as f64 * P)));
    }
}
