use super::queue::QuadHeap;
use super::GraphView;
use crate::tdgraph::NodeId;
use crate::ttf::Ttf;

/// Replace labels by a coarser upper bound once they exceed `max_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coarsening {
    pub epsilon: f64,
    pub max_points: usize,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ProfileOptions<'a> {
    /// Only these labels matter; the search ends once none of them can improve.
    pub targets: Option<&'a [NodeId]>,
    /// Maximum number of queue pops. Hitting it marks the result truncated.
    pub settle_limit: Option<usize>,
    /// Nodes this many edges away from the source are not expanded. Marks the
    /// result truncated when it prunes anything.
    pub hop_limit: Option<u32>,
    /// Improvements only at travel times of at least this value are irrelevant.
    pub stop_above: Option<f64>,
    pub coarsening: Option<Coarsening>,
}

/// Travel-time profiles from one source.
#[derive(Debug, Clone)]
pub struct ProfileLabels {
    pub source: NodeId,
    labels: Vec<Option<Ttf>>,
    /// The search stopped early because of a limit; labels are upper bounds.
    pub truncated: bool,
    pub pops: usize,
}

impl ProfileLabels {
    pub fn label(&self, node: NodeId) -> Option<&Ttf> {
        self.labels[node as usize].as_ref()
    }

    pub fn into_label(mut self, node: NodeId) -> Option<Ttf> {
        self.labels[node as usize].take()
    }
}

/// Label-correcting profile search. Tentative distances are travel-time
/// functions; a node is queued again whenever its label improves anywhere.
/// Queue key is the minimum of the label.
pub fn profile_dijkstra<G: GraphView>(graph: &G, source: NodeId, opts: &ProfileOptions<'_>) -> ProfileLabels {
    let n = graph.node_count();
    let mut labels: Vec<Option<Ttf>> = vec![None; n];
    let mut stamp = vec![0u32; n];
    let mut hops = vec![0u32; n];
    let mut queue = QuadHeap::new();
    let mut truncated = false;
    let mut pops = 0usize;

    labels[source as usize] = Some(Ttf::zero(graph.period()));
    queue.push(0.0, source, 0);

    while let Some(&top) = queue.peek() {
        if opts.stop_above.is_some_and(|bound| top.key >= bound) {
            break;
        }
        if let Some(targets) = opts.targets {
            let mut worst = f64::NEG_INFINITY;
            for &t in targets {
                match &labels[t as usize] {
                    Some(l) => worst = worst.max(l.global_max()),
                    None => {
                        worst = f64::INFINITY;
                        break;
                    }
                }
            }
            if top.key >= worst {
                break;
            }
        }
        queue.pop();
        let u = top.node;
        if stamp[u as usize] != top.stamp {
            continue;
        }
        if opts.settle_limit.is_some_and(|limit| pops >= limit) {
            truncated = true;
            break;
        }
        pops += 1;
        if opts.hop_limit.is_some_and(|limit| hops[u as usize] >= limit) {
            truncated = true;
            continue;
        }

        let from = labels[u as usize].take().expect("queued node has a label");
        graph.for_each_out(u, |_, head, ttf| {
            debug_assert_ne!(head, u);
            let h = head as usize;
            let mut cand = from.link_unchecked(ttf);
            if let Some(c) = opts.coarsening {
                if cand.len() > c.max_points {
                    cand = cand.approximate(c.epsilon).map(|b| b.upper).unwrap_or(cand);
                }
            }
            let next = match &labels[h] {
                None => cand,
                Some(old) => {
                    if cand.undercut_unchecked(old).is_empty() {
                        return;
                    }
                    let mut merged = old.minimum_unchecked(&cand);
                    if let Some(c) = opts.coarsening {
                        if merged.len() > c.max_points {
                            merged = merged.approximate(c.epsilon).map(|b| b.upper).unwrap_or(merged);
                        }
                    }
                    merged
                }
            };
            stamp[h] += 1;
            hops[h] = hops[u as usize] + 1;
            queue.push(next.global_min(), head, stamp[h]);
            labels[h] = Some(next);
        });
        labels[u as usize] = Some(from);
    }

    ProfileLabels { source, labels, truncated, pops }
}
