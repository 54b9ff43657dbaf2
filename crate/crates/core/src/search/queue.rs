//! 4-ary min-heap keyed by `(f64, node)`. Decrease-key is done by inserting a
//! fresh entry; callers skip stale entries when popping.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueEntry {
    pub key: f64,
    pub node: u32,
    pub stamp: u32,
}

impl QueueEntry {
    #[inline]
    fn less(&self, other: &QueueEntry) -> bool {
        match self.key.total_cmp(&other.key) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => (self.node, self.stamp) < (other.node, other.stamp),
        }
    }
}

const ARITY: usize = 4;

#[derive(Debug, Default, Clone)]
pub struct QuadHeap {
    data: Vec<QueueEntry>,
}

impl QuadHeap {
    pub fn new() -> Self {
        QuadHeap { data: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn peek(&self) -> Option<&QueueEntry> {
        self.data.first()
    }

    pub fn push(&mut self, key: f64, node: u32, stamp: u32) {
        self.data.push(QueueEntry { key, node, stamp });
        let mut i = self.data.len() - 1;
        while i > 0 {
            let parent = (i - 1) / ARITY;
            if self.data[i].less(&self.data[parent]) {
                self.data.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    pub fn pop(&mut self) -> Option<QueueEntry> {
        let len = self.data.len();
        if len == 0 {
            return None;
        }
        self.data.swap(0, len - 1);
        let top = self.data.pop();
        let len = self.data.len();
        let mut i = 0;
        loop {
            let first = i * ARITY + 1;
            if first >= len {
                break;
            }
            let mut best = first;
            for c in first + 1..(first + ARITY).min(len) {
                if self.data[c].less(&self.data[best]) {
                    best = c;
                }
            }
            if self.data[best].less(&self.data[i]) {
                self.data.swap(i, best);
                i = best;
            } else {
                break;
            }
        }
        top
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pops_in_sorted_order(keys in proptest::collection::vec((0.0f64..1e6, 0u32..50), 0..200)) {
            let mut heap = QuadHeap::new();
            for &(k, n) in &keys {
                heap.push(k, n, 0);
            }
            let mut expected = keys.clone();
            expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let popped: Vec<(f64, u32)> = std::iter::from_fn(|| heap.pop()).map(|e| (e.key, e.node)).collect();
            prop_assert_eq!(popped, expected);
        }
    }
}
