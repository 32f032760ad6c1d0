use alloc::vec::Vec;

/// Fenwick tree over non-negative weights supporting point updates and
/// sampling an index proportionally to its weight.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl Fenwick {
    pub fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        let mut tree = alloc::vec![0.0; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            // children of k are already folded in, so tree[k] is complete here
            let k = i + 1;
            tree[k] += w;
            let parent = k + (k & k.wrapping_neg());
            if parent <= n {
                let v = tree[k];
                tree[parent] += v;
            }
        }
        Fenwick {
            tree,
            weights: weights.to_vec(),
        }
    }

    pub fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    pub fn total(&self) -> f64 {
        let mut k = self.weights.len();
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Index `i` with `prefix(i) <= target < prefix(i + 1)`, restricted to
    /// positive weights so rounding never selects an empty slot.
    pub fn find(&self, target: f64) -> Option<usize> {
        let n = self.weights.len();
        if n == 0 {
            return None;
        }
        let mut pos = 0;
        let mut rem = target;
        let mut step = 1usize << (usize::BITS - 1 - n.leading_zeros());
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        let idx = pos.min(n - 1);
        if self.weights[idx] > 0.0 {
            return Some(idx);
        }
        // rounding at the boundary: take the nearest slot that still carries weight
        (0..idx)
            .rev()
            .chain(idx + 1..n)
            .find(|&i| self.weights[i] > 0.0)
    }
}
