/// Complete binary tree of non-negative weights stored in a flat array.
///
/// Leaves live at `[cap, 2 cap)`; every internal node is recomputed from its
/// children on update, so sums do not drift.
#[derive(Clone, Debug)]
pub struct SumTree {
    cap: usize,
    len: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(len: usize) -> Self {
        let cap = len.max(1).next_power_of_two();
        Self {
            cap,
            len,
            nodes: vec![0.0; 2 * cap],
        }
    }

    pub fn from_weights(weights: &[f64]) -> Self {
        let mut tree = Self::new(weights.len());
        tree.nodes[tree.cap..tree.cap + weights.len()].copy_from_slice(weights);
        for i in (1..tree.cap).rev() {
            tree.nodes[i] = tree.nodes[2 * i] + tree.nodes[2 * i + 1];
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.nodes[self.cap + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(i < self.len && w >= 0.0);
        let mut k = self.cap + i;
        self.nodes[k] = w;
        k /= 2;
        while k >= 1 {
            self.nodes[k] = self.nodes[2 * k] + self.nodes[2 * k + 1];
            k /= 2;
        }
    }

    /// Sets `weights.len()` consecutive leaves starting at `first` and
    /// refreshes their ancestors in one upward pass.
    #[inline]
    pub fn set_run(&mut self, first: usize, weights: &[f64]) {
        debug_assert!(first + weights.len() <= self.len);
        let base = self.cap + first;
        self.nodes[base..base + weights.len()].copy_from_slice(weights);
        let (mut a, mut b) = (base / 2, (base + weights.len() - 1) / 2);
        while a >= 1 {
            for k in a..=b {
                self.nodes[k] = self.nodes[2 * k] + self.nodes[2 * k + 1];
            }
            a /= 2;
            b /= 2;
        }
    }

    /// Leaf `i` with `prefix(i) <= u < prefix(i) + w_i`, and `u - prefix(i)`.
    ///
    /// `u` must lie in `[0, total)`. If rounding lands on an empty leaf the
    /// nearest non-empty leaf to its left is returned.
    #[inline]
    pub fn find(&self, mut u: f64) -> (usize, f64) {
        let nodes = self.nodes.as_slice();
        let mut k = 1;
        while k < self.cap {
            let left = nodes[2 * k];
            if u < left {
                k *= 2;
            } else {
                u -= left;
                k = 2 * k + 1;
            }
        }
        let mut i = k - self.cap;
        if nodes[k] <= 0.0 {
            while i > 0 && nodes[self.cap + i] <= 0.0 {
                i -= 1;
            }
            return (i, nodes[self.cap + i]);
        }
        (i, u.clamp(0.0, nodes[k]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_matches_linear_scan() {
        let w = [0.5, 0.0, 2.0, 1.5, 0.0, 3.0, 0.25];
        let tree = SumTree::from_weights(&w);
        assert!((tree.total() - 7.25).abs() < 1e-15);
        let mut u = 0.0;
        while u < 7.25 {
            let mut acc = 0.0;
            let mut expect = 0;
            for (i, &x) in w.iter().enumerate() {
                if u < acc + x {
                    expect = i;
                    break;
                }
                acc += x;
            }
            let (i, r) = tree.find(u);
            assert_eq!(i, expect, "u = {u}");
            assert!((r - (u - acc)).abs() < 1e-12);
            u += 0.01;
        }
    }

    #[test]
    fn update_keeps_sums() {
        let mut tree = SumTree::new(5);
        for i in 0..5 {
            tree.set(i, i as f64);
        }
        assert_eq!(tree.total(), 10.0);
        tree.set(4, 0.0);
        assert_eq!(tree.total(), 6.0);
        assert_eq!(tree.find(5.999).0, 3);
        assert_eq!(tree.find(6.0).0, 3);
        tree.set_run(1, &[2.0, 0.5, 0.0]);
        assert_eq!(tree.total(), 2.5);
        assert_eq!(tree.find(2.2).0, 2);
    }
}
