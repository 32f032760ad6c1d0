use alloc::vec::Vec;

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: alloc::vec![1; n],
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Component label of every vertex, numbered by first appearance.
    pub fn labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut by_root = alloc::vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|v| {
                let r = self.find(v);
                if by_root[r] == usize::MAX {
                    by_root[r] = next;
                    next += 1;
                }
                by_root[r]
            })
            .collect()
    }
}
