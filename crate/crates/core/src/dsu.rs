//! Disjoint-set forests.

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` when `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

/// Union-find without path compression so that unions can be undone in
/// LIFO order. Used by the depth-first state enumerators.
#[derive(Debug, Clone)]
pub struct RollbackSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
    history: Vec<Option<(usize, usize, bool)>>,
}

impl RollbackSets {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n], sets: n, history: Vec::new() }
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Always pushes one history entry, even for a no-op union.
    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.history.push(None);
            return;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        let bumped = self.rank[ra] == self.rank[rb];
        self.parent[rb] = ra;
        if bumped {
            self.rank[ra] += 1;
        }
        self.sets -= 1;
        self.history.push(Some((ra, rb, bumped)));
    }

    pub fn undo(&mut self) {
        if let Some((ra, rb, bumped)) = self.history.pop().expect("undo without union") {
            self.parent[rb] = rb;
            if bumped {
                self.rank[ra] -= 1;
            }
            self.sets += 1;
        }
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_counts_sets() {
        let mut d = DisjointSets::new(5);
        assert!(d.union(0, 1));
        assert!(d.union(3, 4));
        assert!(!d.union(1, 0));
        assert_eq!(d.set_count(), 3);
        assert!(d.same(3, 4));
        assert!(!d.same(2, 4));
    }

    #[test]
    fn rollback_restores_state() {
        let mut d = RollbackSets::new(4);
        d.union(0, 1);
        d.union(1, 0);
        d.union(2, 3);
        assert_eq!(d.set_count(), 2);
        d.undo();
        assert_eq!(d.set_count(), 3);
        d.undo();
        assert_eq!(d.find(0), d.find(1));
        d.undo();
        assert_eq!(d.set_count(), 4);
        assert_ne!(d.find(0), d.find(1));
    }
}
