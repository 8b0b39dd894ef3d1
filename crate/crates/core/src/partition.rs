//! Union-find and partitions stored as class labels.

use crate::bitset::BitSet;

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns true if they were distinct.
    /// The smaller root survives, so roots are always class minima.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u32;
        true
    }

    /// Label of each element: the smallest member of its class.
    pub fn labels(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|x| self.find(x)).collect()
    }
}

/// An equivalence relation on `{0, .., n-1}` given by canonical labels, with
/// class members stored contiguously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<u32>,
    starts: Vec<u32>,
    members: Vec<u32>,
    class_of: Vec<u32>,
}

impl Partition {
    /// Builds from labels where `labels[x]` is any class representative.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut class_index = vec![u32::MAX; n];
        let mut class_of = vec![0u32; n];
        let mut count = 0u32;
        for x in 0..n {
            let l = labels[x];
            if class_index[l] == u32::MAX {
                class_index[l] = count;
                count += 1;
            }
            class_of[x] = class_index[l];
        }
        let mut sizes = vec![0u32; count as usize + 1];
        for &c in &class_of {
            sizes[c as usize + 1] += 1;
        }
        for i in 1..sizes.len() {
            sizes[i] += sizes[i - 1];
        }
        let starts = sizes.clone();
        let mut fill = sizes;
        let mut members = vec![0u32; n];
        for x in 0..n {
            let c = class_of[x] as usize;
            members[fill[c] as usize] = x as u32;
            fill[c] += 1;
        }
        let labels = class_of
            .iter()
            .map(|&c| members[starts[c as usize] as usize])
            .collect();
        Partition {
            labels,
            starts,
            members,
            class_of,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.starts.len() - 1
    }

    /// Smallest member of the class of `x`.
    #[inline]
    pub fn label(&self, x: usize) -> usize {
        self.labels[x] as usize
    }

    #[inline]
    pub fn class_index(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    #[inline]
    pub fn same(&self, x: usize, y: usize) -> bool {
        self.labels[x] == self.labels[y]
    }

    /// Members of class number `c`, ascending.
    pub fn class(&self, c: usize) -> &[u32] {
        &self.members[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Members of the class containing `x`.
    pub fn class_of_elem(&self, x: usize) -> &[u32] {
        self.class(self.class_index(x))
    }

    /// Union of the classes meeting `set`.
    pub fn image(&self, set: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.len());
        for x in set.iter() {
            if !out.contains(x) {
                for &y in self.class_of_elem(x) {
                    out.insert(y as usize);
                }
            }
        }
        out
    }

    /// Common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        let mut seen = rustc_hash::FxHashMap::default();
        let labels: Vec<usize> = (0..self.len())
            .map(|x| *seen.entry((self.labels[x], other.labels[x])).or_insert(x))
            .collect();
        Partition::from_labels(&labels)
    }

    pub fn to_relation(&self) -> crate::relations::BinRel {
        let labels: Vec<usize> = self.labels.iter().map(|&l| l as usize).collect();
        crate::relations::BinRel::from_labels(&labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_keeps_minimum_roots() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(3, 1));
        assert!(uf.union(4, 3));
        assert!(!uf.union(1, 4));
        assert_eq!(uf.labels(), vec![0, 1, 2, 1, 1]);
    }

    #[test]
    fn partition_classes() {
        let p = Partition::from_labels(&[0, 1, 0, 1, 4]);
        assert_eq!(p.class_count(), 3);
        assert_eq!(p.class_of_elem(2), &[0, 2]);
        assert!(p.same(1, 3));
        let q = Partition::from_labels(&[0, 0, 0, 3, 3]);
        let m = p.meet(&q);
        assert_eq!(m.class_count(), 4);
        assert!(m.same(0, 2));
        assert!(!m.same(1, 3));
    }
}
