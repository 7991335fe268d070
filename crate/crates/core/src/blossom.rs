//! Maximum-cardinality matching in general graphs (Edmonds' blossom
//! algorithm) and the possibly crossing bottleneck perfect matching.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::{PointSet, SqLen};
use crate::matching::Matching;
use crate::proximity::{disk_graph, KnnIndex};

const NONE: usize = usize::MAX;

/// Simple undirected graph without geometry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AbstractGraph {
    pub adj: Vec<Vec<usize>>,
}

impl AbstractGraph {
    pub fn new(n: usize) -> Self {
        AbstractGraph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = AbstractGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b && !self.adj[a].contains(&b) {
            self.adj[a].push(b);
            self.adj[b].push(a);
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }
}

struct Edmonds<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Edmonds<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Returns the free endpoint of an augmenting path from `root`, if any.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for k in 0..self.adj[v].len() {
                let to = self.adj[v][k];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// Maximum-cardinality matching as sorted pairs `(a, b)` with `a < b`.
pub fn max_matching(g: &AbstractGraph) -> Vec<(usize, usize)> {
    let n = g.len();
    let mut e = Edmonds {
        adj: &g.adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    for v in 0..n {
        if e.mate[v] == NONE {
            if let Some(&u) = g.adj[v].iter().find(|&&u| e.mate[u] == NONE) {
                e.mate[v] = u;
                e.mate[u] = v;
            }
        }
    }
    for v in 0..n {
        if e.mate[v] == NONE {
            if let Some(end) = e.find_path(v) {
                e.augment(end);
            }
        }
    }
    (0..n).filter(|&v| e.mate[v] != NONE && v < e.mate[v]).map(|v| (v, e.mate[v])).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottleneckCrossingResult {
    pub bottleneck: SqLen,
    pub matching: Matching,
}

fn perfect_at(pts: &PointSet, lambda: SqLen) -> Option<Vec<(usize, usize)>> {
    let dg = disk_graph(pts, lambda);
    let g = AbstractGraph { adj: dg.adj };
    let m = max_matching(&g);
    (2 * m.len() == pts.len()).then_some(m)
}

/// Bottleneck perfect matching with crossings allowed: the smallest
/// pairwise distance at which the disk graph has a perfect matching, found
/// by binary search over the sorted distinct distances.
pub fn bottleneck_crossing(pts: &PointSet) -> Result<BottleneckCrossingResult> {
    let n = pts.len();
    if n % 2 == 1 {
        return Err(Error::OddPointCount(n));
    }
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 2, got: 0 });
    }
    // every point needs a partner, so the answer is at least the largest
    // nearest-neighbour distance
    let index = KnnIndex::new(pts);
    let floor = (0..n)
        .map(|i| pts.sq_dist(i, index.nearest_excluding(pts.p(i), &[i]).unwrap()))
        .max()
        .unwrap();
    let mut d: Vec<SqLen> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let s = pts.sq_dist(i, j);
            if s >= floor {
                d.push(s);
            }
        }
    }
    d.sort_unstable();
    d.dedup();
    let (mut lo, mut hi) = (0usize, d.len() - 1);
    let mut witness = perfect_at(pts, d[hi]).expect("complete graph has a perfect matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_at(pts, d[mid]) {
            Some(m) => {
                hi = mid;
                witness = m;
            }
            None => lo = mid + 1,
        }
    }
    let matching = Matching::from_pairs(pts, witness)?;
    Ok(BottleneckCrossingResult { bottleneck: d[hi], matching })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs() {
        assert_eq!(max_matching(&AbstractGraph::from_edges(3, &[(0, 1), (1, 2)])).len(), 1);
        assert_eq!(max_matching(&AbstractGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])).len(), 2);
        assert!(max_matching(&AbstractGraph::new(5)).is_empty());
    }

    #[test]
    fn odd_cycle_blossom() {
        // triangle with a pendant path forces a blossom contraction
        let g = AbstractGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (0, 4), (4, 5)]);
        assert_eq!(max_matching(&g).len(), 3);
    }

    #[test]
    fn petersen() {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        assert_eq!(max_matching(&AbstractGraph::from_edges(10, &e)).len(), 5);
    }

    #[test]
    fn crossing_bottleneck_examples() {
        let line = PointSet::from_f64(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        assert_eq!(bottleneck_crossing(&line).unwrap().bottleneck, SqLen::from_len(1.0));
        let sq = PointSet::from_f64(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        assert_eq!(bottleneck_crossing(&sq).unwrap().bottleneck, SqLen::from_len(1.0));
        let two = PointSet::from_f64(&[(0., 0.), (3., 0.)]);
        let r = bottleneck_crossing(&two).unwrap();
        assert_eq!(r.bottleneck, SqLen::from_len(3.0));
        assert_eq!(r.matching.pairs(), &[(0, 1)]);
        assert_eq!(
            bottleneck_crossing(&PointSet::from_f64(&[(0., 0.), (1., 0.), (2., 0.)])).unwrap_err(),
            Error::OddPointCount(3)
        );
    }
}
