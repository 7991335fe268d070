//! Brute-force ground truth for small instances.

use crate::error::{Error, Result};
use crate::geometry::{crosses, PointId, PointSet, SqLen};
use crate::matching::Matching;
use crate::proximity::DiskGraph;

/// Largest instance the enumerating oracles accept.
pub const ORACLE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub bottleneck: SqLen,
    pub matching: Matching,
    /// Number of complete perfect matchings reached by the search.
    pub explored: u64,
}

struct Search<'a> {
    pts: &'a PointSet,
    mate: Vec<Option<PointId>>,
    stack: Vec<(PointId, PointId)>,
    best: Option<(SqLen, Vec<(PointId, PointId)>)>,
    explored: u64,
}

impl Search<'_> {
    fn crosses_any(&self, a: PointId, b: PointId) -> bool {
        let (pa, pb) = (self.pts.p(a), self.pts.p(b));
        self.stack.iter().any(|&(c, d)| crosses(pa, pb, self.pts.p(c), self.pts.p(d)))
    }

    fn run(&mut self, worst: SqLen) {
        let Some(i) = self.mate.iter().position(Option::is_none) else {
            self.explored += 1;
            self.best = Some((worst, self.stack.clone()));
            return;
        };
        for j in i + 1..self.mate.len() {
            if self.mate[j].is_some() {
                continue;
            }
            let d = self.pts.sq_dist(i, j);
            if let Some((b, _)) = &self.best {
                if d.max(worst) >= *b {
                    continue;
                }
            }
            if self.crosses_any(i, j) {
                continue;
            }
            self.mate[i] = Some(j);
            self.mate[j] = Some(i);
            self.stack.push((i, j));
            self.run(d.max(worst));
            self.stack.pop();
            self.mate[i] = None;
            self.mate[j] = None;
        }
    }
}

/// Exact bottleneck plane perfect matching by enumeration: always match the
/// lowest unmatched point, partners in ascending order, pruning crossings
/// and branches no better than the incumbent. Among optima the
/// lexicographically least matching is returned.
pub fn exact_bottleneck_plane(pts: &PointSet) -> Result<OracleResult> {
    let n = pts.len();
    if n % 2 == 1 {
        return Err(Error::OddPointCount(n));
    }
    if n > ORACLE_LIMIT {
        return Err(Error::InstanceTooLarge { n, limit: ORACLE_LIMIT });
    }
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 2, got: 0 });
    }
    let mut s = Search { pts, mate: vec![None; n], stack: Vec::new(), best: None, explored: 0 };
    s.run(SqLen::ZERO);
    let explored = s.explored;
    let (bottleneck, pairs) = s.best.ok_or(Error::NoPlanePerfectMatching)?;
    Ok(OracleResult { bottleneck, matching: Matching::from_pairs(pts, pairs)?, explored })
}

/// Maximum-cardinality non-crossing matching using only edges of `g`.
pub fn exact_max_plane_matching(g: &DiskGraph, pts: &PointSet) -> Result<Matching> {
    let n = g.len();
    if n > ORACLE_LIMIT {
        return Err(Error::InstanceTooLarge { n, limit: ORACLE_LIMIT });
    }
    if n != pts.len() {
        return Err(Error::BadParameters("graph and point set differ in size".into()));
    }
    struct B<'a> {
        g: &'a DiskGraph,
        pts: &'a PointSet,
        free: Vec<bool>,
        cur: Vec<(PointId, PointId)>,
        best: Vec<(PointId, PointId)>,
    }
    impl B<'_> {
        fn bound(&self, from: usize) -> usize {
            let open = (from..self.free.len())
                .filter(|&v| self.free[v] && self.g.adj[v].iter().any(|&u| self.free[u]))
                .count();
            self.cur.len() + open / 2
        }

        fn run(&mut self, from: usize) {
            if self.cur.len() > self.best.len() {
                self.best = self.cur.clone();
            }
            let Some(v) = (from..self.free.len()).find(|&v| self.free[v]) else { return };
            if self.bound(v) <= self.best.len() {
                return;
            }
            for k in 0..self.g.adj[v].len() {
                let u = self.g.adj[v][k];
                if u < v || !self.free[u] {
                    continue;
                }
                let (pv, pu) = (self.pts.p(v), self.pts.p(u));
                if self.cur.iter().any(|&(a, b)| crosses(pv, pu, self.pts.p(a), self.pts.p(b))) {
                    continue;
                }
                self.free[v] = false;
                self.free[u] = false;
                self.cur.push((v, u));
                self.run(v + 1);
                self.cur.pop();
                self.free[v] = true;
                self.free[u] = true;
            }
            // leave v unmatched
            self.free[v] = false;
            self.run(v + 1);
            self.free[v] = true;
        }
    }
    let mut b = B { g, pts, free: vec![true; n], cur: Vec::new(), best: Vec::new() };
    b.run(0);
    Matching::from_pairs(pts, b.best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proximity::disk_graph;

    fn ps(c: &[(f64, f64)]) -> PointSet {
        PointSet::from_f64(c)
    }

    #[test]
    fn square_uses_sides() {
        let p = ps(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        let r = exact_bottleneck_plane(&p).unwrap();
        assert_eq!(r.bottleneck, SqLen::from_len(1.0));
        assert_eq!(r.matching.pairs(), &[(0, 1), (2, 3)]);
    }

    #[test]
    fn two_points() {
        let p = ps(&[(0., 0.), (3., 0.)]);
        let r = exact_bottleneck_plane(&p).unwrap();
        assert_eq!(r.matching.pairs(), &[(0, 1)]);
        assert_eq!(r.bottleneck, SqLen::from_len(3.0));
    }

    #[test]
    fn grid_four_by_two() {
        let c: Vec<(f64, f64)> = (0..4).flat_map(|i| (0..2).map(move |j| (i as f64, j as f64))).collect();
        let r = exact_bottleneck_plane(&ps(&c)).unwrap();
        assert_eq!(r.bottleneck, SqLen::from_len(1.0));
    }

    #[test]
    fn guards() {
        assert_eq!(exact_bottleneck_plane(&ps(&[(0., 0.), (1., 0.), (2., 0.)])).unwrap_err(), Error::OddPointCount(3));
        let big: Vec<(f64, f64)> = (0..18).map(|i| (i as f64, (i * i % 7) as f64)).collect();
        assert!(matches!(exact_bottleneck_plane(&ps(&big)), Err(Error::InstanceTooLarge { .. })));
    }

    #[test]
    fn max_plane_examples() {
        let mut c = vec![(0.0, 0.0)];
        for k in 0..5 {
            let a = 2.0 * std::f64::consts::PI / 5.0 * k as f64;
            c.push((a.cos(), a.sin()));
        }
        // rounded spokes are within 1e-6 of unit length; the rim is ≈1.176
        let star = ps(&c);
        let g = disk_graph(&star, SqLen::from_len(1.000001));
        assert_eq!(exact_max_plane_matching(&g, &star).unwrap().len(), 1);

        let line = ps(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        let g = disk_graph(&line, SqLen::from_len(1.0));
        assert_eq!(exact_max_plane_matching(&g, &line).unwrap().len(), 2);

        let sq = ps(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        let g = disk_graph(&sq, SqLen::from_len(1.0));
        assert_eq!(exact_max_plane_matching(&g, &sq).unwrap().len(), 2);
    }
}
