//! Plane matching of size at least n/5 whose longest edge is no longer than
//! that of an optimal bottleneck plane perfect matching.

use crate::blossom::bottleneck_crossing;
use crate::error::{Error, Result};
use crate::geometry::{PointId, PointSet, SqLen};
use crate::matching::Matching;
use crate::proximity::{emst5, forest_leq, Forest, KnnIndex, Tree, WeightedEdge};
use crate::udg_matching::{peel_tree, PeelLimits};

/// A leaf `p` of tree `tree` and a partner `p_prime` in the same tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTriple {
    pub p: PointId,
    pub p_prime: PointId,
    pub tree: usize,
}

#[derive(Debug, Clone)]
pub struct CriticalEdgeResult {
    pub edge: WeightedEdge,
    pub forest: Forest,
    pub seeds: Vec<SeedTriple>,
}

/// Two smallest leaves sharing a node, taking the node with smallest id.
fn leaf_pair(tree: &Tree) -> Option<(usize, usize, usize)> {
    for v in 0..tree.len() {
        let mut leaves = tree.adj[v].iter().copied().filter(|&u| tree.adj[u].len() == 1);
        if let (Some(a), Some(b)) = (leaves.next(), leaves.next()) {
            return Some((v, a, b));
        }
    }
    None
}

/// Tests a threshold against the optimum: `None` certifies that `lambda` is
/// below the optimal bottleneck, otherwise one seed per tree that has two
/// leaves on a common node.
pub fn compare_to_opt(pts: &PointSet, mst: &Tree, lambda: SqLen, index: &KnnIndex) -> Result<Option<Vec<SeedTriple>>> {
    if pts.len() % 2 == 1 {
        return Err(Error::OddPointCount(pts.len()));
    }
    let forest = forest_leq(mst, lambda);
    seeds_for(pts, &forest, index)
}

fn seeds_for(pts: &PointSet, forest: &Forest, index: &KnnIndex) -> Result<Option<Vec<SeedTriple>>> {
    let mut seeds = Vec::new();
    for (i, t) in forest.trees.iter().enumerate() {
        if t.len() % 2 == 1 {
            return Ok(None);
        }
        let Some((v, a, b)) = leaf_pair(t) else { continue };
        let (v, p, q) = (t.verts[v], t.verts[a], t.verts[b]);
        let pp = index.second_closest(p, v)?;
        let qq = index.second_closest(q, v)?;
        let (s, s2) = if pts.sq_dist(p, pp) <= pts.sq_dist(q, qq) { (p, pp) } else { (q, qq) };
        if t.local(s2).is_none() {
            return Ok(None);
        }
        seeds.push(SeedTriple { p: s, p_prime: s2, tree: i });
    }
    Ok(Some(seeds))
}

/// Binary search over the distinct EMST edge lengths for the shortest one
/// at which [`compare_to_opt`] does not fail.
pub fn critical_edge(pts: &PointSet) -> Result<CriticalEdgeResult> {
    let n = pts.len();
    if n % 2 == 1 {
        return Err(Error::OddPointCount(n));
    }
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mst = emst5(pts)?;
    critical_edge_on(pts, &mst, &KnnIndex::new(pts))
}

fn critical_edge_on(pts: &PointSet, mst: &Tree, index: &KnnIndex) -> Result<CriticalEdgeResult> {
    let mut edges = mst.edges.clone();
    edges.sort_unstable_by_key(|e| e.kruskal_key());
    let mut lengths: Vec<SqLen> = edges.iter().map(|e| e.sq).collect();
    lengths.dedup();
    // invariant: the test fails below `lo` (all singletons are odd) and
    // passes at `hi` (the whole tree is one even component)
    let mut lo: isize = -1;
    let mut hi = lengths.len() - 1;
    let mut found = None;
    while hi as isize - lo > 1 {
        let mid = ((lo + hi as isize) / 2) as usize;
        let forest = forest_leq(mst, lengths[mid]);
        match seeds_for(pts, &forest, index)? {
            Some(seeds) => {
                hi = mid;
                found = Some((forest, seeds));
            }
            None => lo = mid as isize,
        }
    }
    let (forest, seeds) = match found {
        Some(f) => f,
        None => {
            let forest = forest_leq(mst, lengths[hi]);
            let seeds = seeds_for(pts, &forest, index)?
                .ok_or_else(|| Error::InvariantViolation("full tree rejected".into()))?;
            (forest, seeds)
        }
    };
    let edge = *edges.iter().find(|e| e.sq == lengths[hi]).unwrap();
    Ok(CriticalEdgeResult { edge, forest, seeds })
}

/// Which rule produced a tree's matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstCase {
    /// Some peeled node had degree at most four.
    LowDegree,
    /// Some peeled node had two leaves at exactly π/3.
    Equilateral,
    /// Seeded with a leaf partner; peeling avoided the seed edge.
    SeededLeaf,
    /// Seeded with an inner partner; the tree was split at it.
    SeededSplit,
}

/// Matches one even tree of the forest; see [`FirstCase`] for the rules.
pub fn match_tree_first(pts: &PointSet, tree: &Tree, seed: Option<SeedTriple>) -> Result<(Matching, FirstCase)> {
    let plain = peel_tree(pts, tree, PeelLimits::default());
    if plain.min_degree.is_none_or(|d| d <= 4) {
        return Ok((Matching::from_pairs(pts, plain.pairs)?, FirstCase::LowDegree));
    }
    if plain.equilateral {
        return Ok((Matching::from_pairs(pts, plain.pairs)?, FirstCase::Equilateral));
    }
    let Some(seed) = seed else {
        return Err(Error::SeedRequired(tree.verts[0]));
    };
    let (p, q) = (seed.p, seed.p_prime);
    let mut m = Matching::empty();
    m.push(pts, p, q)?;
    let limits = PeelLimits { forbidden: &[p, q], blocker: Some((p, q)) };
    if tree.degree(q) == 1 {
        let run = peel_tree(pts, tree, limits);
        for (a, b) in run.pairs {
            m.push(pts, a, b)?;
        }
        return Ok((m, FirstCase::SeededLeaf));
    }
    let rest: Vec<PointId> = tree.verts.iter().copied().filter(|&v| v != p && v != q).collect();
    let kept: Vec<WeightedEdge> =
        tree.edges.iter().filter(|e| ![e.a, e.b].iter().any(|&x| x == p || x == q)).copied().collect();
    let parts = Forest::from_edges(&rest, &kept, SqLen::ZERO);
    for sub in &parts.trees {
        for (a, b) in peel_tree(pts, sub, limits).pairs {
            m.push(pts, a, b)?;
        }
    }
    Ok((m, FirstCase::SeededSplit))
}

fn union_over(pts: &PointSet, forest: &Forest, seeds: &[SeedTriple]) -> Result<Matching> {
    let mut out = Matching::empty();
    for (i, t) in forest.trees.iter().enumerate() {
        let seed = seeds.iter().copied().find(|s| s.tree == i);
        let (m, _) = match_tree_first(pts, t, seed)?;
        out.extend(pts, &m)?;
    }
    Ok(out)
}

/// Plane matching with at least n/5 edges and bottleneck at most the
/// optimal plane perfect bottleneck, via the critical EMST edge.
pub fn first_approx(pts: &PointSet) -> Result<Matching> {
    let ce = critical_edge(pts)?;
    union_over(pts, &ce.forest, &ce.seeds)
}

/// Same construction seeded from a crossing bottleneck perfect matching:
/// the forest is cut at its bottleneck and each tree is seeded with a
/// matched leaf pair.
pub fn first_approx_crossing(pts: &PointSet) -> Result<Matching> {
    let n = pts.len();
    if n % 2 == 1 {
        return Err(Error::OddPointCount(n));
    }
    let bc = bottleneck_crossing(pts)?;
    let mst = emst5(pts)?;
    let forest = forest_leq(&mst, bc.bottleneck);
    let mut seeds = Vec::new();
    for (i, t) in forest.trees.iter().enumerate() {
        let is_leaf = |v: PointId| t.degree(v) == 1;
        let mut pairs: Vec<_> = bc.matching.pairs().to_vec();
        pairs.sort_unstable();
        if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| t.local(a).is_some() && is_leaf(a) && is_leaf(b)) {
            seeds.push(SeedTriple { p: a, p_prime: b, tree: i });
        }
    }
    union_over(pts, &forest, &seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::validate;

    fn ps(c: &[(f64, f64)]) -> PointSet {
        PointSet::from_f64(c)
    }

    fn star(r: f64) -> PointSet {
        let mut c = vec![(0.0, 0.0)];
        for k in 0..5 {
            let a = 2.0 * std::f64::consts::PI / 5.0 * k as f64;
            c.push((r * a.cos(), r * a.sin()));
        }
        ps(&c)
    }

    #[test]
    fn compare_examples() {
        let p = ps(&[(0., 0.), (1., 0.), (10., 0.), (11., 0.)]);
        let mst = emst5(&p).unwrap();
        let idx = KnnIndex::new(&p);
        assert_eq!(compare_to_opt(&p, &mst, SqLen::from_len(0.5), &idx).unwrap(), None);
        assert_eq!(compare_to_opt(&p, &mst, SqLen::from_len(1.0), &idx).unwrap(), Some(vec![]));

        let s = star(1.0);
        let mst = emst5(&s).unwrap();
        let idx = KnnIndex::new(&s);
        let l = compare_to_opt(&s, &mst, mst.max_edge(), &idx).unwrap().unwrap();
        assert_eq!(l.len(), 1);
        // the partner of a leaf, with the center excluded, is a neighbouring leaf
        let (a, b) = (l[0].p, l[0].p_prime);
        assert!((1..=5).contains(&a) && (1..=5).contains(&b));
        assert!(b == a % 5 + 1 || a == b % 5 + 1);
    }

    #[test]
    fn critical_examples() {
        let line = ps(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        assert_eq!(critical_edge(&line).unwrap().edge.sq, SqLen::from_len(1.0));
        let gap = ps(&[(0., 0.), (1., 0.), (10., 0.), (11., 0.)]);
        assert_eq!(critical_edge(&gap).unwrap().edge.sq, SqLen::from_len(1.0));
        let sq = ps(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        assert_eq!(critical_edge(&sq).unwrap().edge.sq, SqLen::from_len(1.0));
        assert_eq!(critical_edge(&ps(&[(0., 0.), (1., 0.), (2., 0.)])).unwrap_err(), Error::OddPointCount(3));
    }

    #[test]
    fn tree_first_examples() {
        let line = ps(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        let t = emst5(&line).unwrap();
        let (m, case) = match_tree_first(&line, &t, None).unwrap();
        assert_eq!(m.sorted().pairs(), &[(0, 1), (2, 3)]);
        assert_eq!(case, FirstCase::LowDegree);

        let s = star(1.0);
        let t = emst5(&s).unwrap();
        assert_eq!(match_tree_first(&s, &t, None).unwrap_err(), Error::SeedRequired(0));
        let seed = SeedTriple { p: 1, p_prime: 2, tree: 0 };
        let (m, case) = match_tree_first(&s, &t, Some(seed)).unwrap();
        assert_eq!(case, FirstCase::SeededLeaf);
        assert_eq!(m.len(), 2);
        assert!(validate(&s, &m).unwrap().is_plane);
    }

    #[test]
    fn first_approx_examples() {
        let sq = ps(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        let m = first_approx(&sq).unwrap();
        assert!(!m.is_empty() && m.bottleneck() <= SqLen::from_len(1.0));
        assert!(validate(&sq, &m).unwrap().is_plane);

        let line = ps(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        assert_eq!(first_approx(&line).unwrap().sorted().pairs(), &[(0, 1), (2, 3)]);

        let c: Vec<(f64, f64)> = (0..4).flat_map(|i| (0..2).map(move |j| (i as f64, j as f64))).collect();
        let grid = ps(&c);
        let m = first_approx(&grid).unwrap();
        assert!(m.len() >= 2 && m.bottleneck() <= SqLen::from_len(1.0));
        let m = first_approx_crossing(&grid).unwrap();
        assert!(m.len() >= 2 && m.bottleneck() <= SqLen::from_len(1.0));
    }
}
