//! Plane matchings in unit disk graphs: edge rotation with a three-way
//! direction partition, and leaf peeling on a degree-five EMST.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::{angle_le_third_pi, crosses, is_equilateral, Point, PointId, PointSet, SqLen, SCALE};
use crate::matching::{crossing_pairs, Matching};
use crate::proximity::{emst5, Tree};

/// One rotation: two crossing edges replaced by two shorter ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationStep {
    pub replaced: [(PointId, PointId); 2],
    pub introduced: [(PointId, PointId); 2],
    pub total_before: f64,
    pub total_after: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RotationTrace {
    pub steps: Vec<RotationStep>,
}

impl RotationTrace {
    pub fn strictly_decreasing(&self) -> bool {
        self.steps.iter().all(|s| s.total_after < s.total_before)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneThirdResult {
    pub matching: Matching,
    pub trace: RotationTrace,
    /// Set when the rotation cap fired and crossings were removed greedily.
    pub capped: Option<Error>,
}

fn total_length(pts: &PointSet, edges: &[(PointId, PointId)]) -> f64 {
    edges.iter().map(|&(a, b)| pts.sq_dist(a, b).length()).sum()
}

fn norm(a: PointId, b: PointId) -> (PointId, PointId) {
    (a.min(b), a.max(b))
}

/// Direction class of the segment `a→b` by its angle in `[0, π)`:
/// 0 for `[0, π/3)`, 1 for `[π/3, 2π/3)`, 2 for `[2π/3, π)`.
pub fn direction_class(a: Point, b: Point) -> usize {
    let (mut dx, mut dy) = (b.x as i128 - a.x as i128, b.y as i128 - a.y as i128);
    if dy < 0 || (dy == 0 && dx < 0) {
        dx = -dx;
        dy = -dy;
    }
    if dy == 0 || (dx > 0 && dy * dy < 3 * dx * dx) {
        0
    } else if dx > 0 || dy * dy > 3 * dx * dx {
        1
    } else {
        2
    }
}

/// Default rotation cap for a matching with `m` edges.
pub fn default_cap(m: usize) -> u64 {
    let k = (2 * m).max(1) as u64;
    10u64.saturating_mul(k.saturating_pow(3))
}

/// Rotates crossing pairs whose smallest intersection angle is at most π/3
/// until none is left, then keeps the largest of the three direction
/// classes.
pub fn one_third(pts: &PointSet, m: &Matching, cap: Option<u64>) -> Result<OneThirdResult> {
    for &(a, b) in m.pairs() {
        pts.check_ids(&[a, b])?;
    }
    let cap = cap.unwrap_or_else(|| default_cap(m.len()));
    let mut edges: Vec<(PointId, PointId)> = m.pairs().to_vec();
    edges.sort_unstable();
    let mut trace = RotationTrace::default();
    let mut capped = None;
    loop {
        let mut rotated = false;
        for (i, j) in crossing_pairs(pts, &edges) {
            let ((p, q), (r, s)) = (edges[i], edges[j]);
            let (pp, pq, pr, ps) = (pts.p(p), pts.p(q), pts.p(r), pts.p(s));
            // angle between p−q and r−s, as seen at the crossing point
            let d1 = Point::new(pp.x - pq.x, pp.y - pq.y);
            let d2 = Point::new(pr.x - ps.x, pr.y - ps.y);
            let d2r = Point::new(-d2.x, -d2.y);
            let origin = Point::new(0, 0);
            let new = if angle_le_third_pi(d1, origin, d2) {
                [norm(p, r), norm(q, s)]
            } else if angle_le_third_pi(d1, origin, d2r) {
                [norm(p, s), norm(q, r)]
            } else {
                continue;
            };
            if trace.steps.len() as u64 >= cap {
                capped = Some(Error::IterationCapExceeded(cap));
                break;
            }
            let before = total_length(pts, &edges);
            let old = [edges[i], edges[j]];
            edges[i] = new[0];
            edges[j] = new[1];
            edges.sort_unstable();
            let after = total_length(pts, &edges);
            trace.steps.push(RotationStep { replaced: old, introduced: new, total_before: before, total_after: after });
            rotated = true;
            break;
        }
        if !rotated || capped.is_some() {
            break;
        }
    }
    let mut classes: [Vec<(PointId, PointId)>; 3] = Default::default();
    for &(a, b) in &edges {
        classes[direction_class(pts.p(a), pts.p(b))].push((a, b));
    }
    let best = (0..3).max_by_key(|&c| (classes[c].len(), Reverse(c))).unwrap();
    let mut chosen = std::mem::take(&mut classes[best]);
    if !crossing_pairs(pts, &chosen).is_empty() {
        if capped.is_none() {
            return Err(Error::InvariantViolation("crossing edges inside one direction class".into()));
        }
        let mut kept: Vec<(PointId, PointId)> = Vec::new();
        for e in chosen {
            let (a, b) = (pts.p(e.0), pts.p(e.1));
            if !kept.iter().any(|&(c, d)| crosses(a, b, pts.p(c), pts.p(d))) {
                kept.push(e);
            }
        }
        chosen = kept;
    }
    Ok(OneThirdResult { matching: Matching::from_pairs(pts, chosen)?, trace, capped })
}

/// Outcome of one leaf-peeling run over a tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PeelRun {
    pub pairs: Vec<(PointId, PointId)>,
    /// Smallest degree of a peeled skeleton leaf at the time it was peeled.
    pub min_degree: Option<usize>,
    /// An equilateral leaf pair was matched in some iteration.
    pub equilateral: bool,
    /// Iterations in which no admissible leaf was available.
    pub skipped: usize,
}

/// Constraints for a peeling run: vertices that must stay unmatched and a
/// segment that no chosen edge may cross.
#[derive(Debug, Clone, Copy, Default)]
pub struct PeelLimits<'a> {
    pub forbidden: &'a [PointId],
    pub blocker: Option<(PointId, PointId)>,
}

/// Repeatedly takes the skeleton leaf `v` with smallest id, matches it to
/// its smallest admissible leaf and deletes `v` together with its leaves.
/// A final lone edge is matched as well.
pub fn peel_tree(pts: &PointSet, tree: &Tree, limits: PeelLimits<'_>) -> PeelRun {
    let n = tree.len();
    let g = |l: usize| tree.verts[l];
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = tree.adj.iter().map(Vec::len).collect();
    let mut alive_count = n;
    let admissible = |a: PointId, b: PointId| {
        if limits.forbidden.contains(&a) || limits.forbidden.contains(&b) {
            return false;
        }
        match limits.blocker {
            Some((c, d)) => !crosses(pts.p(a), pts.p(b), pts.p(c), pts.p(d)),
            None => true,
        }
    };
    let mut run = PeelRun::default();
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).map(Reverse).collect();
    while let Some(Reverse(v)) = heap.pop() {
        if !alive[v] || alive_count < 3 || deg[v] < 2 {
            continue;
        }
        let inner = tree.adj[v].iter().filter(|&&w| alive[w] && deg[w] >= 2).count();
        if inner > 1 {
            continue;
        }
        let leaves: Vec<usize> = tree.adj[v].iter().copied().filter(|&w| alive[w] && deg[w] == 1).collect();
        let parent = tree.adj[v].iter().copied().find(|&w| alive[w] && deg[w] >= 2);
        run.min_degree = Some(run.min_degree.map_or(deg[v], |d| d.min(deg[v])));

        let mut matched = false;
        if leaves.len() >= 3 {
            // an equilateral leaf pair plus a third leaf gives two edges
            'eq: for (i, &a) in leaves.iter().enumerate() {
                for &b in &leaves[i + 1..] {
                    if !is_equilateral(pts.p(g(v)), pts.p(g(a)), pts.p(g(b))) || !admissible(g(a), g(b)) {
                        continue;
                    }
                    if let Some(&c) = leaves.iter().find(|&&c| c != a && c != b && admissible(g(v), g(c))) {
                        run.pairs.push(norm(g(a), g(b)));
                        run.pairs.push(norm(g(v), g(c)));
                        run.equilateral = true;
                        matched = true;
                        break 'eq;
                    }
                }
            }
        }
        if !matched {
            match leaves.iter().find(|&&u| admissible(g(v), g(u))) {
                Some(&u) => run.pairs.push(norm(g(v), g(u))),
                None => run.skipped += 1,
            }
        }
        for &u in &leaves {
            alive[u] = false;
        }
        alive[v] = false;
        alive_count -= leaves.len() + 1;
        if let Some(w) = parent {
            deg[w] -= 1;
            heap.push(Reverse(w));
            for &x in &tree.adj[w] {
                if alive[x] {
                    heap.push(Reverse(x));
                }
            }
        }
    }
    if alive_count == 2 {
        let rest: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let (a, b) = (g(rest[0]), g(rest[1]));
        if tree.adj[rest[0]].contains(&rest[1]) && admissible(a, b) {
            run.pairs.push(norm(a, b));
        }
    }
    run
}

/// Plane matching of a point set whose unit disk graph is connected, taken
/// from its degree-five EMST.
pub fn plane_matching_alg1(pts: &PointSet) -> Result<Matching> {
    if pts.is_empty() {
        return Ok(Matching::empty());
    }
    let tree = emst5(pts)?;
    if tree.max_edge() > SqLen((SCALE as i128) * (SCALE as i128)) {
        return Err(Error::DisconnectedInput);
    }
    let run = peel_tree(pts, &tree, PeelLimits::default());
    Matching::from_pairs(pts, run.pairs)
}
