//! Plane matching of size at least 2n/5 with bottleneck at most
//! (√2+√3) times the optimal plane perfect bottleneck.
//!
//! The input is cut into an even forest. Each tree is consumed from its
//! outskirts; every iteration picks a set of vertices to remove (around a
//! non-anchor skeleton leaf, around a second-level skeleton leaf, or all
//! that is left) and matches inside that set. Non-tree edges are accepted
//! only when the polygon formed with their tree path is convex and empty,
//! and when they cross neither a surviving tree edge nor an output edge.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::geometry::{convex_empty_among, crosses, cw_ge_pi, cw_order, mul_cmp, Point, PointId, PointSet, SqLen};
use crate::matching::Matching;
use crate::proximity::{delaunay, reduce_degree, Forest, KnnIndex, Tree, UnionFind, WeightedEdge};

#[derive(Debug, Clone)]
pub struct EvenForest {
    pub forest: Forest,
    /// The last edge accepted by Kruskal; `None` only for empty input.
    pub last_edge: Option<WeightedEdge>,
}

/// Kruskal over the Delaunay edges, stopped as soon as every component has
/// an even number of points.
pub fn even_forest(pts: &PointSet) -> Result<EvenForest> {
    let n = pts.len();
    if n % 2 == 1 {
        return Err(Error::OddPointCount(n));
    }
    if n == 0 {
        return Ok(EvenForest { forest: Forest::default(), last_edge: None });
    }
    let dt = delaunay(pts)?;
    let mut cand: Vec<WeightedEdge> = dt.edges.iter().map(|&(a, b)| WeightedEdge::new(pts, a, b)).collect();
    cand.sort_unstable_by_key(|e| e.kruskal_key());
    let mut uf = UnionFind::new(n);
    let mut odd = n;
    let mut edges = Vec::new();
    for e in cand {
        if odd == 0 {
            break;
        }
        let (sa, sb) = (uf.set_size(e.a), uf.set_size(e.b));
        if uf.union(e.a, e.b) {
            if sa % 2 == 1 && sb % 2 == 1 {
                odd -= 2;
            }
            edges.push(e);
        }
    }
    let last_edge = edges.last().copied();
    reduce_degree(pts, &mut edges);
    let verts: Vec<PointId> = (0..n).collect();
    let mut forest = Forest::from_edges(&verts, &edges, last_edge.map_or(SqLen::ZERO, |e| e.sq));
    forest.trees.retain(|t| !t.is_empty());
    Ok(EvenForest { forest, last_edge })
}

/// `v` with its internal neighbour `w` and leaves `a`, `b` in clockwise
/// order starting after `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchorInfo {
    pub v: PointId,
    pub w: PointId,
    pub a: PointId,
    pub b: PointId,
}

/// True iff the skeleton leaf `v` has one internal neighbour and exactly
/// two leaves whose clockwise angle, measured after the internal
/// neighbour, is at least π.
pub fn is_anchor(pts: &PointSet, tree: &Tree, v: PointId) -> Result<bool> {
    let l = tree.local(v).ok_or(Error::NotSkeletonLeaf(v))?;
    let st = TreeState::new(tree);
    if !st.is_t1_leaf(l) {
        return Err(Error::NotSkeletonLeaf(v));
    }
    Ok(st.anchor(pts, l).is_some())
}

/// What an iteration did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Non-anchor skeleton leaf with `k` leaves.
    SkeletonLeaf { k: usize },
    /// Second-level skeleton leaf with `k` anchors and `l` plain leaves.
    Centre { k: usize, l: usize },
    /// At most six vertices left.
    SmallRemainder { t: usize },
    /// Second-level skeleton is a single vertex with `k` anchors.
    LoneCentre { k: usize, l: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub kind: StepKind,
    pub removed: usize,
    pub matched: usize,
    /// Around a centre: `a_1, v_1, b_1, …, a_k, v_k, b_k` and the centre `w`
    /// with its remaining neighbour `y`.
    pub around: Option<(PointId, PointId, Vec<PointId>)>,
}

impl IterationRecord {
    /// At least four fifths of the removed vertices were matched.
    pub fn meets_quota(&self) -> bool {
        5 * self.matched >= 4 * self.removed
    }
}

#[derive(Debug, Clone, Default)]
pub struct SecondReport {
    pub matching: Matching,
    pub iterations: Vec<IterationRecord>,
    pub last_edge: Option<WeightedEdge>,
}

/// `e ≤ (5 + 2√6)·lam`, i.e. length at most (√2+√3) times, exactly.
pub fn within_factor(e: SqLen, lam: SqLen) -> bool {
    let d = e.0 - 5 * lam.0;
    d <= 0 || mul_cmp(d, d, 24 * lam.0, lam.0) != Ordering::Greater
}

struct SegGrid {
    cell: i64,
    map: HashMap<(i64, i64), Vec<usize>>,
    big: Vec<usize>,
    segs: Vec<(PointId, PointId)>,
}

const MAX_CELLS: i64 = 256;

impl SegGrid {
    fn new(cell: i64) -> Self {
        SegGrid { cell: cell.max(1), map: HashMap::new(), big: Vec::new(), segs: Vec::new() }
    }

    fn span(&self, a: Point, b: Point) -> (i64, i64, i64, i64) {
        (
            a.x.min(b.x).div_euclid(self.cell),
            a.x.max(b.x).div_euclid(self.cell),
            a.y.min(b.y).div_euclid(self.cell),
            a.y.max(b.y).div_euclid(self.cell),
        )
    }

    fn insert(&mut self, pts: &PointSet, s: PointId, t: PointId) {
        let id = self.segs.len();
        self.segs.push((s, t));
        let (x0, x1, y0, y1) = self.span(pts.p(s), pts.p(t));
        if (x1 - x0 + 1) * (y1 - y0 + 1) > MAX_CELLS {
            self.big.push(id);
            return;
        }
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                self.map.entry((cx, cy)).or_default().push(id);
            }
        }
    }

    /// Segments that may meet the segment `a b`.
    fn near(&self, a: Point, b: Point) -> Vec<(PointId, PointId)> {
        let (x0, x1, y0, y1) = self.span(a, b);
        let mut ids: Vec<usize> = self.big.clone();
        if (x1 - x0 + 1) * (y1 - y0 + 1) > MAX_CELLS {
            ids = (0..self.segs.len()).collect();
        } else {
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    if let Some(v) = self.map.get(&(cx, cy)) {
                        ids.extend_from_slice(v);
                    }
                }
            }
            ids.sort_unstable();
            ids.dedup();
        }
        ids.into_iter().map(|i| self.segs[i]).collect()
    }
}

/// Shared state across the trees of one instance.
struct Ctx<'a> {
    pts: &'a PointSet,
    index: KnnIndex,
    alive: Vec<bool>,
    tree_edges: SegGrid,
    output: SegGrid,
    pairs: Vec<(PointId, PointId)>,
}

impl<'a> Ctx<'a> {
    fn new(pts: &'a PointSet, edges: &[WeightedEdge], alive: Vec<bool>) -> Self {
        let mut lens: Vec<SqLen> = edges.iter().map(|e| e.sq).collect();
        lens.sort_unstable();
        let cell = lens.get(lens.len() / 2).map_or(1.0, |s| s.0 as f64).sqrt().ceil() as i64;
        let mut tree_edges = SegGrid::new(cell);
        for e in edges {
            tree_edges.insert(pts, e.a, e.b);
        }
        Ctx { pts, index: KnnIndex::new(pts), alive, tree_edges, output: SegGrid::new(cell), pairs: Vec::new() }
    }

    fn crosses_output(&self, s: PointId, t: PointId) -> bool {
        let (a, b) = (self.pts.p(s), self.pts.p(t));
        self.output.near(a, b).into_iter().any(|(c, d)| crosses(a, b, self.pts.p(c), self.pts.p(d)))
    }

    /// Non-tree edge `path[0]–path[last]` with its tree path.
    fn certify(&self, path: &[PointId], removing: &[PointId], lam: SqLen) -> bool {
        let pts = self.pts;
        let (s, t) = (path[0], *path.last().unwrap());
        if !within_factor(pts.sq_dist(s, t), lam) {
            return false;
        }
        let lo = Point::new(
            path.iter().map(|&i| pts.p(i).x).min().unwrap(),
            path.iter().map(|&i| pts.p(i).y).min().unwrap(),
        );
        let hi = Point::new(
            path.iter().map(|&i| pts.p(i).x).max().unwrap(),
            path.iter().map(|&i| pts.p(i).y).max().unwrap(),
        );
        if !matches!(convex_empty_among(path, pts, self.index.in_box(lo, hi)), Ok(true)) {
            return false;
        }
        let (a, b) = (pts.p(s), pts.p(t));
        let blocked = self.tree_edges.near(a, b).into_iter().any(|(c, d)| {
            self.alive[c]
                && self.alive[d]
                && !removing.contains(&c)
                && !removing.contains(&d)
                && crosses(a, b, pts.p(c), pts.p(d))
        });
        !blocked && !self.crosses_output(s, t)
    }
}

/// Mutable view of one tree: alive flags and live degrees, local indices.
struct TreeState<'t> {
    tree: &'t Tree,
    alive: Vec<bool>,
    deg: Vec<usize>,
    count: usize,
}

impl<'t> TreeState<'t> {
    fn new(tree: &'t Tree) -> Self {
        TreeState { tree, alive: vec![true; tree.len()], deg: tree.adj.iter().map(Vec::len).collect(), count: tree.len() }
    }

    fn nbrs(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.tree.adj[x].iter().copied().filter(move |&y| self.alive[y])
    }

    fn in_t1(&self, x: usize) -> bool {
        self.alive[x] && self.deg[x] >= 2
    }

    fn t1_deg(&self, x: usize) -> usize {
        self.nbrs(x).filter(|&y| self.deg[y] >= 2).count()
    }

    fn is_t1_leaf(&self, x: usize) -> bool {
        self.in_t1(x) && self.t1_deg(x) <= 1
    }

    fn in_t2(&self, x: usize) -> bool {
        self.in_t1(x) && self.t1_deg(x) >= 2
    }

    fn t2_deg(&self, x: usize) -> usize {
        self.nbrs(x).filter(|&y| self.in_t2(y)).count()
    }

    fn is_t2_leaf(&self, x: usize) -> bool {
        self.in_t2(x) && self.t2_deg(x) <= 1
    }

    fn g(&self, x: usize) -> PointId {
        self.tree.verts[x]
    }

    /// Leaves of `v` in clockwise order starting after `from`.
    fn leaves_cw(&self, pts: &PointSet, v: usize, from: usize) -> Vec<usize> {
        let (pv, pr) = (pts.p(self.g(v)), pts.p(self.g(from)));
        let mut l: Vec<usize> = self.nbrs(v).filter(|&u| self.deg[u] == 1).collect();
        l.sort_by(|&a, &b| cw_order(pv, pr, pts.p(self.g(a)), pts.p(self.g(b))));
        l
    }

    /// `(w, a, b)` if the skeleton leaf `v` is an anchor.
    fn anchor(&self, pts: &PointSet, v: usize) -> Option<(usize, usize, usize)> {
        if self.deg[v] != 3 || self.t1_deg(v) != 1 {
            return None;
        }
        let w = self.nbrs(v).find(|&y| self.deg[y] >= 2)?;
        let l = self.leaves_cw(pts, v, w);
        let (a, b) = (l[0], l[1]);
        cw_ge_pi(pts.p(self.g(a)), pts.p(self.g(v)), pts.p(self.g(b))).then_some((w, a, b))
    }

    /// Unique live tree path from `s` to `t` with at most `max` edges.
    fn path(&self, s: usize, t: usize, max: usize) -> Option<Vec<usize>> {
        fn go(st: &TreeState, x: usize, from: usize, t: usize, left: usize, acc: &mut Vec<usize>) -> bool {
            acc.push(x);
            if x == t {
                return true;
            }
            if left > 0 {
                for y in st.nbrs(x) {
                    if y != from && go(st, y, x, t, left - 1, acc) {
                        return true;
                    }
                }
            }
            acc.pop();
            false
        }
        let mut acc = Vec::new();
        go(self, s, usize::MAX, t, max, &mut acc).then_some(acc)
    }

    fn remove(&mut self, r: &[usize]) {
        for &x in r {
            self.alive[x] = false;
        }
        for &x in r {
            for &y in &self.tree.adj[x] {
                if self.alive[y] {
                    self.deg[y] -= 1;
                }
            }
        }
        self.count -= r.len();
    }

    /// Live vertices within three hops of the removed set.
    fn touched(&self, r: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = r.iter().flat_map(|&x| self.tree.adj[x].iter().copied()).filter(|&y| self.alive[y]).collect();
        let mut frontier = out.clone();
        for _ in 0..2 {
            let next: Vec<usize> = frontier.iter().flat_map(|&x| self.nbrs(x)).collect();
            out.extend_from_slice(&next);
            frontier = next;
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Copy)]
struct Cand {
    i: usize,
    j: usize,
    tree_edge: bool,
    sq: SqLen,
}

/// Best certified matching inside the removal set `r` (local ids).
fn solve(ctx: &Ctx, st: &TreeState, r: &[usize], lam: SqLen) -> Vec<(usize, usize)> {
    let pts = ctx.pts;
    let removing: Vec<PointId> = r.iter().map(|&x| st.g(x)).collect();
    let mut cands: Vec<Cand> = Vec::new();
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            let (s, t) = (r[i], r[j]);
            let (gs, gt) = (st.g(s), st.g(t));
            if st.tree.adj[s].contains(&t) {
                if !ctx.crosses_output(gs, gt) {
                    cands.push(Cand { i, j, tree_edge: true, sq: pts.sq_dist(gs, gt) });
                }
                continue;
            }
            let Some(path) = st.path(s, t, 4) else { continue };
            let gp: Vec<PointId> = path.iter().map(|&x| st.g(x)).collect();
            if ctx.certify(&gp, &removing, lam) {
                cands.push(Cand { i, j, tree_edge: false, sq: pts.sq_dist(gs, gt) });
            }
        }
    }

    struct Search<'c> {
        pts: &'c PointSet,
        ids: Vec<PointId>,
        cands: Vec<Cand>,
        used: Vec<bool>,
        chosen: Vec<usize>,
        best: Vec<usize>,
        best_key: Option<(usize, Reverse<usize>, Reverse<SqLen>)>,
    }
    impl Search<'_> {
        fn key(&self) -> (usize, Reverse<usize>, Reverse<SqLen>) {
            let nt = self.chosen.iter().filter(|&&c| !self.cands[c].tree_edge).count();
            let mx = self.chosen.iter().map(|&c| self.cands[c].sq).max().unwrap_or(SqLen::ZERO);
            (self.chosen.len(), Reverse(nt), Reverse(mx))
        }

        fn clash(&self, c: usize) -> bool {
            let (a, b) = (self.pts.p(self.ids[self.cands[c].i]), self.pts.p(self.ids[self.cands[c].j]));
            self.chosen.iter().any(|&o| {
                crosses(a, b, self.pts.p(self.ids[self.cands[o].i]), self.pts.p(self.ids[self.cands[o].j]))
            })
        }

        fn run(&mut self) {
            let free = self.used.iter().filter(|&&u| !u).count();
            if let Some((best, _, _)) = self.best_key {
                if self.chosen.len() + free / 2 < best {
                    return;
                }
            }
            let Some(i) = self.used.iter().position(|&u| !u) else {
                let k = self.key();
                if self.best_key.is_none_or(|b| k > b) {
                    self.best_key = Some(k);
                    self.best = self.chosen.clone();
                }
                return;
            };
            self.used[i] = true;
            for c in 0..self.cands.len() {
                let Cand { i: ci, j: cj, .. } = self.cands[c];
                let other = if ci == i { cj } else if cj == i { ci } else { continue };
                if self.used[other] || self.clash(c) {
                    continue;
                }
                self.used[other] = true;
                self.chosen.push(c);
                self.run();
                self.chosen.pop();
                self.used[other] = false;
            }
            self.run();
            self.used[i] = false;
        }
    }
    let mut s = Search {
        pts,
        ids: removing,
        cands,
        used: vec![false; r.len()],
        chosen: Vec::new(),
        best: Vec::new(),
        best_key: None,
    };
    s.run();
    s.best.iter().map(|&c| (r[s.cands[c].i], r[s.cands[c].j])).collect()
}

fn commit(ctx: &mut Ctx, st: &mut TreeState, r: &[usize], pairs: &[(usize, usize)]) {
    for &(a, b) in pairs {
        let (ga, gb) = (st.g(a), st.g(b));
        ctx.output.insert(ctx.pts, ga, gb);
        ctx.pairs.push((ga.min(gb), ga.max(gb)));
    }
    for &x in r {
        ctx.alive[st.g(x)] = false;
    }
    st.remove(r);
}

fn run_tree(ctx: &mut Ctx, tree: &Tree, log: &mut Vec<IterationRecord>) -> Result<()> {
    let pts = ctx.pts;
    let lam = tree.max_edge();
    let mut st = TreeState::new(tree);
    let mut leaf_heap: BinaryHeap<Reverse<usize>> = (0..tree.len()).map(Reverse).collect();
    let mut centre_heap: BinaryHeap<Reverse<usize>> = (0..tree.len()).map(Reverse).collect();
    loop {
        if st.count == 0 {
            return Ok(());
        }
        if st.count <= 6 {
            let t = st.count;
            if t % 2 == 1 && t != 5 {
                return Err(Error::InvariantViolation(format!("{t} vertices left in a tree")));
            }
            let r: Vec<usize> = (0..tree.len()).filter(|&x| st.alive[x]).collect();
            let pairs = solve(ctx, &st, &r, lam);
            log.push(IterationRecord { kind: StepKind::SmallRemainder { t }, removed: t, matched: 2 * pairs.len(), around: None });
            commit(ctx, &mut st, &r, &pairs);
            return Ok(());
        }

        let mut picked = None;
        while let Some(Reverse(v)) = leaf_heap.pop() {
            if st.alive[v] && st.is_t1_leaf(v) && st.t1_deg(v) == 1 && st.anchor(pts, v).is_none() {
                picked = Some(v);
                break;
            }
        }
        if let Some(v) = picked {
            let w = st.nbrs(v).find(|&y| st.deg[y] >= 2).unwrap();
            let leaves = st.leaves_cw(pts, v, w);
            let k = leaves.len();
            let mut done: Option<(Vec<usize>, Vec<(usize, usize)>)> = None;
            if k == 1 {
                done = Some((vec![v, leaves[0]], vec![(v, leaves[0])]));
            } else {
                for i in 0..k - 1 {
                    let (a, b) = (leaves[i], leaves[i + 1]);
                    if !crate::geometry::cw_lt_pi(pts.p(st.g(a)), pts.p(st.g(v)), pts.p(st.g(b))) {
                        continue;
                    }
                    let r = vec![a, b];
                    let pairs = solve(ctx, &st, &r, lam);
                    if pairs.len() == 1 {
                        done = Some((r, pairs));
                        break;
                    }
                }
            }
            let (r, pairs) = done.unwrap_or_else(|| {
                // no certified leaf pair: fall back to peeling v with its leaves
                let mut r = vec![v];
                r.extend_from_slice(&leaves);
                let pairs = solve(ctx, &st, &r, lam);
                (r, pairs)
            });
            log.push(IterationRecord {
                kind: StepKind::SkeletonLeaf { k },
                removed: r.len(),
                matched: 2 * pairs.len(),
                around: None,
            });
            let touched = st.touched(&r);
            commit(ctx, &mut st, &r, &pairs);
            for x in touched.into_iter().filter(|&x| st.alive[x]) {
                leaf_heap.push(Reverse(x));
                centre_heap.push(Reverse(x));
            }
            continue;
        }

        let mut centre = None;
        while let Some(Reverse(w)) = centre_heap.pop() {
            if st.alive[w] && st.is_t2_leaf(w) {
                centre = Some(w);
                break;
            }
        }
        let Some(w) = centre else {
            return Err(Error::InvariantViolation("no second-level skeleton leaf".into()));
        };
        let y = st.nbrs(w).find(|&u| st.in_t2(u));
        let reference = y.unwrap_or_else(|| st.nbrs(w).next().unwrap());
        let (pw, pr) = (pts.p(st.g(w)), pts.p(st.g(reference)));
        let mut anchors: Vec<usize> = st.nbrs(w).filter(|&u| st.is_t1_leaf(u)).collect();
        anchors.sort_by(|&a, &b| cw_order(pw, pr, pts.p(st.g(a)), pts.p(st.g(b))));
        let plain: Vec<usize> = st.nbrs(w).filter(|&u| st.deg[u] == 1).collect();
        let mut around = Vec::new();
        for &v in &anchors {
            let l = st.leaves_cw(pts, v, w);
            if l.len() == 2 {
                around.extend_from_slice(&[st.g(l[0]), st.g(v), st.g(l[1])]);
            }
        }
        let (k, l) = (anchors.len(), plain.len());
        let r: Vec<usize> = match y {
            Some(_) => {
                let mut r = vec![w];
                r.extend_from_slice(&plain);
                for &v in &anchors {
                    r.push(v);
                    r.extend(st.nbrs(v).filter(|&u| u != w));
                }
                r
            }
            None => (0..tree.len()).filter(|&x| st.alive[x]).collect(),
        };
        let pairs = solve(ctx, &st, &r, lam);
        let kind = if y.is_some() { StepKind::Centre { k, l } } else { StepKind::LoneCentre { k, l } };
        log.push(IterationRecord {
            kind,
            removed: r.len(),
            matched: 2 * pairs.len(),
            around: y.map(|y| (st.g(w), st.g(y), around)),
        });
        let touched = st.touched(&r);
        commit(ctx, &mut st, &r, &pairs);
        for x in touched.into_iter().filter(|&x| st.alive[x]) {
            leaf_heap.push(Reverse(x));
            centre_heap.push(Reverse(x));
        }
    }
}

/// Matches one tree on its own (emptiness is still checked against every
/// point of `pts`).
pub fn match_tree_second(pts: &PointSet, tree: &Tree) -> Result<Matching> {
    let mut alive = vec![false; pts.len()];
    for &v in &tree.verts {
        alive[v] = true;
    }
    let mut ctx = Ctx::new(pts, &tree.edges, alive);
    let mut log = Vec::new();
    run_tree(&mut ctx, tree, &mut log)?;
    Matching::from_pairs(pts, ctx.pairs)
}

/// Full run with per-iteration records.
pub fn second_approx_report(pts: &PointSet) -> Result<SecondReport> {
    let ef = even_forest(pts)?;
    let edges: Vec<WeightedEdge> = ef.forest.trees.iter().flat_map(|t| t.edges.iter().copied()).collect();
    let mut ctx = Ctx::new(pts, &edges, vec![true; pts.len()]);
    let mut iterations = Vec::new();
    for t in &ef.forest.trees {
        run_tree(&mut ctx, t, &mut iterations)?;
    }
    let matching = Matching::from_pairs(pts, std::mem::take(&mut ctx.pairs))?;
    Ok(SecondReport { matching, iterations, last_edge: ef.last_edge })
}

pub fn second_approx(pts: &PointSet) -> Result<Matching> {
    Ok(second_approx_report(pts)?.matching)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::validate;
    use crate::proximity::emst5;

    fn ps(c: &[(f64, f64)]) -> PointSet {
        PointSet::from_f64(c)
    }

    #[test]
    fn even_forest_examples() {
        let line = ps(&[(0., 0.), (1., 0.), (3., 0.), (4., 0.)]);
        let ef = even_forest(&line).unwrap();
        assert_eq!(ef.forest.trees.len(), 2);
        assert_eq!(ef.last_edge.unwrap().sq, SqLen::from_len(1.0));

        let sq = ps(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        let ef = even_forest(&sq).unwrap();
        assert_eq!(ef.forest.trees.len(), 1);
        assert_eq!(ef.forest.trees[0].edges.len(), 3);
        assert_eq!(ef.last_edge.unwrap().sq, SqLen::from_len(1.0));

        let two = ps(&[(0., 0.), (2.5, 0.)]);
        assert_eq!(even_forest(&two).unwrap().last_edge.unwrap().sq, SqLen::from_len(2.5));
        assert_eq!(even_forest(&ps(&[(0., 0.), (1., 0.), (2., 0.)])).unwrap_err(), Error::OddPointCount(3));
    }

    fn anchor_tree(u2: (f64, f64)) -> (PointSet, Tree) {
        // v=0 with internal neighbour w=1 (which has two more leaves) and leaves 2, 3
        let p = ps(&[(0., 0.), (0., 1.), (1., 0.), u2, (-0.8, 1.6), (0.8, 1.6)]);
        let e = [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)].map(|(a, b)| WeightedEdge::new(&p, a, b));
        let t = Tree::from_edges((0..6).collect(), e.to_vec());
        (p, t)
    }

    #[test]
    fn anchor_examples() {
        let (p, t) = anchor_tree((-1., 0.));
        assert!(is_anchor(&p, &t, 0).unwrap());
        let (p, t) = anchor_tree((0., -1.));
        assert!(!is_anchor(&p, &t, 0).unwrap());
        assert_eq!(is_anchor(&p, &t, 2).unwrap_err(), Error::NotSkeletonLeaf(2));

        let q = ps(&[(0., 0.), (0., 1.), (1., 0.), (0., 2.), (0.8, 2.6)]);
        let e = [(0, 1), (0, 2), (1, 3), (3, 4)].map(|(a, b)| WeightedEdge::new(&q, a, b));
        let t = Tree::from_edges((0..5).collect(), e.to_vec());
        assert!(!is_anchor(&q, &t, 0).unwrap());
    }

    #[test]
    fn factor_bound() {
        let lam = SqLen::from_len(1.0);
        assert!(within_factor(SqLen::from_len(3.146), lam));
        assert!(!within_factor(SqLen::from_len(3.147), lam));
    }

    #[test]
    fn small_trees() {
        let line = ps(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        let t = emst5(&line).unwrap();
        assert_eq!(match_tree_second(&line, &t).unwrap().len(), 2);

        let mut c = vec![(0.0, 0.0)];
        for k in 0..5 {
            let a = 2.0 * std::f64::consts::PI / 5.0 * k as f64;
            c.push((a.cos(), a.sin()));
        }
        let star = ps(&c);
        let t = emst5(&star).unwrap();
        let m = match_tree_second(&star, &t).unwrap();
        assert_eq!(m.len(), 3);
        assert!(validate(&star, &m).unwrap().is_plane);
    }

    #[test]
    fn one_anchor_case() {
        // w=0 joined to y=1 and to anchor v=2 whose leaves a=3, b=4 straddle it;
        // y continues into a path so the tree has eight vertices
        let p = ps(&[
            (0., 0.),
            (-1., 0.),
            (1., 0.),
            (0.9, 1.0),
            (0.9, -1.0),
            (-1.8, 0.6),
            (-2.6, 1.2),
            (-3.4, 1.8),
        ]);
        let e = [(0, 1), (0, 2), (2, 3), (2, 4), (1, 5), (5, 6), (6, 7)].map(|(a, b)| WeightedEdge::new(&p, a, b));
        let t = Tree::from_edges((0..8).collect(), e.to_vec());
        assert!(is_anchor(&p, &t, 2).unwrap());
        let mut ctx = Ctx::new(&p, &t.edges, vec![true; 8]);
        let mut log = Vec::new();
        run_tree(&mut ctx, &t, &mut log).unwrap();
        let m = Matching::from_pairs(&p, ctx.pairs.clone()).unwrap();
        assert!(validate(&p, &m).unwrap().is_plane);
        assert_eq!(m.len(), 4, "{:?}", log);
    }

    #[test]
    fn two_centres_with_anchors() {
        // centres 0 and 1, each carrying two anchors with two leaves apiece
        let mut c: Vec<(f64, f64)> = vec![(0.0, 0.0), (2.0, 0.0)];
        let mut e = vec![(0, 1)];
        for (w, vx, vy) in [(0usize, -0.7f64, 1.0f64), (0, -0.7, -1.0), (1, 2.7, 1.0), (1, 2.7, -1.0)] {
            let (wx, wy) = c[w];
            let v = c.len();
            c.push((vx, vy));
            e.push((w, v));
            let th = (wy - vy).atan2(wx - vx);
            for s in [-1.0, 1.0] {
                let a = th + s * 80f64.to_radians();
                e.push((v, c.len()));
                c.push((vx + 0.8 * a.cos(), vy + 0.8 * a.sin()));
            }
        }
        let p = ps(&c);
        let e: Vec<WeightedEdge> = e.into_iter().map(|(a, b)| WeightedEdge::new(&p, a, b)).collect();
        let t = Tree::from_edges((0..14).collect(), e);
        for v in [2, 5, 8, 11] {
            assert!(is_anchor(&p, &t, v).unwrap());
        }
        let mut ctx = Ctx::new(&p, &t.edges, vec![true; 14]);
        let mut log = Vec::new();
        run_tree(&mut ctx, &t, &mut log).unwrap();
        assert_eq!(log[0].kind, StepKind::Centre { k: 2, l: 0 });
        assert_eq!(log[0].removed, 7);
        assert!(matches!(log[1].kind, StepKind::LoneCentre { k: 2, .. }));
        let m = Matching::from_pairs(&p, ctx.pairs.clone()).unwrap();
        assert!(validate(&p, &m).unwrap().is_plane);
        assert!(m.len() >= 6, "{:?}", log);
    }

    #[test]
    fn approx_examples() {
        let sq = ps(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        let m = second_approx(&sq).unwrap();
        assert_eq!(m.len(), 2);
        assert!(validate(&sq, &m).unwrap().is_plane);

        let c: Vec<(f64, f64)> = (0..4).flat_map(|i| (0..2).map(move |j| (i as f64, j as f64))).collect();
        let grid = ps(&c);
        let m = second_approx(&grid).unwrap();
        assert!(m.len() >= 4);
        assert!(within_factor(m.bottleneck(), SqLen::from_len(1.0)));

        let two = ps(&[(0., 0.), (1., 0.)]);
        assert_eq!(second_approx(&two).unwrap().pairs(), &[(0, 1)]);
    }
}
