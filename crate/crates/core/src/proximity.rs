//! Proximity structures: Delaunay triangulation, Euclidean minimum spanning
//! trees of bounded degree, threshold forests, disk graphs, nearest-neighbour
//! queries, and skeleton trees.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation as _};

use crate::error::{Error, Result};
use crate::geometry::{cross, cw_order, dot, mul_cmp, sq_dist, Point, PointId, PointSet, SqLen};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of `a` and `b`; returns false if already joined.
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
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Edge between two point ids with its exact squared length; `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightedEdge {
    pub a: PointId,
    pub b: PointId,
    pub sq: SqLen,
}

impl WeightedEdge {
    pub fn new(pts: &PointSet, a: PointId, b: PointId) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        WeightedEdge { a, b, sq: pts.sq_dist(a, b) }
    }

    /// Global Kruskal order: length, then lexicographic endpoint pair.
    pub fn kruskal_key(&self) -> (SqLen, PointId, PointId) {
        (self.sq, self.a, self.b)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Triangulation {
    /// Undirected edges with `a < b`, sorted.
    pub edges: Vec<(PointId, PointId)>,
    pub triangles: Vec<[PointId; 3]>,
}

struct Site {
    pos: Point2<f64>,
    id: PointId,
}

impl HasPosition for Site {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

fn incircle_sign(pts: &PointSet, a: PointId, b: PointId, c: PointId, d: PointId) -> f64 {
    let co = |i: PointId| {
        let p = pts.p(i);
        robust::Coord { x: p.x as f64, y: p.y as f64 }
    };
    robust::incircle(co(a), co(b), co(c), co(d))
}

/// Delaunay triangulation. Co-circular quadrilaterals take the diagonal
/// incident to their smallest point id; fully collinear input yields the
/// chain of consecutive points.
pub fn delaunay(pts: &PointSet) -> Result<Triangulation> {
    let n = pts.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let sites: Vec<Site> = pts
        .points()
        .iter()
        .enumerate()
        .map(|(id, p)| Site { pos: Point2::new(p.x as f64, p.y as f64), id })
        .collect();
    let dt = DelaunayTriangulation::<Site>::bulk_load(sites)
        .map_err(|e| Error::BadParameters(format!("triangulation failed: {e:?}")))?;
    if dt.num_vertices() != n {
        return Err(Error::BadParameters("duplicate points".into()));
    }
    let mut triangles: Vec<[PointId; 3]> = dt
        .inner_faces()
        .map(|f| {
            let [a, b, c] = f.vertices();
            [a.data().id, b.data().id, c.data().id]
        })
        .collect();
    if triangles.is_empty() {
        let mut edges: Vec<(PointId, PointId)> = dt
            .undirected_edges()
            .map(|e| {
                let [a, b] = e.vertices();
                let (a, b) = (a.data().id, b.data().id);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        return Ok(Triangulation { edges, triangles });
    }
    break_cocircular_ties(pts, &mut triangles);
    let mut edges: Vec<(PointId, PointId)> = triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(Triangulation { edges, triangles })
}

fn break_cocircular_ties(pts: &PointSet, tris: &mut [[PointId; 3]]) {
    let key = |a: PointId, b: PointId| (a.min(b), a.max(b));
    // orient every triangle counterclockwise
    for t in tris.iter_mut() {
        if cross(pts.p(t[0]), pts.p(t[1]), pts.p(t[2])) < 0 {
            t.swap(1, 2);
        }
    }
    let mut owners: HashMap<(PointId, PointId), Vec<usize>> = HashMap::with_capacity(tris.len() * 2);
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            owners.entry(key(t[k], t[(k + 1) % 3])).or_default().push(i);
        }
    }
    let mut queue: VecDeque<(PointId, PointId)> = owners
        .iter()
        .filter(|(_, v)| v.len() == 2)
        .map(|(&k, _)| k)
        .collect();
    let mut sorted: Vec<_> = queue.drain(..).collect();
    sorted.sort_unstable();
    queue.extend(sorted);
    let mut budget = 20 * tris.len() + 100;
    while let Some(e) = queue.pop_front() {
        if budget == 0 {
            break;
        }
        let Some(ts) = owners.get(&e) else { continue };
        if ts.len() != 2 {
            continue;
        }
        let (t1, t2) = (ts[0], ts[1]);
        let (a, b) = e;
        let opp = |t: &[PointId; 3]| *t.iter().find(|&&v| v != a && v != b).unwrap();
        let (c, d) = (opp(&tris[t1]), opp(&tris[t2]));
        let tri = tris[t1];
        if incircle_sign(pts, tri[0], tri[1], tri[2], d) != 0.0 {
            continue;
        }
        let least = a.min(b).min(c).min(d);
        if least == a || least == b {
            continue;
        }
        // flip only across a strictly convex quadrilateral
        let (pa, pb, pc, pd) = (pts.p(a), pts.p(b), pts.p(c), pts.p(d));
        if cross(pc, pd, pa).signum() * cross(pc, pd, pb).signum() >= 0
            || cross(pa, pb, pc).signum() * cross(pa, pb, pd).signum() >= 0
        {
            continue;
        }
        budget -= 1;
        let mut n1 = [c, d, a];
        let mut n2 = [d, c, b];
        for t in [&mut n1, &mut n2] {
            if cross(pts.p(t[0]), pts.p(t[1]), pts.p(t[2])) < 0 {
                t.swap(1, 2);
            }
        }
        for (slot, old, new) in [(t1, tris[t1], n1), (t2, tris[t2], n2)] {
            for k in 0..3 {
                let ek = key(old[k], old[(k + 1) % 3]);
                if let Some(v) = owners.get_mut(&ek) {
                    v.retain(|&x| x != slot);
                }
            }
            tris[slot] = new;
        }
        owners.remove(&e);
        for slot in [t1, t2] {
            let t = tris[slot];
            for k in 0..3 {
                let ek = key(t[k], t[(k + 1) % 3]);
                owners.entry(ek).or_default().push(slot);
                if ek != key(c, d) {
                    queue.push_back(ek);
                }
            }
        }
    }
}

/// Kruskal over `edges` in the global tie order; `stop` sees the union-find
/// after each accepted edge and may end the scan early.
pub fn kruskal<F>(n: usize, mut edges: Vec<WeightedEdge>, mut stop: F) -> Vec<WeightedEdge>
where
    F: FnMut(&mut UnionFind, &WeightedEdge) -> bool,
{
    edges.sort_unstable_by_key(|e| e.kruskal_key());
    let mut uf = UnionFind::new(n);
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for e in edges {
        if uf.union(e.a, e.b) {
            out.push(e);
            if out.len() + 1 == n || stop(&mut uf, &e) {
                break;
            }
        }
    }
    out
}

/// Tree over a subset of the points. Adjacency uses local indices into
/// `verts`; edges carry global ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tree {
    pub verts: Vec<PointId>,
    pub adj: Vec<Vec<usize>>,
    pub edges: Vec<WeightedEdge>,
}

impl Tree {
    pub fn single(v: PointId) -> Tree {
        Tree { verts: vec![v], adj: vec![Vec::new()], edges: Vec::new() }
    }

    /// Builds a tree from its vertex set and edges (global ids).
    pub fn from_edges(mut verts: Vec<PointId>, edges: Vec<WeightedEdge>) -> Tree {
        verts.sort_unstable();
        let local = |g: PointId| verts.binary_search(&g).expect("edge endpoint outside vertex set");
        let mut adj = vec![Vec::new(); verts.len()];
        for e in &edges {
            let (a, b) = (local(e.a), local(e.b));
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        Tree { verts, adj, edges }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn local(&self, g: PointId) -> Option<usize> {
        self.verts.binary_search(&g).ok()
    }

    pub fn degree(&self, g: PointId) -> usize {
        self.local(g).map_or(0, |l| self.adj[l].len())
    }

    pub fn neighbors(&self, g: PointId) -> Vec<PointId> {
        self.local(g).map_or_else(Vec::new, |l| self.adj[l].iter().map(|&k| self.verts[k]).collect())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_edge(&self) -> SqLen {
        self.edges.iter().map(|e| e.sq).max().unwrap_or(SqLen::ZERO)
    }

    pub fn weight(&self) -> f64 {
        self.edges.iter().map(|e| e.sq.length()).sum()
    }

    pub fn has_edge(&self, a: PointId, b: PointId) -> bool {
        match (self.local(a), self.local(b)) {
            (Some(la), Some(lb)) => self.adj[la].contains(&lb),
            _ => false,
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.verts.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.len()
    }
}

/// Euclidean minimum spanning tree of maximum degree five.
pub fn emst5(pts: &PointSet) -> Result<Tree> {
    let n = pts.len();
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if n == 1 {
        return Ok(Tree::single(0));
    }
    let dt = delaunay(pts)?;
    let cand = dt.edges.iter().map(|&(a, b)| WeightedEdge::new(pts, a, b)).collect();
    let mut edges = kruskal(n, cand, |_, _| false);
    reduce_degree(pts, &mut edges);
    Ok(Tree::from_edges((0..n).collect(), edges))
}

/// Exchanges edges at vertices of degree six: for consecutive neighbours
/// `u`, `w` at exactly π/3 the longer of `(v,u)`, `(v,w)` becomes `(u,w)`.
pub fn reduce_degree(pts: &PointSet, edges: &mut Vec<WeightedEdge>) {
    loop {
        let mut nb: HashMap<PointId, Vec<PointId>> = HashMap::new();
        for e in edges.iter() {
            nb.entry(e.a).or_default().push(e.b);
            nb.entry(e.b).or_default().push(e.a);
        }
        let mut heavy: Vec<PointId> = nb.iter().filter(|(_, l)| l.len() > 5).map(|(&v, _)| v).collect();
        if heavy.is_empty() {
            return;
        }
        heavy.sort_unstable();
        let mut changed = false;
        'outer: for v in heavy {
            let pv = pts.p(v);
            let mut ring = nb[&v].clone();
            let r = pts.p(ring[0]);
            ring.sort_by(|&a, &b| cw_order(pv, r, pts.p(a), pts.p(b)));
            for i in 0..ring.len() {
                let (u, w) = (ring[i], ring[(i + 1) % ring.len()]);
                let (pu, pw) = (pts.p(u), pts.p(w));
                let d = dot(pv, pu, pw);
                let exact_third =
                    d > 0 && mul_cmp(2 * d, 2 * d, sq_dist(pv, pu).0, sq_dist(pv, pw).0) == Ordering::Equal;
                if !exact_third {
                    continue;
                }
                let drop = if pts.sq_dist(v, u) >= pts.sq_dist(v, w) { u } else { w };
                let (lo, hi) = (v.min(drop), v.max(drop));
                edges.retain(|e| !(e.a == lo && e.b == hi));
                edges.push(WeightedEdge::new(pts, u, w));
                changed = true;
                break 'outer;
            }
        }
        if !changed {
            return;
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Forest {
    pub trees: Vec<Tree>,
    /// The defining threshold (for `F_λ`) or last accepted edge length.
    pub threshold: SqLen,
}

impl Forest {
    /// Splits `edges` over `verts` into connected trees, ordered by their
    /// smallest vertex id.
    pub fn from_edges(verts: &[PointId], edges: &[WeightedEdge], threshold: SqLen) -> Forest {
        let pos: HashMap<PointId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for e in edges {
            uf.union(pos[&e.a], pos[&e.b]);
        }
        let mut groups: HashMap<usize, (Vec<PointId>, Vec<WeightedEdge>)> = HashMap::new();
        for &v in verts {
            let r = uf.find(pos[&v]);
            groups.entry(r).or_default().0.push(v);
        }
        for e in edges {
            let r = uf.find(pos[&e.a]);
            groups.get_mut(&r).unwrap().1.push(*e);
        }
        let mut trees: Vec<Tree> = groups.into_values().map(|(v, e)| Tree::from_edges(v, e)).collect();
        trees.sort_unstable_by_key(|t| t.verts[0]);
        Forest { trees, threshold }
    }

    pub fn tree_of(&self) -> HashMap<PointId, usize> {
        let mut m = HashMap::new();
        for (i, t) in self.trees.iter().enumerate() {
            for &v in &t.verts {
                m.insert(v, i);
            }
        }
        m
    }
}

/// `F_λ`: the edges of `tree` of length at most `lambda`.
pub fn forest_leq(tree: &Tree, lambda: SqLen) -> Forest {
    let kept: Vec<WeightedEdge> = tree.edges.iter().filter(|e| e.sq <= lambda).copied().collect();
    Forest::from_edges(&tree.verts, &kept, lambda)
}

/// `DG(λ, P)`: points joined iff their distance is at most `λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskGraph {
    pub adj: Vec<Vec<PointId>>,
    pub radius: SqLen,
}

impl DiskGraph {
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edges(&self) -> Vec<(PointId, PointId)> {
        let mut out = Vec::new();
        for (a, l) in self.adj.iter().enumerate() {
            out.extend(l.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    pub fn has_edge(&self, a: PointId, b: PointId) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Component label for every vertex, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.len());
        for (a, b) in self.edges() {
            uf.union(a, b);
        }
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        let mut out = vec![0; self.len()];
        for v in 0..self.len() {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[v] = label[r];
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }
}

/// Builds the disk graph by bucketing points into grid cells of side `λ`.
pub fn disk_graph(pts: &PointSet, lambda: SqLen) -> DiskGraph {
    let n = pts.len();
    let side = ((lambda.0.max(0) as f64).sqrt().ceil() as i64).max(1);
    let cell = |p: Point| (p.x.div_euclid(side), p.y.div_euclid(side));
    let mut grid: HashMap<(i64, i64), Vec<PointId>> = HashMap::new();
    for (i, &p) in pts.points().iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let mut adj = vec![Vec::new(); n];
    for (i, &p) in pts.points().iter().enumerate() {
        let (cx, cy) = cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else { continue };
                for &j in bucket {
                    if j != i && sq_dist(p, pts.p(j)) <= lambda {
                        adj[i].push(j);
                    }
                }
            }
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
    }
    DiskGraph { adj, radius: lambda }
}

/// Static 2-d tree for exact nearest-neighbour queries with exclusions.
#[derive(Debug, Clone)]
pub struct KnnIndex {
    order: Vec<PointId>,
    pts: Vec<Point>,
}

impl KnnIndex {
    pub fn new(pts: &PointSet) -> KnnIndex {
        let mut order: Vec<PointId> = (0..pts.len()).collect();
        build_kd(&mut order, pts.points(), 0);
        KnnIndex { order, pts: pts.points().to_vec() }
    }

    /// Nearest point to `q` whose id is not in `exclude`; ties go to the
    /// smaller id.
    pub fn nearest_excluding(&self, q: Point, exclude: &[PointId]) -> Option<PointId> {
        let mut best: Option<(SqLen, PointId)> = None;
        self.search(0, self.order.len(), 0, q, exclude, &mut best);
        best.map(|(_, id)| id)
    }

    fn search(
        &self,
        lo: usize,
        hi: usize,
        depth: usize,
        q: Point,
        exclude: &[PointId],
        best: &mut Option<(SqLen, PointId)>,
    ) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let id = self.order[mid];
        let p = self.pts[id];
        if !exclude.contains(&id) {
            let cand = (sq_dist(p, q), id);
            if best.is_none_or(|b| cand < b) {
                *best = Some(cand);
            }
        }
        let diff = if depth.is_multiple_of(2) { q.x as i128 - p.x as i128 } else { q.y as i128 - p.y as i128 };
        let (near, far) = if diff < 0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(near.0, near.1, depth + 1, q, exclude, best);
        if best.is_none_or(|b| diff * diff <= b.0 .0) {
            self.search(far.0, far.1, depth + 1, q, exclude, best);
        }
    }

    /// Ids of all points inside the closed box `[lo.x, hi.x] × [lo.y, hi.y]`.
    pub fn in_box(&self, lo: Point, hi: Point) -> Vec<PointId> {
        let mut out = Vec::new();
        self.collect_box(0, self.order.len(), 0, lo, hi, &mut out);
        out
    }

    fn collect_box(&self, lo_i: usize, hi_i: usize, depth: usize, lo: Point, hi: Point, out: &mut Vec<PointId>) {
        if lo_i >= hi_i {
            return;
        }
        let mid = (lo_i + hi_i) / 2;
        let id = self.order[mid];
        let p = self.pts[id];
        if p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y {
            out.push(id);
        }
        let (c, l, h) = if depth.is_multiple_of(2) { (p.x, lo.x, hi.x) } else { (p.y, lo.y, hi.y) };
        if l <= c {
            self.collect_box(lo_i, mid, depth + 1, lo, hi, out);
        }
        if h >= c {
            self.collect_box(mid + 1, hi_i, depth + 1, lo, hi, out);
        }
    }

    /// `cl(p, P \ {v})`: the nearest point to `p` other than `p` and `v`.
    pub fn second_closest(&self, p: PointId, v: PointId) -> Result<PointId> {
        let n = self.pts.len();
        if n < 3 {
            return Err(Error::TooFewPoints { needed: 3, got: n });
        }
        if p >= n {
            return Err(Error::UnknownPointId(p));
        }
        if v >= n {
            return Err(Error::UnknownPointId(v));
        }
        self.nearest_excluding(self.pts[p], &[p, v]).ok_or(Error::TooFewPoints { needed: 3, got: n })
    }
}

fn build_kd(ids: &mut [PointId], pts: &[Point], depth: usize) {
    if ids.len() <= 1 {
        return;
    }
    let mid = ids.len() / 2;
    if depth.is_multiple_of(2) {
        ids.select_nth_unstable_by_key(mid, |&i| (pts[i].x, i));
    } else {
        ids.select_nth_unstable_by_key(mid, |&i| (pts[i].y, i));
    }
    let (left, right) = ids.split_at_mut(mid);
    build_kd(left, pts, depth + 1);
    build_kd(&mut right[1..], pts, depth + 1);
}

/// One-shot form of [`KnnIndex::second_closest`].
pub fn second_closest(pts: &PointSet, p: PointId, v: PointId) -> Result<PointId> {
    KnnIndex::new(pts).second_closest(p, v)
}

/// `T'`: the tree with all its leaves removed, plus a back-map to the
/// local indices of the original tree.
#[derive(Debug, Clone, Default)]
pub struct SkeletonTree {
    pub tree: Tree,
    pub back_map: Vec<usize>,
}

pub fn skeleton(tree: &Tree) -> SkeletonTree {
    if tree.len() <= 2 {
        return SkeletonTree::default();
    }
    let keep: Vec<usize> = (0..tree.len()).filter(|&v| tree.adj[v].len() >= 2).collect();
    let verts: Vec<PointId> = keep.iter().map(|&v| tree.verts[v]).collect();
    let edges: Vec<WeightedEdge> = tree
        .edges
        .iter()
        .filter(|e| tree.degree(e.a) >= 2 && tree.degree(e.b) >= 2)
        .copied()
        .collect();
    let t = Tree::from_edges(verts, edges);
    let back_map = t.verts.iter().map(|&g| tree.local(g).unwrap()).collect();
    SkeletonTree { tree: t, back_map }
}
