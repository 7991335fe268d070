use std::cmp::Ordering;

use planematch::blossom::bottleneck_crossing;
use planematch::bottleneck_one::first_approx;
use planematch::bottleneck_two::{even_forest, second_approx_report, within_factor};
use planematch::geometry::{mul_cmp, Point};
use planematch::harness::{format_points, parse_points};
use planematch::matching::crossing_pairs;
use planematch::oracle::exact_bottleneck_plane;
use planematch::proximity::emst5;
use planematch::udg_matching::one_third;
use planematch::{validate, PointSet, SqLen};
use proptest::prelude::*;

/// Distinct points on a grid of the given spacing; coarse grids produce
/// many collinear and co-circular configurations.
fn point_set(max_n: usize, grid: i64) -> impl Strategy<Value = PointSet> {
    proptest::collection::btree_set((0..grid, 0..grid), 2..=max_n).prop_map(move |s| {
        let mut v: Vec<Point> = s.into_iter().map(|(x, y)| Point::new(x * 1_000_000, y * 1_000_000)).collect();
        if v.len() % 2 == 1 {
            v.pop();
        }
        PointSet::new(v)
    })
}

fn prim_lengths(pts: &PointSet) -> Vec<SqLen> {
    let n = pts.len();
    let mut best = vec![SqLen(i128::MAX); n];
    let mut done = vec![false; n];
    best[0] = SqLen::ZERO;
    let mut out = Vec::new();
    for _ in 0..n {
        let v = (0..n).filter(|&i| !done[i]).min_by_key(|&i| best[i]).unwrap();
        done[v] = true;
        if v != 0 {
            out.push(best[v]);
        }
        for u in 0..n {
            if !done[u] {
                best[u] = best[u].min(pts.sq_dist(u, v));
            }
        }
    }
    out.sort_unstable();
    out
}

fn orient(a: Point, b: Point, c: Point) -> i128 {
    (b.x as i128 - a.x as i128) * (c.y as i128 - a.y as i128) - (b.y as i128 - a.y as i128) * (c.x as i128 - a.x as i128)
}

fn segments_meet(a: Point, b: Point, c: Point, d: Point) -> bool {
    let on = |p: Point, q: Point, r: Point| {
        orient(p, q, r) == 0
            && p.x.min(q.x) <= r.x
            && r.x <= p.x.max(q.x)
            && p.y.min(q.y) <= r.y
            && r.y <= p.y.max(q.y)
    };
    let shared = [a, b].iter().filter(|p| **p == c || **p == d).count();
    if shared == 1 {
        // segments sharing one endpoint only meet elsewhere when they overlap
        let (s, x, y) = if a == c { (a, b, d) } else if a == d { (a, b, c) } else if b == c { (b, a, d) } else { (b, a, c) };
        return orient(s, x, y) == 0 && (on(s, x, y) || on(s, y, x));
    }
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1.signum() * o2.signum() < 0 && o3.signum() * o4.signum() < 0 {
        return true;
    }
    on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b)
}

fn plain_min_bottleneck(pts: &PointSet, used: &mut Vec<bool>, chosen: &mut Vec<(usize, usize)>) -> Option<SqLen> {
    let Some(i) = used.iter().position(|u| !u) else {
        let plane = chosen.iter().enumerate().all(|(k, &(a, b))| {
            chosen[k + 1..].iter().all(|&(c, d)| !segments_meet(pts.p(a), pts.p(b), pts.p(c), pts.p(d)))
        });
        return plane.then(|| chosen.iter().map(|&(a, b)| pts.sq_dist(a, b)).max().unwrap());
    };
    used[i] = true;
    let mut best: Option<SqLen> = None;
    for j in 0..used.len() {
        if !used[j] {
            used[j] = true;
            chosen.push((i, j));
            if let Some(b) = plain_min_bottleneck(pts, used, chosen) {
                best = Some(best.map_or(b, |x| x.min(b)));
            }
            chosen.pop();
            used[j] = false;
        }
    }
    used[i] = false;
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spanning_tree_is_minimum(pts in point_set(40, 12)) {
        let t = emst5(&pts).unwrap();
        prop_assert!(t.max_degree() <= 5);
        prop_assert!(t.is_connected());
        let mut got: Vec<SqLen> = t.edges.iter().map(|e| e.sq).collect();
        got.sort_unstable();
        prop_assert_eq!(got, prim_lengths(&pts));
    }

    #[test]
    fn crossing_sweep_matches_brute_force(pts in point_set(24, 8)) {
        let n = pts.len();
        let segs: Vec<(usize, usize)> = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        let mut brute = Vec::new();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let ((a, b), (c, d)) = (segs[i], segs[j]);
                if segments_meet(pts.p(a), pts.p(b), pts.p(c), pts.p(d)) {
                    brute.push((i, j));
                }
            }
        }
        prop_assert_eq!(crossing_pairs(&pts, &segs), brute);
    }

    #[test]
    fn approximations_are_plane_and_large(pts in point_set(60, 10)) {
        let n = pts.len();
        let m1 = first_approx(&pts).unwrap();
        let r1 = validate(&pts, &m1).unwrap();
        prop_assert!(r1.is_plane && r1.is_matching);
        prop_assert!(5 * m1.len() >= n);

        let rep = second_approx_report(&pts).unwrap();
        let r2 = validate(&pts, &rep.matching).unwrap();
        prop_assert!(r2.is_plane && r2.is_matching);
        prop_assert!(5 * rep.matching.len() >= 2 * n);
        let lam = rep.last_edge.unwrap().sq;
        prop_assert!(within_factor(rep.matching.bottleneck(), lam));
        for it in &rep.iterations {
            prop_assert!(it.meets_quota(), "{:?}", it);
        }
    }

    #[test]
    fn even_forest_trees_are_even(pts in point_set(50, 9)) {
        let ef = even_forest(&pts).unwrap();
        prop_assert!(ef.forest.trees.iter().all(|t| t.len() % 2 == 0));
        prop_assert_eq!(ef.forest.trees.iter().map(|t| t.len()).sum::<usize>(), pts.len());
    }

    #[test]
    fn one_third_keeps_a_third(pts in point_set(20, 30)) {
        let x = bottleneck_crossing(&pts).unwrap();
        let r = one_third(&pts, &x.matching, None).unwrap();
        prop_assert!(validate(&pts, &r.matching).unwrap().is_plane);
        prop_assert!(3 * r.matching.len() >= x.matching.len());
        prop_assert!(r.matching.bottleneck() <= x.bottleneck);
        prop_assert!(r.trace.strictly_decreasing());
    }

    #[test]
    fn point_file_round_trip(c in proptest::collection::vec((-5_000_000_000i64..5_000_000_000, -9_999_999i64..9_999_999), 1..20)) {
        let mut seen = std::collections::HashSet::new();
        let pts = PointSet::new(c.into_iter().map(|(x, y)| Point::new(x, y)).filter(|p| seen.insert(*p)).collect());
        prop_assert_eq!(parse_points(format_points(&pts).as_bytes()).unwrap(), pts);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn oracle_matches_unpruned_enumeration(pts in point_set(8, 40)) {
        let got = exact_bottleneck_plane(&pts);
        let want = plain_min_bottleneck(&pts, &mut vec![false; pts.len()], &mut Vec::new());
        match want {
            Some(w) => {
                let o = got.unwrap();
                prop_assert_eq!(o.bottleneck, w);
                prop_assert_eq!(mul_cmp(o.matching.bottleneck().0, 1, w.0, 1), Ordering::Equal);
            }
            None => prop_assert!(got.is_err()),
        }
    }
}
