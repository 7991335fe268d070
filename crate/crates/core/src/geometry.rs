//! Exact planar predicates over integer-scaled coordinates.
//!
//! Every point coordinate is a decimal scaled by [`SCALE`] and stored as an
//! `i64`. Orientation, crossing, and angle-threshold tests are evaluated in
//! exact integer arithmetic; only the magnitude returned by [`cw_angle`] is a
//! floating-point value.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Decimal scaling applied to input coordinates (six decimal places).
pub const SCALE: i64 = 1_000_000;

/// Largest accepted magnitude of a scaled coordinate. Keeps every difference
/// within 2^53 so products of two differences fit comfortably in `i128`.
pub const MAX_COORD: i64 = 1 << 52;

pub type PointId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Builds a point from real coordinates, rounding to the nearest
    /// representable scaled value.
    pub fn from_f64(x: f64, y: f64) -> Self {
        Point {
            x: (x * SCALE as f64).round() as i64,
            y: (y * SCALE as f64).round() as i64,
        }
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.x as f64 / SCALE as f64, self.y as f64 / SCALE as f64)
    }

    fn sub(self, o: Point) -> (i128, i128) {
        (self.x as i128 - o.x as i128, self.y as i128 - o.y as i128)
    }
}

/// Squared Euclidean length in scaled units, compared exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SqLen(pub i128);

impl SqLen {
    pub const ZERO: SqLen = SqLen(0);

    /// The squared length of a real-valued length `len` (unscaled units),
    /// rounded down so that `SqLen::from_len(d) <= sq_dist` whenever the
    /// true distance is at least `d`.
    pub fn from_len(len: f64) -> SqLen {
        let s = len * SCALE as f64;
        SqLen((s * s).floor() as i128)
    }

    /// Real (unscaled) length.
    pub fn length(self) -> f64 {
        (self.0 as f64).sqrt() / SCALE as f64
    }
}

/// The input point set; point ids are dense indices into it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Self {
        PointSet { points }
    }

    pub fn from_f64(coords: &[(f64, f64)]) -> Self {
        PointSet::new(coords.iter().map(|&(x, y)| Point::from_f64(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn get(&self, id: PointId) -> Result<Point> {
        self.points.get(id).copied().ok_or(Error::UnknownPointId(id))
    }

    /// Unchecked access for ids already validated by the caller.
    #[inline]
    pub fn p(&self, id: PointId) -> Point {
        self.points[id]
    }

    pub fn sq_dist(&self, a: PointId, b: PointId) -> SqLen {
        sq_dist(self.points[a], self.points[b])
    }

    pub fn check_ids(&self, ids: &[PointId]) -> Result<()> {
        match ids.iter().find(|&&i| i >= self.points.len()) {
            Some(&bad) => Err(Error::UnknownPointId(bad)),
            None => Ok(()),
        }
    }

    /// Fails on the first pair of coincident points (by smallest second id).
    pub fn check_distinct(&self) -> Result<()> {
        let mut seen = std::collections::HashMap::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if let Some(&first) = seen.get(&(p.x, p.y)) {
                return Err(Error::DuplicatePoint { first, second: i });
            }
            seen.insert((p.x, p.y), i);
        }
        Ok(())
    }
}

#[inline]
pub fn sq_dist(a: Point, b: Point) -> SqLen {
    let (dx, dy) = a.sub(b);
    SqLen(dx * dx + dy * dy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub a: PointId,
    pub b: PointId,
    pub squared_length: SqLen,
}

impl Segment {
    pub fn new(pts: &PointSet, a: PointId, b: PointId) -> Result<Segment> {
        let (pa, pb) = (pts.get(a)?, pts.get(b)?);
        if a == b {
            return Err(Error::DegenerateSegment(a));
        }
        Ok(Segment { a, b, squared_length: sq_dist(pa, pb) })
    }
}

/// Twice the signed area of triangle `a b c`; positive when counterclockwise.
#[inline]
pub fn cross(a: Point, b: Point, c: Point) -> i128 {
    let (ux, uy) = b.sub(a);
    let (vx, vy) = c.sub(a);
    ux * vy - uy * vx
}

/// Dot product of `b - a` and `c - a`.
#[inline]
pub fn dot(a: Point, b: Point, c: Point) -> i128 {
    let (ux, uy) = b.sub(a);
    let (vx, vy) = c.sub(a);
    ux * vx + uy * vy
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

pub fn orient(a: Point, b: Point, c: Point) -> Orientation {
    match cross(a, b, c).cmp(&0) {
        Ordering::Greater => Orientation::CounterClockwise,
        Ordering::Less => Orientation::Clockwise,
        Ordering::Equal => Orientation::Collinear,
    }
}

/// `c` lies on the closed segment `ab`, given that it is collinear with it.
fn within_box(a: Point, b: Point, c: Point) -> bool {
    c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
}

/// Crossing test on raw points with the matching semantics: the closed
/// segments cross iff they meet at a point interior to at least one of them.
pub fn crosses(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = cross(a, b, c).signum();
    let o2 = cross(a, b, d).signum();
    let o3 = cross(c, d, a).signum();
    let o4 = cross(c, d, b).signum();

    if o1 == 0 && o2 == 0 {
        // Collinear: compare the parameter intervals along the dominant axis.
        let key = |p: Point| if a.x != b.x || c.x != d.x { p.x } else { p.y };
        let (s0, s1) = (key(a).min(key(b)), key(a).max(key(b)));
        let (t0, t1) = (key(c).min(key(d)), key(c).max(key(d)));
        return s0.max(t0) < s1.min(t1);
    }
    if o1 == 0 && within_box(a, b, c) {
        return c != a && c != b;
    }
    if o2 == 0 && within_box(a, b, d) {
        return d != a && d != b;
    }
    if o3 == 0 && within_box(c, d, a) {
        return a != c && a != d;
    }
    if o4 == 0 && within_box(c, d, b) {
        return b != c && b != d;
    }
    o1 * o2 < 0 && o3 * o4 < 0
}

pub fn segments_cross(pts: &PointSet, s1: &Segment, s2: &Segment) -> Result<bool> {
    let (a, b) = (pts.get(s1.a)?, pts.get(s1.b)?);
    let (c, d) = (pts.get(s2.a)?, pts.get(s2.b)?);
    Ok(crosses(a, b, c, d))
}

/// Clockwise rotation taking ray `v -> a` onto ray `v -> b`, in `[0, 2π)`.
pub fn cw_angle(a: Point, v: Point, b: Point) -> Result<f64> {
    if a == v || b == v {
        return Err(Error::DegenerateAngle);
    }
    Ok(cw_angle_unchecked(a, v, b))
}

pub(crate) fn cw_angle_unchecked(a: Point, v: Point, b: Point) -> f64 {
    let c = cross(v, a, b);
    let d = dot(v, a, b);
    if c == 0 {
        return if d > 0 { 0.0 } else { PI };
    }
    let ccw = (c as f64).atan2(d as f64);
    let cw = if ccw < 0.0 { -ccw } else { 2.0 * PI - ccw };
    // keep the float on the side of π given by the exact sign
    if c < 0 {
        cw.min(PI - f64::EPSILON)
    } else {
        cw.max(PI + f64::EPSILON * 4.0)
    }
}

/// Exact: the clockwise angle from `v -> a` to `v -> b` is in `(0, π)`.
#[inline]
pub fn cw_lt_pi(a: Point, v: Point, b: Point) -> bool {
    cross(v, a, b) < 0
}

/// Exact: the clockwise angle from `v -> a` to `v -> b` is at least π.
#[inline]
pub fn cw_ge_pi(a: Point, v: Point, b: Point) -> bool {
    let c = cross(v, a, b);
    c > 0 || (c == 0 && dot(v, a, b) < 0)
}

/// Exact: the clockwise angle from `v -> a` to `v -> b` is in `[0, π/2]`.
#[inline]
pub fn cw_le_half_pi(a: Point, v: Point, b: Point) -> bool {
    let c = cross(v, a, b);
    let d = dot(v, a, b);
    (c < 0 && d >= 0) || (c == 0 && d > 0)
}

/// Exact: the unsigned angle between `v -> a` and `v -> b` is at most π/3.
pub fn angle_le_third_pi(a: Point, v: Point, b: Point) -> bool {
    let d = dot(v, a, b);
    if d < 0 {
        return false;
    }
    let la = sq_dist(v, a).0;
    let lb = sq_dist(v, b).0;
    // cos θ >= 1/2  <=>  4 d² >= |a|²|b|²
    mul_cmp(2 * d, 2 * d, la, lb) != Ordering::Less
}

/// Exact: `v a b` is an equilateral triangle.
pub fn is_equilateral(v: Point, a: Point, b: Point) -> bool {
    let s = sq_dist(v, a);
    s == sq_dist(v, b) && s == sq_dist(a, b) && s.0 > 0
}

/// Sorting key for the clockwise angle of `p` around `v`, measured from the
/// ray `v -> r`. Keys compare exactly via [`cw_order`].
pub fn cw_order(v: Point, r: Point, a: Point, b: Point) -> Ordering {
    let half = |p: Point| -> u8 {
        let c = cross(v, r, p);
        if c == 0 && dot(v, r, p) > 0 {
            0
        } else if c < 0 {
            1
        } else if c == 0 {
            2
        } else {
            3
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    // same half: b comes later iff b is clockwise of a
    cross(v, a, b).cmp(&0)
}

/// Compares `a*b` with `c*d` exactly using 256-bit intermediates.
pub fn mul_cmp(a: i128, b: i128, c: i128, d: i128) -> Ordering {
    let sign = |x: i128, y: i128| -> i8 {
        if x == 0 || y == 0 {
            0
        } else if (x < 0) == (y < 0) {
            1
        } else {
            -1
        }
    };
    let (s1, s2) = (sign(a, b), sign(c, d));
    if s1 != s2 {
        return s1.cmp(&s2);
    }
    if s1 == 0 {
        return Ordering::Equal;
    }
    let m1 = wide_mul(a.unsigned_abs(), b.unsigned_abs());
    let m2 = wide_mul(c.unsigned_abs(), d.unsigned_abs());
    if s1 > 0 {
        m1.cmp(&m2)
    } else {
        m2.cmp(&m1)
    }
}

/// Full 256-bit product as (high, low) limbs.
fn wide_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Convex-position test plus emptiness against `others`. The polygon is
/// given in boundary order (either orientation).
pub fn convex_empty_among<I>(poly: &[PointId], pts: &PointSet, others: I) -> Result<bool>
where
    I: IntoIterator<Item = PointId>,
{
    if poly.len() < 3 || poly.len() > 5 {
        return Err(Error::DegeneratePolygon);
    }
    pts.check_ids(poly)?;
    for (i, a) in poly.iter().enumerate() {
        if poly[i + 1..].contains(a) {
            return Err(Error::DegeneratePolygon);
        }
    }
    let m = poly.len();
    let mut sign = 0i128;
    for i in 0..m {
        let (a, b, c) = (pts.p(poly[i]), pts.p(poly[(i + 1) % m]), pts.p(poly[(i + 2) % m]));
        let s = cross(a, b, c).signum();
        if s == 0 {
            return Err(Error::DegeneratePolygon);
        }
        if sign == 0 {
            sign = s;
        } else if s != sign {
            return Ok(false);
        }
    }
    // A polygon whose turns all agree can still wind twice (a pentagram);
    // a convex one is also a fan around its first vertex.
    for i in 1..m - 1 {
        if cross(pts.p(poly[0]), pts.p(poly[i]), pts.p(poly[i + 1])).signum() != sign {
            return Ok(false);
        }
    }
    for q in others {
        if poly.contains(&q) {
            continue;
        }
        let pq = pts.get(q)?;
        let inside = (0..m).all(|i| {
            let s = cross(pts.p(poly[i]), pts.p(poly[(i + 1) % m]), pq).signum();
            s == 0 || s == sign
        });
        if inside {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn convex_empty(poly: &[PointId], pts: &PointSet) -> Result<bool> {
    convex_empty_among(poly, pts, 0..pts.len())
}

/// Orders up to five distinct points as a strictly convex polygon, or
/// returns `None` when they are not in strictly convex position.
pub fn convex_order(ids: &[PointId], pts: &PointSet) -> Option<Vec<PointId>> {
    let mut v: Vec<PointId> = ids.to_vec();
    v.sort_by_key(|&i| pts.p(i));
    v.dedup();
    if v.len() != ids.len() || v.len() < 3 {
        return None;
    }
    // Andrew's monotone chain with strict turns.
    let mut hull: Vec<PointId> = Vec::with_capacity(v.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &PointId>> =
            if pass == 0 { Box::new(v.iter()) } else { Box::new(v.iter().rev()) };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(pts.p(hull[hull.len() - 2]), pts.p(hull[hull.len() - 1]), pts.p(i)) <= 0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    if hull.len() == ids.len() {
        Some(hull)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(c: &[(f64, f64)]) -> PointSet {
        PointSet::from_f64(c)
    }

    fn seg(pts: &PointSet, a: usize, b: usize) -> Segment {
        Segment::new(pts, a, b).unwrap()
    }

    #[test]
    fn x_crossing() {
        let p = ps(&[(0., 0.), (2., 2.), (0., 2.), (2., 0.)]);
        assert!(segments_cross(&p, &seg(&p, 0, 1), &seg(&p, 2, 3)).unwrap());
    }

    #[test]
    fn shared_endpoint_does_not_cross() {
        let p = ps(&[(0., 0.), (1., 0.), (1., 0.), (1., 1.)]);
        let p2 = ps(&[(0., 0.), (1., 0.), (1., 1.)]);
        assert!(!segments_cross(&p2, &seg(&p2, 0, 1), &seg(&p2, 1, 2)).unwrap());
        // same location given twice still counts as a shared endpoint
        assert!(!crosses(p.p(0), p.p(1), p.p(2), p.p(3)));
    }

    #[test]
    fn collinear_overlap_crosses() {
        let p = ps(&[(0., 0.), (2., 0.), (1., 0.), (3., 0.)]);
        assert!(segments_cross(&p, &seg(&p, 0, 1), &seg(&p, 2, 3)).unwrap());
        let q = ps(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        assert!(!segments_cross(&q, &seg(&q, 0, 1), &seg(&q, 2, 3)).unwrap());
        assert!(!segments_cross(&q, &seg(&q, 0, 1), &seg(&q, 1, 2)).unwrap());
    }

    #[test]
    fn t_junction_crosses() {
        let p = ps(&[(0., 0.), (2., 0.), (1., 0.), (1., 1.)]);
        assert!(segments_cross(&p, &seg(&p, 0, 1), &seg(&p, 2, 3)).unwrap());
    }

    #[test]
    fn unknown_id() {
        let p = ps(&[(0., 0.), (1., 0.)]);
        let s = Segment { a: 0, b: 7, squared_length: SqLen(0) };
        assert_eq!(segments_cross(&p, &s, &seg(&p, 0, 1)), Err(Error::UnknownPointId(7)));
    }

    #[test]
    fn cw_angle_examples() {
        let (o, e, n) = (Point::from_f64(0., 0.), Point::from_f64(1., 0.), Point::from_f64(0., 1.));
        assert!((cw_angle(n, o, e).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((cw_angle(e, o, n).unwrap() - 3.0 * PI / 2.0).abs() < 1e-12);
        assert_eq!(cw_angle(e, o, e).unwrap(), 0.0);
        assert_eq!(cw_angle(o, o, e), Err(Error::DegenerateAngle));
    }

    #[test]
    fn convex_empty_examples() {
        let sq = ps(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        assert!(convex_empty(&[0, 1, 2, 3], &sq).unwrap());
        let with_center = ps(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.), (0.5, 0.5)]);
        assert!(!convex_empty(&[0, 1, 2, 3], &with_center).unwrap());
        let dart = ps(&[(0., 0.), (2., 0.), (1., 0.2), (2., 2.)]);
        assert!(!convex_empty(&[0, 1, 2, 3], &dart).unwrap());
        let col = ps(&[(0., 0.), (1., 0.), (2., 0.), (1., 1.)]);
        assert_eq!(convex_empty(&[0, 1, 2, 3], &col), Err(Error::DegeneratePolygon));
    }

    #[test]
    fn boundary_point_is_not_empty() {
        let p = ps(&[(0., 0.), (2., 0.), (0., 2.), (1., 0.)]);
        assert!(!convex_empty(&[0, 1, 2], &p).unwrap());
    }

    #[test]
    fn convex_order_rejects_reflex() {
        let sq = ps(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]);
        let o = convex_order(&[0, 1, 2, 3], &sq).unwrap();
        assert!(convex_empty(&o, &sq).unwrap());
        let dart = ps(&[(0., 0.), (2., 0.), (1., 0.2), (2., 2.)]);
        assert!(convex_order(&[0, 1, 2, 3], &dart).is_none());
    }

    #[test]
    fn threshold_predicates() {
        let o = Point::new(0, 0);
        let e = Point::new(10, 0);
        let s = Point::new(0, -10);
        assert!(cw_lt_pi(e, o, s));
        assert!(cw_le_half_pi(e, o, s));
        assert!(cw_ge_pi(s, o, e));
        assert!(cw_ge_pi(e, o, Point::new(-5, 0)));
        assert!(angle_le_third_pi(e, o, Point::new(10, 5)));
        assert!(!angle_le_third_pi(e, o, Point::new(10, 20)));
    }

    #[test]
    fn rounded_equilateral_is_not_equilateral() {
        let v = Point::from_f64(0.0, 0.0);
        let a = Point::from_f64(1.0, 0.0);
        let b = Point::from_f64(0.5, 3f64.sqrt() / 2.0);
        assert!(!is_equilateral(v, a, b));
    }

    #[test]
    fn wide_mul_matches_small() {
        for &(a, b, c, d) in &[(3i128, 4, 2, 6), (-3, 4, 2, -6), (5, 5, 4, 6), (i64::MAX as i128, 3, 1, 1)] {
            assert_eq!(mul_cmp(a, b, c, d), (a * b).cmp(&(c * d)));
        }
        let big = 1i128 << 100;
        assert_eq!(mul_cmp(big, big, big, big - 1), Ordering::Greater);
        assert_eq!(mul_cmp(-big, big, big, big - 1), Ordering::Less);
    }

    proptest::proptest! {
        #[test]
        fn wide_mul_matches_bigint(a in proptest::num::i128::ANY, b in proptest::num::i128::ANY,
                                   c in proptest::num::i128::ANY, d in proptest::num::i128::ANY) {
            use num_bigint::BigInt;
            let want = (BigInt::from(a) * BigInt::from(b)).cmp(&(BigInt::from(c) * BigInt::from(d)));
            proptest::prop_assert_eq!(mul_cmp(a, b, c, d), want);
        }
    }

    #[test]
    fn cw_order_sorts_clockwise() {
        let v = Point::new(0, 0);
        let r = Point::new(0, 10); // north
        let east = Point::new(10, 0);
        let south = Point::new(0, -10);
        let west = Point::new(-10, 0);
        let mut pts = vec![west, south, east];
        pts.sort_by(|a, b| cw_order(v, r, *a, *b));
        assert_eq!(pts, vec![east, south, west]);
    }
}
