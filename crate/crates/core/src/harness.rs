//! Point files, instance generators, run reports and SVG output.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mul_cmp, Point, PointSet, SqLen, MAX_COORD, SCALE};
use crate::matching::{validate, Matching};
use crate::{blossom, bottleneck_one, bottleneck_two, oracle, udg_matching};

/// Squared approximation factor of the second algorithm, rounded up:
/// `FACTOR2_NUM / FACTOR2_DEN ≥ (√2+√3)²`.
pub const FACTOR2_NUM: i128 = 9_898_979_486;
pub const FACTOR2_DEN: i128 = 1_000_000_000;

fn parse_coord(tok: &str, line: usize) -> Result<i64> {
    let bad = |msg: &str| Error::FormatError { line, msg: format!("{msg}: {tok:?}") };
    let (neg, body) = match tok.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, tok.strip_prefix('+').unwrap_or(tok)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad("empty number"));
    }
    if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("not a decimal number"));
    }
    if frac.len() > 6 {
        return Err(bad("more than 6 decimal places"));
    }
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad("out of range"))? };
    let mut f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad("out of range"))? };
    for _ in frac.len()..6 {
        f *= 10;
    }
    let v = whole.checked_mul(SCALE).and_then(|w| w.checked_add(f)).ok_or_else(|| bad("out of range"))?;
    if v > MAX_COORD {
        return Err(bad("out of range"));
    }
    Ok(if neg { -v } else { v })
}

/// Parses `n` followed by `n` lines of `x y`.
pub fn parse_points(text: &[u8]) -> Result<PointSet> {
    let text = std::str::from_utf8(text).map_err(|_| Error::FormatError { line: 0, msg: "not UTF-8".into() })?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (l0, first) = lines.next().ok_or(Error::FormatError { line: 1, msg: "missing point count".into() })?;
    let n: usize = first
        .trim()
        .parse()
        .map_err(|_| Error::FormatError { line: l0 + 1, msg: format!("bad point count {:?}", first.trim()) })?;
    let mut points = Vec::with_capacity(n);
    for (i, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::FormatError { line: i + 1, msg: "expected two coordinates".into() });
        }
        points.push(Point::new(parse_coord(toks[0], i + 1)?, parse_coord(toks[1], i + 1)?));
    }
    if points.len() != n {
        return Err(Error::FormatError { line: 1, msg: format!("declared {n} points, found {}", points.len()) });
    }
    let pts = PointSet::new(points);
    pts.check_distinct()?;
    Ok(pts)
}

fn fmt_coord(v: i64) -> String {
    let a = v.unsigned_abs();
    let s = SCALE as u64;
    let sign = if v < 0 { "-" } else { "" };
    if a.is_multiple_of(s) {
        format!("{sign}{}", a / s)
    } else {
        let frac = format!("{:06}", a % s);
        format!("{sign}{}.{}", a / s, frac.trim_end_matches('0'))
    }
}

/// Inverse of [`parse_points`].
pub fn format_points(pts: &PointSet) -> String {
    let mut out = format!("{}\n", pts.len());
    for p in pts.points() {
        let _ = writeln!(out, "{} {}", fmt_coord(p.x), fmt_coord(p.y));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenMode {
    Uniform,
    Clustered,
    StarChain,
}

impl std::str::FromStr for GenMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GenMode::Uniform),
            "clustered" => Ok(GenMode::Clustered),
            "star-chain" => Ok(GenMode::StarChain),
            _ => Err(Error::BadParameters(format!("unknown mode {s:?}"))),
        }
    }
}

const SIDE: i64 = 1000 * SCALE;

fn push_new(seen: &mut HashSet<Point>, out: &mut Vec<Point>, p: Point) {
    if seen.insert(p) {
        out.push(p);
    }
}

/// Deterministic instance for `(n, seed, mode)`.
pub fn gen_points(n: usize, seed: u64, mode: GenMode) -> Result<PointSet> {
    if n < 2 {
        return Err(Error::BadParameters(format!("need at least 2 points, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    match mode {
        GenMode::Uniform => {
            while out.len() < n {
                let p = Point::new(rng.random_range(0..=SIDE), rng.random_range(0..=SIDE));
                push_new(&mut seen, &mut out, p);
            }
        }
        GenMode::Clustered => {
            let k = (n / 20).max(1);
            let r = 20 * SCALE;
            let centres: Vec<Point> =
                (0..k).map(|_| Point::new(rng.random_range(r..=SIDE - r), rng.random_range(r..=SIDE - r))).collect();
            while out.len() < n {
                let c = centres[rng.random_range(0..k)];
                let (dx, dy) = (rng.random_range(-r..=r), rng.random_range(-r..=r));
                if (dx as i128).pow(2) + (dy as i128).pow(2) <= (r as i128).pow(2) {
                    push_new(&mut seen, &mut out, Point::new(c.x + dx, c.y + dy));
                }
            }
        }
        GenMode::StarChain => return star_chain(n, &mut rng),
    }
    Ok(PointSet::new(out))
}

/// Edge length used for "unit" edges: just below 1 so that rounding to six
/// decimals never pushes an edge past the unit radius.
const UNIT: f64 = 0.99999;

fn star_chain(n: usize, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let (chain, pad) = match n % 5 {
        1 => (n, false),
        3 if n >= 8 => (n - 2, true),
        _ => return Err(Error::BadParameters(format!("star-chain needs n ≡ 1 or 3 (mod 5), got {n}"))),
    };
    let k = (chain - 1) / 5;
    let rot = rng.random_range(0.0..2.0 * PI);
    let at = |x: f64, y: f64, a: f64| (x + UNIT * a.cos(), y + UNIT * a.sin());
    let mut c: Vec<(f64, f64)> = Vec::with_capacity(n);
    let (mut x, mut y) = (500.0, 500.0);
    let mut heading = rot;
    for i in 0..k {
        c.push((x, y));
        // neighbours of a centre sit on a regular pentagon starting at the incoming connector
        let back = heading + PI;
        let out = if i % 2 == 0 { 2 } else { 3 };
        for j in 0..5 {
            let a = back + j as f64 * 2.0 * PI / 5.0;
            if j == 0 && i > 0 {
                continue;
            }
            if j == out && i + 1 < k {
                heading = a;
                continue;
            }
            c.push(at(x, y, a));
        }
        if i + 1 < k {
            let conn = at(x, y, heading);
            c.push(conn);
            (x, y) = at(conn.0, conn.1, heading);
        }
    }
    if pad {
        c.push((x + 50.0, y + 50.0));
        c.push((x + 50.0 + UNIT, y + 50.0));
    }
    debug_assert_eq!(c.len(), n);
    Ok(PointSet::from_f64(&c))
}

/// Random tree-shaped unit disk graph: every point has exactly one
/// neighbour within distance 1 among the points placed before it.
pub fn random_tree_udg(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut pts = vec![Point::from_f64(0.0, 0.0)];
    let one = SqLen::from_len(1.0);
    while c.len() < n {
        let (px, py) = c[rng.random_range(0..c.len())];
        let a = rng.random_range(0.0..2.0 * PI);
        let d = rng.random_range(0.5..UNIT);
        let q = Point::from_f64(px + d * a.cos(), py + d * a.sin());
        let near = pts.iter().filter(|&&p| crate::geometry::sq_dist(p, q) <= one).count();
        // 1.1 margin keeps non-edges clearly outside the unit radius
        let close = pts.iter().filter(|&&p| crate::geometry::sq_dist(p, q) <= SqLen::from_len(1.1)).count();
        if near == 1 && close == 1 {
            c.push(q.to_f64());
            pts.push(q);
        }
    }
    PointSet::new(pts)
}

/// Regular polygon with sides just under 1, rotated by a seeded angle;
/// its unit disk graph is the cycle for `n ≥ 4`.
pub fn random_cycle_udg(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = rng.random_range(0.0..2.0 * PI);
    let r = UNIT / (2.0 * (PI / n as f64).sin());
    let c: Vec<(f64, f64)> =
        (0..n).map(|i| i as f64 * 2.0 * PI / n as f64 + rot).map(|a| (r * a.cos(), r * a.sin())).collect();
    PointSet::from_f64(&c)
}

/// Random connected unit disk graph grown by attaching points near
/// existing ones.
pub fn random_connected_udg(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut pts = Vec::with_capacity(n);
    push_new(&mut seen, &mut pts, Point::new(0, 0));
    while pts.len() < n {
        let (px, py) = pts[rng.random_range(0..pts.len())].to_f64();
        let a = rng.random_range(0.0..2.0 * PI);
        let d = rng.random_range(0.2..UNIT);
        push_new(&mut seen, &mut pts, Point::from_f64(px + d * a.cos(), py + d * a.sin()));
    }
    PointSet::new(pts)
}

/// SVG drawing with y pointing up; byte-identical for identical input.
pub fn render_svg(pts: &PointSet, m: &Matching) -> Vec<u8> {
    let f = |v: i64| v as f64 / SCALE as f64;
    let (mut x0, mut y0, mut x1, mut y1) = (0i64, 0i64, 0i64, 0i64);
    if let Some(p) = pts.points().first() {
        (x0, y0, x1, y1) = (p.x, p.y, p.x, p.y);
    }
    for p in pts.points() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let ext = f((x1 - x0).max(y1 - y0)).max(1e-6);
    let margin = 0.05 * ext;
    let r = 0.005 * ext;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        f(x0) - margin,
        -f(y1) - margin,
        f(x1 - x0) + 2.0 * margin,
        f(y1 - y0) + 2.0 * margin
    );
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="{:.6}">"#, r / 2.0);
    for &(a, b) in m.sorted().pairs() {
        let (p, q) = (pts.p(a), pts.p(b));
        let _ = writeln!(s, r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"/>"#, f(p.x), -f(p.y), f(q.x), -f(q.y));
    }
    let _ = writeln!(s, "</g>\n<g fill=\"red\">");
    for p in pts.points() {
        let _ = writeln!(s, r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#, f(p.x), -f(p.y), r);
    }
    s.push_str("</g>\n</svg>\n");
    s.into_bytes()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Exact,
    UdgMatch,
    OneThird,
    Approx1,
    Approx2,
    CrossingBottleneck,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::UdgMatch => "udg-match",
            Algorithm::OneThird => "one-third",
            Algorithm::Approx1 => "approx1",
            Algorithm::Approx2 => "approx2",
            Algorithm::CrossingBottleneck => "crossing-bottleneck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub size_bound: bool,
    pub length_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub n: usize,
    pub size: usize,
    pub bottleneck: f64,
    pub plane: bool,
    pub edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub checks: Option<Checks>,
    /// Reference bottleneck the length check was made against.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Set when the rotation cap of `one-third` fired.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub capped: Option<bool>,
    pub ms: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub oracle: bool,
    pub cap: Option<u64>,
    pub seed: Option<u64>,
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Runs one algorithm and, with `opts.oracle`, checks its guarantee.
pub fn run(alg: Algorithm, pts: &PointSet, opts: RunOptions) -> Result<(Matching, RunReport)> {
    let n = pts.len();
    let t = Instant::now();
    let mut capped = None;
    let mut crossing_ref = None;
    let m = match alg {
        Algorithm::Exact => oracle::exact_bottleneck_plane(pts)?.matching,
        Algorithm::UdgMatch => udg_matching::plane_matching_alg1(pts)?,
        Algorithm::OneThird => {
            let x = blossom::bottleneck_crossing(pts)?;
            let r = udg_matching::one_third(pts, &x.matching, opts.cap)?;
            capped = Some(r.capped.is_some());
            crossing_ref = Some((x.bottleneck, x.matching.len()));
            r.matching
        }
        Algorithm::Approx1 => bottleneck_one::first_approx(pts)?,
        Algorithm::Approx2 => bottleneck_two::second_approx(pts)?,
        Algorithm::CrossingBottleneck => blossom::bottleneck_crossing(pts)?.matching,
    };
    let ms = t.elapsed().as_secs_f64() * 1e3;
    let v = validate(pts, &m)?;
    let mut checks = None;
    let mut reference = None;
    if opts.oracle {
        let b = m.bottleneck();
        let (size_bound, length_bound, refl) = match alg {
            Algorithm::UdgMatch => {
                (m.len() >= ceil_div(n.saturating_sub(1), 5), b <= SqLen::from_len(1.0), SqLen::from_len(1.0))
            }
            Algorithm::OneThird => {
                let (lx, mx) = crossing_ref.unwrap();
                (m.len() >= ceil_div(mx, 3), b <= lx, lx)
            }
            _ => {
                let opt = oracle::exact_bottleneck_plane(pts)?.bottleneck;
                let (size, len) = match alg {
                    Algorithm::Approx1 => (ceil_div(n, 5), b <= opt),
                    Algorithm::Approx2 => {
                        (ceil_div(2 * n, 5), mul_cmp(b.0, FACTOR2_DEN, opt.0, FACTOR2_NUM) != Ordering::Greater)
                    }
                    _ => (n / 2, b <= opt),
                };
                (m.len() >= size, len, opt)
            }
        };
        checks = Some(Checks { size_bound: size_bound && v.is_plane && v.is_matching, length_bound });
        reference = Some(refl.length());
    }
    let report = RunReport {
        algorithm: alg.name().into(),
        n,
        size: m.len(),
        bottleneck: m.bottleneck().length(),
        plane: v.is_plane,
        edges: m.pairs().iter().map(|&(a, b)| [a, b]).collect(),
        checks,
        reference,
        seed: opts.seed,
        capped,
        ms,
    };
    Ok((m, report))
}
