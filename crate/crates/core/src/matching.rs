//! Matchings and the validator that certifies algorithm output.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{crosses, PointId, PointSet, SqLen};

/// A set of point-id pairs with its bottleneck (largest squared length).
/// Pairs are stored with the smaller id first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pairs: Vec<(PointId, PointId)>,
    bottleneck: SqLen,
}

impl Matching {
    pub fn empty() -> Matching {
        Matching::default()
    }

    pub fn from_pairs(pts: &PointSet, pairs: impl IntoIterator<Item = (PointId, PointId)>) -> Result<Matching> {
        let mut m = Matching::empty();
        for (a, b) in pairs {
            m.push(pts, a, b)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, pts: &PointSet, a: PointId, b: PointId) -> Result<()> {
        pts.check_ids(&[a, b])?;
        if a == b {
            return Err(Error::DegenerateSegment(a));
        }
        self.bottleneck = self.bottleneck.max(pts.sq_dist(a, b));
        self.pairs.push((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn extend(&mut self, pts: &PointSet, other: &Matching) -> Result<()> {
        for &(a, b) in &other.pairs {
            self.push(pts, a, b)?;
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[(PointId, PointId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn bottleneck(&self) -> SqLen {
        self.bottleneck
    }

    /// Pairs in ascending order, for reproducible output.
    pub fn sorted(&self) -> Matching {
        let mut pairs = self.pairs.clone();
        pairs.sort_unstable();
        Matching { pairs, bottleneck: self.bottleneck }
    }

    pub fn contains(&self, a: PointId, b: PointId) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Crossing,
    SharedVertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub first: (PointId, PointId),
    pub second: (PointId, PointId),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub is_matching: bool,
    pub is_plane: bool,
    pub size: usize,
    #[serde(serialize_with = "ser_len")]
    pub bottleneck: SqLen,
    pub violations: Vec<Violation>,
}

fn ser_len<S: serde::Serializer>(v: &SqLen, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(v.length())
}

/// Checks vertex-disjointness and planarity of `m` over `pts`.
pub fn validate(pts: &PointSet, m: &Matching) -> Result<ValidationReport> {
    for &(a, b) in m.pairs() {
        pts.check_ids(&[a, b])?;
    }
    let mut violations = Vec::new();
    let mut owner: HashMap<PointId, usize> = HashMap::new();
    for (i, &(a, b)) in m.pairs().iter().enumerate() {
        for v in [a, b] {
            if let Some(&j) = owner.get(&v) {
                violations.push(Violation {
                    kind: ViolationKind::SharedVertex,
                    first: m.pairs()[j],
                    second: (a, b),
                });
            } else {
                owner.insert(v, i);
            }
        }
    }
    let is_matching = violations.is_empty();
    let crossings = crossing_pairs(pts, m.pairs());
    let is_plane = crossings.is_empty();
    violations.extend(crossings.into_iter().map(|(i, j)| Violation {
        kind: ViolationKind::Crossing,
        first: m.pairs()[i],
        second: m.pairs()[j],
    }));
    let bottleneck = m.pairs().iter().map(|&(a, b)| pts.sq_dist(a, b)).max().unwrap_or(SqLen::ZERO);
    Ok(ValidationReport { is_matching, is_plane, size: m.len(), bottleneck, violations })
}

/// Index pairs `(i, j)`, `i < j`, of crossing segments. Sweeps by the left
/// end of each bounding box.
pub fn crossing_pairs(pts: &PointSet, segs: &[(PointId, PointId)]) -> Vec<(usize, usize)> {
    let bbox = |&(a, b): &(PointId, PointId)| {
        let (p, q) = (pts.p(a), pts.p(b));
        (p.x.min(q.x), p.x.max(q.x), p.y.min(q.y), p.y.max(q.y))
    };
    let boxes: Vec<_> = segs.iter().map(bbox).collect();
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_unstable_by_key(|&i| boxes[i].0);
    let mut active: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for &i in &order {
        let (x0, _, y0, y1) = boxes[i];
        active.retain(|&j| boxes[j].1 >= x0);
        for &j in &active {
            if boxes[j].3 < y0 || boxes[j].2 > y1 {
                continue;
            }
            let (a, b) = segs[i];
            let (c, d) = segs[j];
            if crosses(pts.p(a), pts.p(b), pts.p(c), pts.p(d)) {
                out.push((i.min(j), i.max(j)));
            }
        }
        active.push(i);
    }
    out.sort_unstable();
    out
}

/// True if no two of the segments cross.
pub fn is_plane(pts: &PointSet, segs: &[(PointId, PointId)]) -> bool {
    crossing_pairs(pts, segs).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(c: &[(f64, f64)]) -> PointSet {
        PointSet::from_f64(c)
    }

    #[test]
    fn collinear_pairs_are_valid() {
        let p = ps(&[(0., 0.), (1., 0.), (2., 0.), (3., 0.)]);
        let m = Matching::from_pairs(&p, [(0, 1), (2, 3)]).unwrap();
        let r = validate(&p, &m).unwrap();
        assert!(r.is_matching && r.is_plane);
        assert_eq!(r.size, 2);
        assert_eq!(r.bottleneck, SqLen::from_len(1.0));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn diagonals_cross() {
        let p = ps(&[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
        let m = Matching::from_pairs(&p, [(0, 3), (1, 2)]).unwrap();
        let r = validate(&p, &m).unwrap();
        assert!(r.is_matching && !r.is_plane);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::Crossing);
    }

    #[test]
    fn shared_vertex_is_not_matching() {
        let p = ps(&[(0., 0.), (1., 0.), (2., 0.)]);
        let m = Matching::from_pairs(&p, [(0, 1), (1, 2)]).unwrap();
        let r = validate(&p, &m).unwrap();
        assert!(!r.is_matching);
        assert!(r.is_plane);
        assert_eq!(r.violations[0].kind, ViolationKind::SharedVertex);
    }

    #[test]
    fn unknown_id_is_rejected() {
        let p = ps(&[(0., 0.), (1., 0.)]);
        assert_eq!(Matching::from_pairs(&p, [(0, 5)]).unwrap_err(), Error::UnknownPointId(5));
    }

    #[test]
    fn sweep_matches_all_pairs() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c: Vec<(f64, f64)> =
                (0..24).map(|_| (rng.random_range(0..50) as f64, rng.random_range(0..50) as f64)).collect();
            let p = ps(&c);
            let segs: Vec<(usize, usize)> = (0..12).map(|i| (2 * i, 2 * i + 1)).filter(|&(a, b)| p.p(a) != p.p(b)).collect();
            let mut brute = Vec::new();
            for i in 0..segs.len() {
                for j in i + 1..segs.len() {
                    let (a, b) = segs[i];
                    let (c, d) = segs[j];
                    if crosses(p.p(a), p.p(b), p.p(c), p.p(d)) {
                        brute.push((i, j));
                    }
                }
            }
            assert_eq!(crossing_pairs(&p, &segs), brute);
        }
    }
}
