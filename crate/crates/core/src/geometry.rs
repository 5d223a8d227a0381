//! Elementary L1 geometry on the integer lattice of the first quadrant.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub type Coord = i64;
pub type Length = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GridPoint {
    pub x: Coord,
    pub y: Coord,
}

impl GridPoint {
    pub const ORIGIN: GridPoint = GridPoint { x: 0, y: 0 };

    pub const fn new(x: Coord, y: Coord) -> Self {
        GridPoint { x, y }
    }

    /// Sum of coordinates, `||p||`.
    pub fn norm(self) -> Length {
        self.x + self.y
    }

    pub fn transposed(self) -> Self {
        GridPoint::new(self.y, self.x)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl From<(Coord, Coord)> for GridPoint {
    fn from((x, y): (Coord, Coord)) -> Self {
        GridPoint::new(x, y)
    }
}

pub fn l1_dist(p: GridPoint, q: GridPoint) -> Length {
    (p.x - q.x).abs() + (p.y - q.y).abs()
}

/// `p` covers `q` when it is weakly below and to the left of `q`.
pub fn covers(p: GridPoint, q: GridPoint) -> bool {
    p.x <= q.x && p.y <= q.y
}

/// Coordinate-wise minimum `<p,q>`.
pub fn meet(p: GridPoint, q: GridPoint) -> GridPoint {
    GridPoint::new(p.x.min(q.x), p.y.min(q.y))
}

/// Nearest root covering `p`; ties go to the smallest index in `roots`.
///
/// Returns `None` only when no root covers `p`, which cannot happen for a
/// first-quadrant point once the origin is among the roots.
pub fn nearest_covering_root(p: GridPoint, roots: &[GridPoint]) -> Option<(GridPoint, Length)> {
    let mut best: Option<(GridPoint, Length)> = None;
    for &r in roots {
        if !covers(r, p) {
            continue;
        }
        let d = l1_dist(p, r);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((r, d));
        }
    }
    best
}

/// An RSFA instance: terminals `points` (P) and `roots` (R), with the origin in R.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Instance {
    pub points: Vec<GridPoint>,
    pub roots: Vec<GridPoint>,
}

impl Instance {
    pub fn new(points: Vec<GridPoint>, roots: Vec<GridPoint>) -> Result<Self> {
        let inst = Instance { points, roots };
        inst.check()?;
        Ok(inst)
    }

    /// Single-root RSA instance rooted at the origin.
    pub fn rsa(points: Vec<GridPoint>) -> Result<Self> {
        Instance::new(points, vec![GridPoint::ORIGIN])
    }

    pub fn check(&self) -> Result<()> {
        let mut roots = HashSet::new();
        for &r in &self.roots {
            if r.x < 0 || r.y < 0 {
                return Err(Error::NegativeCoordinate(r));
            }
            if !roots.insert(r) {
                return Err(Error::DuplicateRoot(r));
            }
        }
        if !roots.contains(&GridPoint::ORIGIN) {
            return Err(Error::MissingOrigin);
        }
        let mut points = HashSet::new();
        for &p in &self.points {
            if p.x < 0 || p.y < 0 {
                return Err(Error::NegativeCoordinate(p));
            }
            if roots.contains(&p) {
                return Err(Error::PointOnRoot(p));
            }
            if !points.insert(p) {
                return Err(Error::DuplicatePoint(p));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.roots.len()
    }

    /// Terminals followed by roots.
    pub fn all_points(&self) -> Vec<GridPoint> {
        self.points.iter().chain(self.roots.iter()).copied().collect()
    }

    /// True when no two of the n+m points share an x- or a y-coordinate.
    pub fn in_general_position(&self) -> bool {
        let all = self.all_points();
        let xs: HashSet<_> = all.iter().map(|p| p.x).collect();
        let ys: HashSet<_> = all.iter().map(|p| p.y).collect();
        xs.len() == all.len() && ys.len() == all.len()
    }

    /// Mirror along the diagonal; preserves covering and L1 distances.
    pub fn transposed(&self) -> Instance {
        Instance {
            points: self.points.iter().map(|p| p.transposed()).collect(),
            roots: self.roots.iter().map(|p| p.transposed()).collect(),
        }
    }

    /// Multiply every coordinate by `s`.
    pub fn scaled(&self, s: Coord) -> Instance {
        let f = |p: &GridPoint| GridPoint::new(p.x * s, p.y * s);
        Instance {
            points: self.points.iter().map(f).collect(),
            roots: self.roots.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: Coord, y: Coord) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(l1_dist(p(0, 0), p(3, 4)), 7);
        assert_eq!(l1_dist(p(2, 2), p(2, 2)), 0);
        assert_eq!(l1_dist(p(1, 3), p(3, 1)), 4);
    }

    #[test]
    fn cover_examples() {
        assert!(covers(p(1, 2), p(3, 4)));
        assert!(covers(p(2, 2), p(2, 2)));
        assert!(!covers(p(2, 1), p(1, 3)));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(p(2, 5), p(4, 1)), p(2, 1));
        assert_eq!(meet(p(2, 3), p(2, 5)), p(2, 3));
        assert_eq!(meet(p(0, 0), p(7, 9)), p(0, 0));
    }

    #[test]
    fn nearest_root_examples() {
        assert_eq!(nearest_covering_root(p(5, 5), &[p(0, 0), p(4, 5)]), Some((p(4, 5), 1)));
        assert_eq!(nearest_covering_root(p(1, 3), &[p(0, 0), p(2, 2)]), Some((p(0, 0), 4)));
        assert_eq!(nearest_covering_root(p(0, 0), &[p(0, 0)]), Some((p(0, 0), 0)));
    }

    #[test]
    fn nearest_root_ties_take_first() {
        let roots = [p(0, 0), p(2, 0), p(0, 2)];
        assert_eq!(nearest_covering_root(p(2, 2), &roots), Some((p(2, 0), 2)));
    }

    #[test]
    fn instance_validation() {
        assert_eq!(Instance::new(vec![p(1, 1)], vec![p(1, 0)]), Err(Error::MissingOrigin));
        assert_eq!(
            Instance::new(vec![], vec![p(0, 0), p(0, 0)]),
            Err(Error::DuplicateRoot(p(0, 0)))
        );
        assert_eq!(
            Instance::new(vec![p(0, 0)], vec![p(0, 0)]),
            Err(Error::PointOnRoot(p(0, 0)))
        );
        assert_eq!(
            Instance::new(vec![p(1, 1), p(1, 1)], vec![p(0, 0)]),
            Err(Error::DuplicatePoint(p(1, 1)))
        );
        assert!(Instance::new(vec![p(-1, 1)], vec![p(0, 0)]).is_err());
        assert!(Instance::rsa(vec![p(3, 4)]).is_ok());
    }

    fn pt() -> impl Strategy<Value = GridPoint> {
        (0i64..20, 0i64..20).prop_map(|(x, y)| GridPoint::new(x, y))
    }

    proptest! {
        #[test]
        fn meet_is_symmetric_and_covers_both(a in pt(), b in pt()) {
            let m = meet(a, b);
            prop_assert_eq!(m, meet(b, a));
            prop_assert!(covers(m, a) && covers(m, b));
        }

        #[test]
        fn l1_is_a_metric(a in pt(), b in pt(), c in pt()) {
            prop_assert!(l1_dist(a, c) <= l1_dist(a, b) + l1_dist(b, c));
            prop_assert_eq!(l1_dist(a, b) == 0, a == b);
        }

        #[test]
        fn covers_is_a_partial_order(a in pt(), b in pt(), c in pt()) {
            prop_assert!(covers(a, a));
            if covers(a, b) && covers(b, a) {
                prop_assert_eq!(a, b);
            }
            if covers(a, b) && covers(b, c) {
                prop_assert!(covers(a, c));
            }
        }

        #[test]
        fn covered_distance_is_coordinate_difference(r in pt(), q in pt()) {
            if covers(r, q) {
                prop_assert_eq!(l1_dist(q, r), (q.x - r.x) + (q.y - r.y));
            }
        }
    }
}
