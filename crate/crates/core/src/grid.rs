//! The Hanan grid of a point set, indexed column-major bottom-to-top.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{Coord, GridPoint, Length};
use crate::rect_graph::{RectGraph, Segment};

/// `v` vertical by `h` horizontal lines. Intersection `c_k` (1-based) sits in
/// column `(k-1) / h` and row `(k-1) % h`, so `c_{k-1}` is directly below `c_k`
/// unless `k ≡ 1 (mod h)` and `c_{k-h}` is its left neighbour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HananGrid {
    pub xs: Vec<Coord>,
    pub ys: Vec<Coord>,
}

/// A unit grid edge between two adjacent intersections (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridEdge {
    pub from: usize,
    pub to: usize,
    pub len: Length,
}

impl HananGrid {
    /// Grid through all points of `points`. An empty input gives an empty grid.
    pub fn build(points: &[GridPoint]) -> HananGrid {
        let xs: BTreeSet<_> = points.iter().map(|p| p.x).collect();
        let ys: BTreeSet<_> = points.iter().map(|p| p.y).collect();
        HananGrid { xs: xs.into_iter().collect(), ys: ys.into_iter().collect() }
    }

    pub fn v(&self) -> usize {
        self.xs.len()
    }

    pub fn h(&self) -> usize {
        self.ys.len()
    }

    pub fn len(&self) -> usize {
        self.v() * self.h()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// 1-based lexicographic index of `p`.
    pub fn index_of(&self, p: GridPoint) -> Result<usize> {
        let col = self.xs.binary_search(&p.x).map_err(|_| Error::NotOnGrid(p))?;
        let row = self.ys.binary_search(&p.y).map_err(|_| Error::NotOnGrid(p))?;
        Ok(col * self.h() + row + 1)
    }

    /// Inverse of [`index_of`](Self::index_of); `k` is 1-based.
    pub fn point_at(&self, k: usize) -> GridPoint {
        assert!(k >= 1 && k <= self.len(), "grid index {k} out of range");
        let i = k - 1;
        GridPoint::new(self.xs[i / self.h()], self.ys[i % self.h()])
    }

    /// All intersections in lexicographic order.
    pub fn points(&self) -> Vec<GridPoint> {
        (1..=self.len()).map(|k| self.point_at(k)).collect()
    }

    /// Unit edges, 0-based endpoints with `from < to`: vertical edges `k-1 → k`
    /// and horizontal edges `k-h → k`.
    pub fn edges(&self) -> Vec<GridEdge> {
        let h = self.h();
        let mut out = Vec::new();
        for i in 0..self.len() {
            if i % h != 0 {
                out.push(GridEdge { from: i - 1, to: i, len: self.ys[i % h] - self.ys[i % h - 1] });
            }
            if i >= h {
                out.push(GridEdge { from: i - h, to: i, len: self.xs[i / h] - self.xs[i / h - 1] });
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        let (v, h) = (self.v(), self.h());
        if v == 0 || h == 0 {
            return 0;
        }
        v * (h - 1) + h * (v - 1)
    }

    pub fn edge_segment(&self, e: &GridEdge) -> Segment {
        Segment::axis(self.point_at(e.from + 1), self.point_at(e.to + 1))
    }

    /// The whole grid as a rectilinear graph.
    pub fn as_graph(&self) -> RectGraph {
        RectGraph::new(self.edges().iter().map(|e| self.edge_segment(e)).collect())
    }
}
