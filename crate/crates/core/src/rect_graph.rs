//! Rectilinear graphs: segment soups with union semantics, planarization, and
//! the RSFA feasibility validator.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{covers, l1_dist, Coord, GridPoint, Instance, Length};

/// Closed axis-parallel segment. Endpoints are stored in canonical order
/// (`a <= b` lexicographically); `a == b` is a degenerate single point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub a: GridPoint,
    pub b: GridPoint,
}

impl Segment {
    pub fn new(a: GridPoint, b: GridPoint) -> Result<Self> {
        if a.x != b.x && a.y != b.y {
            return Err(Error::NotAxisParallel(format!("{a}-{b}")));
        }
        Ok(Segment::ordered(a, b))
    }

    /// Panics on diagonal input; for internal construction only.
    pub(crate) fn axis(a: GridPoint, b: GridPoint) -> Self {
        assert!(a.x == b.x || a.y == b.y, "diagonal segment {a}-{b}");
        Segment::ordered(a, b)
    }

    fn ordered(a: GridPoint, b: GridPoint) -> Self {
        if a <= b {
            Segment { a, b }
        } else {
            Segment { a: b, b: a }
        }
    }

    pub fn point(p: GridPoint) -> Self {
        Segment { a: p, b: p }
    }

    pub fn len(&self) -> Length {
        l1_dist(self.a, self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.y == self.b.y && !self.is_degenerate()
    }

    pub fn is_vertical(&self) -> bool {
        self.a.x == self.b.x && !self.is_degenerate()
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.x >= self.a.x && p.x <= self.b.x && p.y >= self.a.y && p.y <= self.b.y
    }

    /// True when `p` lies on the segment but is not one of its endpoints.
    pub fn contains_in_interior(&self, p: GridPoint) -> bool {
        self.contains(p) && p != self.a && p != self.b
    }

    pub fn map(&self, f: impl Fn(GridPoint) -> GridPoint) -> Segment {
        Segment::axis(f(self.a), f(self.b))
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// A rectilinear graph given by its segments. Overlapping segments are allowed;
/// the weight counts every point of the union once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RectGraph {
    pub segments: Vec<Segment>,
}

impl RectGraph {
    pub fn new(segments: Vec<Segment>) -> Self {
        RectGraph { segments }
    }

    pub fn from_pairs(pairs: &[((Coord, Coord), (Coord, Coord))]) -> Result<Self> {
        let segments = pairs
            .iter()
            .map(|&(a, b)| Segment::new(a.into(), b.into()))
            .collect::<Result<_>>()?;
        Ok(RectGraph { segments })
    }

    pub fn is_empty(&self) -> bool {
        self.segments.iter().all(|s| s.is_degenerate())
    }

    pub fn push(&mut self, s: Segment) {
        self.segments.push(s);
    }

    /// Monotone connector from `from` to `to`: horizontal at `from.y` first,
    /// then vertical at `to.x`.
    pub fn push_l_path(&mut self, from: GridPoint, to: GridPoint) {
        let corner = GridPoint::new(to.x, from.y);
        if corner != from {
            self.segments.push(Segment::axis(from, corner));
        }
        if corner != to {
            self.segments.push(Segment::axis(corner, to));
        }
    }

    pub fn extend(&mut self, other: &RectGraph) {
        self.segments.extend_from_slice(&other.segments);
    }

    pub fn union(&self, other: &RectGraph) -> RectGraph {
        let mut g = self.clone();
        g.extend(other);
        g
    }

    pub fn map_points(&self, f: impl Fn(GridPoint) -> GridPoint) -> RectGraph {
        RectGraph {
            segments: self.segments.iter().map(|s| s.map(&f)).collect(),
        }
    }

    /// l(G): total length of the union.
    pub fn weight(&self) -> Length {
        normalize(self).segments.iter().map(Segment::len).sum()
    }

    /// Membership in Un(G).
    pub fn contains_point(&self, p: GridPoint) -> bool {
        self.segments.iter().any(|s| s.contains(p))
    }

    /// Distinct segment endpoints, sorted.
    pub fn vertices(&self) -> Vec<GridPoint> {
        let set: BTreeSet<_> = self.segments.iter().flat_map(|s| [s.a, s.b]).collect();
        set.into_iter().collect()
    }

    pub fn bounding_box(&self) -> Option<(GridPoint, GridPoint)> {
        let mut it = self.segments.iter().flat_map(|s| [s.a, s.b]);
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            lo = GridPoint::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = GridPoint::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        Some((lo, hi))
    }
}

/// Merge collinear overlaps and split at every crossing or touching point.
pub fn normalize(g: &RectGraph) -> RectGraph {
    normalize_with(g, &[])
}

/// As [`normalize`], additionally splitting at each of `extra` that lies on a
/// segment. Zero-length segments are dropped.
pub fn normalize_with(g: &RectGraph, extra: &[GridPoint]) -> RectGraph {
    // line coordinate -> merged closed intervals
    let mut horiz: BTreeMap<Coord, Vec<(Coord, Coord)>> = BTreeMap::new();
    let mut vert: BTreeMap<Coord, Vec<(Coord, Coord)>> = BTreeMap::new();
    for s in &g.segments {
        if s.is_horizontal() {
            horiz.entry(s.a.y).or_default().push((s.a.x, s.b.x));
        } else if s.is_vertical() {
            vert.entry(s.a.x).or_default().push((s.a.y, s.b.y));
        }
    }
    for list in horiz.values_mut().chain(vert.values_mut()) {
        *list = merge_intervals(std::mem::take(list));
    }

    let mut out = Vec::new();
    for (&y, list) in &horiz {
        for &(x0, x1) in list {
            let mut cuts: BTreeSet<Coord> = [x0, x1].into_iter().collect();
            for (&x, vlist) in vert.range(x0..=x1) {
                if vlist.iter().any(|&(y0, y1)| y0 <= y && y <= y1) {
                    cuts.insert(x);
                }
            }
            cuts.extend(extra.iter().filter(|p| p.y == y && x0 <= p.x && p.x <= x1).map(|p| p.x));
            let cuts: Vec<_> = cuts.into_iter().collect();
            for w in cuts.windows(2) {
                out.push(Segment::axis(GridPoint::new(w[0], y), GridPoint::new(w[1], y)));
            }
        }
    }
    for (&x, list) in &vert {
        for &(y0, y1) in list {
            let mut cuts: BTreeSet<Coord> = [y0, y1].into_iter().collect();
            for (&y, hlist) in horiz.range(y0..=y1) {
                if hlist.iter().any(|&(x0, x1)| x0 <= x && x <= x1) {
                    cuts.insert(y);
                }
            }
            cuts.extend(extra.iter().filter(|p| p.x == x && y0 <= p.y && p.y <= y1).map(|p| p.y));
            let cuts: Vec<_> = cuts.into_iter().collect();
            for w in cuts.windows(2) {
                out.push(Segment::axis(GridPoint::new(x, w[0]), GridPoint::new(x, w[1])));
            }
        }
    }
    out.sort();
    RectGraph { segments: out }
}

fn merge_intervals(mut v: Vec<(Coord, Coord)>) -> Vec<(Coord, Coord)> {
    v.sort();
    let mut out: Vec<(Coord, Coord)> = Vec::with_capacity(v.len());
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

pub fn weight(g: &RectGraph) -> Length {
    g.weight()
}

/// Planarized graph: vertices at segment endpoints, crossings and requested points.
pub(crate) struct Planar {
    pub vertices: Vec<GridPoint>,
    pub index: HashMap<GridPoint, usize>,
    pub adj: Vec<Vec<(usize, Length)>>,
}

impl Planar {
    pub fn build(g: &RectGraph, extra: &[GridPoint]) -> Planar {
        let norm = normalize_with(g, extra);
        let vertices = norm.vertices();
        let index: HashMap<_, _> = vertices.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut adj = vec![Vec::new(); vertices.len()];
        for s in &norm.segments {
            let (i, j) = (index[&s.a], index[&s.b]);
            adj[i].push((j, s.len()));
            adj[j].push((i, s.len()));
        }
        for list in &mut adj {
            list.sort();
        }
        Planar { vertices, index, adj }
    }

    fn shortest_paths(&self, src: usize) -> (Vec<Length>, Vec<Option<usize>>) {
        let mut dist = vec![Length::MAX; self.vertices.len()];
        let mut prev = vec![None; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0, src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = Some(u);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        (dist, prev)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServiceEntry {
    pub point: GridPoint,
    pub served: bool,
    pub witness: Option<GridPoint>,
    /// Recovered shortest path from the point to its witness root.
    pub path: Vec<GridPoint>,
}

/// Per-terminal service verdicts, in instance order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServiceReport {
    pub entries: Vec<ServiceEntry>,
}

impl ServiceReport {
    pub fn feasible(&self) -> bool {
        self.entries.iter().all(|e| e.served)
    }

    pub fn unserved(&self) -> Vec<GridPoint> {
        self.entries.iter().filter(|e| !e.served).map(|e| e.point).collect()
    }
}

/// A terminal `p` is served when some root `r` covering it lies on the graph and
/// the shortest path from `p` to `r` along the graph has length `l1_dist(p, r)`.
pub fn validate_rsfa(g: &RectGraph, inst: &Instance) -> ServiceReport {
    let planar = Planar::build(g, &inst.all_points());
    let entries = inst
        .points
        .iter()
        .map(|&p| {
            let unserved = ServiceEntry { point: p, served: false, witness: None, path: Vec::new() };
            let Some(&src) = planar.index.get(&p) else {
                return unserved;
            };
            let (dist, prev) = planar.shortest_paths(src);
            for &r in &inst.roots {
                if !covers(r, p) {
                    continue;
                }
                let Some(&t) = planar.index.get(&r) else { continue };
                if dist[t] == l1_dist(p, r) {
                    let mut path = vec![planar.vertices[t]];
                    let mut cur = t;
                    while let Some(u) = prev[cur] {
                        path.push(planar.vertices[u]);
                        cur = u;
                    }
                    path.reverse();
                    return ServiceEntry { point: p, served: true, witness: Some(r), path };
                }
            }
            unserved
        })
        .collect();
    ServiceReport { entries }
}

/// True when consecutive path vertices never move right or up.
pub fn is_staircase(path: &[GridPoint]) -> bool {
    path.windows(2).all(|w| covers(w[1], w[0]) && (w[0].x == w[1].x || w[0].y == w[1].y))
}

/// Keep only the edges needed to serve the terminals, giving each kept vertex a
/// single left or downward parent. The result is a forest of arborescences with
/// weight at most that of `g`; unservable terminals are simply left out.
pub fn prune_to_forest(g: &RectGraph, inst: &Instance) -> RectGraph {
    let planar = Planar::build(g, &inst.all_points());
    let n = planar.vertices.len();
    let is_root: Vec<bool> = planar.vertices.iter().map(|v| inst.roots.contains(v)).collect();
    // vertices are sorted (x, y), so every left/down neighbour comes first
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut reach = vec![false; n];
    for v in 0..n {
        if is_root[v] {
            reach[v] = true;
            continue;
        }
        let pv = planar.vertices[v];
        // prefer the horizontal parent
        let mut cands: Vec<(bool, usize)> = planar.adj[v]
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| u < v && reach[u] && covers(planar.vertices[u], pv))
            .map(|u| (planar.vertices[u].y != pv.y, u))
            .collect();
        cands.sort();
        if let Some(&(_, u)) = cands.first() {
            parent[v] = Some(u);
            reach[v] = true;
        }
    }
    let mut keep = BTreeSet::new();
    let mut seen = vec![false; n];
    for p in &inst.points {
        let Some(&start) = planar.index.get(p) else { continue };
        let mut cur = start;
        if !reach[cur] {
            continue;
        }
        while let Some(u) = parent[cur] {
            if seen[cur] {
                break;
            }
            seen[cur] = true;
            keep.insert(Segment::axis(planar.vertices[u], planar.vertices[cur]));
            cur = u;
        }
    }
    let merged = RectGraph::new(keep.into_iter().collect());
    normalize_with(&merged, &inst.all_points())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(pairs: &[((Coord, Coord), (Coord, Coord))]) -> RectGraph {
        RectGraph::from_pairs(pairs).unwrap()
    }

    fn p(x: Coord, y: Coord) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn normalize_merges_overlaps() {
        let n = normalize(&g(&[((0, 0), (0, 4)), ((0, 2), (0, 6))]));
        assert_eq!(n.segments, vec![Segment::axis(p(0, 0), p(0, 6))]);
        assert_eq!(n.weight(), 6);
    }

    #[test]
    fn normalize_splits_t_junction() {
        let n = normalize(&g(&[((0, 0), (4, 0)), ((2, 0), (2, 3))]));
        assert_eq!(n.segments.len(), 3);
        assert!(n.segments.contains(&Segment::axis(p(0, 0), p(2, 0))));
        assert_eq!(n.weight(), 7);
    }

    #[test]
    fn normalize_empty() {
        let n = normalize(&RectGraph::default());
        assert!(n.segments.is_empty());
        assert_eq!(n.weight(), 0);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(g(&[((0, 0), (0, 5))]).weight(), 5);
        assert_eq!(g(&[((0, 0), (3, 0)), ((0, 0), (3, 0))]).weight(), 3);
        assert_eq!(g(&[((0, 0), (2, 0)), ((2, 0), (2, 2))]).weight(), 4);
    }

    #[test]
    fn diagonal_rejected() {
        assert!(Segment::new(p(0, 0), p(1, 1)).is_err());
    }

    #[test]
    fn validate_monotone_path() {
        let inst = Instance::rsa(vec![p(2, 3)]).unwrap();
        let r = validate_rsfa(&g(&[((0, 0), (0, 3)), ((0, 3), (2, 3))]), &inst);
        assert!(r.feasible());
        assert_eq!(r.entries[0].witness, Some(p(0, 0)));
        assert!(is_staircase(&r.entries[0].path));
    }

    #[test]
    fn validate_rejects_detour() {
        let inst = Instance::rsa(vec![p(2, 3)]).unwrap();
        let r = validate_rsfa(&g(&[((0, 0), (4, 0)), ((4, 0), (4, 3)), ((4, 3), (2, 3))]), &inst);
        assert!(!r.feasible());
        assert_eq!(r.unserved(), vec![p(2, 3)]);
    }

    #[test]
    fn validate_empty_graph() {
        let inst = Instance::rsa(vec![p(1, 1)]).unwrap();
        assert!(!validate_rsfa(&RectGraph::default(), &inst).feasible());
    }

    #[test]
    fn validate_picks_a_covering_root() {
        // (3,0) is on the graph but does not cover (1,2)
        let inst = Instance::new(vec![p(1, 2)], vec![p(0, 0), p(3, 0)]).unwrap();
        let r = validate_rsfa(&g(&[((1, 2), (1, 0)), ((0, 0), (3, 0))]), &inst);
        assert_eq!(r.entries[0].witness, Some(p(0, 0)));
    }

    #[test]
    fn prune_breaks_cycles() {
        // a unit square plus tails: two routes from (1,1) to the origin
        let graph = g(&[((0, 0), (1, 0)), ((1, 0), (1, 1)), ((0, 0), (0, 1)), ((0, 1), (1, 1)), ((1, 1), (1, 2))]);
        let inst = Instance::rsa(vec![p(1, 2)]).unwrap();
        let pruned = prune_to_forest(&graph, &inst);
        assert_eq!(pruned.weight(), 3);
        assert!(validate_rsfa(&pruned, &inst).feasible());
    }

    fn seg() -> impl Strategy<Value = Segment> {
        (0i64..8, 0i64..8, 0i64..8, any::<bool>()).prop_map(|(a, b, c, h)| {
            if h {
                Segment::axis(p(a, c), p(b, c))
            } else {
                Segment::axis(p(c, a), p(c, b))
            }
        })
    }

    proptest! {
        #[test]
        fn normalization_preserves_union(segs in proptest::collection::vec(seg(), 0..8)) {
            let graph = RectGraph::new(segs);
            let n = normalize(&graph);
            prop_assert_eq!(n.weight(), graph.weight());
            // union equality on the doubled lattice catches half-unit gaps;
            // isolated zero-length segments are dropped by design
            for x in 0..=16 {
                for y in 0..=16 {
                    let q = p(x, y);
                    let dbl = |s: &Segment| Segment::axis(p(2 * s.a.x, 2 * s.a.y), p(2 * s.b.x, 2 * s.b.y));
                    let in_g = graph.segments.iter().any(|s| !s.is_degenerate() && dbl(s).contains(q));
                    let in_n = n.segments.iter().any(|s| dbl(s).contains(q));
                    prop_assert_eq!(in_g, in_n);
                }
            }
            // no two output segments share more than an endpoint
            for (i, s) in n.segments.iter().enumerate() {
                for t in &n.segments[i + 1..] {
                    prop_assert!(!(s.contains_in_interior(t.a) || s.contains_in_interior(t.b)));
                    prop_assert!(s != t);
                }
            }
        }

        #[test]
        fn weight_by_brute_force(segs in proptest::collection::vec(seg(), 0..8)) {
            // count unit edges of the lattice covered by the union
            let graph = RectGraph::new(segs);
            let mut count = 0;
            for x in 0..8 {
                for y in 0..8 {
                    let h = Segment::axis(p(x, y), p(x + 1, y));
                    let v = Segment::axis(p(y, x), p(y, x + 1));
                    for e in [h, v] {
                        if graph.segments.iter().any(|s| s.contains(e.a) && s.contains(e.b)) {
                            count += 1;
                        }
                    }
                }
            }
            prop_assert_eq!(graph.weight(), count);
        }
    }
}
