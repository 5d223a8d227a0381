//! Pre-specified sub-arborescences: extending a fixed RSA `T` rooted at `r` to
//! also serve new points `P*`, by reduction to an RSFA instance whose roots are
//! the essential vertices of `T` and the essential extension endpoints.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geometry::{Coord, GridPoint, Instance};
use crate::rect_graph::{normalize, validate_rsfa, RectGraph, Segment, ServiceReport};
use crate::Solution;

/// Closed axis-aligned rectangle `[lo.x, hi.x] × [lo.y, hi.y]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub lo: GridPoint,
    pub hi: GridPoint,
}

impl Rect {
    pub fn contains(&self, p: GridPoint) -> bool {
        self.lo.x <= p.x && p.x <= self.hi.x && self.lo.y <= p.y && p.y <= self.hi.y
    }

    /// The four sides; degenerate sides of a flat box are kept.
    pub fn boundary(&self) -> RectGraph {
        let (lo, hi) = (self.lo, self.hi);
        let lr = GridPoint::new(hi.x, lo.y);
        let ul = GridPoint::new(lo.x, hi.y);
        RectGraph::new(vec![
            Segment::axis(lo, lr),
            Segment::axis(lr, hi),
            Segment::axis(ul, hi),
            Segment::axis(lo, ul),
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrespecifiedInstance {
    pub tree: RectGraph,
    pub tree_terminals: Vec<GridPoint>,
    pub root: GridPoint,
    pub new_points: Vec<GridPoint>,
}

impl PrespecifiedInstance {
    pub fn new(
        tree: RectGraph,
        tree_terminals: Vec<GridPoint>,
        root: GridPoint,
        new_points: Vec<GridPoint>,
    ) -> Result<Self> {
        let inst = PrespecifiedInstance { tree, tree_terminals, root, new_points };
        inst.check()?;
        Ok(inst)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPrespecified(m));
        let tree_inst = Instance::new(
            self.tree_terminals.iter().map(|&p| self.to_local(p)).collect(),
            vec![GridPoint::ORIGIN],
        )
        .map_err(|e| Error::InvalidPrespecified(e.to_string()))?;
        let local_tree = self.tree.map_points(|p| self.to_local(p));
        if !self.tree.is_empty() && !self.tree.contains_point(self.root) {
            return bad(format!("root {} is not on the tree", self.root));
        }
        let unserved = validate_rsfa(&local_tree, &tree_inst).unserved();
        if let Some(&p) = unserved.first() {
            return bad(format!("tree does not serve {}", self.to_global(p)));
        }
        let bb = self.bounding_box();
        let mut seen = BTreeSet::new();
        for &p in &self.new_points {
            if !bb.contains(p) {
                return bad(format!("new point {p} lies outside the bounding box"));
            }
            if self.tree.contains_point(p) {
                return bad(format!("new point {p} lies on the tree"));
            }
            if !seen.insert(p) {
                return Err(Error::DuplicatePoint(p));
            }
        }
        Ok(())
    }

    /// Instance whose tree terminals are the leaves of `tree` other than `root`.
    pub fn from_tree(tree: RectGraph, root: GridPoint, new_points: Vec<GridPoint>) -> Result<Self> {
        let mut deg: BTreeMap<GridPoint, usize> = BTreeMap::new();
        for s in &normalize(&tree).segments {
            *deg.entry(s.a).or_default() += 1;
            *deg.entry(s.b).or_default() += 1;
        }
        let leaves = deg.into_iter().filter(|&(p, d)| d == 1 && p != root).map(|(p, _)| p).collect();
        PrespecifiedInstance::new(tree, leaves, root, new_points)
    }

    /// Service of `P ∪ P*` by `g` from `r` alone, reported in input coordinates.
    pub fn service_report(&self, g: &RectGraph) -> ServiceReport {
        let all: Vec<GridPoint> =
            self.tree_terminals.iter().chain(&self.new_points).map(|&p| self.to_local(p)).collect();
        let check = Instance { points: all, roots: vec![GridPoint::ORIGIN] };
        let mut report = validate_rsfa(&g.map_points(|p| self.to_local(p)), &check);
        for e in &mut report.entries {
            e.point = self.to_global(e.point);
            e.witness = e.witness.map(|w| self.to_global(w));
            for v in &mut e.path {
                *v = self.to_global(*v);
            }
        }
        report
    }

    /// BB(T); the root alone when `T` is empty.
    pub fn bounding_box(&self) -> Rect {
        let (lo, hi) = self.tree.bounding_box().unwrap_or((self.root, self.root));
        Rect { lo: GridPoint::new(lo.x.min(self.root.x), lo.y.min(self.root.y)), hi }
    }

    fn to_local(&self, p: GridPoint) -> GridPoint {
        GridPoint::new(p.x - self.root.x, p.y - self.root.y)
    }

    fn to_global(&self, p: GridPoint) -> GridPoint {
        GridPoint::new(p.x + self.root.x, p.y + self.root.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extensions {
    pub right: Segment,
    pub left: Segment,
    pub up: Segment,
    pub down: Segment,
}

impl Extensions {
    pub fn all(&self) -> [Segment; 4] {
        [self.right, self.left, self.up, self.down]
    }
}

#[derive(Clone, Copy)]
enum Dir {
    Right,
    Left,
    Up,
    Down,
}

impl Dir {
    /// (along, across) coordinates with `along` increasing in the ray direction.
    fn frame(self, p: GridPoint) -> (Coord, Coord) {
        match self {
            Dir::Right => (p.x, p.y),
            Dir::Left => (-p.x, p.y),
            Dir::Up => (p.y, p.x),
            Dir::Down => (-p.y, p.x),
        }
    }

    fn unframe(self, s: Coord, t: Coord) -> GridPoint {
        match self {
            Dir::Right => GridPoint::new(s, t),
            Dir::Left => GridPoint::new(-s, t),
            Dir::Up => GridPoint::new(t, s),
            Dir::Down => GridPoint::new(t, -s),
        }
    }
}

/// Walk from `p` in direction `d` until the open ray meets a blocker.
fn shoot(p: GridPoint, d: Dir, blockers: &[Segment]) -> Segment {
    let (s0, t0) = d.frame(p);
    let mut end = None::<Coord>;
    for seg in blockers {
        let (sa, ta) = d.frame(seg.a);
        let (sb, tb) = d.frame(seg.b);
        let (tlo, thi) = (ta.min(tb), ta.max(tb));
        if t0 < tlo || t0 > thi {
            continue;
        }
        let (lo, hi) = (sa.min(sb), sa.max(sb));
        let hit = if lo <= s0 && hi > s0 {
            s0
        } else if lo > s0 {
            lo
        } else {
            continue;
        };
        end = Some(end.map_or(hit, |e: Coord| e.min(hit)));
    }
    Segment::axis(p, d.unframe(end.unwrap_or(s0), t0))
}

fn blockers(t: &RectGraph, bb: &Rect) -> Vec<Segment> {
    let mut v = normalize(t).segments;
    v.extend(bb.boundary().segments);
    v
}

/// Maximal segments from `p` whose interiors avoid Un(t) and the boundary of `bb`.
pub fn extensions(p: GridPoint, t: &RectGraph, bb: &Rect) -> Extensions {
    let b = blockers(t, bb);
    Extensions {
        right: shoot(p, Dir::Right, &b),
        left: shoot(p, Dir::Left, &b),
        up: shoot(p, Dir::Up, &b),
        down: shoot(p, Dir::Down, &b),
    }
}

/// Leaves of `t` and the corners where two perpendicular edges meet.
pub fn essential_vertices(t: &RectGraph) -> Vec<GridPoint> {
    let norm = normalize(t);
    // vertex -> (horizontal degree, vertical degree)
    let mut deg: BTreeMap<GridPoint, (usize, usize)> = BTreeMap::new();
    for s in &norm.segments {
        for v in [s.a, s.b] {
            let e = deg.entry(v).or_default();
            if s.is_horizontal() {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    deg.into_iter()
        .filter(|&(_, (h, v))| h + v == 1 || (h == 1 && v == 1))
        .map(|(p, _)| p)
        .collect()
}

/// Left and bottom endpoints of the left and downward extensions of `pts` that
/// land on Un(t), in input order without repeats.
pub fn essential_endpoints(pts: &[GridPoint], t: &RectGraph, bb: &Rect) -> Vec<GridPoint> {
    let b = blockers(t, bb);
    let mut out = Vec::new();
    for &p in pts {
        for end in [shoot(p, Dir::Left, &b).a, shoot(p, Dir::Down, &b).a] {
            if t.contains_point(end) && !out.contains(&end) {
                out.push(end);
            }
        }
    }
    out
}

/// H(T, P*): the box boundary, `T`, every extension of every new point, and
/// the right and upward extensions of the essential vertices.
pub fn build_subgrid(inst: &PrespecifiedInstance) -> RectGraph {
    let bb = inst.bounding_box();
    let b = blockers(&inst.tree, &bb);
    let mut g = bb.boundary();
    g.extend(&inst.tree);
    for &p in &inst.new_points {
        g.segments.extend(extensions(p, &inst.tree, &bb).all());
    }
    for v in essential_vertices(&inst.tree) {
        g.push(shoot(v, Dir::Right, &b));
        g.push(shoot(v, Dir::Up, &b));
    }
    normalize(&g)
}

/// The equivalent RSFA instance, translated so that `r` becomes the origin.
pub fn to_rsfa_instance(inst: &PrespecifiedInstance) -> Result<Instance> {
    let bb = inst.bounding_box();
    let mut roots = vec![inst.root];
    for v in essential_vertices(&inst.tree)
        .into_iter()
        .chain(essential_endpoints(&inst.new_points, &inst.tree, &bb))
    {
        if !roots.contains(&v) {
            roots.push(v);
        }
    }
    let points = inst.new_points.iter().filter(|p| !roots.contains(p)).map(|&p| inst.to_local(p)).collect();
    Instance::new(points, roots.into_iter().map(|p| inst.to_local(p)).collect())
}

/// Extend `T` to serve `P*` using `solver` on the reduced instance. The value is
/// the weight of the combined graph, which must serve `P ∪ P*` from `r` alone.
pub fn solve_prespecified<F>(inst: &PrespecifiedInstance, solver: F) -> Result<Solution>
where
    F: FnOnce(&Instance) -> Result<Solution>,
{
    let reduced = to_rsfa_instance(inst)?;
    let sol = solver(&reduced)?;
    let mut combined = inst.tree.clone();
    combined.extend(&sol.forest.map_points(|p| inst.to_global(p)));

    if let Some(&p) = inst.service_report(&combined).unserved().first() {
        return Err(Error::InvalidPrespecified(format!("combined graph leaves {p} unserved")));
    }
    Ok(Solution { value: combined.weight(), forest: combined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_rsfa_exact;
    use crate::heuristics::oracle_on_graph;

    fn p(x: Coord, y: Coord) -> GridPoint {
        GridPoint::new(x, y)
    }

    fn l_tree() -> RectGraph {
        RectGraph::from_pairs(&[((0, 0), (2, 0)), ((2, 0), (2, 2))]).unwrap()
    }

    fn l_inst(new_points: Vec<GridPoint>) -> PrespecifiedInstance {
        PrespecifiedInstance::new(l_tree(), vec![p(2, 2)], p(0, 0), new_points).unwrap()
    }

    #[test]
    fn leaves_become_tree_terminals() {
        let inst = PrespecifiedInstance::from_tree(l_tree(), p(0, 0), vec![p(1, 1)]).unwrap();
        assert_eq!(inst, l_inst(vec![p(1, 1)]));
        let report = inst.service_report(&l_tree());
        assert_eq!(report.unserved(), vec![p(1, 1)]);
    }

    #[test]
    fn extensions_of_the_l_example() {
        let bb = Rect { lo: p(0, 0), hi: p(2, 2) };
        let e = extensions(p(1, 1), &l_tree(), &bb);
        assert_eq!(e.down, Segment::axis(p(1, 1), p(1, 0)));
        assert_eq!(e.left, Segment::axis(p(1, 1), p(0, 1)));
        assert_eq!(e.right, Segment::axis(p(1, 1), p(2, 1)));
        assert_eq!(e.up, Segment::axis(p(1, 1), p(1, 2)));
    }

    #[test]
    fn extension_along_an_edge_degenerates() {
        let bb = Rect { lo: p(0, 0), hi: p(2, 2) };
        // (2,2) sits on top of the vertical edge, (2,0) at the end of the horizontal one
        let e = extensions(p(2, 2), &l_tree(), &bb);
        assert!(e.down.is_degenerate());
        let e = extensions(p(2, 0), &l_tree(), &bb);
        assert!(e.left.is_degenerate() && e.up.is_degenerate());
    }

    #[test]
    fn extension_stops_at_an_interior_vertical_edge() {
        let t = RectGraph::from_pairs(&[((0, 0), (4, 0)), ((2, 0), (2, 2)), ((4, 0), (4, 4))]).unwrap();
        let bb = Rect { lo: p(0, 0), hi: p(4, 4) };
        let e = extensions(p(3, 1), &t, &bb);
        assert_eq!(e.left, Segment::axis(p(2, 1), p(3, 1)));
        assert_eq!(essential_endpoints(&[p(3, 1)], &t, &bb), vec![p(2, 1), p(3, 0)]);
    }

    #[test]
    fn essential_vertex_examples() {
        assert_eq!(essential_vertices(&l_tree()), vec![p(0, 0), p(2, 0), p(2, 2)]);
        let t = RectGraph::from_pairs(&[((0, 0), (1, 0)), ((1, 0), (2, 0))]).unwrap();
        assert_eq!(essential_vertices(&t), vec![p(0, 0), p(2, 0)]);
        let t = RectGraph::from_pairs(&[((0, 0), (0, 3))]).unwrap();
        assert_eq!(essential_vertices(&t), vec![p(0, 0), p(0, 3)]);
    }

    #[test]
    fn essential_endpoint_examples() {
        let bb = Rect { lo: p(0, 0), hi: p(2, 2) };
        assert_eq!(essential_endpoints(&[p(1, 1)], &l_tree(), &bb), vec![p(1, 0)]);
        // the left ray of (1,3) reaches the box, only the downward one lands on T
        let t = RectGraph::from_pairs(&[((0, 0), (4, 0)), ((4, 0), (4, 4))]).unwrap();
        let bb = Rect { lo: p(0, 0), hi: p(4, 4) };
        assert_eq!(essential_endpoints(&[p(1, 3)], &t, &bb), vec![p(1, 0)]);
        // the left ray of (3,2) stops on the vertical edge x = 2
        let t = RectGraph::from_pairs(&[((0, 0), (4, 0)), ((2, 0), (2, 3)), ((4, 0), (4, 2))]).unwrap();
        let bb = Rect { lo: p(0, 0), hi: p(4, 3) };
        assert_eq!(essential_endpoints(&[p(3, 2)], &t, &bb), vec![p(2, 2), p(3, 0)]);
        // a bounding box wider than T leaves both rays on the box
        let bb = Rect { lo: p(0, 0), hi: p(6, 6) };
        let t = RectGraph::from_pairs(&[((0, 0), (0, 2))]).unwrap();
        assert!(essential_endpoints(&[p(3, 4)], &t, &bb).is_empty());
    }

    #[test]
    fn subgrid_of_the_l_example() {
        let h = build_subgrid(&l_inst(vec![p(1, 1)]));
        // box perimeter 8, cross through (1,1) adds 4; T lies on the box
        assert_eq!(h.weight(), 12);
        let h = build_subgrid(&l_inst(vec![]));
        assert_eq!(h.weight(), 8);
    }

    #[test]
    fn reduced_instance_of_the_l_example() {
        let inst = to_rsfa_instance(&l_inst(vec![p(1, 1)])).unwrap();
        assert_eq!(inst.roots, vec![p(0, 0), p(2, 0), p(2, 2), p(1, 0)]);
        assert_eq!(inst.points, vec![p(1, 1)]);
        let inst = to_rsfa_instance(&l_inst(vec![])).unwrap();
        assert_eq!(inst.roots, vec![p(0, 0), p(2, 0), p(2, 2)]);
        assert!(inst.points.is_empty());
    }

    #[test]
    fn solve_the_l_example() {
        let inst = l_inst(vec![p(1, 1)]);
        let sol = solve_prespecified(&inst, solve_rsfa_exact).unwrap();
        assert_eq!(sol.value, 5);
        let sol = solve_prespecified(&l_inst(vec![]), solve_rsfa_exact).unwrap();
        assert_eq!(sol.value, 4);
        assert_eq!(sol.forest, l_tree());
    }

    #[test]
    fn l_example_matches_brute_force() {
        let inst = l_inst(vec![p(1, 1)]);
        let h = build_subgrid(&inst);
        let all = Instance::new(vec![p(2, 2), p(1, 1)], vec![p(0, 0)]).unwrap();
        let brute = oracle_on_graph(&all, &h, &inst.tree, 20).unwrap();
        assert_eq!(brute.value, 5);
    }

    #[test]
    fn translated_root() {
        let t = RectGraph::from_pairs(&[((3, 2), (5, 2)), ((5, 2), (5, 4))]).unwrap();
        let inst = PrespecifiedInstance::new(t, vec![p(5, 4)], p(3, 2), vec![p(4, 3)]).unwrap();
        let sol = solve_prespecified(&inst, solve_rsfa_exact).unwrap();
        assert_eq!(sol.value, 5);
    }

    #[test]
    fn rejects_points_on_the_tree_or_outside() {
        assert!(PrespecifiedInstance::new(l_tree(), vec![p(2, 2)], p(0, 0), vec![p(1, 0)]).is_err());
        assert!(PrespecifiedInstance::new(l_tree(), vec![p(2, 2)], p(0, 0), vec![p(3, 3)]).is_err());
        // a tree that does not reach its terminal
        assert!(PrespecifiedInstance::new(l_tree(), vec![p(1, 2)], p(0, 0), vec![]).is_err());
    }
}
