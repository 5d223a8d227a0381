//! Exact subset dynamic programs: the O(3^n) arborescence recursion over local
//! roots and the O(mn^2 + 3^n) forest recursion on top of it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{covers, l1_dist, meet, nearest_covering_root, GridPoint, Instance, Length};
use crate::rect_graph::RectGraph;
use crate::Solution;

const INF: Length = Length::MAX / 4;

/// Where a local root hangs from: the attachment point and the distance to it.
pub trait RootService {
    fn serve(&self, q: GridPoint) -> Option<(GridPoint, Length)>;
}

/// Plain root set, served by [`nearest_covering_root`].
pub struct Roots<'a>(pub &'a [GridPoint]);

impl RootService for Roots<'_> {
    fn serve(&self, q: GridPoint) -> Option<(GridPoint, Length)> {
        nearest_covering_root(q, self.0)
    }
}

/// Nearest covering root for every candidate local-root location, i.e. every
/// `(x(p), y(q))` over terminal pairs.
#[derive(Clone, Debug)]
pub struct LocalRootServices {
    table: HashMap<GridPoint, Option<(GridPoint, Length)>>,
}

impl LocalRootServices {
    pub fn get(&self, q: GridPoint) -> Option<(GridPoint, Length)> {
        self.table.get(&q).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

pub fn precompute_local_root_services(inst: &Instance) -> LocalRootServices {
    precompute_with(&inst.points, &Roots(&inst.roots))
}

fn precompute_with<S: RootService>(points: &[GridPoint], service: &S) -> LocalRootServices {
    let mut table = HashMap::new();
    for p in points {
        for q in points {
            let loc = GridPoint::new(p.x, q.y);
            table.entry(loc).or_insert_with(|| service.serve(loc));
        }
    }
    LocalRootServices { table }
}

/// Local roots `r(X)`, arborescence lengths `l(A(X))` and split backpointers
/// for every non-empty subset `X` of the terminals (bit `i` is terminal `i`).
#[derive(Clone, Debug)]
pub struct SubsetTable {
    pub local_root: Vec<GridPoint>,
    pub value: Vec<Length>,
    /// Chosen `U ⊊ X`; 0 for singletons.
    pub split: Vec<u32>,
}

impl SubsetTable {
    pub fn build(points: &[GridPoint]) -> SubsetTable {
        let n = points.len();
        assert!(n <= 24, "subset DP limited to 24 terminals");
        let size = 1usize << n;
        let mut local_root = vec![GridPoint::default(); size];
        let mut value = vec![INF; size];
        let mut split = vec![0u32; size];
        for x in 1..size {
            let low = x.trailing_zeros() as usize;
            let rest = x & (x - 1);
            local_root[x] = if rest == 0 { points[low] } else { meet(points[low], local_root[rest]) };
        }
        for x in masks_by_popcount(n) {
            if x.count_ones() == 1 {
                value[x] = 0;
                continue;
            }
            let rx = local_root[x];
            let mut best = (INF, 0usize);
            let mut u = (x - 1) & x;
            while u > 0 {
                let w = x ^ u;
                let cost = value[u] + l1_dist(rx, local_root[u]) + value[w] + l1_dist(rx, local_root[w]);
                if cost < best.0 || (cost == best.0 && u < best.1) {
                    best = (cost, u);
                }
                u = (u - 1) & x;
            }
            value[x] = best.0;
            split[x] = best.1 as u32;
        }
        SubsetTable { local_root, value, split }
    }

    /// Segments of `A(X)`, hung from `r(X)`.
    pub fn realize(&self, x: usize, out: &mut RectGraph) {
        if x.count_ones() <= 1 {
            return;
        }
        let u = self.split[x] as usize;
        let w = x ^ u;
        let rx = self.local_root[x];
        for part in [u, w] {
            out.push_l_path(rx, self.local_root[part]);
            self.realize(part, out);
        }
    }
}

/// `l(F(X,R))`, `l(F*(X,R))` and partition backpointers.
#[derive(Clone, Debug)]
pub struct ForestTable {
    pub value: Vec<Length>,
    pub single: Vec<Length>,
    /// Attachment point of `F*(X,R)` when it exists.
    pub attach: Vec<Option<GridPoint>>,
    /// 0 when `F(X,R) = F*(X,R)`, otherwise one side `Y` of the partition.
    pub part: Vec<u32>,
}

impl ForestTable {
    pub fn build(subsets: &SubsetTable, services: &LocalRootServices) -> ForestTable {
        let size = subsets.value.len();
        let n = size.trailing_zeros() as usize;
        let mut value = vec![INF; size];
        let mut single = vec![INF; size];
        let mut attach = vec![None; size];
        let mut part = vec![0u32; size];
        for x in masks_by_popcount(n) {
            if let Some((t, d)) = services.get(subsets.local_root[x]) {
                single[x] = subsets.value[x] + d;
                attach[x] = Some(t);
            }
            let mut best = (single[x], 0usize);
            let mut y = (x - 1) & x;
            while y > 0 {
                let cost = value[y].saturating_add(value[x ^ y]);
                if cost < best.0 || (cost == best.0 && best.1 != 0 && y < best.1) {
                    best = (cost, y);
                }
                y = (y - 1) & x;
            }
            value[x] = best.0.min(INF);
            part[x] = best.1 as u32;
        }
        ForestTable { value, single, attach, part }
    }

    pub fn realize(&self, subsets: &SubsetTable, x: usize, out: &mut RectGraph) {
        if x == 0 {
            return;
        }
        match self.part[x] as usize {
            0 => {
                let t = self.attach[x].expect("realizing an infeasible subset");
                out.push_l_path(t, subsets.local_root[x]);
                subsets.realize(x, out);
            }
            y => {
                self.realize(subsets, y, out);
                self.realize(subsets, x ^ y, out);
            }
        }
    }
}

fn masks_by_popcount(n: usize) -> Vec<usize> {
    let mut masks: Vec<usize> = (1..(1usize << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
}

/// Minimum arborescence for `points` hanging from `root`.
pub fn solve_rsa(points: &[GridPoint], root: GridPoint) -> Result<Solution> {
    if let Some(&p) = points.iter().find(|&&p| !covers(root, p)) {
        return Err(Error::Uncoverable(p));
    }
    if points.is_empty() {
        return Ok(Solution { value: 0, forest: RectGraph::default() });
    }
    let table = SubsetTable::build(points);
    let full = (1usize << points.len()) - 1;
    let top = table.local_root[full];
    let mut forest = RectGraph::default();
    forest.push_l_path(root, top);
    table.realize(full, &mut forest);
    Ok(Solution { value: table.value[full] + l1_dist(root, top), forest })
}

/// Optimal RSFA by the forest recursion.
pub fn solve_rsfa_exact(inst: &Instance) -> Result<Solution> {
    inst.check()?;
    solve_forest_with(&inst.points, &Roots(&inst.roots)).ok_or(Error::Infeasible)
}

/// Forest recursion against an arbitrary [`RootService`]; `None` when some
/// terminal cannot be served at all.
pub(crate) fn solve_forest_with<S: RootService>(points: &[GridPoint], service: &S) -> Option<Solution> {
    if points.is_empty() {
        return Some(Solution { value: 0, forest: RectGraph::default() });
    }
    let subsets = SubsetTable::build(points);
    let services = precompute_with(points, service);
    let forest_table = ForestTable::build(&subsets, &services);
    let full = (1usize << points.len()) - 1;
    if forest_table.value[full] >= INF {
        return None;
    }
    let mut forest = RectGraph::default();
    forest_table.realize(&subsets, full, &mut forest);
    Some(Solution { value: forest_table.value[full], forest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rect_graph::validate_rsfa;

    fn p(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn rsa_examples() {
        assert_eq!(solve_rsa(&[p(3, 4)], p(0, 0)).unwrap().value, 7);
        // frozen from the brute-force oracle
        assert_eq!(solve_rsa(&[p(1, 2), p(2, 1)], p(0, 0)).unwrap().value, 4);
        assert_eq!(solve_rsa(&[p(2, 2), p(2, 3), p(3, 2)], p(0, 0)).unwrap().value, 6);
    }

    #[test]
    fn rsa_rejects_uncoverable() {
        assert_eq!(solve_rsa(&[p(1, 1)], p(2, 0)), Err(Error::Uncoverable(p(1, 1))));
    }

    #[test]
    fn rsfa_examples() {
        let inst = Instance::rsa(vec![p(1, 3), p(3, 1)]).unwrap();
        assert_eq!(solve_rsfa_exact(&inst).unwrap().value, 6);
        let inst = Instance::new(vec![p(5, 5), p(1, 1)], vec![p(0, 0), p(4, 5)]).unwrap();
        let sol = solve_rsfa_exact(&inst).unwrap();
        assert_eq!(sol.value, 3);
        assert!(validate_rsfa(&sol.forest, &inst).feasible());
        let inst = Instance::new(vec![], vec![p(0, 0), p(3, 3)]).unwrap();
        let sol = solve_rsfa_exact(&inst).unwrap();
        assert_eq!(sol.value, 0);
        assert!(sol.forest.is_empty());
    }

    #[test]
    fn local_root_services() {
        let inst = Instance::rsa(vec![p(1, 2), p(2, 1)]).unwrap();
        let t = precompute_local_root_services(&inst);
        assert_eq!(t.get(p(1, 1)), Some((p(0, 0), 2)));
        assert_eq!(t.len(), 4);
        let inst = Instance::new(vec![p(5, 5)], vec![p(0, 0), p(4, 5)]).unwrap();
        assert_eq!(precompute_local_root_services(&inst).get(p(5, 5)), Some((p(4, 5), 1)));
        let inst = Instance::new(vec![p(1, 3)], vec![p(0, 0), p(2, 2)]).unwrap();
        assert_eq!(precompute_local_root_services(&inst).get(p(1, 3)), Some((p(0, 0), 4)));
    }

    #[test]
    fn realized_weight_matches_value() {
        let inst = Instance::new(
            vec![p(2, 7), p(5, 3), p(6, 6), p(9, 1), p(3, 3)],
            vec![p(0, 0), p(4, 2), p(1, 6)],
        )
        .unwrap();
        let sol = solve_rsfa_exact(&inst).unwrap();
        assert_eq!(sol.forest.weight(), sol.value);
        assert!(validate_rsfa(&sol.forest, &inst).feasible());
    }

    #[test]
    fn split_inequality_holds_for_every_split() {
        let pts = [p(1, 4), p(3, 3), p(4, 1), p(2, 6)];
        let t = SubsetTable::build(&pts);
        for x in 1usize..16 {
            let mut u = (x - 1) & x;
            while u > 0 {
                let w = x ^ u;
                let bound = t.value[u] + t.value[w] + l1_dist(t.local_root[x], t.local_root[u])
                    + l1_dist(t.local_root[x], t.local_root[w]);
                assert!(t.value[x] <= bound);
                u = (u - 1) & x;
            }
            if x.count_ones() == 1 {
                assert_eq!(t.value[x], 0);
            }
        }
    }

    #[test]
    fn scaling_scales_value_and_keeps_splits() {
        let pts = [p(1, 4), p(3, 3), p(4, 1), p(2, 6), p(5, 5)];
        let t1 = SubsetTable::build(&pts);
        let scaled: Vec<_> = pts.iter().map(|q| p(3 * q.x, 3 * q.y)).collect();
        let t3 = SubsetTable::build(&scaled);
        for x in 1..32 {
            assert_eq!(t3.value[x], 3 * t1.value[x]);
            assert_eq!(t3.split[x], t1.split[x]);
        }
    }
}
