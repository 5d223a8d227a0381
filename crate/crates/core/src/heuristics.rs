//! Brute-force ground truth and the greedy merge baseline.

use crate::error::{Error, Result};
use crate::geometry::{l1_dist, meet, nearest_covering_root, GridPoint, Instance, Length};
use crate::grid::HananGrid;
use crate::rect_graph::{normalize_with, prune_to_forest, RectGraph, Segment};
use crate::Solution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest number of unit grid edges the oracle will enumerate over.
    pub edge_budget: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { edge_budget: 24 }
    }
}

/// Exhaustive optimum over the Hanan grid of the instance.
pub fn oracle_optimum(inst: &Instance, config: &OracleConfig) -> Result<Solution> {
    let grid = HananGrid::build(&inst.all_points());
    oracle_on_grid(inst, &grid, config)
}

/// Exhaustive optimum over edge subsets of `grid`.
///
/// Any feasible edge set contains, for every vertex on a witness path, an edge
/// to a left or lower neighbour that is itself on a witness path, so it is
/// enough to enumerate vertex subsets in lexicographic order and charge each
/// kept non-root vertex its cheapest kept left/lower neighbour. The search
/// backtracks as soon as a kept vertex has no such neighbour or the cost plus
/// the cheapest possible attachment of every remaining terminal reaches the
/// incumbent.
pub fn oracle_on_grid(inst: &Instance, grid: &HananGrid, config: &OracleConfig) -> Result<Solution> {
    inst.check()?;
    let edges = grid.edge_count();
    if edges > config.edge_budget {
        return Err(Error::GridTooLarge { edges, budget: config.edge_budget });
    }
    let nv = grid.len();
    let h = grid.h().max(1);
    let mut kind = vec![0u8; nv]; // 0 free, 1 terminal, 2 root
    for &p in &inst.points {
        kind[grid.index_of(p)? - 1] = 1;
    }
    for &r in &inst.roots {
        kind[grid.index_of(r)? - 1] = 2;
    }
    let left = |v: usize| (v >= h).then(|| (v - h, grid.xs[v / h] - grid.xs[v / h - 1]));
    let below = |v: usize| (!v.is_multiple_of(h)).then(|| (v - 1, grid.ys[v % h] - grid.ys[v % h - 1]));

    // cheapest conceivable parent edge of each remaining terminal
    let mut lower_bound = vec![0 as Length; nv + 1];
    for v in (0..nv).rev() {
        let own = if kind[v] == 1 {
            [left(v), below(v)].into_iter().flatten().map(|(_, l)| l).min().unwrap_or(0)
        } else {
            0
        };
        lower_bound[v] = lower_bound[v + 1] + own;
    }

    struct Search<'a> {
        kind: &'a [u8],
        lower_bound: &'a [Length],
        kept: Vec<bool>,
        parent: Vec<Option<usize>>,
        best: Length,
        best_parent: Option<Vec<Option<usize>>>,
    }

    fn dfs(
        s: &mut Search<'_>,
        v: usize,
        cost: Length,
        left: &dyn Fn(usize) -> Option<(usize, Length)>,
        below: &dyn Fn(usize) -> Option<(usize, Length)>,
    ) {
        if cost + s.lower_bound[v] >= s.best {
            return;
        }
        if v == s.kind.len() {
            s.best = cost;
            s.best_parent = Some(s.parent.clone());
            return;
        }
        if s.kind[v] == 2 {
            s.kept[v] = true;
            dfs(s, v + 1, cost, left, below);
            s.kept[v] = false;
            return;
        }
        // cheapest kept parent; ties prefer the horizontal one
        let mut choice: Option<(usize, Length)> = None;
        for cand in [left(v), below(v)].into_iter().flatten() {
            if s.kept[cand.0] && choice.is_none_or(|c| cand.1 < c.1) {
                choice = Some(cand);
            }
        }
        if let Some((u, len)) = choice {
            s.kept[v] = true;
            s.parent[v] = Some(u);
            dfs(s, v + 1, cost + len, left, below);
            s.kept[v] = false;
            s.parent[v] = None;
        }
        if s.kind[v] == 0 {
            dfs(s, v + 1, cost, left, below);
        }
    }

    let mut search = Search {
        kind: &kind,
        lower_bound: &lower_bound,
        kept: vec![false; nv],
        parent: vec![None; nv],
        best: Length::MAX,
        best_parent: None,
    };
    dfs(&mut search, 0, 0, &left, &below);
    let parents = search.best_parent.ok_or(Error::Infeasible)?;
    let mut forest = RectGraph::default();
    for (v, par) in parents.iter().enumerate() {
        if let Some(u) = par {
            forest.push(Segment::axis(grid.point_at(u + 1), grid.point_at(v + 1)));
        }
    }
    Ok(Solution { value: search.best, forest })
}

/// Literal edge-subset enumeration: the cheapest superset of `required` made of
/// unit pieces of `graph` that serves every terminal. Unit pieces come from
/// splitting `graph` at all crossings and instance points.
pub fn oracle_on_graph(inst: &Instance, graph: &RectGraph, required: &RectGraph, budget: usize) -> Result<Solution> {
    let pts = inst.all_points();
    let norm = normalize_with(&graph.union(required), &pts);
    let pieces = norm.segments;
    let vertices = norm_vertices(&pieces, &pts);
    let idx = |p: GridPoint| vertices.binary_search(&p).expect("vertex");
    let is_root: Vec<bool> = vertices.iter().map(|v| inst.roots.contains(v)).collect();
    let (mut fixed, mut free) = (Vec::new(), Vec::new());
    for s in &pieces {
        let mid2 = GridPoint::new(s.a.x + s.b.x, s.a.y + s.b.y);
        let inside = required.segments.iter().any(|r| {
            let r2 = Segment::axis(GridPoint::new(2 * r.a.x, 2 * r.a.y), GridPoint::new(2 * r.b.x, 2 * r.b.y));
            r2.contains(mid2)
        });
        // (lower/left endpoint, upper/right endpoint, length)
        let e = (idx(s.a), idx(s.b), s.len());
        if inside {
            fixed.push(e);
        } else {
            free.push(e);
        }
    }
    if free.len() > budget {
        return Err(Error::GridTooLarge { edges: free.len(), budget });
    }
    let fixed_len: Length = fixed.iter().map(|e| e.2).sum();
    let terminals: Vec<usize> = inst.points.iter().filter_map(|&p| vertices.binary_search(&p).ok()).collect();
    if terminals.len() < inst.points.len() {
        return Err(Error::Infeasible);
    }
    let mut best: Option<(Length, u64)> = None;
    let mut parent_of: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for mask in 0u64..(1u64 << free.len()) {
        let cost: Length = fixed_len + free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e.2).sum::<Length>();
        if best.is_some_and(|(b, _)| cost >= b) {
            continue;
        }
        for list in parent_of.iter_mut() {
            list.clear();
        }
        for e in fixed.iter().chain(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e)) {
            // endpoints are canonical, so `a` is left of or below `b`
            parent_of[e.1].push(e.0);
        }
        let mut reach = vec![false; vertices.len()];
        for v in 0..vertices.len() {
            reach[v] = is_root[v] || parent_of[v].iter().any(|&u| reach[u]);
        }
        if terminals.iter().all(|&t| reach[t]) {
            best = Some((cost, mask));
        }
    }
    let (value, mask) = best.ok_or(Error::Infeasible)?;
    let mut forest = RectGraph::default();
    for e in fixed.iter().chain(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e)) {
        forest.push(Segment::axis(vertices[e.0], vertices[e.1]));
    }
    Ok(Solution { value, forest })
}

fn norm_vertices(pieces: &[Segment], extra: &[GridPoint]) -> Vec<GridPoint> {
    let mut v: Vec<GridPoint> = pieces.iter().flat_map(|s| [s.a, s.b]).chain(extra.iter().copied()).collect();
    v.sort();
    v.dedup();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyMode {
    /// Retire a point to its nearest root whenever that is strictly shorter
    /// than going through the proposed meet.
    Guarded,
    /// Always merge the pair with the highest meet.
    MergeAlways,
}

pub fn greedy_baseline(inst: &Instance) -> Result<Solution> {
    greedy_with(inst, GreedyMode::Guarded)
}

/// Pairwise meet merging with optional retirement to nearby roots. No
/// approximation guarantee is claimed for either mode.
pub fn greedy_with(inst: &Instance, mode: GreedyMode) -> Result<Solution> {
    inst.check()?;
    let roots = &inst.roots;
    let dr = |p: GridPoint| nearest_covering_root(p, roots).expect("origin covers the quadrant");
    let mut active: Vec<GridPoint> = inst.points.clone();
    let mut graph = RectGraph::default();

    let retire = |p: GridPoint, graph: &mut RectGraph| {
        let (r, _) = dr(p);
        graph.push_l_path(r, p);
    };

    while !active.is_empty() {
        if active.len() == 1 {
            retire(active.pop().unwrap(), &mut graph);
            break;
        }
        let mut best: Option<(Length, usize, usize)> = None;
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                let s = meet(active[i], active[j]).norm();
                if best.is_none_or(|b| s > b.0) {
                    best = Some((s, i, j));
                }
            }
        }
        let (_, i, j) = best.unwrap();
        let (p, q) = (active[i], active[j]);
        let m = meet(p, q);
        if mode == GreedyMode::Guarded {
            let via = |x: GridPoint| l1_dist(x, m) + dr(m).1;
            let retire_p = dr(p).1 < via(p);
            let retire_q = dr(q).1 < via(q);
            if retire_p || retire_q {
                // remove the higher index first so `i` stays valid
                if retire_q {
                    retire(q, &mut graph);
                    active.remove(j);
                }
                if retire_p {
                    retire(p, &mut graph);
                    active.remove(i);
                }
                continue;
            }
        }
        graph.push_l_path(m, p);
        graph.push_l_path(m, q);
        active.remove(j);
        active.remove(i);
        if !roots.contains(&m) && !active.contains(&m) {
            active.push(m);
        }
    }
    debug_assert!(inst.points.iter().all(|&p| graph.contains_point(p)));
    let forest = prune_to_forest(&graph, inst);
    let value = forest.weight();
    Ok(Solution { value, forest })
}
