//! Guillotine-subdivision approximation scheme.
//!
//! Coordinates are doubled so that interval midpoints are integral, and the
//! instance is perturbed into general position first if necessary. A window
//! carries *sinks* on its left and bottom sides (gate segments already joined
//! to a root, usable as attachment points) and *demands* on its right and top
//! sides (gate endpoints that still have to be joined from inside). Windows
//! with a terminal strictly inside are split by a cut; the gates placed on the
//! cut become sinks of the high child and demands of the low child. Windows
//! with no terminal inside are solved exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::exact::{solve_forest_with, RootService};
use crate::geometry::{covers, l1_dist, Coord, GridPoint, Instance, Length};
use crate::rect_graph::{normalize, prune_to_forest, validate_rsfa, RectGraph, Segment};

const INF: Length = Length::MAX / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PtasConfig {
    pub k: usize,
    /// Refuse instances whose size estimate exceeds this ceiling.
    pub budget: u128,
    /// Abort once the memo table holds this many subproblems.
    pub memo_cap: usize,
    /// Branch and bound against unrestricted window optima. Changes the
    /// running time only, never the value.
    pub bound_pruning: bool,
}

impl Default for PtasConfig {
    fn default() -> Self {
        PtasConfig { k: 1, budget: 8_000_000, memo_cap: 2_000_000, bound_pruning: true }
    }
}

impl PtasConfig {
    pub fn with_k(k: usize) -> Self {
        PtasConfig { k, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtasSolution {
    pub value: Length,
    pub forest: RectGraph,
    pub k: usize,
    /// Dynamic-programming value in internal units.
    pub internal_value: Length,
    /// Internal units per original unit, before perturbation is undone.
    pub internal_scale: Coord,
    pub internal_forest: RectGraph,
    /// Internal coordinate to original coordinate, per axis.
    pub x_map: BTreeMap<Coord, Coord>,
    pub y_map: BTreeMap<Coord, Coord>,
    pub perturbed: bool,
    pub subproblems: usize,
}

// ---------------------------------------------------------------------------
// cuts and spans

/// A vertical (`x = coord`) or horizontal (`y = coord`) cut restricted to a
/// window, with the endpoints met along it. Window-boundary crossings are not
/// endpoints along the cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutProfile {
    pub vertical: bool,
    pub coord: Coord,
    /// Positions along the cut, descending.
    pub endpoints_along: Vec<Coord>,
}

impl CutProfile {
    pub fn new(vertical: bool, coord: Coord, along: impl IntoIterator<Item = Coord>) -> Self {
        let set: BTreeSet<Coord> = along.into_iter().collect();
        CutProfile { vertical, coord, endpoints_along: set.into_iter().rev().collect() }
    }

    pub fn xi(&self) -> usize {
        self.endpoints_along.len()
    }

    fn at(&self, along: Coord) -> GridPoint {
        if self.vertical {
            GridPoint::new(self.coord, along)
        } else {
            GridPoint::new(along, self.coord)
        }
    }
}

/// 0-based positions of the span endpoints among `xi` ordered endpoints.
fn span_positions(xi: usize, k: usize) -> Option<(usize, usize)> {
    if xi <= 2 * (k - 1) {
        None
    } else {
        Some((k - 1, xi - k))
    }
}

/// σ_k: the segment from the k-th to the k-th-last endpoint, or nothing when
/// there are at most `2(k-1)` endpoints.
pub fn k_span(cut: &CutProfile, k: usize) -> Option<Segment> {
    assert!(k >= 1, "k must be positive");
    let (i, j) = span_positions(cut.xi(), k)?;
    Some(Segment::axis(cut.at(cut.endpoints_along[i]), cut.at(cut.endpoints_along[j])))
}

/// True when the k-span is empty or lies inside Un(g).
pub fn is_k_perfect(cut: &CutProfile, g: &RectGraph, k: usize) -> bool {
    match k_span(cut, k) {
        None => true,
        Some(s) if s.is_degenerate() => g.contains_point(s.a),
        Some(s) => {
            let mut with = g.clone();
            with.push(s);
            with.weight() == g.weight() && g.contains_point(s.a) && g.contains_point(s.b)
        }
    }
}

// ---------------------------------------------------------------------------
// discretization

/// Doubled coordinates of the points together with the midpoints between
/// consecutive ones: `2(n+m)-1` values per axis in general position.
pub fn discretized_coordinates(inst: &Instance) -> Result<(Vec<Coord>, Vec<Coord>)> {
    if !inst.in_general_position() {
        return Err(Error::NotGeneralPosition);
    }
    let all = inst.all_points();
    let axis = |f: fn(&GridPoint) -> Coord| {
        let mut v: Vec<Coord> = all.iter().map(|p| 2 * f(p)).collect();
        v.sort();
        let mids: Vec<Coord> = v.windows(2).map(|w| (w[0] + w[1]) / 2).collect();
        v.extend(mids);
        v.sort();
        v
    };
    Ok((axis(|p| p.x), axis(|p| p.y)))
}

/// Rank remap into general position: `x ↦ x·(n+m) + rank` among equal `x`, with
/// roots ranked before points (and the origin first), so covering between a
/// root and a point is unchanged.
fn perturb(inst: &Instance) -> (Instance, BTreeMap<Coord, Coord>, BTreeMap<Coord, Coord>) {
    let all = inst.all_points();
    let n = inst.n();
    let scale = all.len() as Coord;
    let remap = |f: fn(&GridPoint) -> Coord| {
        let mut order: Vec<usize> = (0..all.len()).collect();
        // roots (index >= n) before points, origin first
        order.sort_by_key(|&i| (f(&all[i]), i < n, all[i] != GridPoint::ORIGIN, i));
        let mut out = vec![0; all.len()];
        let mut inv = BTreeMap::new();
        let mut rank = 0;
        for (pos, &i) in order.iter().enumerate() {
            if pos > 0 && f(&all[order[pos - 1]]) != f(&all[i]) {
                rank = 0;
            }
            out[i] = f(&all[i]) * scale + rank;
            inv.insert(out[i], f(&all[i]));
            rank += 1;
        }
        (out, inv)
    };
    let (xs, xinv) = remap(|p| p.x);
    let (ys, yinv) = remap(|p| p.y);
    let pts: Vec<GridPoint> = (0..all.len()).map(|i| GridPoint::new(xs[i], ys[i])).collect();
    let out = Instance { points: pts[..n].to_vec(), roots: pts[n..].to_vec() };
    (out, xinv, yinv)
}

/// Size estimate `(2(n+m)-1)^4 · gates-per-side` checked against the budget.
pub fn size_estimate(n_plus_m: usize, k: usize) -> u128 {
    let c = (2 * n_plus_m).saturating_sub(1).max(1) as u128;
    let mut per_side = 0u128;
    let mut binom = 1u128;
    for j in 0..=(2 * k).min(n_plus_m) {
        if j > 0 {
            binom = binom * (n_plus_m as u128 + 1 - j as u128) / j as u128;
        }
        per_side += binom << j;
    }
    c.pow(4).saturating_mul(per_side * 4)
}

// ---------------------------------------------------------------------------
// subproblems

/// Gates on one window side: points `X_e` and segments `S_e`, both as positions
/// along the side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateSet {
    pub points: Vec<Coord>,
    pub segments: Vec<(Coord, Coord)>,
}

/// A window in internal coordinates with gates on its four sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtasSubproblem {
    pub lo: GridPoint,
    pub hi: GridPoint,
    pub right: GateSet,
    pub top: GateSet,
    pub left: GateSet,
    pub bottom: GateSet,
}

impl PtasSubproblem {
    /// The whole box, with no gates.
    pub fn top_level(lo: GridPoint, hi: GridPoint) -> Self {
        PtasSubproblem {
            lo,
            hi,
            right: GateSet::default(),
            top: GateSet::default(),
            left: GateSet::default(),
            bottom: GateSet::default(),
        }
    }

    /// Checks the per-side cardinality and middle-segment invariants.
    pub fn check(&self, k: usize) -> Result<()> {
        let sides = [
            (&self.right, self.lo.y, self.hi.y),
            (&self.top, self.lo.x, self.hi.x),
            (&self.left, self.lo.y, self.hi.y),
            (&self.bottom, self.lo.x, self.hi.x),
        ];
        for (g, lo, hi) in sides {
            let bad = |m: &str| Err(Error::InvalidPrespecified(format!("gate set {g:?}: {m}")));
            let interior: BTreeSet<Coord> = g.points.iter().copied().filter(|&v| lo < v && v < hi).collect();
            if g.points.iter().any(|&v| v < lo || v > hi) {
                return bad("point off the side");
            }
            if interior.len() > 2 * k {
                return bad("too many interior points");
            }
            let xset: BTreeSet<Coord> = g.points.iter().copied().collect();
            if g.segments.iter().any(|&(a, b)| a > b || !xset.contains(&a) || !xset.contains(&b)) {
                return bad("segment endpoints must be gate points");
            }
            if interior.len() == 2 * k {
                let v: Vec<Coord> = interior.into_iter().collect();
                if !g.segments.contains(&(v[k - 1], v[k])) {
                    return bad("middle segment missing");
                }
            }
        }
        Ok(())
    }

    /// I_W: terminals strictly inside, bottom endpoints of right gates and left
    /// endpoints of top gates, minus roots.
    pub fn goal(&self, inst: &Instance) -> Vec<GridPoint> {
        let mut out: BTreeSet<GridPoint> = inst
            .points
            .iter()
            .copied()
            .filter(|p| self.lo.x < p.x && p.x < self.hi.x && self.lo.y < p.y && p.y < self.hi.y)
            .collect();
        out.extend(self.right.segments.iter().map(|&(a, _)| GridPoint::new(self.hi.x, a)));
        out.extend(self.top.segments.iter().map(|&(a, _)| GridPoint::new(a, self.hi.y)));
        out.retain(|p| !inst.roots.contains(p));
        out.into_iter().collect()
    }
}

/// Value and structure of a solved subproblem, in internal units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubproblemValue {
    pub value: Length,
    pub forest: RectGraph,
}

type Idx = u16;

/// Canonical memo key: window corners, sink ranges on the low sides and demand
/// points, all as indices into the discretized coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    lo: [Idx; 2],
    hi: [Idx; 2],
    /// `sinks[0]` on `x = lo[0]` as y-ranges, `sinks[1]` on `y = lo[1]` as x-ranges.
    sinks: [Vec<(Idx, Idx)>; 2],
    demands: Vec<[Idx; 2]>,
}

#[derive(Clone, Debug)]
struct Choice {
    axis: usize,
    cut: Idx,
    gates: Vec<(Idx, Idx)>,
}

struct Ctx {
    coords: [Vec<Coord>; 2],
    /// Whether an index is the coordinate of some instance point.
    hanan: [Vec<bool>; 2],
    points: Vec<[Idx; 2]>,
    roots: Vec<[Idx; 2]>,
    k: usize,
    memo: HashMap<Key, (Length, Option<Choice>)>,
    memo_cap: usize,
    /// Unrestricted window optima, used to prune and to stop early.
    bounds: HashMap<Key, Length>,
    prune: bool,
}

fn inside(p: [Idx; 2], lo: [Idx; 2], hi: [Idx; 2]) -> bool {
    (0..2).all(|a| lo[a] < p[a] && p[a] < hi[a])
}

fn closed(p: [Idx; 2], lo: [Idx; 2], hi: [Idx; 2]) -> bool {
    (0..2).all(|a| lo[a] <= p[a] && p[a] <= hi[a])
}

impl Ctx {
    fn point(&self, p: [Idx; 2]) -> GridPoint {
        GridPoint::new(self.coords[0][p[0] as usize], self.coords[1][p[1] as usize])
    }

    fn len(&self, axis: usize, a: Idx, b: Idx) -> Length {
        self.coords[axis][b as usize] - self.coords[axis][a as usize]
    }

    /// Point at position `along` on the line `x_axis = at`.
    fn on_line(axis: usize, at: Idx, along: Idx) -> [Idx; 2] {
        let mut p = [0; 2];
        p[axis] = at;
        p[1 - axis] = along;
        p
    }

    /// Drop served demands and useless sinks, trim sinks to the terminals and
    /// sort everything.
    fn canonical(&self, mut key: Key) -> Key {
        let on_sink = |d: &[Idx; 2], sinks: &[Vec<(Idx, Idx)>; 2], lo: [Idx; 2]| {
            (0..2).any(|a| d[a] == lo[a] && sinks[a].iter().any(|&(s, t)| s <= d[1 - a] && d[1 - a] <= t))
        };
        let roots = &self.roots;
        let (sinks, lo) = (key.sinks.clone(), key.lo);
        key.demands.retain(|d| !roots.contains(d) && !on_sink(d, &sinks, lo));
        key.demands.sort();
        key.demands.dedup();

        let mut max = [None::<Idx>; 2];
        for t in self.points.iter().filter(|p| inside(**p, key.lo, key.hi)).chain(key.demands.iter()) {
            for a in 0..2 {
                max[a] = Some(max[a].map_or(t[a], |m: Idx| m.max(t[a])));
            }
        }
        for a in 0..2 {
            let b = 1 - a;
            let list = std::mem::take(&mut key.sinks[a]);
            let mut kept: Vec<(Idx, Idx)> = match max[b] {
                None => Vec::new(),
                Some(m) => list.into_iter().filter(|&(s, _)| s <= m).map(|(s, t)| (s, t.min(m))).collect(),
            };
            kept.sort();
            let mut merged: Vec<(Idx, Idx)> = Vec::with_capacity(kept.len());
            for (s, t) in kept {
                match merged.last_mut() {
                    Some(last) if s <= last.1 => last.1 = last.1.max(t),
                    _ => merged.push((s, t)),
                }
            }
            key.sinks[a] = merged;
        }
        key
    }

    fn solve(&mut self, key: &Key) -> Result<Length> {
        if let Some(&(v, _)) = self.memo.get(key) {
            return Ok(v);
        }
        if self.memo.len() >= self.memo_cap {
            return Err(Error::BudgetExceeded { estimate: self.memo.len() as u128 + 1, ceiling: self.memo_cap as u128 });
        }
        let interior: Vec<[Idx; 2]> = self.points.iter().copied().filter(|&p| inside(p, key.lo, key.hi)).collect();
        let entry = if interior.is_empty() {
            (self.base(key).map_or(INF, |s| s.value), None)
        } else {
            self.split(key, &interior)?
        };
        let v = entry.0;
        self.memo.insert(key.clone(), entry);
        Ok(v)
    }

    fn split(&mut self, key: &Key, interior: &[[Idx; 2]]) -> Result<(Length, Option<Choice>)> {
        let floor = if self.prune { self.lower_bound(key) } else { 0 };
        let mut best: (Length, Option<Choice>) = (INF, None);
        // cuts through interior terminals first, they tend to finish early
        let mut cuts: Vec<(bool, usize, Idx)> = Vec::new();
        for axis in 0..2 {
            for cut in key.lo[axis] + 1..key.hi[axis] {
                // nothing on or beyond the cut: the low child alone is a
                // restriction of this window
                if !interior.iter().chain(key.demands.iter()).any(|p| p[axis] >= cut) {
                    continue;
                }
                cuts.push((!interior.iter().any(|p| p[axis] == cut), axis, cut));
            }
        }
        cuts.sort();
        for (_, axis, cut) in cuts {
            let mut configs: Vec<(Length, Vec<(Idx, Idx)>)> = self
                .gate_configs(key, interior, axis, cut)
                .into_iter()
                .map(|g| (g.iter().map(|&(s, t)| self.len(1 - axis, s, t)).sum(), g))
                .collect();
            configs.sort();
            for (cost, gates) in configs {
                if cost >= best.0 {
                    break;
                }
                let (low, high) = self.children(key, axis, cut, &gates);
                if self.prune && cost + self.lower_bound(&low) + self.lower_bound(&high) >= best.0 {
                    continue;
                }
                let vl = self.solve(&low)?;
                if cost + vl >= best.0 {
                    continue;
                }
                let vh = self.solve(&high)?;
                if cost + vl + vh < best.0 {
                    best = (cost + vl + vh, Some(Choice { axis, cut, gates }));
                    if best.0 <= floor {
                        return Ok(best);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Admissible gate segments on the cut `x_axis = cut`.
    fn gate_configs(&self, key: &Key, interior: &[[Idx; 2]], axis: usize, cut: Idx) -> Vec<Vec<(Idx, Idx)>> {
        let b = 1 - axis;
        let (lo, hi) = (key.lo[b], key.hi[b]);
        let forced: Vec<Idx> = interior
            .iter()
            .chain(key.demands.iter())
            .filter(|p| p[axis] == cut)
            .map(|p| p[b])
            .collect();
        // terminals the gates can serve, on the high side of the cut
        let far: Vec<Idx> = interior.iter().chain(key.demands.iter()).filter(|p| p[axis] > cut).map(|p| p[b]).collect();

        let mut cand: BTreeSet<Idx> = [lo, hi].into_iter().collect();
        cand.extend((lo + 1..hi).filter(|&v| self.hanan[b][v as usize]));
        cand.extend(key.sinks[axis].iter().flat_map(|&(s, t)| [s, t]));
        cand.extend(key.demands.iter().map(|d| d[b]).filter(|&v| lo <= v && v <= hi));
        let cand: Vec<Idx> = cand.into_iter().collect();

        // a gate only helps the high side, so its top is trimmed down to a
        // terminal it serves or a point it must cover
        let useful = |_: Idx, t: Idx| far.contains(&t) || forced.contains(&t);

        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.enumerate(&cand, 0, 0, lo, hi, &useful, &mut cur, &mut out);
        out.retain(|gates| {
            forced.iter().all(|&f| gates.iter().any(|&(s, t)| s <= f && f <= t)) && self.middle_rule(gates, lo, hi)
        });
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        cand: &[Idx],
        from: usize,
        used: usize,
        lo: Idx,
        hi: Idx,
        useful: &dyn Fn(Idx, Idx) -> bool,
        cur: &mut Vec<(Idx, Idx)>,
        out: &mut Vec<Vec<(Idx, Idx)>>,
    ) {
        out.push(cur.clone());
        for i in from..cand.len() {
            for j in i..cand.len() {
                let (s, t) = (cand[i], cand[j]);
                let extra = [s, t].iter().filter(|&&v| lo < v && v < hi).count() - usize::from(i == j && lo < s && s < hi);
                if used + extra > 2 * self.k || !useful(s, t) {
                    continue;
                }
                cur.push((s, t));
                self.enumerate(cand, j + 1, used + extra, lo, hi, useful, cur, out);
                cur.pop();
            }
        }
    }

    /// With `2k` interior gate points the middle two must form a gate.
    fn middle_rule(&self, gates: &[(Idx, Idx)], lo: Idx, hi: Idx) -> bool {
        let pts: BTreeSet<Idx> = gates.iter().flat_map(|&(s, t)| [s, t]).filter(|&v| lo < v && v < hi).collect();
        assert!(pts.len() <= 2 * self.k, "gate set exceeds 2k interior points");
        assert!(gates.windows(2).all(|w| w[0].1 < w[1].0), "gates overlap");
        match span_positions(pts.len(), self.k) {
            Some((i, j)) if pts.len() == 2 * self.k => {
                let v: Vec<Idx> = pts.into_iter().rev().collect();
                gates.contains(&(v[j], v[i]))
            }
            _ => true,
        }
    }

    fn children(&self, key: &Key, axis: usize, cut: Idx, gates: &[(Idx, Idx)]) -> (Key, Key) {
        let b = 1 - axis;
        let clip = |list: &[(Idx, Idx)], lo: Idx, hi: Idx| -> Vec<(Idx, Idx)> {
            list.iter().filter(|&&(s, t)| s <= hi && t >= lo).map(|&(s, t)| (s.max(lo), t.min(hi))).collect()
        };
        let mut low = key.clone();
        low.hi[axis] = cut;
        low.sinks[b] = clip(&key.sinks[b], key.lo[axis], cut);
        low.demands = key.demands.iter().copied().filter(|d| d[axis] < cut).collect();
        low.demands.extend(gates.iter().map(|&(s, _)| Ctx::on_line(axis, cut, s)));

        let mut high = key.clone();
        high.lo[axis] = cut;
        high.sinks[axis] = gates.to_vec();
        high.sinks[b] = clip(&key.sinks[b], cut, key.hi[axis]);
        high.demands = key.demands.iter().copied().filter(|d| d[axis] > cut).collect();
        (self.canonical(low), self.canonical(high))
    }

    /// Optimum of the window without the guillotine restriction: every
    /// solution of the subproblem is a feasible forest for the same terminals
    /// and attachment targets.
    fn lower_bound(&mut self, key: &Key) -> Length {
        if let Some(&(v, _)) = self.memo.get(key) {
            return v;
        }
        if let Some(&v) = self.bounds.get(key) {
            return v;
        }
        let terminals: Vec<GridPoint> = self
            .points
            .iter()
            .filter(|p| inside(**p, key.lo, key.hi))
            .chain(key.demands.iter())
            .map(|&t| self.point(t))
            .collect();
        let v = solve_forest_with(&terminals, &self.service(key)).map_or(INF, |s| s.value);
        self.bounds.insert(key.clone(), v);
        v
    }

    fn service(&self, key: &Key) -> WindowService {
        WindowService {
            roots: self.roots.iter().filter(|&&r| closed(r, key.lo, key.hi)).map(|&r| self.point(r)).collect(),
            left: key.sinks[0].iter().map(|&(s, t)| (self.coords[0][key.lo[0] as usize], self.coords[1][s as usize], self.coords[1][t as usize])).collect(),
            bottom: key.sinks[1].iter().map(|&(s, t)| (self.coords[1][key.lo[1] as usize], self.coords[0][s as usize], self.coords[0][t as usize])).collect(),
        }
    }

    fn base(&self, key: &Key) -> Option<crate::Solution> {
        let terminals: Vec<GridPoint> = key.demands.iter().map(|&d| self.point(d)).collect();
        solve_forest_with(&terminals, &self.service(key))
    }

    fn realize(&self, key: &Key, out: &mut RectGraph) {
        match &self.memo[key].1 {
            None => {
                if let Some(sol) = self.base(key) {
                    out.extend(&sol.forest);
                }
            }
            Some(choice) => {
                for &(s, t) in &choice.gates {
                    let a = self.point(Ctx::on_line(choice.axis, choice.cut, s));
                    let b = self.point(Ctx::on_line(choice.axis, choice.cut, t));
                    out.push(Segment::axis(a, b));
                }
                let (low, high) = self.children(key, choice.axis, choice.cut, &choice.gates);
                self.realize(&low, out);
                self.realize(&high, out);
            }
        }
    }
}

/// Roots in the closed window plus the sink segments, as attachment targets.
struct WindowService {
    roots: Vec<GridPoint>,
    /// `(x, y_lo, y_hi)` on the left side.
    left: Vec<(Coord, Coord, Coord)>,
    /// `(y, x_lo, x_hi)` on the bottom side.
    bottom: Vec<(Coord, Coord, Coord)>,
}

impl RootService for WindowService {
    fn serve(&self, q: GridPoint) -> Option<(GridPoint, Length)> {
        let mut best: Option<(GridPoint, Length)> = None;
        let mut offer = |t: GridPoint| {
            let d = l1_dist(t, q);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((t, d));
            }
        };
        for &r in &self.roots {
            if covers(r, q) {
                offer(r);
            }
        }
        for &(x, y0, y1) in &self.left {
            if x <= q.x && y0 <= q.y {
                offer(GridPoint::new(x, q.y.min(y1)));
            }
        }
        for &(y, x0, x1) in &self.bottom {
            if y <= q.y && x0 <= q.x {
                offer(GridPoint::new(q.x.min(x1), y));
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// entry points

struct Prepared {
    ctx: Ctx,
    top: Key,
}

fn prepare(inst: &Instance, k: usize, memo_cap: usize, prune: bool) -> Result<Prepared> {
    let (dx, dy) = discretized_coordinates(inst)?;
    let with_margins = |d: Vec<Coord>| {
        let mut v = Vec::with_capacity(d.len() + 2);
        v.push(d[0] - 1);
        v.extend_from_slice(&d);
        v.push(d[d.len() - 1] + 1);
        v
    };
    let coords = [with_margins(dx), with_margins(dy)];
    let index = |axis: usize, v: Coord| coords[axis].binary_search(&(2 * v)).expect("point coordinate") as Idx;
    let to_idx = |p: &GridPoint| [index(0, p.x), index(1, p.y)];
    let points: Vec<[Idx; 2]> = inst.points.iter().map(to_idx).collect();
    let roots: Vec<[Idx; 2]> = inst.roots.iter().map(to_idx).collect();
    let mut hanan = [vec![false; coords[0].len()], vec![false; coords[1].len()]];
    for p in points.iter().chain(roots.iter()) {
        hanan[0][p[0] as usize] = true;
        hanan[1][p[1] as usize] = true;
    }
    let top = Key {
        lo: [0, 0],
        hi: [(coords[0].len() - 1) as Idx, (coords[1].len() - 1) as Idx],
        sinks: [Vec::new(), Vec::new()],
        demands: Vec::new(),
    };
    let ctx = Ctx { coords, hanan, points, roots, k, memo: HashMap::new(), memo_cap, bounds: HashMap::new(), prune };
    Ok(Prepared { ctx, top })
}

/// Solve one subproblem of the general-position instance `inst`. The window
/// and gates are in internal (doubled) coordinates and must lie on the
/// discretized lattice; the value is in internal units.
pub fn solve_subproblem(sub: &PtasSubproblem, inst: &Instance, k: usize) -> Result<SubproblemValue> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    sub.check(k)?;
    let Prepared { mut ctx, .. } = prepare(inst, k, PtasConfig::default().memo_cap, true)?;
    let idx = |axis: usize, v: Coord| {
        ctx.coords[axis].binary_search(&v).map(|i| i as Idx).map_err(|_| {
            let p = if axis == 0 { GridPoint::new(v, sub.lo.y) } else { GridPoint::new(sub.lo.x, v) };
            Error::NotOnGrid(p)
        })
    };
    let lo = [idx(0, sub.lo.x)?, idx(1, sub.lo.y)?];
    let hi = [idx(0, sub.hi.x)?, idx(1, sub.hi.y)?];
    let ranges = |axis: usize, g: &GateSet| -> Result<Vec<(Idx, Idx)>> {
        g.segments.iter().map(|&(s, t)| Ok((idx(axis, s)?, idx(axis, t)?))).collect()
    };
    let mut demands = Vec::new();
    for &(s, _) in &sub.right.segments {
        demands.push([hi[0], idx(1, s)?]);
    }
    for &(s, _) in &sub.top.segments {
        demands.push([idx(0, s)?, hi[1]]);
    }
    let key = ctx.canonical(Key { lo, hi, sinks: [ranges(1, &sub.left)?, ranges(0, &sub.bottom)?], demands });
    let value = ctx.solve(&key)?;
    if value >= INF {
        return Err(Error::Infeasible);
    }
    let mut forest = RectGraph::default();
    ctx.realize(&key, &mut forest);
    Ok(SubproblemValue { value, forest })
}

pub fn solve_rsfa_ptas(inst: &Instance, config: &PtasConfig) -> Result<PtasSolution> {
    inst.check()?;
    if config.k == 0 {
        return Err(Error::InvalidK);
    }
    let estimate = size_estimate(inst.n() + inst.m(), config.k);
    if estimate > config.budget {
        return Err(Error::BudgetExceeded { estimate, ceiling: config.budget });
    }
    let perturbed = !inst.in_general_position();
    let (work, xinv, yinv) = if perturbed {
        perturb(inst)
    } else {
        let id = |f: fn(&GridPoint) -> Coord| inst.all_points().iter().map(|p| (f(p), f(p))).collect::<BTreeMap<_, _>>();
        (inst.clone(), id(|p| p.x), id(|p| p.y))
    };
    let internal_scale = if perturbed { 2 * (inst.n() + inst.m()) as Coord } else { 2 };

    if inst.points.is_empty() {
        return Ok(PtasSolution {
            value: 0,
            forest: RectGraph::default(),
            k: config.k,
            internal_value: 0,
            internal_scale,
            internal_forest: RectGraph::default(),
            x_map: BTreeMap::new(),
            y_map: BTreeMap::new(),
            perturbed,
            subproblems: 0,
        });
    }

    let Prepared { mut ctx, top } = prepare(&work, config.k, config.memo_cap, config.bound_pruning)?;
    let internal_value = ctx.solve(&top)?;
    if internal_value >= INF {
        return Err(Error::Infeasible);
    }
    let mut internal_forest = RectGraph::default();
    ctx.realize(&top, &mut internal_forest);
    let internal_forest = normalize(&internal_forest);

    let x_map = snap_axis(&ctx.coords[0], &xinv, &internal_forest, None);
    let y_map = snap_axis(&ctx.coords[1], &yinv, &internal_forest, Some(&x_map));
    let mapped = internal_forest.map_points(|p| GridPoint::new(x_map[&p.x], y_map[&p.y]));
    let forest = prune_to_forest(&mapped, inst);
    if !validate_rsfa(&forest, inst).feasible() {
        return Err(Error::Infeasible);
    }
    Ok(PtasSolution {
        value: forest.weight(),
        forest,
        k: config.k,
        internal_value,
        internal_scale,
        internal_forest,
        x_map,
        y_map,
        perturbed,
        subproblems: ctx.memo.len(),
    })
}

/// Monotone map from internal coordinates on one axis to original ones. Point
/// coordinates go to their originals; every other line snaps to the nearer
/// point line below or above, whichever leaves less weight. `other` is the
/// finished map of the x axis when snapping y.
fn snap_axis(
    coords: &[Coord],
    inv: &BTreeMap<Coord, Coord>,
    g: &RectGraph,
    other: Option<&BTreeMap<Coord, Coord>>,
) -> BTreeMap<Coord, Coord> {
    let orig = |v: Coord| (v % 2 == 0).then(|| inv.get(&(v / 2)).copied()).flatten();
    let point_lines: Vec<(Coord, Coord)> = coords.iter().filter_map(|&v| orig(v).map(|o| (v, o))).collect();
    let mut map: BTreeMap<Coord, Coord> = BTreeMap::new();
    let mut open = Vec::new();
    for &v in coords {
        if let Some(o) = orig(v) {
            map.insert(v, o);
            continue;
        }
        let below = point_lines.iter().rev().find(|&&(w, _)| w < v).map(|&(_, o)| o);
        let above = point_lines.iter().find(|&&(w, _)| w > v).map(|&(_, o)| o);
        let first = below.or(above).expect("axis with no point line");
        map.insert(v, first);
        if let (Some(b), Some(a)) = (below, above) {
            open.push((v, b, a));
        }
    }
    let measure = |m: &BTreeMap<Coord, Coord>| {
        g.map_points(|p| match other {
            None => GridPoint::new(m[&p.x], p.y),
            Some(xm) => GridPoint::new(xm[&p.x], m[&p.y]),
        })
        .weight()
    };
    for (v, below, above) in open {
        map.insert(v, below);
        let down = measure(&map);
        map.insert(v, above);
        let up = measure(&map);
        if down <= up {
            map.insert(v, below);
        }
    }
    map
}
