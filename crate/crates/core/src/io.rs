//! File formats, instance generation and run bookkeeping around the solvers.
//!
//! Instance files are line oriented. `#` starts a comment and blank lines are
//! ignored. Records are `P x y` (terminal), `R x y` (root), `T x1 y1 x2 y2`
//! (segment of a pre-specified tree) and `ROOT x y` (its root). Any `T` line
//! selects the pre-specified variant, whose `P` lines are the new points.
//! Solution files hold `S x1 y1 x2 y2` lines.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Coord, GridPoint, Instance, Length};
use crate::grid::HananGrid;
use crate::heuristics::{greedy_baseline, oracle_optimum, OracleConfig};
use crate::ptas::{solve_rsfa_ptas, PtasConfig};
use crate::rect_graph::{RectGraph, Segment};
use crate::reduction::{solve_prespecified, to_rsfa_instance, PrespecifiedInstance};
use crate::{solve_rsfa_exact, solve_rsfa_fpt, Solution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedInstance {
    Rsfa(Instance),
    Prespecified(PrespecifiedInstance),
}

impl ParsedInstance {
    /// Terminals and roots as a plain point set; the tree root is the only root
    /// of a pre-specified instance.
    pub fn as_points(&self) -> Instance {
        match self {
            ParsedInstance::Rsfa(inst) => inst.clone(),
            ParsedInstance::Prespecified(p) => Instance {
                points: p.tree_terminals.iter().chain(&p.new_points).copied().collect(),
                roots: vec![p.root],
            },
        }
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

/// `(line number, tag, integer arguments)` for every record line.
fn records(text: &str) -> Result<Vec<(usize, &str, Vec<Coord>)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = body.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        let args = tokens
            .map(|t| t.parse::<Coord>().map_err(|_| parse_err(line, format!("expected an integer, found '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        let arity = match tag {
            "P" | "R" | "ROOT" => 2,
            "T" | "S" => 4,
            _ => return Err(parse_err(line, format!("unknown record '{tag}'"))),
        };
        if args.len() != arity {
            return Err(parse_err(line, format!("{tag} expects {arity} integers, found {}", args.len())));
        }
        if args.iter().any(|&c| c < 0) {
            return Err(parse_err(line, "negative coordinate"));
        }
        out.push((line, tag, args));
    }
    Ok(out)
}

fn segment_at(line: usize, a: &[Coord]) -> Result<Segment> {
    let s = Segment::new(GridPoint::new(a[0], a[1]), GridPoint::new(a[2], a[3]))
        .map_err(|_| parse_err(line, "segment is not axis-parallel"))?;
    if s.is_degenerate() {
        return Err(parse_err(line, "segment has zero length"));
    }
    Ok(s)
}

fn overlaps(s: &Segment, t: &Segment) -> bool {
    if s.is_horizontal() != t.is_horizontal() {
        return false;
    }
    let key = |s: &Segment| if s.is_horizontal() { (s.a.y, s.a.x, s.b.x) } else { (s.a.x, s.a.y, s.b.y) };
    let (l1, a1, b1) = key(s);
    let (l2, a2, b2) = key(t);
    l1 == l2 && a1.max(a2) < b1.min(b2)
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let recs = records(text)?;
    if recs.iter().any(|r| r.1 == "T") {
        return parse_prespecified(recs).map(ParsedInstance::Prespecified);
    }
    let mut roots = Vec::new();
    let mut points = Vec::new();
    // point -> (line, is_root)
    let mut seen: HashMap<GridPoint, (usize, bool)> = HashMap::new();
    for (line, tag, a) in recs {
        let p = GridPoint::new(a[0], a[1]);
        let is_root = match tag {
            "R" => true,
            "P" => false,
            _ => return Err(parse_err(line, format!("{tag} requires at least one T line"))),
        };
        if let Some(&(first, root_before)) = seen.get(&p) {
            let reason = match (root_before, is_root) {
                (true, true) => format!("duplicate root {p}"),
                (false, false) => format!("duplicate point {p}"),
                _ => format!("point {p} coincides with a root (line {first})"),
            };
            return Err(parse_err(line, reason));
        }
        seen.insert(p, (line, is_root));
        if is_root { roots.push(p) } else { points.push(p) }
    }
    Instance::new(points, roots).map(ParsedInstance::Rsfa)
}

fn parse_prespecified(recs: Vec<(usize, &str, Vec<Coord>)>) -> Result<PrespecifiedInstance> {
    let mut tree: Vec<(usize, Segment)> = Vec::new();
    let mut root = None;
    let mut new_points: Vec<(usize, GridPoint)> = Vec::new();
    for (line, tag, a) in recs {
        match tag {
            "T" => {
                let s = segment_at(line, &a)?;
                if let Some((first, _)) = tree.iter().find(|(_, t)| overlaps(&s, t)) {
                    return Err(parse_err(line, format!("segment overlaps the segment on line {first}")));
                }
                tree.push((line, s));
            }
            "ROOT" => {
                if root.is_some() {
                    return Err(parse_err(line, "duplicate ROOT"));
                }
                root = Some(GridPoint::new(a[0], a[1]));
            }
            "P" => {
                let p = GridPoint::new(a[0], a[1]);
                if let Some((first, _)) = new_points.iter().find(|(_, q)| *q == p) {
                    return Err(parse_err(line, format!("duplicate point {p} (line {first})")));
                }
                new_points.push((line, p));
            }
            _ => return Err(parse_err(line, format!("{tag} is not allowed with T lines"))),
        }
    }
    let root = root.ok_or_else(|| Error::InvalidPrespecified("ROOT required".into()))?;
    PrespecifiedInstance::from_tree(
        RectGraph::new(tree.into_iter().map(|(_, s)| s).collect()),
        root,
        new_points.into_iter().map(|(_, p)| p).collect(),
    )
}

/// Roots first, then terminals, each in instance order.
pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::new();
    for r in &inst.roots {
        writeln!(out, "R {} {}", r.x, r.y).unwrap();
    }
    for p in &inst.points {
        writeln!(out, "P {} {}", p.x, p.y).unwrap();
    }
    out
}

pub fn format_prespecified(inst: &PrespecifiedInstance) -> String {
    let mut out = format!("ROOT {} {}\n", inst.root.x, inst.root.y);
    for s in &inst.tree.segments {
        writeln!(out, "T {} {} {} {}", s.a.x, s.a.y, s.b.x, s.b.y).unwrap();
    }
    for p in &inst.new_points {
        writeln!(out, "P {} {}", p.x, p.y).unwrap();
    }
    out
}

pub fn parse_forest(text: &str) -> Result<RectGraph> {
    let mut g = RectGraph::default();
    for (line, tag, a) in records(text)? {
        if tag != "S" {
            return Err(parse_err(line, format!("expected S, found {tag}")));
        }
        g.push(
            Segment::new(GridPoint::new(a[0], a[1]), GridPoint::new(a[2], a[3]))
                .map_err(|_| parse_err(line, "segment is not axis-parallel"))?,
        );
    }
    Ok(g)
}

pub fn format_forest(g: &RectGraph) -> String {
    let mut out = String::new();
    for s in &g.segments {
        writeln!(out, "S {} {} {} {}", s.a.x, s.a.y, s.b.x, s.b.y).unwrap();
    }
    out
}

/// Seeded random instance with `n` terminals and `m` roots (the origin among
/// them) in `[0, coord_max]²`. In general position every x and every y is
/// distinct; coordinates are resampled until they are.
pub fn generate(n: usize, m: usize, coord_max: Coord, seed: u64, general_position: bool) -> Result<Instance> {
    if m == 0 || coord_max < 1 {
        return Err(Error::NotEnoughRoom { needed: n + m.max(1), available: 0 });
    }
    let side = coord_max as u128 + 1;
    if general_position && (n + m) as u128 > side {
        return Err(Error::GeneralPositionImpossible { needed: n + m, available: side as usize });
    }
    if (n + m) as u128 > side * side {
        return Err(Error::NotEnoughRoom { needed: n + m, available: (side * side).min(usize::MAX as u128) as usize });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken = vec![GridPoint::ORIGIN];
    let (mut xs, mut ys) = (vec![0], vec![0]);
    while taken.len() < n + m {
        let p = if general_position {
            let x = loop {
                let x = rng.gen_range(0..=coord_max);
                if !xs.contains(&x) {
                    break x;
                }
            };
            let y = loop {
                let y = rng.gen_range(0..=coord_max);
                if !ys.contains(&y) {
                    break y;
                }
            };
            GridPoint::new(x, y)
        } else {
            GridPoint::new(rng.gen_range(0..=coord_max), rng.gen_range(0..=coord_max))
        };
        if !taken.contains(&p) {
            xs.push(p.x);
            ys.push(p.y);
            taken.push(p);
        }
    }
    let points = taken.split_off(m);
    Instance::new(points, taken)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    Exact,
    Fpt,
    Ptas,
    Greedy,
    Oracle,
}

impl Algo {
    pub const ALL: [Algo; 5] = [Algo::Exact, Algo::Fpt, Algo::Ptas, Algo::Greedy, Algo::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Exact => "exact",
            Algo::Fpt => "fpt",
            Algo::Ptas => "ptas",
            Algo::Greedy => "greedy",
            Algo::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}' (expected exact, fpt, ptas, greedy or oracle)"))
    }
}

pub fn solve_instance(algo: Algo, k: usize, inst: &Instance) -> Result<Solution> {
    match algo {
        Algo::Exact => solve_rsfa_exact(inst),
        Algo::Fpt => solve_rsfa_fpt(inst),
        Algo::Ptas => solve_rsfa_ptas(inst, &PtasConfig::with_k(k)).map(|s| Solution { value: s.value, forest: s.forest }),
        Algo::Greedy => greedy_baseline(inst),
        Algo::Oracle => oracle_optimum(inst, &OracleConfig::default()),
    }
}

/// Solve either variant; a pre-specified instance is solved through its
/// reduction and reported as the combined graph.
pub fn solve_parsed(algo: Algo, k: usize, inst: &ParsedInstance) -> Result<Solution> {
    match inst {
        ParsedInstance::Rsfa(i) => solve_instance(algo, k, i),
        ParsedInstance::Prespecified(p) => solve_prespecified(p, |i| solve_instance(algo, k, i)),
    }
}

/// The parameter reported next to a run: `k` for the PTAS and the sweep
/// height `h` for the fixed-parameter solver.
pub fn run_parameter(algo: Algo, k: usize, inst: &ParsedInstance) -> Option<u64> {
    match algo {
        Algo::Ptas => Some(k as u64),
        Algo::Fpt => {
            let reduced = match inst {
                ParsedInstance::Rsfa(i) => i.clone(),
                ParsedInstance::Prespecified(p) => to_rsfa_instance(p).ok()?,
            };
            let g = HananGrid::build(&reduced.all_points());
            Some(g.h().min(g.v()) as u64)
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub instance: String,
    pub solver: Algo,
    pub param: Option<u64>,
    pub value: Length,
    pub reference: Option<Length>,
    pub wall_time: Option<Duration>,
}

impl RunRecord {
    pub const CSV_HEADER: &'static str = "instance,solver,param,value,reference,ratio,wall_time_ms";

    /// `value / reference` rounded half up to six decimals, computed exactly.
    pub fn ratio(&self) -> Option<String> {
        let r = self.reference?;
        if r == 0 {
            return Some(if self.value == 0 { "1.000000".into() } else { "inf".into() });
        }
        let (v, r) = (self.value as i128, r as i128);
        let micro = (2 * v * 1_000_000 + r) / (2 * r);
        Some(format!("{}.{:06}", micro / 1_000_000, micro % 1_000_000))
    }

    /// Fields in [`RunRecord::CSV_HEADER`] order; absent values are empty.
    pub fn csv_fields(&self) -> [String; 7] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.instance.clone(),
            self.solver.to_string(),
            opt(self.param.map(|p| p.to_string())),
            self.value.to_string(),
            opt(self.reference.map(|r| r.to_string())),
            opt(self.ratio()),
            opt(self.wall_time.map(|t| format!("{:.3}", t.as_secs_f64() * 1e3))),
        ]
    }
}

pub fn format_csv(records: &[RunRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RunRecord::CSV_HEADER.split(',')).expect("in-memory write");
    for r in records {
        w.write_record(r.csv_fields()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

const SVG_MARGIN: Coord = 20;

/// Hanan grid lines, then the forest, then roots as gray squares and terminals
/// as white disks. The y axis points up.
pub fn render_svg(inst: &Instance, forest: Option<&RectGraph>) -> String {
    let mut all = inst.all_points();
    if let Some(g) = forest {
        all.extend(g.vertices());
    }
    let lo_x = all.iter().map(|p| p.x).min().unwrap_or(0);
    let lo_y = all.iter().map(|p| p.y).min().unwrap_or(0);
    let hi_x = all.iter().map(|p| p.x).max().unwrap_or(0);
    let hi_y = all.iter().map(|p| p.y).max().unwrap_or(0);
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1);
    let unit = (480 / span).clamp(1, 40);
    let sx = |x: Coord| SVG_MARGIN + (x - lo_x) * unit;
    let sy = |y: Coord| SVG_MARGIN + (hi_y - y) * unit;
    let (w, h) = ((hi_x - lo_x) * unit + 2 * SVG_MARGIN, (hi_y - lo_y) * unit + 2 * SVG_MARGIN);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();

    let grid = HananGrid::build(&inst.all_points());
    out.push_str("<g stroke=\"#d0d0d0\" stroke-width=\"1\">\n");
    for &x in &grid.xs {
        writeln!(out, r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#, sx(x), sy(lo_y), sy(hi_y)).unwrap();
    }
    for &y in &grid.ys {
        writeln!(out, r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}"/>"#, sy(y), sx(lo_x), sx(hi_x)).unwrap();
    }
    out.push_str("</g>\n");

    if let Some(g) = forest {
        out.push_str("<g stroke=\"black\" stroke-width=\"3\" stroke-linecap=\"square\">\n");
        for s in &g.segments {
            writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, sx(s.a.x), sy(s.a.y), sx(s.b.x), sy(s.b.y))
                .unwrap();
        }
        out.push_str("</g>\n");
    }

    out.push_str("<g fill=\"#909090\" stroke=\"black\">\n");
    for r in &inst.roots {
        writeln!(out, r#"<rect x="{}" y="{}" width="10" height="10"/>"#, sx(r.x) - 5, sy(r.y) - 5).unwrap();
    }
    out.push_str("</g>\n<g fill=\"white\" stroke=\"black\">\n");
    for p in &inst.points {
        writeln!(out, r#"<circle cx="{}" cy="{}" r="5"/>"#, sx(p.x), sy(p.y)).unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}
