//! Exact, fixed-parameter, approximation-scheme and heuristic solvers for the
//! rectilinear Steiner forest arborescence (RSFA) problem and its single-root
//! special case, the rectilinear Steiner arborescence (RSA) problem.
//!
//! All coordinates are non-negative integers and every solver returns its
//! solution as a [`RectGraph`] that can be checked with [`validate_rsfa`].

pub mod error;
pub mod exact;
pub mod fpt;
pub mod geometry;
pub mod grid;
pub mod heuristics;
pub mod io;
pub mod ptas;
pub mod rect_graph;
pub mod reduction;

pub use error::{Error, Result};
pub use exact::{solve_rsa, solve_rsfa_exact};
pub use fpt::solve_rsfa_fpt;
pub use geometry::{covers, l1_dist, meet, nearest_covering_root, Coord, GridPoint, Instance, Length};
pub use grid::HananGrid;
pub use heuristics::{greedy_baseline, oracle_optimum, OracleConfig};
pub use ptas::{solve_rsfa_ptas, PtasConfig, PtasSolution};
pub use rect_graph::{prune_to_forest, validate_rsfa, RectGraph, Segment, ServiceReport};
pub use reduction::{solve_prespecified, PrespecifiedInstance};

/// A solver result: the optimal (or approximate) length and a realizing forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub value: Length,
    pub forest: RectGraph,
}
