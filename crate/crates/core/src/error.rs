use crate::geometry::GridPoint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("root (0,0) required")]
    MissingOrigin,
    #[error("point {0} lies outside the first quadrant")]
    NegativeCoordinate(GridPoint),
    #[error("duplicate point {0}")]
    DuplicatePoint(GridPoint),
    #[error("duplicate root {0}")]
    DuplicateRoot(GridPoint),
    #[error("point {0} coincides with a root")]
    PointOnRoot(GridPoint),
    #[error("uncoverable point {0}")]
    Uncoverable(GridPoint),
    #[error("{0} is not a grid intersection")]
    NotOnGrid(GridPoint),
    #[error("grid too large: {edges} unit edges exceeds the budget of {budget}")]
    GridTooLarge { edges: usize, budget: usize },
    #[error("not in general position")]
    NotGeneralPosition,
    #[error("cannot satisfy general position: {needed} distinct values needed, only {available} available")]
    GeneralPositionImpossible { needed: usize, available: usize },
    #[error("not enough lattice points: {needed} needed, {available} available")]
    NotEnoughRoom { needed: usize, available: usize },
    #[error("size budget exceeded: {estimate} > {ceiling}")]
    BudgetExceeded { estimate: u128, ceiling: u128 },
    #[error("k must be a positive integer")]
    InvalidK,
    #[error("segment {0} is not axis-parallel")]
    NotAxisParallel(String),
    #[error("invalid pre-specified instance: {0}")]
    InvalidPrespecified(String),
    #[error("no feasible solution")]
    Infeasible,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
