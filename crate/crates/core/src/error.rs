use thiserror::Error;

use crate::exactpoly::Variable;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no image given for variable {0}")]
    MissingAssignment(Variable),
    #[error("chart {chart} outside 1..={charts}")]
    ChartOutOfRange { chart: usize, charts: usize },
    #[error("coefficient at t^{needed} is not known (series exact only up to t^{known})")]
    WindowUnderflow { needed: i64, known: i64 },
    #[error("exponent {k} outside the series window [{lo}, {hi}]")]
    OutsideWindow { k: i64, lo: i64, hi: i64 },
    #[error("contraction of a degree-0 form")]
    DegreeZero,
    #[error("form is not closed")]
    NotClosed,
    #[error("form is not relative: term {0} has y-weight 0")]
    NotRelative(String),
    #[error("state weight {weight} exceeds the bound {bound}")]
    WeightOverflow { weight: u32, bound: u32 },
    #[error("state is outside the field class W1: {0}")]
    OutsideClass(String),
    #[error("insufficient truncation window: {0}")]
    InsufficientWindow(String),
    #[error("evaluation points are not pairwise distinct")]
    PointsNotDistinct,
    #[error("expansion order exceeded: {0}")]
    ExpansionOrderExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
