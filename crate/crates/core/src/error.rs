use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::jets::JetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("degenerate frame [f_u, f_v, xi] at ({u}, {v})")]
    DegenerateFrame { u: f64, v: f64 },
    #[error("surface is not convex at ({u}, {v})")]
    NotConvex { u: f64, v: f64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("requested jet order {requested} exceeds the maximum {max}")]
    OrderExceedsMax { requested: usize, max: usize },
    #[error("({u}, {v}) is not an umbilical point (|B| = {norm:e})")]
    NotUmbilic { u: f64, v: f64, norm: f64 },
    #[error("umbilic order {order} is below the requested {requested}")]
    OrderTooLow { order: usize, requested: usize },
    #[error("field vanishes on the loop")]
    ZeroOnLoop,
    #[error("index unstable under radius halving: {indices:?}")]
    IndexUnstable { indices: Vec<i32> },
    #[error("Newton refinement diverged from ({u}, {v})")]
    NewtonDivergence { u: f64, v: f64 },
    #[error("chart atlas leaves a gap near {point:?}")]
    ChartGap { point: [f64; 3] },
    #[error("foliation indices sum to {sum}, expected {expected}")]
    IndexSumMismatch { sum: f64, expected: f64 },
    #[error("domain is not simply connected; period holonomy of tau = {holonomy:?}")]
    NonSimplyConnectedDomain { holonomy: [f64; 2] },
    #[error("shifted reference surface has a degenerate frame at ({u}, {v})")]
    DegenerateShiftedFrame { u: f64, v: f64 },
    #[error("singular (a, b) system at t = {t}")]
    SingularSystem { t: f64 },
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("y'' has no sign change on the profile interval")]
    NoSignChange,
    #[error("rotational graph is not convex at the axis")]
    NotConvexAtAxis,
    #[error("every point is umbilical; the direction field is undefined")]
    AllUmbilic,
    #[error("integration step underflow at ({u}, {v})")]
    StepUnderflow { u: f64, v: f64 },
    #[error("invalid scene at {pointer}: {message}")]
    Scene { pointer: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
