//! Numerical equiaffine differential geometry of surfaces with a transversal
//! vector field: affine structure, umbilical points of the curvature-line
//! foliation and their indices, line congruences and surfaces of revolution.

pub mod cli;
pub mod congruence;
pub mod error;
pub mod expr;
pub mod foliation;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod par;
pub mod quadrature;
pub mod rotational;
pub mod scene_file;
pub mod umbilics;

pub use error::{Error, Result};
pub use expr::{parse, parse_with, Expr, VectorExpr};
pub use geometry::{AffinePointData, Domain, SurfaceScene, XiSpec};
pub use jets::{Jet1, Jet2, Var};
pub use par::Execution;
