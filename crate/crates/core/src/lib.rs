//! Riemannian Newton optimization on embedded submanifolds with a
//! two-stage Armijo line search that retracts only after a cheap ambient
//! test passes.

// `!(a <= b)` is used on purpose throughout so that NaN fails every test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod linalg;
pub mod linesearch;
pub mod manifold;
pub mod objective;
pub mod problems;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use linesearch::{EvalCounters, LineSearchKind, LineSearchOutcome, LineSearchParams};
pub use manifold::{Euclidean, Manifold, ManifoldPoint, Sphere, Stiefel, TangentVector};
pub use objective::{
    Brockett, DiagonalQuadratic, HessianModel, NewtonOperator, Objective, RayleighQuotient,
};
pub use problems::{generate, Problem, ProblemKind};
pub use rng::SplitMix64;
pub use solver::{DirectionKind, IterationRecord, SolverConfig, SolverTrace, Status};
