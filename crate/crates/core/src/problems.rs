//! Seeded benchmark instances.
//!
//! Every instance is a pure function of `(kind, n, p, seed)`. A single
//! [`SplitMix64`] stream seeded with `seed` is consumed in this order:
//!
//! 1. the problem data, in row-major order:
//!    * `RayleighSphere`: `G` (`n x n` standard normals), `A = (G + Gᵀ)/2`;
//!    * `BrockettStiefel`: `A` as above, weights `N = diag(1, 2, …, p)`
//!      (no draws);
//!    * `QuadraticEuclidean`: `D_i = 10^(2 u_i)` for `n` uniforms, so `D`
//!      is log-uniform in `[1, 100)`;
//! 2. the starting point, via [`Manifold::random_point`] on the same stream.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, DenseMatrix, DenseVector};
use crate::manifold::{Euclidean, Manifold, ManifoldPoint, Sphere, Stiefel};
use crate::objective::{Brockett, DiagonalQuadratic, Objective, RayleighQuotient};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// `xᵀAx` on the unit sphere in `R^n`.
    RayleighSphere,
    /// `trace(XᵀAXN)` on the Stiefel manifold of `n x p` frames.
    BrockettStiefel,
    /// `½ xᵀ diag(D) x` on `R^n`.
    QuadraticEuclidean,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::RayleighSphere,
        ProblemKind::BrockettStiefel,
        ProblemKind::QuadraticEuclidean,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::RayleighSphere => "rayleigh_sphere",
            Self::BrockettStiefel => "brockett_stiefel",
            Self::QuadraticEuclidean => "quadratic_euclidean",
        }
    }

    /// Whether the column count `p` is meaningful.
    pub fn uses_columns(self) -> bool {
        self == Self::BrockettStiefel
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh_sphere" | "rayleigh" => Ok(Self::RayleighSphere),
            "brockett_stiefel" | "brockett" => Ok(Self::BrockettStiefel),
            "quadratic_euclidean" | "quadratic" => Ok(Self::QuadraticEuclidean),
            other => Err(Error::InvalidArgument(format!("unknown problem '{other}'"))),
        }
    }
}

/// Concrete objective of a generated problem.
#[derive(Debug, Clone)]
pub enum ProblemObjective {
    Rayleigh(RayleighQuotient),
    Brockett(Brockett),
    Quadratic(DiagonalQuadratic),
}

impl ProblemObjective {
    fn inner(&self) -> &dyn Objective {
        match self {
            Self::Rayleigh(f) => f,
            Self::Brockett(f) => f,
            Self::Quadratic(f) => f,
        }
    }
}

impl Objective for ProblemObjective {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner().value(x)
    }

    fn gradient(&self, x: &[f64]) -> DenseVector {
        self.inner().gradient(x)
    }

    fn hessian_vec(&self, x: &[f64], u: &[f64]) -> DenseVector {
        self.inner().hessian_vec(x, u)
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        self.inner().lipschitz_bound()
    }
}

/// Concrete manifold of a generated problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemManifold {
    Sphere(Sphere),
    Stiefel(Stiefel),
    Euclidean(Euclidean),
}

impl ProblemManifold {
    pub fn as_dyn(&self) -> &dyn Manifold {
        match self {
            Self::Sphere(m) => m,
            Self::Stiefel(m) => m,
            Self::Euclidean(m) => m,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: ProblemKind,
    pub n: usize,
    /// Column count; 1 for the vector problems.
    pub p: usize,
    pub seed: u64,
    pub objective: ProblemObjective,
    pub manifold: ProblemManifold,
    pub x0: ManifoldPoint,
}

impl Problem {
    pub fn manifold(&self) -> &dyn Manifold {
        self.manifold.as_dyn()
    }

    /// Global minimum value, from an eigendecomposition where needed.
    pub fn optimal_value(&self) -> Result<f64> {
        match &self.objective {
            ProblemObjective::Rayleigh(f) => Ok(sym_eig(f.matrix())?.min()),
            ProblemObjective::Brockett(f) => f.optimal_value(),
            ProblemObjective::Quadratic(_) => Ok(0.0),
        }
    }
}

/// Symmetric matrix `(G + Gᵀ)/2` with `G` drawn row-major from `rng`.
pub fn random_symmetric(rng: &mut SplitMix64, n: usize) -> DenseMatrix {
    DenseMatrix::new(n, n, rng.normal_vec(n * n))
        .and_then(|g| g.symmetrized())
        .expect("square by construction")
}

/// `n` values log-uniform in `[1, 100)`.
pub fn random_log_uniform_diagonal(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(2.0 * rng.uniform())).collect()
}

/// Builds the instance for `(kind, n, p, seed)`. `p` is ignored unless the
/// kind uses columns.
pub fn generate(kind: ProblemKind, n: usize, p: usize, seed: u64) -> Result<Problem> {
    let mut rng = SplitMix64::new(seed);
    let (objective, manifold, p) = match kind {
        ProblemKind::RayleighSphere => {
            let m = Sphere::new(n)?;
            let f = RayleighQuotient::new(random_symmetric(&mut rng, n))?;
            (ProblemObjective::Rayleigh(f), ProblemManifold::Sphere(m), 1)
        }
        ProblemKind::BrockettStiefel => {
            let m = Stiefel::new(n, p)?;
            let weights = (1..=p).map(|i| i as f64).collect();
            let f = Brockett::new(random_symmetric(&mut rng, n), weights)?;
            (
                ProblemObjective::Brockett(f),
                ProblemManifold::Stiefel(m),
                p,
            )
        }
        ProblemKind::QuadraticEuclidean => {
            let m = Euclidean::new(n)?;
            let f = DiagonalQuadratic::new(random_log_uniform_diagonal(&mut rng, n))?;
            (
                ProblemObjective::Quadratic(f),
                ProblemManifold::Euclidean(m),
                1,
            )
        }
    };
    let x0 = manifold.as_dyn().random_point(&mut rng);
    Ok(Problem {
        kind,
        n,
        p,
        seed,
        objective,
        manifold,
        x0,
    })
}
