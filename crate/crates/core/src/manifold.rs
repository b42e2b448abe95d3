//! Embedded submanifolds of `R^n` handled entirely in ambient coordinates.
//!
//! Points and tangent vectors are plain ambient vectors; Stiefel points are
//! `n x p` matrices flattened row-major. The Riemannian metric is the
//! restriction of the Euclidean inner product, so norms and inner products
//! of tangent vectors are computed with the ambient formulas.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, thin_qr, DenseMatrix, DenseVector};
use crate::rng::SplitMix64;

/// Residual bound below which a point (or tangent vector) counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Probes below this norm after orthogonalization are treated as dependent.
const BASIS_PIVOT_TOL: f64 = 1e-8;
const BASIS_RETRY_SEED: u64 = 0x7A46_E1B5_0000_0001;
const BASIS_RETRY_ROUNDS: usize = 8;

/// A point on a manifold, in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint(DenseVector);

impl ManifoldPoint {
    /// Wraps coordinates without checking feasibility. Prefer
    /// [`Manifold::point`] when the coordinates come from outside.
    pub fn from_coords(coords: impl Into<DenseVector>) -> Self {
        Self(coords.into())
    }

    pub fn coords(&self) -> &DenseVector {
        &self.0
    }

    pub fn into_coords(self) -> DenseVector {
        self.0
    }
}

impl Deref for ManifoldPoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A tangent vector, in ambient coordinates. The base point is implied by
/// context.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(DenseVector);

impl TangentVector {
    /// Wraps coordinates without checking tangency. Prefer
    /// [`Manifold::project_tangent`] or [`Manifold::tangent`].
    pub fn from_coords(coords: impl Into<DenseVector>) -> Self {
        Self(coords.into())
    }

    pub fn zeros(len: usize) -> Self {
        Self(DenseVector::zeros(len))
    }

    pub fn coords(&self) -> &DenseVector {
        &self.0
    }

    pub fn into_coords(self) -> DenseVector {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scaled(factor))
    }
}

impl Deref for TangentVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `x + alpha * p` as a raw ambient vector. Generally off the manifold.
pub fn ambient_move(x: &ManifoldPoint, alpha: f64, p: &TangentVector) -> DenseVector {
    x.coords().add_scaled(alpha, p)
}

/// A Riemannian submanifold of a Euclidean space with a concrete retraction.
///
/// Implementors supply the geometry; the provided methods add feasibility
/// validation and the tangent-basis construction on top.
pub trait Manifold {
    fn name(&self) -> String;

    /// Dimension of the embedding space.
    fn ambient_dim(&self) -> usize;

    fn intrinsic_dim(&self) -> usize;

    /// Distance-like measure of how far `x` is from the manifold.
    fn point_residual(&self, x: &[f64]) -> f64;

    /// Distance-like measure of how far `v` is from the tangent space at `x`.
    fn tangent_residual(&self, x: &[f64], v: &[f64]) -> f64;

    /// Orthogonal projection of `u` onto the tangent space at `x`. Assumes
    /// `x` is feasible.
    fn projector(&self, x: &[f64], u: &[f64]) -> DenseVector;

    /// Maps a tangent vector at `x` back to the manifold.
    fn retract(&self, x: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint>;

    /// Second-fundamental-form term for the Riemannian Hessian of the
    /// induced metric: `Hess f(x)[u] = P_x(∇²f(x)[u] + curvature_term(x, ∇f(x), u))`.
    fn curvature_term(&self, x: &[f64], euclidean_grad: &[f64], u: &[f64]) -> DenseVector;

    /// Draws a feasible point from the documented generator.
    fn random_point(&self, rng: &mut SplitMix64) -> ManifoldPoint;

    fn check_point(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.ambient_dim() && self.point_residual(x) <= tol
    }

    fn check_tangent(&self, x: &[f64], v: &[f64], tol: f64) -> bool {
        v.len() == self.ambient_dim() && self.tangent_residual(x, v) <= tol
    }

    /// Validates coordinates as a point on this manifold.
    fn point(&self, coords: Vec<f64>) -> Result<ManifoldPoint> {
        self.require_point(&coords)?;
        Ok(ManifoldPoint::from_coords(coords))
    }

    /// Validates coordinates as a tangent vector at `x`.
    fn tangent(&self, x: &ManifoldPoint, coords: Vec<f64>) -> Result<TangentVector> {
        self.require_point(x)?;
        if coords.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: coords.len(),
            });
        }
        let r = self.tangent_residual(x, &coords);
        if r > FEASIBILITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "vector is not tangent to {} (residual {r:e})",
                self.name()
            )));
        }
        Ok(TangentVector::from_coords(coords))
    }

    fn require_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        let r = self.point_residual(x);
        if r <= FEASIBILITY_TOL {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "point is not on {} (residual {r:e})",
                self.name()
            )))
        }
    }

    fn project_tangent(&self, x: &ManifoldPoint, u: &[f64]) -> Result<TangentVector> {
        self.require_point(x)?;
        if u.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: u.len(),
            });
        }
        Ok(TangentVector::from_coords(self.projector(x, u)))
    }

    /// Orthonormal basis of the tangent space at `x`, as the columns of an
    /// `ambient_dim x intrinsic_dim` matrix.
    ///
    /// The projector is applied to the standard basis vectors and the
    /// results are orthonormalized with column pivoting. If the standard
    /// probes do not span the tangent space numerically, seeded random
    /// probes complete the basis. The output is a deterministic function
    /// of `x`.
    fn tangent_basis(&self, x: &ManifoldPoint) -> Result<DenseMatrix> {
        self.require_point(x)?;
        let n = self.ambient_dim();
        let k = self.intrinsic_dim();
        let mut candidates: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                self.projector(x, &e).into_inner()
            })
            .collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
        pivoted_orthonormalize(&mut candidates, &mut basis, k);

        let mut rng = SplitMix64::new(BASIS_RETRY_SEED);
        for _ in 0..BASIS_RETRY_ROUNDS {
            if basis.len() >= k {
                break;
            }
            let mut probes: Vec<Vec<f64>> = (0..(k - basis.len()))
                .map(|_| {
                    let mut c = self.projector(x, &rng.normal_vec(n)).into_inner();
                    orthogonalize_against(&mut c, &basis);
                    c
                })
                .collect();
            pivoted_orthonormalize(&mut probes, &mut basis, k);
        }
        if basis.len() < k {
            return Err(Error::Degenerate(format!(
                "could only find {} of {} tangent directions",
                basis.len(),
                k
            )));
        }
        DenseMatrix::from_columns(&basis)
    }
}

fn orthogonalize_against(c: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let s = dot(q, c);
        for (ci, qi) in c.iter_mut().zip(q) {
            *ci -= s * qi;
        }
    }
}

/// Greedy Gram-Schmidt with column pivoting and one reorthogonalization
/// pass. Consumes `candidates`, appending orthonormal vectors to `basis`
/// until it holds `target` vectors or the remaining candidates are
/// numerically dependent.
fn pivoted_orthonormalize(
    candidates: &mut Vec<Vec<f64>>,
    basis: &mut Vec<Vec<f64>>,
    target: usize,
) {
    let mut norms: Vec<f64> = candidates.iter().map(|c| norm(c)).collect();
    while basis.len() < target && !candidates.is_empty() {
        let (best, &best_norm) = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("candidates is non-empty");
        if best_norm < BASIS_PIVOT_TOL {
            break;
        }
        let mut q = candidates.swap_remove(best);
        norms.swap_remove(best);
        orthogonalize_against(&mut q, basis);
        let qn = norm(&q);
        if qn < BASIS_PIVOT_TOL {
            continue;
        }
        q.iter_mut().for_each(|v| *v /= qn);
        for (c, cn) in candidates.iter_mut().zip(norms.iter_mut()) {
            let s = dot(&q, c);
            for (ci, qi) in c.iter_mut().zip(&q) {
                *ci -= s * qi;
            }
            *cn = norm(c);
        }
        basis.push(q);
    }
}

/// The whole ambient space `R^n`; the retraction is vector addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    n: usize,
}

impl Euclidean {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "Euclidean dimension must be >= 1".into(),
            ));
        }
        Ok(Self { n })
    }
}

impl Manifold for Euclidean {
    fn name(&self) -> String {
        format!("Euclidean({})", self.n)
    }

    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn intrinsic_dim(&self) -> usize {
        self.n
    }

    fn point_residual(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn tangent_residual(&self, _x: &[f64], _v: &[f64]) -> f64 {
        0.0
    }

    fn projector(&self, _x: &[f64], u: &[f64]) -> DenseVector {
        u.into()
    }

    fn retract(&self, x: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        Ok(ManifoldPoint::from_coords(ambient_move(x, 1.0, v)))
    }

    fn curvature_term(&self, _x: &[f64], _g: &[f64], u: &[f64]) -> DenseVector {
        DenseVector::zeros(u.len())
    }

    fn random_point(&self, rng: &mut SplitMix64) -> ManifoldPoint {
        ManifoldPoint::from_coords(rng.normal_vec(self.n))
    }

    fn tangent_basis(&self, x: &ManifoldPoint) -> Result<DenseMatrix> {
        self.require_point(x)?;
        Ok(DenseMatrix::identity(self.n))
    }
}

/// Unit sphere `{x : ‖x‖ = 1}` in `R^n` with the normalization retraction
/// `R_x(v) = (x + v) / ‖x + v‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sphere {
    n: usize,
}

impl Sphere {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "sphere needs ambient dimension >= 2".into(),
            ));
        }
        Ok(Self { n })
    }
}

impl Manifold for Sphere {
    fn name(&self) -> String {
        format!("Sphere({})", self.n)
    }

    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn intrinsic_dim(&self) -> usize {
        self.n - 1
    }

    fn point_residual(&self, x: &[f64]) -> f64 {
        (norm(x) - 1.0).abs()
    }

    fn tangent_residual(&self, x: &[f64], v: &[f64]) -> f64 {
        dot(x, v).abs()
    }

    fn projector(&self, x: &[f64], u: &[f64]) -> DenseVector {
        let s = dot(x, u);
        u.iter().zip(x).map(|(ui, xi)| ui - s * xi).collect()
    }

    fn retract(&self, x: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        let y = ambient_move(x, 1.0, v);
        let ny = y.norm();
        if !(ny > 0.0) || !ny.is_finite() {
            return Err(Error::Degenerate(format!(
                "cannot normalize x + v (norm {ny:e})"
            )));
        }
        Ok(ManifoldPoint::from_coords(y.scaled(1.0 / ny)))
    }

    fn curvature_term(&self, x: &[f64], g: &[f64], u: &[f64]) -> DenseVector {
        let s = dot(x, g);
        u.iter().map(|ui| -s * ui).collect()
    }

    fn random_point(&self, rng: &mut SplitMix64) -> ManifoldPoint {
        loop {
            let g = DenseVector::new(rng.normal_vec(self.n));
            let ng = g.norm();
            if ng > 1e-8 {
                return ManifoldPoint::from_coords(g.scaled(1.0 / ng));
            }
        }
    }
}

/// Stiefel manifold `{X ∈ R^{n x p} : XᵀX = I_p}` with the QR retraction
/// `R_X(V) = qf(X + V)` (positive-diagonal `R` factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stiefel {
    n: usize,
    p: usize,
}

impl Stiefel {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p == 0 || n < p {
            return Err(Error::InvalidArgument(format!(
                "Stiefel manifold needs n >= p >= 1, got n={n}, p={p}"
            )));
        }
        if n == 1 {
            return Err(Error::InvalidArgument(
                "Stiefel(1, 1) has dimension 0".into(),
            ));
        }
        Ok(Self { n, p })
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.p
    }

    fn as_matrix(&self, v: &[f64]) -> DenseMatrix {
        DenseMatrix::new(self.n, self.p, v.to_vec()).expect("length checked by caller")
    }

    fn sym(m: &DenseMatrix) -> DenseMatrix {
        m.symmetrized().expect("p x p is square")
    }
}

impl Manifold for Stiefel {
    fn name(&self) -> String {
        format!("Stiefel({}, {})", self.n, self.p)
    }

    fn ambient_dim(&self) -> usize {
        self.n * self.p
    }

    fn intrinsic_dim(&self) -> usize {
        self.n * self.p - self.p * (self.p + 1) / 2
    }

    fn point_residual(&self, x: &[f64]) -> f64 {
        if x.len() != self.ambient_dim() {
            return f64::INFINITY;
        }
        let xm = self.as_matrix(x);
        let mut g = xm.transpose_matmul(&xm).expect("shapes agree");
        for i in 0..self.p {
            g[(i, i)] -= 1.0;
        }
        g.norm_max()
    }

    fn tangent_residual(&self, x: &[f64], v: &[f64]) -> f64 {
        if x.len() != self.ambient_dim() || v.len() != self.ambient_dim() {
            return f64::INFINITY;
        }
        let xtv = self
            .as_matrix(x)
            .transpose_matmul(&self.as_matrix(v))
            .expect("shapes agree");
        let mut worst = 0.0_f64;
        for i in 0..self.p {
            for j in 0..self.p {
                worst = worst.max((xtv[(i, j)] + xtv[(j, i)]).abs());
            }
        }
        worst
    }

    fn projector(&self, x: &[f64], u: &[f64]) -> DenseVector {
        // U - X sym(XᵀU)
        let xm = self.as_matrix(x);
        let s = Self::sym(
            &xm.transpose_matmul(&self.as_matrix(u))
                .expect("shapes agree"),
        );
        let xs = xm.matmul(&s).expect("shapes agree");
        DenseVector::from(u).sub(xs.as_slice())
    }

    fn retract(&self, x: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        let y = self.as_matrix(&ambient_move(x, 1.0, v));
        let (q, _) = thin_qr(&y)?;
        Ok(ManifoldPoint::from_coords(q.into_vec()))
    }

    fn curvature_term(&self, x: &[f64], g: &[f64], u: &[f64]) -> DenseVector {
        // -U sym(XᵀG)
        let s = Self::sym(
            &self
                .as_matrix(x)
                .transpose_matmul(&self.as_matrix(g))
                .expect("shapes agree"),
        );
        let us = self.as_matrix(u).matmul(&s).expect("shapes agree");
        us.as_slice().iter().map(|v| -v).collect()
    }

    fn random_point(&self, rng: &mut SplitMix64) -> ManifoldPoint {
        loop {
            let g = self.as_matrix(&rng.normal_vec(self.ambient_dim()));
            if let Ok((q, _)) = thin_qr(&g) {
                return ManifoldPoint::from_coords(q.into_vec());
            }
        }
    }
}
