//! Objective functions defined on the whole ambient space, and the
//! Riemannian calculus built on top of their Euclidean derivatives.

use crate::error::{Error, Result};
use crate::linalg::{dot, solve_spd, sym_eig, DenseMatrix, DenseVector, SymmetricEigen};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};

/// A smooth function `f: R^n -> R` with its Euclidean derivatives.
///
/// `f` must be defined everywhere in the ambient space, not only on the
/// manifold: the ambient line-search test evaluates it at `x + αp`.
pub trait Objective {
    /// Ambient dimension `n`.
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> DenseVector;

    /// `∇²f(x) u`.
    fn hessian_vec(&self, x: &[f64], u: &[f64]) -> DenseVector;

    /// A Lipschitz constant of `∇f`, when one is known. Only used by tests
    /// and diagnostics.
    fn lipschitz_bound(&self) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> DenseVector {
        (**self).gradient(x)
    }
    fn hessian_vec(&self, x: &[f64], u: &[f64]) -> DenseVector {
        (**self).hessian_vec(x, u)
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        (**self).lipschitz_bound()
    }
}

fn require_symmetric(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    if !a.is_symmetric(1e-10) {
        return Err(Error::InvalidArgument(format!(
            "matrix is not symmetric (max asymmetry {:e})",
            a.asymmetry()
        )));
    }
    Ok(())
}

fn spectral_norm(a: &DenseMatrix) -> f64 {
    sym_eig(a)
        .map(|e| e.min().abs().max(e.max().abs()))
        .unwrap_or(f64::NAN)
}

/// Rayleigh quotient `f(x) = xᵀAx`. On the unit sphere its minimum is the
/// smallest eigenvalue of `A`.
#[derive(Debug, Clone)]
pub struct RayleighQuotient {
    a: DenseMatrix,
}

impl RayleighQuotient {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        require_symmetric(&a)?;
        Ok(Self {
            a: a.symmetrized()?,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }
}

impl Objective for RayleighQuotient {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn value(&self, x: &[f64]) -> f64 {
        dot(x, &self.a.matvec(x).expect("dimension"))
    }

    fn gradient(&self, x: &[f64]) -> DenseVector {
        self.a.matvec(x).expect("dimension").scaled(2.0)
    }

    fn hessian_vec(&self, _x: &[f64], u: &[f64]) -> DenseVector {
        self.a.matvec(u).expect("dimension").scaled(2.0)
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        Some(2.0 * spectral_norm(&self.a))
    }
}

/// Brockett cost `f(X) = trace(XᵀAXN)` with `N = diag(weights)`, for `X`
/// an `n x p` matrix flattened row-major.
#[derive(Debug, Clone)]
pub struct Brockett {
    a: DenseMatrix,
    weights: Vec<f64>,
}

impl Brockett {
    /// `weights` is the diagonal of `N` and must be positive and strictly
    /// increasing.
    pub fn new(a: DenseMatrix, weights: Vec<f64>) -> Result<Self> {
        require_symmetric(&a)?;
        if weights.is_empty() || weights.len() > a.rows() {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= p <= n weights, got p={} for n={}",
                weights.len(),
                a.rows()
            )));
        }
        if !weights.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::InvalidArgument(
                "Brockett weights must be positive".into(),
            ));
        }
        if !weights.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "Brockett weights must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            a: a.symmetrized()?,
            weights,
        })
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.weights.len()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The minimum of the cost over the Stiefel manifold: the smallest
    /// eigenvalues paired with the largest weights.
    pub fn optimal_value(&self) -> Result<f64> {
        let eig = sym_eig(&self.a)?;
        let p = self.cols();
        Ok(self
            .weights
            .iter()
            .rev()
            .zip(eig.values.iter().take(p))
            .map(|(w, l)| w * l)
            .sum())
    }

    /// `2 A U N`.
    fn weighted_product(&self, u: &[f64]) -> DenseVector {
        let (n, p) = (self.rows(), self.cols());
        let um = DenseMatrix::new(n, p, u.to_vec()).expect("dimension");
        let au = self.a.matmul(&um).expect("dimension");
        let mut out = au.into_vec();
        for (idx, v) in out.iter_mut().enumerate() {
            *v *= 2.0 * self.weights[idx % p];
        }
        out.into()
    }
}

impl Objective for Brockett {
    fn dim(&self) -> usize {
        self.rows() * self.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.weighted_product(x))
    }

    fn gradient(&self, x: &[f64]) -> DenseVector {
        self.weighted_product(x)
    }

    fn hessian_vec(&self, _x: &[f64], u: &[f64]) -> DenseVector {
        self.weighted_product(u)
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        let wmax = self.weights.iter().copied().fold(0.0, f64::max);
        Some(2.0 * spectral_norm(&self.a) * wmax)
    }
}

/// Separable quadratic `f(x) = ½ Σ d_i x_i²` with positive `d`.
#[derive(Debug, Clone)]
pub struct DiagonalQuadratic {
    d: Vec<f64>,
}

impl DiagonalQuadratic {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidArgument("empty diagonal".into()));
        }
        if !d.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidArgument(
                "diagonal entries must be positive".into(),
            ));
        }
        Ok(Self { d })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }
}

impl Objective for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.d.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.d.iter().zip(x).map(|(d, v)| d * v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> DenseVector {
        self.d.iter().zip(x).map(|(d, v)| d * v).collect()
    }

    fn hessian_vec(&self, _x: &[f64], u: &[f64]) -> DenseVector {
        self.d.iter().zip(u).map(|(d, v)| d * v).collect()
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        Some(self.d.iter().copied().fold(0.0, f64::max))
    }
}

/// Riemannian gradient under the induced metric: the tangent projection of
/// the Euclidean gradient.
pub fn riemannian_gradient<F, M>(obj: &F, manifold: &M, x: &ManifoldPoint) -> Result<TangentVector>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    require_dims(obj, manifold)?;
    manifold.project_tangent(x, &obj.gradient(x))
}

pub(crate) fn require_dims<F, M>(obj: &F, manifold: &M) -> Result<()>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    if obj.dim() != manifold.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: manifold.ambient_dim(),
            got: obj.dim(),
        });
    }
    Ok(())
}

/// Which second-order model the Newton operator is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HessianModel {
    /// Projected Euclidean Hessian plus the manifold's curvature term; this
    /// is the exact Riemannian Hessian of the induced metric.
    #[default]
    Riemannian,
    /// Projected Euclidean Hessian alone, `Bᵀ ∇²f B`.
    ProjectedEuclidean,
}

/// A self-adjoint positive definite operator on the tangent space at one
/// point, stored in the coordinates of an orthonormal tangent basis.
#[derive(Debug, Clone)]
pub struct NewtonOperator {
    basis: DenseMatrix,
    unclamped: DenseMatrix,
    matrix: DenseMatrix,
    eigen: SymmetricEigen,
    nu: f64,
    rho: f64,
}

impl NewtonOperator {
    /// Builds the operator from an already evaluated Euclidean gradient.
    ///
    /// The second-order model is expressed in the tangent basis `B`,
    /// symmetrized, and every eigenvalue is clamped into `[nu, rho]`.
    pub fn build<F, M>(
        obj: &F,
        manifold: &M,
        x: &ManifoldPoint,
        euclidean_grad: &[f64],
        nu: f64,
        rho: f64,
        model: HessianModel,
    ) -> Result<Self>
    where
        F: Objective + ?Sized,
        M: Manifold + ?Sized,
    {
        if !(nu > 0.0 && nu <= rho && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "clamp range must satisfy 0 < nu <= rho < inf, got nu={nu}, rho={rho}"
            )));
        }
        require_dims(obj, manifold)?;
        let basis = manifold.tangent_basis(x)?;
        let (n, k) = (basis.rows(), basis.cols());

        let mut image = DenseMatrix::zeros(n, k);
        for j in 0..k {
            let b = basis.column(j);
            let mut hb = obj.hessian_vec(x, &b);
            if model == HessianModel::Riemannian {
                let c = manifold.curvature_term(x, euclidean_grad, &b);
                hb = hb.add_scaled(1.0, &c);
            }
            for (i, v) in hb.iter().enumerate() {
                image[(i, j)] = *v;
            }
        }
        let unclamped = basis.transpose_matmul(&image)?.symmetrized()?;
        if !unclamped.is_finite() {
            return Err(Error::Degenerate(
                "Hessian model has non-finite entries".into(),
            ));
        }
        let raw = sym_eig(&unclamped)?;
        let matrix = raw.reconstruct_with(|l| l.clamp(nu, rho));
        // Clamping is monotone, so the ascending order is preserved.
        let eigen = SymmetricEigen {
            values: raw.values.iter().map(|l| l.clamp(nu, rho)).collect(),
            vectors: raw.vectors,
        };
        Ok(Self {
            basis,
            unclamped,
            matrix,
            eigen,
            nu,
            rho,
        })
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    /// Clamped operator in tangent coordinates.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Symmetrized model before clamping.
    pub fn unclamped(&self) -> &DenseMatrix {
        &self.unclamped
    }

    /// Ascending eigenvalues of the clamped operator.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn clamp_range(&self) -> (f64, f64) {
        (self.nu, self.rho)
    }

    /// Tangent coordinates `Bᵀ v`.
    pub fn to_coords(&self, v: &[f64]) -> DenseVector {
        self.basis.transpose_matvec(v).expect("dimension")
    }

    /// Ambient vector `B c`.
    pub fn from_coords(&self, c: &[f64]) -> DenseVector {
        self.basis.matvec(c).expect("dimension")
    }

    /// Applies the operator to a tangent vector given in ambient coordinates.
    pub fn apply(&self, v: &[f64]) -> DenseVector {
        let c = self.matrix.matvec(&self.to_coords(v)).expect("dimension");
        self.from_coords(&c)
    }

    /// Solves `H p = rhs` for tangent `rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<TangentVector> {
        let c = solve_spd(&self.matrix, &self.to_coords(rhs))?;
        Ok(TangentVector::from_coords(self.from_coords(&c)))
    }
}

/// Builds the clamped Newton operator at `x`, evaluating the gradient
/// itself when the model needs it.
pub fn build_newton_operator<F, M>(
    obj: &F,
    manifold: &M,
    x: &ManifoldPoint,
    nu: f64,
    rho: f64,
    model: HessianModel,
) -> Result<NewtonOperator>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    require_dims(obj, manifold)?;
    manifold.require_point(x)?;
    let g = obj.gradient(x);
    NewtonOperator::build(obj, manifold, x, &g, nu, rho, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Euclidean, Sphere, Stiefel};
    use crate::rng::SplitMix64;

    /// `½ Σ d_i x_i²` with indefinite `d`, for exercising the clamp.
    struct SignedQuadratic(Vec<f64>);

    impl Objective for SignedQuadratic {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            0.5 * self.0.iter().zip(x).map(|(d, v)| d * v * v).sum::<f64>()
        }
        fn gradient(&self, x: &[f64]) -> DenseVector {
            self.0.iter().zip(x).map(|(d, v)| d * v).collect()
        }
        fn hessian_vec(&self, _x: &[f64], u: &[f64]) -> DenseVector {
            self.0.iter().zip(u).map(|(d, v)| d * v).collect()
        }
    }

    fn random_symmetric(rng: &mut SplitMix64, n: usize) -> DenseMatrix {
        DenseMatrix::new(n, n, rng.normal_vec(n * n))
            .unwrap()
            .symmetrized()
            .unwrap()
    }

    #[test]
    fn rayleigh_eigenvector_is_stationary() {
        let f = RayleighQuotient::new(DenseMatrix::from_diagonal(&[1.0, 3.0])).unwrap();
        let s = Sphere::new(2).unwrap();
        let x = s.point(vec![0.0, 1.0]).unwrap();
        assert_eq!(f.gradient(&x).as_slice(), &[0.0, 6.0]);
        let g = riemannian_gradient(&f, &s, &x).unwrap();
        assert_eq!(g.norm(), 0.0);
    }

    #[test]
    fn rayleigh_direct_substitution() {
        let f = RayleighQuotient::new(DenseMatrix::from_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(f.value(&[1.0, 0.0]), 1.0);
        assert_eq!(f.gradient(&[1.0, 0.0]).as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn rayleigh_identity_is_isotropic() {
        let f = RayleighQuotient::new(DenseMatrix::identity(4)).unwrap();
        let s = Sphere::new(4).unwrap();
        let mut rng = SplitMix64::new(1);
        for _ in 0..10 {
            let x = s.random_point(&mut rng);
            assert!((f.value(&x) - 1.0).abs() <= 1e-14);
            assert!(riemannian_gradient(&f, &s, &x).unwrap().norm() <= 1e-14);
        }
    }

    #[test]
    fn rayleigh_rejects_asymmetric() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            RayleighQuotient::new(a),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn euclidean_gradient_is_unprojected() {
        let f = DiagonalQuadratic::new(vec![1.0, 2.0, 3.0]).unwrap();
        let e = Euclidean::new(3).unwrap();
        let x = e.point(vec![1.0, -1.0, 0.5]).unwrap();
        assert_eq!(
            riemannian_gradient(&f, &e, &x).unwrap().coords(),
            &f.gradient(&x)
        );
    }

    #[test]
    fn gradient_dimension_mismatch() {
        let f = DiagonalQuadratic::new(vec![1.0, 2.0]).unwrap();
        let e = Euclidean::new(3).unwrap();
        let x = e.point(vec![0.0; 3]).unwrap();
        assert!(matches!(
            riemannian_gradient(&f, &e, &x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rayleigh_gradient_matches_finite_differences() {
        let mut rng = SplitMix64::new(2);
        let n = 50;
        let f = RayleighQuotient::new(random_symmetric(&mut rng, n)).unwrap();
        let s = Sphere::new(n).unwrap();
        let x = s.random_point(&mut rng);
        let g = riemannian_gradient(&f, &s, &x).unwrap();
        for _ in 0..10 {
            let p = s.project_tangent(&x, &rng.normal_vec(n)).unwrap();
            let p = p.scaled(1.0 / p.norm());
            // Central difference along the retraction curve.
            let h = 1e-5;
            let fp = f.value(&s.retract(&x, &p.scaled(h)).unwrap());
            let fm = f.value(&s.retract(&x, &p.scaled(-h)).unwrap());
            let fd = (fp - fm) / (2.0 * h);
            assert!((fd - dot(&g, &p)).abs() <= 1e-6, "{fd} vs {}", dot(&g, &p));
        }
    }

    #[test]
    fn quadratic_examples() {
        let f = DiagonalQuadratic::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(f.value(&[3.0, 4.0]), 12.5);
        assert_eq!(f.gradient(&[3.0, 4.0]).as_slice(), &[3.0, 4.0]);
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        assert_eq!(f.lipschitz_bound(), Some(1.0));
        assert!(DiagonalQuadratic::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn newton_operator_inside_clamp_range_is_unchanged() {
        let f = DiagonalQuadratic::new(vec![2.0, 4.0]).unwrap();
        let e = Euclidean::new(2).unwrap();
        let x = e.point(vec![1.0, 1.0]).unwrap();
        let op = build_newton_operator(&f, &e, &x, 1.0, 10.0, HessianModel::Riemannian).unwrap();
        let want = DenseMatrix::from_diagonal(&[2.0, 4.0]);
        assert!(op
            .matrix()
            .as_slice()
            .iter()
            .zip(want.as_slice())
            .all(|(a, b)| (a - b).abs() <= 1e-14));
        assert_eq!(op.unclamped(), &want);
    }

    #[test]
    fn newton_operator_clamps_both_ends() {
        let f = SignedQuadratic(vec![-1.0, 20.0]);
        let e = Euclidean::new(2).unwrap();
        let x = e.point(vec![0.5, 0.5]).unwrap();
        let op =
            build_newton_operator(&f, &e, &x, 1.0, 10.0, HessianModel::ProjectedEuclidean).unwrap();
        let ev = op.eigenvalues();
        assert!((ev[0] - 1.0).abs() <= 1e-12 && (ev[1] - 10.0).abs() <= 1e-12);
    }

    #[test]
    fn newton_operator_rejects_bad_range() {
        let f = DiagonalQuadratic::new(vec![2.0, 4.0]).unwrap();
        let e = Euclidean::new(2).unwrap();
        let x = e.point(vec![1.0, 1.0]).unwrap();
        for (nu, rho) in [(0.0, 1.0), (2.0, 1.0), (-1.0, 1.0)] {
            assert!(build_newton_operator(&f, &e, &x, nu, rho, HessianModel::Riemannian).is_err());
        }
    }

    #[test]
    fn newton_operator_spectrum_on_sphere() {
        let mut rng = SplitMix64::new(4);
        let n = 9;
        let f = RayleighQuotient::new(random_symmetric(&mut rng, n)).unwrap();
        let s = Sphere::new(n).unwrap();
        for model in [HessianModel::Riemannian, HessianModel::ProjectedEuclidean] {
            for _ in 0..5 {
                let x = s.random_point(&mut rng);
                let op = build_newton_operator(&f, &s, &x, 1e-3, 1.5, model).unwrap();
                let check = sym_eig(op.matrix()).unwrap();
                assert!(check.min() >= 1e-3 - 1e-12 && check.max() <= 1.5 + 1e-12);
            }
        }
    }

    #[test]
    fn newton_operator_is_self_adjoint() {
        let mut rng = SplitMix64::new(6);
        let m = Stiefel::new(6, 2).unwrap();
        let a = random_symmetric(&mut rng, 6);
        let f = Brockett::new(a, vec![1.0, 2.0]).unwrap();
        let x = m.random_point(&mut rng);
        let op = build_newton_operator(&f, &m, &x, 1e-3, 1e6, HessianModel::Riemannian).unwrap();
        for _ in 0..20 {
            let u = m.projector(&x, &rng.normal_vec(12));
            let w = m.projector(&x, &rng.normal_vec(12));
            assert!((dot(&op.apply(&u), &w) - dot(&u, &op.apply(&w))).abs() <= 1e-10);
        }
    }

    #[test]
    fn riemannian_model_matches_second_derivative_along_retraction() {
        // At a critical point the second derivative of f along any
        // retraction curve equals ⟨Hess f(x)[v], v⟩.
        let a = DenseMatrix::from_diagonal(&[-1.0, 0.5, 2.0, 4.0]);
        let f = RayleighQuotient::new(a).unwrap();
        let s = Sphere::new(4).unwrap();
        let x = s.point(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let op = build_newton_operator(&f, &s, &x, 1e-6, 1e6, HessianModel::Riemannian).unwrap();
        let v = TangentVector::from_coords(vec![0.0, 0.3, -0.4, 0.5]);
        let h = 1e-4;
        let fp = f.value(&s.retract(&x, &v.scaled(h)).unwrap());
        let fm = f.value(&s.retract(&x, &v.scaled(-h)).unwrap());
        let second = (fp - 2.0 * f.value(&x) + fm) / (h * h);
        assert!((second - dot(&op.apply(&v), &v)).abs() <= 1e-5);
    }

    #[test]
    fn brockett_with_one_column_is_rayleigh() {
        let mut rng = SplitMix64::new(8);
        let a = random_symmetric(&mut rng, 5);
        let b = Brockett::new(a.clone(), vec![1.0]).unwrap();
        let r = RayleighQuotient::new(a).unwrap();
        for _ in 0..10 {
            let x = rng.normal_vec(5);
            let u = rng.normal_vec(5);
            assert!((b.value(&x) - r.value(&x)).abs() <= 1e-12);
            assert!(b.gradient(&x).sub(&r.gradient(&x)).norm_max() <= 1e-12);
            assert!(b.hessian_vec(&x, &u).sub(&r.hessian_vec(&x, &u)).norm_max() <= 1e-12);
        }
    }

    #[test]
    fn brockett_eigenvector_block_is_stationary() {
        let mut rng = SplitMix64::new(10);
        let a = random_symmetric(&mut rng, 6);
        let eig = sym_eig(&a).unwrap();
        let f = Brockett::new(a, vec![1.0, 2.0]).unwrap();
        let m = Stiefel::new(6, 2).unwrap();
        let mut coords = vec![0.0; 12];
        for i in 0..6 {
            coords[i * 2] = eig.vectors[(i, 3)];
            coords[i * 2 + 1] = eig.vectors[(i, 1)];
        }
        let x = m.point(coords).unwrap();
        assert!(riemannian_gradient(&f, &m, &x).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn brockett_optimum_pairs_small_eigenvalues_with_large_weights() {
        let mut rng = SplitMix64::new(9);
        let a = random_symmetric(&mut rng, 8);
        let eig = sym_eig(&a).unwrap();
        let f = Brockett::new(a, vec![1.0, 2.0]).unwrap();
        let want = 2.0 * eig.values[0] + eig.values[1];
        assert!((f.optimal_value().unwrap() - want).abs() <= 1e-12);

        // Every column-permuted eigenvector block scores no better.
        let m = Stiefel::new(8, 2).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i == j {
                    continue;
                }
                let mut coords = vec![0.0; 16];
                for r in 0..8 {
                    coords[r * 2] = eig.vectors[(r, i)];
                    coords[r * 2 + 1] = eig.vectors[(r, j)];
                }
                let x = m.point(coords).unwrap();
                assert!(f.value(&x) >= want - 1e-10);
            }
        }
    }

    #[test]
    fn brockett_validates_weights() {
        let a = DenseMatrix::identity(4);
        assert!(Brockett::new(a.clone(), vec![2.0, 1.0]).is_err());
        assert!(Brockett::new(a.clone(), vec![0.0, 1.0]).is_err());
        assert!(Brockett::new(a.clone(), vec![]).is_err());
        assert!(Brockett::new(a, vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn rayleigh_minimum_is_smallest_eigenvalue() {
        let mut rng = SplitMix64::new(8);
        let n = 50;
        let a = random_symmetric(&mut rng, n);
        let eig = sym_eig(&a).unwrap();
        let f = RayleighQuotient::new(a).unwrap();
        let v0 = eig.vectors.column(0);
        assert!((f.value(&v0) - eig.min()).abs() <= 1e-10);
        let s = Sphere::new(n).unwrap();
        for _ in 0..100 {
            assert!(f.value(&s.random_point(&mut rng)) >= eig.min() - 1e-12);
        }
    }
}
