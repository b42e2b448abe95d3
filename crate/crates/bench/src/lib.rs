//! Fixtures shared by the criterion benches.

use armijo_core::objective::{build_newton_operator, riemannian_gradient};
use armijo_core::solver::newton_direction;
use armijo_core::{
    generate, HessianModel, Objective, Problem, ProblemKind, SolverConfig, TangentVector,
};

/// A generated instance together with `f(x0)`, the Riemannian gradient and
/// the clamped Newton direction at `x0`.
pub struct SearchFixture {
    pub problem: Problem,
    pub fx: f64,
    pub gradient: TangentVector,
    pub direction: TangentVector,
}

impl SearchFixture {
    pub fn new(kind: ProblemKind, n: usize, p: usize, seed: u64) -> Self {
        let problem = generate(kind, n, p, seed).expect("valid benchmark instance");
        let (f, m, x) = (&problem.objective, problem.manifold(), &problem.x0);
        let config = SolverConfig::default();
        let gradient = riemannian_gradient(f, m, x).expect("gradient");
        let op = build_newton_operator(f, m, x, config.nu, config.rho, HessianModel::Riemannian)
            .expect("operator");
        let direction = newton_direction(&op, &gradient).expect("Newton direction");
        let fx = f.value(x);
        Self {
            problem,
            fx,
            gradient,
            direction,
        }
    }

    /// Manifold name, e.g. `Sphere(50)`.
    pub fn label(&self) -> String {
        self.problem.manifold().name()
    }
}

/// Instances used across benches, small to mid-sized.
pub fn standard_instances() -> Vec<(ProblemKind, usize, usize)> {
    vec![
        (ProblemKind::RayleighSphere, 20, 1),
        (ProblemKind::RayleighSphere, 100, 1),
        (ProblemKind::BrockettStiefel, 20, 4),
        (ProblemKind::BrockettStiefel, 50, 5),
    ]
}
