//! Fixed instances checked against independent oracles: exhaustive step
//! scans, hand-built counter patterns and eigenvalue references.

use armijo_core::linalg::{dot, sym_eig, DenseMatrix};
use armijo_core::linesearch::{armijo_modified, armijo_standard, sufficient_decrease};
use armijo_core::manifold::ambient_move;
use armijo_core::objective::{build_newton_operator, riemannian_gradient};
use armijo_core::solver::{self, newton_direction};
use armijo_core::{
    generate, DirectionKind, HessianModel, LineSearchKind, LineSearchParams, Manifold,
    ManifoldPoint, Objective, ProblemKind, RayleighQuotient, SolverConfig, Sphere, SplitMix64,
    Status, TangentVector,
};

/// Smallest exponent whose retracted point satisfies sufficient decrease,
/// found without the library's line-search code.
fn exhaustive_scan<F: Objective, M: Manifold + ?Sized>(
    f: &F,
    m: &M,
    x: &ManifoldPoint,
    g: &TangentVector,
    p: &TangentVector,
    beta: f64,
    tau: f64,
) -> usize {
    let fx = f.value(x);
    let slope = dot(g, p);
    (0..=60)
        .find(|&ell| {
            let alpha = beta.powi(ell as i32);
            let y = m.retract(x, &p.scaled(alpha)).unwrap();
            sufficient_decrease(f.value(&y), fx, tau * alpha * slope)
        })
        .expect("some step passes")
}

#[test]
fn sphere9_newton_step_matches_exhaustive_scan() {
    let prob = generate(ProblemKind::RayleighSphere, 9, 1, 12).unwrap();
    let (f, m, x) = (&prob.objective, prob.manifold(), &prob.x0);
    let g = riemannian_gradient(f, m, x).unwrap();
    let op = build_newton_operator(f, m, x, 1e-3, 1e6, HessianModel::Riemannian).unwrap();
    let p = newton_direction(&op, &g).unwrap();
    for tau in [0.1, 0.5, 0.9] {
        let params = LineSearchParams::new(0.5, tau, 60).unwrap();
        let expected = exhaustive_scan(f, m, x, &g, &p, 0.5, tau);
        let out = armijo_standard(f, m, x, f.value(x), &p, &g, &params).unwrap();
        assert_eq!(out.ell, expected, "tau {tau}");
        assert_eq!(out.alpha, 0.5f64.powi(expected as i32));
        // The two-stage search can only stop at or after the same exponent.
        let out = armijo_modified(f, m, x, f.value(x), &p, &g, &params).unwrap();
        assert!(out.ell >= expected);
    }
}

#[test]
fn ambient_pass_with_retracted_failure_moves_on() {
    // On the circle f(x + αp) = (1 + α²‖p‖²) f(R_x(αp)); with f < 0 the
    // ambient value is the lower one, so the ambient test can pass while
    // the retracted test fails.
    let f = RayleighQuotient::new(DenseMatrix::from_diagonal(&[-1.0, 1.0])).unwrap();
    let m = Sphere::new(2).unwrap();
    let x = m.point(vec![0.6, 0.8]).unwrap();
    let g = riemannian_gradient(&f, &m, &x).unwrap();
    let p = g.scaled(-1.0);
    assert!((p[0] - 1.536).abs() < 1e-12 && (p[1] + 1.152).abs() < 1e-12);
    let params = LineSearchParams::new(0.5, 0.5, 60).unwrap();
    let fx = f.value(&x);
    let bound = fx + 0.5 * dot(&g, &p);
    assert!(f.value(&ambient_move(&x, 1.0, &p)) <= bound);
    assert!(f.value(&m.retract(&x, &p).unwrap()) > bound);

    let out = armijo_modified(&f, &m, &x, fx, &p, &g, &params).unwrap();
    assert_eq!(out.ell, 1);
    assert_eq!(out.alpha, 0.5);
    assert_eq!(out.counters.ambient_f_evals, 2);
    assert_eq!(out.counters.retraction_evals, 2);
    assert_eq!(out.counters.retracted_f_evals, 2);
    assert_eq!(out.wasted_retractions, 1);

    let std = armijo_standard(&f, &m, &x, fx, &p, &g, &params).unwrap();
    assert_eq!(std.ell, 1);
    assert_eq!(std.next_point, out.next_point);
}

#[test]
fn circle_example_counter_ordering() {
    let f = RayleighQuotient::new(DenseMatrix::from_diagonal(&[1.0, 3.0])).unwrap();
    let m = Sphere::new(2).unwrap();
    let x = m.point(vec![0.6, 0.8]).unwrap();
    let g = riemannian_gradient(&f, &m, &x).unwrap();
    let p = g.scaled(-1.0);
    let params = LineSearchParams::new(0.5, 0.5, 60).unwrap();
    let fx = f.value(&x);
    let modified = armijo_modified(&f, &m, &x, fx, &p, &g, &params).unwrap();
    let standard = armijo_standard(&f, &m, &x, fx, &p, &g, &params).unwrap();
    assert!(modified.counters.retraction_evals <= modified.counters.ambient_f_evals);
    assert!(modified.counters.retraction_evals <= standard.counters.retraction_evals);
    for out in [&modified, &standard] {
        assert!(out.f_next <= fx + 0.5 * out.alpha * dot(&g, &p));
        m.require_point(&out.next_point).unwrap();
    }
}

#[test]
fn random_clamped_operator_gives_descent_direction() {
    let mut rng = SplitMix64::new(17);
    let n = 8;
    let a = DenseMatrix::new(n, n, rng.normal_vec(n * n))
        .unwrap()
        .symmetrized()
        .unwrap();
    let f = RayleighQuotient::new(a).unwrap();
    let m = Sphere::new(n).unwrap();
    let x = m.random_point(&mut rng);
    let g = m.project_tangent(&x, &rng.normal_vec(n)).unwrap();
    let nu = 0.05;
    let op = build_newton_operator(&f, &m, &x, nu, 1e6, HessianModel::Riemannian).unwrap();
    let p = newton_direction(&op, &g).unwrap();
    let residual = op.apply(&p).add_scaled(1.0, &g).norm();
    assert!(residual <= 1e-9 * g.norm().max(1.0));
    assert!(dot(&g, &p) <= -nu * p.norm() * p.norm() * (1.0 - 1e-12));
    assert!(m.check_tangent(&x, &p, 1e-12));
}

#[test]
fn rayleigh_99_seed_21_reaches_smallest_eigenvalue() {
    let prob = generate(ProblemKind::RayleighSphere, 99, 1, 21).unwrap();
    let trace = solver::run(
        &prob.objective,
        prob.manifold(),
        &prob.x0,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(trace.status, Status::Converged);
    let armijo_core::problems::ProblemObjective::Rayleigh(f) = &prob.objective else {
        unreachable!()
    };
    let lambda_min = sym_eig(f.matrix()).unwrap().min();
    assert!((trace.f_final() - lambda_min).abs() <= 1e-8);
}

#[test]
fn steepest_descent_needs_at_least_as_many_iterations() {
    for seed in 0..5 {
        let prob = generate(ProblemKind::RayleighSphere, 9, 1, seed).unwrap();
        // Steepest descent cannot certify much below this: the decrease it
        // must verify falls under the rounding noise of f.
        let config = SolverConfig {
            max_iter: 5000,
            tol_grad: 1e-6,
            ..SolverConfig::default()
        };
        let newton = solver::run(&prob.objective, prob.manifold(), &prob.x0, &config).unwrap();
        let steepest =
            solver::run_steepest(&prob.objective, prob.manifold(), &prob.x0, &config).unwrap();
        assert_eq!(newton.status, Status::Converged);
        assert_eq!(steepest.status, Status::Converged, "seed {seed}");
        assert!(steepest.iterations() >= newton.iterations(), "seed {seed}");
    }
}

#[test]
fn brockett_converges_to_eigen_optimum() {
    for seed in [3, 30] {
        let prob = generate(ProblemKind::BrockettStiefel, 12, 4, seed).unwrap();
        let trace = solver::run(
            &prob.objective,
            prob.manifold(),
            &prob.x0,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(trace.status, Status::Converged);
        assert!((trace.f_final() - prob.optimal_value().unwrap()).abs() <= 1e-8);
    }
}

#[test]
fn bundled_problems_converge_with_defaults() {
    for (kind, n, p) in [
        (ProblemKind::RayleighSphere, 30, 1),
        (ProblemKind::BrockettStiefel, 8, 3),
        (ProblemKind::QuadraticEuclidean, 40, 1),
    ] {
        for seed in 0..5 {
            let prob = generate(kind, n, p, seed).unwrap();
            for line_search in [LineSearchKind::Standard, LineSearchKind::Modified] {
                for direction in [DirectionKind::Newton, DirectionKind::Steepest] {
                    // A few instances stall just above 1e-7 once the Armijo
                    // decrease drops under the rounding noise of f.
                    let config = SolverConfig {
                        line_search,
                        direction,
                        tol_grad: 1e-6,
                        ..SolverConfig::default()
                    };
                    let trace =
                        solver::run(&prob.objective, prob.manifold(), &prob.x0, &config).unwrap();
                    if direction == DirectionKind::Newton {
                        assert_eq!(
                            trace.status,
                            Status::Converged,
                            "{kind} seed {seed} {line_search:?}"
                        );
                    }
                    if trace.status == Status::Converged {
                        assert!(trace.grad_norm_final() <= config.tol_grad);
                    }
                }
            }
        }
    }
}
