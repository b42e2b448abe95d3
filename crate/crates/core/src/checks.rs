//! Self-checks for the library's numerical and accounting guarantees.
//!
//! Each check returns a [`CheckReport`] instead of panicking, so the same
//! code backs the acceptance tests and the `check` subcommand of the CLI.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::linalg::{dot, sym_eig, DenseMatrix, DenseVector};
use crate::linesearch::{
    approx_error_ratio, line_search, sufficient_decrease, EvalCounters, LineSearchKind,
    LineSearchParams,
};
use crate::manifold::{
    ambient_move, Euclidean, Manifold, ManifoldPoint, Sphere, Stiefel, TangentVector,
};
use crate::objective::{
    build_newton_operator, riemannian_gradient, Brockett, DiagonalQuadratic, HessianModel,
    Objective, RayleighQuotient,
};
use crate::problems::{generate, Problem, ProblemKind, ProblemObjective};
use crate::rng::SplitMix64;
use crate::solver::{run_observed, DirectionKind, SolverConfig, Status};

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Human-readable summary of what was measured.
    pub detail: String,
    pub elapsed: Duration,
    /// Wall-clock allowance; `None` when the check has no time limit.
    pub budget: Option<Duration>,
}

impl CheckReport {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed <= b)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{verdict}] {}. {} ({:.2}s",
            self.id,
            self.name,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(b) = self.budget {
            write!(f, " / {:.0}s budget", b.as_secs_f64())?;
        }
        write!(f, "): {}", self.detail)
    }
}

/// Runs `body` and wraps its verdict. An `Err` from `body` is a failure.
fn timed(
    id: usize,
    name: &'static str,
    budget: Option<f64>,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CheckReport {
    let start = Instant::now();
    let (passed, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckReport {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
        budget: budget.map(Duration::from_secs_f64),
    }
}

fn unit_tangent<M: Manifold + ?Sized>(
    m: &M,
    x: &ManifoldPoint,
    rng: &mut SplitMix64,
) -> Result<TangentVector> {
    let v = m.project_tangent(x, &rng.normal_vec(m.ambient_dim()))?;
    let nv = v.norm();
    Ok(v.scaled(1.0 / nv))
}

fn test_manifolds() -> Result<Vec<Box<dyn Manifold>>> {
    Ok(vec![
        Box::new(Sphere::new(2)?),
        Box::new(Sphere::new(10)?),
        Box::new(Sphere::new(100)?),
        Box::new(Stiefel::new(4, 2)?),
        Box::new(Stiefel::new(10, 3)?),
    ])
}

/// `R_x(0) = x` and `‖(R_x(tv) − x)/t − v‖` shrinking linearly in `t`.
pub fn retraction_axioms() -> CheckReport {
    timed(1, "retraction axioms", Some(5.0), || {
        let mut worst_center: f64 = 0.0;
        let mut worst_shrink = f64::INFINITY;
        let mut failures = 0;
        for (i, m) in test_manifolds()?.iter().enumerate() {
            let mut rng = SplitMix64::new(1000 + i as u64);
            for _ in 0..100 {
                let x = m.random_point(&mut rng);
                let zero = TangentVector::zeros(m.ambient_dim());
                let centered = m.retract(&x, &zero)?;
                let center = centered.coords().sub(x.coords()).norm_max();
                worst_center = worst_center.max(center);

                let v = unit_tangent(m.as_ref(), &x, &mut rng)?;
                let rigidity = |t: f64| -> Result<f64> {
                    let y = m.retract(&x, &v.scaled(t))?;
                    Ok(y.coords()
                        .sub(x.coords())
                        .scaled(1.0 / t)
                        .sub(v.coords())
                        .norm())
                };
                let shrink = rigidity(1e-3)? / rigidity(1e-5)?;
                worst_shrink = worst_shrink.min(shrink);
                if center > 1e-14 || !(shrink >= 50.0) {
                    failures += 1;
                }
            }
        }
        Ok((
            failures == 0,
            format!(
                "500 points; max centering residual {worst_center:.1e}, \
                 min rigidity shrink {worst_shrink:.1}x (need >= 50x); {failures} failures"
            ),
        ))
    })
}

/// Small instances of every objective, for derivative checks.
fn objective_zoo(seed: u64) -> Result<Vec<Problem>> {
    Ok(vec![
        generate(ProblemKind::RayleighSphere, 10, 1, seed)?,
        generate(ProblemKind::BrockettStiefel, 6, 3, seed)?,
        generate(ProblemKind::QuadraticEuclidean, 8, 1, seed)?,
    ])
}

/// The projected gradient represents the derivative along tangent
/// directions, including through the retraction.
pub fn gradient_consistency() -> CheckReport {
    timed(2, "projected gradient consistency", Some(5.0), || {
        let mut worst_inner: f64 = 0.0;
        let mut worst_order: f64 = 0.0;
        let mut failures = 0;
        for prob in objective_zoo(7)? {
            let m = prob.manifold();
            let f = &prob.objective;
            let mut rng = SplitMix64::new(2000 + prob.kind as u64);
            for _ in 0..50 {
                let x = m.random_point(&mut rng);
                let p = unit_tangent(m, &x, &mut rng)?;
                let egrad = f.gradient(&x);
                let g = riemannian_gradient(f, m, &x)?;
                let slope = dot(&g, &p);
                let inner_gap = (slope - dot(&egrad, &p)).abs();
                worst_inner = worst_inner.max(inner_gap);

                let fx = f.value(&x);
                let fd_error = |t: f64| -> Result<f64> {
                    let y = m.retract(&x, &p.scaled(t))?;
                    Ok(((f.value(&y) - fx) / t - slope).abs())
                };
                let (e1, e2) = (fd_error(1e-2)?, fd_error(1e-3)?);
                // First order: a tenfold smaller step gives a roughly
                // tenfold smaller error, up to cancellation noise.
                let noise = 1e-8 * (1.0 + fx.abs());
                let order_ok = e2 <= 0.2 * e1 + noise;
                if e1 > noise {
                    worst_order = worst_order.max(e2 / e1);
                }
                if inner_gap > 1e-10 || !order_ok {
                    failures += 1;
                }
            }
        }
        Ok((
            failures == 0,
            format!(
                "150 (x, p) pairs; max |<Pgrad,p> - <grad,p>| {worst_inner:.1e}, \
                 worst error ratio e(1e-3)/e(1e-2) {worst_order:.3}; {failures} failures"
            ),
        ))
    })
}

/// Copy of a curved problem's objective with `A` replaced by
/// `A + (1 − λ_min(A)) I`, which is positive definite. On the sphere and
/// the Stiefel manifold this changes `f` by a constant only.
fn positive_shift(prob: &Problem) -> Result<ProblemObjective> {
    let shift = |a: &DenseMatrix| -> Result<DenseMatrix> {
        let s = 1.0 - sym_eig(a)?.min();
        let mut b = a.clone();
        for i in 0..b.rows() {
            b[(i, i)] += s;
        }
        Ok(b)
    };
    Ok(match &prob.objective {
        ProblemObjective::Rayleigh(f) => {
            ProblemObjective::Rayleigh(RayleighQuotient::new(shift(f.matrix())?)?)
        }
        ProblemObjective::Brockett(f) => {
            ProblemObjective::Brockett(Brockett::new(shift(f.matrix())?, f.weights().to_vec())?)
        }
        ProblemObjective::Quadratic(f) => ProblemObjective::Quadratic(f.clone()),
    })
}

/// `|f(x + αp) − f(R_x(αp))| / α` decays with `α` on curved manifolds and
/// vanishes on flat space.
///
/// On the sphere `f(R_x(αp)) = f(x + αp) / (1 + α²)` for a Rayleigh
/// quotient and unit `p`, so the ratio is `|f(x + αp)| α / (1 + α²)`: it
/// cannot be monotone where `f` changes sign near `x`. The verdict uses
/// positively shifted matrices; the raw instances are reported alongside.
pub fn ambient_gap_decay() -> CheckReport {
    timed(3, "ambient/retracted gap decay", Some(2.0), || {
        let alphas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
        let mut failures = 0;
        let mut raw_non_monotone = 0;
        let mut cases = 0;
        let mut worst_step: f64 = 0.0;
        for (kind, n, p) in [
            (ProblemKind::RayleighSphere, 20, 1),
            (ProblemKind::BrockettStiefel, 8, 3),
            (ProblemKind::QuadraticEuclidean, 8, 1),
        ] {
            for seed in 0..10 {
                let prob = generate(kind, n, p, seed)?;
                let m = prob.manifold();
                let g = riemannian_gradient(&prob.objective, m, &prob.x0)?;
                let dir = g.scaled(-1.0 / g.norm());
                let ratios = |f: &ProblemObjective| {
                    alphas
                        .iter()
                        .map(|&a| approx_error_ratio(f, m, &prob.x0, &dir, a))
                        .collect::<Result<Vec<_>>>()
                };
                let monotone = |r: &[f64]| r.windows(2).all(|w| w[1] <= 1.1 * w[0]);
                cases += 1;
                let ok = if kind == ProblemKind::QuadraticEuclidean {
                    ratios(&prob.objective)?.iter().all(|&r| r == 0.0)
                } else {
                    if !monotone(&ratios(&prob.objective)?) {
                        raw_non_monotone += 1;
                    }
                    let shifted = ratios(&positive_shift(&prob)?)?;
                    for w in shifted.windows(2) {
                        worst_step = worst_step.max(w[1] / w[0]);
                    }
                    monotone(&shifted) && shifted.iter().all(|&r| r > 0.0)
                };
                if !ok {
                    failures += 1;
                }
            }
        }
        Ok((
            failures == 0,
            format!(
                "{cases} instances over alpha = 1e-1..1e-5; worst consecutive ratio \
                 {worst_step:.3} (need <= 1.1), flat instances exactly 0; {failures} failures \
                 ({raw_non_monotone} unshifted instances non-monotone where f changes sign)"
            ),
        ))
    })
}

/// Every trial step no longer than `min(1, 2ν(1 − τ)/L)` passes the
/// ambient sufficient-decrease test on a quadratic with Lipschitz gradient.
pub fn small_step_acceptance() -> CheckReport {
    timed(4, "ambient test accepts short steps", Some(2.0), || {
        let f = DiagonalQuadratic::new(vec![2.0, 100.0])?;
        let m = Euclidean::new(2)?;
        let lipschitz = f
            .lipschitz_bound()
            .expect("quadratic has a Lipschitz bound");
        let params = LineSearchParams::new(0.5, 0.5, 60)?;
        let mut rng = SplitMix64::new(4000);
        let mut violations = 0;
        let mut trials = 0;
        let mut unresolvable = 0;
        let mut deltas = (f64::NAN, f64::NAN);
        for _ in 0..50 {
            let x = m.point(rng.normal_vec(2))?;
            let fx = f.value(&x);
            let g = riemannian_gradient(&f, &m, &x)?;

            let op = build_newton_operator(&f, &m, &x, 1e-3, 1e6, HessianModel::Riemannian)?;
            let nu_newton = op.eigenvalues()[0];
            let newton = crate::solver::newton_direction(&op, &g)?;
            // Steepest descent is the Newton step for the identity operator.
            let steepest = g.scaled(-1.0);
            for (nu, p) in [(nu_newton, newton), (1.0, steepest)] {
                let delta = crate::solver::theoretical_delta(nu, params.tau, lipschitz)?;
                if nu == 1.0 {
                    deltas.1 = delta;
                } else {
                    deltas.0 = delta;
                }
                let slope = dot(&g, &p);
                for ell in 0..=params.ell_max {
                    let alpha = params.step(ell);
                    if alpha > delta {
                        continue;
                    }
                    // Below this the predicted decrease is lost in the
                    // rounding of f(x) itself.
                    if params.tau * alpha * slope.abs() <= 64.0 * f64::EPSILON * fx.abs() {
                        unresolvable += 1;
                        continue;
                    }
                    trials += 1;
                    let f_trial = f.value(&ambient_move(&x, alpha, &p));
                    if !sufficient_decrease(f_trial, fx, params.tau * alpha * slope) {
                        violations += 1;
                    }
                }
            }
        }
        Ok((
            violations == 0,
            format!(
                "50 starts, delta {:.3} (Newton) and {:.3} (identity operator); \
                 {trials} short trials, {violations} rejections \
                 ({unresolvable} trials below double-precision resolution skipped)",
                deltas.0, deltas.1
            ),
        ))
    })
}

/// Records the accepted iterates of a run.
fn run_recording(
    prob: &Problem,
    config: &SolverConfig,
) -> Result<(crate::solver::SolverTrace, Vec<ManifoldPoint>)> {
    let mut iterates = Vec::new();
    let trace = run_observed(&prob.objective, prob.manifold(), &prob.x0, config, |ev| {
        iterates.push(ev.outcome.next_point.clone());
    })?;
    Ok((trace, iterates))
}

/// On flat space both strategies take identical steps.
pub fn euclidean_equivalence() -> CheckReport {
    timed(5, "strategy equivalence on flat space", Some(2.0), || {
        let mut mismatches = Vec::new();
        let mut steps = 0;
        for seed in 0..20 {
            let prob = generate(ProblemKind::QuadraticEuclidean, 10, 1, seed)?;
            for direction in [DirectionKind::Newton, DirectionKind::Steepest] {
                let config = |kind| SolverConfig {
                    line_search: kind,
                    direction,
                    max_iter: 2000,
                    ..SolverConfig::default()
                };
                let (std_trace, std_path) =
                    run_recording(&prob, &config(LineSearchKind::Standard))?;
                let (mod_trace, mod_path) =
                    run_recording(&prob, &config(LineSearchKind::Modified))?;
                steps += std_path.len();
                let same_steps = std_trace.records.len() == mod_trace.records.len()
                    && std_trace
                        .records
                        .iter()
                        .zip(&mod_trace.records)
                        .all(|(a, b)| a.ell == b.ell && a.alpha == b.alpha);
                let same_path =
                    std_path == mod_path && std_trace.final_point == mod_trace.final_point;
                let (sc, mc) = (std_trace.counters(), mod_trace.counters());
                let counters_ok =
                    mc.ambient_f_evals == sc.retracted_f_evals && sc.ambient_f_evals == 0;
                let converged = std_trace.status == Status::Converged;
                if !(same_steps && same_path && counters_ok && converged) {
                    mismatches.push(format!("seed {seed} {}", direction.label()));
                }
            }
        }
        Ok((
            mismatches.is_empty(),
            format!(
                "20 seeds x 2 directions, {steps} accepted steps compared; mismatches: {:?}",
                mismatches
            ),
        ))
    })
}

/// Newton with the two-stage search reaches the global minimum.
pub fn newton_convergence() -> CheckReport {
    timed(
        6,
        "Newton convergence to the global minimum",
        Some(30.0),
        || {
            let mut failures = Vec::new();
            let mut worst_gap: f64 = 0.0;
            let mut worst_iters = 0;
            for (kind, n, p) in [
                (ProblemKind::RayleighSphere, 99, 1),
                (ProblemKind::BrockettStiefel, 10, 3),
            ] {
                for seed in 0..10 {
                    let prob = generate(kind, n, p, seed)?;
                    let config = SolverConfig {
                        tol_grad: 1e-8,
                        line_search: LineSearchKind::Modified,
                        direction: DirectionKind::Newton,
                        ..SolverConfig::default()
                    };
                    let trace =
                        crate::solver::run(&prob.objective, prob.manifold(), &prob.x0, &config)?;
                    let gap = (trace.f_final() - prob.optimal_value()?).abs();
                    worst_gap = worst_gap.max(gap);
                    worst_iters = worst_iters.max(trace.iterations());
                    if trace.status != Status::Converged
                        || trace.iterations() > 100
                        || !(gap <= 1e-8)
                    {
                        failures.push(format!("{kind} seed {seed}"));
                    }
                }
            }
            Ok((
                failures.is_empty(),
                format!(
                "20 runs; max iterations {worst_iters} (limit 100), max |f - f*| {worst_gap:.1e}; \
                 failures: {failures:?}"
            ),
            ))
        },
    )
}

/// Re-checks the retracted sufficient-decrease inequality from scratch.
#[allow(clippy::too_many_arguments)]
fn armijo_holds<F, M>(
    f: &F,
    m: &M,
    x: &ManifoldPoint,
    fx: f64,
    g: &TangentVector,
    p: &TangentVector,
    alpha: f64,
    tau: f64,
) -> Result<bool>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    let y = m.retract(x, &p.scaled(alpha))?;
    Ok(sufficient_decrease(
        f.value(&y),
        fx,
        tau * alpha * dot(g, p),
    ))
}

/// Finest gradient tolerance that `τ = 0.9` runs on the 99-dimensional
/// Rayleigh problems reach in double precision. Below it the required
/// decrease `τα⟨g, p⟩` drops under the rounding noise of `f` and both
/// strategies end in a noise-driven stall.
pub const BACKTRACKING_TOL: f64 = 1e-5;

/// With a demanding sufficient-decrease constant, the two-stage search
/// never retracts more than the standard one.
pub fn retraction_savings() -> CheckReport {
    timed(
        7,
        "retraction savings under backtracking",
        Some(30.0),
        || {
            let mut rows = Vec::new();
            let mut not_fewer = Vec::new();
            let mut strict_with_rejection = 0;
            let mut seeds_with_rejection = 0;
            let mut total_rejections = 0;
            let mut bad_steps = 0;
            let mut non_converged = 0;
            for seed in 0..10 {
                let prob = generate(ProblemKind::RayleighSphere, 99, 1, seed)?;
                let m = prob.manifold();
                let mut retractions = [0u64; 2];
                let mut rejections = 0;
                for (slot, kind) in [LineSearchKind::Standard, LineSearchKind::Modified]
                    .into_iter()
                    .enumerate()
                {
                    let config = SolverConfig {
                        tol_grad: BACKTRACKING_TOL,
                        line_search: kind,
                        params: LineSearchParams::new(0.5, 0.9, 60)?,
                        ..SolverConfig::default()
                    };
                    let mut recheck: Result<()> = Ok(());
                    let trace = run_observed(&prob.objective, m, &prob.x0, &config, |ev| {
                        let ok = armijo_holds(
                            &prob.objective,
                            m,
                            ev.x,
                            ev.fx,
                            ev.gradient,
                            ev.direction,
                            ev.outcome.alpha,
                            config.params.tau,
                        );
                        match ok {
                            Ok(true) => {}
                            Ok(false) => bad_steps += 1,
                            Err(e) => recheck = Err(e),
                        }
                    })?;
                    recheck?;
                    if trace.status != Status::Converged {
                        non_converged += 1;
                    }
                    let c = trace.counters();
                    retractions[slot] = c.retraction_evals;
                    if kind == LineSearchKind::Modified {
                        rejections = c.ambient_f_evals - c.retraction_evals;
                    }
                }
                let [standard, modified] = retractions;
                if modified > standard {
                    not_fewer.push(seed);
                }
                if rejections > 0 {
                    seeds_with_rejection += 1;
                    if modified < standard {
                        strict_with_rejection += 1;
                    }
                }
                total_rejections += rejections;
                rows.push(format!("{seed}:{standard}/{modified}"));
            }
            // Strict savings are only required where the ambient test rejected
            // something; with no rejection both searches do identical work.
            let strict_ok = seeds_with_rejection == 0 || strict_with_rejection > 0;
            let passed = not_fewer.is_empty() && strict_ok && bad_steps == 0 && non_converged == 0;
            Ok((
                passed,
                format!(
                    "tol {BACKTRACKING_TOL:.0e}; retractions standard/modified per seed [{}]; \
                 seeds with more retractions: {:?}; {total_rejections} cheap rejections on \
                 {seeds_with_rejection} seeds, strict savings on {strict_with_rejection}; \
                 {bad_steps} accepted steps failing re-check; {non_converged} runs not converged",
                    rows.join(" "),
                    not_fewer
                ),
            ))
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Value,
    Gradient,
    HessianVec,
    Retract,
}

type EventLog = Rc<RefCell<Vec<Event>>>;

/// Objective wrapper that logs every oracle call.
struct CountingObjective<'a> {
    inner: &'a dyn Objective,
    log: EventLog,
}

impl Objective for CountingObjective<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.log.borrow_mut().push(Event::Value);
        self.inner.value(x)
    }

    fn gradient(&self, x: &[f64]) -> DenseVector {
        self.log.borrow_mut().push(Event::Gradient);
        self.inner.gradient(x)
    }

    fn hessian_vec(&self, x: &[f64], u: &[f64]) -> DenseVector {
        self.log.borrow_mut().push(Event::HessianVec);
        self.inner.hessian_vec(x, u)
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        self.inner.lipschitz_bound()
    }
}

/// Manifold wrapper that logs every retraction.
struct CountingManifold<'a> {
    inner: &'a dyn Manifold,
    log: EventLog,
}

impl Manifold for CountingManifold<'_> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn intrinsic_dim(&self) -> usize {
        self.inner.intrinsic_dim()
    }

    fn point_residual(&self, x: &[f64]) -> f64 {
        self.inner.point_residual(x)
    }

    fn tangent_residual(&self, x: &[f64], v: &[f64]) -> f64 {
        self.inner.tangent_residual(x, v)
    }

    fn projector(&self, x: &[f64], u: &[f64]) -> DenseVector {
        self.inner.projector(x, u)
    }

    fn retract(&self, x: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        self.log.borrow_mut().push(Event::Retract);
        self.inner.retract(x, v)
    }

    fn curvature_term(&self, x: &[f64], euclidean_grad: &[f64], u: &[f64]) -> DenseVector {
        self.inner.curvature_term(x, euclidean_grad, u)
    }

    fn random_point(&self, rng: &mut SplitMix64) -> ManifoldPoint {
        self.inner.random_point(rng)
    }

    fn tangent_basis(&self, x: &ManifoldPoint) -> Result<DenseMatrix> {
        self.inner.tangent_basis(x)
    }
}

/// Tallies a line search's events: a value call directly after a
/// retraction is a retracted evaluation, any other value call is ambient.
fn tally(events: &[Event]) -> EvalCounters {
    let mut c = EvalCounters::default();
    for (i, e) in events.iter().enumerate() {
        match e {
            Event::Retract => c.retraction_evals += 1,
            Event::Value if i > 0 && events[i - 1] == Event::Retract => c.retracted_f_evals += 1,
            Event::Value => c.ambient_f_evals += 1,
            Event::Gradient => c.gradient_evals += 1,
            Event::HessianVec => {}
        }
    }
    c
}

/// Expected counters of a line search that stopped after trying exponents
/// `0..=last`, with `cheap_passes` ambient tests passing on the way.
fn expected_counters(kind: LineSearchKind, last: usize, cheap_passes: u64) -> EvalCounters {
    let trials = last as u64 + 1;
    match kind {
        LineSearchKind::Standard => EvalCounters {
            retraction_evals: trials,
            retracted_f_evals: trials,
            ..EvalCounters::default()
        },
        LineSearchKind::Modified => EvalCounters {
            ambient_f_evals: trials,
            retraction_evals: cheap_passes,
            retracted_f_evals: cheap_passes,
            ..EvalCounters::default()
        },
    }
}

/// Counts, independently of the line search, how many exponents up to
/// `last` pass the ambient test.
fn count_cheap_passes<F: Objective + ?Sized>(
    f: &F,
    x: &ManifoldPoint,
    fx: f64,
    g: &TangentVector,
    p: &TangentVector,
    params: &LineSearchParams,
    last: usize,
) -> u64 {
    let slope = dot(g, p);
    (0..=last)
        .filter(|&ell| {
            let alpha = params.step(ell);
            sufficient_decrease(
                f.value(&ambient_move(x, alpha, p)),
                fx,
                params.tau * alpha * slope,
            )
        })
        .count() as u64
}

/// Summary of [`counter_exactness`] and its direct line-search probes.
#[derive(Debug, Default, Clone, Copy)]
struct CounterTally {
    searches: usize,
    discrepancies: usize,
}

fn audit_solver_run(
    prob: &Problem,
    config: &SolverConfig,
    tally_out: &mut CounterTally,
) -> Result<()> {
    let log: EventLog = Rc::default();
    let f = CountingObjective {
        inner: &prob.objective,
        log: Rc::clone(&log),
    };
    let m = CountingManifold {
        inner: prob.manifold(),
        log: Rc::clone(&log),
    };
    let mut failure: Result<()> = Ok(());
    let mut step_sum = EvalCounters::default();
    let trace = run_observed(&f, &m, &prob.x0, config, |ev| {
        let events = log.borrow().clone();
        // The line search is everything after the last derivative call.
        let start = events
            .iter()
            .rposition(|e| matches!(e, Event::Gradient | Event::HessianVec))
            .map_or(0, |i| i + 1);
        let observed = tally(&events[start..]);
        let passes = count_cheap_passes(
            &prob.objective,
            ev.x,
            ev.fx,
            ev.gradient,
            ev.direction,
            &config.params,
            ev.outcome.ell,
        );
        let expected = expected_counters(config.line_search, ev.outcome.ell, passes);
        tally_out.searches += 1;
        if observed != ev.outcome.counters || expected != ev.outcome.counters {
            tally_out.discrepancies += 1;
        }
        step_sum += ev.outcome.counters;
        if failure.is_ok()
            && ev.outcome.counters.retraction_evals > ev.outcome.counters.ambient_f_evals
            && config.line_search == LineSearchKind::Modified
        {
            failure = Err(Error::InvalidArgument(
                "more retractions than ambient tests".into(),
            ));
        }
    })?;
    failure?;

    // Whole-run totals: every logged event must be accounted for.
    let total = trace.counters();
    let events = log.borrow();
    let values = events.iter().filter(|e| **e == Event::Value).count() as u64;
    let retracts = events.iter().filter(|e| **e == Event::Retract).count() as u64;
    let gradients = events.iter().filter(|e| **e == Event::Gradient).count() as u64;
    let newton_steps = trace
        .records
        .iter()
        .filter(|r| r.direction_norm.is_some())
        .count() as u64;
    let consistent = values == 1 + total.ambient_f_evals + total.retracted_f_evals
        && retracts == total.retraction_evals
        && gradients == total.gradient_evals
        && total.gradient_evals == trace.records.len() as u64
        && total.hessian_builds
            == match config.direction {
                DirectionKind::Newton => newton_steps,
                DirectionKind::Steepest => 0,
            };
    let accepted_only = trace.status == Status::LineSearchFailed
        || step_sum.retraction_evals == total.retraction_evals;
    if !(consistent && accepted_only) {
        tally_out.discrepancies += 1;
    }
    Ok(())
}

/// Probes line searches that exhaust their budget.
fn audit_failing_searches(tally_out: &mut CounterTally) -> Result<()> {
    let f = DiagonalQuadratic::new(vec![1.0, 1.0])?;
    let m = Euclidean::new(2)?;
    let x = m.point(vec![1.0, 1.0])?;
    let g = riemannian_gradient(&f, &m, &x)?;
    // A descent direction far too long for any step in the budget.
    let p = g.scaled(-1e12);
    let params = LineSearchParams::new(0.5, 0.5, 5)?;
    for kind in [LineSearchKind::Standard, LineSearchKind::Modified] {
        tally_out.searches += 1;
        match line_search(kind, &f, &m, &x, f.value(&x), &p, &g, &params) {
            Err(Error::LineSearchFailed { trials, counters }) => {
                let expected = expected_counters(kind, params.ell_max, 0);
                if trials != params.ell_max + 1 || counters != expected {
                    tally_out.discrepancies += 1;
                }
            }
            _ => tally_out.discrepancies += 1,
        }
    }
    Ok(())
}

/// Every counter reported by the line searches and the solver matches an
/// independent instrumented count and the closed-form expectations.
pub fn counter_exactness() -> CheckReport {
    timed(8, "evaluation counter exactness", None, || {
        let mut t = CounterTally::default();
        let mut runs = 0;
        let cases = [
            (ProblemKind::RayleighSphere, 12, 1),
            (ProblemKind::BrockettStiefel, 7, 3),
            (ProblemKind::QuadraticEuclidean, 6, 1),
        ];
        for (kind, n, p) in cases {
            for seed in 0..3 {
                let prob = generate(kind, n, p, seed)?;
                for line_search in [LineSearchKind::Standard, LineSearchKind::Modified] {
                    for direction in [DirectionKind::Newton, DirectionKind::Steepest] {
                        for tau in [0.1, 0.5, 0.9] {
                            let config = SolverConfig {
                                line_search,
                                direction,
                                params: LineSearchParams::new(0.5, tau, 60)?,
                                max_iter: 300,
                                ..SolverConfig::default()
                            };
                            audit_solver_run(&prob, &config, &mut t)?;
                            runs += 1;
                        }
                    }
                }
            }
        }
        audit_failing_searches(&mut t)?;
        Ok((
            t.discrepancies == 0 && t.searches > 0,
            format!(
                "{runs} instrumented runs, {} line searches audited, {} discrepancies",
                t.searches, t.discrepancies
            ),
        ))
    })
}

/// All checks, in order.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        retraction_axioms(),
        gradient_consistency(),
        ambient_gap_decay(),
        small_step_acceptance(),
        euclidean_equivalence(),
        newton_convergence(),
        retraction_savings(),
        counter_exactness(),
    ]
}
