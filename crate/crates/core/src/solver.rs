//! Line-search Newton iteration on a manifold, with a steepest-descent
//! baseline sharing the same line-search machinery.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::linesearch::{
    line_search, EvalCounters, LineSearchKind, LineSearchOutcome, LineSearchParams,
};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};
use crate::objective::{require_dims, HessianModel, NewtonOperator, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DirectionKind {
    /// Solve `H_k p = -grad f(x_k)` with the clamped Newton operator.
    #[default]
    Newton,
    /// `p = -grad f(x_k)`.
    Steepest,
}

impl DirectionKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Newton => "newton",
            Self::Steepest => "steepest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once `‖grad f(x_k)‖ <= tol_grad`.
    pub tol_grad: f64,
    /// Maximum number of line searches.
    pub max_iter: usize,
    /// Lower clamp for the Newton operator spectrum.
    pub nu: f64,
    /// Upper clamp for the Newton operator spectrum.
    pub rho: f64,
    pub line_search: LineSearchKind,
    pub params: LineSearchParams,
    pub direction: DirectionKind,
    pub hessian_model: HessianModel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_grad: 1e-8,
            max_iter: 500,
            nu: 1e-3,
            rho: 1e6,
            line_search: LineSearchKind::Modified,
            params: LineSearchParams::default(),
            direction: DirectionKind::Newton,
            hessian_model: HessianModel::Riemannian,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_grad > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tol_grad must be positive, got {}",
                self.tol_grad
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if !(self.nu > 0.0 && self.nu <= self.rho && self.rho.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < nu <= rho < inf, got nu={}, rho={}",
                self.nu, self.rho
            )));
        }
        self.params.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIter,
    LineSearchFailed,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIter => "max_iter",
            Self::LineSearchFailed => "linesearch_failed",
        }
    }
}

/// State at iterate `k` and the step taken from it, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub f_value: f64,
    pub grad_norm: f64,
    /// Accepted exponent of the line search from `x_k`; `None` on the
    /// terminal record.
    pub ell: Option<usize>,
    pub alpha: Option<f64>,
    /// `‖p_k‖`; `None` when no direction was computed.
    pub direction_norm: Option<f64>,
    /// Cumulative counters after the work done at this iterate.
    pub counters: EvalCounters,
}

#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
    pub status: Status,
    pub final_point: ManifoldPoint,
}

impl SolverTrace {
    /// Number of accepted steps.
    pub fn iterations(&self) -> usize {
        self.records.iter().filter(|r| r.ell.is_some()).count()
    }

    pub fn last(&self) -> &IterationRecord {
        self.records
            .last()
            .expect("a trace always holds the initial record")
    }

    pub fn counters(&self) -> EvalCounters {
        self.last().counters
    }

    pub fn f_final(&self) -> f64 {
        self.last().f_value
    }

    pub fn grad_norm_final(&self) -> f64 {
        self.last().grad_norm
    }
}

/// Everything known about one accepted step, handed to an observer.
#[derive(Debug)]
pub struct StepEvent<'a> {
    pub k: usize,
    pub x: &'a ManifoldPoint,
    pub fx: f64,
    pub gradient: &'a TangentVector,
    pub direction: &'a TangentVector,
    pub operator: Option<&'a NewtonOperator>,
    pub outcome: &'a LineSearchOutcome,
}

/// Solves `H p = -g` in tangent coordinates.
pub fn newton_direction(op: &NewtonOperator, g: &TangentVector) -> Result<TangentVector> {
    let p = op.solve(&g.scaled(-1.0))?;
    let residual = op.apply(&p).add_scaled(1.0, g).norm();
    let gn = g.norm();
    if !(residual <= 1e-9 * gn.max(1.0)) {
        return Err(Error::Degenerate(format!(
            "Newton system residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(p)
}

/// `min(1, 2ν(1 − τ)/L)`: every step no longer than this passes the
/// ambient sufficient-decrease test for a Newton direction when `∇f` is
/// `L`-Lipschitz and the operator spectrum is bounded below by `ν`.
pub fn theoretical_delta(nu: f64, tau: f64, lipschitz: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "nu must be positive, got {nu}"
        )));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tau must lie in (0, 1), got {tau}"
        )));
    }
    if !(lipschitz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "L must be positive, got {lipschitz}"
        )));
    }
    Ok(f64::min(1.0, 2.0 * nu * (1.0 - tau) / lipschitz))
}

/// Runs the configured method from `x0`.
pub fn run<F, M>(
    obj: &F,
    manifold: &M,
    x0: &ManifoldPoint,
    config: &SolverConfig,
) -> Result<SolverTrace>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    run_observed(obj, manifold, x0, config, |_| {})
}

/// [`run`] with the direction forced to steepest descent.
pub fn run_steepest<F, M>(
    obj: &F,
    manifold: &M,
    x0: &ManifoldPoint,
    config: &SolverConfig,
) -> Result<SolverTrace>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    let config = SolverConfig {
        direction: DirectionKind::Steepest,
        ..*config
    };
    run(obj, manifold, x0, &config)
}

/// [`run`], calling `observer` after every accepted line search.
///
/// Returns `Err` only for invalid input (bad config, infeasible `x0`,
/// mismatched dimensions) or a numerical breakdown while building the
/// direction. A failed line search ends the run with
/// [`Status::LineSearchFailed`] and keeps the partial trace.
pub fn run_observed<F, M, O>(
    obj: &F,
    manifold: &M,
    x0: &ManifoldPoint,
    config: &SolverConfig,
    mut observer: O,
) -> Result<SolverTrace>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
    O: FnMut(&StepEvent<'_>),
{
    config.validate()?;
    require_dims(obj, manifold)?;
    manifold.require_point(x0)?;

    let mut x = x0.clone();
    let mut fx = obj.value(&x);
    let mut counters = EvalCounters::default();
    let mut records = Vec::new();

    let status = 'outer: {
        for k in 0.. {
            let egrad = obj.gradient(&x);
            let g = manifold.project_tangent(&x, &egrad)?;
            counters.gradient_evals += 1;
            let grad_norm = g.norm();
            let terminal = |counters| IterationRecord {
                k,
                f_value: fx,
                grad_norm,
                ell: None,
                alpha: None,
                direction_norm: None,
                counters,
            };
            if grad_norm <= config.tol_grad {
                records.push(terminal(counters));
                break 'outer Status::Converged;
            }
            if k >= config.max_iter {
                records.push(terminal(counters));
                break 'outer Status::MaxIter;
            }

            let (p, op) = match config.direction {
                DirectionKind::Newton => {
                    let op = NewtonOperator::build(
                        obj,
                        manifold,
                        &x,
                        &egrad,
                        config.nu,
                        config.rho,
                        config.hessian_model,
                    )?;
                    counters.hessian_builds += 1;
                    (newton_direction(&op, &g)?, Some(op))
                }
                DirectionKind::Steepest => (g.scaled(-1.0), None),
            };

            let outcome = match line_search(
                config.line_search,
                obj,
                manifold,
                &x,
                fx,
                &p,
                &g,
                &config.params,
            ) {
                Ok(outcome) => outcome,
                Err(err) => {
                    if let Error::LineSearchFailed {
                        counters: spent, ..
                    } = err
                    {
                        counters += spent;
                    }
                    let mut rec = terminal(counters);
                    rec.direction_norm = Some(p.norm());
                    records.push(rec);
                    break 'outer Status::LineSearchFailed;
                }
            };
            observer(&StepEvent {
                k,
                x: &x,
                fx,
                gradient: &g,
                direction: &p,
                operator: op.as_ref(),
                outcome: &outcome,
            });
            counters += outcome.counters;
            records.push(IterationRecord {
                k,
                f_value: fx,
                grad_norm,
                ell: Some(outcome.ell),
                alpha: Some(outcome.alpha),
                direction_norm: Some(p.norm()),
                counters,
            });
            debug_assert!(dot(&g, &p) < 0.0);
            x = outcome.next_point;
            fx = outcome.f_next;
        }
        unreachable!("the iteration loop only exits through a break")
    };

    Ok(SolverTrace {
        records,
        status,
        final_point: x,
    })
}
