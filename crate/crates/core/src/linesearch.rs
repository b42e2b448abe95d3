//! Armijo backtracking along a retraction curve, in two flavours.
//!
//! Both strategies try the steps `β⁰, β¹, β², …` in order and accept the
//! first one whose *retracted* point satisfies the sufficient-decrease
//! inequality
//!
//! ```text
//! f(R_x(α p)) <= f(x) + τ α ⟨grad f(x), p⟩
//! ```
//!
//! * [`armijo_standard`] retracts and evaluates `f` at every trial.
//! * [`armijo_modified`] first tests the same inequality at the ambient point
//!   `x + α p`, which needs no retraction, and only retracts when that cheap
//!   test passes. If the cheap test passes but the retracted test does not,
//!   backtracking simply continues with the next exponent.
//!
//! Every evaluation is tallied in [`EvalCounters`] so the two strategies can
//! be compared on equal terms.

use std::ops::{Add, AddAssign, Sub};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::manifold::{ambient_move, Manifold, ManifoldPoint, TangentVector};
use crate::objective::{require_dims, Objective};

/// Tallies of the expensive operations performed by an optimizer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EvalCounters {
    /// Evaluations of `f` at an ambient trial point `x + αp`.
    pub ambient_f_evals: u64,
    /// Calls to the retraction.
    pub retraction_evals: u64,
    /// Evaluations of `f` at a retracted trial point.
    pub retracted_f_evals: u64,
    /// Riemannian gradient evaluations.
    pub gradient_evals: u64,
    /// Newton operator constructions.
    pub hessian_builds: u64,
}

impl Add for EvalCounters {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            ambient_f_evals: self.ambient_f_evals + rhs.ambient_f_evals,
            retraction_evals: self.retraction_evals + rhs.retraction_evals,
            retracted_f_evals: self.retracted_f_evals + rhs.retracted_f_evals,
            gradient_evals: self.gradient_evals + rhs.gradient_evals,
            hessian_builds: self.hessian_builds + rhs.hessian_builds,
        }
    }
}

impl AddAssign for EvalCounters {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for EvalCounters {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            ambient_f_evals: self.ambient_f_evals - rhs.ambient_f_evals,
            retraction_evals: self.retraction_evals - rhs.retraction_evals,
            retracted_f_evals: self.retracted_f_evals - rhs.retracted_f_evals,
            gradient_evals: self.gradient_evals - rhs.gradient_evals,
            hessian_builds: self.hessian_builds - rhs.hessian_builds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LineSearchKind {
    /// Retract at every trial.
    Standard,
    /// Ambient test first, retract only when it passes.
    #[default]
    Modified,
}

impl LineSearchKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Modified => "modified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Contraction factor, in `(0, 1)`.
    pub beta: f64,
    /// Sufficient-decrease constant, in `(0, 1)`.
    pub tau: f64,
    /// Largest exponent tried before giving up.
    pub ell_max: usize,
}

impl LineSearchParams {
    pub const DEFAULT_ELL_MAX: usize = 60;

    pub fn new(beta: f64, tau: f64, ell_max: usize) -> Result<Self> {
        let params = Self { beta, tau, ell_max };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if self.ell_max == 0 {
            return Err(Error::InvalidArgument("ell_max must be at least 1".into()));
        }
        Ok(())
    }

    /// `β^ℓ`.
    pub fn step(&self, ell: usize) -> f64 {
        self.beta.powi(ell as i32)
    }
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            beta: 0.5,
            tau: 0.1,
            ell_max: Self::DEFAULT_ELL_MAX,
        }
    }
}

/// The accepted step of one line search.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    /// Accepted exponent `ℓ_k`.
    pub ell: usize,
    /// Accepted step `β^ℓ_k`.
    pub alpha: f64,
    /// `R_x(α p)`.
    pub next_point: ManifoldPoint,
    pub f_next: f64,
    /// Evaluations spent by this call alone.
    pub counters: EvalCounters,
    /// Trials where the ambient test passed but the retracted test failed.
    /// Always zero for the standard strategy.
    pub wasted_retractions: u64,
}

/// Shared validation; returns the directional derivative `⟨g, p⟩`.
fn prepare<F, M>(
    obj: &F,
    manifold: &M,
    x: &ManifoldPoint,
    fx: f64,
    p: &TangentVector,
    g: &TangentVector,
    params: &LineSearchParams,
) -> Result<f64>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    params.validate()?;
    require_dims(obj, manifold)?;
    let n = manifold.ambient_dim();
    for len in [x.len(), p.len(), g.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    if !fx.is_finite() {
        return Err(Error::InvalidArgument(format!("f(x) is not finite: {fx}")));
    }
    let slope = dot(g, p);
    if !(slope < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "search direction is not a descent direction (⟨g, p⟩ = {slope:e})"
        )));
    }
    Ok(slope)
}

/// Sufficient-decrease test `f_trial <= fx + decrease`, evaluated as
/// written. When `|decrease|` is below half an ulp of `fx` the bound rounds
/// to `fx` and a tie is accepted; the decrease is strict otherwise.
pub fn sufficient_decrease(f_trial: f64, fx: f64, decrease: f64) -> bool {
    f_trial <= fx + decrease
}

/// Classical Riemannian Armijo backtracking.
///
/// `fx` must be `f(x)` and `g` the Riemannian gradient at `x`. Each trial
/// costs one retraction and one evaluation of `f` at the retracted point.
pub fn armijo_standard<F, M>(
    obj: &F,
    manifold: &M,
    x: &ManifoldPoint,
    fx: f64,
    p: &TangentVector,
    g: &TangentVector,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    let slope = prepare(obj, manifold, x, fx, p, g, params)?;
    let mut counters = EvalCounters::default();
    for ell in 0..=params.ell_max {
        let alpha = params.step(ell);
        let decrease = params.tau * alpha * slope;
        let candidate = manifold.retract(x, &p.scaled(alpha))?;
        counters.retraction_evals += 1;
        let f_candidate = obj.value(&candidate);
        counters.retracted_f_evals += 1;
        if sufficient_decrease(f_candidate, fx, decrease) {
            return Ok(LineSearchOutcome {
                ell,
                alpha,
                next_point: candidate,
                f_next: f_candidate,
                counters,
                wasted_retractions: 0,
            });
        }
    }
    Err(Error::LineSearchFailed {
        trials: params.ell_max + 1,
        counters,
    })
}

/// Two-stage Armijo backtracking: ambient test first, retracted test only
/// when the ambient one passes.
///
/// Costs one ambient evaluation of `f` per trial plus one retraction and one
/// retracted evaluation per trial whose ambient test passes. The accepted
/// step satisfies the same retracted sufficient-decrease inequality as
/// [`armijo_standard`].
pub fn armijo_modified<F, M>(
    obj: &F,
    manifold: &M,
    x: &ManifoldPoint,
    fx: f64,
    p: &TangentVector,
    g: &TangentVector,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    let slope = prepare(obj, manifold, x, fx, p, g, params)?;
    let mut counters = EvalCounters::default();
    let mut wasted = 0;
    for ell in 0..=params.ell_max {
        let alpha = params.step(ell);
        let decrease = params.tau * alpha * slope;
        let f_ambient = obj.value(&ambient_move(x, alpha, p));
        counters.ambient_f_evals += 1;
        if !sufficient_decrease(f_ambient, fx, decrease) {
            continue;
        }
        let candidate = manifold.retract(x, &p.scaled(alpha))?;
        counters.retraction_evals += 1;
        let f_candidate = obj.value(&candidate);
        counters.retracted_f_evals += 1;
        if sufficient_decrease(f_candidate, fx, decrease) {
            return Ok(LineSearchOutcome {
                ell,
                alpha,
                next_point: candidate,
                f_next: f_candidate,
                counters,
                wasted_retractions: wasted,
            });
        }
        wasted += 1;
    }
    Err(Error::LineSearchFailed {
        trials: params.ell_max + 1,
        counters,
    })
}

/// Dispatches on `kind`.
#[allow(clippy::too_many_arguments)]
pub fn line_search<F, M>(
    kind: LineSearchKind,
    obj: &F,
    manifold: &M,
    x: &ManifoldPoint,
    fx: f64,
    p: &TangentVector,
    g: &TangentVector,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    match kind {
        LineSearchKind::Standard => armijo_standard(obj, manifold, x, fx, p, g, params),
        LineSearchKind::Modified => armijo_modified(obj, manifold, x, fx, p, g, params),
    }
}

/// `|f(x + αp) − f(R_x(αp))| / α`, the relative gap between the ambient
/// and retracted objective values. Tends to zero with `α`.
pub fn approx_error_ratio<F, M>(
    obj: &F,
    manifold: &M,
    x: &ManifoldPoint,
    p: &TangentVector,
    alpha: f64,
) -> Result<f64>
where
    F: Objective + ?Sized,
    M: Manifold + ?Sized,
{
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    require_dims(obj, manifold)?;
    let ambient = obj.value(&ambient_move(x, alpha, p));
    let retracted = obj.value(&manifold.retract(x, &p.scaled(alpha))?);
    Ok((ambient - retracted).abs() / alpha)
}
