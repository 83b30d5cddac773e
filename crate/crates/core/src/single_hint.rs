//! Learning with one hint per round at a known correlation level `alpha`.
//!
//! The learner keeps an inner point `x̄_t` produced by an adaptive learner for
//! strongly convex quadratic losses, and plays it shifted along the hint:
//!
//! ```text
//! x_t = x̄_t + (||x̄_t||^2 - 1) / (2 r_t) * h_t
//! ```
//!
//! After the cost arrives the confidence radius `r` grows with the negative
//! part of `<c_t, h_t>`, the curvature `σ_t = |<c_t, h_t>| / r_t` is
//! accumulated, and `λ_t` solves `λ (S + λ) = ||c_t||^2` so that the inner
//! step size `1 / (σ_{1:t} + λ_{1:t})` is well defined even when the hints
//! carry no curvature.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::geometry::{axpy, dot, norm_sq, project_in_place, CostVector, Decision, HintMatrix};
use crate::learner::{check_dim, Learner, Turn};
use crate::ledger::RegretLedger;

/// Unique `λ >= 0` with `λ (s + λ) = cost_norm_sq`.
pub fn solve_lambda(s: f64, cost_norm_sq: f64) -> Result<f64> {
    if !(s >= 0.0 && cost_norm_sq >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "solve_lambda needs non-negative inputs, got S={s}, ||c||^2={cost_norm_sq}"
        )));
    }
    if cost_norm_sq == 0.0 {
        return Ok(0.0);
    }
    // 2c / (s + sqrt(s^2 + 4c)) equals the textbook root (-s + sqrt(..)) / 2
    // without the cancellation when s^2 >> c.
    Ok(2.0 * cost_norm_sq / (s + (s * s + 4.0 * cost_norm_sq).sqrt()))
}

/// `x̄ + ((||x̄||^2 - 1) / (2 r)) h`
pub fn shift_decision(xbar: &[f64], hint: &[f64], radius: f64) -> Result<Vec<f64>> {
    if !(radius >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be >= 1, got {radius}"
        )));
    }
    check_dim(xbar.len(), hint.len())?;
    let coef = (norm_sq(xbar) - 1.0) / (2.0 * radius);
    let mut x = xbar.to_vec();
    axpy(coef, hint, &mut x);
    Ok(x)
}

/// `sqrt(r^2 + alpha * max(0, -<c,h>) / ln T)`
pub fn update_radius(radius: f64, inner_product: f64, alpha: f64, horizon: usize) -> Result<f64> {
    if horizon < 2 {
        return Err(Error::InvalidParameter(format!(
            "horizon must be >= 2 (ln T > 0), got {horizon}"
        )));
    }
    if !(radius >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be >= 1, got {radius}"
        )));
    }
    let neg = (-inner_product).max(0.0);
    Ok((radius * radius + alpha * neg / (horizon as f64).ln()).sqrt())
}

/// `ℓ(x) = <c, x> + (σ/2)(||x||^2 - 1)`, σ-strongly convex.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticLoss<'a> {
    pub linear: &'a [f64],
    pub curvature: f64,
}

impl QuadraticLoss<'_> {
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(self.linear, x) + 0.5 * self.curvature * (norm_sq(x) - 1.0)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.linear.to_vec();
        axpy(self.curvature, x, &mut g);
        g
    }
}

/// Inner learner over the unit ball for a stream of strongly convex losses.
pub trait StronglyConvexLearner: Send + Debug {
    /// Current iterate `x̄_t`.
    fn point(&self) -> &[f64];

    /// Consumes round `t`'s loss. `step_size` is `1 / (σ_{1:t} + λ_{1:t})`,
    /// or `None` when that denominator is still zero.
    fn observe_loss(&mut self, loss: &QuadraticLoss<'_>, step_size: Option<f64>);

    fn reset(&mut self);
}

/// Projected gradient descent starting at the origin:
/// `x̄_{t+1} = P(x̄_t - η_t ∇ℓ_t(x̄_t))`.
#[derive(Debug, Clone)]
pub struct ProjectedScOgd {
    x: Vec<f64>,
}

impl ProjectedScOgd {
    pub fn new(dim: usize) -> Self {
        Self { x: vec![0.0; dim] }
    }
}

impl StronglyConvexLearner for ProjectedScOgd {
    fn point(&self) -> &[f64] {
        &self.x
    }

    fn observe_loss(&mut self, loss: &QuadraticLoss<'_>, step_size: Option<f64>) {
        let Some(eta) = step_size else { return };
        let g = loss.gradient(&self.x);
        axpy(-eta, &g, &mut self.x);
        project_in_place(&mut self.x);
    }

    fn reset(&mut self) {
        self.x.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Single-hint learner for a known `alpha`.
#[derive(Debug, Clone)]
pub struct OneHint<I = ProjectedScOgd> {
    alpha: f64,
    horizon: usize,
    inner: I,
    radius: f64,
    sigma_sum: f64,
    lambda_sum: f64,
    negative_correlation_sum: f64,
    last_lambda_residual: f64,
    hint: Vec<f64>,
    decision: Vec<f64>,
    ledger: RegretLedger,
    turn: Turn,
}

impl OneHint<ProjectedScOgd> {
    pub fn new(dim: usize, alpha: f64, horizon: usize) -> Result<Self> {
        Self::with_inner(ProjectedScOgd::new(dim), alpha, horizon)
    }
}

impl<I: StronglyConvexLearner> OneHint<I> {
    pub fn with_inner(inner: I, alpha: f64, horizon: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if horizon < 2 {
            return Err(Error::InvalidParameter(format!(
                "horizon must be >= 2, got {horizon}"
            )));
        }
        let dim = inner.point().len();
        Ok(Self {
            alpha,
            horizon,
            inner,
            radius: 1.0,
            sigma_sum: 0.0,
            lambda_sum: 0.0,
            negative_correlation_sum: 0.0,
            last_lambda_residual: 0.0,
            hint: vec![0.0; dim],
            decision: vec![0.0; dim],
            ledger: RegretLedger::new(dim),
            turn: Turn::default(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn sigma_sum(&self) -> f64 {
        self.sigma_sum
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambda_sum
    }

    /// `sum_t max(0, -<c_t, h_t>)` over the rounds seen so far.
    pub fn negative_correlation_sum(&self) -> f64 {
        self.negative_correlation_sum
    }

    /// `|λ_t (S + λ_t) - ||c_t||^2|` from the last round.
    pub fn last_lambda_residual(&self) -> f64 {
        self.last_lambda_residual
    }

    pub fn inner_point(&self) -> &[f64] {
        self.inner.point()
    }

    pub fn ledger(&self) -> &RegretLedger {
        &self.ledger
    }

    /// Hint-vector entry point used by the multi-hint learners.
    pub fn observe_hint_vector(&mut self, hint: &[f64]) -> Result<Decision> {
        check_dim(self.hint.len(), hint.len())?;
        self.turn.hints_received()?;
        self.hint.copy_from_slice(hint);
        self.decision = shift_decision(self.inner.point(), hint, self.radius)?;
        Ok(Decision(self.decision.clone()))
    }
}

impl<I: StronglyConvexLearner> Learner for OneHint<I> {
    fn dim(&self) -> usize {
        self.hint.len()
    }

    /// Accepts zero columns (treated as a zero hint) or one column.
    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        match hints.k() {
            0 => {
                let zero = vec![0.0; self.dim()];
                self.observe_hint_vector(&zero)
            }
            1 => self.observe_hint_vector(hints.column(0)),
            k => Err(Error::InvalidParameter(format!(
                "single-hint learner got {k} hints"
            ))),
        }
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.dim(), cost.dim())?;
        self.turn.cost_received()?;
        let c = cost.as_slice();
        self.ledger.record(&self.decision, c)?;

        let corr = dot(c, &self.hint);
        let r_t = self.radius;
        self.radius = update_radius(r_t, corr, self.alpha, self.horizon)?;
        self.negative_correlation_sum += (-corr).max(0.0);

        let sigma = corr.abs() / r_t;
        let cost_sq = norm_sq(c);
        let s = self.sigma_sum + self.lambda_sum + sigma;
        let lambda = solve_lambda(s, cost_sq)?;
        self.last_lambda_residual = (lambda * (s + lambda) - cost_sq).abs();
        self.sigma_sum += sigma;
        self.lambda_sum += lambda;

        let denom = self.sigma_sum + self.lambda_sum;
        let step = (denom > 0.0).then(|| 1.0 / denom);
        let loss = QuadraticLoss {
            linear: c,
            curvature: sigma,
        };
        self.inner.observe_loss(&loss, step);
        Ok(())
    }

    fn reset(&mut self) {
        self.inner.reset();
        self.radius = 1.0;
        self.sigma_sum = 0.0;
        self.lambda_sum = 0.0;
        self.negative_correlation_sum = 0.0;
        self.last_lambda_residual = 0.0;
        self.hint.iter_mut().for_each(|v| *v = 0.0);
        self.decision.iter_mut().for_each(|v| *v = 0.0);
        self.ledger.reset();
        self.turn = Turn::default();
    }
}
