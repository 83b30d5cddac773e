use crate::error::{Error, Result};
use crate::geometry::{CostVector, Decision, HintMatrix};
use crate::learner::Learner;
use crate::single_hint::OneHint;

use super::ftrl::FtrlSimplex;
use super::hinge::simplex_loss;

/// Learns a convex combination of `K` hint sequences with entropic FTRL on the
/// smoothed hinge losses, and feeds the blended hint to a single-hint learner
/// running at `alpha / 2`.
///
/// With `K = 1` the weight is fixed at `(1)` and the learner is exactly the
/// inner single-hint learner.
#[derive(Debug, Clone)]
pub struct KHints {
    alpha: f64,
    single: OneHint,
    ftrl: Option<FtrlSimplex>,
    weights: Vec<f64>,
    round_hints: Option<HintMatrix>,
    surrogate_loss_sum: f64,
}

impl KHints {
    pub fn new(dim: usize, k: usize, alpha: f64, horizon: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("K-hints learner needs K >= 1".into()));
        }
        let single = OneHint::new(dim, alpha / 2.0, horizon)?;
        if alpha >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let ftrl = if k >= 2 { Some(FtrlSimplex::new(k)?) } else { None };
        Ok(Self {
            alpha,
            single,
            ftrl,
            weights: vec![1.0 / k as f64; k],
            round_hints: None,
            surrogate_loss_sum: 0.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// The weights `w_t` used for the current (or next) round.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_t ℓ_t(w_t)` so far.
    pub fn surrogate_loss_sum(&self) -> f64 {
        self.surrogate_loss_sum
    }

    pub fn inner(&self) -> &OneHint {
        &self.single
    }
}

impl Learner for KHints {
    fn dim(&self) -> usize {
        self.single.dim()
    }

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        if hints.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: hints.k(),
            });
        }
        if hints.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: hints.dim(),
            });
        }
        let blended = hints.blend(&self.weights);
        let x = self.single.observe_hint_vector(&blended)?;
        self.round_hints = Some(hints.clone());
        Ok(x)
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        self.single.observe_cost(cost)?;
        let hints = self
            .round_hints
            .take()
            .ok_or(Error::Protocol("cost received before hints"))?;
        let loss = simplex_loss(&self.weights, cost.as_slice(), &hints, self.alpha)?;
        self.surrogate_loss_sum += loss.value;
        if let Some(ftrl) = self.ftrl.as_mut() {
            ftrl.update(&loss.grad)?;
            self.weights = ftrl.weights();
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.single.reset();
        if let Some(ftrl) = self.ftrl.as_mut() {
            ftrl.reset();
        }
        let k = self.weights.len();
        self.weights = vec![1.0 / k as f64; k];
        self.round_hints = None;
        self.surrogate_loss_sum = 0.0;
    }
}
