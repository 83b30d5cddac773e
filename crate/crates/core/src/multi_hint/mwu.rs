use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{dot, CostVector, Decision, HintMatrix};
use crate::learner::Learner;
use crate::rng::{stream_rng, StreamRng};
use crate::single_hint::OneHint;

/// How a hint is judged good for the binary expert losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwuLossRule {
    /// `<c, h> >= alpha ||c||^2`, the same test as the bad-step set.
    #[default]
    SignedSquared,
    /// `|<c, h>| >= alpha ||c||`.
    AbsoluteNorm,
}

impl MwuLossRule {
    pub fn is_good(self, corr: f64, cost_norm_sq: f64, alpha: f64) -> bool {
        match self {
            Self::SignedSquared => corr >= alpha * cost_norm_sq,
            Self::AbsoluteNorm => corr.abs() >= alpha * cost_norm_sq.sqrt(),
        }
    }
}

/// Picks one hint sequence per round by multiplicative weights on binary
/// losses and forwards it to a single-hint learner at `alpha`.
#[derive(Debug, Clone)]
pub struct MwuHints {
    alpha: f64,
    decay: f64,
    rule: MwuLossRule,
    weights: Vec<f64>,
    seed: u64,
    stream: u64,
    rng: StreamRng,
    single: OneHint,
    chosen: Option<usize>,
    round_hints: Option<HintMatrix>,
    bad_selections: usize,
}

impl MwuHints {
    pub const DEFAULT_DECAY: f64 = 0.5;

    pub fn new(dim: usize, k: usize, alpha: f64, horizon: usize, seed: u64, stream: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("MWU learner needs K >= 1".into()));
        }
        Ok(Self {
            alpha,
            decay: Self::DEFAULT_DECAY,
            rule: MwuLossRule::default(),
            weights: vec![1.0 / k as f64; k],
            seed,
            stream,
            rng: stream_rng(seed, stream),
            single: OneHint::new(dim, alpha, horizon)?,
            chosen: None,
            round_hints: None,
            bad_selections: 0,
        })
    }

    pub fn with_rule(mut self, rule: MwuLossRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_decay(mut self, decay: f64) -> Result<Self> {
        if !(decay > 0.0 && decay < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "MWU decay must lie in (0, 1), got {decay}"
            )));
        }
        self.decay = decay;
        Ok(self)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index picked in the current round, if hints have been received.
    pub fn chosen(&self) -> Option<usize> {
        self.chosen
    }

    /// Rounds in which the selected hint was judged bad.
    pub fn bad_selections(&self) -> usize {
        self.bad_selections
    }

    /// Multiplies weight `i` by `1 - decay * loss_i` and renormalizes.
    pub fn apply_losses(&mut self, losses: &[f64]) {
        for (w, l) in self.weights.iter_mut().zip(losses) {
            *w *= 1.0 - self.decay * l;
        }
        let z: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= z);
    }

    fn sample_index(&mut self) -> usize {
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.len() - 1
    }
}

impl Learner for MwuHints {
    fn dim(&self) -> usize {
        self.single.dim()
    }

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        if hints.k() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: hints.k(),
            });
        }
        let i = self.sample_index();
        let x = self.single.observe_hint_vector(hints.column(i))?;
        self.chosen = Some(i);
        self.round_hints = Some(hints.clone());
        Ok(x)
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        self.single.observe_cost(cost)?;
        let hints = self
            .round_hints
            .take()
            .ok_or(Error::Protocol("cost received before hints"))?;
        let c = cost.as_slice();
        let cost_sq = dot(c, c);
        let losses: Vec<f64> = hints
            .columns()
            .map(|h| {
                if self.rule.is_good(dot(c, h), cost_sq, self.alpha) {
                    0.0
                } else {
                    1.0
                }
            })
            .collect();
        if let Some(i) = self.chosen {
            self.bad_selections += losses[i] as usize;
        }
        self.apply_losses(&losses);
        Ok(())
    }

    fn reset(&mut self) {
        let k = self.weights.len();
        self.weights = vec![1.0 / k as f64; k];
        self.rng = stream_rng(self.seed, self.stream);
        self.single.reset();
        self.chosen = None;
        self.round_hints = None;
        self.bad_selections = 0;
    }
}
