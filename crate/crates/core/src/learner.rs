//! The online protocol shared by every learner: hints arrive, a decision is
//! played, then the cost is revealed.

use crate::error::{Error, Result};
use crate::geometry::{CostVector, Decision, HintMatrix};
use crate::ledger::RegretLedger;

/// An online linear optimization algorithm, with or without hints.
///
/// `observe_hints` and `observe_cost` must alternate, starting with
/// `observe_hints`. Learners that take no hints ignore the matrix. `reset`
/// restores the freshly constructed state, including any RNG stream.
pub trait Learner: Send {
    fn dim(&self) -> usize;

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision>;

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()>;

    fn reset(&mut self);
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        (**self).observe_hints(hints)
    }
    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        (**self).observe_cost(cost)
    }
    fn reset(&mut self) {
        (**self).reset()
    }
}

/// Tracks which half of the round a learner is in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Turn {
    awaiting_cost: bool,
}

impl Turn {
    pub(crate) fn hints_received(&mut self) -> Result<()> {
        if self.awaiting_cost {
            return Err(Error::Protocol("hints received twice without a cost"));
        }
        self.awaiting_cost = true;
        Ok(())
    }

    pub(crate) fn cost_received(&mut self) -> Result<()> {
        if !self.awaiting_cost {
            return Err(Error::Protocol("cost received before hints"));
        }
        self.awaiting_cost = false;
        Ok(())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Plays `learner` through a whole sequence and returns its ledger.
///
/// `on_round` sees the 1-based round index, the decision and the ledger after
/// the round's cost has been recorded.
pub fn run_learner<L, F>(
    learner: &mut L,
    hints: &[HintMatrix],
    costs: &[CostVector],
    mut on_round: F,
) -> Result<RegretLedger>
where
    L: Learner + ?Sized,
    F: FnMut(usize, &Decision, &RegretLedger),
{
    if hints.len() != costs.len() {
        return Err(Error::LengthMismatch(format!(
            "{} hint rounds vs {} cost rounds",
            hints.len(),
            costs.len()
        )));
    }
    let mut ledger = RegretLedger::new(learner.dim());
    for (t, (h, c)) in hints.iter().zip(costs).enumerate() {
        let x = learner.observe_hints(h)?;
        learner.observe_cost(c)?;
        ledger.record(x.as_slice(), c.as_slice())?;
        on_round(t + 1, &x, &ledger);
    }
    Ok(ledger)
}

/// Plays the origin every round. Useful as a baseline and in combiner tests.
#[derive(Debug, Clone)]
pub struct ZeroLearner {
    dim: usize,
    turn: Turn,
}

impl ZeroLearner {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            turn: Turn::default(),
        }
    }
}

impl Learner for ZeroLearner {
    fn dim(&self) -> usize {
        self.dim
    }
    fn observe_hints(&mut self, _hints: &HintMatrix) -> Result<Decision> {
        self.turn.hints_received()?;
        Ok(Decision::zeros(self.dim))
    }
    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.dim, cost.dim())?;
        self.turn.cost_received()
    }
    fn reset(&mut self) {
        self.turn = Turn::default();
    }
}

/// Plays a fixed point every round.
#[derive(Debug, Clone)]
pub struct ConstantLearner {
    point: Vec<f64>,
    turn: Turn,
}

impl ConstantLearner {
    pub fn new(point: Vec<f64>) -> Result<Self> {
        Ok(Self {
            point: Decision::constrained(point)?.into_inner(),
            turn: Turn::default(),
        })
    }
}

impl Learner for ConstantLearner {
    fn dim(&self) -> usize {
        self.point.len()
    }
    fn observe_hints(&mut self, _hints: &HintMatrix) -> Result<Decision> {
        self.turn.hints_received()?;
        Ok(Decision(self.point.clone()))
    }
    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.point.len(), cost.dim())?;
        self.turn.cost_received()
    }
    fn reset(&mut self) {
        self.turn = Turn::default();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternation_is_enforced() {
        let mut l = ZeroLearner::new(2);
        let h = HintMatrix::empty(2);
        let c = CostVector::zeros(2);
        assert!(matches!(l.observe_cost(&c), Err(Error::Protocol(_))));
        l.observe_hints(&h).unwrap();
        assert!(matches!(l.observe_hints(&h), Err(Error::Protocol(_))));
        l.observe_cost(&c).unwrap();
        l.observe_hints(&h).unwrap();
        l.reset();
        l.observe_hints(&h).unwrap();
    }

    #[test]
    fn run_learner_checks_lengths() {
        let mut l = ZeroLearner::new(1);
        let err = run_learner(&mut l, &[HintMatrix::empty(1)], &[], |_, _, _| {});
        assert!(matches!(err, Err(Error::LengthMismatch(_))));
    }
}
