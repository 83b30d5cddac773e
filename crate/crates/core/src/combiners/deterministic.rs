use crate::error::Result;
use crate::geometry::{CostVector, Decision, HintMatrix};
use crate::learner::{check_dim, Learner, Turn};
use crate::ledger::RegretLedger;

use super::{check_learners, halve_cost, SwitchEvent};

/// Runs one base learner at a time and moves to the next one, cyclically,
/// as soon as its worst-case regret since it was (re)started exceeds the
/// current guess `γ`. `γ` starts at 1 and doubles each time the cycle wraps.
///
/// Costs are halved before they reach the base learners so that the cost
/// range on the unit ball is at most 1; all tracked regrets are in halved
/// units.
pub struct DetCombiner {
    learners: Vec<Box<dyn Learner>>,
    active: usize,
    gamma: f64,
    tracker: RegretLedger,
    scaled: RegretLedger,
    decision: Option<Decision>,
    round: usize,
    phases: usize,
    subphases: usize,
    events: Vec<SwitchEvent>,
    turn: Turn,
}

impl DetCombiner {
    pub fn new(learners: Vec<Box<dyn Learner>>) -> Result<Self> {
        let dim = check_learners(&learners)?;
        let mut s = Self {
            learners,
            active: 0,
            gamma: 1.0,
            tracker: RegretLedger::new(dim),
            scaled: RegretLedger::new(dim),
            decision: None,
            round: 0,
            phases: 1,
            subphases: 1,
            events: Vec::new(),
            turn: Turn::default(),
        };
        s.learners[0].reset();
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.learners.len()
    }

    pub fn active(&self) -> usize {
        self.active
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of distinct `γ` values used so far.
    pub fn phases(&self) -> usize {
        self.phases
    }

    /// Number of (learner, start time) runs so far.
    pub fn subphases(&self) -> usize {
        self.subphases
    }

    /// Worst-case regret of the active learner since it was started, in
    /// halved-cost units.
    pub fn active_regret(&self) -> f64 {
        self.tracker.worst_case_regret()
    }

    /// The combiner's own ledger on the halved costs.
    pub fn scaled_ledger(&self) -> &RegretLedger {
        &self.scaled
    }

    pub fn events(&self) -> &[SwitchEvent] {
        &self.events
    }
}

impl Learner for DetCombiner {
    fn dim(&self) -> usize {
        self.tracker.dim()
    }

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        check_dim(self.dim(), hints.dim())?;
        self.turn.hints_received()?;
        let y = self.learners[self.active].observe_hints(hints)?;
        self.decision = Some(y.clone());
        Ok(y)
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.dim(), cost.dim())?;
        let g = halve_cost(cost)?;
        self.turn.cost_received()?;
        let y = self.decision.take().expect("decision stored with the hints");
        self.round += 1;
        self.learners[self.active].observe_cost(&g)?;
        self.tracker.record(y.as_slice(), g.as_slice())?;
        self.scaled.record(y.as_slice(), g.as_slice())?;
        if self.tracker.worst_case_regret() > self.gamma {
            let from = self.active;
            if self.active + 1 == self.k() {
                self.gamma *= 2.0;
                self.phases += 1;
            }
            self.active = (self.active + 1) % self.k();
            self.tracker.reset();
            self.learners[self.active].reset();
            self.subphases += 1;
            self.events.push(SwitchEvent {
                round: self.round,
                from,
                to: self.active,
                gamma: self.gamma,
            });
        }
        Ok(())
    }

    fn reset(&mut self) {
        for l in &mut self.learners {
            l.reset();
        }
        self.active = 0;
        self.gamma = 1.0;
        self.tracker.reset();
        self.scaled.reset();
        self.decision = None;
        self.round = 0;
        self.phases = 1;
        self.subphases = 1;
        self.events.clear();
        self.turn = Turn::default();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combiners::zoo::AdaptiveOgd;
    use crate::learner::{run_learner, ConstantLearner};

    fn constant(p: Vec<f64>) -> Box<dyn Learner> {
        Box::new(ConstantLearner::new(p).unwrap())
    }

    #[test]
    fn hand_stepped_switch() {
        // Outer costs (1, 0) are halved to (1/2, 0). A1 plays +e1, so after t
        // rounds its tracked regret is t/2 + t/2 = t: it first exceeds γ = 1
        // at round 2 and A2 takes over from round 3.
        let mut comb = DetCombiner::new(vec![constant(vec![1.0, 0.0]), constant(vec![-1.0, 0.0])]).unwrap();
        let h = HintMatrix::empty(2);
        let c = CostVector::new(vec![1.0, 0.0]).unwrap();
        let mut played = Vec::new();
        for _ in 0..4 {
            played.push(comb.observe_hints(&h).unwrap().as_slice()[0]);
            comb.observe_cost(&c).unwrap();
        }
        assert_eq!(played, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(comb.events().len(), 1);
        assert_eq!(comb.events()[0].round, 2);
        assert_eq!(comb.gamma(), 1.0);
    }

    #[test]
    fn no_switch_when_regret_stays_below_one() {
        let mut a = DetCombiner::new(vec![
            Box::new(AdaptiveOgd::new(2)) as Box<dyn Learner>,
            Box::new(AdaptiveOgd::new(2)),
        ])
        .unwrap();
        let mut alone = AdaptiveOgd::new(2);
        let c = CostVector::new(vec![0.2, 0.0]).unwrap();
        let half = CostVector::new(vec![0.1, 0.0]).unwrap();
        let h = HintMatrix::empty(2);
        for _ in 0..50 {
            assert_eq!(a.observe_hints(&h).unwrap(), alone.observe_hints(&h).unwrap());
            a.observe_cost(&c).unwrap();
            alone.observe_cost(&half).unwrap();
        }
        assert!(a.events().is_empty());
    }

    #[test]
    fn single_learner_doubles_gamma() {
        let mut comb = DetCombiner::new(vec![constant(vec![1.0])]).unwrap();
        let hints = vec![HintMatrix::empty(1); 20];
        let costs = vec![CostVector::new(vec![1.0]).unwrap(); 20];
        run_learner(&mut comb, &hints, &costs, |_, _, _| {}).unwrap();
        // Each run starts fresh; tracked regret grows by 1 per round, so runs
        // last 2, 3, 5, 9 rounds for γ = 1, 2, 4, 8.
        let rounds: Vec<usize> = comb.events().iter().map(|e| e.round).collect();
        assert_eq!(rounds, vec![2, 5, 10, 19]);
        assert_eq!(comb.gamma(), 16.0);
        assert_eq!(comb.phases(), 5);
    }

    #[test]
    fn rejects_large_costs_and_mixed_dims() {
        let mut comb = DetCombiner::new(vec![constant(vec![0.0])]).unwrap();
        comb.observe_hints(&HintMatrix::empty(1)).unwrap();
        assert!(comb.observe_cost(&CostVector::zeros(2)).is_err());
        assert!(DetCombiner::new(vec![constant(vec![0.0]), constant(vec![0.0, 0.0])]).is_err());
        assert!(DetCombiner::new(Vec::new()).is_err());
    }
}
