use rand::Rng;

use crate::error::Result;
use crate::geometry::{CostVector, Decision, HintMatrix};
use crate::learner::{check_dim, Learner, Turn};
use crate::ledger::RegretLedger;
use crate::rng::{stream_rng, StreamRng};

use super::{check_learners, halve_cost, SwitchEvent};

/// Which learners restart when a new learner is drawn mid-phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResetPolicy {
    /// Every remaining candidate restarts together with its tracker.
    #[default]
    AllCandidates,
    /// Only the newly drawn learner restarts; the other candidates keep
    /// running on their current interval.
    ChosenOnly,
}

/// Simulates every candidate learner each round and plays a uniformly drawn
/// one. Candidates whose worst-case regret since their last restart exceeds
/// `γ` are evicted; when the played learner is evicted a new one is drawn,
/// and when no candidate is left the set is refilled and `γ` doubles.
///
/// As in [`super::DetCombiner`], costs are halved internally.
pub struct RandCombiner {
    learners: Vec<Box<dyn Learner>>,
    trackers: Vec<RegretLedger>,
    candidate: Vec<bool>,
    decisions: Vec<Option<Decision>>,
    active: usize,
    gamma: f64,
    policy: ResetPolicy,
    seed: u64,
    stream: u64,
    rng: StreamRng,
    scaled: RegretLedger,
    round: usize,
    phases: usize,
    subphases: usize,
    events: Vec<SwitchEvent>,
    turn: Turn,
}

impl RandCombiner {
    pub fn new(learners: Vec<Box<dyn Learner>>, seed: u64, stream: u64) -> Result<Self> {
        let dim = check_learners(&learners)?;
        let k = learners.len();
        let mut s = Self {
            learners,
            trackers: vec![RegretLedger::new(dim); k],
            candidate: vec![true; k],
            decisions: vec![None; k],
            active: 0,
            gamma: 1.0,
            policy: ResetPolicy::default(),
            seed,
            stream,
            rng: stream_rng(seed, stream),
            scaled: RegretLedger::new(dim),
            round: 0,
            phases: 1,
            subphases: 1,
            events: Vec::new(),
            turn: Turn::default(),
        };
        s.reset();
        Ok(s)
    }

    pub fn with_policy(mut self, policy: ResetPolicy) -> Self {
        self.policy = policy;
        self
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

    pub fn phases(&self) -> usize {
        self.phases
    }

    pub fn subphases(&self) -> usize {
        self.subphases
    }

    pub fn candidates(&self) -> Vec<usize> {
        (0..self.k()).filter(|&j| self.candidate[j]).collect()
    }

    /// Tracked worst-case regret of learner `j` on its current interval, in
    /// halved-cost units.
    pub fn tracked_regret(&self, j: usize) -> f64 {
        self.trackers[j].worst_case_regret()
    }

    pub fn scaled_ledger(&self) -> &RegretLedger {
        &self.scaled
    }

    pub fn events(&self) -> &[SwitchEvent] {
        &self.events
    }

    fn restart(&mut self, j: usize) {
        self.learners[j].reset();
        self.trackers[j].reset();
    }

    fn draw(&mut self) -> usize {
        let pool = self.candidates();
        pool[self.rng.gen_range(0..pool.len())]
    }
}

impl Learner for RandCombiner {
    fn dim(&self) -> usize {
        self.scaled.dim()
    }

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        check_dim(self.dim(), hints.dim())?;
        self.turn.hints_received()?;
        for j in 0..self.k() {
            if self.candidate[j] {
                self.decisions[j] = Some(self.learners[j].observe_hints(hints)?);
            }
        }
        Ok(self.decisions[self.active].clone().expect("active learner is a candidate"))
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.dim(), cost.dim())?;
        let g = halve_cost(cost)?;
        self.turn.cost_received()?;
        self.round += 1;
        let played = self.decisions[self.active].clone().expect("active learner is a candidate");
        self.scaled.record(played.as_slice(), g.as_slice())?;
        for j in 0..self.k() {
            if !self.candidate[j] {
                continue;
            }
            let y = self.decisions[j].take().expect("candidate decided this round");
            self.learners[j].observe_cost(&g)?;
            self.trackers[j].record(y.as_slice(), g.as_slice())?;
            if self.trackers[j].worst_case_regret() > self.gamma {
                self.candidate[j] = false;
            }
        }
        if !self.candidate[self.active] {
            let from = self.active;
            if self.candidate.iter().all(|c| !c) {
                self.candidate.iter_mut().for_each(|c| *c = true);
                self.gamma *= 2.0;
                self.phases += 1;
                for j in 0..self.k() {
                    self.restart(j);
                }
                self.active = self.draw();
            } else {
                match self.policy {
                    ResetPolicy::AllCandidates => {
                        for j in self.candidates() {
                            self.restart(j);
                        }
                        self.active = self.draw();
                    }
                    ResetPolicy::ChosenOnly => {
                        self.active = self.draw();
                        self.restart(self.active);
                    }
                }
            }
            debug_assert_eq!(self.trackers[self.active].rounds(), 0);
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
        for j in 0..self.k() {
            self.restart(j);
            self.decisions[j] = None;
        }
        self.candidate.iter_mut().for_each(|c| *c = true);
        self.gamma = 1.0;
        self.rng = stream_rng(self.seed, self.stream);
        self.active = self.draw();
        self.scaled.reset();
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
    use crate::combiners::DetCombiner;
    use crate::learner::{run_learner, ConstantLearner};
    use crate::rng::stream_rng;
    use crate::sampling::random_unit;

    fn costs(seed: u64, t: usize, d: usize) -> Vec<CostVector> {
        let mut rng = stream_rng(seed, 0);
        let mut drift = random_unit(&mut rng, d);
        drift.iter_mut().for_each(|v| *v *= 0.5);
        (0..t)
            .map(|_| {
                let mut c = random_unit(&mut rng, d);
                c.iter_mut().zip(&drift).for_each(|(c, m)| *c = 0.5 * *c + m);
                CostVector::new(c).unwrap()
            })
            .collect()
    }

    fn trajectory(l: &mut dyn Learner, costs: &[CostVector]) -> Vec<Decision> {
        let hints = vec![HintMatrix::empty(l.dim()); costs.len()];
        let mut xs = Vec::new();
        run_learner(l, &hints, costs, |_, x, _| xs.push(x.clone())).unwrap();
        xs
    }

    #[test]
    fn single_learner_matches_deterministic() {
        let cs = costs(1, 400, 3);
        let mut r = RandCombiner::new(vec![Box::new(AdaptiveOgd::new(3))], 5, 1).unwrap();
        let mut d = DetCombiner::new(vec![Box::new(AdaptiveOgd::new(3))]).unwrap();
        assert_eq!(trajectory(&mut r, &cs), trajectory(&mut d, &cs));
        assert_eq!(r.gamma(), d.gamma());
        assert!(r.phases() > 1);
    }

    #[test]
    fn identical_learners_have_one_subphase_per_phase() {
        let cs = costs(2, 600, 2);
        let learners: Vec<Box<dyn Learner>> = (0..5).map(|_| Box::new(AdaptiveOgd::new(2)) as Box<dyn Learner>).collect();
        let mut r = RandCombiner::new(learners, 3, 0).unwrap();
        trajectory(&mut r, &cs);
        assert!(r.phases() > 1);
        assert_eq!(r.phases(), r.subphases());
    }

    #[test]
    fn candidate_set_invariants_hold_every_round() {
        let cs = costs(3, 500, 2);
        let learners: Vec<Box<dyn Learner>> = vec![
            Box::new(ConstantLearner::new(vec![1.0, 0.0]).unwrap()),
            Box::new(ConstantLearner::new(vec![0.0, 1.0]).unwrap()),
            Box::new(AdaptiveOgd::new(2)),
        ];
        let mut r = RandCombiner::new(learners, 4, 0).unwrap();
        let h = HintMatrix::empty(2);
        for c in &cs {
            r.observe_hints(&h).unwrap();
            r.observe_cost(c).unwrap();
            assert!(r.candidates().contains(&r.active()));
            for j in r.candidates() {
                assert!(r.tracked_regret(j) <= r.gamma());
            }
            assert!(r.gamma().log2().fract() == 0.0);
        }
    }

    #[test]
    fn reset_is_bit_identical() {
        let cs = costs(4, 300, 3);
        for policy in [ResetPolicy::AllCandidates, ResetPolicy::ChosenOnly] {
            let learners: Vec<Box<dyn Learner>> = (0..4)
                .map(|i| Box::new(AdaptiveOgd::with_scale(3, 0.25 * (i + 1) as f64).unwrap()) as Box<dyn Learner>)
                .collect();
            let mut r = RandCombiner::new(learners, 9, 2).unwrap().with_policy(policy);
            let a = trajectory(&mut r, &cs);
            r.reset();
            assert_eq!(a, trajectory(&mut r, &cs));
        }
    }
}
