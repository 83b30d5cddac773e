//! Unconstrained learning with hints: a d-dimensional parameter-free learner
//! plus one scalar learner per hint sequence, combined as
//! `x̂_t = x_t + sum_i y_t^(i) h_t^(i)`.
//!
//! The scalar learners are Krichevsky–Trofimov coin bettors; the
//! d-dimensional learner bets a KT magnitude on a direction chosen by adaptive
//! gradient descent on the unit ball.

use crate::combiners::zoo::AdaptiveOgd;
use crate::error::{Error, Result};
use crate::geometry::{dot, CostVector, Decision, HintMatrix, NORM_TOL};
use crate::learner::{check_dim, Learner, Turn};

/// Wealth is kept in log space and capped here so bets stay finite when the
/// costs are perfectly predictable (wealth then grows geometrically).
pub const LOG_WEALTH_CAP: f64 = 500.0;

/// Krichevsky–Trofimov bettor on scalar costs `g_t ∈ [-1, 1]`.
///
/// Bets `y_t = β_t W_{t-1}` with `β_t = (sum_τ<t -g_τ) / t`, and updates
/// `W_t = W_{t-1} (1 - g_t β_t)`.
#[derive(Debug, Clone)]
pub struct KtBettor {
    epsilon: f64,
    log_wealth: f64,
    neg_grad_sum: f64,
    rounds: usize,
    capped: bool,
}

impl KtBettor {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "initial wealth must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            log_wealth: epsilon.ln(),
            neg_grad_sum: 0.0,
            rounds: 0,
            capped: false,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn wealth(&self) -> f64 {
        self.log_wealth.exp()
    }

    pub fn log_wealth(&self) -> f64 {
        self.log_wealth
    }

    /// Whether the wealth cap has ever been hit.
    pub fn capped(&self) -> bool {
        self.capped
    }

    pub fn bet_fraction(&self) -> f64 {
        self.neg_grad_sum / (self.rounds + 1) as f64
    }

    /// The bet for the current round.
    pub fn predict(&self) -> f64 {
        self.bet_fraction() * self.wealth()
    }

    pub fn update(&mut self, g: f64) -> Result<()> {
        if !g.is_finite() {
            return Err(Error::NonFinite("scalar cost"));
        }
        if g.abs() > 1.0 + NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "scalar cost must lie in [-1, 1], got {g}"
            )));
        }
        let g = g.clamp(-1.0, 1.0);
        let beta = self.bet_fraction();
        self.log_wealth += (1.0 - g * beta).ln();
        if self.log_wealth > LOG_WEALTH_CAP {
            self.log_wealth = LOG_WEALTH_CAP;
            self.capped = true;
        }
        self.neg_grad_sum -= g;
        self.rounds += 1;
        Ok(())
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.epsilon).expect("epsilon validated at construction");
    }
}

/// Dimension-free parameter-free learner: `x_t = v_t z_t` with `z_t` from
/// adaptive OGD on the unit ball and `v_t` a KT bet on `<c_t, z_t>`.
#[derive(Debug, Clone)]
pub struct ParameterFreeDd {
    direction: AdaptiveOgd,
    magnitude: KtBettor,
    z: Vec<f64>,
    turn: Turn,
}

impl ParameterFreeDd {
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        Ok(Self {
            direction: AdaptiveOgd::new(dim),
            magnitude: KtBettor::new(epsilon)?,
            z: vec![0.0; dim],
            turn: Turn::default(),
        })
    }

    pub fn magnitude(&self) -> &KtBettor {
        &self.magnitude
    }

    /// Direction played in the current round.
    pub fn direction(&self) -> &[f64] {
        &self.z
    }
}

impl Learner for ParameterFreeDd {
    fn dim(&self) -> usize {
        self.z.len()
    }

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        check_dim(self.dim(), hints.dim())?;
        self.turn.hints_received()?;
        self.z = self.direction.observe_hints(&HintMatrix::empty(self.dim()))?.into_inner();
        let v = self.magnitude.predict();
        Ok(Decision(self.z.iter().map(|z| v * z).collect()))
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.dim(), cost.dim())?;
        self.turn.cost_received()?;
        let g = dot(cost.as_slice(), &self.z).clamp(-1.0, 1.0);
        self.magnitude.update(g)?;
        self.direction.observe_cost(cost)
    }

    fn reset(&mut self) {
        self.direction.reset();
        self.magnitude.reset();
        self.z.iter_mut().for_each(|v| *v = 0.0);
        self.turn = Turn::default();
    }
}

/// `x̂_t = x_t + sum_i y_t^(i) h_t^(i)`; the i-th scalar learner pays
/// `<c_t, h_t^(i)>` (clipped to `[-1, 1]`).
#[derive(Debug, Clone)]
pub struct UnconstrainedComposite {
    base: ParameterFreeDd,
    scalars: Vec<KtBettor>,
    base_point: Vec<f64>,
    bets: Vec<f64>,
    round_hints: Option<HintMatrix>,
}

impl UnconstrainedComposite {
    pub const DEFAULT_EPSILON: f64 = 1.0;

    /// The base learner starts with wealth `epsilon`, each scalar learner with
    /// `epsilon / K`.
    pub fn new(dim: usize, k: usize, epsilon: f64) -> Result<Self> {
        let scalar_eps = if k == 0 { epsilon } else { epsilon / k as f64 };
        Ok(Self {
            base: ParameterFreeDd::new(dim, epsilon)?,
            scalars: (0..k).map(|_| KtBettor::new(scalar_eps)).collect::<Result<_>>()?,
            base_point: vec![0.0; dim],
            bets: vec![0.0; k],
            round_hints: None,
        })
    }

    pub fn k(&self) -> usize {
        self.scalars.len()
    }

    pub fn base(&self) -> &ParameterFreeDd {
        &self.base
    }

    pub fn scalars(&self) -> &[KtBettor] {
        &self.scalars
    }

    /// `x_t` of the current round.
    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    /// `y_t^(i)` of the current round.
    pub fn bets(&self) -> &[f64] {
        &self.bets
    }
}

impl Learner for UnconstrainedComposite {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        if hints.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: hints.k(),
            });
        }
        let mut x = self.base.observe_hints(hints)?.into_inner();
        self.base_point.clone_from(&x);
        for (i, s) in self.scalars.iter().enumerate() {
            let y = s.predict();
            self.bets[i] = y;
            for (xj, hj) in x.iter_mut().zip(hints.column(i)) {
                *xj += y * hj;
            }
        }
        self.round_hints = Some(hints.clone());
        Ok(Decision(x))
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        self.base.observe_cost(cost)?;
        let hints = self
            .round_hints
            .take()
            .ok_or(Error::Protocol("cost received before hints"))?;
        for (s, h) in self.scalars.iter_mut().zip(hints.columns()) {
            s.update(dot(cost.as_slice(), h).clamp(-1.0, 1.0))?;
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.base.reset();
        self.scalars.iter_mut().for_each(KtBettor::reset);
        self.base_point.iter_mut().for_each(|v| *v = 0.0);
        self.bets.iter_mut().for_each(|v| *v = 0.0);
        self.round_hints = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::run_learner;
    use crate::rng::stream_rng;
    use crate::sampling::random_unit;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn zero_costs_leave_everything_at_zero() {
        let mut b = KtBettor::new(1.0).unwrap();
        for _ in 0..50 {
            assert_eq!(b.predict(), 0.0);
            b.update(0.0).unwrap();
        }
        assert_eq!(b.wealth(), 1.0);
        let mut dd = ParameterFreeDd::new(3, 1.0).unwrap();
        let h = HintMatrix::empty(3);
        for _ in 0..50 {
            assert!(dd.observe_hints(&h).unwrap().as_slice().iter().all(|&v| v == 0.0));
            dd.observe_cost(&CostVector::zeros(3)).unwrap();
        }
    }

    #[test]
    fn constant_negative_cost_grows_wealth() {
        let mut b = KtBettor::new(1.0).unwrap();
        let mut last = b.wealth();
        for t in 1..=100 {
            let y = b.predict();
            if t >= 2 {
                assert!(y > 0.0);
            }
            b.update(-1.0).unwrap();
            // β_1 = 0, so the first round leaves the wealth unchanged.
            assert!(if t == 1 { b.wealth() == last } else { b.wealth() > last });
            last = b.wealth();
        }
    }

    #[test]
    fn hand_computed_first_rounds() {
        // β_1 = 0, W_1 = 1; β_2 = 1/2, y_2 = 1/2, W_2 = 1.5; β_3 = 2/3, y_3 = 1.
        let mut b = KtBettor::new(1.0).unwrap();
        assert_eq!(b.predict(), 0.0);
        b.update(-1.0).unwrap();
        assert!((b.predict() - 0.5).abs() < 1e-15);
        b.update(-1.0).unwrap();
        assert!((b.wealth() - 1.5).abs() < 1e-12);
        assert!((b.predict() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_scalar_cost() {
        let mut b = KtBettor::new(1.0).unwrap();
        assert!(b.update(1.5).is_err());
        assert!(b.update(f64::NAN).is_err());
        assert!(KtBettor::new(0.0).is_err());
    }

    #[test]
    fn wealth_cap_keeps_bets_finite() {
        let mut b = KtBettor::new(1.0).unwrap();
        for _ in 0..3000 {
            assert!(b.predict().is_finite());
            b.update(1.0).unwrap();
        }
        assert!(b.capped());
        assert!(b.predict() < 0.0);
    }

    proptest! {
        #[test]
        fn wealth_stays_positive_and_regret_vs_zero_is_at_most_eps(gs in prop::collection::vec(-1.0f64..=1.0, 1..300)) {
            let mut b = KtBettor::new(0.7).unwrap();
            let mut loss = 0.0;
            for g in gs {
                prop_assert!(b.bet_fraction().abs() < 1.0);
                loss += g * b.predict();
                b.update(g).unwrap();
                prop_assert!(b.wealth() > 0.0);
            }
            // wealth = ε - sum g y exactly, so the loss is below ε
            prop_assert!((b.wealth() - (0.7 - loss)).abs() < 1e-9 * (1.0 + b.wealth()));
            prop_assert!(loss < 0.7 + 1e-12);
        }
    }

    #[test]
    fn direction_learner_turns_against_constant_cost() {
        let mut dd = ParameterFreeDd::new(2, 1.0).unwrap();
        let h = HintMatrix::empty(2);
        let c = CostVector::new(vec![1.0, 0.0]).unwrap();
        for t in 1..=200 {
            let x = dd.observe_hints(&h).unwrap();
            if t > 50 {
                assert!(dot(c.as_slice(), x.as_slice()) < 0.0);
                assert!(dd.direction()[0] < -0.99);
            }
            dd.observe_cost(&c).unwrap();
        }
    }

    #[test]
    fn composite_identity_and_k0_reduction() {
        let mut rng = stream_rng(3, 0);
        let mut comp = UnconstrainedComposite::new(3, 2, 1.0).unwrap();
        let mut zero_k = UnconstrainedComposite::new(3, 0, 1.0).unwrap();
        let mut base = ParameterFreeDd::new(3, 1.0).unwrap();
        for _ in 0..300 {
            let c = random_unit(&mut rng, 3);
            let mut h1 = c.clone();
            h1.iter_mut().for_each(|v| *v *= rng.gen_range(-1.0..1.0));
            let hm = HintMatrix::new(3, vec![h1, random_unit(&mut rng, 3)]).unwrap();
            let xh = comp.observe_hints(&hm).unwrap();
            let mut expect = comp.base_point().to_vec();
            for i in 0..2 {
                for (e, h) in expect.iter_mut().zip(hm.column(i)) {
                    *e += comp.bets()[i] * h;
                }
            }
            assert_eq!(xh.as_slice(), expect.as_slice());
            let cv = CostVector::new(c).unwrap();
            comp.observe_cost(&cv).unwrap();
            let e = HintMatrix::empty(3);
            assert_eq!(zero_k.observe_hints(&e).unwrap(), base.observe_hints(&e).unwrap());
            zero_k.observe_cost(&cv).unwrap();
            base.observe_cost(&cv).unwrap();
        }
        for s in comp.scalars() {
            assert!(s.wealth() > 0.0);
        }
    }

    #[test]
    fn reset_replays() {
        let mut rng = stream_rng(4, 0);
        let t = 100;
        let hints: Vec<HintMatrix> = (0..t).map(|_| HintMatrix::single(random_unit(&mut rng, 2)).unwrap()).collect();
        let costs: Vec<CostVector> = (0..t).map(|_| CostVector::new(random_unit(&mut rng, 2)).unwrap()).collect();
        let mut comp = UnconstrainedComposite::new(2, 1, 1.0).unwrap();
        let a = run_learner(&mut comp, &hints, &costs, |_, _, _| {}).unwrap();
        comp.reset();
        let b = run_learner(&mut comp, &hints, &costs, |_, _, _| {}).unwrap();
        assert_eq!(a, b);
    }
}
