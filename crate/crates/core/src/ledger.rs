//! Incremental regret accounting.
//!
//! The supremum of `-<G, u>` over the unit ball is `||G||`, so the worst-case
//! regret over the ball is available in closed form from a running scalar and
//! a running cost sum. Each update is `O(d)`.

use crate::error::{Error, Result};
use crate::geometry::{axpy, dot, norm};

#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    cumulative_cost: f64,
    cost_sum: Vec<f64>,
    rounds: usize,
}

impl RegretLedger {
    pub fn new(dim: usize) -> Self {
        Self {
            cumulative_cost: 0.0,
            cost_sum: vec![0.0; dim],
            rounds: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.cost_sum.len()
    }

    /// Records one round: the played decision and the revealed cost.
    pub fn record(&mut self, decision: &[f64], cost: &[f64]) -> Result<()> {
        let d = self.dim();
        for len in [decision.len(), cost.len()] {
            if len != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: len,
                });
            }
        }
        self.cumulative_cost += dot(decision, cost);
        axpy(1.0, cost, &mut self.cost_sum);
        self.rounds += 1;
        Ok(())
    }

    /// Appends another ledger that covers the rounds following this one.
    pub fn merge(&mut self, later: &RegretLedger) -> Result<()> {
        if later.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: later.dim(),
            });
        }
        self.cumulative_cost += later.cumulative_cost;
        axpy(1.0, &later.cost_sum, &mut self.cost_sum);
        self.rounds += later.rounds;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.cumulative_cost = 0.0;
        self.cost_sum.iter_mut().for_each(|v| *v = 0.0);
        self.rounds = 0;
    }

    /// `sum_t <c_t, x_t>`
    pub fn cumulative_cost(&self) -> f64 {
        self.cumulative_cost
    }

    /// `sum_t c_t`
    pub fn cost_sum(&self) -> &[f64] {
        &self.cost_sum
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// `sup_{||u|| <= 1} sum_t <c_t, x_t - u>`
    pub fn worst_case_regret(&self) -> f64 {
        self.cumulative_cost + norm(&self.cost_sum)
    }

    /// `sum_t <c_t, x_t - u>` for an arbitrary comparator.
    pub fn regret_vs_comparator(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        Ok(self.cumulative_cost - dot(&self.cost_sum, u))
    }

    /// The comparator attaining [`Self::worst_case_regret`].
    pub fn worst_comparator(&self) -> Vec<f64> {
        let n = norm(&self.cost_sum);
        if n == 0.0 {
            vec![0.0; self.dim()]
        } else {
            self.cost_sum.iter().map(|v| -v / n).collect()
        }
    }
}
