//! Combiners that track the realized worst-case regret of several base
//! learners and switch between them with a doubling guess, plus the
//! unknown-`α` wrapper and a zoo of hint-free base learners.

mod bound;
mod deterministic;
mod randomized;
mod unknown_alpha;
pub mod zoo;

pub use bound::{evaluate_monotone_bound, MonotoneBound, D2, D_INF};
pub use deterministic::DetCombiner;
pub use randomized::{RandCombiner, ResetPolicy};
pub use unknown_alpha::{alpha_grid, unknown_alpha_k_hints, unknown_alpha_learner};
pub use zoo::{base_learner_zoo, ZooKind, ZooParams};

use crate::error::{Error, Result};
use crate::geometry::{CostVector, NORM_TOL};
use crate::learner::Learner;

/// A change of active learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchEvent {
    /// 1-based round after whose cost the switch happened.
    pub round: usize,
    pub from: usize,
    pub to: usize,
    /// Guess in force after the switch.
    pub gamma: f64,
}

fn check_learners(learners: &[Box<dyn Learner>]) -> Result<usize> {
    let Some(first) = learners.first() else {
        return Err(Error::InvalidParameter("combiner needs at least one learner".into()));
    };
    let dim = first.dim();
    for l in learners {
        if l.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: l.dim() });
        }
    }
    Ok(dim)
}

fn halve_cost(cost: &CostVector) -> Result<CostVector> {
    let norm = cost.norm_sq().sqrt();
    if norm > 1.0 + NORM_TOL {
        return Err(Error::CostRange { norm });
    }
    Ok(cost.scaled(0.5))
}
