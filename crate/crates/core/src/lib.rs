//! Online linear optimization on the unit ball with multiple imperfect hints.

pub mod adversaries;
pub mod bench;
pub mod combiners;
pub mod error;
pub mod geometry;
pub mod learner;
pub mod ledger;
pub mod multi_hint;
pub mod propcheck;
pub mod rng;
pub mod sampling;
pub mod single_hint;
pub mod unconstrained;

pub use error::{Error, Result};
pub use geometry::{project_to_ball, CostVector, Decision, HintMatrix, NORM_TOL};
pub use learner::{run_learner, Learner};
pub use ledger::RegretLedger;
