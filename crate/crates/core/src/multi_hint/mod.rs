//! Learning from `K` hint sequences.

mod ftrl;
mod hinge;
mod k_hints;
mod mwu;

use std::collections::BTreeSet;

use rand::Rng;

pub use ftrl::FtrlSimplex;
pub use hinge::{simplex_loss, smoothed_hinge, smoothed_hinge_grad, SimplexLoss};
pub use k_hints::KHints;
pub use mwu::{MwuHints, MwuLossRule};

use crate::error::{Error, Result};
use crate::geometry::{dot, CostVector, HintMatrix};

/// Rounds (0-based) where the hint is less than `alpha`-correlated with the
/// cost: `<c_t, h_t> < alpha ||c_t||^2`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BadStepSet(pub BTreeSet<usize>);

impl BadStepSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.0.contains(&t)
    }

    pub fn is_subset(&self, other: &BadStepSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

pub fn bad_step_set<H: AsRef<[f64]>>(hints: &[H], costs: &[CostVector], alpha: f64) -> Result<BadStepSet> {
    if hints.len() != costs.len() {
        return Err(Error::LengthMismatch(format!(
            "{} hints vs {} costs",
            hints.len(),
            costs.len()
        )));
    }
    let mut set = BTreeSet::new();
    for (t, (h, c)) in hints.iter().zip(costs).enumerate() {
        let h = h.as_ref();
        if h.len() != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.dim(),
                got: h.len(),
            });
        }
        if dot(c.as_slice(), h) < alpha * c.norm_sq() {
            set.insert(t);
        }
    }
    Ok(BadStepSet(set))
}

/// Bad steps of the fixed blend `H(w)`.
pub fn bad_step_set_blend(hints: &[HintMatrix], costs: &[CostVector], weights: &[f64], alpha: f64) -> Result<BadStepSet> {
    let blended: Vec<Vec<f64>> = hints.iter().map(|h| h.blend(weights)).collect();
    bad_step_set(&blended, costs, alpha)
}

/// Uniform draw from the simplex (normalized exponentials).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::sampling::{random_in_ball, random_unit};

    fn unit_costs(t: usize) -> (Vec<Vec<f64>>, Vec<CostVector>) {
        let mut rng = stream_rng(1, 0);
        let raw: Vec<Vec<f64>> = (0..t).map(|_| random_unit(&mut rng, 3)).collect();
        let costs = raw.iter().map(|c| CostVector::new(c.clone()).unwrap()).collect();
        (raw, costs)
    }

    #[test]
    fn aligned_and_opposed_hints() {
        let (raw, costs) = unit_costs(20);
        assert!(bad_step_set(&raw, &costs, 0.5).unwrap().is_empty());
        let neg: Vec<Vec<f64>> = raw.iter().map(|c| c.iter().map(|v| -v).collect()).collect();
        assert_eq!(bad_step_set(&neg, &costs, 0.5).unwrap().len(), 20);
    }

    #[test]
    fn zero_cost_rounds_are_never_bad() {
        let costs = vec![CostVector::zeros(2); 4];
        let hints = vec![vec![-1.0, 0.0]; 4];
        assert!(bad_step_set(&hints, &costs, 0.9).unwrap().is_empty());
    }

    #[test]
    fn length_and_dimension_checks() {
        let costs = vec![CostVector::zeros(2); 2];
        assert!(bad_step_set(&[vec![0.0, 0.0]], &costs, 0.5).is_err());
        assert!(bad_step_set(&[vec![0.0], vec![0.0]], &costs, 0.5).is_err());
    }

    #[test]
    fn bad_sets_are_monotone_in_alpha() {
        let mut rng = stream_rng(2, 0);
        let t = 300;
        let hints: Vec<Vec<f64>> = (0..t).map(|_| random_in_ball(&mut rng, 3)).collect();
        let costs: Vec<CostVector> = (0..t).map(|_| CostVector::new(random_in_ball(&mut rng, 3)).unwrap()).collect();
        let alphas = [0.05, 0.1, 0.3, 0.6, 0.9];
        for pair in alphas.windows(2) {
            let lo = bad_step_set(&hints, &costs, pair[0]).unwrap();
            let hi = bad_step_set(&hints, &costs, pair[1]).unwrap();
            assert!(lo.is_subset(&hi));
        }
    }

    #[test]
    fn random_simplex_is_on_simplex() {
        let mut rng = stream_rng(3, 0);
        for k in 1..6 {
            let w = random_simplex(&mut rng, k);
            assert!(w.iter().all(|&v| v >= 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
