//! Interval regret bounds for the zoo learners.
//!
//! Each bound is a function of the costs seen on an interval and never
//! decreases when the interval grows, which is what the combiners need.

use crate::error::{Error, Result};
use crate::geometry::CostVector;

use super::zoo::{dual_exponent, lp_norm};

/// l2 diameter of the unit ball.
pub const D2: f64 = 2.0;
/// l∞ diameter of the unit ball.
pub const D_INF: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonotoneBound {
    /// `(D2^2 / (2 s) + s) sqrt(sum ||c||^2)` for step `η_t = s / sqrt(sum ||c||^2)`.
    AdaptiveOgd { scale: f64 },
    /// `(D_INF^2 / 2 + 1) sum_i sqrt(sum_t c_{t,i}^2)`.
    DiagonalAdagrad,
    /// `sup_u ||u||_p / sqrt(p - 1) * sqrt(sum ||c||_q^2)` over the unit l2 ball.
    PNorm { q: f64, dim: usize },
    /// A learner with no certificate; useful for tests.
    Zero,
}

impl MonotoneBound {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AdaptiveOgd { .. } => "adaptive-ogd",
            Self::DiagonalAdagrad => "diagonal-adagrad",
            Self::PNorm { .. } => "p-norm-mirror-descent",
            Self::Zero => "zero",
        }
    }

    pub fn evaluate(&self, costs: &[CostVector]) -> f64 {
        match *self {
            Self::AdaptiveOgd { scale } => {
                let s: f64 = costs.iter().map(CostVector::norm_sq).sum();
                (D2 * D2 / (2.0 * scale) + scale) * s.sqrt()
            }
            Self::DiagonalAdagrad => {
                let Some(first) = costs.first() else { return 0.0 };
                let mut sums = vec![0.0; first.dim()];
                for c in costs {
                    for (s, v) in sums.iter_mut().zip(c.as_slice()) {
                        *s += v * v;
                    }
                }
                (D_INF * D_INF / 2.0 + 1.0) * sums.iter().map(|s| s.sqrt()).sum::<f64>()
            }
            Self::PNorm { q, dim } => {
                let p = dual_exponent(q);
                let diam = (dim as f64).powf((1.0 / p - 0.5).max(0.0));
                let s: f64 = costs
                    .iter()
                    .map(|c| {
                        let n = lp_norm(c.as_slice(), q);
                        n * n
                    })
                    .sum();
                diam / (p - 1.0).sqrt() * s.sqrt()
            }
            Self::Zero => 0.0,
        }
    }
}

/// Bound on the interval `range` (0-based, half-open) of `costs`.
pub fn evaluate_monotone_bound(bound: &MonotoneBound, costs: &[CostVector], range: std::ops::Range<usize>) -> Result<f64> {
    if range.start > range.end || range.end > costs.len() {
        return Err(Error::InvalidParameter(format!(
            "interval {range:?} is not inside 0..{}",
            costs.len()
        )));
    }
    Ok(bound.evaluate(&costs[range]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::sampling::random_in_ball;
    use rand::Rng;

    fn all_bounds() -> [MonotoneBound; 4] {
        [
            MonotoneBound::AdaptiveOgd { scale: 1.0 },
            MonotoneBound::AdaptiveOgd { scale: 0.3 },
            MonotoneBound::DiagonalAdagrad,
            MonotoneBound::PNorm { q: 5.0, dim: 6 },
        ]
    }

    #[test]
    fn empty_interval_is_zero() {
        for b in all_bounds() {
            assert_eq!(b.evaluate(&[]), 0.0);
        }
    }

    #[test]
    fn aogd_on_unit_costs() {
        let costs = vec![CostVector::new(vec![0.0, 1.0]).unwrap(); 25];
        // (4/2 + 1) * sqrt(25)
        assert!((MonotoneBound::AdaptiveOgd { scale: 1.0 }.evaluate(&costs) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn nested_intervals_are_monotone() {
        let mut rng = stream_rng(7, 0);
        let costs: Vec<CostVector> = (0..200).map(|_| CostVector::new(random_in_ball(&mut rng, 6)).unwrap()).collect();
        for _ in 0..1000 {
            let a = rng.gen_range(0..=200);
            let b = rng.gen_range(a..=200);
            let a2 = rng.gen_range(a..=b);
            let b2 = rng.gen_range(a2..=b);
            for bound in all_bounds() {
                let outer = evaluate_monotone_bound(&bound, &costs, a..b).unwrap();
                let inner = evaluate_monotone_bound(&bound, &costs, a2..b2).unwrap();
                assert!(inner <= outer + 1e-12);
            }
        }
    }

    #[test]
    fn bounds_on_sparse_and_dense_streams() {
        let mut rng = stream_rng(8, 0);
        let d = 32;
        let dense: Vec<CostVector> = (0..512)
            .map(|_| CostVector::new(crate::sampling::random_unit(&mut rng, d)).unwrap())
            .collect();
        let aogd = MonotoneBound::AdaptiveOgd { scale: 1.0 };
        let ada = MonotoneBound::DiagonalAdagrad;
        assert!(aogd.evaluate(&dense) < ada.evaluate(&dense));
        // sum_i sqrt(S_i) >= sqrt(S), so on the l2 ball the two certificates
        // coincide at best: when every cost sits on one coordinate.
        let one_coord: Vec<CostVector> = (0..512)
            .map(|_| {
                let mut c = vec![0.0; d];
                c[3] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                CostVector::new(c).unwrap()
            })
            .collect();
        assert!((aogd.evaluate(&one_coord) - ada.evaluate(&one_coord)).abs() < 1e-9);
    }

    #[test]
    fn bad_interval_is_rejected() {
        let costs = vec![CostVector::zeros(1); 3];
        assert!(evaluate_monotone_bound(&MonotoneBound::Zero, &costs, 2..5).is_err());
    }
}
