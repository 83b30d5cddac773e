//! The smoothed hinge loss on blended-hint correlations.

use crate::error::{Error, Result};
use crate::geometry::{dot, HintMatrix};

fn check_b(b: f64) -> Result<()> {
    if b >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "smoothed hinge needs b >= 0, got {b}"
        )))
    }
}

/// ```text
/// ℓ(a, b) = 0             a > b
///           (b - a)^2 / b a in [0, b]
///           b - 2a        a < 0
/// ```
/// with the `b = 0` limit `max(0, -2a)`.
pub fn smoothed_hinge(a: f64, b: f64) -> Result<f64> {
    check_b(b)?;
    Ok(if a > b {
        0.0
    } else if a >= 0.0 {
        if b == 0.0 {
            0.0
        } else {
            (b - a) * (b - a) / b
        }
    } else {
        b - 2.0 * a
    })
}

/// Derivative of [`smoothed_hinge`] in `a`. The function is C¹ for `b > 0`;
/// the kinks take the middle-branch value.
pub fn smoothed_hinge_grad(a: f64, b: f64) -> Result<f64> {
    check_b(b)?;
    Ok(if a > b {
        0.0
    } else if a >= 0.0 {
        if b == 0.0 {
            0.0
        } else {
            2.0 * (a - b) / b
        }
    } else {
        -2.0
    })
}

/// Loss of a simplex weighting `w` for one round, with its gradient in `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexLoss {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// `ℓ_t(w) = ℓ(<c, H w>, alpha ||c||^2)` and
/// `∂ℓ_t/∂w_i = <c, h_i> ℓ'(<c, H w>, alpha ||c||^2)`.
pub fn simplex_loss(weights: &[f64], cost: &[f64], hints: &HintMatrix, alpha: f64) -> Result<SimplexLoss> {
    if weights.len() != hints.k() {
        return Err(Error::DimensionMismatch {
            expected: hints.k(),
            got: weights.len(),
        });
    }
    if cost.len() != hints.dim() {
        return Err(Error::DimensionMismatch {
            expected: hints.dim(),
            got: cost.len(),
        });
    }
    let corr = hints.correlations(cost);
    Ok(simplex_loss_from_correlations(weights, &corr, alpha * dot(cost, cost)))
}

/// Same as [`simplex_loss`] when the per-hint correlations `<c, h_i>` and the
/// threshold `b = alpha ||c||^2` are already known.
pub(crate) fn simplex_loss_from_correlations(weights: &[f64], corr: &[f64], b: f64) -> SimplexLoss {
    let a = dot(weights, corr);
    // b >= 0 by construction
    let value = smoothed_hinge(a, b).unwrap_or(0.0);
    let slope = smoothed_hinge_grad(a, b).unwrap_or(0.0);
    SimplexLoss {
        value,
        grad: corr.iter().map(|c| c * slope).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::sampling::{random_in_ball, random_unit};
    use crate::multi_hint::random_simplex;
    use rand::Rng;

    #[test]
    fn hinge_branches() {
        assert_eq!(smoothed_hinge(2.0, 1.0).unwrap(), 0.0);
        assert_eq!(smoothed_hinge(0.5, 1.0).unwrap(), 0.25);
        assert_eq!(smoothed_hinge(-1.0, 1.0).unwrap(), 3.0);
        assert_eq!(smoothed_hinge(-1.0, 0.0).unwrap(), 2.0);
        assert_eq!(smoothed_hinge(1.0, 0.0).unwrap(), 0.0);
        assert!(smoothed_hinge(0.0, -1.0).is_err());
        assert!(smoothed_hinge_grad(0.0, -1.0).is_err());
    }

    #[test]
    fn hinge_grad_branches() {
        assert_eq!(smoothed_hinge_grad(2.0, 1.0).unwrap(), 0.0);
        assert_eq!(smoothed_hinge_grad(0.5, 1.0).unwrap(), -1.0);
        assert_eq!(smoothed_hinge_grad(-1.0, 1.0).unwrap(), -2.0);
        // kinks: both one-sided derivatives agree
        assert_eq!(smoothed_hinge_grad(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(smoothed_hinge_grad(0.0, 1.0).unwrap(), -2.0);
    }

    #[test]
    fn hinge_grad_matches_finite_differences() {
        let h = 1e-6;
        let fd = (smoothed_hinge(0.5 + h, 1.0).unwrap() - smoothed_hinge(0.5 - h, 1.0).unwrap()) / (2.0 * h);
        assert!((fd + 1.0).abs() < 1e-6);
        let mut rng = stream_rng(1, 0);
        for _ in 0..1000 {
            let b: f64 = rng.gen_range(0.01..1.0);
            let a: f64 = rng.gen_range(-1.5..1.5);
            let fd = (smoothed_hinge(a + h, b).unwrap() - smoothed_hinge(a - h, b).unwrap()) / (2.0 * h);
            // C¹ with Lipschitz derivative 2/b: central differences are exact up to O(h/b)
            assert!((fd - smoothed_hinge_grad(a, b).unwrap()).abs() < 4.0 * h / b + 1e-7);
        }
    }

    #[test]
    fn hinge_is_continuous_at_breakpoints() {
        for b in [0.1, 0.5, 1.0] {
            for a0 in [0.0, b] {
                let l = smoothed_hinge(a0 - 1e-12, b).unwrap();
                let r = smoothed_hinge(a0 + 1e-12, b).unwrap();
                assert!((l - r).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_cost_gives_zero_loss() {
        let h = HintMatrix::new(2, vec![vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let l = simplex_loss(&[0.5, 0.5], &[0.0, 0.0], &h, 0.3).unwrap();
        assert_eq!(l.value, 0.0);
        assert_eq!(l.grad, vec![0.0, 0.0]);
    }

    #[test]
    fn good_blend_has_zero_loss() {
        let h = HintMatrix::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let l = simplex_loss(&[0.5, 0.5], &[0.6, 0.8], &h, 0.5).unwrap();
        assert_eq!(l.value, 0.0);
        assert_eq!(l.grad, vec![0.0, 0.0]);
    }

    #[test]
    fn simplex_grad_matches_finite_differences() {
        let mut rng = stream_rng(2, 0);
        let eps = 1e-6;
        for _ in 0..200 {
            let h = HintMatrix::new(2, (0..3).map(|_| random_in_ball(&mut rng, 2)).collect()).unwrap();
            let c: Vec<f64> = random_unit(&mut rng, 2).iter().map(|v| v * rng.gen::<f64>()).collect();
            let alpha = rng.gen_range(0.05..0.9);
            let w = random_simplex(&mut rng, 3);
            let b = alpha * dot(&c, &c);
            let a = dot(&w, &h.correlations(&c));
            // central differences straddling a kink are not exact; skip those draws
            if a.abs() < 1e-5 || (a - b).abs() < 1e-5 {
                continue;
            }
            let l = simplex_loss(&w, &c, &h, alpha).unwrap();
            for i in 0..3 {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[i] += eps;
                wm[i] -= eps;
                let fd = (simplex_loss(&wp, &c, &h, alpha).unwrap().value
                    - simplex_loss(&wm, &c, &h, alpha).unwrap().value)
                    / (2.0 * eps);
                assert!((fd - l.grad[i]).abs() < 1e-6, "fd {fd} vs {}", l.grad[i]);
            }
        }
    }
}
