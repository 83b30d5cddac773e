//! Follow-the-regularized-leader over the simplex with the entropic
//! regularizer `ψ(w) = ln K + sum_i w_i ln w_i` and the adaptive scale
//! `η_t = sqrt((ln K + sum_τ ||g_τ||_∞^2) / ln K)`.
//!
//! The minimizer of `<G, w> + η ψ(w)` over the simplex is the softmax of
//! `-G / η`, so no iterative solver is involved.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FtrlSimplex {
    grad_sum: Vec<f64>,
    sq_inf_sum: f64,
}

impl FtrlSimplex {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "entropic FTRL needs K >= 2 (ln K > 0), got {k}"
            )));
        }
        Ok(Self {
            grad_sum: vec![0.0; k],
            sq_inf_sum: 0.0,
        })
    }

    /// Builds a state directly, e.g. for oracle comparisons.
    pub fn from_parts(grad_sum: Vec<f64>, sq_inf_sum: f64) -> Result<Self> {
        let mut s = Self::new(grad_sum.len())?;
        if !(sq_inf_sum >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sum of squared gradient norms must be >= 0, got {sq_inf_sum}"
            )));
        }
        s.grad_sum = grad_sum;
        s.sq_inf_sum = sq_inf_sum;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.grad_sum.len()
    }

    pub fn grad_sum(&self) -> &[f64] {
        &self.grad_sum
    }

    pub fn sq_inf_sum(&self) -> f64 {
        self.sq_inf_sum
    }

    pub fn regularizer_scale(&self) -> f64 {
        let log_k = (self.k() as f64).ln();
        ((log_k + self.sq_inf_sum) / log_k).sqrt()
    }

    /// Exact argmin of the FTRL objective. Entries are strictly positive
    /// unless a gap in `grad_sum` exceeds ~745 η (exp underflow).
    pub fn weights(&self) -> Vec<f64> {
        let eta = self.regularizer_scale();
        let min = self.grad_sum.iter().copied().fold(f64::INFINITY, f64::min);
        let mut w: Vec<f64> = self.grad_sum.iter().map(|g| (-(g - min) / eta).exp()).collect();
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= z);
        w
    }

    /// `<G, w> + η ψ(w)`
    pub fn objective(&self, w: &[f64]) -> f64 {
        let log_k = (self.k() as f64).ln();
        let entropy: f64 = w.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum();
        let linear: f64 = self.grad_sum.iter().zip(w).map(|(g, w)| g * w).sum();
        linear + self.regularizer_scale() * (log_k + entropy)
    }

    pub fn update(&mut self, grad: &[f64]) -> Result<()> {
        if grad.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: grad.len(),
            });
        }
        let inf = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        self.sq_inf_sum += inf * inf;
        for (s, g) in self.grad_sum.iter_mut().zip(grad) {
            *s += g;
        }
        Ok(())
    }

    pub fn reset(&mut self) {
        self.grad_sum.iter_mut().for_each(|g| *g = 0.0);
        self.sq_inf_sum = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn uniform_at_start_and_k_check() {
        let f = FtrlSimplex::new(4).unwrap();
        assert_eq!(f.weights(), vec![0.25; 4]);
        assert!(FtrlSimplex::new(1).is_err());
        assert!(FtrlSimplex::new(0).is_err());
    }

    #[test]
    fn dominance_limit() {
        let f = FtrlSimplex::from_parts(vec![0.0, 1e6], 0.0).unwrap();
        let w = f.weights();
        assert!((w[0] - 1.0).abs() < 1e-9 && w[1] < 1e-9);
    }

    #[test]
    fn update_accumulates_inf_norm() {
        let mut f = FtrlSimplex::new(3).unwrap();
        f.update(&[0.5, -2.0, 1.0]).unwrap();
        f.update(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.sq_inf_sum(), 5.0);
        assert_eq!(f.grad_sum(), &[1.5, -2.0, 1.0]);
        assert!(f.update(&[1.0]).is_err());
    }

    /// Grid-search oracle over a 200x200 barycentric lattice on Δ_3.
    pub(crate) fn grid_min(f: &FtrlSimplex) -> f64 {
        let n = 200;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let w = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
                best = best.min(f.objective(&w));
            }
        }
        best
    }

    #[test]
    fn closed_form_beats_grid_search() {
        let mut rng = stream_rng(9, 0);
        for _ in 0..20 {
            let g: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let f = FtrlSimplex::from_parts(g, rng.gen_range(0.0..20.0)).unwrap();
            let w = f.weights();
            assert!(w.iter().all(|&v| v > 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let closed = f.objective(&w);
            let grid = grid_min(&f);
            assert!(closed <= grid + 1e-12);
            assert!(grid - closed <= 1e-3);
        }
    }
}
