//! Hint-free base learners for the combiners, each paired with a monotone
//! regret bound.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{axpy, norm_sq, project_in_place, CostVector, Decision, HintMatrix};
use crate::learner::{check_dim, Learner, Turn};

use super::bound::MonotoneBound;

/// Projected gradient descent with `η_t = scale / sqrt(sum_τ<=t ||c_τ||^2)`.
#[derive(Debug, Clone)]
pub struct AdaptiveOgd {
    scale: f64,
    x: Vec<f64>,
    sq_sum: f64,
    turn: Turn,
}

impl AdaptiveOgd {
    pub fn new(dim: usize) -> Self {
        Self {
            scale: 1.0,
            x: vec![0.0; dim],
            sq_sum: 0.0,
            turn: Turn::default(),
        }
    }

    pub fn with_scale(dim: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step scale must be positive, got {scale}"
            )));
        }
        Ok(Self {
            scale,
            ..Self::new(dim)
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn bound(&self) -> MonotoneBound {
        MonotoneBound::AdaptiveOgd { scale: self.scale }
    }
}

impl Learner for AdaptiveOgd {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn observe_hints(&mut self, _hints: &HintMatrix) -> Result<Decision> {
        self.turn.hints_received()?;
        Ok(Decision(self.x.clone()))
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.x.len(), cost.dim())?;
        self.turn.cost_received()?;
        self.sq_sum += cost.norm_sq();
        if self.sq_sum > 0.0 {
            axpy(-self.scale / self.sq_sum.sqrt(), cost.as_slice(), &mut self.x);
            project_in_place(&mut self.x);
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.x.iter_mut().for_each(|v| *v = 0.0);
        self.sq_sum = 0.0;
        self.turn = Turn::default();
    }
}

/// Diagonal AdaGrad on the unit ball: `η_{t,i} = 1 / sqrt(sum_τ<=t c_{τ,i}^2)`
/// followed by the projection in the metric `diag(1/η_t)`.
#[derive(Debug, Clone)]
pub struct DiagonalAdagrad {
    x: Vec<f64>,
    sq_sums: Vec<f64>,
    turn: Turn,
}

impl DiagonalAdagrad {
    pub fn new(dim: usize) -> Self {
        Self {
            x: vec![0.0; dim],
            sq_sums: vec![0.0; dim],
            turn: Turn::default(),
        }
    }

    pub fn bound(&self) -> MonotoneBound {
        MonotoneBound::DiagonalAdagrad
    }
}

/// Minimizes `sum_i (x_i - z_i)^2 / η_i` over the unit ball. Coordinates with
/// `η_i = 0` are pinned to `z_i`, which callers guarantee is 0.
pub fn weighted_ball_projection(z: &[f64], eta: &[f64]) -> Vec<f64> {
    if norm_sq(z) <= 1.0 {
        return z.to_vec();
    }
    // x_i(μ) = z_i / (1 + μ η_i); ||x(μ)|| decreases in μ.
    let at = |mu: f64| -> Vec<f64> { z.iter().zip(eta).map(|(z, e)| z / (1.0 + mu * e)).collect() };
    let mut hi = 1.0;
    while norm_sq(&at(hi)) > 1.0 {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_sq(&at(mid)) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = at(hi);
    project_in_place(&mut x);
    x
}

impl Learner for DiagonalAdagrad {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn observe_hints(&mut self, _hints: &HintMatrix) -> Result<Decision> {
        self.turn.hints_received()?;
        Ok(Decision(self.x.clone()))
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.x.len(), cost.dim())?;
        self.turn.cost_received()?;
        let c = cost.as_slice();
        let mut eta = vec![0.0; c.len()];
        let mut z = self.x.clone();
        for i in 0..c.len() {
            self.sq_sums[i] += c[i] * c[i];
            if self.sq_sums[i] > 0.0 {
                eta[i] = 1.0 / self.sq_sums[i].sqrt();
                z[i] -= eta[i] * c[i];
            }
        }
        self.x = weighted_ball_projection(&z, &eta);
        Ok(())
    }

    fn reset(&mut self) {
        self.x.iter_mut().for_each(|v| *v = 0.0);
        self.sq_sums.iter_mut().for_each(|v| *v = 0.0);
        self.turn = Turn::default();
    }
}

/// Dual exponent: `1/p + 1/q = 1`.
pub fn dual_exponent(q: f64) -> f64 {
    q / (q - 1.0)
}

/// `sum_i |v_i|^q` to the power `1/q`, computed without overflow.
pub fn lp_norm(v: &[f64], q: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return m;
    }
    m * v.iter().map(|x| (x.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Dual-norm grid `q_0 = 2`, `1/q_i = 1/q_{i-1} - 1/ln d`, returning
/// `q_1, ..., q_K` with `K = floor(ln d / 2)`.
pub fn pnorm_grid(dim: usize) -> Result<Vec<f64>> {
    let log_d = (dim as f64).ln();
    let k = (log_d / 2.0).floor() as usize;
    if k == 0 {
        return Err(Error::InvalidParameter(format!(
            "p-norm grid is empty for d = {dim} (needs ln d >= 2, i.e. d >= 8)"
        )));
    }
    let mut inv_q = 0.5;
    Ok((0..k)
        .map(|_| {
            inv_q -= 1.0 / log_d;
            1.0 / inv_q
        })
        .collect())
}

/// Lazy mirror descent with the mirror map `||x||_p^2 / (2 (p-1))` and
/// `η_t = 1 / sqrt(sum_τ<t ||c_τ||_q^2)`; the mirror point is then
/// Euclidean-projected onto the unit ball.
#[derive(Debug, Clone)]
pub struct PNormMirrorDescent {
    q: f64,
    grad_sum: Vec<f64>,
    sq_sum: f64,
    x: Vec<f64>,
    turn: Turn,
}

impl PNormMirrorDescent {
    /// `q` is the dual exponent, `q >= 2`.
    pub fn new(dim: usize, q: f64) -> Result<Self> {
        if !(q >= 2.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dual exponent q must be finite and >= 2, got {q}"
            )));
        }
        Ok(Self {
            q,
            grad_sum: vec![0.0; dim],
            sq_sum: 0.0,
            x: vec![0.0; dim],
            turn: Turn::default(),
        })
    }

    pub fn p(&self) -> f64 {
        dual_exponent(self.q)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn bound(&self) -> MonotoneBound {
        MonotoneBound::PNorm {
            q: self.q,
            dim: self.x.len(),
        }
    }

    fn refresh_point(&mut self) {
        let theta_norm = lp_norm(&self.grad_sum, self.q);
        if theta_norm == 0.0 || self.sq_sum == 0.0 {
            self.x.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        // ∇(½||θ||_q^2)_i = sign(θ_i) |θ_i|^{q-1} / ||θ||_q^{q-2}
        //                = ||θ||_q · sign(θ_i) (|θ_i| / ||θ||_q)^{q-1}
        let coef = -(self.p() - 1.0) / self.sq_sum.sqrt() * theta_norm;
        for (x, g) in self.x.iter_mut().zip(&self.grad_sum) {
            *x = coef * g.signum() * (g.abs() / theta_norm).powf(self.q - 1.0);
        }
        project_in_place(&mut self.x);
    }
}

impl Learner for PNormMirrorDescent {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn observe_hints(&mut self, _hints: &HintMatrix) -> Result<Decision> {
        self.turn.hints_received()?;
        Ok(Decision(self.x.clone()))
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        check_dim(self.x.len(), cost.dim())?;
        self.turn.cost_received()?;
        let nq = lp_norm(cost.as_slice(), self.q);
        self.sq_sum += nq * nq;
        axpy(1.0, cost.as_slice(), &mut self.grad_sum);
        self.refresh_point();
        Ok(())
    }

    fn reset(&mut self) {
        self.grad_sum.iter_mut().for_each(|v| *v = 0.0);
        self.sq_sum = 0.0;
        self.x.iter_mut().for_each(|v| *v = 0.0);
        self.turn = Turn::default();
    }
}

/// Names accepted by [`base_learner_zoo`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZooKind {
    AdaptiveOgd,
    DiagonalAdagrad,
    PNormMirrorDescent,
}

impl ZooKind {
    pub const NAMES: [&'static str; 3] = ["adaptive-ogd", "diagonal-adagrad", "p-norm-mirror-descent"];
}

impl FromStr for ZooKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive-ogd" => Ok(Self::AdaptiveOgd),
            "diagonal-adagrad" => Ok(Self::DiagonalAdagrad),
            "p-norm-mirror-descent" => Ok(Self::PNormMirrorDescent),
            other => Err(Error::UnknownName {
                what: "zoo learner",
                name: other.to_string(),
                options: Self::NAMES.join(", "),
            }),
        }
    }
}

/// Parameters for [`base_learner_zoo`]. `scale` applies to adaptive OGD,
/// `q` to the p-norm learner (defaults to the first grid point for `dim`).
#[derive(Debug, Clone, Copy, Default)]
pub struct ZooParams {
    pub scale: Option<f64>,
    pub q: Option<f64>,
}

/// Builds a zoo learner together with its monotone regret bound.
pub fn base_learner_zoo(kind: ZooKind, dim: usize, params: ZooParams) -> Result<(Box<dyn Learner>, MonotoneBound)> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    Ok(match kind {
        ZooKind::AdaptiveOgd => {
            let l = AdaptiveOgd::with_scale(dim, params.scale.unwrap_or(1.0))?;
            let b = l.bound();
            (Box::new(l), b)
        }
        ZooKind::DiagonalAdagrad => {
            let l = DiagonalAdagrad::new(dim);
            let b = l.bound();
            (Box::new(l), b)
        }
        ZooKind::PNormMirrorDescent => {
            let q = match params.q {
                Some(q) => q,
                None => pnorm_grid(dim)?[0],
            };
            let l = PNormMirrorDescent::new(dim, q)?;
            let b = l.bound();
            (Box::new(l), b)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::norm;
    use crate::learner::run_learner;
    use crate::rng::stream_rng;
    use crate::sampling::random_unit;
    use rand::Rng;

    fn play(l: &mut dyn Learner, costs: &[CostVector]) -> f64 {
        let hints = vec![HintMatrix::empty(l.dim()); costs.len()];
        run_learner(l, &hints, costs, |_, x, _| assert!(x.norm() <= 1.0 + 1e-9))
            .unwrap()
            .worst_case_regret()
    }

    #[test]
    fn grid_for_d16() {
        let g = pnorm_grid(16).unwrap();
        assert_eq!(g.len(), 1);
        let expected = 1.0 / (0.5 - 1.0 / 16f64.ln());
        assert!((g[0] - expected).abs() < 1e-12);
        assert!(pnorm_grid(7).is_err());
        assert_eq!(pnorm_grid(1000).unwrap().len(), 3);
    }

    #[test]
    fn lp_norm_matches_direct_formula() {
        let v = [0.3, -0.4, 1.2];
        let direct = v.iter().map(|x: &f64| x.abs().powf(3.5)).sum::<f64>().powf(1.0 / 3.5);
        assert!((lp_norm(&v, 3.5) - direct).abs() < 1e-12);
        assert_eq!(lp_norm(&v, f64::INFINITY), 1.2);
        assert!(lp_norm(&[1e300, 1e300], 8.0).is_finite());
    }

    #[test]
    fn q_equal_two_is_lazy_projected_gradient() {
        let mut rng = stream_rng(3, 0);
        let mut l = PNormMirrorDescent::new(3, 2.0).unwrap();
        let mut theta = [0.0; 3];
        let mut s = 0.0;
        for _ in 0..50 {
            let c = random_unit(&mut rng, 3);
            l.observe_hints(&HintMatrix::empty(3)).unwrap();
            l.observe_cost(&CostVector::new(c.clone()).unwrap()).unwrap();
            axpy(1.0, &c, &mut theta);
            s += norm_sq(&c);
            let mut expect: Vec<f64> = theta.iter().map(|t| -t / s.sqrt()).collect();
            project_in_place(&mut expect);
            let x = l.observe_hints(&HintMatrix::empty(3)).unwrap();
            for (a, b) in x.as_slice().iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12);
            }
            l.observe_cost(&CostVector::zeros(3)).unwrap();
        }
    }

    #[test]
    fn weighted_projection_is_kkt_point() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..200 {
            let z: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let eta: Vec<f64> = (0..5).map(|_| rng.gen_range(0.01..2.0)).collect();
            let x = weighted_ball_projection(&z, &eta);
            if norm(&z) <= 1.0 {
                assert_eq!(x, z);
                continue;
            }
            assert!((norm(&x) - 1.0).abs() < 1e-9);
            // Stationarity: (z_i - x_i) / η_i = μ x_i with a common μ >= 0.
            let mus: Vec<f64> = (0..5).map(|i| (z[i] - x[i]) / (eta[i] * x[i])).collect();
            for m in &mus {
                assert!(*m >= 0.0);
                assert!((m - mus[0]).abs() < 1e-6 * (1.0 + mus[0]));
            }
        }
    }

    #[test]
    fn equal_rates_reduce_to_euclidean_projection() {
        let z = [3.0, 4.0];
        let x = weighted_ball_projection(&z, &[0.5, 0.5]);
        assert!((x[0] - 0.6).abs() < 1e-9 && (x[1] - 0.8).abs() < 1e-9);
    }

    #[test]
    fn adagrad_leaves_untouched_coordinates_at_zero() {
        let mut l = DiagonalAdagrad::new(3);
        for _ in 0..20 {
            let x = l.observe_hints(&HintMatrix::empty(3)).unwrap();
            assert_eq!(x.as_slice()[2], 0.0);
            l.observe_cost(&CostVector::new(vec![0.6, -0.8, 0.0]).unwrap()).unwrap();
        }
    }

    #[test]
    fn realized_regret_within_bounds() {
        let mut rng = stream_rng(5, 0);
        let t = 2000;
        let dense: Vec<CostVector> = (0..t).map(|_| CostVector::new(random_unit(&mut rng, 8)).unwrap()).collect();
        let mut sparse = Vec::new();
        for _ in 0..t {
            let mut c = vec![0.0; 8];
            c[rng.gen_range(0..2)] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            sparse.push(CostVector::new(c).unwrap());
        }
        for costs in [&dense, &sparse] {
            for kind in [ZooKind::AdaptiveOgd, ZooKind::DiagonalAdagrad, ZooKind::PNormMirrorDescent] {
                let params = ZooParams {
                    q: Some(3.0),
                    ..Default::default()
                };
                let (mut l, b) = base_learner_zoo(kind, 8, params).unwrap();
                let r = play(l.as_mut(), costs);
                assert!(r <= b.evaluate(costs), "{kind:?}: {r} > {}", b.evaluate(costs));
            }
        }
    }

    #[test]
    fn reset_replays() {
        let mut rng = stream_rng(6, 0);
        let costs: Vec<CostVector> = (0..100).map(|_| CostVector::new(random_unit(&mut rng, 4)).unwrap()).collect();
        for kind in [ZooKind::AdaptiveOgd, ZooKind::DiagonalAdagrad, ZooKind::PNormMirrorDescent] {
            let (mut l, _) = base_learner_zoo(kind, 4, ZooParams { scale: None, q: Some(4.0) }).unwrap();
            let a = play(l.as_mut(), &costs);
            l.reset();
            assert_eq!(a, play(l.as_mut(), &costs));
        }
    }

    #[test]
    fn names_round_trip() {
        for n in ZooKind::NAMES {
            n.parse::<ZooKind>().unwrap();
        }
        let err = "sgd".parse::<ZooKind>().unwrap_err().to_string();
        assert!(err.contains("adaptive-ogd"));
    }
}
