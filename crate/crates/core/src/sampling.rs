//! Random vectors used by generators and tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{axpy, dot, norm};

/// Uniform direction on the unit sphere.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point in the unit ball.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let radius = rng.gen::<f64>().powf(1.0 / dim as f64);
    random_unit(rng, dim).into_iter().map(|x| x * radius).collect()
}

/// Unit vector orthogonal to `c` (Gram-Schmidt against a Gaussian draw).
/// Returns `None` in one dimension.
pub fn orthogonal_unit<R: Rng + ?Sized>(rng: &mut R, c: &[f64]) -> Option<Vec<f64>> {
    let dim = c.len();
    if dim < 2 {
        return None;
    }
    let cc = dot(c, c);
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if cc > 0.0 {
            let proj = dot(&v, c) / cc;
            axpy(-proj, c, &mut v);
            // second pass removes the residual left by cancellation
            let proj = dot(&v, c) / cc;
            axpy(-proj, c, &mut v);
        }
        let n = norm(&v);
        if n > 1e-8 {
            return Some(v.into_iter().map(|x| x / n).collect());
        }
    }
}
