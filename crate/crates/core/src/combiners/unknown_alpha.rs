use crate::error::{Error, Result};
use crate::learner::Learner;
use crate::multi_hint::KHints;

use super::RandCombiner;

/// `α_i = 2^{-i}` for `i = 1..=ceil(log2 T)`.
pub fn alpha_grid(horizon: usize) -> Result<Vec<f64>> {
    if horizon < 2 {
        return Err(Error::InvalidParameter(format!(
            "unknown-alpha wrapper needs T >= 2, got {horizon}"
        )));
    }
    let n = (horizon as f64).log2().ceil() as i32;
    Ok((1..=n).map(|i| 2f64.powi(-i)).collect())
}

/// One learner per grid value of `α`, combined with the randomized combiner.
pub fn unknown_alpha_learner<F>(mut factory: F, horizon: usize, seed: u64, stream: u64) -> Result<RandCombiner>
where
    F: FnMut(f64) -> Result<Box<dyn Learner>>,
{
    let learners = alpha_grid(horizon)?
        .into_iter()
        .map(&mut factory)
        .collect::<Result<Vec<_>>>()?;
    RandCombiner::new(learners, seed, stream)
}

/// [`unknown_alpha_learner`] over K-Hints instances.
pub fn unknown_alpha_k_hints(dim: usize, k: usize, horizon: usize, seed: u64, stream: u64) -> Result<RandCombiner> {
    unknown_alpha_learner(
        |alpha| Ok(Box::new(KHints::new(dim, k, alpha, horizon)?) as Box<dyn Learner>),
        horizon,
        seed,
        stream,
    )
}
