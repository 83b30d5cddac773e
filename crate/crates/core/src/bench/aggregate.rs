use rand::Rng;
use serde::Serialize;

use crate::rng::stream_rng;

use super::run::ResultRow;

pub const BOOTSTRAP_RESAMPLES: usize = 2000;

/// Final-round statistics of one learner over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub learner: String,
    pub round: usize,
    pub trials: usize,
    pub mean: f64,
    pub median: f64,
    /// 95% percentile-bootstrap interval of the mean.
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_bound: f64,
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Percentile bootstrap of the mean, deterministic in `seed`.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, seed: u64) -> (f64, f64) {
    if values.len() < 2 {
        let m = values.first().copied().unwrap_or(f64::NAN);
        return (m, m);
    }
    let mut rng = stream_rng(seed, u64::MAX);
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let at = |q: f64| means[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    (at(0.025), at(0.975))
}

/// Summaries at each learner's last checkpoint, in first-appearance order.
pub fn summarize(rows: &[ResultRow], seed: u64) -> Vec<Summary> {
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.learner.as_str()) {
            order.push(&r.learner);
        }
    }
    order
        .into_iter()
        .map(|name| {
            let last = rows.iter().filter(|r| r.learner == name).map(|r| r.round).max().unwrap_or(0);
            let finals: Vec<&ResultRow> = rows.iter().filter(|r| r.learner == name && r.round == last).collect();
            let regrets: Vec<f64> = finals.iter().map(|r| r.regret).collect();
            let bounds: Vec<f64> = finals.iter().map(|r| r.bound).collect();
            let (ci_low, ci_high) = bootstrap_mean_ci(&regrets, BOOTSTRAP_RESAMPLES, seed);
            Summary {
                learner: name.to_string(),
                round: last,
                trials: regrets.len(),
                mean: mean(&regrets),
                median: median(&regrets),
                ci_low,
                ci_high,
                mean_bound: mean(&bounds),
            }
        })
        .collect()
}
