//! Closed-form regret guarantees evaluated on scenario data.
//!
//! Explicit constants are used where the guarantee prints them (the
//! single-hint bound and the combiner bound). The K-hint and unconstrained
//! guarantees are stated up to a constant; those report the bracketed
//! expression with constant 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{dot, CostVector, HintMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremBound {
    /// `1/2 + 4 (sqrt(Σ_B ||c||^2) + ln T / α + 2 sqrt(ln T · N / α))`
    OneHint,
    /// `sqrt(ln T · Σ_B ||c||^2) + sqrt(ln T · N / α) + (ln T + sqrt(ln T ln K)) / α`
    KHints,
    /// `K (4 + 4 min_i R_i)`
    Combiner,
    /// `||u|| ln T (sqrt(ln K) / α + sqrt(|B| / α))`
    Unconstrained,
}

impl TheoremBound {
    pub const NAMES: [&'static str; 4] = ["one-hint", "k-hints", "combiner", "unconstrained"];
    pub const ALL: [TheoremBound; 4] = [Self::OneHint, Self::KHints, Self::Combiner, Self::Unconstrained];

    pub fn name(self) -> &'static str {
        match self {
            Self::OneHint => "one-hint",
            Self::KHints => "k-hints",
            Self::Combiner => "combiner",
            Self::Unconstrained => "unconstrained",
        }
    }
}

impl fmt::Display for TheoremBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownName {
                what: "theorem bound",
                name: s.to_string(),
                options: Self::NAMES.join(", "),
            })
    }
}

/// Quantities the guarantees depend on. Fields a bound does not use are
/// ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// `T`; real-valued so `ln T` can be anything. Values below 1 count as 1.
    pub horizon: f64,
    pub alpha: f64,
    pub k: usize,
    /// `Σ_{t ∈ B_α} ||c_t||^2`
    pub bad_sq_sum: f64,
    /// `|B_α|`
    pub bad_count: usize,
    /// `N = Σ_t max(0, -<c_t, h_t>)`
    pub neg_corr_sum: f64,
    /// `min_i R_i` over the combined learners.
    pub min_base_bound: f64,
    /// `||u||`
    pub comparator_norm: f64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            alpha: 1.0,
            k: 1,
            bad_sq_sum: 0.0,
            bad_count: 0,
            neg_corr_sum: 0.0,
            min_base_bound: 0.0,
            comparator_norm: 1.0,
        }
    }
}

impl BoundInputs {
    pub fn with_stats(self, stats: HintStats) -> Self {
        Self {
            bad_sq_sum: stats.bad_sq_sum,
            bad_count: stats.bad_count,
            neg_corr_sum: stats.neg_corr_sum,
            ..self
        }
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")))
    }
}

pub fn evaluate_theorem_bound(id: TheoremBound, x: &BoundInputs) -> Result<f64> {
    check_nonneg("bad_sq_sum", x.bad_sq_sum)?;
    check_nonneg("neg_corr_sum", x.neg_corr_sum)?;
    check_nonneg("min_base_bound", x.min_base_bound)?;
    check_nonneg("comparator_norm", x.comparator_norm)?;
    if id != TheoremBound::Combiner && !(x.alpha > 0.0 && x.alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {}", x.alpha)));
    }
    let log_t = x.horizon.max(1.0).ln();
    let log_k = (x.k.max(1) as f64).ln();
    Ok(match id {
        TheoremBound::OneHint => {
            0.5 + 4.0
                * (x.bad_sq_sum.sqrt()
                    + log_t / x.alpha
                    + 2.0 * (log_t * x.neg_corr_sum / x.alpha).sqrt())
        }
        TheoremBound::KHints => {
            (log_t * x.bad_sq_sum).sqrt()
                + (log_t * x.neg_corr_sum / x.alpha).sqrt()
                + (log_t + (log_t * log_k).sqrt()) / x.alpha
        }
        TheoremBound::Combiner => {
            if x.k == 0 {
                return Err(Error::InvalidParameter("combiner bound needs K >= 1".into()));
            }
            x.k as f64 * (4.0 + 4.0 * x.min_base_bound)
        }
        TheoremBound::Unconstrained => {
            x.comparator_norm * log_t * (log_k.sqrt() / x.alpha + (x.bad_count as f64 / x.alpha).sqrt())
        }
    })
}

/// Bad-step statistics of one hint sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HintStats {
    pub bad_sq_sum: f64,
    pub bad_count: usize,
    pub neg_corr_sum: f64,
}

/// Running [`HintStats`] of the fixed blend `H(w)` (`None` is the zero hint)
/// against costs multiplied by `scale`, snapshotted after each 1-based round
/// in `checkpoints` (increasing, at most `T`; 0 means before any round).
pub fn hint_stats_at(
    hints: &[HintMatrix],
    costs: &[CostVector],
    w: Option<&[f64]>,
    alpha: f64,
    scale: f64,
    checkpoints: &[usize],
) -> Result<Vec<HintStats>> {
    if hints.len() != costs.len() {
        return Err(Error::LengthMismatch(format!("{} hints vs {} costs", hints.len(), costs.len())));
    }
    if checkpoints.windows(2).any(|p| p[0] >= p[1]) || checkpoints.last().is_some_and(|&t| t > costs.len()) {
        return Err(Error::InvalidParameter(format!("bad checkpoints {checkpoints:?}")));
    }
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut acc = HintStats::default();
    let mut next = checkpoints.iter().peekable();
    while next.next_if_eq(&&0).is_some() {
        out.push(acc);
    }
    for (t, (h, c)) in hints.iter().zip(costs).enumerate() {
        if next.peek().is_none() {
            break;
        }
        let corr = match w {
            Some(w) => scale * dot(c.as_slice(), &h.blend(w)),
            None => 0.0,
        };
        let c_sq = scale * scale * c.norm_sq();
        if corr < alpha * c_sq {
            acc.bad_sq_sum += c_sq;
            acc.bad_count += 1;
        }
        acc.neg_corr_sum += (-corr).max(0.0);
        while next.peek() == Some(&&(t + 1)) {
            out.push(acc);
            next.next();
        }
    }
    Ok(out)
}

/// [`hint_stats_at`] over the whole sequence.
pub fn hint_stats(hints: &[HintMatrix], costs: &[CostVector], w: Option<&[f64]>, alpha: f64) -> Result<HintStats> {
    let t = costs.len();
    let v = hint_stats_at(hints, costs, w, alpha, 1.0, &[t])?;
    Ok(v.first().copied().unwrap_or_default())
}
