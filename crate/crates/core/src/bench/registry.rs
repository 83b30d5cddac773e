//! Learner names accepted in experiment configs.

use serde::{Deserialize, Serialize};

use crate::combiners::{
    alpha_grid, base_learner_zoo, unknown_alpha_k_hints, DetCombiner, MonotoneBound, RandCombiner, ResetPolicy,
    ZooKind, ZooParams,
};
use crate::error::{Error, Result};
use crate::geometry::{CostVector, Decision, HintMatrix};
use crate::learner::{Learner, ZeroLearner};
use crate::multi_hint::{KHints, MwuHints, MwuLossRule};
use crate::single_hint::OneHint;
use crate::unconstrained::{ParameterFreeDd, UnconstrainedComposite};

pub const LEARNER_NAMES: [&str; 12] = [
    "one-hint",
    "k-hints",
    "mwu",
    "unknown-alpha",
    "det-combiner",
    "rand-combiner",
    "adaptive-ogd",
    "diagonal-adagrad",
    "p-norm-mirror-descent",
    "unconstrained",
    "parameter-free",
    "zero",
];

/// One `[[learners]]` entry.
///
/// Combiner members are zoo names with an optional parameter after a colon:
/// `adaptive-ogd:0.5` sets the step scale, `p-norm-mirror-descent:3` sets `q`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub kind: String,
    /// Column name in the output; defaults to `kind`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Defaults to the scenario's `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Hint column used by `one-hint` (default 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<usize>,
    /// `mwu` goodness test: `signed` (default) or `absolute`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    /// `rand-combiner` reset policy: `all-candidates` (default) or `chosen-only`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl LearnerSpec {
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            ..Default::default()
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.kind)
    }

    /// Checks names and options without building anything.
    pub fn validate(&self) -> Result<()> {
        if !LEARNER_NAMES.contains(&self.kind.as_str()) {
            return Err(Error::UnknownName {
                what: "learner",
                name: self.kind.clone(),
                options: LEARNER_NAMES.join(", "),
            });
        }
        if let Some(r) = &self.rule {
            parse_rule(r)?;
        }
        if let Some(p) = &self.policy {
            parse_policy(p)?;
        }
        for m in self.members.iter().flatten() {
            parse_member(m)?;
        }
        Ok(())
    }
}

const DEFAULT_MEMBERS: [&str; 2] = ["adaptive-ogd", "diagonal-adagrad"];

fn parse_rule(s: &str) -> Result<MwuLossRule> {
    match s {
        "signed" => Ok(MwuLossRule::SignedSquared),
        "absolute" => Ok(MwuLossRule::AbsoluteNorm),
        _ => Err(Error::UnknownName {
            what: "mwu rule",
            name: s.into(),
            options: "signed, absolute".into(),
        }),
    }
}

fn parse_policy(s: &str) -> Result<ResetPolicy> {
    match s {
        "all-candidates" => Ok(ResetPolicy::AllCandidates),
        "chosen-only" => Ok(ResetPolicy::ChosenOnly),
        _ => Err(Error::UnknownName {
            what: "reset policy",
            name: s.into(),
            options: "all-candidates, chosen-only".into(),
        }),
    }
}

fn parse_member(s: &str) -> Result<(ZooKind, ZooParams)> {
    let (name, param) = match s.split_once(':') {
        Some((n, p)) => {
            let v = p
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad member parameter in `{s}`: {e}")))?;
            (n.trim(), Some(v))
        }
        None => (s.trim(), None),
    };
    let kind: ZooKind = name.parse()?;
    let params = match kind {
        ZooKind::PNormMirrorDescent => ZooParams { scale: None, q: param },
        _ => ZooParams { scale: param, q: None },
    };
    Ok((kind, params))
}

/// What a learner is measured against.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundPlan {
    /// Single-hint guarantee on one hint column.
    OneHint { alpha: f64, column: usize },
    /// K-hint guarantee minimized over candidate blends.
    KHints { alpha: f64 },
    /// K-hint guarantee restricted to single sequences.
    Mwu { alpha: f64 },
    /// Randomized-combiner guarantee over the K-hint learners of an `α` grid.
    UnknownAlpha { grid: Vec<f64> },
    /// Combiner guarantee over the members' monotone bounds.
    Combiner { members: Vec<MonotoneBound> },
    Monotone(MonotoneBound),
    /// Unconstrained guarantee at `||u|| = 1`.
    Unconstrained { alpha: f64 },
    None,
}

/// Size of the problem a learner is built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemShape {
    pub dim: usize,
    pub k: usize,
    pub horizon: usize,
    /// Fallback `α` for learners that do not set one.
    pub alpha: f64,
}

/// Feeds one column of the hint matrix (or the zero hint when there are
/// none) to a single-hint learner.
struct HintColumn {
    inner: OneHint,
    column: usize,
}

impl Learner for HintColumn {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn observe_hints(&mut self, hints: &HintMatrix) -> Result<Decision> {
        if hints.k() == 0 {
            let zero = vec![0.0; self.dim()];
            return self.inner.observe_hint_vector(&zero);
        }
        if self.column >= hints.k() {
            return Err(Error::InvalidParameter(format!(
                "hint column {} requested but only {} hints",
                self.column,
                hints.k()
            )));
        }
        self.inner.observe_hint_vector(hints.column(self.column))
    }

    fn observe_cost(&mut self, cost: &CostVector) -> Result<()> {
        self.inner.observe_cost(cost)
    }

    fn reset(&mut self) {
        self.inner.reset()
    }
}

fn need_hints(kind: &str, k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidParameter(format!("learner `{kind}` needs a scenario with hints")))
    } else {
        Ok(())
    }
}

/// Builds a learner for `shape`. Randomized learners draw from
/// `stream_rng(seed, stream)`.
pub fn build_learner(spec: &LearnerSpec, shape: ProblemShape, seed: u64, stream: u64) -> Result<(Box<dyn Learner>, BoundPlan)> {
    spec.validate()?;
    let ProblemShape { dim, k, horizon, .. } = shape;
    let alpha = spec.alpha.unwrap_or(shape.alpha);
    let t = horizon.max(2);
    let zoo_params = ZooParams {
        scale: spec.scale,
        q: spec.q,
    };
    let members = || -> Result<Vec<(ZooKind, ZooParams)>> {
        match &spec.members {
            Some(m) if m.is_empty() => Err(Error::InvalidParameter("combiner needs at least one member".into())),
            Some(m) => m.iter().map(|s| parse_member(s)).collect(),
            None => DEFAULT_MEMBERS.iter().map(|s| parse_member(s)).collect(),
        }
    };
    let zoo = |members: Vec<(ZooKind, ZooParams)>| -> Result<(Vec<Box<dyn Learner>>, Vec<MonotoneBound>)> {
        let mut ls = Vec::new();
        let mut bs = Vec::new();
        for (kind, params) in members {
            let (l, b) = base_learner_zoo(kind, dim, params)?;
            ls.push(l);
            bs.push(b);
        }
        Ok((ls, bs))
    };
    Ok(match spec.kind.as_str() {
        "one-hint" => {
            let column = spec.hint.unwrap_or(0);
            if k > 0 && column >= k {
                return Err(Error::InvalidParameter(format!("hint column {column} but scenario has K = {k}")));
            }
            let inner = OneHint::new(dim, alpha, t)?;
            (Box::new(HintColumn { inner, column }), BoundPlan::OneHint { alpha, column })
        }
        "k-hints" => {
            need_hints(&spec.kind, k)?;
            (Box::new(KHints::new(dim, k, alpha, t)?), BoundPlan::KHints { alpha })
        }
        "mwu" => {
            need_hints(&spec.kind, k)?;
            let rule = spec.rule.as_deref().map(parse_rule).transpose()?.unwrap_or_default();
            let l = MwuHints::new(dim, k, alpha, t, seed, stream)?.with_rule(rule);
            (Box::new(l), BoundPlan::Mwu { alpha })
        }
        "unknown-alpha" => {
            need_hints(&spec.kind, k)?;
            let l = unknown_alpha_k_hints(dim, k, t, seed, stream)?;
            (Box::new(l), BoundPlan::UnknownAlpha { grid: alpha_grid(t)? })
        }
        "det-combiner" => {
            let (ls, bs) = zoo(members()?)?;
            (Box::new(DetCombiner::new(ls)?), BoundPlan::Combiner { members: bs })
        }
        "rand-combiner" => {
            let policy = spec.policy.as_deref().map(parse_policy).transpose()?.unwrap_or_default();
            let (ls, bs) = zoo(members()?)?;
            let l = RandCombiner::new(ls, seed, stream)?.with_policy(policy);
            (Box::new(l), BoundPlan::Combiner { members: bs })
        }
        "adaptive-ogd" | "diagonal-adagrad" | "p-norm-mirror-descent" => {
            let (l, b) = base_learner_zoo(spec.kind.parse()?, dim, zoo_params)?;
            (l, BoundPlan::Monotone(b))
        }
        "unconstrained" => {
            let eps = spec.epsilon.unwrap_or(UnconstrainedComposite::DEFAULT_EPSILON);
            (Box::new(UnconstrainedComposite::new(dim, k, eps)?), BoundPlan::Unconstrained { alpha })
        }
        "parameter-free" => {
            let eps = spec.epsilon.unwrap_or(UnconstrainedComposite::DEFAULT_EPSILON);
            (Box::new(ParameterFreeDd::new(dim, eps)?), BoundPlan::Unconstrained { alpha })
        }
        "zero" => (Box::new(ZeroLearner::new(dim)), BoundPlan::None),
        _ => unreachable!("validated above"),
    })
}
