//! Browser bindings for the hintlearn demo page.
//!
//! Every export returns a JSON string so the page needs no generated type
//! glue. The `*_json` functions hold the logic and are what the native tests
//! call; the `#[wasm_bindgen]` wrappers only translate errors.

use rand::Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use hintlearn::adversaries::{ScenarioKind, ScenarioSpec};
use hintlearn::bench::{build_learner, LearnerSpec, ProblemShape};
use hintlearn::combiners::{base_learner_zoo, DetCombiner, RandCombiner, ZooKind, ZooParams};
use hintlearn::multi_hint::{smoothed_hinge, smoothed_hinge_grad};
use hintlearn::rng::stream_rng;
use hintlearn::sampling::random_unit;
use hintlearn::{run_learner, CostVector, Error, HintMatrix, Learner, Result};

/// Longest series sent to the page; trajectories are thinned to this many points.
pub const MAX_POINTS: usize = 512;
/// Upper limit on the horizon accepted from the page.
pub const MAX_HORIZON: usize = 1 << 16;

#[derive(Debug, Serialize)]
pub struct Curve {
    pub a: Vec<f64>,
    pub value: Vec<f64>,
    pub grad: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Series {
    pub label: String,
    pub regret: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Trajectories {
    pub rounds: Vec<usize>,
    pub series: Vec<Series>,
}

#[derive(Debug, Serialize)]
pub struct CombinerTrace {
    pub label: String,
    pub rounds: Vec<usize>,
    /// Outer-unit worst-case regret.
    pub regret: Vec<f64>,
    /// Doubling guess, in the combiner's halved cost units.
    pub gamma: Vec<f64>,
    pub active: Vec<usize>,
    pub switches: Vec<usize>,
}

fn check_horizon(t: usize) -> Result<()> {
    if t == 0 || t > MAX_HORIZON {
        return Err(Error::InvalidParameter(format!("T must be in 1..={MAX_HORIZON}, got {t}")));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Rounds at which a trajectory of length `t` is sampled: evenly spaced, always
/// ending at `t`.
pub fn sample_rounds(t: usize) -> Vec<usize> {
    if t <= MAX_POINTS {
        return (1..=t).collect();
    }
    (1..=MAX_POINTS).map(|i| (i * t).div_ceil(MAX_POINTS)).collect()
}

pub fn hinge_curve_json(b: f64, a_min: f64, a_max: f64, points: usize) -> Result<String> {
    if points < 2 || !(a_max > a_min) {
        return Err(Error::InvalidParameter("need points >= 2 and a_max > a_min".into()));
    }
    let a: Vec<f64> = (0..points)
        .map(|i| a_min + (a_max - a_min) * i as f64 / (points - 1) as f64)
        .collect();
    let value = a.iter().map(|&x| smoothed_hinge(x, b)).collect::<Result<_>>()?;
    let grad = a.iter().map(|&x| smoothed_hinge_grad(x, b)).collect::<Result<_>>()?;
    to_json(&Curve { a, value, grad })
}

/// Runs each learner named in the comma-separated `learners` on one scenario
/// and records its worst-case regret.
pub fn regret_trajectories_json(
    scenario: &str,
    horizon: usize,
    dim: usize,
    k: usize,
    alpha: f64,
    seed: u64,
    learners: &str,
) -> Result<String> {
    check_horizon(horizon)?;
    let kind: ScenarioKind = scenario.parse()?;
    let mut spec = ScenarioSpec::new(kind, horizon, dim, alpha, seed);
    spec.k = k;
    let s = spec.generate()?;
    let shape = ProblemShape {
        dim: s.dim(),
        k: s.k(),
        horizon: s.horizon(),
        alpha,
    };
    let rounds = sample_rounds(s.horizon());
    let mut series = Vec::new();
    for (i, name) in learners.split(',').map(str::trim).filter(|n| !n.is_empty()).enumerate() {
        let (mut l, _) = build_learner(&LearnerSpec::new(name), shape, seed, i as u64 + 1)?;
        let mut regret = Vec::with_capacity(rounds.len());
        let mut next = 0;
        run_learner(&mut l, &s.hints, &s.costs, |t, _, ledger| {
            if rounds.get(next) == Some(&t) {
                regret.push(ledger.worst_case_regret());
                next += 1;
            }
        })?;
        series.push(Series {
            label: name.to_string(),
            regret,
        });
    }
    if series.is_empty() {
        return Err(Error::InvalidParameter("no learners given".into()));
    }
    to_json(&Trajectories { rounds, series })
}

trait Traced: Learner {
    fn gamma(&self) -> f64;
    fn active(&self) -> usize;
    fn switch_rounds(&self) -> Vec<usize>;
}

impl Traced for DetCombiner {
    fn gamma(&self) -> f64 {
        DetCombiner::gamma(self)
    }
    fn active(&self) -> usize {
        DetCombiner::active(self)
    }
    fn switch_rounds(&self) -> Vec<usize> {
        self.events().iter().map(|e| e.round).collect()
    }
}

impl Traced for RandCombiner {
    fn gamma(&self) -> f64 {
        RandCombiner::gamma(self)
    }
    fn active(&self) -> usize {
        RandCombiner::active(self)
    }
    fn switch_rounds(&self) -> Vec<usize> {
        self.events().iter().map(|e| e.round).collect()
    }
}

fn trace<C: Traced>(label: &str, mut c: C, costs: &[CostVector]) -> Result<CombinerTrace> {
    let rounds = sample_rounds(costs.len());
    let empty = HintMatrix::empty(c.dim());
    let mut out = CombinerTrace {
        label: label.to_string(),
        rounds: rounds.clone(),
        regret: Vec::new(),
        gamma: Vec::new(),
        active: Vec::new(),
        switches: Vec::new(),
    };
    let mut ledger = hintlearn::RegretLedger::new(c.dim());
    let mut next = 0;
    for (t, cost) in costs.iter().enumerate() {
        let x = c.observe_hints(&empty)?;
        c.observe_cost(cost)?;
        ledger.record(x.as_slice(), cost.as_slice())?;
        if rounds.get(next) == Some(&(t + 1)) {
            out.regret.push(ledger.worst_case_regret());
            out.gamma.push(c.gamma());
            out.active.push(c.active());
            next += 1;
        }
    }
    out.switches = c.switch_rounds();
    Ok(out)
}

/// Deterministic and randomized combiners over adaptive OGD at staggered
/// step scales plus diagonal AdaGrad, on sparse (`±e_j`) or dense (uniform
/// unit) costs in dimension 8.
pub fn combiner_trace_json(horizon: usize, seed: u64, sparse: bool) -> Result<String> {
    check_horizon(horizon)?;
    let d = 8;
    let mut rng = stream_rng(seed, 0);
    let costs = (0..horizon)
        .map(|_| {
            if sparse {
                let mut c = vec![0.0; d];
                c[rng.gen_range(0..d)] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                CostVector::new(c)
            } else {
                CostVector::new(random_unit(&mut rng, d))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let members = || -> Result<Vec<Box<dyn Learner>>> {
        let mut v = Vec::new();
        for s in [0.25, 1.0, 4.0] {
            let params = ZooParams { scale: Some(s), q: None };
            v.push(base_learner_zoo(ZooKind::AdaptiveOgd, d, params)?.0);
        }
        v.push(base_learner_zoo(ZooKind::DiagonalAdagrad, d, ZooParams::default())?.0);
        Ok(v)
    };
    let traces = vec![
        trace("det-combiner", DetCombiner::new(members()?)?, &costs)?,
        trace("rand-combiner", RandCombiner::new(members()?, seed, 1)?, &costs)?,
    ];
    to_json(&traces)
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = hingeCurve)]
pub fn hinge_curve(b: f64, a_min: f64, a_max: f64, points: usize) -> std::result::Result<String, JsError> {
    js(hinge_curve_json(b, a_min, a_max, points))
}

#[wasm_bindgen(js_name = regretTrajectories)]
pub fn regret_trajectories(
    scenario: &str,
    horizon: usize,
    dim: usize,
    k: usize,
    alpha: f64,
    seed: u32,
    learners: &str,
) -> std::result::Result<String, JsError> {
    js(regret_trajectories_json(scenario, horizon, dim, k, alpha, seed as u64, learners))
}

#[wasm_bindgen(js_name = combinerTrace)]
pub fn combiner_trace(horizon: usize, seed: u32, sparse: bool) -> std::result::Result<String, JsError> {
    js(combiner_trace_json(horizon, seed as u64, sparse))
}
