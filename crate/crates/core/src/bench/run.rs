use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::adversaries::Scenario;
use crate::combiners::MonotoneBound;
use crate::error::{Error, Result};
use crate::geometry::CostVector;
use crate::learner::{run_learner, Learner};
use crate::rng::{trial_seed, PRNG_ID};

use super::aggregate::{summarize, Summary};
use super::bounds::{evaluate_theorem_bound, hint_stats_at, BoundInputs, TheoremBound};
use super::config::ExperimentConfig;
use super::registry::{build_learner, BoundPlan, ProblemShape};

pub const CSV_COLUMNS: [&str; 6] = ["trial", "round", "learner", "worst_case_regret", "bound", "ratio"];

/// Blends tried for the `inf_w` in the hint guarantees: every vertex (when
/// `K` is at most this), the uniform blend and the scenario's witness.
pub const MAX_VERTEX_CANDIDATES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub trial: usize,
    /// 1-based.
    pub round: usize,
    pub learner: String,
    pub regret: f64,
    pub bound: f64,
    /// `regret / bound` when `bound > 0`.
    pub ratio: Option<f64>,
}

/// Powers of two up to `T`, then `T`.
pub fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::successors(Some(1usize), |p| p.checked_mul(2))
        .take_while(|&p| p <= horizon)
        .collect();
    if v.last() != Some(&horizon) && horizon > 0 {
        v.push(horizon);
    }
    v
}

/// Worst-case regret of `learner` after each checkpoint round.
pub fn play(learner: &mut dyn Learner, scenario: &Scenario, checkpoints: &[usize]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    run_learner(learner, &scenario.hints, &scenario.costs, |t, _, ledger| {
        if next < checkpoints.len() && checkpoints[next] == t {
            out.push(ledger.worst_case_regret());
            next += 1;
        }
    })?;
    Ok(out)
}

fn candidate_blends(s: &Scenario, vertices: bool, extras: bool) -> Vec<Option<Vec<f64>>> {
    let k = s.k();
    if k == 0 {
        return vec![None];
    }
    let mut out = Vec::new();
    if vertices && k <= MAX_VERTEX_CANDIDATES {
        for i in 0..k {
            let mut e = vec![0.0; k];
            e[i] = 1.0;
            out.push(Some(e));
        }
    }
    if extras || out.is_empty() {
        out.push(Some(vec![1.0 / k as f64; k]));
        if let Some(w) = s.witness.as_ref().filter(|w| w.len() == k) {
            out.push(Some(w.clone()));
        }
    }
    out
}

/// Pointwise minimum over blends of a hint guarantee at each checkpoint.
fn min_over_blends(
    s: &Scenario,
    blends: &[Option<Vec<f64>>],
    alpha: f64,
    scale: f64,
    checkpoints: &[usize],
    bound: impl Fn(BoundInputs) -> Result<f64>,
    base: BoundInputs,
) -> Result<Vec<f64>> {
    let mut best = vec![f64::INFINITY; checkpoints.len()];
    for w in blends {
        let stats = hint_stats_at(&s.hints, &s.costs, w.as_deref(), alpha, scale, checkpoints)?;
        for (b, st) in best.iter_mut().zip(stats) {
            *b = b.min(bound(base.with_stats(st))?);
        }
    }
    Ok(best)
}

/// Guarantee of `plan` after each checkpoint; `horizon` is the `T` the
/// learner was built with.
pub fn plan_bounds(plan: &BoundPlan, s: &Scenario, horizon: usize, checkpoints: &[usize]) -> Result<Vec<f64>> {
    let base = BoundInputs {
        horizon: horizon.max(2) as f64,
        k: s.k(),
        ..Default::default()
    };
    let halved = || -> Vec<CostVector> { s.costs.iter().map(|c| c.scaled(0.5)).collect() };
    match plan {
        BoundPlan::OneHint { alpha, column } => {
            let w = (s.k() > 0).then(|| {
                let mut e = vec![0.0; s.k()];
                e[*column] = 1.0;
                e
            });
            let base = BoundInputs { alpha: *alpha, ..base };
            min_over_blends(s, &[w], *alpha, 1.0, checkpoints, |x| evaluate_theorem_bound(TheoremBound::OneHint, &x), base)
        }
        BoundPlan::KHints { alpha } | BoundPlan::Mwu { alpha } => {
            let extras = matches!(plan, BoundPlan::KHints { .. });
            let blends = candidate_blends(s, true, extras);
            let base = BoundInputs { alpha: *alpha, ..base };
            min_over_blends(s, &blends, *alpha, 1.0, checkpoints, |x| evaluate_theorem_bound(TheoremBound::KHints, &x), base)
        }
        BoundPlan::UnknownAlpha { grid } => {
            let blends = candidate_blends(s, true, true);
            let mut inner = vec![f64::INFINITY; checkpoints.len()];
            for &alpha in grid {
                let b = BoundInputs { alpha, ..base };
                let v = min_over_blends(s, &blends, alpha, 0.5, checkpoints, |x| evaluate_theorem_bound(TheoremBound::KHints, &x), b)?;
                inner.iter_mut().zip(v).for_each(|(a, b)| *a = a.min(b));
            }
            let factor = ((grid.len() + 1) as f64).log2();
            Ok(inner.into_iter().map(|m| 2.0 * factor * (4.0 + 4.0 * m)).collect())
        }
        BoundPlan::Combiner { members } => {
            let h = halved();
            checkpoints
                .iter()
                .map(|&t| {
                    let min = members.iter().map(|b| b.evaluate(&h[..t])).fold(f64::INFINITY, f64::min);
                    let x = BoundInputs {
                        k: members.len(),
                        min_base_bound: min,
                        ..base
                    };
                    Ok(2.0 * evaluate_theorem_bound(TheoremBound::Combiner, &x)?)
                })
                .collect()
        }
        BoundPlan::Monotone(b) => Ok(checkpoints.iter().map(|&t| b.evaluate(&s.costs[..t])).collect()),
        BoundPlan::Unconstrained { alpha } => {
            let blends = candidate_blends(s, true, true);
            let base = BoundInputs { alpha: *alpha, ..base };
            min_over_blends(s, &blends, *alpha, 1.0, checkpoints, |x| evaluate_theorem_bound(TheoremBound::Unconstrained, &x), base)
        }
        BoundPlan::None => Ok(vec![0.0; checkpoints.len()]),
    }
}

fn trial_scenario(cfg: &ExperimentConfig, trial: usize) -> Result<(u64, Scenario)> {
    let seed = trial_seed(cfg.seed ^ cfg.scenario.seed, trial as u64);
    Ok((seed, cfg.scenario.with_seed(seed).generate()?))
}

/// Rows of one trial, ordered by learner then round.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Vec<ResultRow>> {
    let (seed, scenario) = trial_scenario(cfg, trial)?;
    let horizon = scenario.horizon();
    let shape = ProblemShape {
        dim: scenario.costs.first().map_or(cfg.scenario.d, CostVector::dim),
        k: scenario.k(),
        horizon,
        alpha: cfg.scenario.alpha,
    };
    let cps = checkpoints(horizon);
    let mut rows = Vec::new();
    for (i, spec) in cfg.learners.iter().enumerate() {
        let (mut learner, plan) = build_learner(spec, shape, seed, i as u64 + 1)?;
        let regrets = play(&mut learner, &scenario, &cps)?;
        let bounds = plan_bounds(&plan, &scenario, horizon, &cps)?;
        for ((&round, regret), bound) in cps.iter().zip(regrets).zip(bounds) {
            rows.push(ResultRow {
                trial,
                round,
                learner: spec.label().to_string(),
                regret,
                bound,
                ratio: (bound > 0.0).then(|| regret / bound),
            });
        }
    }
    Ok(rows)
}

/// Runs every trial (in parallel) and returns rows ordered by trial, learner
/// and round. Failures while setting up the first trial are reported as
/// config errors.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let first = run_trial(cfg, 0).map_err(|e| match e {
        Error::Config(_) | Error::UnknownName { .. } => e,
        other => Error::Config(other.to_string()),
    })?;
    let rest: Vec<Vec<ResultRow>> = (1..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<_>>()?;
    let mut rows = first;
    rows.extend(rest.into_iter().flatten());
    Ok(rows)
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.round.to_string(),
            r.learner.clone(),
            fmt_f64(r.regret),
            fmt_f64(r.bound),
            r.ratio.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Contents of the JSON sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub prng: &'static str,
    pub config_sha256: String,
    pub columns: [&'static str; 6],
    pub trials: usize,
    pub seed: u64,
    pub scenario: String,
    pub horizon: usize,
    pub learners: Vec<String>,
    pub summary: Vec<Summary>,
}

pub fn metadata(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Metadata {
    Metadata {
        version: env!("CARGO_PKG_VERSION"),
        prng: PRNG_ID,
        config_sha256: cfg.hash(),
        columns: CSV_COLUMNS,
        trials: cfg.trials,
        seed: cfg.seed,
        scenario: cfg.scenario.kind.to_string(),
        horizon: cfg.scenario.horizon,
        learners: cfg.learners.iter().map(|l| l.label().to_string()).collect(),
        summary: summarize(rows, cfg.seed),
    }
}

pub fn write_metadata<W: Write>(meta: &Metadata, mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, meta).map_err(|e| Error::Io(e.into()))?;
    writeln!(writer)?;
    Ok(())
}

/// Combiner guarantee over a whole sequence, in unhalved cost units:
/// `2 K (4 + 4 min_i R_i(c / 2))`.
pub fn combiner_bound(members: &[MonotoneBound], costs: &[CostVector]) -> Result<f64> {
    let halved: Vec<CostVector> = costs.iter().map(|c| c.scaled(0.5)).collect();
    let min = members.iter().map(|b| b.evaluate(&halved)).fold(f64::INFINITY, f64::min);
    let x = BoundInputs {
        k: members.len(),
        min_base_bound: min,
        ..Default::default()
    };
    Ok(2.0 * evaluate_theorem_bound(TheoremBound::Combiner, &x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{ScenarioKind, ScenarioSpec};
    use crate::bench::registry::LearnerSpec;
    use crate::ledger::RegretLedger;

    fn config(kind: ScenarioKind, t: usize, trials: usize, learners: &[&str]) -> ExperimentConfig {
        ExperimentConfig {
            trials,
            seed: 11,
            scenario: ScenarioSpec::new(kind, t, 3, 0.25, 0),
            learners: learners.iter().map(|n| LearnerSpec::new(n)).collect(),
            output: Default::default(),
        }
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(1), vec![1]);
        assert_eq!(checkpoints(8), vec![1, 2, 4, 8]);
        assert_eq!(checkpoints(10), vec![1, 2, 4, 8, 10]);
        assert!(checkpoints(0).is_empty());
    }

    #[test]
    fn one_row_per_learner_at_t1() {
        let cfg = config(ScenarioKind::Correlated, 1, 1, &["one-hint", "k-hints", "zero"]);
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.round == 1));
    }

    #[test]
    fn rows_are_ordered_and_ratios_consistent() {
        let cfg = config(ScenarioKind::ComplementaryPair, 40, 3, &["k-hints", "mwu", "det-combiner", "zero"]);
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 3 * 4 * checkpoints(40).len());
        let keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.trial, r.round)).collect();
        assert!(keys.windows(2).all(|p| p[0].0 <= p[1].0));
        for r in &rows {
            match r.ratio {
                Some(q) => assert_eq!(q, r.regret / r.bound),
                None => assert!(r.bound <= 0.0),
            }
        }
    }

    #[test]
    fn csv_is_byte_identical_across_runs() {
        let cfg = config(ScenarioKind::Correlated, 64, 4, &["one-hint", "unknown-alpha", "rand-combiner"]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_experiment(&cfg).unwrap(), &mut a).unwrap();
        write_csv(&run_experiment(&cfg).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with("trial,round,learner,worst_case_regret,bound,ratio\n"));
    }

    #[test]
    fn regrets_match_an_independent_ledger() {
        let cfg = config(ScenarioKind::Correlated, 100, 2, &["k-hints", "mwu"]);
        let rows = run_experiment(&cfg).unwrap();
        for trial in 0..2 {
            let (seed, s) = trial_scenario(&cfg, trial).unwrap();
            let shape = ProblemShape { dim: 3, k: 1, horizon: 100, alpha: 0.25 };
            for (i, spec) in cfg.learners.iter().enumerate() {
                let (mut l, _) = build_learner(spec, shape, seed, i as u64 + 1).unwrap();
                let mut ledger = RegretLedger::new(3);
                for (h, c) in s.hints.iter().zip(&s.costs) {
                    let x = l.observe_hints(h).unwrap();
                    l.observe_cost(c).unwrap();
                    ledger.record(x.as_slice(), c.as_slice()).unwrap();
                }
                let row = rows.iter().find(|r| r.trial == trial && r.learner == spec.kind && r.round == 100).unwrap();
                assert_eq!(row.regret, ledger.worst_case_regret());
            }
        }
    }

    #[test]
    fn setup_failures_are_config_errors() {
        let cfg = config(ScenarioKind::RandomSigns, 16, 1, &["k-hints"]);
        assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn metadata_fields() {
        let cfg = config(ScenarioKind::Correlated, 16, 3, &["one-hint"]);
        let rows = run_experiment(&cfg).unwrap();
        let meta = metadata(&cfg, &rows);
        let mut buf = Vec::new();
        write_metadata(&meta, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["prng"], PRNG_ID);
        assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
        assert_eq!(v["summary"][0]["trials"], 3);
        assert_eq!(v["summary"][0]["round"], 16);
    }
}
