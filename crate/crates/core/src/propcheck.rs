//! Randomized property suites that can run outside `cargo test`, e.g. from
//! the command line against a release build.

use rand::Rng;

use crate::adversaries::{gen_logk_lower, ScenarioKind, ScenarioSpec};
use crate::bench::combiner_bound;
use crate::combiners::{zoo::AdaptiveOgd, zoo::DiagonalAdagrad, DetCombiner, RandCombiner};
use crate::geometry::{dot, norm, project_to_ball, CostVector, HintMatrix};
use crate::learner::{run_learner, Learner};
use crate::ledger::RegretLedger;
use crate::multi_hint::{bad_step_set, random_simplex, simplex_loss, smoothed_hinge, FtrlSimplex, KHints};
use crate::rng::{stream_rng, StreamRng};
use crate::sampling::{random_in_ball, random_unit};
use crate::single_hint::{solve_lambda, OneHint};
use crate::unconstrained::KtBettor;

/// Result of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// First counterexample, if any.
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type Check = fn(&mut StreamRng, usize) -> Result<(), String>;

const SUITES: [(&str, Check); 12] = [
    ("smoothed-hinge", hinge_props),
    ("lambda-fixed-point", lambda_props),
    ("ftrl-simplex", ftrl_props),
    ("bad-step-monotone", bad_step_props),
    ("one-hint-feasible", one_hint_props),
    ("k-hints-feasible", k_hints_props),
    ("ledger-closed-form", ledger_props),
    ("projection", projection_props),
    ("det-combiner-bound", det_combiner_props),
    ("rand-combiner-candidates", rand_combiner_props),
    ("kt-wealth", kt_props),
    ("generators", generator_props),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Runs every suite; `cases` is the number of random draws for the cheap
/// suites (the sequence-level ones use a fixed fraction of it).
pub fn run_all(seed: u64, cases: usize) -> Vec<CheckOutcome> {
    SUITES
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = stream_rng(seed, 1000 + i as u64);
            CheckOutcome {
                name,
                cases,
                failure: check(&mut rng, cases).err(),
            }
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_instance(rng: &mut StreamRng, d: usize, k: usize) -> (CostVector, HintMatrix) {
    let c = CostVector::new(random_in_ball(rng, d)).expect("in ball");
    let cols = (0..k).map(|_| random_in_ball(rng, d)).collect();
    (c, HintMatrix::new(d, cols).expect("in ball"))
}

fn hinge_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..cases {
        let b: f64 = rng.gen_range(0.0..1.0);
        let (a1, a2): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let l1 = smoothed_hinge(a1, b).map_err(err)?;
        let l2 = smoothed_hinge(a2, b).map_err(err)?;
        let mid = smoothed_hinge(0.5 * (a1 + a2), b).map_err(err)?;
        ensure(l1 >= 0.0 && mid <= 0.5 * (l1 + l2) + 1e-12, || format!("convexity at a={a1},{a2} b={b}"))?;

        let d = rng.gen_range(1..6);
        let k = rng.gen_range(1..5);
        let alpha: f64 = rng.gen_range(0.01..1.0);
        let (c, h) = random_instance(rng, d, k);
        let w = random_simplex(rng, k);
        let w2 = random_simplex(rng, k);
        let a = dot(c.as_slice(), &h.blend(&w));
        let bb = alpha * c.norm_sq();
        let l = simplex_loss(&w, c.as_slice(), &h, alpha).map_err(err)?;
        let l2 = simplex_loss(&w2, c.as_slice(), &h, alpha).map_err(err)?;
        if a >= bb {
            ensure(l.value == 0.0 && l.grad.iter().all(|g| *g == 0.0), || format!("good blend has loss {l:?}"))?;
        }
        if a < bb / 2.0 {
            ensure(l.value >= bb / 4.0, || format!("loss {} below b/4 = {}", l.value, bb / 4.0))?;
        }
        let l1_dist: f64 = w.iter().zip(&w2).map(|(x, y)| (x - y).abs()).sum();
        ensure((l.value - l2.value).abs() <= 2.0 * l1_dist + 1e-12, || "Lipschitz in w".into())?;
        let ginf = l.grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        ensure(ginf * ginf <= 4.0 / alpha * l.value + 1e-9, || format!("self-bounding gradient {ginf} vs loss {}", l.value))?;
        ensure(l.value <= bb + 2.0 * (-a).max(0.0) + 1e-12, || "upper bound by b + 2 max(0, -a)".into())?;
    }
    Ok(())
}

fn lambda_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..cases {
        let s = 10f64.powf(rng.gen_range(-6.0..6.0));
        let c: f64 = rng.gen_range(0.0..1.0);
        let l = solve_lambda(s, c).map_err(err)?;
        ensure(l >= 0.0 && (l * (s + l) - c).abs() <= 1e-9, || format!("residual at S={s}, c={c}"))?;
    }
    Ok(())
}

fn ftrl_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..cases / 10 {
        let k = rng.gen_range(2..8);
        let g: Vec<f64> = (0..k).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let f = FtrlSimplex::from_parts(g, rng.gen_range(0.0..100.0)).map_err(err)?;
        let w = f.weights();
        ensure(w.iter().all(|x| *x > 0.0) && (w.iter().sum::<f64>() - 1.0).abs() <= 1e-9, || format!("{w:?}"))?;
        let best = f.objective(&w);
        for _ in 0..20 {
            let v = random_simplex(rng, k);
            ensure(best <= f.objective(&v) + 1e-9, || "random point beats the closed form".into())?;
        }
    }
    Ok(())
}

fn bad_step_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..cases / 100 {
        let d = rng.gen_range(1..5);
        let costs: Vec<CostVector> = (0..50).map(|_| CostVector::new(random_in_ball(rng, d)).unwrap()).collect();
        let hints: Vec<Vec<f64>> = (0..50).map(|_| random_in_ball(rng, d)).collect();
        let a1: f64 = rng.gen_range(0.0..1.0);
        let a2: f64 = rng.gen_range(0.0..1.0);
        let (lo, hi) = (a1.min(a2), a1.max(a2));
        let s_lo = bad_step_set(&hints, &costs, lo).map_err(err)?;
        let s_hi = bad_step_set(&hints, &costs, hi).map_err(err)?;
        ensure(s_lo.is_subset(&s_hi), || format!("B at {lo} not inside B at {hi}"))?;
    }
    Ok(())
}

fn feasibility(l: &mut dyn Learner, rng: &mut StreamRng, rounds: usize, k: usize) -> Result<(), String> {
    let d = l.dim();
    for _ in 0..rounds {
        let (c, h) = random_instance(rng, d, k);
        let x = l.observe_hints(&h).map_err(err)?;
        ensure(x.norm() <= 1.0 + 1e-9, || format!("decision norm {}", x.norm()))?;
        l.observe_cost(&c).map_err(err)?;
    }
    Ok(())
}

fn one_hint_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    let mut l = OneHint::new(4, 0.3, cases.max(2)).map_err(err)?;
    feasibility(&mut l, rng, cases, 1)
}

fn k_hints_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    let mut l = KHints::new(3, 4, 0.3, cases.max(2)).map_err(err)?;
    feasibility(&mut l, rng, cases / 2, 4)
}

fn ledger_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..cases / 100 {
        let d = rng.gen_range(1..6);
        let mut ledger = RegretLedger::new(d);
        for _ in 0..20 {
            ledger.record(&random_in_ball(rng, d), &random_in_ball(rng, d)).map_err(err)?;
        }
        let worst = ledger.worst_case_regret();
        let at = ledger.regret_vs_comparator(&ledger.worst_comparator()).map_err(err)?;
        ensure((worst - at).abs() <= 1e-9, || "worst comparator does not attain the sup".into())?;
        for _ in 0..20 {
            let u = random_in_ball(rng, d);
            ensure(ledger.regret_vs_comparator(&u).map_err(err)? <= worst + 1e-9, || "comparator beats the sup".into())?;
        }
    }
    Ok(())
}

fn projection_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..cases {
        let d = rng.gen_range(1..8);
        let scale = rng.gen_range(0.0..3.0);
        let v: Vec<f64> = random_unit(rng, d).into_iter().map(|x| x * scale).collect();
        let p = project_to_ball(&v).map_err(err)?;
        ensure(p.norm() <= 1.0 + 1e-12, || "projection left the ball".into())?;
        let again = project_to_ball(p.as_slice()).map_err(err)?;
        let moved = again.as_slice().iter().zip(p.as_slice()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        ensure(moved <= 1e-15, || format!("projection not idempotent (moved {moved})"))?;
        if norm(&v) <= 1.0 {
            ensure(p.as_slice() == v.as_slice(), || "projection moved an interior point".into())?;
        }
    }
    Ok(())
}

fn cost_stream(rng: &mut StreamRng, t: usize, d: usize) -> Vec<CostVector> {
    let drift = random_in_ball(rng, d);
    (0..t)
        .map(|_| {
            let n = random_unit(rng, d);
            let v: Vec<f64> = n.iter().zip(&drift).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
            CostVector::new(v).unwrap()
        })
        .collect()
}

fn det_combiner_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..(cases / 1000).max(1) {
        let d = rng.gen_range(1..6);
        let costs = cost_stream(rng, 512, d);
        let a = AdaptiveOgd::new(d);
        let b = DiagonalAdagrad::new(d);
        let bounds = [a.bound(), b.bound()];
        let mut comb = DetCombiner::new(vec![Box::new(a), Box::new(b)]).map_err(err)?;
        let hints = vec![HintMatrix::empty(d); costs.len()];
        let ledger = run_learner(&mut comb, &hints, &costs, |_, _, _| {}).map_err(err)?;
        let bound = combiner_bound(&bounds, &costs).map_err(err)?;
        ensure(ledger.worst_case_regret() <= bound, || format!("regret {} above {bound}", ledger.worst_case_regret()))?;
    }
    Ok(())
}

fn rand_combiner_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..(cases / 1000).max(1) {
        let d = rng.gen_range(1..4);
        let learners: Vec<Box<dyn Learner>> = (0..4)
            .map(|i| Box::new(AdaptiveOgd::with_scale(d, 0.25 * (i + 1) as f64).unwrap()) as Box<dyn Learner>)
            .collect();
        let mut comb = RandCombiner::new(learners, rng.gen(), 0).map_err(err)?;
        let h = HintMatrix::empty(d);
        for c in cost_stream(rng, 300, d) {
            comb.observe_hints(&h).map_err(err)?;
            comb.observe_cost(&c).map_err(err)?;
            ensure(comb.candidates().contains(&comb.active()), || "active learner evicted".into())?;
            for j in comb.candidates() {
                ensure(comb.tracked_regret(j) <= comb.gamma(), || format!("candidate {j} above gamma"))?;
            }
        }
    }
    Ok(())
}

fn kt_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..(cases / 100).max(1) {
        let eps = rng.gen_range(0.1..2.0);
        let mut kt = KtBettor::new(eps).map_err(err)?;
        let mut won = 0.0;
        for _ in 0..100 {
            let g: f64 = rng.gen_range(-1.0..1.0);
            won += g * kt.predict();
            kt.update(g).map_err(err)?;
            ensure(kt.wealth() > 0.0, || "wealth hit zero".into())?;
        }
        ensure((kt.wealth() - (eps - won)).abs() <= 1e-9 * (1.0 + kt.wealth()), || "wealth identity".into())?;
        ensure(won < eps, || "lost more than the initial wealth".into())?;
    }
    Ok(())
}

fn generator_props(rng: &mut StreamRng, cases: usize) -> Result<(), String> {
    for _ in 0..(cases / 1000).max(1) {
        let seed: u64 = rng.gen();
        for kind in ScenarioKind::ALL {
            let mut spec = ScenarioSpec::new(kind, 32, 3, 0.25, seed);
            spec.bad_fraction = 0.25;
            let s = spec.generate().map_err(err)?;
            ensure(s == spec.generate().map_err(err)?, || format!("{kind} not deterministic"))?;
            for (c, h) in s.costs.iter().zip(&s.hints) {
                ensure(c.norm_sq() <= 1.0 + 1e-12, || format!("{kind} cost outside the ball"))?;
                ensure(h.columns().all(|col| norm(col) <= 1.0 + 1e-12), || format!("{kind} hint outside the ball"))?;
            }
        }
        let s = gen_logk_lower(16, 0.25, seed).map_err(err)?;
        let w = s.witness.clone().ok_or("missing witness")?;
        for (h, c) in s.hints.iter().zip(&s.costs) {
            ensure(dot(c.as_slice(), &h.blend(&w)) == 0.25, || "witness correlation".into())?;
        }
    }
    Ok(())
}
