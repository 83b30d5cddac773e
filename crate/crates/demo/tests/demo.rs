use serde_json::Value;

use hintlearn_demo::{combiner_trace_json, hinge_curve_json, regret_trajectories_json, sample_rounds, MAX_POINTS};

#[test]
fn hinge_curve_matches_branches() {
    let v: Value = serde_json::from_str(&hinge_curve_json(0.5, -1.0, 1.0, 5).unwrap()).unwrap();
    let a: Vec<f64> = serde_json::from_value(v["a"].clone()).unwrap();
    let value: Vec<f64> = serde_json::from_value(v["value"].clone()).unwrap();
    let grad: Vec<f64> = serde_json::from_value(v["grad"].clone()).unwrap();
    assert_eq!(a, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    // b - 2a below zero, (b - a)^2 / b on [0, b], zero above b
    assert_eq!(value, vec![2.5, 1.5, 0.5, 0.0, 0.0]);
    assert_eq!(grad, vec![-2.0, -2.0, -2.0, 0.0, 0.0]);
    assert!(hinge_curve_json(-0.1, -1.0, 1.0, 5).is_err());
    assert!(hinge_curve_json(0.5, 1.0, 1.0, 5).is_err());
}

#[test]
fn sampled_rounds_end_at_horizon() {
    assert_eq!(sample_rounds(3), vec![1, 2, 3]);
    let r = sample_rounds(5000);
    assert_eq!(r.len(), MAX_POINTS);
    assert_eq!(*r.last().unwrap(), 5000);
    assert!(r.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn trajectories_have_one_series_per_learner() {
    let json = regret_trajectories_json("correlated", 700, 3, 2, 0.25, 4, "k-hints, mwu,zero").unwrap();
    let v: Value = serde_json::from_str(&json).unwrap();
    let rounds = v["rounds"].as_array().unwrap();
    assert_eq!(rounds.len(), MAX_POINTS);
    let series = v["series"].as_array().unwrap();
    assert_eq!(series.len(), 3);
    assert_eq!(series[2]["label"], "zero");
    for s in series {
        assert_eq!(s["regret"].as_array().unwrap().len(), rounds.len());
    }
    // the origin's worst-case regret is ||sum c||, never negative
    assert!(series[2]["regret"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() >= 0.0));
    assert_eq!(json, regret_trajectories_json("correlated", 700, 3, 2, 0.25, 4, "k-hints, mwu,zero").unwrap());
}

#[test]
fn trajectories_reject_bad_input() {
    assert!(regret_trajectories_json("nope", 10, 3, 1, 0.25, 0, "mwu").is_err());
    assert!(regret_trajectories_json("correlated", 0, 3, 1, 0.25, 0, "mwu").is_err());
    assert!(regret_trajectories_json("correlated", 10, 3, 1, 0.25, 0, " ").is_err());
    assert!(regret_trajectories_json("correlated", 10, 3, 1, 0.25, 0, "bogus").is_err());
}

#[test]
fn combiner_trace_shapes() {
    for sparse in [true, false] {
        let v: Value = serde_json::from_str(&combiner_trace_json(300, 2, sparse).unwrap()).unwrap();
        let traces = v.as_array().unwrap();
        assert_eq!(traces.len(), 2);
        for t in traces {
            let n = t["rounds"].as_array().unwrap().len();
            assert_eq!(n, 300);
            assert_eq!(t["gamma"].as_array().unwrap().len(), n);
            assert!(t["active"].as_array().unwrap().iter().all(|a| a.as_u64().unwrap() < 4));
            let g: Vec<f64> = serde_json::from_value(t["gamma"].clone()).unwrap();
            assert!(g.windows(2).all(|w| w[0] <= w[1]), "guesses only double");
        }
    }
}
