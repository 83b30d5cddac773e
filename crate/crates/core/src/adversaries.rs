//! Seeded cost/hint generators, including the lower-bound constructions.
//!
//! Every generator draws from `stream_rng(seed, SCENARIO_STREAM)`, so a
//! [`ScenarioSpec`] regenerates bit-identically.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{axpy, dot, norm_sq, CostVector, HintMatrix};
use crate::rng::{stream_rng, SCENARIO_STREAM};
use crate::sampling::{orthogonal_unit, random_unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Correlated,
    LogkLower,
    AlphaLower,
    ComplementaryPair,
    RandomSigns,
}

impl ScenarioKind {
    pub const NAMES: [&'static str; 5] = [
        "correlated",
        "logk-lower",
        "alpha-lower",
        "complementary-pair",
        "random-signs",
    ];

    pub const ALL: [ScenarioKind; 5] = [
        Self::Correlated,
        Self::LogkLower,
        Self::AlphaLower,
        Self::ComplementaryPair,
        Self::RandomSigns,
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[Self::ALL.iter().position(|k| *k == self).expect("listed")]
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName {
                what: "scenario",
                name: s.to_string(),
                options: Self::NAMES.join(", "),
            })
    }
}

/// Generation parameters. Fields a kind does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(default = "default_dim")]
    pub d: usize,
    /// Number of hint sequences for `correlated` (column 0 is the correlated
    /// one, the rest are uninformative random directions).
    #[serde(default = "default_k", rename = "K")]
    pub k: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Fraction of rounds drawn (without replacement) as bad rounds.
    #[serde(default)]
    pub bad_fraction: f64,
    /// Explicit 0-based bad rounds; overrides `bad_fraction`.
    #[serde(default)]
    pub bad_set: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
}

fn default_dim() -> usize {
    4
}

fn default_k() -> usize {
    1
}

fn default_alpha() -> f64 {
    0.5
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, horizon: usize, d: usize, alpha: f64, seed: u64) -> Self {
        Self {
            kind,
            horizon,
            d,
            k: 1,
            alpha,
            bad_fraction: 0.0,
            bad_set: None,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn generate(&self) -> Result<Scenario> {
        match self.kind {
            ScenarioKind::Correlated => gen_correlated(self),
            ScenarioKind::LogkLower => gen_logk_lower(self.horizon, self.alpha, self.seed),
            ScenarioKind::AlphaLower => gen_alpha_lower(self.horizon, self.alpha, self.seed),
            ScenarioKind::ComplementaryPair => gen_complementary_pair(self.horizon, self.d, self.seed),
            ScenarioKind::RandomSigns => gen_random_signs(self.horizon, self.d, self.seed),
        }
    }
}

/// A generated cost sequence with its hint matrices (possibly zero columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub costs: Vec<CostVector>,
    pub hints: Vec<HintMatrix>,
    /// A simplex weight vector the construction promises something about,
    /// e.g. the exactly `α`-correlated blend of the log K lower bound.
    pub witness: Option<Vec<f64>>,
}

impl Scenario {
    pub fn horizon(&self) -> usize {
        self.costs.len()
    }

    pub fn dim(&self) -> usize {
        self.hints.first().map_or(0, HintMatrix::dim)
    }

    pub fn k(&self) -> usize {
        self.hints.first().map_or(0, HintMatrix::k)
    }

    /// Hint sequence `i` as one vector per round.
    pub fn hint_sequence(&self, i: usize) -> Vec<Vec<f64>> {
        self.hints.iter().map(|h| h.column(i).to_vec()).collect()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidParameter("dimension must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Adds multiples of `c` to `h` until `<c, h> >= alpha ||c||^2` holds in
/// floating point, as evaluated by the bad-step test.
fn lift_to_threshold(h: &mut [f64], c: &[f64], alpha: f64) {
    let c_sq = norm_sq(c);
    if c_sq == 0.0 {
        return;
    }
    for _ in 0..64 {
        let gap = alpha * c_sq - dot(c, h);
        if gap <= 0.0 {
            return;
        }
        axpy(gap / c_sq + f64::EPSILON, c, h);
    }
}

/// Unit-norm costs; good rounds get `h = α c + sqrt(1 - α^2) n` with
/// `n ⊥ c`, bad rounds get `h = -c`. In `d = 1` good hints are `α c`.
pub fn gen_correlated(spec: &ScenarioSpec) -> Result<Scenario> {
    check_alpha(spec.alpha)?;
    check_dim(spec.d)?;
    if spec.k == 0 {
        return Err(Error::InvalidParameter("correlated scenario needs K >= 1".into()));
    }
    let t_len = spec.horizon;
    let mut rng = stream_rng(spec.seed, SCENARIO_STREAM);
    let bad: BTreeSet<usize> = match &spec.bad_set {
        Some(set) => {
            if let Some(&t) = set.iter().find(|&&t| t >= t_len) {
                return Err(Error::InvalidParameter(format!("bad round {t} outside 0..{t_len}")));
            }
            set.iter().copied().collect()
        }
        None => {
            if !(0.0..=1.0).contains(&spec.bad_fraction) {
                return Err(Error::InvalidParameter(format!(
                    "bad_fraction must lie in [0, 1], got {}",
                    spec.bad_fraction
                )));
            }
            let n = (spec.bad_fraction * t_len as f64).floor() as usize;
            sample(&mut rng, t_len, n).into_iter().collect()
        }
    };
    // Slightly under sqrt(1 - α^2) so that ||h|| <= 1 survives rounding.
    let noise = (1.0 - spec.alpha * spec.alpha).sqrt() * (1.0 - 4.0 * f64::EPSILON);
    let mut costs = Vec::with_capacity(t_len);
    let mut hints = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let c = CostVector::new(random_unit(&mut rng, spec.d))?;
        let cs = c.as_slice();
        let h: Vec<f64> = if bad.contains(&t) {
            cs.iter().map(|v| -v).collect()
        } else {
            let mut h: Vec<f64> = cs.iter().map(|v| spec.alpha * v).collect();
            if let Some(n) = orthogonal_unit(&mut rng, cs) {
                axpy(noise, &n, &mut h);
            }
            lift_to_threshold(&mut h, cs, spec.alpha);
            h
        };
        let mut cols = vec![h];
        for _ in 1..spec.k {
            cols.push(random_unit(&mut rng, spec.d));
        }
        hints.push(HintMatrix::new(spec.d, cols)?);
        costs.push(c);
    }
    Ok(Scenario {
        costs,
        hints,
        witness: None,
    })
}

/// Largest `T * K` the log K construction will materialize.
pub const LOGK_MAX_ENTRIES: usize = 50_000_000;

/// One-dimensional log K lower bound: `B = αT`, `T/B` groups of `2^B`
/// sequences, each zero outside its block and enumerating every sign
/// pattern inside it. Costs are random signs; the witness puts weight `B/T`
/// on the pattern matching the costs in every block.
pub fn gen_logk_lower(horizon: usize, alpha: f64, seed: u64) -> Result<Scenario> {
    check_alpha(alpha)?;
    let b_real = alpha * horizon as f64;
    let b = b_real.round() as usize;
    if b == 0 || (b_real - b as f64).abs() > 1e-9 || horizon % b != 0 {
        return Err(Error::InvalidParameter(format!(
            "B = alpha*T = {b_real} must be a positive integer dividing T = {horizon}"
        )));
    }
    if b > 20 {
        return Err(Error::InvalidParameter(format!("B = {b} is too large to enumerate 2^B patterns")));
    }
    let groups = horizon / b;
    let per_group = 1usize << b;
    let k = groups * per_group;
    if horizon.saturating_mul(k) > LOGK_MAX_ENTRIES {
        return Err(Error::InvalidParameter(format!(
            "T*K = {horizon}*{k} exceeds the {LOGK_MAX_ENTRIES}-entry limit"
        )));
    }
    let mut rng = stream_rng(seed, SCENARIO_STREAM);
    let signs: Vec<f64> = (0..horizon).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();

    let mut witness = vec![0.0; k];
    for g in 0..groups {
        // bit j of the pattern set means -1 at offset j
        let pattern: usize = (0..b).filter(|&j| signs[g * b + j] < 0.0).map(|j| 1 << j).sum();
        witness[g * per_group + pattern] = b as f64 / horizon as f64;
    }
    let mut costs = Vec::with_capacity(horizon);
    let mut hints = Vec::with_capacity(horizon);
    for (t, &s) in signs.iter().enumerate() {
        let g = t / b;
        let j = t % b;
        let mut cols = vec![vec![0.0]; k];
        for p in 0..per_group {
            cols[g * per_group + p][0] = if p >> j & 1 == 1 { -1.0 } else { 1.0 };
        }
        hints.push(HintMatrix::new(1, cols)?);
        costs.push(CostVector::new(vec![s])?);
    }
    let target = b as f64 / horizon as f64;
    for (h, c) in hints.iter().zip(&costs) {
        let corr = dot(c.as_slice(), &h.blend(&witness));
        if corr != target {
            return Err(Error::InvalidParameter(format!(
                "witness correlation {corr} differs from B/T = {target}"
            )));
        }
    }
    Ok(Scenario {
        costs,
        hints,
        witness: Some(witness),
    })
}

/// Two-dimensional `α` lower bound: `c_t = (α, ±sqrt(1 - α^2))`, `h_t = e_0`.
pub fn gen_alpha_lower(horizon: usize, alpha: f64, seed: u64) -> Result<Scenario> {
    check_alpha(alpha)?;
    let mut s = (1.0 - alpha * alpha).sqrt();
    while alpha * alpha + s * s > 1.0 {
        s = f64::from_bits(s.to_bits() - 1);
    }
    let mut rng = stream_rng(seed, SCENARIO_STREAM);
    let hint = HintMatrix::single(vec![1.0, 0.0])?;
    let mut costs = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        costs.push(CostVector::new(vec![alpha, sign * s])?);
    }
    Ok(Scenario {
        hints: vec![hint; horizon],
        costs,
        witness: None,
    })
}

/// Two hint sequences that are each bad on half the rounds (0-based even
/// rounds for the first, odd for the second) with `<c, h> = -1/4`, and equal
/// to `c` otherwise. The even blend has `<c, h> = 3/8` every round.
pub fn gen_complementary_pair(horizon: usize, d: usize, seed: u64) -> Result<Scenario> {
    if horizon % 2 != 0 {
        return Err(Error::InvalidParameter(format!("T must be even, got {horizon}")));
    }
    if d < 3 {
        return Err(Error::InvalidParameter(format!("complementary pair needs d >= 3, got {d}")));
    }
    let mut rng = stream_rng(seed, SCENARIO_STREAM);
    let side = (1.0 - 1.0 / 16.0f64).sqrt() * (1.0 - 4.0 * f64::EPSILON);
    let mut costs = Vec::with_capacity(horizon);
    let mut hints = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let c = CostVector::new(random_unit(&mut rng, d))?;
        let cs = c.as_slice();
        let n = orthogonal_unit(&mut rng, cs).expect("d >= 2");
        let mut bad: Vec<f64> = cs.iter().map(|v| -0.25 * v).collect();
        axpy(side, &n, &mut bad);
        let good = cs.to_vec();
        let cols = if t % 2 == 0 { vec![bad, good] } else { vec![good, bad] };
        hints.push(HintMatrix::new(d, cols)?);
        costs.push(c);
    }
    Ok(Scenario {
        costs,
        hints,
        witness: Some(vec![0.5, 0.5]),
    })
}

/// `c_t = ±e_1` with fair signs; no hints.
pub fn gen_random_signs(horizon: usize, d: usize, seed: u64) -> Result<Scenario> {
    check_dim(d)?;
    let mut rng = stream_rng(seed, SCENARIO_STREAM);
    let costs = (0..horizon)
        .map(|_| {
            let mut c = vec![0.0; d];
            c[0] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            CostVector::new(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        costs,
        hints: vec![HintMatrix::empty(d); horizon],
        witness: None,
    })
}

/// Writes the scenario as CSV with columns `t, c0..c{d-1}, h{i}_{j}` (hint
/// `i`, coordinate `j`), `t` 1-based.
pub fn export_trace<W: Write>(scenario: &Scenario, writer: W) -> Result<()> {
    let d = scenario.costs.first().map_or(0, CostVector::dim);
    let k = scenario.k();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((0..d).map(|j| format!("c{j}")));
    for i in 0..k {
        header.extend((0..d).map(|j| format!("h{i}_{j}")));
    }
    w.write_record(&header)?;
    for (t, (c, h)) in scenario.costs.iter().zip(&scenario.hints).enumerate() {
        let mut row = vec![(t + 1).to_string()];
        row.extend(c.as_slice().iter().map(f64::to_string));
        for col in h.columns() {
            row.extend(col.iter().map(f64::to_string));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`export_trace`]. The witness is not stored.
pub fn import_trace<R: Read>(reader: R) -> Result<Scenario> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let d = header.iter().filter(|h| h.starts_with('c')).count();
    let hint_cols = header.iter().filter(|h| h.starts_with('h')).count();
    if header.get(0) != Some("t") || d == 0 || hint_cols % d != 0 || header.len() != 1 + d + hint_cols {
        return Err(Error::Config(format!("unrecognized trace header: {header:?}")));
    }
    let k = hint_cols / d;
    let mut costs = Vec::new();
    let mut hints = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let vals = rec
            .iter()
            .skip(1)
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number `{s}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        costs.push(CostVector::new(vals[..d].to_vec())?);
        let cols = (0..k).map(|i| vals[d + i * d..d + (i + 1) * d].to_vec()).collect();
        hints.push(HintMatrix::new(d, cols)?);
    }
    Ok(Scenario {
        costs,
        hints,
        witness: None,
    })
}
