//! Vectors on the unit ball: costs, hint matrices, decisions and the
//! Euclidean projection.

use crate::error::{Error, Result};

/// Slack allowed on every `||x|| <= 1` constraint. Inputs within the slack are
/// renormalized onto the sphere, inputs beyond it are rejected.
pub const NORM_TOL: f64 = 1e-9;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y += scale * x`
#[inline]
pub fn axpy(scale: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += scale * xi;
    }
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Projects `x` onto the closed unit l2 ball.
pub fn project_to_ball(x: &[f64]) -> Result<Decision> {
    check_finite(x, "projection input")?;
    let mut v = x.to_vec();
    project_in_place(&mut v);
    Ok(Decision(v))
}

/// In-place variant of [`project_to_ball`] for callers that already know the
/// input is finite.
pub(crate) fn project_in_place(v: &mut [f64]) {
    let n = norm(v);
    if n > 1.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Validates `values` against the unit ball, renormalizing drift within
/// [`NORM_TOL`].
fn into_unit_ball(mut values: Vec<f64>, what: &'static str) -> Result<Vec<f64>> {
    check_finite(&values, what)?;
    let n = norm(&values);
    if n > 1.0 + NORM_TOL {
        return Err(Error::NormViolation {
            what,
            norm: n,
            limit: 1.0,
        });
    }
    if n > 1.0 {
        values.iter_mut().for_each(|x| *x /= n);
    }
    Ok(values)
}

/// A round's cost vector, `||c|| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        into_unit_ball(values, "cost vector").map(Self)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.0)
    }

    /// Returns `factor * c`. Only shrinking factors keep the ball invariant.
    pub(crate) fn scaled(&self, factor: f64) -> Self {
        debug_assert!(factor.abs() <= 1.0);
        Self(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for CostVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The `K` hints revealed at the start of a round, stored column-major.
///
/// `K = 0` is allowed: hint-free learners receive an empty matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HintMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl HintMatrix {
    pub fn new(dim: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * columns.len());
        for col in columns {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: col.len(),
                });
            }
            data.extend(into_unit_ball(col, "hint")?);
        }
        Ok(Self { dim, data })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn single(hint: Vec<f64>) -> Result<Self> {
        let dim = hint.len();
        Self::new(dim, vec![hint])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of hint columns.
    pub fn k(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// `H w = sum_i w_i h_i`. The result stays in the ball whenever `w` lies in
    /// the simplex.
    pub fn blend(&self, weights: &[f64]) -> Vec<f64> {
        debug_assert_eq!(weights.len(), self.k());
        let mut out = vec![0.0; self.dim];
        for (w, col) in weights.iter().zip(self.columns()) {
            if *w != 0.0 {
                axpy(*w, col, &mut out);
            }
        }
        out
    }

    /// `<c, h_i>` for every column.
    pub fn correlations(&self, cost: &[f64]) -> Vec<f64> {
        self.columns().map(|h| dot(cost, h)).collect()
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        let dim = self.dim.max(1);
        self.data.chunks_exact(dim).map(<[f64]>::to_vec).collect()
    }
}

/// A learner's response for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision(pub Vec<f64>);

impl Decision {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// Checks membership in the unit ball, renormalizing tolerance drift.
    pub fn constrained(values: Vec<f64>) -> Result<Self> {
        into_unit_ball(values, "decision").map(Self)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Decision {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
