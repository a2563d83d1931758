use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// A weighted point cloud: `n` points in `R^d` carrying a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Array2<f64>,
    weights: Array1<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Array2<f64>, weights: Array1<f64>) -> Result<Self> {
        let n = points.nrows();
        if n == 0 {
            return Err(Error::InvalidMeasure(
                "measure needs at least one point".into(),
            ));
        }
        if weights.len() != n {
            return Err(Error::dims(format!("{n} weights"), weights.len()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("points contain NaN or Inf".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(
                "weights must be finite and >= 0".into(),
            ));
        }
        let total = weights.sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { points, weights })
    }

    /// Uniform weights `1/n`.
    pub fn uniform(points: Array2<f64>) -> Result<Self> {
        let n = points.nrows();
        if n == 0 {
            return Err(Error::InvalidMeasure(
                "measure needs at least one point".into(),
            ));
        }
        Self::new(points, Array1::from_elem(n, 1.0 / n as f64))
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    /// Points scaled by `s` (weights unchanged).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            points: &self.points * s,
            weights: self.weights.clone(),
        }
    }

    pub fn weighted_centroid(&self) -> Array1<f64> {
        self.weights.dot(&self.points)
    }
}

/// Symmetric, zero-diagonal, nonnegative matrix of squared distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMetricMatrix {
    values: Array2<f64>,
}

impl PairwiseMetricMatrix {
    /// Validates symmetry (1e-9), zero diagonal and nonnegativity.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::dims(
                "square matrix",
                format!("{}x{}", n, values.ncols()),
            ));
        }
        for i in 0..n {
            if values[[i, i]] != 0.0 {
                return Err(Error::InvalidMeasure(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[[i, j]];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMeasure(format!("bad entry {v} at ({i},{j})")));
                }
                if (v - values[[j, i]]).abs() > 1e-9 {
                    return Err(Error::InvalidMeasure(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn mean(&self) -> f64 {
        self.values.mean().unwrap_or(0.0)
    }

    pub fn median(&self) -> f64 {
        let mut v: Vec<f64> = self.values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n == 0 {
            0.0
        } else if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: &self.values * s,
        }
    }
}

fn sq_dist(x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Squared Euclidean distance matrix of a measure's support.
pub fn pairwise_sq_dist(measure: &DiscreteMeasure) -> PairwiseMetricMatrix {
    let pts = measure.points();
    let n = pts.nrows();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sq_dist(pts.row(i), pts.row(j));
            values[[i, j]] = d;
            values[[j, i]] = d;
        }
    }
    PairwiseMetricMatrix { values }
}

/// A dense transport plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    plan: Array2<f64>,
}

impl Coupling {
    /// Wraps a nonnegative matrix; marginals are checked by
    /// [`Coupling::marginal_error`], not here.
    pub fn new(plan: Array2<f64>) -> Result<Self> {
        if plan.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidMeasure(
                "coupling entries must be finite and >= 0".into(),
            ));
        }
        Ok(Self { plan })
    }

    /// The independent coupling `a b^T`.
    pub fn independent(a: &Array1<f64>, b: &Array1<f64>) -> Self {
        let plan = Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j]);
        Self { plan }
    }

    pub fn plan(&self) -> &Array2<f64> {
        &self.plan
    }

    pub fn into_plan(self) -> Array2<f64> {
        self.plan
    }

    pub fn row_sums(&self) -> Array1<f64> {
        self.plan.sum_axis(Axis(1))
    }

    pub fn col_sums(&self) -> Array1<f64> {
        self.plan.sum_axis(Axis(0))
    }

    /// Largest absolute deviation of either marginal from `a` / `b`.
    pub fn marginal_error(&self, a: &Array1<f64>, b: &Array1<f64>) -> f64 {
        let rows = (&self.row_sums() - a).mapv(f64::abs);
        let cols = (&self.col_sums() - b).mapv(f64::abs);
        rows.iter().chain(cols.iter()).fold(0.0, |m, &v| m.max(v))
    }
}
