use ndarray::{concatenate, Array1, Array2, ArrayView2, Axis};

use super::measure::{pairwise_sq_dist, DiscreteMeasure, PairwiseMetricMatrix};

/// Intra-space cost matrix in whichever form is cheaper to multiply with.
///
/// Squared Euclidean distances have an exact rank `d + 2` factorization
/// `A = U V^T` with `U = [s, 1, X]`, `V = [1, s, -2X]` and `s_i = |x_i|^2`, so
/// products `A M` cost `O(n d r)` instead of `O(n^2 r)`.
#[derive(Debug, Clone)]
pub(crate) enum Geometry {
    Dense(Array2<f64>),
    Factored {
        left: Array2<f64>,
        right: Array2<f64>,
    },
}

impl Geometry {
    pub fn from_matrix(m: &PairwiseMetricMatrix) -> Self {
        Geometry::Dense(m.values().clone())
    }

    /// Factored when `d + 2 < n`, dense otherwise. Points are centered on the
    /// weighted centroid first, which leaves every distance unchanged but keeps
    /// the factorization free of translation-induced cancellation.
    pub fn from_measure(measure: &DiscreteMeasure) -> Self {
        let n = measure.len();
        let d = measure.dim();
        if d + 2 >= n {
            return Geometry::Dense(pairwise_sq_dist(measure).values().clone());
        }
        let centroid = measure.weighted_centroid();
        let x = measure.points() - &centroid.insert_axis(Axis(0));
        let sq = x
            .map_axis(Axis(1), |row| row.dot(&row))
            .insert_axis(Axis(1));
        let ones = Array2::ones((n, 1));
        let left = concatenate![Axis(1), sq, ones, x];
        let right = concatenate![Axis(1), ones, sq, x.mapv(|v| -2.0 * v)];
        Geometry::Factored { left, right }
    }

    /// `A M` for a thin `M`.
    pub fn apply(&self, m: ArrayView2<f64>) -> Array2<f64> {
        match self {
            Geometry::Dense(a) => a.dot(&m),
            Geometry::Factored { left, right } => left.dot(&right.t().dot(&m)),
        }
    }

    /// `w^T (A o A) w`, the marginal-only part of the quadratic energy.
    pub fn weighted_sq_norm(&self, w: &Array1<f64>) -> f64 {
        match self {
            Geometry::Dense(a) => {
                let mut acc = 0.0;
                for (i, row) in a.outer_iter().enumerate() {
                    let inner: f64 = row.iter().zip(w.iter()).map(|(v, wj)| v * v * wj).sum();
                    acc += w[i] * inner;
                }
                acc
            }
            Geometry::Factored { left, right } => {
                let wl = left * &w.view().insert_axis(Axis(1));
                let wr = right * &w.view().insert_axis(Axis(1));
                let gl = left.t().dot(&wl);
                let gr = right.t().dot(&wr);
                (&gl * &gr).sum()
            }
        }
    }

    #[cfg(test)]
    pub fn to_dense(&self) -> Array2<f64> {
        match self {
            Geometry::Dense(a) => a.clone(),
            Geometry::Factored { left, right } => left.dot(&right.t()),
        }
    }
}
