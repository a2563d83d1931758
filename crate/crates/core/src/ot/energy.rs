use ndarray::{Array1, Array2, Axis};

use super::geometry::Geometry;
use super::measure::{Coupling, DiscreteMeasure, PairwiseMetricMatrix};
use crate::error::{Error, Result};

fn check_dims(
    plan: &Array2<f64>,
    a: &PairwiseMetricMatrix,
    b: &PairwiseMetricMatrix,
) -> Result<()> {
    let (n, m) = plan.dim();
    if a.len() != n || b.len() != m {
        return Err(Error::dims(
            format!("plan {n}x{m} with A {n}x{n} and B {m}x{m}"),
            format!("A {}x{}, B {}x{}", a.len(), a.len(), b.len(), b.len()),
        ));
    }
    Ok(())
}

/// Quadratic Gromov-Wasserstein energy of a dense plan.
///
/// Uses `Q(P) = a^T (A o A) a + b^T (B o B) b - 2 <A P B^T, P>` with `a`, `b`
/// the plan's own marginals, which is exact for any nonnegative `P`.
pub fn gw_energy(
    coupling: &Coupling,
    a: &PairwiseMetricMatrix,
    b: &PairwiseMetricMatrix,
) -> Result<f64> {
    let plan = coupling.plan();
    check_dims(plan, a, b)?;
    Ok(dense_energy(
        plan,
        &Geometry::from_matrix(a),
        &Geometry::from_matrix(b),
    ))
}

pub(crate) fn dense_energy(plan: &Array2<f64>, a: &Geometry, b: &Geometry) -> f64 {
    let row = plan.sum_axis(Axis(1));
    let col = plan.sum_axis(Axis(0));
    let marginal = a.weighted_sq_norm(&row) + b.weighted_sq_norm(&col);
    let cross = cross_term(plan, a, b);
    (marginal - 2.0 * cross).max(0.0)
}

/// `<A P B^T, P>` for symmetric `A`, `B`.
fn cross_term(plan: &Array2<f64>, a: &Geometry, b: &Geometry) -> f64 {
    let ap = a.apply(plan.view());
    let apb = b.apply(ap.t()).reversed_axes();
    (&apb * plan).sum()
}

/// Linearization of the energy at `P`:
/// `L[i,j] = sum_{i',j'} (A[i,i'] - B[j,j'])^2 P[i',j']`, i.e. half the gradient.
///
/// Computed as `(A o A) a 1^T + 1 ((B o B) b)^T - 2 A P B` without the quartic loop.
pub fn gw_linearized_cost(
    coupling: &Coupling,
    a: &PairwiseMetricMatrix,
    b: &PairwiseMetricMatrix,
) -> Result<Array2<f64>> {
    check_dims(coupling.plan(), a, b)?;
    Ok(linearized_cost(coupling.plan(), a.values(), b.values()))
}

pub(crate) fn linearized_cost(plan: &Array2<f64>, a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let row = plan.sum_axis(Axis(1));
    let col = plan.sum_axis(Axis(0));
    let a_sq: Array1<f64> = a.mapv(|v| v * v).dot(&row);
    let b_sq: Array1<f64> = b.mapv(|v| v * v).dot(&col);
    let apb = a.dot(plan).dot(b);
    let mut out = apb * -2.0;
    for ((i, j), v) in out.indexed_iter_mut() {
        *v += a_sq[i] + b_sq[j];
    }
    out
}

/// Energy of the independent coupling `a b^T`,
/// `a^T (A o A) a + b^T (B o B) b - 2 (a^T A a)(b^T B b)`, in time linear in
/// the number of points. The natural scale of every Gromov-Wasserstein cost
/// between the two measures.
pub fn independent_energy(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    let ga = Geometry::from_measure(a);
    let gb = Geometry::from_measure(b);
    let col = |w: &Array1<f64>| w.view().insert_axis(Axis(1)).to_owned();
    let a_mean = a
        .weights()
        .dot(&ga.apply(col(a.weights()).view()).column(0));
    let b_mean = b
        .weights()
        .dot(&gb.apply(col(b.weights()).view()).column(0));
    (ga.weighted_sq_norm(a.weights()) + gb.weighted_sq_norm(b.weights()) - 2.0 * a_mean * b_mean)
        .max(0.0)
}
