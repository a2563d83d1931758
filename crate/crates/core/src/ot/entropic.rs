use ndarray::{Array1, Array2, Zip};

use super::config::SolverConfig;
use super::energy::{dense_energy, linearized_cost};
use super::geometry::Geometry;
use super::measure::{pairwise_sq_dist, Coupling, DiscreteMeasure, PairwiseMetricMatrix};
use super::sinkhorn::sinkhorn_warm;
use super::{GwResult, Plan};
use crate::error::{Error, Result};

/// Entropic Gromov-Wasserstein between two point clouds under squared
/// Euclidean intra-space costs.
///
/// Mirror descent from `a b^T`: every outer step linearizes the energy at the
/// current plan and solves one entropic OT problem with that linearization as
/// cost. The entropic strength is annealed geometrically from
/// `anneal_factor * epsilon` down to `epsilon`; once there, the solver stops
/// when the plan moves by less than `cfg.tol` (max-abs).
pub fn entropic_gw(
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    cfg: &SolverConfig,
) -> Result<GwResult> {
    entropic_gw_matrices(
        &pairwise_sq_dist(a),
        a.weights(),
        &pairwise_sq_dist(b),
        b.weights(),
        cfg,
    )
}

/// Same as [`entropic_gw`] for precomputed intra-space matrices.
pub fn entropic_gw_matrices(
    a_mat: &PairwiseMetricMatrix,
    a: &Array1<f64>,
    b_mat: &PairwiseMetricMatrix,
    b: &Array1<f64>,
    cfg: &SolverConfig,
) -> Result<GwResult> {
    cfg.validate()?;
    if a_mat.len() != a.len() || b_mat.len() != b.len() {
        return Err(Error::dims(
            format!(
                "{}x{} and {}x{} matrices",
                a.len(),
                a.len(),
                b.len(),
                b.len()
            ),
            format!("{} and {}", a_mat.len(), b_mat.len()),
        ));
    }
    let ga = Geometry::from_matrix(a_mat);
    let gb = Geometry::from_matrix(b_mat);
    let inner_tol = (cfg.tol * 1e-2).min(1e-8);

    let mut plan: Array2<f64> = Coupling::independent(a, b).into_plan();
    let initial = dense_energy(&plan, &ga, &gb);
    let epsilon = cfg.resolve_epsilon(initial);
    let mut trace = vec![initial];
    let mut best = (initial, plan.clone());
    let mut warm: Option<Array1<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_outer_iter {
        iterations = it;
        let eps_k = cfg.annealed_epsilon(epsilon, it);
        let cost = linearized_cost(&plan, a_mat.values(), b_mat.values());
        // loose solves while annealing, tight ones at the target strength
        let tol_k = if eps_k > epsilon { cfg.tol } else { inner_tol };
        let out = sinkhorn_warm(&cost, a, b, eps_k, cfg.max_inner_iter, tol_k, warm.as_ref())?;
        let next = out.coupling.into_plan();
        warm = Some(out.g);

        let mut delta: f64 = 0.0;
        Zip::from(&next)
            .and(&plan)
            .for_each(|&x, &y| delta = delta.max((x - y).abs()));
        plan = next;

        let energy = dense_energy(&plan, &ga, &gb);
        trace.push(energy);
        if energy < best.0 {
            best = (energy, plan.clone());
        }
        if delta < cfg.tol && eps_k <= epsilon {
            converged = true;
            break;
        }
    }

    let (cost, plan) = if converged {
        (*trace.last().unwrap(), plan)
    } else {
        best
    };
    Ok(GwResult {
        cost,
        coupling: Plan::Full(Coupling::new(plan)?),
        iterations,
        converged,
        energy_trace: trace,
        epsilon: Some(epsilon),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, d: usize, rng: &mut ChaCha8Rng) -> DiscreteMeasure {
        DiscreteMeasure::uniform(Array2::from_shape_fn((n, d), |_| {
            rng.random_range(0.0..1.0)
        }))
        .unwrap()
    }

    #[test]
    fn identical_measures_cost_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = cloud(6, 2, &mut rng);
        let a_mat = pairwise_sq_dist(&x);
        let cfg = SolverConfig::default().with_epsilon(1e-3 * a_mat.median());
        let res = entropic_gw(&x, &x, &cfg).unwrap();
        let mean_sq = a_mat.values().mapv(|v| v * v).mean().unwrap();
        assert!(res.cost <= 1e-3 * mean_sq, "{} vs {}", res.cost, mean_sq);
    }

    #[test]
    fn coupling_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = cloud(9, 3, &mut rng);
        let y = cloud(7, 2, &mut rng);
        let res = entropic_gw(&x, &y, &SolverConfig::default()).unwrap();
        let plan = res.full().unwrap();
        assert!(plan.marginal_error(x.weights(), y.weights()) < 1e-6);
        assert!(res.cost >= 0.0);
        assert!(res.cost <= res.energy_trace[0] + 1e-12);
    }

    #[test]
    fn scaling_clouds_scales_cost_by_fourth_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = cloud(8, 2, &mut rng);
        let y = cloud(8, 2, &mut rng);
        let eps = 0.01;
        let s: f64 = 3.0;
        let base = entropic_gw(&x, &y, &SolverConfig::default().with_epsilon(eps)).unwrap();
        let scaled = entropic_gw(
            &x.scaled(s),
            &y.scaled(s),
            &SolverConfig::default().with_epsilon(eps * s.powi(4)),
        )
        .unwrap();
        let expected = base.cost * s.powi(4);
        assert!(
            (scaled.cost - expected).abs() <= 1e-6 * expected,
            "{} vs {}",
            scaled.cost,
            expected
        );
    }

    #[test]
    fn single_point_measures() {
        let x = DiscreteMeasure::uniform(Array2::zeros((1, 3))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = cloud(4, 2, &mut rng);
        let res = entropic_gw(&x, &y, &SolverConfig::default()).unwrap();
        assert!(res.cost.is_finite());
        assert!(res.full().unwrap().marginal_error(x.weights(), y.weights()) < 1e-6);
    }
}
