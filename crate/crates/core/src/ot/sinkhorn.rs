use ndarray::{Array1, Array2};

use super::log_sum_exp;
use super::measure::Coupling;
use crate::error::{Error, Result};

/// Sweeps between marginal checks.
const CHECK_EVERY: usize = 5;

#[derive(Debug, Clone)]
pub struct SinkhornOutput {
    pub coupling: Coupling,
    /// `<C, P>`, entropy excluded.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Dual potentials; `P[i,j] = exp((f[i] + g[j] - C[i,j]) / eps)`.
    pub f: Array1<f64>,
    pub g: Array1<f64>,
}

/// Entropic OT between `a` and `b` under `cost`, solved with log-domain
/// Sinkhorn updates. Stops once the column marginal error (rows are exact
/// after each half-step) drops below `tol`; the error is checked every few
/// sweeps.
pub fn sinkhorn(
    cost: &Array2<f64>,
    a: &Array1<f64>,
    b: &Array1<f64>,
    epsilon: f64,
    max_iter: usize,
    tol: f64,
) -> Result<SinkhornOutput> {
    sinkhorn_warm(cost, a, b, epsilon, max_iter, tol, None)
}

pub(crate) fn sinkhorn_warm(
    cost: &Array2<f64>,
    a: &Array1<f64>,
    b: &Array1<f64>,
    epsilon: f64,
    max_iter: usize,
    tol: f64,
    warm: Option<&Array1<f64>>,
) -> Result<SinkhornOutput> {
    let (n, m) = cost.dim();
    if a.len() != n || b.len() != m {
        return Err(Error::dims(
            format!("weights of length {n} and {m}"),
            format!("{} and {}", a.len(), b.len()),
        ));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical("cost matrix contains NaN or Inf".into()));
    }

    let log_a = a.mapv(f64::ln);
    let log_b = b.mapv(f64::ln);
    let mut f = Array1::zeros(n);
    let mut g = match warm {
        Some(g0) if g0.len() == m && g0.iter().all(|v| v.is_finite()) => g0.clone(),
        _ => Array1::zeros(m),
    };

    let cost_t = cost.t().as_standard_layout().into_owned();
    let row_update = |g: &Array1<f64>, f: &mut Array1<f64>| {
        for i in 0..n {
            let row = cost.row(i);
            let lse = log_sum_exp((0..m).map(|j| (g[j] - row[j]) / epsilon));
            f[i] = epsilon * (log_a[i] - lse);
        }
    };

    let mut converged = false;
    let mut iterations = 0;
    row_update(&g, &mut f);
    for it in 1..=max_iter {
        iterations = it;
        for j in 0..m {
            let col = cost_t.row(j);
            let lse = log_sum_exp((0..n).map(|i| (f[i] - col[i]) / epsilon));
            g[j] = epsilon * (log_b[j] - lse);
        }
        row_update(&g, &mut f);
        if it % CHECK_EVERY != 0 && it != max_iter {
            continue;
        }

        // rows are now exact; measure the column violation
        let mut err: f64 = 0.0;
        for j in 0..m {
            let col = cost_t.row(j);
            let mass: f64 = (0..n)
                .map(|i| ((f[i] + g[j] - col[i]) / epsilon).exp())
                .sum();
            err = err.max((mass - b[j]).abs());
        }
        if !err.is_finite() {
            return Err(Error::Numerical("sinkhorn potentials diverged".into()));
        }
        if err < tol {
            converged = true;
            break;
        }
    }

    let plan = Array2::from_shape_fn((n, m), |(i, j)| {
        let v = ((f[i] + g[j] - cost[[i, j]]) / epsilon).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    });
    let transport = (&plan * cost).sum();
    Ok(SinkhornOutput {
        coupling: Coupling::new(plan)?,
        cost: transport,
        iterations,
        converged,
        f,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_by_one() {
        let out = sinkhorn(&array![[3.25]], &array![1.0], &array![1.0], 0.1, 100, 1e-9).unwrap();
        assert!((out.coupling.plan()[[0, 0]] - 1.0).abs() < 1e-12);
        assert!((out.cost - 3.25).abs() < 1e-12);
        assert!(out.converged);
    }

    #[test]
    fn constant_cost_gives_independent_coupling() {
        let a = array![0.2, 0.5, 0.3];
        let b = array![0.1, 0.6, 0.1, 0.2];
        let cost = Array2::from_elem((3, 4), 2.0);
        let out = sinkhorn(&cost, &a, &b, 0.05, 1000, 1e-12).unwrap();
        let expected = Coupling::independent(&a, &b);
        let diff = (out.coupling.plan() - expected.plan()).mapv(f64::abs);
        assert!(diff.iter().all(|&v| v < 1e-10));
    }

    /// 2x2 uniform problem has one free parameter t = P[0,0]; brute force
    /// the entropic objective on a 1e-5 grid.
    #[test]
    fn two_by_two_matches_grid_search() {
        let cost = array![[0.3, 1.2], [0.9, 0.1]];
        let u = array![0.5, 0.5];
        let eps = 0.2;
        let objective = |p: &Array2<f64>| {
            let ent: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum();
            (p * &cost).sum() + eps * ent
        };
        let mut best = f64::INFINITY;
        let steps = 50_000;
        for k in 0..=steps {
            let t = 0.5 * k as f64 / steps as f64;
            let p = array![[t, 0.5 - t], [0.5 - t, t]];
            best = best.min(objective(&p));
        }
        let out = sinkhorn(&cost, &u, &u, eps, 10_000, 1e-13).unwrap();
        let got = objective(out.coupling.plan());
        assert!(got <= best + 1e-6, "{got} vs grid {best}");
        assert!(got >= best - 1e-6);
    }

    #[test]
    fn tiny_epsilon_does_not_overflow() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cost = Array2::from_shape_fn((20, 15), |_| rng.random_range(0.0..100.0));
        let a = Array1::from_elem(20, 1.0 / 20.0);
        let b = Array1::from_elem(15, 1.0 / 15.0);
        let out = sinkhorn(&cost, &a, &b, 1e-3, 500, 1e-9).unwrap();
        assert!(out.coupling.plan().iter().all(|v| v.is_finite()));
        // rows are matched last, so they hold even before convergence
        let rows = out.coupling.row_sums();
        assert!(rows
            .iter()
            .zip(a.iter())
            .all(|(r, w)| (r - w).abs() < 1e-12));
        assert!(out.cost.is_finite());
    }

    #[test]
    fn marginals_hold_on_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = rng.random_range(1..30);
            let m = rng.random_range(1..30);
            let cost = Array2::from_shape_fn((n, m), |_| rng.random_range(0.0..5.0));
            let mut a = Array1::from_shape_fn(n, |_| rng.random_range(0.1..1.0));
            let mut b = Array1::from_shape_fn(m, |_| rng.random_range(0.1..1.0));
            a /= a.sum();
            b /= b.sum();
            let out = sinkhorn(&cost, &a, &b, 0.1, 2000, 1e-9).unwrap();
            assert!(out.converged);
            assert!(out.coupling.marginal_error(&a, &b) < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let c = array![[1.0]];
        let w = array![1.0];
        assert!(sinkhorn(&c, &w, &w, 0.0, 10, 1e-9).is_err());
        assert!(sinkhorn(&array![[f64::NAN]], &w, &w, 0.1, 10, 1e-9).is_err());
        assert!(sinkhorn(&c, &array![0.5, 0.5], &w, 0.1, 10, 1e-9).is_err());
    }
}
