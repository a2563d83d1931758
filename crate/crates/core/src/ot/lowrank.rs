use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1, Axis, Zip};

use super::config::SolverConfig;
use super::geometry::Geometry;
use super::log_sum_exp;
use super::measure::{Coupling, DiscreteMeasure, PairwiseMetricMatrix};
use super::{GwResult, Plan};
use crate::error::{Error, Result};

/// Entries of `g` are floored here before any division.
const G_FLOOR: f64 = 1e-12;
const MAX_BACKTRACKS: usize = 20;
/// Consecutive small, shrinking steps required before stopping.
const PATIENCE: usize = 10;

/// A coupling factored as `P = Q diag(1/g) R^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankCoupling {
    q: Array2<f64>,
    r: Array2<f64>,
    g: Array1<f64>,
}

impl LowRankCoupling {
    pub fn new(q: Array2<f64>, r: Array2<f64>, g: Array1<f64>) -> Result<Self> {
        let rank = g.len();
        if rank == 0 || q.ncols() != rank || r.ncols() != rank {
            return Err(Error::dims(
                format!("factors with {rank} columns"),
                format!("Q {:?}, R {:?}", q.dim(), r.dim()),
            ));
        }
        if q.iter()
            .chain(r.iter())
            .any(|&v| !(v >= 0.0) || !v.is_finite())
        {
            return Err(Error::InvalidMeasure(
                "factor entries must be finite and >= 0".into(),
            ));
        }
        if g.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidMeasure("g must be strictly positive".into()));
        }
        Ok(Self { q, r, g })
    }

    pub fn rank(&self) -> usize {
        self.g.len()
    }

    pub fn q(&self) -> &Array2<f64> {
        &self.q
    }

    pub fn r_factor(&self) -> &Array2<f64> {
        &self.r
    }

    pub fn g(&self) -> &Array1<f64> {
        &self.g
    }

    /// Largest violation among the five factor constraints: rows of `Q` sum
    /// to `a`, rows of `R` to `b`, columns of both to `g`, and `g` to one.
    pub fn marginal_error(&self, a: &Array1<f64>, b: &Array1<f64>) -> f64 {
        let max_dev = |x: Array1<f64>, y: &Array1<f64>| {
            x.iter()
                .zip(y.iter())
                .fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()))
        };
        let mut err = max_dev(self.q.sum_axis(Axis(1)), a);
        err = err.max(max_dev(self.r.sum_axis(Axis(1)), b));
        err = err.max(max_dev(self.q.sum_axis(Axis(0)), &self.g));
        err = err.max(max_dev(self.r.sum_axis(Axis(0)), &self.g));
        err.max((self.g.sum() - 1.0).abs())
    }

    /// Dense `n x m` plan. Only for small problems and tests.
    pub fn materialize(&self) -> Coupling {
        let ginv = self.g.mapv(|v| 1.0 / v.max(G_FLOOR));
        let scaled = &self.q * &ginv.view().insert_axis(Axis(0));
        Coupling::new(scaled.dot(&self.r.t()).mapv(|v| v.max(0.0)))
            .expect("product of nonnegative factors")
    }

    /// Quadratic energy of the factored plan against dense intra-space
    /// matrices, without forming `P`.
    pub fn energy(
        &self,
        a_mat: &PairwiseMetricMatrix,
        b_mat: &PairwiseMetricMatrix,
    ) -> Result<f64> {
        if a_mat.len() != self.q.nrows() || b_mat.len() != self.r.nrows() {
            return Err(Error::dims(
                format!(
                    "{}x{} and {}x{}",
                    self.q.nrows(),
                    self.q.nrows(),
                    self.r.nrows(),
                    self.r.nrows()
                ),
                format!("{} and {}", a_mat.len(), b_mat.len()),
            ));
        }
        let ga = Geometry::from_matrix(a_mat);
        let gb = Geometry::from_matrix(b_mat);
        Ok(Factors::from_coupling(self).energy(&ga, &gb))
    }
}

/// Solver state in the log domain so that small entries never underflow.
#[derive(Debug, Clone)]
struct Factors {
    log_q: Array2<f64>,
    log_r: Array2<f64>,
    log_g: Array1<f64>,
    q: Array2<f64>,
    r: Array2<f64>,
}

/// Unnormalized log-domain factors handed to the projection.
struct LogFactors {
    log_q: Array2<f64>,
    log_r: Array2<f64>,
    log_g: Array1<f64>,
}

struct Sides {
    aq: Array2<f64>,
    br: Array2<f64>,
    m: Array2<f64>,
    n: Array2<f64>,
}

impl Factors {
    fn from_coupling(c: &LowRankCoupling) -> Self {
        Self {
            log_q: c.q.mapv(f64::ln),
            log_r: c.r.mapv(f64::ln),
            log_g: c.g.mapv(f64::ln),
            q: c.q.clone(),
            r: c.r.clone(),
        }
    }

    fn g_inv(&self) -> Array1<f64> {
        self.log_g.mapv(|v| 1.0 / v.exp().max(G_FLOOR))
    }

    /// `A Q`, `B R`, `M = Q^T A Q` and `N = R^T B R`: everything the energy
    /// and gradients need, in `O((n + m) r d)`.
    fn sides(&self, ga: &Geometry, gb: &Geometry) -> Sides {
        let (q, r) = (&self.q, &self.r);
        let aq = ga.apply(q.view());
        let br = gb.apply(r.view());
        let m = q.t().dot(&aq);
        let n = r.t().dot(&br);
        Sides { aq, br, m, n }
    }

    /// Exact energy of the plan the factors represent: the marginal term uses
    /// the plan's own row and column sums, so projection residue cannot
    /// masquerade as descent.
    fn energy_from(&self, sides: &Sides, ga: &Geometry, gb: &Geometry) -> f64 {
        // marginals of Q D R^T, exact even when the inner marginals drift
        let (q, r) = (&self.q, &self.r);
        let d = self.g_inv();
        let row = q.dot(&(&r.sum_axis(Axis(0)) * &d));
        let col = r.dot(&(&q.sum_axis(Axis(0)) * &d));
        let offset = ga.weighted_sq_norm(&row) + gb.weighted_sq_norm(&col);
        // <A P B, P> = tr(D M D N), D = diag(1/g)
        let mut cross = 0.0;
        for k in 0..d.len() {
            for l in 0..d.len() {
                cross += d[k] * sides.m[[k, l]] * d[l] * sides.n[[l, k]];
            }
        }
        let energy = offset - 2.0 * cross;
        // the true value is >= 0; a clearly negative one means cancellation
        // has eaten the result (tiny g), so report it as unusable
        if energy < -1e-9 * offset {
            f64::NAN
        } else {
            energy.max(0.0)
        }
    }

    fn energy(&self, ga: &Geometry, gb: &Geometry) -> f64 {
        self.energy_from(&self.sides(ga, gb), ga, gb)
    }

    fn into_coupling(self) -> Result<LowRankCoupling> {
        let g = self.log_g.mapv(|v| v.exp().max(G_FLOOR));
        LowRankCoupling::new(self.q, self.r, g)
    }
}

/// Gradients of the energy w.r.t. `Q`, `R` and `g` (constant marginal terms
/// dropped, they do not change the projected step).
fn gradients(f: &Factors, s: &Sides) -> (Array2<f64>, Array2<f64>, Array1<f64>) {
    let d = f.g_inv();
    let rank = d.len();
    let dnd = Array2::from_shape_fn((rank, rank), |(k, l)| d[k] * s.n[[k, l]] * d[l]);
    let dmd = Array2::from_shape_fn((rank, rank), |(k, l)| d[k] * s.m[[k, l]] * d[l]);
    let grad_q = s.aq.dot(&dnd) * -4.0;
    let grad_r = s.br.dot(&dmd) * -4.0;
    let grad_g = Array1::from_shape_fn(rank, |k| {
        let mdn: f64 = (0..rank).map(|l| s.m[[k, l]] * d[l] * s.n[[l, k]]).sum();
        4.0 * mdn * d[k] * d[k]
    });
    (grad_q, grad_r, grad_g)
}

/// KL projection of `(xi_q, xi_r, xi_g)` onto `{Q 1 = a, R 1 = b, Q^T 1 = R^T 1 = g}`.
///
/// The projection has the form `Q = xi_q e^(alpha_i + lambda_k)`,
/// `R = xi_r e^(beta_j + mu_k)`, `g = xi_g e^(-lambda_k - mu_k)`; the duals
/// are found by damped Newton steps on the (convex) negated dual. Row duals
/// are eliminated in closed form, so each step solves a `2r x 2r` system and
/// costs `O((n + m) r^2)`.
struct Projector<'a> {
    a: &'a Array1<f64>,
    b: &'a Array1<f64>,
    max_iter: usize,
    tol: f64,
}

struct Duals {
    alpha: Array1<f64>,
    beta: Array1<f64>,
    lambda: Array1<f64>,
    mu: Array1<f64>,
}

struct Primal {
    q: Array2<f64>,
    r: Array2<f64>,
    g: Array1<f64>,
}

impl Primal {
    fn build(xi: &LogFactors, d: &Duals) -> Self {
        let q = Array2::from_shape_fn(xi.log_q.dim(), |(i, k)| {
            (xi.log_q[[i, k]] + d.alpha[i] + d.lambda[k]).exp()
        });
        let r = Array2::from_shape_fn(xi.log_r.dim(), |(j, k)| {
            (xi.log_r[[j, k]] + d.beta[j] + d.mu[k]).exp()
        });
        let g = Array1::from_shape_fn(xi.log_g.len(), |k| {
            (xi.log_g[k] - d.lambda[k] - d.mu[k]).exp()
        });
        Self { q, r, g }
    }
}

impl Projector<'_> {
    /// Largest marginal violation of `p`.
    fn violation(&self, p: &Primal) -> f64 {
        let rows = (p.q.sum_axis(Axis(1)) - self.a)
            .into_iter()
            .chain(p.r.sum_axis(Axis(1)) - self.b);
        let cols = (p.q.sum_axis(Axis(0)) - &p.g)
            .into_iter()
            .chain(p.r.sum_axis(Axis(0)) - &p.g);
        rows.chain(cols).fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn objective(&self, p: &Primal, d: &Duals) -> f64 {
        p.q.sum() + p.r.sum() + p.g.sum() - d.alpha.dot(self.a) - d.beta.dot(self.b)
    }

    fn project(&self, xi: LogFactors) -> Factors {
        let rank = xi.log_g.len();
        // start from exact row normalization
        let mut duals = Duals {
            alpha: self.a.mapv(f64::ln) - &row_lse(&xi.log_q),
            beta: self.b.mapv(f64::ln) - &row_lse(&xi.log_r),
            lambda: Array1::zeros(rank),
            mu: Array1::zeros(rank),
        };
        let mut p = Primal::build(&xi, &duals);
        let mut obj = self.objective(&p, &duals);

        for _ in 0..self.max_iter {
            let row_q = p.q.sum_axis(Axis(1));
            let row_r = p.r.sum_axis(Axis(1));
            let col_q = p.q.sum_axis(Axis(0));
            let col_r = p.r.sum_axis(Axis(0));
            let grad_a = &row_q - self.a;
            let grad_b = &row_r - self.b;
            let grad_l = &col_q - &p.g;
            let grad_m = &col_r - &p.g;
            let err = self.violation(&p);
            if err < self.tol {
                break;
            }

            // Schur complement after eliminating alpha and beta
            let mut s = DMatrix::<f64>::zeros(2 * rank, 2 * rank);
            let mut rhs = DVector::<f64>::zeros(2 * rank);
            schur_block(
                &p.q, &row_q, &col_q, &p.g, &grad_a, &grad_l, &mut s, &mut rhs, 0,
            );
            schur_block(
                &p.r, &row_r, &col_r, &p.g, &grad_b, &grad_m, &mut s, &mut rhs, rank,
            );
            for k in 0..rank {
                s[(k, rank + k)] = p.g[k];
                s[(rank + k, k)] = p.g[k];
            }
            // the dual has one gauge direction; a tiny ridge makes S definite
            let ridge = 1e-12
                * (0..2 * rank)
                    .map(|k| s[(k, k)])
                    .fold(0.0, f64::max)
                    .max(f64::MIN_POSITIVE);
            for k in 0..2 * rank {
                s[(k, k)] += ridge;
            }
            let Some(chol) = s.cholesky() else {
                break;
            };
            let step = chol.solve(&rhs);
            let d_lambda = Array1::from_shape_fn(rank, |k| step[k]);
            let d_mu = Array1::from_shape_fn(rank, |k| step[rank + k]);
            let d_alpha = (&grad_a - &p.q.dot(&d_lambda)) / &row_q;
            let d_beta = (&grad_b - &p.r.dot(&d_mu)) / &row_r;

            let slope = -(grad_a.dot(&d_alpha)
                + grad_b.dot(&d_beta)
                + grad_l.dot(&d_lambda)
                + grad_m.dot(&d_mu));
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let trial = Duals {
                    alpha: &duals.alpha - &(&d_alpha * t),
                    beta: &duals.beta - &(&d_beta * t),
                    lambda: &duals.lambda - &(&d_lambda * t),
                    mu: &duals.mu - &(&d_mu * t),
                };
                let tp = Primal::build(&xi, &trial);
                let tobj = self.objective(&tp, &trial);
                // near the solution the decrease drops below rounding in the
                // objective; the marginal violation still tells progress apart
                if tobj.is_finite() && (tobj <= obj + 1e-4 * t * slope || self.violation(&tp) < err)
                {
                    duals = trial;
                    p = tp;
                    obj = tobj;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            // a microscopic step means we are at the precision floor
            if !moved {
                break;
            }
        }

        Factors {
            log_q: p.q.mapv(f64::ln),
            log_r: p.r.mapv(f64::ln),
            log_g: p.g.mapv(|v| v.max(G_FLOOR).ln()),
            q: p.q,
            r: p.r,
        }
    }
}

fn row_lse(log_x: &Array2<f64>) -> Array1<f64> {
    log_x
        .outer_iter()
        .map(|row| log_sum_exp(row.iter().copied()))
        .collect()
}

/// Fills one diagonal block of the reduced Newton system:
/// `diag(col + g) - X^T diag(1/row) X` and `grad_col - X^T (grad_row / row)`.
#[allow(clippy::too_many_arguments)]
fn schur_block(
    x: &Array2<f64>,
    row: &Array1<f64>,
    col: &Array1<f64>,
    g: &Array1<f64>,
    grad_row: &Array1<f64>,
    grad_col: &Array1<f64>,
    s: &mut DMatrix<f64>,
    rhs: &mut DVector<f64>,
    offset: usize,
) {
    let rank = g.len();
    let scaled = x / &row.view().insert_axis(Axis(1));
    let cross = x.t().dot(&scaled);
    let reduced = grad_col - &scaled.t().dot(grad_row);
    for k in 0..rank {
        for l in 0..rank {
            s[(offset + k, offset + l)] = -cross[[k, l]];
        }
        s[(offset + k, offset + k)] += col[k] + g[k];
        rhs[offset + k] = reduced[k];
    }
}

/// Deterministic symmetry-breaking bias `ln(1 + delta * cos(pi (k+1) u_i))`,
/// where `u_i` is the point's squared distance to the weighted centroid,
/// normalized to `[0, 1)`.
fn radial_bias(measure: &DiscreteMeasure, rank: usize, delta: f64) -> Array2<f64> {
    let x = measure.points();
    let w = measure.weights();
    let centroid = measure.weighted_centroid();
    let r: Vec<f64> = x
        .outer_iter()
        .map(|row| {
            row.iter()
                .zip(centroid.iter())
                .map(|(u, v)| (u - v) * (u - v))
                .sum()
        })
        .collect();
    let spread = w.iter().zip(&r).map(|(wi, ri)| wi * ri).sum::<f64>();
    Array2::from_shape_fn((x.nrows(), rank), |(i, k)| {
        let t = if spread > 0.0 { r[i] / spread } else { 0.0 };
        let u = t / (1.0 + t);
        (1.0 + delta * (std::f64::consts::PI * (k + 1) as f64 * u).cos()).ln()
    })
}

/// Soft clustering around `rank` farthest-point anchors (the first is the
/// point farthest from the centroid), blended with the uniform split:
/// `ln((1 - delta) + delta * rank * softmax_k(-|x_i - c_k|^2 / tau))`.
fn cluster_bias(measure: &DiscreteMeasure, rank: usize, delta: f64) -> Array2<f64> {
    let x = measure.points();
    let w = measure.weights();
    let n = x.nrows();
    let sq = |i: usize, p: ArrayView1<f64>| -> f64 {
        x.row(i)
            .iter()
            .zip(p.iter())
            .map(|(u, v)| (u - v) * (u - v))
            .sum()
    };

    // farthest-point anchors, starting from the point farthest from the centroid
    let centroid = measure.weighted_centroid();
    let far = |d: &[f64]| (0..n).fold(0, |best, i| if d[i] > d[best] { i } else { best });
    let mut nearest: Vec<f64> = (0..n).map(|i| sq(i, centroid.view())).collect();
    let spread = w.iter().zip(&nearest).map(|(wi, d)| wi * d).sum::<f64>();
    let mut dist = Array2::<f64>::zeros((n, rank));
    let mut anchor = far(&nearest);
    for k in 0..rank {
        for i in 0..n {
            dist[[i, k]] = sq(i, x.row(anchor));
        }
        nearest = if k == 0 {
            dist.column(0).to_vec()
        } else {
            nearest
                .iter()
                .zip(dist.column(k))
                .map(|(a, b)| a.min(*b))
                .collect()
        };
        anchor = far(&nearest);
    }
    let tau = spread / rank as f64;
    if !(tau > 0.0) {
        return Array2::zeros((n, rank));
    }

    // soft assignment to anchors, blended with the uniform split
    let mut bias = Array2::zeros((n, rank));
    for i in 0..n {
        let logits: Vec<f64> = (0..rank).map(|k| -dist[[i, k]] / tau).collect();
        let lse = log_sum_exp(logits.iter().copied());
        for k in 0..rank {
            let share = (logits[k] - lse).exp() * rank as f64;
            bias[[i, k]] = ((1.0 - delta) + delta * share).ln();
        }
    }
    bias
}

/// Low-rank Gromov-Wasserstein between two point clouds under squared
/// Euclidean intra-space costs.
///
/// Minimizes the quadratic energy over `P = Q diag(1/g) R^T` by mirror
/// descent: each outer step moves `(Q, R, g)` in the log domain against the
/// gradient, scaled so the largest entry changes by at most the current step
/// cap, then KL-projects back onto the factor constraints. A step that would
/// raise the energy is halved until it does not, so the recorded energies
/// never increase. The product `Q = a g^T`, `R = b g^T` with `g` uniform is a
/// stationary point, so descent runs from two deterministic tilts of it (a
/// soft clustering around farthest-point anchors, and a radial profile) and
/// the lower energy wins. Both depend only on intrinsic geometry, so the
/// result is invariant under isometries and row permutations. Per-iteration
/// cost is linear in `n + m`; the `n x m` plan is never formed.
pub fn gw_lowrank(
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    cfg: &SolverConfig,
) -> Result<GwResult> {
    let max_rank = a.len().min(b.len());
    if cfg.rank == 0 || cfg.rank > max_rank {
        return Err(Error::RankOutOfRange {
            rank: cfg.rank,
            max: max_rank,
        });
    }
    cfg.validate()?;
    let ga = Geometry::from_measure(a);
    let gb = Geometry::from_measure(b);
    let projector = Projector {
        a: a.weights(),
        b: b.weights(),
        max_iter: cfg.max_inner_iter,
        tol: cfg.tol.min(1e-9),
    };

    let rank = cfg.rank;
    let log_g0 = (1.0 / rank as f64).ln();
    let start = |bias_q: Array2<f64>, bias_r: Array2<f64>| LogFactors {
        log_q: Array2::from_shape_fn((a.len(), rank), |(i, k)| {
            a.weights()[i].ln() + log_g0 + bias_q[[i, k]]
        }),
        log_r: Array2::from_shape_fn((b.len(), rank), |(j, k)| {
            b.weights()[j].ln() + log_g0 + bias_r[[j, k]]
        }),
        log_g: Array1::from_elem(rank, log_g0),
    };
    let delta = cfg.init_perturbation;
    let starts = [
        start(cluster_bias(a, rank, delta), cluster_bias(b, rank, delta)),
        start(radial_bias(a, rank, delta), radial_bias(b, rank, delta)),
    ];
    let mut best: Option<Descent> = None;
    for s in starts {
        let run = descend(projector.project(s), &projector, &ga, &gb, cfg)?;
        if best.as_ref().is_none_or(|b| run.energy < b.energy) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    Ok(GwResult {
        cost: best.energy,
        coupling: Plan::LowRank(best.factors.into_coupling()?),
        iterations: best.iterations,
        converged: best.converged,
        energy_trace: best.trace,
        epsilon: None,
    })
}

struct Descent {
    factors: Factors,
    energy: f64,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Mirror descent with backtracking from a projected start.
fn descend(
    mut current: Factors,
    projector: &Projector,
    ga: &Geometry,
    gb: &Geometry,
    cfg: &SolverConfig,
) -> Result<Descent> {
    let mut sides = current.sides(ga, gb);
    let mut energy = current.energy_from(&sides, ga, gb);
    if !energy.is_finite() {
        return Err(Error::Numerical(
            "initial low-rank energy is not finite".into(),
        ));
    }
    let mut trace = vec![energy];
    let mut step = cfg.step_size;
    let mut cap = cfg.step_size;
    let mut converged = false;
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;
    let mut quiet = 0;

    for it in 1..=cfg.max_outer_iter {
        iterations = it;
        let (grad_q, grad_r, grad_g) = gradients(&current, &sides);
        let grad_q = row_center(&grad_q);
        let grad_r = row_center(&grad_r);
        let scale = grad_q
            .iter()
            .chain(grad_r.iter())
            .chain(grad_g.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(scale > 0.0) {
            converged = true;
            break;
        }

        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_BACKTRACKS {
            let gamma = t / scale;
            let candidate = projector.project(LogFactors {
                log_q: &current.log_q - &(&grad_q * gamma),
                log_r: &current.log_r - &(&grad_r * gamma),
                log_g: &current.log_g - &(&grad_g * gamma),
            });
            let cand_sides = candidate.sides(ga, gb);
            let cand_energy = candidate.energy_from(&cand_sides, ga, gb);
            if cand_energy.is_finite() && cand_energy <= energy {
                accepted = Some((candidate, cand_sides, cand_energy));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_sides, next_energy)) = accepted else {
            // no descent left at machine precision
            converged = true;
            break;
        };

        let change = max_factor_change(&current, &next);
        current = next;
        sides = next_sides;
        energy = next_energy;
        trace.push(energy);
        cap *= cfg.step_growth;
        step = (t * 2.0).min(cap);
        // a single small step is not enough: near the symmetric start the
        // iterate moves slowly before it accelerates away
        if change < cfg.tol && change <= last_change {
            quiet += 1;
            if quiet >= PATIENCE {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        last_change = change;
    }

    Ok(Descent {
        factors: current,
        energy,
        trace,
        iterations,
        converged,
    })
}

/// Removes row means: a per-row constant in a log-domain step is absorbed
/// exactly by the projection.
fn row_center(x: &Array2<f64>) -> Array2<f64> {
    let rows = x.mean_axis(Axis(1)).expect("nonempty");
    x - &rows.insert_axis(Axis(1))
}

fn max_factor_change(x: &Factors, y: &Factors) -> f64 {
    let mut change: f64 = 0.0;
    Zip::from(&x.q)
        .and(&y.q)
        .for_each(|u, v| change = change.max((u - v).abs()));
    Zip::from(&x.r)
        .and(&y.r)
        .for_each(|u, v| change = change.max((u - v).abs()));
    Zip::from(&x.log_g)
        .and(&y.log_g)
        .for_each(|u, v| change = change.max((u.exp() - v.exp()).abs()));
    change
}
