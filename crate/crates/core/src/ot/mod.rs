//! Discrete optimal transport: Sinkhorn, entropic Gromov-Wasserstein and the
//! low-rank (factored coupling) Gromov-Wasserstein solver.
//!
//! All Gromov-Wasserstein costs are the quadratic energy
//! `Q(P) = sum_{i,j,i',j'} (A[i,i'] - B[j,j'])^2 P[i,j] P[i',j']`
//! of the returned coupling. Entropy terms used inside the solvers are never
//! included in reported costs, so values are comparable across epsilon and rank.

mod config;
mod energy;
mod entropic;
mod geometry;
mod lowrank;
mod measure;
mod sinkhorn;

pub use config::{SolverConfig, DEFAULT_RANK, EPSILON_FRACTION};
pub use energy::{gw_energy, gw_linearized_cost, independent_energy};
pub use entropic::{entropic_gw, entropic_gw_matrices};
pub use lowrank::{gw_lowrank, LowRankCoupling};
pub use measure::{pairwise_sq_dist, Coupling, DiscreteMeasure, PairwiseMetricMatrix};
pub use sinkhorn::{sinkhorn, SinkhornOutput};

use serde::Serialize;

/// Transport plan returned by a Gromov-Wasserstein solver.
#[derive(Debug, Clone)]
pub enum Plan {
    Full(Coupling),
    LowRank(LowRankCoupling),
}

#[derive(Debug, Clone)]
pub struct GwResult {
    /// Quadratic energy of `coupling`, entropy excluded.
    pub cost: f64,
    pub coupling: Plan,
    pub iterations: usize,
    pub converged: bool,
    /// Energy after every accepted outer iteration, starting with the initial plan.
    pub energy_trace: Vec<f64>,
    /// Entropic strength actually used by the entropic solver (after
    /// resolving the automatic default). `None` for the low-rank solver.
    pub epsilon: Option<f64>,
}

/// Compact summary used in JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct GwDiagnostics {
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub initial_energy: f64,
}

impl GwResult {
    pub fn diagnostics(&self) -> GwDiagnostics {
        GwDiagnostics {
            cost: self.cost,
            iterations: self.iterations,
            converged: self.converged,
            epsilon: self.epsilon,
            initial_energy: self.energy_trace.first().copied().unwrap_or(self.cost),
        }
    }

    pub fn low_rank(&self) -> Option<&LowRankCoupling> {
        match &self.coupling {
            Plan::LowRank(c) => Some(c),
            Plan::Full(_) => None,
        }
    }

    pub fn full(&self) -> Option<&Coupling> {
        match &self.coupling {
            Plan::Full(c) => Some(c),
            Plan::LowRank(_) => None,
        }
    }
}

/// `log(sum(exp(xs)))` without overflow; `-inf` for an empty or all `-inf` input.
pub(crate) fn log_sum_exp<I: IntoIterator<Item = f64> + Clone>(xs: I) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + sum.ln()
}
