use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RANK: usize = 6;

/// Default epsilon as a fraction of the independent-coupling energy.
pub const EPSILON_FRACTION: f64 = 2e-3;

/// Knobs shared by the entropic and low-rank Gromov-Wasserstein solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Final entropic strength. `None` resolves to `EPSILON_FRACTION` times the
    /// energy of the independent coupling `a b^T`, which has the units of the
    /// energy and scales with it.
    pub epsilon: Option<f64>,
    pub rank: usize,
    pub max_outer_iter: usize,
    pub max_inner_iter: usize,
    pub tol: f64,
    /// Relative size of the deterministic symmetry-breaking perturbation of
    /// the low-rank starting factors.
    pub init_perturbation: f64,
    /// Low-rank solver: largest log-domain change of any factor entry in one
    /// step (before backtracking).
    pub step_size: f64,
    /// Low-rank solver: the step cap grows by this factor every iteration.
    pub step_growth: f64,
    /// Annealing starts at `anneal_factor * epsilon`; 1 disables it.
    pub anneal_factor: f64,
    /// Per-iteration multiplier on the entropic strength while annealing.
    pub anneal_rate: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: None,
            rank: DEFAULT_RANK,
            max_outer_iter: 100,
            max_inner_iter: 1000,
            tol: 1e-6,
            init_perturbation: 0.5,
            step_size: 10.0,
            step_growth: 1.03,
            anneal_factor: 100.0,
            anneal_rate: 0.8,
        }
    }
}

impl SolverConfig {
    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = rank;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "epsilon must be > 0, got {eps}"
                )));
            }
        }
        if self.rank == 0 {
            return Err(Error::InvalidConfig("rank must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be > 0".into()));
        }
        if !(self.init_perturbation > 0.0) || self.init_perturbation >= 1.0 {
            return Err(Error::InvalidConfig(
                "init_perturbation must be in (0, 1)".into(),
            ));
        }
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::InvalidConfig("step_size must be > 0".into()));
        }
        if !(self.step_growth >= 1.0) || !self.step_growth.is_finite() {
            return Err(Error::InvalidConfig("step_growth must be >= 1".into()));
        }
        if !(self.anneal_factor >= 1.0) || !self.anneal_factor.is_finite() {
            return Err(Error::InvalidConfig("anneal_factor must be >= 1".into()));
        }
        if !(self.anneal_rate > 0.0 && self.anneal_rate < 1.0) {
            return Err(Error::InvalidConfig("anneal_rate must be in (0, 1)".into()));
        }
        if self.max_outer_iter == 0 || self.max_inner_iter == 0 {
            return Err(Error::InvalidConfig(
                "iteration budgets must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// `independent_energy` is the energy of `a b^T`; it is zero only when
    /// every coupling has zero energy, in which case any epsilon will do.
    pub(crate) fn resolve_epsilon(&self, independent_energy: f64) -> f64 {
        match self.epsilon {
            Some(eps) => eps,
            None if independent_energy > 0.0 => EPSILON_FRACTION * independent_energy,
            None => 1.0,
        }
    }

    /// Entropic strength for outer iteration `it` (1-based) of an annealed run.
    pub(crate) fn annealed_epsilon(&self, epsilon: f64, it: usize) -> f64 {
        let start = epsilon * self.anneal_factor;
        let exponent = i32::try_from(it.saturating_sub(1)).unwrap_or(i32::MAX);
        (start * self.anneal_rate.powi(exponent)).max(epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SolverConfig::default();
        assert_eq!(cfg.rank, 6);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SolverConfig::default().with_rank(0).validate().is_err());
        assert!(SolverConfig::default()
            .with_epsilon(0.0)
            .validate()
            .is_err());
        let cfg = SolverConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            anneal_rate: 1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn annealing_schedule_reaches_target() {
        let cfg = SolverConfig::default();
        assert_eq!(cfg.annealed_epsilon(0.5, 1), 50.0);
        assert!((cfg.annealed_epsilon(0.5, 2) - 40.0).abs() < 1e-12);
        assert_eq!(cfg.annealed_epsilon(0.5, 1000), 0.5);
        let flat = SolverConfig {
            anneal_factor: 1.0,
            ..Default::default()
        };
        assert_eq!(flat.annealed_epsilon(0.5, 1), 0.5);
    }

    #[test]
    fn automatic_epsilon_tracks_energy() {
        let cfg = SolverConfig::default();
        assert!((cfg.resolve_epsilon(10.0) - 10.0 * EPSILON_FRACTION).abs() < 1e-15);
        assert_eq!(cfg.resolve_epsilon(0.0), 1.0);
        assert_eq!(cfg.with_epsilon(0.25).resolve_epsilon(10.0), 0.25);
    }
}
