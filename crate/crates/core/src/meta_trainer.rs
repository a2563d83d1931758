//! Supervised search for the best detector configuration on a labeled
//! dataset: detectors are fit without labels, the labels only score them.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::{fit_score, Detector, PipelineConfig};
use crate::error::{Error, Result};
use crate::eval::roc_auc;

pub const POPULATION: usize = 12;
pub const SURVIVORS: usize = 4;
pub const FRESH_PER_GENERATION: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_evaluations: usize,
    /// Optional wall-clock cap. Leaving it unset keeps the search
    /// deterministic.
    pub wall_clock_cap_seconds: Option<f64>,
    pub seed: u64,
}

impl SearchBudget {
    pub fn evaluations(max_evaluations: usize, seed: u64) -> Self {
        Self {
            max_evaluations,
            wall_clock_cap_seconds: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_evaluations == 0 {
            return Err(Error::InvalidConfig("max_evaluations must be >= 1".into()));
        }
        if let Some(cap) = self.wall_clock_cap_seconds {
            if !(cap >= 0.0) || !cap.is_finite() {
                return Err(Error::InvalidConfig(format!("bad wall-clock cap {cap}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub config: PipelineConfig,
    pub auc: f64,
    /// Set when the detector failed; the AUC is then recorded as 0.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: PipelineConfig,
    pub best_auc: f64,
    /// Every evaluation in the order it was scheduled.
    pub history: Vec<Evaluation>,
}

/// AUC of `cfg` on `(x, y)`. The detector never sees `y`.
pub fn evaluate_config(cfg: &PipelineConfig, x: &Array2<f64>, y: &[u8]) -> Result<f64> {
    check_labels(x, y)?;
    let scores = fit_score(cfg, x)?;
    roc_auc(scores.as_slice().expect("contiguous scores"), y)
}

fn check_labels(x: &Array2<f64>, y: &[u8]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch(x.nrows(), y.len()));
    }
    let pos = y.iter().filter(|&&v| v == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Higher AUC first, then the lexicographically smaller canonical JSON.
fn better(a: &Evaluation, b: &Evaluation) -> std::cmp::Ordering {
    b.auc
        .total_cmp(&a.auc)
        .then_with(|| a.config.canonical_json().cmp(&b.config.canonical_json()))
}

fn random_config(rng: &mut ChaCha8Rng) -> PipelineConfig {
    let detector = *Detector::ALL.choose(rng).expect("nonempty");
    let params = detector
        .space()
        .into_iter()
        .map(|(name, grid)| {
            (
                name.to_string(),
                grid.choose(rng).expect("nonempty grid").clone(),
            )
        })
        .collect();
    PipelineConfig {
        detector,
        params,
        standardize_input: rng.random_bool(0.5),
    }
}

/// Re-draws one parameter (or the standardization flag) uniformly from its
/// grid.
fn mutate(parent: &PipelineConfig, rng: &mut ChaCha8Rng) -> PipelineConfig {
    let mut child = parent.clone();
    let space = parent.detector.space();
    let slot = rng.random_range(0..=space.len());
    match space.get(slot) {
        Some((name, grid)) => {
            child.params.insert(
                name.to_string(),
                grid.choose(rng).expect("nonempty grid").clone(),
            );
        }
        None => child.standardize_input = rng.random_bool(0.5),
    }
    child
}

fn space_size() -> usize {
    Detector::ALL
        .iter()
        .map(|d| 2 * d.space().iter().map(|(_, g)| g.len()).product::<usize>())
        .sum()
}

/// Evolutionary search: a population of 12 random configurations; each
/// generation keeps the best 4 and refills with single-parameter mutations
/// of them plus 2 fresh random configurations. A configuration is evaluated
/// at most once; repeats reuse the cached AUC and do not use budget.
/// Evaluations inside a generation run in parallel, and every random draw
/// happens on the calling thread, so the result depends only on the inputs
/// when no wall-clock cap is set.
pub fn search(x: &Array2<f64>, y: &[u8], budget: &SearchBudget) -> Result<SearchResult> {
    budget.validate()?;
    check_labels(x, y)?;
    let started = Instant::now();
    let cap = budget.wall_clock_cap_seconds.map(Duration::from_secs_f64);
    let out_of_time = || cap.is_some_and(|c| started.elapsed() >= c);
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let total = space_size();

    let mut cache: HashMap<PipelineConfig, f64> = HashMap::new();
    let mut history: Vec<Evaluation> = Vec::new();
    let mut population: Vec<PipelineConfig> =
        (0..POPULATION).map(|_| random_config(&mut rng)).collect();

    loop {
        if out_of_time() {
            break;
        }
        let mut pending: Vec<PipelineConfig> = Vec::new();
        for cfg in &population {
            if !cache.contains_key(cfg) && !pending.contains(cfg) {
                pending.push(cfg.clone());
            }
        }
        pending.truncate(budget.max_evaluations - history.len());
        let results: Vec<Evaluation> = pending
            .into_par_iter()
            .map(|config| match evaluate_config(&config, x, y) {
                Ok(auc) => Evaluation {
                    config,
                    auc,
                    error: None,
                },
                Err(e) => Evaluation {
                    config,
                    auc: 0.0,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        for ev in results {
            cache.insert(ev.config.clone(), ev.auc);
            history.push(ev);
        }
        if history.len() >= budget.max_evaluations || cache.len() >= total {
            break;
        }

        let mut ranked: Vec<Evaluation> = population
            .iter()
            .filter_map(|c| {
                cache.get(c).map(|&auc| Evaluation {
                    config: c.clone(),
                    auc,
                    error: None,
                })
            })
            .collect();
        ranked.sort_by(better);
        ranked.dedup_by(|a, b| a.config == b.config);
        let parents: Vec<PipelineConfig> = ranked
            .into_iter()
            .take(SURVIVORS)
            .map(|e| e.config)
            .collect();
        let mut next = parents.clone();
        while next.len() < POPULATION - FRESH_PER_GENERATION {
            let parent = parents.choose(&mut rng).expect("at least one survivor");
            next.push(mutate(parent, &mut rng));
        }
        while next.len() < POPULATION {
            next.push(random_config(&mut rng));
        }
        population = next;
    }

    let best = history
        .iter()
        .min_by(|a, b| better(a, b))
        .ok_or(Error::BudgetExhausted)?;
    Ok(SearchResult {
        best: best.config.clone(),
        best_auc: best.auc,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{generate_synthetic, Family};

    fn blob() -> (Array2<f64>, Vec<u8>) {
        let ds = generate_synthetic(Family::GaussBlob, 300, 3, 0.05, 0).unwrap();
        (ds.features().clone(), ds.labels().unwrap().to_vec())
    }

    #[test]
    fn single_evaluation_budget() {
        let (x, y) = blob();
        let res = search(&x, &y, &SearchBudget::evaluations(1, 5)).unwrap();
        assert_eq!(res.history.len(), 1);
        assert_eq!(res.best, res.history[0].config);
        assert_eq!(res.best_auc, res.history[0].auc);
    }

    #[test]
    fn deterministic_and_in_space() {
        let (x, y) = blob();
        let budget = SearchBudget::evaluations(30, 9);
        let a = search(&x, &y, &budget).unwrap();
        assert_eq!(a, search(&x, &y, &budget).unwrap());
        assert_eq!(a.history.len(), 30);
        let max = a.history.iter().map(|e| e.auc).fold(0.0, f64::max);
        assert!((a.best_auc - max).abs() < 1e-12);
        for e in &a.history {
            e.config.validate().unwrap();
        }
    }

    #[test]
    fn failures_score_zero() {
        // k = 100 on 40 rows fails; the search must record it, not abort
        let ds = generate_synthetic(Family::GaussBlob, 40, 2, 0.1, 1).unwrap();
        let x = ds.features().clone();
        let y = ds.labels().unwrap().to_vec();
        let mut cfg = PipelineConfig::default_for(Detector::Knn);
        cfg.params
            .insert("k".into(), crate::detectors::ParamValue::Int(100));
        assert!(evaluate_config(&cfg, &x, &y).is_err());
        let res = search(&x, &y, &SearchBudget::evaluations(40, 2)).unwrap();
        assert!(res
            .history
            .iter()
            .all(|e| e.error.is_none() || e.auc == 0.0));
    }

    #[test]
    fn label_checks() {
        let (x, _) = blob();
        let y = vec![0u8; x.nrows()];
        assert!(matches!(
            search(&x, &y, &SearchBudget::evaluations(5, 0)),
            Err(Error::SingleClass)
        ));
        let cfg = PipelineConfig::default_for(Detector::Hbos);
        assert!(matches!(
            evaluate_config(&cfg, &x, &y),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn perfect_and_constant_scores() {
        // one far outlier on a line: knn ranks it first
        let x = Array2::from_shape_fn((20, 1), |(i, _)| if i == 19 { 100.0 } else { i as f64 });
        let mut y = vec![0u8; 20];
        y[19] = 1;
        let cfg = PipelineConfig::default_for(Detector::Knn);
        assert_eq!(evaluate_config(&cfg, &x, &y).unwrap(), 1.0);
        let flat = Array2::from_elem((20, 1), 1.0);
        let hbos = PipelineConfig::default_for(Detector::Hbos);
        assert_eq!(evaluate_config(&hbos, &flat, &y).unwrap(), 0.5);
    }

    #[test]
    fn zero_time_cap_exhausts_budget() {
        let (x, y) = blob();
        let budget = SearchBudget {
            max_evaluations: 10,
            wall_clock_cap_seconds: Some(0.0),
            seed: 0,
        };
        assert!(matches!(
            search(&x, &y, &budget),
            Err(Error::BudgetExhausted)
        ));
    }
}
