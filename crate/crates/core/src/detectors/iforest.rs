use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Average path length of an unsuccessful search in a binary search tree
/// of `n` points.
pub(crate) fn c_factor(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let n = n as f64;
            2.0 * ((n - 1.0).ln() + EULER_GAMMA) - 2.0 * (n - 1.0) / n
        }
    }
}

enum Node {
    Leaf {
        size: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

fn build(
    x: &Array2<f64>,
    rows: &mut [usize],
    depth: usize,
    limit: usize,
    rng: &mut ChaCha8Rng,
) -> Node {
    if depth >= limit || rows.len() <= 1 {
        return Node::Leaf { size: rows.len() };
    }
    // only features that still vary inside this node can split it
    let ranges: Vec<(usize, f64, f64)> = (0..x.ncols())
        .filter_map(|f| {
            let (lo, hi) = rows
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                    (lo.min(x[[r, f]]), hi.max(x[[r, f]]))
                });
            (hi > lo).then_some((f, lo, hi))
        })
        .collect();
    if ranges.is_empty() {
        return Node::Leaf { size: rows.len() };
    }
    let (feature, lo, hi) = ranges[rng.random_range(0..ranges.len())];
    let threshold = rng.random_range(lo..hi);
    let mut split = 0;
    for i in 0..rows.len() {
        if x[[rows[i], feature]] < threshold {
            rows.swap(i, split);
            split += 1;
        }
    }
    let (l, r) = rows.split_at_mut(split);
    Node::Split {
        feature,
        threshold,
        left: Box::new(build(x, l, depth + 1, limit, rng)),
        right: Box::new(build(x, r, depth + 1, limit, rng)),
    }
}

fn path_length(node: &Node, p: ArrayView1<f64>) -> f64 {
    let mut node = node;
    let mut depth = 0.0;
    loop {
        match node {
            Node::Leaf { size } => return depth + c_factor(*size),
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                node = if p[*feature] < *threshold {
                    left
                } else {
                    right
                };
                depth += 1.0;
            }
        }
    }
}

/// Isolation forest anomaly score `2^(-E[h(x)] / c(max_samples))`, in
/// `(0, 1]`. `max_samples` larger than the dataset is clamped to `n`.
/// Tree `t` draws from its own stream of a `seed`-keyed generator, so the
/// result does not depend on thread scheduling.
pub fn iforest_score(
    x: &Array2<f64>,
    n_estimators: usize,
    max_samples: usize,
    seed: u64,
) -> Result<Array1<f64>> {
    let n = x.nrows();
    if n_estimators == 0 {
        return Err(Error::InvalidConfig("n_estimators must be >= 1".into()));
    }
    if max_samples < 2 || n < 2 {
        return Err(Error::InvalidConfig(format!(
            "iforest needs max_samples >= 2 and at least 2 rows, got {max_samples} and {n}"
        )));
    }
    let psi = max_samples.min(n);
    let limit = (psi as f64).log2().ceil() as usize;
    let trees: Vec<Node> = (0..n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut rows = rand::seq::index::sample(&mut rng, n, psi).into_vec();
            build(x, &mut rows, 0, limit, &mut rng)
        })
        .collect();
    let norm = c_factor(psi);
    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mean =
                trees.iter().map(|t| path_length(t, x.row(i))).sum::<f64>() / n_estimators as f64;
            2f64.powf(-mean / norm)
        })
        .collect();
    Ok(Array1::from(scores))
}
