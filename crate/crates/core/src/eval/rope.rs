use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Posterior probabilities of the Bayesian signed-rank test.
/// `p_left`: the first method is better by more than the ROPE;
/// `p_rope`: practically equivalent; `p_right`: the second is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RopeResult {
    pub p_left: f64,
    pub p_rope: f64,
    pub p_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Left,
    Rope,
    Right,
}

/// Region masses of one posterior draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RopeSample {
    pub left: f64,
    pub rope: f64,
    pub right: f64,
    pub region: Region,
}

pub const DEFAULT_ROPE_SAMPLES: usize = 50_000;

/// Bayesian signed-rank test of `a` against `b` with a region of practical
/// equivalence `[-rope, rope]`.
pub fn rope_test(
    a: &[f64],
    b: &[f64],
    rope: f64,
    n_samples: usize,
    seed: u64,
) -> Result<RopeResult> {
    rope_test_samples(a, b, rope, n_samples, seed).map(|(r, _)| r)
}

/// [`rope_test`] that also returns every posterior draw, for simplex plots.
///
/// Differences `z_i = b_i - a_i` get a pseudo-observation `z_0 = 0`. Each draw
/// takes flat-Dirichlet weights `w` over the `n + 1` differences and sums
/// `w_i w_j` over all ordered pairs by where the Walsh average
/// `(z_i + z_j) / 2` falls: below `-rope` (left, `a` better), inside, or above
/// `rope`. The draw goes to the heaviest region; an exact left/right tie
/// counts as equivalence so that swapping `a` and `b` mirrors the result.
pub fn rope_test_samples(
    a: &[f64],
    b: &[f64],
    rope: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(RopeResult, Vec<RopeSample>)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::Empty(
            "rope test needs at least 2 paired scores".into(),
        ));
    }
    if !(rope > 0.0) || n_samples == 0 {
        return Err(Error::InvalidConfig(
            "rope must be > 0 and n_samples >= 1".into(),
        ));
    }
    let mut z = vec![0.0];
    z.extend(a.iter().zip(b).map(|(x, y)| y - x));
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite score difference".into()));
    }
    let n = z.len();
    // region of every Walsh average, computed once
    let mut region = vec![Region::Rope; n * n];
    for i in 0..n {
        for j in 0..n {
            let mid = (z[i] + z[j]) / 2.0;
            region[i * n + j] = if mid < -rope {
                Region::Left
            } else if mid > rope {
                Region::Right
            } else {
                Region::Rope
            };
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![0.0; n];
    let mut samples = Vec::with_capacity(n_samples);
    let mut counts = [0usize; 3];
    for _ in 0..n_samples {
        for wi in w.iter_mut() {
            *wi = Exp1.sample(&mut rng);
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        let mut mass = [0.0; 3];
        for i in 0..n {
            for j in 0..n {
                let slot = match region[i * n + j] {
                    Region::Left => 0,
                    Region::Rope => 1,
                    Region::Right => 2,
                };
                mass[slot] += w[i] * w[j];
            }
        }
        let winner = if mass[1] >= mass[0] && mass[1] >= mass[2] || mass[0] == mass[2] {
            Region::Rope
        } else if mass[0] > mass[2] {
            Region::Left
        } else {
            Region::Right
        };
        counts[winner as usize] += 1;
        samples.push(RopeSample {
            left: mass[0],
            rope: mass[1],
            right: mass[2],
            region: winner,
        });
    }
    let total = n_samples as f64;
    let p_left = counts[0] as f64 / total;
    let p_right = counts[2] as f64 / total;
    let result = RopeResult {
        p_left,
        p_rope: 1.0 - p_left - p_right,
        p_right,
    };
    Ok((result, samples))
}

/// Writes one row per posterior draw: `sample,left,rope,right,region`.
pub fn write_rope_samples(path: &Path, samples: &[RopeSample]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "sample,left,rope,right,region").map_err(io)?;
    for (i, s) in samples.iter().enumerate() {
        let region = match s.region {
            Region::Left => "left",
            Region::Rope => "rope",
            Region::Right => "right",
        };
        writeln!(
            out,
            "{i},{:.6},{:.6},{:.6},{region}",
            s.left, s.rope, s.right
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}
