//! Entropic and low-rank Gromov-Wasserstein between two point clouds that
//! live in different dimensions.

use lotus::ot::{entropic_gw, gw_lowrank, independent_energy, DiscreteMeasure, SolverConfig};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lotus::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // a noisy circle in 2-D and the same circle embedded in 3-D
    let n = 60;
    let circle = Array2::from_shape_fn((n, 2), |(i, j)| {
        let t = std::f64::consts::TAU * i as f64 / n as f64;
        if j == 0 {
            t.cos()
        } else {
            t.sin()
        }
    });
    let lifted = Array2::from_shape_fn((n, 3), |(i, j)| match j {
        2 => rng.random_range(-0.05..0.05),
        _ => circle[[i, j]] + rng.random_range(-0.05..0.05),
    });
    let a = DiscreteMeasure::uniform(circle)?;
    let b = DiscreteMeasure::uniform(lifted)?;
    println!(
        "independent coupling energy: {:.5}",
        independent_energy(&a, &b)
    );

    let ent = entropic_gw(&a, &b, &SolverConfig::default())?;
    println!("entropic: {:?}", ent.diagnostics());
    for rank in [2, 6, 20] {
        let lr = gw_lowrank(&a, &b, &SolverConfig::default().with_rank(rank))?;
        let plan = lr.low_rank().unwrap();
        println!(
            "rank {rank:>2}: cost {:.5}, {} iterations, marginal error {:.1e}",
            lr.cost,
            lr.iterations,
            plan.marginal_error(a.weights(), b.weights())
        );
    }
    Ok(())
}
