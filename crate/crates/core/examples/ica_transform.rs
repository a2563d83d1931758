//! The dataset map: subsample, standardize, whiten and rotate to independent
//! components. Labels never reach it.

use lotus::eval::{generate_synthetic, Family};
use lotus::transform::{covariance, phi_with_status, TransformConfig};

fn main() -> lotus::Result<()> {
    let ds = generate_synthetic(Family::SubspaceOutliers, 3000, 6, 0.05, 1)?;
    let cfg = TransformConfig {
        max_rows: 1000,
        ..TransformConfig::default()
    };
    let (measure, converged) = phi_with_status(&ds, &cfg)?;
    println!(
        "input {}x{} -> cloud {}x{} (ICA converged: {converged})",
        ds.n_rows(),
        ds.n_features(),
        measure.len(),
        measure.dim()
    );
    println!("covariance of the transformed cloud:");
    for row in covariance(measure.points()).rows() {
        println!(
            "  {}",
            row.iter()
                .map(|v| format!("{v:+.3}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    println!("transform fingerprint: {}", cfg.fingerprint());
    Ok(())
}
