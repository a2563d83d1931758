//! Score one dataset with every detector at its default settings.

use lotus::eval::{generate_synthetic, roc_auc, Family};
use lotus::{fit_score, PipelineConfig};

fn main() -> lotus::Result<()> {
    let ds = generate_synthetic(Family::GaussBlob, 500, 4, 0.05, 0)?;
    let y = ds.labels().unwrap();
    for cfg in PipelineConfig::defaults() {
        let t = std::time::Instant::now();
        let scores = fit_score(&cfg, ds.features())?;
        let auc = roc_auc(scores.as_slice().unwrap(), y)?;
        println!("{cfg:<50} AUC {auc:.4}  ({:.0?})", t.elapsed());
    }
    Ok(())
}
