//! Generate one labeled dataset per synthetic family and print a summary.
//!
//!     cargo run --example synth_dataset -- /tmp/synth

use lotus::eval::{generate_synthetic, Family};

fn main() -> lotus::Result<()> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    for family in Family::ALL {
        let ds = generate_synthetic(family, 500, 4, 0.05, 0)?;
        let outliers = ds.labels().unwrap().iter().filter(|&&y| y == 1).count();
        println!(
            "{:<18} rows={} cols={} outliers={}",
            family,
            ds.n_rows(),
            ds.n_features(),
            outliers
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).expect("create output dir");
            ds.to_csv(&dir.join(format!("{}.csv", ds.name)))?;
        }
    }
    Ok(())
}
