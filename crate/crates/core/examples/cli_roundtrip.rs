//! Drive the command-line surface in-process: synthesize, meta-train two
//! entries, select, and compute a distance.

use lotus::cli::run;

fn lotus(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("lotus").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    String::from_utf8(out).unwrap()
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let p = |name: &str| dir.path().join(name).display().to_string();
    let store = p("store");
    for (family, seed) in [("ring", "0"), ("two_clusters", "0"), ("ring", "1")] {
        lotus(&[
            "synth",
            "--family",
            family,
            "--n",
            "200",
            "--d",
            "3",
            "--contamination",
            "0.05",
            "--seed",
            seed,
            "--out",
            &p(&format!("{family}{seed}.csv")),
        ]);
    }
    for family in ["ring", "two_clusters"] {
        lotus(&[
            "meta-train",
            "--data",
            &p(&format!("{family}0.csv")),
            "--label-col",
            "label",
            "--store",
            &store,
            "--id",
            family,
            "--max-evals",
            "12",
            "--seed",
            "0",
        ]);
    }
    let report: serde_json::Value = serde_json::from_str(&lotus(&[
        "select",
        "--data",
        &p("ring1.csv"),
        "--store",
        &store,
    ]))
    .unwrap();
    println!(
        "chosen: {}  distances: {}",
        report["chosen_id"], report["distances"]
    );
    let dist: serde_json::Value = serde_json::from_str(&lotus(&[
        "distance",
        "--a",
        &p("ring0.csv"),
        "--b",
        &p("ring1.csv"),
        "--threads",
        "1",
    ]))
    .unwrap();
    println!("distance ring0 vs ring1: {}", dist["distance"]);
}
