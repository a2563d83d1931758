use std::path::Path;

use lotus::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("lotus").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn ok(args: &[&str]) -> serde_json::Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn synth(dir: &Path, family: &str, seed: u64) -> String {
    let path = dir
        .join(format!("{family}_{seed}.csv"))
        .display()
        .to_string();
    ok(&[
        "synth",
        "--family",
        family,
        "--n",
        "120",
        "--d",
        "3",
        "--contamination",
        "0.05",
        "--seed",
        &seed.to_string(),
        "--out",
        &path,
    ]);
    path
}

#[test]
fn distance_is_deterministic_and_small_on_identical_input() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "ring", 0);
    let args = [
        "distance",
        "--a",
        a.as_str(),
        "--b",
        a.as_str(),
        "--rank",
        "6",
    ];
    let (c1, o1, _) = call(&args);
    let (c2, o2, _) = call(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);
    let v: serde_json::Value = serde_json::from_str(&o1).unwrap();
    assert!(v["distance"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["manifest"]["solver"]["rank"], 6);
    assert_eq!(v["manifest"]["command"], "distance");
}

#[test]
fn usage_errors_are_one_line() {
    let (code, out, err) = call(&["distance", "--a", "x.csv", "--b", "y.csv", "--rank", "0"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error[usage]:"));
    let (code, _, err) = call(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn runtime_errors_are_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("none").display().to_string();
    let (code, _, err) = call(&["select", "--data", "missing.csv", "--store", &store]);
    assert_eq!(code, 1);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[io]:"), "{err}");
}

#[test]
fn train_select_evaluate_rank_rope() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store").display().to_string();
    for (family, id) in [
        ("ring", "ring"),
        ("two_clusters", "tc"),
        ("gauss_blob", "gb"),
    ] {
        let data = synth(dir.path(), family, 0);
        let res = ok(&[
            "meta-train",
            "--data",
            &data,
            "--label-col",
            "label",
            "--store",
            &store,
            "--id",
            id,
            "--max-evals",
            "6",
            "--seed",
            "1",
        ]);
        assert_eq!(res["history"].as_array().unwrap().len(), 6);
        assert!(dir
            .path()
            .join("store/manifests")
            .join(format!("{id}.json"))
            .is_file());
    }
    // duplicate id
    let data = synth(dir.path(), "ring", 0);
    let (code, _, err) = call(&[
        "meta-train",
        "--data",
        &data,
        "--store",
        &store,
        "--id",
        "ring",
        "--max-evals",
        "2",
    ]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[store]:"), "{err}");

    let query = synth(dir.path(), "ring", 9);
    let rep = ok(&[
        "select",
        "--data",
        &query,
        "--store",
        &store,
        "--exclude",
        "tc",
    ]);
    assert!(rep["distances"].get("tc").is_none());
    assert_eq!(rep["excluded"], serde_json::json!(["tc"]));

    let scores = dir.path().join("scores.csv");
    let summary = ok(&[
        "evaluate",
        "--store",
        &store,
        "--out",
        &scores.display().to_string(),
        "--threads",
        "1",
    ]);
    assert_eq!(summary["rows"], 3);
    assert!(dir.path().join("scores.csv.manifest.json").is_file());
    let text = std::fs::read_to_string(&scores).unwrap();
    assert!(
        text.starts_with("dataset,LOTUS,knn,hbos,iforest,loda,abod"),
        "{text}"
    );

    let ranks = ok(&["rank", "--scores", &scores.display().to_string()]);
    let n = ranks["ranks"].as_object().unwrap().len() as f64;
    for v in ranks["ranks"].as_object().unwrap().values() {
        let r = v.as_f64().unwrap();
        assert!((1.0..=n).contains(&r));
    }
    let samples = dir.path().join("draws.csv");
    let rope = ok(&[
        "rope",
        "--scores",
        &scores.display().to_string(),
        "--a",
        "LOTUS",
        "--b",
        "knn",
        "--samples",
        "2000",
        "--samples-out",
        &samples.display().to_string(),
    ]);
    let total = rope["p_left"].as_f64().unwrap()
        + rope["p_rope"].as_f64().unwrap()
        + rope["p_right"].as_f64().unwrap();
    assert!((total - 1.0).abs() < 1e-9);
    assert_eq!(
        std::fs::read_to_string(&samples).unwrap().lines().count(),
        2001
    );
}
