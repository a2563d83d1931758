//! The `lotus` command line. Results go to stdout (JSON) or `--out` files
//! (CSV); errors go to stderr as a single line `error[<kind>]: <message>`.
//!
//! Every run carries a [`RunManifest`]: stdout results get it under a
//! `manifest` key, file outputs get a `<out>.manifest.json` next to them and
//! meta-training writes `manifests/<id>.json` into the store.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dataset::{Dataset, LABEL_COLUMN};
use crate::detectors::PipelineConfig;
use crate::error::{Error, Result};
use crate::eval::{
    average_rank, generate_synthetic, loo_evaluate, rope_test_samples, write_rope_samples, Family,
    ScoreTable,
};
use crate::meta_store::MetaStore;
use crate::meta_trainer::{search, SearchBudget};
use crate::ot::{gw_lowrank, SolverConfig, DEFAULT_RANK};
use crate::selector::lotus_select;
use crate::transform::{phi, TransformConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lotus",
    version,
    about = "Zero-shot outlier-detector selection"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tune a detector on a labeled dataset and add it to a store.
    MetaTrain(MetaTrainArgs),
    /// Low-rank Gromov-Wasserstein distance between two transformed datasets.
    Distance(DistanceArgs),
    /// Recommend a pipeline for a dataset from a store.
    Select(SelectArgs),
    /// Leave-one-out evaluation over a store.
    Evaluate(EvaluateArgs),
    /// Bayesian signed-rank test between two score-table columns.
    Rope(RopeArgs),
    /// Average rank of every method in a score table.
    Rank(RankArgs),
    /// Write a labeled synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct MetaTrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = LABEL_COLUMN)]
    pub label_col: String,
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_evals: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RANK as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub rank: u64,
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(2..))]
    pub max_rows: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub exclude: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "defaults", value_parser = ["defaults"])]
    pub baselines: String,
}

#[derive(Debug, Args)]
pub struct RopeArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value_t = 0.01)]
    pub rope: f64,
    #[arg(long, default_value_t = 50_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write every posterior draw (region masses and winner) as CSV.
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub scores: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub contamination: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, String>,
    /// SHA-256 of every input file.
    pub input_sha256: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<SearchBudget>,
    pub params: BTreeMap<String, Value>,
}

impl RunManifest {
    fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            inputs: BTreeMap::new(),
            input_sha256: BTreeMap::new(),
            transform: None,
            solver: None,
            budget: None,
            params: BTreeMap::new(),
        }
    }

    fn input(&mut self, name: &str, path: &Path) -> Result<()> {
        self.inputs
            .insert(name.to_string(), path.display().to_string());
        if path.is_file() {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let hex: String = Sha256::digest(&bytes)
                .iter()
                .map(|b| format!("{b:02x}"))
                .collect();
            self.input_sha256.insert(name.to_string(), hex);
        }
        Ok(())
    }

    fn param(&mut self, name: &str, value: impl Serialize) {
        self.params.insert(
            name.to_string(),
            serde_json::to_value(value).expect("param serializes"),
        );
    }
}

/// Short machine-readable category of an error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidMeasure(_) | Error::DimensionMismatch { .. } | Error::LengthMismatch(..) => {
            "input"
        }
        Error::InvalidConfig(_) | Error::RankOutOfRange { .. } | Error::ParamOutOfSpace { .. } => {
            "config"
        }
        Error::UnknownDetector(_) => "config",
        Error::Numerical(_) | Error::AllDistancesFailed => "numerical",
        Error::Empty(_) | Error::SingleClass | Error::MissingLabels(_) | Error::MissingCells(_) => {
            "data"
        }
        Error::BudgetExhausted => "budget",
        Error::DuplicateId(_) | Error::UnknownId(_) | Error::InvalidId(_) => "store",
        Error::CorruptIndex { .. } | Error::EmptyStore => "store",
        Error::Csv(_) | Error::Json(_) | Error::Io { .. } => "io",
    }
}

fn with_manifest(result: impl Serialize, manifest: &RunManifest) -> Result<Value> {
    let mut v = serde_json::to_value(result)?;
    match &mut v {
        Value::Object(map) => {
            map.insert("manifest".into(), serde_json::to_value(manifest)?);
            Ok(v)
        }
        _ => Ok(json!({ "result": v, "manifest": manifest })),
    }
}

fn write_manifest_beside(out: &Path, manifest: &RunManifest) -> Result<()> {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    let path = out.with_file_name(name);
    let text = serde_json::to_string_pretty(manifest)?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

fn read_labeled(path: &Path, label_col: &str) -> Result<Dataset> {
    let (ds, _) = Dataset::from_csv(path, Some(label_col))?;
    if ds.labels().is_none() {
        return Err(Error::MissingLabels(format!(
            "{} (column `{label_col}`)",
            path.display()
        )));
    }
    Ok(ds)
}

fn meta_train(args: &MetaTrainArgs, out: &mut dyn Write) -> Result<()> {
    let ds = read_labeled(&args.data, &args.label_col)?;
    let budget = SearchBudget::evaluations(args.max_evals as usize, args.seed);
    let tcfg = TransformConfig::default();
    let mut store = MetaStore::open_or_create(&args.store)?;
    if store.ids().any(|id| id == args.id) {
        return Err(Error::DuplicateId(args.id.clone()));
    }
    let res = search(ds.features(), ds.labels().expect("checked"), &budget)?;
    store.add_entry(&ds, &res.best, res.best_auc, &args.id, &tcfg)?;

    let mut m = RunManifest::new("meta-train", Some(args.seed));
    m.input("data", &args.data)?;
    m.inputs
        .insert("store".into(), args.store.display().to_string());
    m.transform = Some(tcfg);
    m.budget = Some(budget);
    m.param("label_col", &args.label_col);
    m.param("id", &args.id);
    let dir = args.store.join("manifests");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let path = dir.join(format!("{}.json", args.id));
    std::fs::write(&path, serde_json::to_string_pretty(&m)? + "\n")
        .map_err(|e| Error::io(&path, e))?;
    print_json(out, &with_manifest(&res, &m)?)
}

fn distance(args: &DistanceArgs, out: &mut dyn Write) -> Result<()> {
    let tcfg = TransformConfig {
        max_rows: args.max_rows as usize,
        seed: args.seed,
        ..TransformConfig::default()
    };
    let scfg = SolverConfig::default().with_rank(args.rank as usize);
    let (a, _) = Dataset::from_csv(&args.a, Some(LABEL_COLUMN))?;
    let (b, _) = Dataset::from_csv(&args.b, Some(LABEL_COLUMN))?;
    let res = gw_lowrank(&phi(&a, &tcfg)?, &phi(&b, &tcfg)?, &scfg)?;

    let mut m = RunManifest::new("distance", Some(args.seed));
    m.input("a", &args.a)?;
    m.input("b", &args.b)?;
    m.transform = Some(tcfg);
    m.solver = Some(scfg);
    let result = json!({ "distance": res.cost, "diagnostics": res.diagnostics() });
    print_json(out, &with_manifest(result, &m)?)
}

fn select(args: &SelectArgs, out: &mut dyn Write) -> Result<()> {
    let tcfg = TransformConfig::default();
    let scfg = SolverConfig::default();
    let (ds, _) = Dataset::from_csv(&args.data, Some(LABEL_COLUMN))?;
    let store = MetaStore::load(&args.store)?;
    let report = lotus_select(&ds, &store, &tcfg, &scfg, &args.exclude)?;

    let mut m = RunManifest::new("select", Some(tcfg.seed));
    m.input("data", &args.data)?;
    m.input(
        "store_index",
        &args.store.join(crate::meta_store::INDEX_FILE),
    )?;
    m.transform = Some(tcfg);
    m.solver = Some(scfg);
    m.param("exclude", &args.exclude);
    print_json(out, &with_manifest(&report, &m)?)
}

fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let tcfg = TransformConfig::default();
    let scfg = SolverConfig::default();
    let store = MetaStore::load(&args.store)?;
    let baselines = PipelineConfig::defaults();
    let report = loo_evaluate(&store, &tcfg, &scfg, &baselines)?;
    report.table.write_csv(&args.out)?;

    let mut m = RunManifest::new("evaluate", Some(tcfg.seed));
    m.input(
        "store_index",
        &args.store.join(crate::meta_store::INDEX_FILE),
    )?;
    m.inputs
        .insert("out".into(), args.out.display().to_string());
    m.transform = Some(tcfg);
    m.solver = Some(scfg);
    m.param("baselines", &baselines);
    write_manifest_beside(&args.out, &m)?;
    let summary = json!({
        "out": args.out.display().to_string(),
        "methods": report.table.methods,
        "rows": report.table.rows.len(),
        "failures": report.failures,
        "selections": report.selections,
    });
    print_json(out, &with_manifest(summary, &m)?)
}

fn complete_pair(
    table: &ScoreTable,
    a: &str,
    b: &str,
) -> Result<(Vec<f64>, Vec<f64>, Vec<String>)> {
    let (t, dropped) = table.complete_rows(&[a, b])?;
    let col =
        |name: &str| -> Result<Vec<f64>> { Ok(t.column(name)?.into_iter().flatten().collect()) };
    Ok((col(a)?, col(b)?, dropped))
}

fn rope(args: &RopeArgs, out: &mut dyn Write) -> Result<()> {
    let table = ScoreTable::read_csv(&args.scores)?;
    let (a, b, dropped) = complete_pair(&table, &args.a, &args.b)?;
    let (res, samples) = rope_test_samples(&a, &b, args.rope, args.samples as usize, args.seed)?;
    let mut m = RunManifest::new("rope", Some(args.seed));
    m.input("scores", &args.scores)?;
    m.param("a", &args.a);
    m.param("b", &args.b);
    m.param("rope", args.rope);
    m.param("samples", args.samples);
    if let Some(path) = &args.samples_out {
        write_rope_samples(path, &samples)?;
        m.inputs
            .insert("samples_out".into(), path.display().to_string());
        write_manifest_beside(path, &m)?;
    }
    let result = json!({
        "a": args.a,
        "b": args.b,
        "p_left": res.p_left,
        "p_rope": res.p_rope,
        "p_right": res.p_right,
        "n_datasets": a.len(),
        "dropped": dropped,
    });
    print_json(out, &with_manifest(result, &m)?)
}

fn rank(args: &RankArgs, out: &mut dyn Write) -> Result<()> {
    let table = ScoreTable::read_csv(&args.scores)?;
    let methods: Vec<&str> = table.methods.iter().map(String::as_str).collect();
    let (complete, dropped) = table.complete_rows(&methods)?;
    let ranks = average_rank(&complete)?;
    let mut m = RunManifest::new("rank", None);
    m.input("scores", &args.scores)?;
    let result = json!({ "ranks": ranks, "n_datasets": complete.rows.len(), "dropped": dropped });
    print_json(out, &with_manifest(result, &m)?)
}

fn synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let ds = generate_synthetic(args.family, args.n, args.d, args.contamination, args.seed)?;
    ds.to_csv(&args.out)?;
    let mut m = RunManifest::new("synth", Some(args.seed));
    m.inputs
        .insert("out".into(), args.out.display().to_string());
    m.param("family", args.family);
    m.param("n", args.n);
    m.param("d", args.d);
    m.param("contamination", args.contamination);
    write_manifest_beside(&args.out, &m)?;
    let result = json!({
        "out": args.out.display().to_string(),
        "rows": ds.n_rows(),
        "outliers": ds.labels().map_or(0, |y| y.iter().filter(|&&v| v == 1).count()),
    });
    print_json(out, &with_manifest(result, &m)?)
}

/// Runs a parsed command, writing its JSON result to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidConfig("--threads must be >= 1".into()));
        }
        // a pool that already exists (e.g. a second call in one process) is kept
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match &cli.command {
        Command::MetaTrain(a) => meta_train(a, out),
        Command::Distance(a) => distance(a, out),
        Command::Select(a) => select(a, out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Rope(a) => rope(a, out),
        Command::Rank(a) => rank(a, out),
        Command::Synth(a) => synth(a, out),
    }
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 on a runtime error, 2 on a usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let first = first.trim_start_matches("error: ");
            let _ = writeln!(err, "error[usage]: {first}");
            return 2;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error[{}]: {msg}", error_kind(&e));
            1
        }
    }
}
