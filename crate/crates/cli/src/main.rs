use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ddalpha_core::data::{dataset_stats, load_csv_path, LabelColumn, OutlierScope, Points};
use ddalpha_core::depth::{depth_grid, DepthSpace, GridSpec};
use ddalpha_core::estimators::DEFAULT_MCD_FRACTION;
use ddalpha_core::eval::{render_text, run_benchmark, Manifest};
use ddalpha_core::treatments::TreatmentConfig;
use ddalpha_core::{DDAlphaConfig, DDAlphaModel, DepthConfig, DepthNotion, EstimatorKind};

#[derive(Parser)]
#[command(name = "ddalpha", version, about = "Depth-based binary classification")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a DDα model and write it as JSON.
    Train(TrainArgs),
    /// Append `predicted` and `route` columns to a CSV.
    Classify(ClassifyArgs),
    /// Difficulty profile of a task.
    Stats(StatsArgs),
    /// Leave-one-out benchmark over a manifest of tasks and classifiers.
    Benchmark(BenchmarkArgs),
    /// Depth of both classes on a regular 2-D grid.
    Contour(ContourArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Estimator {
    Moment,
    Mcd,
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Column holding the class label (default: last column).
    #[arg(long)]
    label_column: Option<String>,
}

impl DataArgs {
    fn label(&self) -> LabelColumn {
        LabelColumn::from_option(self.label_column.as_deref())
    }
}

#[derive(Args)]
struct DepthArgs {
    /// mahalanobis, spatial, projection or tukey.
    #[arg(long, default_value = "mahalanobis")]
    depth: DepthNotion,
    #[arg(long, value_enum, default_value = "moment")]
    estimator: Estimator,
    #[arg(long, default_value_t = DEFAULT_MCD_FRACTION)]
    mcd_fraction: f64,
    /// Random directions for projection and Tukey depth.
    #[arg(long)]
    directions: Option<usize>,
}

impl DepthArgs {
    fn config(&self) -> DepthConfig {
        let estimator = match self.estimator {
            Estimator::Moment => EstimatorKind::Moment,
            Estimator::Mcd => EstimatorKind::mcd(self.mcd_fraction),
        };
        let mut c = DepthConfig::new(self.depth);
        c.estimator = estimator;
        if let Some(k) = self.directions {
            c.directions = k;
        }
        c
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    depth: DepthArgs,
    /// Outsider treatment: lda, knn, mah-moment, mah-mcd or svms.
    #[arg(long)]
    treatment: Option<String>,
    /// Candidate α degrees, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    degrees: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the model.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// CSV to classify; a label column, if present, is passed through.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    label_column: Option<String>,
    /// Output CSV (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Regions for the outlier share: per-class or pooled.
    #[arg(long, default_value = "per-class")]
    outlier_scope: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// JSON manifest; task paths are relative to its directory.
    #[arg(long)]
    manifest: PathBuf,
    /// Overrides the manifest seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here.
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Write the text tables here.
    #[arg(long)]
    text_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ContourArgs {
    /// Trained model; otherwise `--data` with the depth flags.
    #[arg(long, conflicts_with = "data")]
    model: Option<PathBuf>,
    #[arg(long, required_unless_present = "model")]
    data: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    #[command(flatten)]
    depth: DepthArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, allow_hyphen_values = true)]
    y_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    y_max: f64,
    #[arg(long, default_value_t = 50)]
    nx: usize,
    #[arg(long, default_value_t = 50)]
    ny: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let ds = load_csv_path(&a.data.data, &a.data.label())?;
    let mut cfg = DDAlphaConfig::new(a.depth.config()).with_degrees(a.degrees);
    if let Some(t) = &a.treatment {
        let mut t: TreatmentConfig = t.parse()?;
        if let TreatmentConfig::MahMcd { fraction } = &mut t {
            *fraction = a.depth.mcd_fraction;
        }
        cfg = cfg.with_treatment(t);
    }
    let model = DDAlphaModel::train(&ds, &cfg, a.seed)?;
    fs::write(&a.output, model.to_json()?)
        .with_context(|| format!("writing {}", a.output.display()))?;
    let s = &model.summary;
    let text = match a.format {
        Format::Json => {
            let v = serde_json::json!({
                "model": cfg.label(),
                "seed": a.seed,
                "n": s.n,
                "emr": s.emr,
                "degree": s.degree,
                "selected_features": s.selected_features,
                "outsider_share": s.outsider_share,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Text => format!(
            "model: {}\nseed: {}\nn: {}\ntraining EMR: {:.4}\ndegree: {}\nselected features: {}\noutsider share: {:.4}\n",
            cfg.label(),
            a.seed,
            s.n,
            s.emr,
            s.degree,
            s.selected_features.join(", "),
            s.outsider_share
        ),
    };
    write_out(None, &text)
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let model = DDAlphaModel::from_json(
        &fs::read_to_string(&a.model).with_context(|| format!("reading {}", a.model.display()))?,
    )?;
    let mut raw = String::new();
    fs::File::open(&a.data)
        .with_context(|| format!("opening {}", a.data.display()))?
        .read_to_string(&mut raw)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let d = model.dim();
    let skip = match &a.label_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .with_context(|| format!("label column {name:?} not found"))?,
        ),
        None if header.len() == d + 1 => Some(d),
        None if header.len() == d || header.iter().all(String::is_empty) => None,
        None => bail!(
            "dimension mismatch: model expects {d} feature columns, file has {}",
            header.len()
        ),
    };
    let features: Vec<usize> = (0..header.len()).filter(|&i| Some(i) != skip).collect();
    let mut records = Vec::new();
    let mut pts = Points::empty(d);
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if features.len() != d {
            bail!("dimension mismatch: model expects {d} features, file has {}", features.len());
        }
        let z: Vec<f64> = features
            .iter()
            .map(|&i| {
                rec[i]
                    .parse::<f64>()
                    .with_context(|| format!("row {}: non-numeric value {:?}", row + 1, &rec[i]))
            })
            .collect::<Result<_>>()?;
        pts.push(&z);
        records.push(rec);
    }
    let preds = model.classify_batch(&pts)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut out_header: Vec<&str> = header.iter().map(String::as_str).filter(|h| !h.is_empty()).collect();
    out_header.extend(["predicted", "route"]);
    w.write_record(&out_header)?;
    for (rec, p) in records.iter().zip(&preds) {
        let mut row: Vec<String> = rec.iter().map(str::to_string).collect();
        row.push(model.label_names[p.label.index()].clone());
        row.push(p.route.to_string());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_out(a.output.as_deref(), &String::from_utf8(bytes)?)
}

fn stats(a: StatsArgs) -> Result<()> {
    let scope: OutlierScope = serde_json::from_value(serde_json::Value::String(a.outlier_scope.clone()))
        .with_context(|| format!("unknown outlier scope {:?} (per-class or pooled)", a.outlier_scope))?;
    let ds = load_csv_path(&a.data.data, &a.data.label())?;
    let s = dataset_stats(&ds, scope)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&s)? + "\n",
        Format::Text => s.to_text(),
    };
    write_out(None, &text)
}

fn benchmark(a: BenchmarkArgs) -> Result<bool> {
    let mut manifest = Manifest::from_path(&a.manifest)
        .with_context(|| format!("reading manifest {}", a.manifest.display()))?;
    if let Some(s) = a.seed {
        manifest.seed = s;
    }
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let report = run_benchmark(&manifest, base)?;
    let json = serde_json::to_string_pretty(&report)? + "\n";
    let text = render_text(&report);
    if let Some(p) = &a.json_out {
        write_out(Some(p), &json)?;
    }
    if let Some(p) = &a.text_out {
        write_out(Some(p), &text)?;
    }
    write_out(None, if a.format == Format::Json { &json } else { &text })?;
    for f in &report.failures {
        log::error!("{f}");
    }
    Ok(!report.has_failures())
}

fn contour(a: ContourArgs) -> Result<()> {
    let space = match (&a.model, &a.data) {
        (Some(m), _) => DDAlphaModel::from_json(&fs::read_to_string(m)?)?.space,
        (None, Some(d)) => {
            let ds = load_csv_path(d, &LabelColumn::from_option(a.label_column.as_deref()))?;
            DepthSpace::fit(&ds, &a.depth.config().with_seed(a.seed))?
        }
        (None, None) => bail!("either --model or --data is required"),
    };
    let spec = GridSpec {
        x_min: a.x_min,
        x_max: a.x_max,
        y_min: a.y_min,
        y_max: a.y_max,
        nx: a.nx,
        ny: a.ny,
    };
    let nodes = depth_grid(&space, &spec)?;
    let text = match a.format {
        Format::Json => serde_json::to_string(&nodes)? + "\n",
        Format::Text => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "y", "depth1", "depth2"])?;
            for n in &nodes {
                w.write_record(n.iter().map(f64::to_string))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?
        }
    };
    write_out(a.output.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Train(a) => train(a).map(|_| true),
        Command::Classify(a) => classify(a).map(|_| true),
        Command::Stats(a) => stats(a).map(|_| true),
        Command::Benchmark(a) => benchmark(a),
        Command::Contour(a) => contour(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
