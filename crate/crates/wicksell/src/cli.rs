//! Command line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wicksell_core::{
    bootstrap_iie_band, credible_band, iie, iip_ensemble, model_truth, sample_observables,
    BaseMeasureSpec, EnsembleSettings, PosteriorEnsemble, Quadrature, QueryGrid, Seed, TrueModel,
};

use crate::experiments::{self, ExperimentKind, ExperimentSettings, THREADS_ENV};
use crate::ingest::{self, IngestError};
use crate::output::{write_json, write_text, CsvTable, RunHeader};
use crate::verify::{self, VerifyConfig};

const MODEL_HELP: &str = "Model spec `family:param[,param]`: exp:<rate>, holder:<gamma> \
(gamma > 1/2, peak at 5 on [0, 10]), uniform:<upper>, tab:<x>/<p>,<x>/<p>,...";
const GRID_HELP: &str = "Query grid `start:stop:steps`, giving steps + 1 equally spaced points";
const QUANTILE_HELP: &str = "Band endpoints are the order statistics k = max(1, ceil(p * N)) \
of the N sorted draws at p = alpha/2 and p = 1 - alpha/2";

#[derive(Debug, Parser)]
#[command(name = "wicksell", version, about = "Bayesian estimation for Wicksell's problem")]
#[command(after_help = format!("Worker threads default to ${THREADS_ENV} when set."))]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample observables from a model; writes a CSV of Z and a JSON sidecar with the truth
    Simulate(SimulateArgs),
    /// Isotonized inverse estimator and posterior means on a grid
    Estimate(EstimateArgs),
    /// Credible or bootstrap bands on a grid
    #[command(after_help = QUANTILE_HELP)]
    Uq(UqArgs),
    /// Monte Carlo experiments; writes a JSON report
    #[command(after_help = QUANTILE_HELP)]
    Experiment(ExperimentArgs),
    /// Run the identity checks; exits 1 naming any failing check
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, help = MODEL_HELP)]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar path; defaults to the output path with `.json` appended
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenterArg {
    Origin,
    Centroid,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// File of observations, one per line
    #[arg(long, conflicts_with = "positions", required_unless_present = "positions")]
    pub data: Option<PathBuf>,
    /// File of projected positions `x,y`; observations are squared distances from the center
    #[arg(long)]
    pub positions: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "origin")]
    pub center: CenterArg,
}

#[derive(Debug, Args)]
pub struct PriorArgs {
    /// Total mass of the Dirichlet-process base measure
    #[arg(long, default_value_t = 1.0)]
    pub prior_mass: f64,
    /// Base family (exp:<rate>, uniform:<upper>, tab:...); defaults to an exponential with the data mean
    #[arg(long)]
    pub prior: Option<String>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, help = GRID_HELP, default_value = "0:10:200")]
    pub grid: String,
    #[arg(long, default_value_t = 300)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write every posterior draw of V̂ and F̂
    #[arg(long)]
    pub dump_draws: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Iip,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Functional {
    F,
    V,
}

#[derive(Debug, Args)]
pub struct UqArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "iip")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "f")]
    pub target: Functional,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, help = GRID_HELP, default_value = "0:10:200")]
    pub grid: String,
    /// Posterior draws, or resamples for the bootstrap
    #[arg(long, default_value_t = 300)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Coverage,
    Bvm,
    Widths,
}

impl From<KindArg> for ExperimentKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Coverage => Self::Coverage,
            KindArg::Bvm => Self::Bvm,
            KindArg::Widths => Self::Widths,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: KindArg,
    /// JSON object overriding the defaults; flags override the file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, help = MODEL_HELP)]
    pub model: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub roundtrip_tol: Option<f64>,
    #[arg(long)]
    pub arcsin_tol: Option<f64>,
    #[arg(long)]
    pub hull_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fewer measures and a coarser grid
    #[arg(long)]
    pub quick: bool,
    /// Also write the results as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Failed(_) => 1,
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<wicksell_core::Error> for CliError {
    fn from(e: wicksell_core::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<experiments::ExperimentError> for CliError {
    fn from(e: experiments::ExperimentError) -> Self {
        Self::Usage(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    write_text(path, text).map_err(|e| io_error(path, e))
}

fn load_data(args: &DataArgs) -> Result<(Vec<f64>, Value), CliError> {
    if let Some(path) = &args.data {
        let z = ingest::read_observations(path)?;
        Ok((z, json!({"data": path.display().to_string()})))
    } else {
        let path = args.positions.as_ref().expect("clap requires data or positions");
        let center = match args.center {
            CenterArg::Origin => wicksell_core::model::CenterMode::Origin,
            CenterArg::Centroid => wicksell_core::model::CenterMode::Centroid,
        };
        let set = ingest::ingest_positions(path, center)?;
        Ok((
            set.z_values,
            json!({"positions": path.display().to_string(), "center": center.as_str()}),
        ))
    }
}

fn prior_for(args: &PriorArgs, data: &[f64]) -> Result<BaseMeasureSpec, CliError> {
    Ok(match &args.prior {
        Some(f) => BaseMeasureSpec::parse(args.prior_mass, f)?,
        None => BaseMeasureSpec::new(
            args.prior_mass,
            BaseMeasureSpec::default_for(data)?.family().clone(),
        )?,
    })
}

fn extend(config: &mut Value, extra: Value) {
    if let (Value::Object(a), Value::Object(b)) = (config, extra) {
        a.extend(b);
    }
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let model = TrueModel::parse(&args.model)?;
    let set = sample_observables(&model, args.n, Seed(args.seed))?;
    let config = json!({
        "model": model.spec(),
        "n": args.n,
        "out": args.out.display().to_string(),
    });
    let header = RunHeader::new("simulate", args.seed, config);
    let mut table = CsvTable::new(header.clone(), &["z"]);
    for z in &set.z_values {
        table.push(vec![*z]);
    }
    write_file(&args.out, &table.render())?;

    let quad = Quadrature::with_tol(1e-10);
    let smooth = model.smoothness();
    let at = smooth.map(|s| s.at);
    let truth = match at {
        Some(x) => {
            let t = model_truth(&model, x, &quad)?;
            json!({"x": x, "cdf": t.cdf, "v0": t.v0, "g0": t.g0})
        }
        None => Value::Null,
    };
    let body = json!({
        "model": model.spec(),
        "support_end": model.support_end(),
        "smoothness": smooth.map(|s| json!({"gamma": s.gamma, "at": s.at, "k": s.k})),
        "truth": truth,
        "v0_at_zero": wicksell_core::v0_oracle(&model, 0.0, &quad)?,
        "n": args.n,
    });
    let sidecar = args.sidecar.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".json");
        PathBuf::from(p)
    });
    write_json(&sidecar, header, &body).map_err(|e| io_error(&sidecar, e))
}

fn column_means(e: &PosteriorEnsemble) -> Vec<f64> {
    (0..e.draws.cols())
        .map(|c| e.draws.column(c).iter().sum::<f64>() / e.draws.rows() as f64)
        .collect()
}

fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let (data, mut config) = load_data(&args.data)?;
    let queries = QueryGrid::parse(&args.grid)?;
    let prior = prior_for(&args.prior, &data)?;
    extend(
        &mut config,
        json!({
            "grid": args.grid,
            "draws": args.draws,
            "prior_mass": prior.total_mass(),
            "prior": prior.family_spec(),
            "out": args.out.display().to_string(),
        }),
    );
    let point = iie(&data, &queries)?;
    let settings = EnsembleSettings::new(Seed(args.seed), prior, args.draws);
    let pair = iip_ensemble(&data, &settings, &queries)?;
    let mean_v = column_means(&pair.v);
    let mean_f = column_means(&pair.f);
    let header = RunHeader::new("estimate", args.seed, config);
    let mut table = CsvTable::new(
        header.clone(),
        &["x", "vhat_n", "fhat_n", "mean_vhat_g", "mean_fhat_g"],
    );
    for (i, &x) in queries.points().iter().enumerate() {
        table.push(vec![x, point.v_values[i], point.f_values[i], mean_v[i], mean_f[i]]);
    }
    write_file(&args.out, &table.render())?;

    if let Some(path) = &args.dump_draws {
        let mut dump = CsvTable::new(header, &["draw", "x", "vhat_g", "fhat_g"]);
        for d in 0..pair.v.draws.rows() {
            for (i, &x) in queries.points().iter().enumerate() {
                dump.push(vec![d as f64, x, pair.v.draws.get(d, i), pair.f.draws.get(d, i)]);
            }
        }
        write_file(path, &dump.render())?;
    }
    Ok(())
}

fn uq(args: &UqArgs) -> Result<(), CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!("alpha {} must lie in (0, 1)", args.alpha)));
    }
    let (data, mut config) = load_data(&args.data)?;
    let queries = QueryGrid::parse(&args.grid)?;
    let method = match args.method {
        Method::Iip => "iip",
        Method::Bootstrap => "bootstrap",
    };
    let target = match args.target {
        Functional::F => "f",
        Functional::V => "v",
    };
    extend(
        &mut config,
        json!({
            "method": method,
            "target": target,
            "alpha": args.alpha,
            "grid": args.grid,
            "draws": args.draws,
            "out": args.out.display().to_string(),
        }),
    );
    let (band, point) = match args.method {
        Method::Iip => {
            let prior = prior_for(&args.prior, &data)?;
            extend(
                &mut config,
                json!({"prior_mass": prior.total_mass(), "prior": prior.family_spec()}),
            );
            let settings = EnsembleSettings::new(Seed(args.seed), prior, args.draws);
            let pair = iip_ensemble(&data, &settings, &queries)?;
            let ens = if args.target == Functional::F { &pair.f } else { &pair.v };
            (credible_band(ens, args.alpha)?, column_means(ens))
        }
        Method::Bootstrap => {
            let bands = bootstrap_iie_band(&data, args.draws, &queries, args.alpha, Seed(args.seed))?;
            let point = iie(&data, &queries)?;
            if args.target == Functional::F {
                (bands.f, point.f_values)
            } else {
                (bands.v, point.v_values)
            }
        }
    };
    let header = RunHeader::new("uq", args.seed, config);
    let mut table = CsvTable::new(header, &["x", "lower", "upper", "point"]);
    for (i, &x) in queries.points().iter().enumerate() {
        table.push(vec![x, band.lower[i], band.upper[i], point[i]]);
    }
    write_file(&args.out, &table.render())
}

fn experiment_settings(args: &ExperimentArgs) -> Result<ExperimentSettings, CliError> {
    let kind = ExperimentKind::from(args.kind);
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => json!({}),
    };
    let flags = json!({
        "model": args.model,
        "n": args.n,
        "x": args.x,
        "reps": args.reps,
        "draws": args.draws,
        "alpha": args.alpha,
        "bootstrap": args.bootstrap,
        "gammas": args.gammas,
    });
    if let (Value::Object(c), Value::Object(f)) = (&mut config, flags) {
        c.extend(f.into_iter().filter(|(_, v)| !v.is_null()));
    }
    let settings = ExperimentSettings::from_config(kind, &config)?;
    settings.validate(kind)?;
    Ok(settings)
}

fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let kind = ExperimentKind::from(args.kind);
    let settings = experiment_settings(args)?;
    let report = experiments::run(kind, &settings, Seed(args.seed))?;
    let config = json!({"experiment": kind.as_str(), "settings": &settings});
    let header = RunHeader::new("experiment", args.seed, config);
    match &args.out {
        Some(path) => write_json(path, header, &report).map_err(|e| io_error(path, e)),
        None => {
            let doc = crate::output::Document { header, body: &report };
            let text = serde_json::to_string_pretty(&doc).expect("report serializes");
            println!("{text}");
            Ok(())
        }
    }
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let mut cfg = if args.quick {
        VerifyConfig {
            arcsin_measures: 20,
            hull_measures: 10,
            hull_grid: 10_000,
            ..VerifyConfig::default()
        }
    } else {
        VerifyConfig::default()
    };
    if let Some(t) = args.roundtrip_tol {
        cfg.roundtrip_tol = t;
    }
    if let Some(t) = args.arcsin_tol {
        cfg.arcsin_tol = t;
    }
    if let Some(t) = args.hull_tol {
        cfg.hull_tol = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let results = verify::run_all(&cfg);
    let mut stdout = std::io::stdout().lock();
    for r in &results {
        let _ = writeln!(
            stdout,
            "{} {:<28} worst {:.3e} tol {:.1e} ({:.2} s) {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.worst,
            r.tolerance,
            r.seconds,
            r.detail
        );
    }
    if let Some(path) = &args.json {
        let header = RunHeader::new("verify", cfg.seed, serde_json::to_value(&cfg).expect("config"));
        write_json(path, header, &json!({"checks": results})).map_err(|e| io_error(path, e))?;
    }
    let failing: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failing checks: {}", failing.join(", "))))
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Uq(a) => uq(a),
        Command::Experiment(a) => experiment(a),
        Command::Verify(a) => run_verify(a),
    }
}

/// Parses `args`, runs the command on a pool sized by the environment and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match experiments::thread_pool().install(|| execute(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
