//! `canonreg` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use canonreg::dataset::{
    doe_full_factorial, doe_latin_hypercube, load_csv_target_or_last, load_points_csv, scale_target_log10,
    write_points_csv, Dataset, DatasetError, DoePlan, SyntheticOracle,
};
use canonreg::pipeline::{
    benchmark_data, benchmark_passes, export, load_model_document, run_pipeline, ConfigError, ExportError,
    PipelineError, RunConfig, TradeoffSet,
};

#[derive(Parser)]
#[command(name = "canonreg", version, about = "Template-free symbolic regression")]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve, simplify and filter models; write the front to a directory.
    Run(RunArgs),
    /// Generate design points around a center.
    Sample(SampleArgs),
    /// Evaluate an exported model on a data file.
    Eval(EvalArgs),
    /// Run the full flow on a synthetic benchmark.
    Bench(BenchArgs),
}

#[derive(clap::Args)]
struct Overrides {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    /// Cap on evaluation threads.
    #[arg(long)]
    threads: Option<usize>,
}

impl Overrides {
    fn resolve(&self, base: RunConfig) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).map_err(CliError::config)?,
            None => base,
        };
        let mut set = |k: &str, v: Option<String>| match v {
            Some(v) => cfg.set(k, &v).map_err(CliError::config),
            None => Ok(()),
        };
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("generations", self.generations.map(|v| v.to_string()))?;
        set("population", self.population.map(|v| v.to_string()))?;
        set("threads", self.threads.map(|v| v.to_string()))?;
        Ok(cfg)
    }
}

#[derive(clap::Args)]
struct RunArgs {
    /// Training data CSV with a header row.
    #[arg(long)]
    train: PathBuf,
    /// Test data CSV; defaults to the training data.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Target column name (default: last column).
    #[arg(long)]
    target: Option<String>,
    /// Model log10 of the target.
    #[arg(long)]
    log_target: bool,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Factorial,
    Lhs,
}

#[derive(clap::Args)]
struct SampleArgs {
    /// CSV with a header of variable names and one row of center values.
    #[arg(long)]
    centers: PathBuf,
    /// Relative perturbation per variable.
    #[arg(long)]
    dx: f64,
    #[arg(long, value_enum, default_value = "factorial")]
    mode: Mode,
    /// Sample count for Latin hypercube mode.
    #[arg(long)]
    n: Option<usize>,
    /// Largest sample count a full factorial may produce.
    #[arg(long, default_value_t = DoePlan::DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// A `model_<id>.json` file written by `run`.
    #[arg(long)]
    model: PathBuf,
    /// Data CSV; the target column is optional.
    #[arg(long)]
    data: PathBuf,
    /// Predictions CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// pm_like, srp_like or offset_like.
    #[arg(long)]
    suite: String,
    /// Also export the front here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(e: ConfigError) -> Self {
        Self { code: 2, message: e.to_string() }
    }

    fn data(e: impl std::fmt::Display) -> Self {
        Self { code: 3, message: e.to_string() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(c) => Self::config(c),
            PipelineError::Data(d) => Self::data(d),
            PipelineError::Threads(t) => Self::usage(t),
        }
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        Self::data(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn load_data(path: &Path, target: Option<&str>, log_target: bool) -> Result<Dataset, CliError> {
    let with_path = |e: DatasetError| CliError::data(format!("{}: {e}", path.display()));
    let ds = load_csv_target_or_last(path, target).map_err(with_path)?;
    if log_target {
        scale_target_log10(&ds).map_err(with_path)
    } else {
        Ok(ds)
    }
}

fn print_front(ts: &TradeoffSet, sig_figs: usize) {
    let texts = ts.texts(sig_figs);
    let rows: Vec<[String; 5]> = ts
        .models
        .iter()
        .enumerate()
        .map(|(id, m)| {
            [
                id.to_string(),
                format!("{:.2}", m.complexity),
                m.n_bases().to_string(),
                format!("{:.4}", m.train_error),
                m.test_error.map(|e| format!("{e:.4}")).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    let header = ["id", "complexity", "bases", "train_%", "test_%"];
    let mut width = header.map(str::len);
    for r in &rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: [&str; 5], text: &str| {
        let cols: Vec<String> = cells.iter().zip(width).map(|(c, w)| format!("{c:>w$}")).collect();
        println!("{}  {text}", cols.join("  "));
    };
    line(header, "model");
    for (r, text) in rows.iter().zip(&texts) {
        line([&r[0], &r[1], &r[2], &r[3], &r[4]], text);
    }
}

fn cmd_run(a: RunArgs) -> Result<(), CliError> {
    let cfg = a.overrides.resolve(RunConfig::default())?;
    let grammar = cfg.load_grammar().map_err(CliError::config)?;
    let train = load_data(&a.train, a.target.as_deref(), a.log_target)?;
    let test = match &a.test {
        Some(p) => load_data(p, Some(&train.target_name), a.log_target)?,
        None => train.clone(),
    };
    let out = run_pipeline(&cfg, &grammar, &train, &test)?;
    export(&out.front, &a.out, &cfg, &grammar)?;
    print_front(&out.front, cfg.sig_figs);
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Result<(), CliError> {
    let (names, rows) = load_points_csv(&a.centers).map_err(|e| CliError::data(format!("{}: {e}", a.centers.display())))?;
    let [centers] = rows.as_slice() else {
        return Err(CliError::data(format!("{}: expected exactly one row of centers", a.centers.display())));
    };
    let plan = DoePlan { budget: a.budget, ..DoePlan::new(centers.clone(), a.dx) };
    let points = match a.mode {
        Mode::Factorial => doe_full_factorial(&plan).map_err(|e| match e {
            DatasetError::BudgetExceeded { .. } => CliError::usage(format!("{e} (--mode lhs --n <count>)")),
            other => CliError::usage(other.to_string()),
        })?,
        Mode::Lhs => {
            let n = a.n.ok_or_else(|| CliError::usage("--mode lhs requires --n"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            doe_latin_hypercube(&plan, n, &mut rng).map_err(|e| CliError::usage(e.to_string()))?
        }
    };
    match &a.out {
        Some(p) => write_points_csv(&names, &points, p).map_err(CliError::data)?,
        None => {
            println!("{}", names.join(","));
            for row in &points {
                println!("{}", row.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
            }
        }
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<(), CliError> {
    let doc = load_model_document(&a.model).map_err(CliError::data)?;
    let data_err = |e: DatasetError| CliError::data(format!("{}: {e}", a.data.display()));
    let (names, rows) = load_points_csv(&a.data).map_err(data_err)?;
    let has_target = names.contains(&doc.target);
    let ds = if has_target {
        load_data(&a.data, Some(&doc.target), doc.target_log_scaled)?
    } else {
        let cols: Vec<Vec<f64>> = (0..names.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let n = rows.len();
        Dataset::from_columns(names, cols, vec![0.0; n], doc.target.clone()).map_err(data_err)?
    };
    let (pred, err) = doc.evaluate(&ds).map_err(data_err)?;
    let pred: Vec<f64> = if doc.target_log_scaled { pred.iter().map(|p| 10f64.powf(*p)).collect() } else { pred };
    if has_target {
        println!("error_pct = {err}");
    }
    let mut text = String::from("prediction\n");
    for p in &pred {
        text.push_str(&format!("{p}\n"));
    }
    match &a.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let oracle = SyntheticOracle::from_name(&a.suite).map_err(|e| CliError::usage(e.to_string()))?;
    let cfg = a.overrides.resolve(RunConfig { generations: 100, ..RunConfig::default() })?;
    let grammar = cfg.load_grammar().map_err(CliError::config)?;
    let (train, test) = benchmark_data(oracle).map_err(CliError::data)?;
    let start = Instant::now();
    let out = run_pipeline(&cfg, &grammar, &train, &test)?;
    let secs = start.elapsed().as_secs_f64();
    if let Some(dir) = &a.out {
        export(&out.front, dir, &cfg, &grammar)?;
    }
    print_front(&out.front, cfg.sig_figs);
    println!(
        "suite {} seed {}: {} generations, population {}, {:.1} s",
        oracle.name(),
        cfg.seed,
        cfg.generations,
        cfg.population,
        secs
    );
    let verdict = if benchmark_passes(&out.front) { "PASS" } else { "FAIL" };
    println!("{verdict}: some model within 5% train and test error");
    Ok(())
}
