//! `varcos`: run the whitened-cosine KNN experiments from the command line.
//!
//! Reports go to stdout, diagnostics to stderr. Exit status is 0 on
//! success, 2 for input errors and 3 for numerical failures such as a class
//! covariance that is not positive definite.

mod manifest;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use varcos::data::{self, fig1_counterexample_with, Dataset};
use varcos::eval::{self, Case2Scope, CaseId, CaseOptions, CvMethod, CvSummary, SplitSpec};
use varcos::knn::KnnConfig;
use varcos::linalg::{CovarianceMatrix, EstimationMode, Matrix};
use varcos::Error;

use manifest::{to_json, CvManifest, RunManifest, SplitManifest};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "varcos", version, about = "KNN with variance-adjusted cosine distance")]
struct Cli {
    /// Worker threads for folds and validation points (output is identical for any value).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Record the wall-clock time in the run manifest. Off by default so repeated runs are byte-identical.
    #[arg(long, global = true)]
    timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classification report for one case on a seeded train/validation split.
    Report {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Leave-one-out or k-fold cross-validation accuracy.
    Cv {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_enum, default_value_t = Method::Loocv)]
        method: Method,
        /// Number of folds for `--method kfold`.
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Fold-assignment seed for `--method kfold`.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Validation misclassification rate for each k in a range, as CSV.
    SweepK {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 31)]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        format: SweepFormat,
    },
    /// Three 2-d points whose nearest neighbor flips once the cosine is whitened.
    DemoFig1 {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Search under an identity covariance instead (no flip is possible).
        #[arg(long)]
        isotropic: bool,
        #[arg(long, value_enum, default_value_t = DemoFormat::Text)]
        format: DemoFormat,
    },
}

#[derive(Args)]
struct DatasetArgs {
    /// WDBC file (`id,diagnosis,30 features`), or any CSV with `--label-column`.
    dataset: PathBuf,
    /// Read a headered CSV and take labels from this column.
    #[arg(long, requires = "positive")]
    label_column: Option<String>,
    /// Label value treated as the positive class (with `--label-column`).
    #[arg(long, requires = "label_column")]
    positive: Option<String>,
}

#[derive(Args)]
struct CaseArgs {
    /// 1 = raw cosine, 2 = per-class whitening with the true label, 3 = expected whitening from training data.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    case: u8,
    #[arg(long, default_value_t = KnnConfig::DEFAULT_K)]
    k: usize,
    /// Points feeding case 2's class covariances in single-split runs.
    #[arg(long, value_enum, default_value_t = Scope::All)]
    case2_scope: Scope,
    /// Add a small multiple of the mean variance to each covariance diagonal before factorizing.
    #[arg(long)]
    jitter: bool,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Training fraction.
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    /// Shuffle without preserving class proportions.
    #[arg(long)]
    no_stratify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Loocv,
    Kfold,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    All,
    Train,
}

impl Scope {
    fn into_core(self) -> Case2Scope {
        match self {
            Scope::All => Case2Scope::AllData,
            Scope::Train => Case2Scope::TrainingOnly,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Scope::All => "all",
            Scope::Train => "train",
        }
    }
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl DatasetArgs {
    fn load(&self) -> Result<Dataset, CliError> {
        let ds = match (&self.label_column, &self.positive) {
            (Some(column), Some(positive)) => data::load_generic_csv(&self.dataset, column, positive)?,
            _ => data::load_wdbc(&self.dataset)?,
        };
        let (pos, neg) = ds.class_counts();
        log::info!(
            "loaded {} points ({} {}, {} {}) with {} features from {}",
            ds.len(),
            pos,
            ds.label_names.positive,
            neg,
            ds.label_names.negative,
            ds.dim(),
            self.dataset.display()
        );
        Ok(ds)
    }
}

impl CaseArgs {
    fn case_id(&self) -> CaseId {
        CaseId::try_from(self.case).expect("clap restricts --case to 1..=3")
    }

    fn options(&self) -> CaseOptions {
        let mut opts = CaseOptions::new(self.k);
        opts.case2_scope = self.case2_scope.into_core();
        opts.jitter = self.jitter;
        opts
    }

    fn fill(&self, m: &mut RunManifest) {
        m.case = Some(self.case);
        m.jitter = self.jitter;
        if self.case_id() == CaseId::PerClassOracle {
            m.case2_scope = Some(self.case2_scope.name());
        }
    }
}

impl SplitArgs {
    fn spec(&self) -> Result<SplitSpec, CliError> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(CliError::Usage(format!("--split must lie strictly between 0 and 1, got {}", self.split)));
        }
        Ok(SplitSpec {
            train_fraction: self.split,
            seed: self.seed,
            stratified: !self.no_stratify,
        })
    }

    fn fill(&self, m: &mut RunManifest) {
        m.seed = Some(self.seed);
        m.split = Some(SplitManifest {
            train_fraction: self.split,
            stratified: !self.no_stratify,
        });
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::Report {
            dataset,
            case,
            split,
            format,
        } => {
            let mut m = RunManifest::new("report");
            m.dataset = Some(dataset.dataset.display().to_string());
            m.k = Some(case.k);
            case.fill(&mut m);
            split.fill(&mut m);
            m.stamp(cli.timestamp);
            let ds = dataset.load()?;
            let report = eval::run_case_with(&ds, case.case_id(), &split.spec()?, &case.options())?;
            Ok(match format {
                Format::Table => format!("{}{}\n", report.render_table(), m.comment()),
                Format::Csv => format!("{}{}\n", report.render_csv(), m.comment()),
                Format::Json => to_json(&m, ReportBody { report: &report }) + "\n",
            })
        }
        Command::Cv {
            dataset,
            case,
            method,
            folds,
            seed,
            format,
        } => {
            let mut m = RunManifest::new("cv");
            m.dataset = Some(dataset.dataset.display().to_string());
            m.k = Some(case.k);
            case.fill(&mut m);
            let ds = dataset.load()?;
            let summary = match method {
                Method::Loocv => {
                    m.cv = Some(CvManifest {
                        method: "loocv",
                        folds: ds.len(),
                    });
                    eval::loocv_with(&ds, case.case_id(), &case.options())?
                }
                Method::Kfold => {
                    m.seed = Some(seed);
                    m.cv = Some(CvManifest { method: "kfold", folds });
                    eval::kfold_cv_with(&ds, case.case_id(), &case.options(), folds, seed)?
                }
            };
            m.stamp(cli.timestamp);
            Ok(match format {
                Format::Table => format!("{}{}\n", render_cv_table(&summary), m.comment()),
                Format::Csv => format!("{}{}\n", render_cv_csv(&summary), m.comment()),
                Format::Json => to_json(&m, CvBody { cv: &summary }) + "\n",
            })
        }
        Command::SweepK {
            dataset,
            case,
            split,
            k_min,
            k_max,
            format,
        } => {
            if k_min == 0 || k_min > k_max {
                return Err(CliError::Usage(format!(
                    "need 1 <= --k-min <= --k-max, got {k_min}..{k_max}"
                )));
            }
            let mut m = RunManifest::new("sweep-k");
            m.dataset = Some(dataset.dataset.display().to_string());
            m.k_range = Some([k_min, k_max]);
            case.fill(&mut m);
            split.fill(&mut m);
            m.stamp(cli.timestamp);
            let ds = dataset.load()?;
            let sweep = eval::sweep_case(&ds, case.case_id(), &split.spec()?, k_min..=k_max, &case.options())?;
            Ok(match format {
                SweepFormat::Csv => {
                    let best = sweep.rows.iter().find(|r| r.k == sweep.best_k).expect("best k is a row");
                    format!(
                        "{}# argmin: k={} misclassification_rate={}\n{}\n",
                        sweep.render_csv(),
                        best.k,
                        best.misclassification_rate,
                        m.comment()
                    )
                }
                SweepFormat::Json => to_json(&m, SweepBody { sweep: &sweep }) + "\n",
            })
        }
        Command::DemoFig1 {
            seed,
            isotropic,
            format,
        } => {
            let mut m = RunManifest::new("demo-fig1");
            m.seed = Some(seed);
            m.stamp(cli.timestamp);
            let cov = if isotropic {
                CovarianceMatrix::new(Matrix::identity(2), EstimationMode::Population, 2)?
            } else {
                data::fig1_covariance()
            };
            let found = match fig1_counterexample_with(&cov, seed) {
                Ok(c) => Some(c),
                Err(Error::CounterexampleInapplicable) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(match format {
                DemoFormat::Json => {
                    to_json(
                        &m,
                        DemoBody {
                            flip_possible: found.is_some(),
                            counterexample: found.as_ref(),
                        },
                    ) + "\n"
                }
                DemoFormat::Text => match &found {
                    Some(c) => format!("{}{}\n", render_demo(c), m.comment()),
                    None => format!(
                        "no flip possible: the covariance is isotropic, so whitening leaves every cosine ranking unchanged\n{}\n",
                        m.comment()
                    ),
                },
            })
        }
    }
}

#[derive(Serialize)]
struct ReportBody<'a> {
    report: &'a eval::EvaluationReport,
}

#[derive(Serialize)]
struct CvBody<'a> {
    cv: &'a CvSummary,
}

#[derive(Serialize)]
struct SweepBody<'a> {
    sweep: &'a varcos::knn::SweepResult,
}

#[derive(Serialize)]
struct DemoBody<'a> {
    flip_possible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<&'a data::Counterexample>,
}

fn render_cv_table(s: &CvSummary) -> String {
    let mut out = String::new();
    let method = match s.method {
        CvMethod::Loocv => "leave-one-out".to_string(),
        CvMethod::Kfold => format!("{}-fold (seed {})", s.folds.len(), s.seed.unwrap_or_default()),
    };
    let _ = writeln!(out, "{}, k = {}, {}", s.case, s.k, method);
    let _ = writeln!(out, "mean accuracy: {:.4}", s.mean_accuracy);
    let correct: usize = s.folds.iter().map(|f| f.correct).sum();
    let total: usize = s.folds.iter().map(|f| f.size).sum();
    match s.method {
        CvMethod::Loocv => {
            let _ = writeln!(out, "{} folds of one point, {correct}/{total} correct", s.folds.len());
        }
        CvMethod::Kfold => {
            for f in &s.folds {
                let _ = writeln!(out, "fold {}: {}/{} correct ({:.4})", f.fold, f.correct, f.size, f.accuracy);
            }
        }
    }
    out
}

fn render_cv_csv(s: &CvSummary) -> String {
    let mut out = String::from("fold,size,correct,accuracy\n");
    for f in &s.folds {
        let _ = writeln!(out, "{},{},{},{}", f.fold, f.size, f.correct, f.accuracy);
    }
    let _ = writeln!(out, "# mean_accuracy: {}", s.mean_accuracy);
    out
}

fn render_demo(c: &data::Counterexample) -> String {
    let m = c.covariance.matrix();
    let point = |p: &[f64]| format!("({:.6}, {:.6})", p[0], p[1]);
    let closer = |prefers_a: bool| if prefers_a { "A" } else { "C" };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "covariance [[{}, {}], [{}, {}]], mean 0, seed {}, found after {} attempts",
        m[(0, 0)],
        m[(0, 1)],
        m[(1, 0)],
        m[(1, 1)],
        c.seed,
        c.attempts
    );
    let _ = writeln!(out, "A = {}  (outside the 3-sigma ellipse)", point(&c.a));
    let _ = writeln!(out, "B = {}", point(&c.b));
    let _ = writeln!(out, "C = {}", point(&c.c));
    for (name, pc) in [("plain cosine", c.plain), ("adjusted cosine", c.adjusted)] {
        let _ = writeln!(
            out,
            "{name:<16} cos(A,B) = {:>8.4}  cos(B,C) = {:>8.4}  B is closer to {}",
            pc.a_b,
            pc.b_c,
            closer(pc.prefers_a())
        );
    }
    let _ = writeln!(
        out,
        "plain cosine: {}≻{}; adjusted: {}≻{}",
        closer(c.plain.prefers_a()),
        closer(!c.plain.prefers_a()),
        closer(c.adjusted.prefers_a()),
        closer(!c.adjusted.prefers_a())
    );
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
