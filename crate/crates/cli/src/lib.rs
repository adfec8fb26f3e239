//! Command-line front end for `bique`.
//!
//! Exit codes: 0 on success, 1 when a computation fails or a check does not
//! pass, 2 for usage errors (bad flags, missing input files).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use bique::algebra::{factorize, factorize_right, Biquaternion, Factorization};
use bique::data::{load_graph, FilterIndex, Split};
use bique::eval::evaluate_parallel;
use bique::gradcheck::{check_gradients, random_instance, Coordinate, Table};
use bique::model::Mode;
use bique::rotate::{trajectory, write_csv, PlanePoint};
use bique::selftest;
use bique::train::{load_checkpoint, save_checkpoint, train_logged, Preset, TrainConfig};

#[derive(Debug, Parser)]
#[command(name = "bique", version, about = "Biquaternion knowledge-graph embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write its best checkpoint.
    Train(TrainArgs),
    /// Evaluate a checkpoint with filtered BOTTOM ranking.
    Eval(EvalArgs),
    /// Compare analytic gradients with finite differences on a random instance.
    Gradcheck(GradcheckArgs),
    /// Split a unit biquaternion into hyperbolic and circular rotations.
    Factorize(FactorizeArgs),
    /// Trace a hyperbolic rotation in the (w, x) plane as CSV.
    RotateDemo(RotateArgs),
    /// Run the algebra, gradient and ranking property suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub valid: PathBuf,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Start from a benchmark's tuned settings (wn18rr, fb15k-237,
    /// yago3-10, cn-100k, atomic); explicit flags still win.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Biquaternions per embedding.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Validate every N epochs (0 disables).
    #[arg(long)]
    pub eval_every: Option<usize>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Checkpoint path.
    #[arg(long, default_value = "bique.ckpt")]
    pub out: PathBuf,
    /// JSONL training log; defaults to the checkpoint path plus `.log.jsonl`.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Write the test report as JSON here (needs --test).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl TrainArgs {
    pub fn config(&self) -> TrainConfig {
        let mut c = self.preset.map(Preset::config).unwrap_or_default();
        macro_rules! apply {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { c.$field = v; })*
            };
        }
        apply!(dim => k, epochs => epochs, lr => lr, batch => batch_size, lambda => lambda,
               lambda1 => lambda1, lambda2 => lambda2, seed => seed, eval_every => eval_every,
               mode => mode, threads => threads);
        c
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// The split files the checkpoint was trained with; they fix the ids.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub valid: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    pub split: Split,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write the report as JSON here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write per-relation metrics as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Central-difference step.
    #[arg(long, visible_alias = "steps", default_value_t = 1e-5)]
    pub step: f64,
    /// Largest acceptable relative error.
    #[arg(long, visible_alias = "threshold", default_value_t = 1e-4)]
    pub tolerance: f64,
    #[arg(long, default_value = "full")]
    pub mode: Mode,
    #[arg(long, hide = true)]
    pub corrupt_gradient: bool,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    /// w_r w_i x_r x_i y_r y_i z_r z_i
    #[arg(num_args = 8, value_names = ["W_R", "W_I", "X_R", "X_I", "Y_R", "Y_I", "Z_R", "Z_I"], allow_negative_numbers = true)]
    pub coefficients: Vec<f64>,
    /// Divide by the (complex) norm before factorizing.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct RotateArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub w_r: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub w_i: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub x_r: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub x_i: f64,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub phi_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub phi_max: f64,
    #[arg(long, default_value_t = 81, value_parser = clap::value_parser!(u64).range(2..))]
    pub steps: u64,
    /// CSV output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

enum Failure {
    Usage(String),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Gradcheck(a) => cmd_gradcheck(&a),
        Command::Factorize(a) => cmd_factorize(&a),
        Command::RotateDemo(a) => cmd_rotate(&a),
        Command::Selftest(a) => cmd_selftest(&a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn require_files<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Outcome {
    for p in paths {
        if !p.is_file() {
            return Err(Failure::Usage(format!("input file `{}` does not exist", p.display())));
        }
    }
    Ok(())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn cmd_train(a: &TrainArgs) -> Outcome {
    require_files([a.train.as_path(), a.valid.as_path()].into_iter().chain(a.test.as_deref()))?;
    let config = a.config();
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let kg = load_graph(&a.train, Some(&a.valid), a.test.as_deref()).context("loading graph")?;
    println!("seed {}", config.seed);
    println!(
        "entities {}  relations {} (with reciprocals)  train {}  valid {}  test {}",
        kg.n_entities(),
        kg.n_relations(),
        kg.train.len(),
        kg.valid.len(),
        kg.test.len()
    );

    let log_path = a.log.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".log.jsonl");
        PathBuf::from(p)
    });
    let mut log = create(&log_path)?;
    let outcome = train_logged(&kg, &config, &mut log).context("training")?;
    log.flush().context("writing log")?;
    save_checkpoint(&outcome.best, &a.out).context("saving checkpoint")?;

    if let Some(last) = outcome.log.last() {
        println!("final mean batch loss {:.6}", last.mean_batch_loss);
    }
    match (outcome.best_epoch, outcome.best_valid_mrr) {
        (Some(e), Some(m)) => println!("best validation MRR {m:.4} at epoch {e}"),
        _ => println!("no validation run; keeping the final parameters"),
    }
    println!("checkpoint {}", a.out.display());
    println!("log {}", log_path.display());

    if a.test.is_some() && !kg.test.is_empty() {
        let filter = FilterIndex::build(&kg);
        let report = evaluate_parallel(&outcome.best, &kg, Split::Test, &filter, config.threads)
            .context("evaluating test split")?;
        println!("\ntest\n{}", report.to_table());
        if let Some(p) = &a.report {
            std::fs::write(p, report.to_json()).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Outcome {
    require_files(
        [a.checkpoint.as_path(), a.train.as_path()].into_iter().chain(a.valid.as_deref()).chain(a.test.as_deref()),
    )?;
    let kg = load_graph(&a.train, a.valid.as_deref(), a.test.as_deref()).context("loading graph")?;
    let params = load_checkpoint(&a.checkpoint).context("loading checkpoint")?;
    println!("seed {}", params.seed);
    let filter = FilterIndex::build(&kg);
    let report = evaluate_parallel(&params, &kg, a.split, &filter, a.threads).context("evaluating")?;
    println!("{}", report.to_table());
    if let Some(p) = &a.report {
        std::fs::write(p, report.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &a.csv {
        let mut w = create(p)?;
        report.write_relation_csv(&mut w).context("writing csv")?;
    }
    Ok(())
}

fn cmd_gradcheck(a: &GradcheckArgs) -> Outcome {
    if !(a.step > 0.0) {
        return Err(Failure::Usage("--step must be positive".into()));
    }
    println!("seed {}", a.seed);
    let inst = random_instance(a.seed, a.mode);
    let corrupt = a.corrupt_gradient.then(|| Coordinate {
        table: Table::RelRotate,
        row: inst.batch[0].relation as usize,
        col: 0,
    });
    let report = check_gradients(&inst, a.step, corrupt).context("evaluating loss")?;
    println!("mode {}  step {:e}  coordinates {}", a.mode, a.step, report.checked);
    println!("max relative error {:.3e} (tolerance {:e})", report.max_rel_error, a.tolerance);
    if report.passes(a.tolerance) {
        println!("PASS");
        return Ok(());
    }
    let detail = report
        .worst
        .map(|w| {
            format!(
                "worst coordinate {:?} row {} col {}: analytic {:.9e}, numeric {:.9e}",
                w.coordinate.table, w.coordinate.row, w.coordinate.col, w.analytic, w.numeric
            )
        })
        .unwrap_or_default();
    println!("FAIL");
    Err(Failure::Compute(anyhow::anyhow!("gradient check failed; {detail}")))
}

fn print_factorization(label: &str, f: &Factorization, target: &Biquaternion) {
    let err = f.reconstruct().max_abs_diff(&target.matrix_rep());
    println!("{label}");
    println!("  theta  {:.12}", f.theta);
    println!("  phi    {:.12}", f.phi);
    println!("  axis   ({:.12}, {:.12}, {:.12})", f.axis[0], f.axis[1], f.axis[2]);
    if let Some(d) = f.degeneracy {
        println!("  degenerate: {d:?}");
    }
    println!("  reconstruction error {err:.3e}");
}

fn cmd_factorize(a: &FactorizeArgs) -> Outcome {
    let r: [f64; 8] = a.coefficients.as_slice().try_into().map_err(|_| Failure::Usage("need 8 reals".into()))?;
    let mut q = Biquaternion::from_reals(r);
    if a.normalize {
        q = q.normalized().context("normalizing")?;
    }
    let left = factorize(q).context("factorizing")?;
    let right = factorize_right(q).context("factorizing")?;
    print_factorization("M(q) = M(h) M(u)", &left, &q);
    print_factorization("M(q) = M(u) M(h')", &right, &q);
    Ok(())
}

fn cmd_rotate(a: &RotateArgs) -> Outcome {
    let p = PlanePoint { w_r: a.w_r, w_i: a.w_i, x_r: a.x_r, x_i: a.x_i };
    let rows = trajectory(p, a.phi_min, a.phi_max, a.steps as usize).map_err(|e| Failure::Usage(e.to_string()))?;
    match &a.out {
        Some(path) => {
            write_csv(&rows, create(path)?).context("writing csv")?;
            println!("{} rows written to {}", rows.len(), path.display());
        }
        None => write_csv(&rows, io::stdout().lock()).context("writing csv")?,
    }
    Ok(())
}

fn cmd_selftest(a: &SelftestArgs) -> Outcome {
    println!("seed {}", a.seed);
    let results = selftest::run_all(a.seed);
    for s in &results {
        println!(
            "{:<14} {:>5} cases  max error {:.3e}  tolerance {:.0e}  {}",
            s.name,
            s.cases,
            s.max_error,
            s.tolerance,
            if s.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed: Vec<_> = results.iter().filter(|s| !s.passed).map(|s| s.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Compute(anyhow::anyhow!("failing suites: {}", failed.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn train_defaults_are_wn18rr() {
        let cli = Cli::try_parse_from(["bique", "train", "--train", "a", "--valid", "b"]).unwrap();
        let Command::Train(a) = cli.command else { panic!() };
        assert_eq!(a.config(), TrainConfig::default());
    }

    #[test]
    fn flags_override_preset() {
        let cli = Cli::try_parse_from([
            "bique", "train", "--train", "a", "--valid", "b", "--preset", "fb15k-237", "--batch", "64",
        ])
        .unwrap();
        let Command::Train(a) = cli.command else { panic!() };
        let c = a.config();
        assert_eq!((c.epochs, c.batch_size, c.lambda), (300, 64, 7e-2));
    }
}
