use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use satgraph::data::Task;
use satgraph::ReadoutMode;
use satgraph_cli::commands::{
    cmd_ablate, cmd_eval, cmd_gradcheck, cmd_noise_sweep, cmd_synth, cmd_train, describe,
};
use satgraph_cli::{Ablation, CliError, RunConfig};

/// Graph neural network user-satisfaction classifier.
///
/// Exit codes: 0 success, 2 config error, 3 data error, 4 runtime failure.
/// Set SATGRAPH_LOG=error|warn|info|debug for diagnostics on stderr.
#[derive(Parser)]
#[command(name = "satgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on a CSV dataset or generated data and report test metrics.
    Train(RunArgs),
    /// Score a checkpoint on a CSV dataset.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Retrain under injected training-label noise for each (rate, seed).
    NoiseSweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated noise rates, e.g. 0,0.1,0.2
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        /// Comma-separated noise seeds
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Compare architecture variants over several training seeds.
    Ablate {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated training seeds
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Comma-separated variants
        #[arg(long, value_delimiter = ',', value_enum)]
        variants: Option<Vec<Ablation>>,
    },
    /// Write a synthetic dataset as CSV plus schema.
    Synth {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        task: Option<TaskArg>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_graphs: Option<usize>,
        #[arg(long)]
        min_nodes: Option<usize>,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic gradients with central finite differences.
    Gradcheck {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run config, or a report file from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    ablation: Option<Ablation>,
    #[arg(long, value_enum)]
    readout: Option<ReadoutArg>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ReadoutArg {
    Mean,
    Max,
    Attention,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum TaskArg {
    Motif,
    DistinguishedNeighbor,
}

impl RunArgs {
    /// Config file values overridden by flags.
    fn base(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        if let Some(a) = self.ablation {
            cfg.ablation = a;
        }
        if let Some(r) = self.readout {
            cfg.model.readout = match r {
                ReadoutArg::Mean => ReadoutMode::Mean,
                ReadoutArg::Max => ReadoutMode::Max,
                ReadoutArg::Attention => ReadoutMode::Attention,
            };
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => {
            let cfg = args.base()?.resolve()?;
            let (run, files) = cmd_train(&cfg)?;
            println!("run {}", run.run_id);
            println!("test: {}", describe(&run.report.test));
            println!("report: {}", files.report.display());
            println!("history: {}", files.history.display());
            println!("checkpoint: {}", files.checkpoint.display());
            println!("test split: {} ({})", files.test_csv.display(), files.test_schema.display());
        }
        Command::Eval {
            checkpoint,
            dataset,
            schema,
            out,
        } => {
            let (report, path) = cmd_eval(&checkpoint, &dataset, &schema, &out)?;
            println!("eval: {}", describe(&report.metrics));
            println!("report: {}", path.display());
        }
        Command::NoiseSweep { run, rates, seeds } => {
            let mut cfg = run.base()?;
            if let Some(r) = rates {
                cfg.sweep.rates = r;
            }
            if let Some(s) = seeds {
                cfg.sweep.seeds = s;
            }
            let cfg = cfg.resolve()?;
            let (sweep, report, csv) = cmd_noise_sweep(&cfg)?;
            for p in &sweep.report.points {
                println!(
                    "rate {:<5} mean f1 {:.4} ± {:.4} ({} runs)",
                    p.noise_rate, p.mean_f1, p.std_error_f1, p.runs
                );
            }
            match sweep.report.spearman_rate_f1 {
                Some(r) => println!("spearman(rate, mean f1) = {r:.4}"),
                None => println!("spearman(rate, mean f1) undefined"),
            }
            println!("report: {}", report.display());
            println!("rows: {}", csv.display());
        }
        Command::Ablate { run, seeds, variants } => {
            let mut cfg = run.base()?;
            if let Some(s) = seeds {
                cfg.ablate.seeds = s;
            }
            if let Some(v) = variants {
                cfg.ablate.variants = v;
            }
            let cfg = cfg.resolve()?;
            let (abl, report, csv) = cmd_ablate(&cfg)?;
            for v in &abl.report.variants {
                println!(
                    "{:<15} mean f1 {:.4} ± {:.4}  mean accuracy {:.4} ({} runs)",
                    v.ablation.name(),
                    v.mean_f1,
                    v.std_error_f1,
                    v.mean_accuracy,
                    v.runs
                );
            }
            println!("report: {}", report.display());
            println!("rows: {}", csv.display());
        }
        Command::Synth {
            config,
            task,
            seed,
            n_graphs,
            min_nodes,
            max_nodes,
            out,
        } => {
            let base = match &config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            let mut synth = base.synth;
            if let Some(t) = task {
                synth.task = match t {
                    TaskArg::Motif => Task::Motif,
                    TaskArg::DistinguishedNeighbor => Task::DistinguishedNeighbor,
                };
            }
            synth.seed = seed.unwrap_or(synth.seed);
            synth.n_graphs = n_graphs.unwrap_or(synth.n_graphs);
            synth.min_nodes = min_nodes.unwrap_or(synth.min_nodes);
            synth.max_nodes = max_nodes.unwrap_or(synth.max_nodes);
            let out = out.unwrap_or(base.out_dir);
            let (csv, schema) = cmd_synth(&synth, &out)?;
            println!("dataset: {}", csv.display());
            println!("schema: {}", schema.display());
        }
        Command::Gradcheck { run, trials } => {
            let cfg = run.base()?.resolve()?;
            let report = cmd_gradcheck(&cfg, trials)?;
            for t in &report.tensors {
                println!(
                    "{:<14} max rel {:.3e}  max abs {:.3e}  ({} entries)",
                    t.name, t.max_rel_error, t.max_abs_error, t.entries_checked
                );
            }
            const TOLERANCE: f64 = 1e-4;
            if !report.passes(TOLERANCE) {
                return Err(CliError::Runtime(format!(
                    "gradient check failed: worst relative error {:.3e} ≥ {TOLERANCE:e}",
                    report.worst()
                )));
            }
            println!("ok: worst relative error {:.3e} over {} trials", report.worst(), report.trials);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SATGRAPH_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("satgraph: {}", e.one_line());
            ExitCode::from(e.exit_code())
        }
    }
}
