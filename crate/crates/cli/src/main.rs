use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use kic_cli::experiments::{self, render_score_table, Sampling};
use kic_cli::{exit_code, with_jobs, RunConfig};
use kic_core::{Criterion, FamilyKind, TargetColumn};

/// Kernel ridge regression model-selection experiments.
#[derive(Debug, Parser)]
#[command(name = "kic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complexity, fit and KIC over alpha on the regular-grid sinc.
    Exp1(Args),
    /// KIC and test MSE over alpha per (n, NSR) setting.
    Exp2(Args),
    /// Test-MSE distributions of selected models, Gaussian vs Cauchy kernel.
    Exp3(Args),
    /// Joint (alpha, sigma) selection frequencies per criterion.
    Exp4(Args),
    /// Random-split benchmark on a CSV dataset.
    Bench(Args),
    /// Score one dataset at one (alpha, kernel); prints one row per criterion.
    Score(Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Exp1(_) => "exp1",
            Command::Exp2(_) => "exp2",
            Command::Exp3(_) => "exp3",
            Command::Exp4(_) => "exp4",
            Command::Bench(_) => "bench",
            Command::Score(_) => "score",
        }
    }

    fn args(&self) -> &Args {
        match self {
            Command::Exp1(a)
            | Command::Exp2(a)
            | Command::Exp3(a)
            | Command::Exp4(a)
            | Command::Bench(a)
            | Command::Score(a) => a,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
struct Args {
    /// Base seed; trial t uses seed + t.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Training sizes to run (comma separated).
    #[arg(long, value_delimiter = ',')]
    n_train: Option<Vec<usize>>,
    /// Noise-to-signal ratios to run (comma separated).
    #[arg(long, value_delimiter = ',')]
    nsr: Option<Vec<f64>>,
    /// Kernel family: gaussian or cauchy.
    #[arg(long)]
    kernel: Option<FamilyKind>,
    /// Gaussian width for fixed-kernel runs.
    #[arg(long)]
    sigma: Option<f64>,
    /// Cauchy exponent for fixed-kernel runs.
    #[arg(long)]
    eta: Option<f64>,
    /// Ridge parameter for `score`.
    #[arg(long)]
    alpha: Option<f64>,
    /// Ridge-parameter grid (comma separated, increasing).
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Kernel-parameter grid, sigma or eta (comma separated, increasing).
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    /// Criteria: kic,kic1,kic2,icomp,gpr,loocv.
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<Criterion>>,
    /// Input CSV (`-` reads stdin).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Bench on a generated 8-dimensional dataset with this many rows.
    #[arg(long)]
    synthetic: Option<usize>,
    /// Target column: last or a zero-based index.
    #[arg(long, default_value = "last")]
    target: TargetColumn,
    /// Output directory (default: out/<command>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// GPR noise variance (default: alpha).
    #[arg(long)]
    gpr_noise: Option<f64>,
    /// Size of the clean synthetic test set.
    #[arg(long, default_value_t = experiments::TEST_SIZE)]
    test_size: usize,
    /// Sinc training inputs: grid or uniform (default: grid for exp1, uniform otherwise).
    #[arg(long)]
    sampling: Option<Sampling>,
}

impl Args {
    fn config(&self, command: &str) -> RunConfig {
        RunConfig {
            seed: self.seed,
            trials: self.trials,
            n_train: self.n_train.clone(),
            nsr: self.nsr.clone(),
            kernel: self.kernel,
            sigma: self.sigma,
            eta: self.eta,
            alpha: self.alpha,
            alphas: self.alphas.clone(),
            kernel_params: self.sigmas.clone(),
            criteria: self.criteria.clone(),
            dataset: self.dataset.clone(),
            synthetic: self.synthetic,
            target: self.target,
            out_dir: self
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("out").join(command)),
            gpr_noise: self.gpr_noise,
            test_size: self.test_size,
            sampling: self.sampling,
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let name = cli.command.name();
    let args = cli.command.args();
    let cfg = args.config(name);
    let dir = cfg.out_dir.display().to_string();
    let lines: Vec<String> = with_jobs(args.jobs, || -> Result<Vec<String>> {
        Ok(match &cli.command {
            Command::Exp1(_) => {
                let o = experiments::run_exp1(&cfg)?;
                vec![format!("exp1: {} curve points", o.rows.len())]
            }
            Command::Exp2(_) => {
                let o = experiments::run_exp2(&cfg)?;
                vec![format!("exp2: {} records, {} curve points", o.records.len(), o.curves.len())]
            }
            Command::Exp3(_) => experiments::run_exp3(&cfg)?
                .summary
                .iter()
                .map(|s| format!("{} {}: median test MSE {}", s.setting, s.method, s.mse.q50))
                .collect(),
            Command::Exp4(_) => experiments::run_exp4(&cfg)?
                .frequencies
                .iter()
                .map(|f| {
                    format!(
                        "{} {}: modal frequency {}/{}",
                        f.setting.label(),
                        f.criterion,
                        f.table.modal_count(),
                        f.table.trials
                    )
                })
                .collect(),
            Command::Bench(_) => experiments::run_bench(&cfg)?
                .summary
                .iter()
                .map(|s| format!("{} {}: median test MSE {}", s.setting, s.method, s.mse.q50))
                .collect(),
            Command::Score(_) => {
                print!("{}", render_score_table(&experiments::run_score(&cfg)?));
                return Ok(Vec::new());
            }
        })
    })??;
    if name != "score" {
        for l in lines {
            println!("{l}");
        }
        println!("results written to {dir}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
