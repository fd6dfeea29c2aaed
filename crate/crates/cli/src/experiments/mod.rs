//! Experiment runners. Each runner returns its in-memory outcome and writes a
//! run directory with `results.csv`, summaries, plots and `metadata.json`.
//!
//! Trials are independent rayon tasks seeded with `seed + trial`; results are
//! collected in trial order, so output does not depend on the worker count.

mod bench;
mod score;
mod sinc;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kic_core::datasets::NSR_DEFINITION;
use kic_core::{
    cross_kernel, gram_matrix, Criterion, DataMatrix64, FamilyKind, KernelFamily, KernelSpec,
    ParamGrid, RidgeSolution, ScoreOptions, TargetColumn,
};
use serde::Serialize;

use crate::output::{self, Metadata};
use crate::stats::Quantiles;

pub use bench::{run_bench, BenchOutcome};
pub use score::{render_score_table, run_score, score_dataset, ScoreRow};
pub use sinc::{
    run_exp1, run_exp2, run_exp3, run_exp4, Exp1Outcome, Exp1Row, Exp2Outcome, Exp3Outcome,
    Exp4Outcome, FrequencyEntry, ORACLE,
};

pub const SINC_LO: f64 = -6.0;
pub const SINC_HI: f64 = 6.0;
pub const EXP1_POINTS: usize = 100;
pub const TEST_SIZE: usize = 1000;
pub const SWEEP_ALPHAS: [f64; 11] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const EXP1_SIGMAS: [f64; 3] = [0.3, 1.0, 4.0];
pub const SELECT_ALPHAS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const SELECT_SIGMAS: [f64; 6] = [0.4, 0.6, 0.8, 1.0, 1.2, 1.5];
pub const SAMPLE_SIZES: [usize; 2] = [50, 100];
pub const NSR_LEVELS: [f64; 2] = [0.05, 0.4];
pub const BENCH_TRAIN: usize = 100;
pub const DEFAULT_SIGMA: f64 = 1.0;
pub const DEFAULT_ETA: f64 = 2.0;
pub const DEFAULT_NSR: f64 = 0.05;

/// A user-facing configuration problem (exit status 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Settings shared by every subcommand. `None` selects the experiment's
/// default.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    /// Restricts the training sizes (`bench`: the single training size).
    pub n_train: Option<Vec<usize>>,
    /// Restricts the NSR levels (`exp1`, synthetic `bench`: the single level).
    pub nsr: Option<Vec<f64>>,
    pub kernel: Option<FamilyKind>,
    pub sigma: Option<f64>,
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub kernel_params: Option<Vec<f64>>,
    pub criteria: Option<Vec<Criterion>>,
    pub dataset: Option<PathBuf>,
    /// Rows of a generated 8-dimensional stand-in dataset for `bench`.
    pub synthetic: Option<usize>,
    pub target: TargetColumn,
    pub out_dir: PathBuf,
    pub gpr_noise: Option<f64>,
    pub test_size: usize,
    /// Sinc training inputs: regular grid or uniform draws.
    pub sampling: Option<Sampling>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 100,
            n_train: None,
            nsr: None,
            kernel: None,
            sigma: None,
            eta: None,
            alpha: None,
            alphas: None,
            kernel_params: None,
            criteria: None,
            dataset: None,
            synthetic: None,
            target: TargetColumn::Last,
            out_dir: PathBuf::from("out"),
            gpr_noise: None,
            test_size: TEST_SIZE,
            sampling: None,
        }
    }
}

/// How sinc training inputs are placed on `[SINC_LO, SINC_HI]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Equally spaced, both endpoints included; only the noise varies by trial.
    Grid,
    /// Drawn uniformly per trial.
    Uniform,
}

impl std::fmt::Display for Sampling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sampling::Grid => "grid",
            Sampling::Uniform => "uniform",
        })
    }
}

impl std::str::FromStr for Sampling {
    type Err = UsageError;

    fn from_str(s: &str) -> std::result::Result<Self, UsageError> {
        match s.to_ascii_lowercase().as_str() {
            "grid" => Ok(Sampling::Grid),
            "uniform" => Ok(Sampling::Uniform),
            other => Err(UsageError(format!("unknown sampling '{other}' (grid or uniform)"))),
        }
    }
}

/// One `(n, NSR)` cell of the synthetic protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Setting {
    pub n: usize,
    pub nsr: f64,
}

impl Setting {
    pub fn label(&self) -> String {
        format!("n{}_nsr{}", self.n, self.nsr)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(usage("--trials must be positive"));
        }
        if self.test_size == 0 {
            return Err(usage("test size must be positive"));
        }
        if let Some(ns) = &self.n_train {
            if ns.iter().any(|&n| n < 2) {
                return Err(usage("--n-train values must be at least 2"));
            }
        }
        if let Some(v) = &self.nsr {
            if v.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(usage("--nsr values must be non-negative"));
            }
        }
        for (name, v) in [("--sigma", self.sigma), ("--eta", self.eta), ("--alpha", self.alpha)] {
            if let Some(x) = v {
                if !(x > 0.0) || !x.is_finite() {
                    return Err(usage(format!("{name} must be positive")));
                }
            }
        }
        if let Some(g) = self.gpr_noise {
            if !(g > 0.0) || !g.is_finite() {
                return Err(usage("--gpr-noise must be positive"));
            }
        }
        if let Some(c) = &self.criteria {
            if c.is_empty() {
                return Err(usage("--criteria must name at least one criterion"));
            }
        }
        if let Some(d) = &self.dataset {
            if d != Path::new("-") && !d.exists() {
                return Err(usage(format!("dataset {} does not exist", d.display())));
            }
        }
        Ok(())
    }

    pub fn settings(&self) -> Vec<Setting> {
        let ns = self.n_train.clone().unwrap_or_else(|| SAMPLE_SIZES.to_vec());
        let nsrs = self.nsr.clone().unwrap_or_else(|| NSR_LEVELS.to_vec());
        ns.iter()
            .flat_map(|&n| nsrs.iter().map(move |&nsr| Setting { n, nsr }))
            .collect()
    }

    pub fn sampling_or(&self, default: Sampling) -> Sampling {
        self.sampling.unwrap_or(default)
    }

    pub fn family(&self) -> FamilyKind {
        self.kernel.unwrap_or(FamilyKind::Gaussian)
    }

    /// `--sigma` or `--eta` for the given family.
    pub fn kernel_param(&self, family: FamilyKind) -> f64 {
        match family {
            FamilyKind::Gaussian => self.sigma.unwrap_or(DEFAULT_SIGMA),
            FamilyKind::Cauchy => self.eta.unwrap_or(DEFAULT_ETA),
        }
    }

    pub fn spec(&self, family: FamilyKind) -> Result<KernelSpec<f64>> {
        let p = self.kernel_param(family);
        Ok(KernelSpec::new(KernelFamily::with_param(family, p), false)?)
    }

    pub fn alphas_or(&self, default: &[f64]) -> Vec<f64> {
        self.alphas.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn kernel_params_or(&self, default: &[f64]) -> Vec<f64> {
        self.kernel_params.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn criteria_or(&self, default: &[Criterion]) -> Vec<Criterion> {
        self.criteria.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn score_options(&self) -> ScoreOptions<f64> {
        ScoreOptions {
            gpr_noise: self.gpr_noise,
        }
    }

    pub fn grid(&self, alphas: Vec<f64>, params: Vec<f64>, family: FamilyKind) -> Result<ParamGrid<f64>> {
        ParamGrid::new(alphas, params, family).map_err(|e| usage(e.to_string()))
    }

    fn metadata(&self, command: &str) -> Metadata {
        let mut m = Metadata::new(command);
        m.push("seed", self.seed)
            .push("trial_seed", "seed + trial index")
            .push("nsr_definition", NSR_DEFINITION);
        if let Some(g) = self.gpr_noise {
            m.push("gpr_noise", g);
        } else {
            m.push("gpr_noise", "alpha");
        }
        m
    }
}

/// One selected (or fixed) model in one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub setting: String,
    pub method: String,
    pub trial: usize,
    pub alpha: f64,
    pub kernel_param: f64,
    pub score: f64,
    pub test_mse: f64,
}

pub const RESULTS_HEADER: [&str; 7] = [
    "setting",
    "method",
    "trial",
    "alpha",
    "kernel_param",
    "score",
    "test_mse",
];

impl TrialRecord {
    fn row(&self) -> Vec<String> {
        vec![
            self.setting.clone(),
            self.method.clone(),
            self.trial.to_string(),
            self.alpha.to_string(),
            self.kernel_param.to_string(),
            self.score.to_string(),
            self.test_mse.to_string(),
        ]
    }
}

fn write_results(dir: &Path, meta: &Metadata, records: &[TrialRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = records.iter().map(TrialRecord::row).collect();
    output::write_csv(&dir.join("results.csv"), meta, &RESULTS_HEADER, &rows)
}

/// Test-MSE quantiles of one `(setting, method)` group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub setting: String,
    pub method: String,
    pub mse: Quantiles,
}

/// Groups records by `(setting, method)` in first-appearance order.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for r in records {
        let key = (r.setting.clone(), r.method.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r.test_mse);
    }
    order
        .into_iter()
        .map(|key| {
            let q = Quantiles::of(&groups[&key]);
            SummaryRow {
                setting: key.0,
                method: key.1,
                mse: q,
            }
        })
        .collect()
}

pub const QUANTILE_HEADER: [&str; 7] = ["count", "mean", "std", "q05", "q25", "q50", "q95"];

fn quantile_cells(q: &Quantiles) -> Vec<String> {
    vec![
        q.count.to_string(),
        q.mean.to_string(),
        q.std.to_string(),
        q.q05.to_string(),
        q.q25.to_string(),
        q.q50.to_string(),
        q.q95.to_string(),
    ]
}

fn write_summary(dir: &Path, meta: &Metadata, summary: &[SummaryRow]) -> Result<()> {
    let mut header = vec!["setting", "method"];
    header.extend(QUANTILE_HEADER);
    let rows: Vec<Vec<String>> = summary
        .iter()
        .map(|s| {
            let mut row = vec![s.setting.clone(), s.method.clone()];
            row.extend(quantile_cells(&s.mse));
            row
        })
        .collect();
    output::write_csv(&dir.join("summary.csv"), meta, &header, &rows)
}

/// `metadata.json`: the CSV metadata block plus experiment-specific fields.
fn write_metadata_json(dir: &Path, meta: &Metadata, extra: serde_json::Value) -> Result<()> {
    let mut map = serde_json::Map::new();
    for (k, v) in meta.entries() {
        map.insert(k.clone(), serde_json::Value::String(v.clone()));
    }
    if let serde_json::Value::Object(extra) = extra {
        map.extend(extra);
    }
    output::write_json(&dir.join("metadata.json"), &serde_json::Value::Object(map))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn mse(pred: &[f64], truth: &[f64]) -> f64 {
    debug_assert_eq!(pred.len(), truth.len());
    let ss: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    ss / truth.len() as f64
}

/// Test MSE of the fit at every grid cell, indexed `[alpha][kernel_param]`.
/// Cells whose system cannot be factored are NaN.
#[allow(clippy::needless_range_loop)]
pub fn cell_test_mse(
    grid: &ParamGrid<f64>,
    train_x: &DataMatrix64,
    train_y: &[f64],
    test_x: &DataMatrix64,
    test_y: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let mut out = vec![vec![f64::NAN; grid.kernel_params.len()]; grid.alphas.len()];
    for j in 0..grid.kernel_params.len() {
        let spec = grid.spec_at(j)?;
        let gram = gram_matrix(&spec, train_x)?;
        let cross = cross_kernel(&spec, test_x, train_x)?;
        for (i, &alpha) in grid.alphas.iter().enumerate() {
            if let Ok((sol, _)) = RidgeSolution::solve(gram.values(), train_y, alpha) {
                out[i][j] = mse(&cross.matvec(&sol.theta), test_y);
            }
        }
    }
    Ok(out)
}

/// Smallest finite cell, ties to the larger α then larger kernel parameter.
pub fn oracle_cell(table: &[Vec<f64>]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, row) in table.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.is_finite() && best.is_none_or(|(_, _, b)| v <= b) {
                best = Some((i, j, v));
            }
        }
    }
    best
}

/// Builds a pool of `jobs` workers (default: available cores) and runs `f`
/// inside it.
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(usage("--jobs must be positive"));
        }
        b = b.num_threads(j);
    }
    let pool = b.build().context("building worker pool")?;
    Ok(pool.install(f))
}

/// Exit status for a failed run: 2 for usage and input problems, 1 for
/// numerical failures.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use kic_core::KicError as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidParameter(_)
                | E::Parse { .. }
                | E::Io { .. }
                | E::DimensionMismatch { .. }
                | E::NotAdditive
                | E::NoTrainingInputs
                | E::GridMismatch => 2,
                _ => 1,
            };
        }
    }
    1
}
