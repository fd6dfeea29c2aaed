//! Real-data benchmark: random train/test splits of a CSV dataset.

use anyhow::{anyhow, bail, Context, Result};
use kic_core::datasets::{gen_kin_like, load_csv, split_indices};
use kic_core::{evaluate_grid, Criterion, Dataset64, NormalizationRecord};
use rayon::prelude::*;
use serde_json::json;

use super::{
    cell_test_mse, summarize, usage, write_metadata_json, write_results, write_summary,
    RunConfig, SummaryRow, TrialRecord, BENCH_TRAIN, SELECT_ALPHAS, SELECT_SIGMAS,
};
use crate::output::ensure_dir;

const SYNTHETIC_DIMS: usize = 8;
const SYNTHETIC_NSR: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
    pub dataset_name: String,
    pub n: usize,
    pub p: usize,
}

impl BenchOutcome {
    pub fn methods(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for s in &self.summary {
            if !out.contains(&s.method.as_str()) {
                out.push(&s.method);
            }
        }
        out
    }
}

const ALL_METHODS: [Criterion; 6] = [
    Criterion::Loocv,
    Criterion::Icomp,
    Criterion::Kic1,
    Criterion::Kic2,
    Criterion::Kic,
    Criterion::GprLml,
];

fn load(cfg: &RunConfig) -> Result<Dataset64> {
    match (&cfg.dataset, cfg.synthetic) {
        (Some(_), Some(_)) => Err(usage("bench takes either --dataset or --synthetic, not both")),
        (None, None) => Err(usage("bench needs --dataset PATH or --synthetic ROWS")),
        (Some(path), None) => {
            load_csv(path, cfg.target).with_context(|| format!("loading {}", path.display()))
        }
        (None, Some(rows)) => {
            let nsr = match cfg.nsr.as_deref() {
                None => SYNTHETIC_NSR,
                Some([v]) => *v,
                Some(_) => return Err(usage("bench takes a single --nsr value")),
            };
            Ok(gen_kin_like(rows, SYNTHETIC_DIMS, nsr, cfg.seed)?)
        }
    }
}

/// Protocol: per trial, draw `n_train` rows for training (rest is test),
/// scale features to [0, 1] with the training min/max, select `(α, σ)` per
/// criterion on the grid and record test MSE against the observed targets.
pub fn run_bench(cfg: &RunConfig) -> Result<BenchOutcome> {
    cfg.validate()?;
    let data = load(cfg)?;
    let n_train = match cfg.n_train.as_deref() {
        None => BENCH_TRAIN,
        Some([v]) => *v,
        Some(_) => return Err(usage("bench takes a single --n-train value")),
    };
    if n_train >= data.len() {
        return Err(usage(format!(
            "--n-train {n_train} leaves no test rows in a dataset of {}",
            data.len()
        )));
    }
    let family = cfg.family();
    let grid = cfg.grid(
        cfg.alphas_or(&SELECT_ALPHAS),
        cfg.kernel_params_or(&SELECT_SIGMAS),
        family,
    )?;
    let criteria = cfg.criteria_or(&ALL_METHODS);
    let opts = cfg.score_options();

    type Trial = (Vec<TrialRecord>, NormalizationRecord<f64>);
    let per: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Trial> {
            let seed = cfg.seed.wrapping_add(t as u64);
            let (tr, te) = split_indices(data.len(), n_train, seed)?;
            let mut seen = vec![false; data.len()];
            for &i in tr.iter().chain(&te) {
                if seen[i] {
                    bail!("trial {t}: row {i} appears twice in the split");
                }
                seen[i] = true;
            }
            if seen.iter().any(|s| !s) {
                bail!("trial {t}: split does not cover the dataset");
            }
            let train = data.subset(&tr)?;
            let test = data.subset(&te)?;
            let norm = NormalizationRecord::fit(&train.x);
            let train_x = norm.apply(&train.x)?;
            let test_x = norm.apply(&test.x)?;
            let eval = evaluate_grid(&train_x, &train.y, &grid, &criteria, &opts)
                .with_context(|| format!("trial {t}"))?;
            let table = cell_test_mse(&grid, &train_x, &train.y, &test_x, &test.y)?;
            let recs = criteria
                .iter()
                .map(|c| {
                    let r = &eval.results[c];
                    let v = table[r.best.alpha_index][r.best.kernel_index];
                    if !v.is_finite() {
                        return Err(anyhow!("trial {t}: {c} selected an unfittable cell"));
                    }
                    Ok(TrialRecord {
                        setting: format!("{}_n{n_train}", data.name),
                        method: c.name().into(),
                        trial: t,
                        alpha: r.best.alpha,
                        kernel_param: r.best.kernel_param,
                        score: r.best.score,
                        test_mse: v,
                    })
                })
                .collect::<Result<_>>()?;
            Ok((recs, norm))
        })
        .collect::<Result<_>>()?;
    let (records, norms): (Vec<Vec<TrialRecord>>, Vec<NormalizationRecord<f64>>) =
        per.into_iter().unzip();
    let records: Vec<TrialRecord> = records.into_iter().flatten().collect();
    let summary = summarize(&records);

    let dir = ensure_dir(&cfg.out_dir)?;
    let mut meta = cfg.metadata("bench");
    meta.push("trials", cfg.trials)
        .push("dataset", &data.name)
        .push("n", data.len())
        .push("p", data.dims())
        .push("n_train", n_train)
        .push("kernel", family)
        .push_list("alphas", &grid.alphas)
        .push_list("kernel_params", &grid.kernel_params)
        .push(
            "criteria",
            criteria.iter().map(|c| c.name()).collect::<Vec<_>>().join(","),
        )
        .push("normalization", "features to [0, 1] with per-trial training min/max")
        .push("test_mse", "against observed targets of the held-out rows");
    write_results(&dir, &meta, &records)?;
    write_summary(&dir, &meta, &summary)?;
    super::sinc::write_box_plots(&dir, "bench", &summary)?;
    write_metadata_json(
        &dir,
        &meta,
        json!({
            "dataset": {
                "name": data.name,
                "n": data.len(),
                "p": data.dims(),
                "source": cfg.dataset.as_ref().map(|p| p.display().to_string()),
                "synthetic_rows": cfg.synthetic,
            },
            "normalization": norms,
        }),
    )?;
    Ok(BenchOutcome {
        records,
        summary,
        dataset_name: data.name.clone(),
        n: data.len(),
        p: data.dims(),
    })
}
