//! One-shot scoring of a dataset at a single `(α, kernel)`.

use anyhow::{Context, Result};
use kic_core::datasets::load_csv;
use kic_core::{gram_matrix, Criterion, Dataset64, ScoringContext};
use serde::Serialize;

use super::{usage, RunConfig};

pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub criterion: Criterion,
    pub score: f64,
    pub gof_term: f64,
    pub complexity_term: f64,
    pub sigma2: f64,
    pub alpha: f64,
    pub kernel: String,
    pub kernel_param: f64,
}

pub fn score_dataset(cfg: &RunConfig, data: &Dataset64) -> Result<Vec<ScoreRow>> {
    let family = cfg.family();
    let spec = cfg.spec(family)?;
    let alpha = cfg.alpha.unwrap_or(DEFAULT_ALPHA);
    let criteria = cfg.criteria_or(&Criterion::ALL);
    let gram = gram_matrix(&spec, &data.x)?;
    let ctx = ScoringContext::new(gram.values(), &data.y, alpha)?;
    let opts = cfg.score_options();
    criteria
        .iter()
        .map(|&c| {
            let r = ctx.score(c, &opts).with_context(|| format!("scoring {c}"))?;
            Ok(ScoreRow {
                criterion: c,
                score: r.score,
                gof_term: r.gof_term,
                complexity_term: r.complexity_term,
                sigma2: r.sigma2_used,
                alpha,
                kernel: family.to_string(),
                kernel_param: spec.family.param(),
            })
        })
        .collect()
}

/// Reads `--dataset` (`-` for stdin) and scores it.
pub fn run_score(cfg: &RunConfig) -> Result<Vec<ScoreRow>> {
    cfg.validate()?;
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| usage("score needs --dataset PATH (or - for stdin)"))?;
    let data = load_csv(path, cfg.target).with_context(|| format!("loading {}", path.display()))?;
    score_dataset(cfg, &data)
}

/// CSV table, one row per criterion.
pub fn render_score_table(rows: &[ScoreRow]) -> String {
    let mut out = String::from("criterion,score,gof_term,complexity_term,sigma2,alpha,kernel,kernel_param\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.criterion, r.score, r.gof_term, r.complexity_term, r.sigma2, r.alpha, r.kernel, r.kernel_param
        ));
    }
    out
}
