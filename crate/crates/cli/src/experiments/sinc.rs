//! Synthetic sinc experiments.

use anyhow::{anyhow, Context, Result};
use kic_core::datasets::{add_noise, gen_sinc, gen_sinc_uniform, sinc, stream, uniform_inputs};
use kic_core::{
    cross_kernel, evaluate_grid, gram_matrix, selection_frequency, Criterion, DataMatrix64,
    Dataset64, FamilyKind, FrequencyTable, NoiseSpec, ParamGrid, ScoringContext, SelectionResult,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    cell_test_mse, mse, oracle_cell, summarize, usage, write_metadata_json, write_results,
    write_summary, write_text, RunConfig, Sampling, Setting, SummaryRow, TrialRecord, DEFAULT_NSR,
    EXP1_POINTS, EXP1_SIGMAS, QUANTILE_HEADER, SELECT_ALPHAS, SELECT_SIGMAS, SINC_HI, SINC_LO,
    SWEEP_ALPHAS,
};
use crate::output::{self, ensure_dir, Metadata};
use crate::plot::{BoxItem, BoxPlot, Heatmap, LinePlot, Series};
use crate::stats::{mean, std_dev, Quantiles};

/// Noisy training set plus a clean test set for one trial.
struct SincTrial {
    train: Dataset64,
    test_x: DataMatrix64,
    test_f: Vec<f64>,
}

fn test_set(seed: u64, size: usize) -> Result<(DataMatrix64, Vec<f64>)> {
    let xs = uniform_inputs(size, SINC_LO, SINC_HI, seed, stream::TEST_INPUTS)?;
    let f = xs.iter().map(|&x| sinc(x)).collect();
    Ok((DataMatrix64::from_column(&xs)?, f))
}

fn sinc_inputs(sampling: Sampling, n: usize, seed: u64) -> Result<Dataset64> {
    Ok(match sampling {
        Sampling::Grid => gen_sinc(n, SINC_LO, SINC_HI)?,
        Sampling::Uniform => gen_sinc_uniform(n, SINC_LO, SINC_HI, seed)?,
    })
}

fn describe_sampling(sampling: Sampling) -> String {
    match sampling {
        Sampling::Grid => format!("regular grid on [{SINC_LO}, {SINC_HI}]"),
        Sampling::Uniform => format!("uniform on [{SINC_LO}, {SINC_HI})"),
    }
}

fn sinc_trial(cfg: &RunConfig, setting: Setting, trial: usize) -> Result<SincTrial> {
    let seed = trial_seed(cfg, trial);
    let test_size = cfg.test_size;
    let clean = sinc_inputs(cfg.sampling_or(Sampling::Uniform), setting.n, seed)?;
    let train = add_noise(&clean, NoiseSpec { nsr: setting.nsr, seed })?;
    let (test_x, test_f) = test_set(seed, test_size)?;
    Ok(SincTrial {
        train,
        test_x,
        test_f,
    })
}

fn trial_seed(cfg: &RunConfig, trial: usize) -> u64 {
    cfg.seed.wrapping_add(trial as u64)
}

/// Runs `f` for every `(setting, trial)` pair in parallel and returns the
/// outputs in setting-major, trial-minor order.
fn per_trial<R: Send>(
    cfg: &RunConfig,
    settings: &[Setting],
    f: impl Fn(Setting, usize) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let tasks: Vec<(Setting, usize)> = settings
        .iter()
        .flat_map(|&s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(s, t)| f(s, t).with_context(|| format!("setting {}, trial {t}", s.label())))
        .collect()
}

fn settings_meta(m: &mut Metadata, settings: &[Setting]) {
    let labels: Vec<String> = settings.iter().map(Setting::label).collect();
    m.push("settings", labels.join(","));
}

// ---------------------------------------------------------------- exp1

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exp1Row {
    pub sigma: f64,
    pub alpha: f64,
    pub complexity: f64,
    pub gof: f64,
    pub kic: f64,
    pub test_mse: f64,
}

#[derive(Debug, Clone)]
pub struct Exp1Outcome {
    pub rows: Vec<Exp1Row>,
    pub records: Vec<TrialRecord>,
}

/// Complexity, fit and KIC over α for each σ on the regular-grid sinc.
pub fn run_exp1(cfg: &RunConfig) -> Result<Exp1Outcome> {
    cfg.validate()?;
    let family = cfg.family();
    let alphas = cfg.alphas_or(&SWEEP_ALPHAS);
    let params = cfg.kernel_params_or(&EXP1_SIGMAS);
    let grid = cfg.grid(alphas, params, family)?;
    let nsr = match cfg.nsr.as_deref() {
        None => DEFAULT_NSR,
        Some([v]) => *v,
        Some(_) => return Err(usage("exp1 takes a single --nsr value")),
    };
    let n = match cfg.n_train.as_deref() {
        None => EXP1_POINTS,
        Some([v]) => *v,
        Some(_) => return Err(usage("exp1 takes a single --n-train value")),
    };
    let sampling = cfg.sampling_or(Sampling::Grid);
    let clean = sinc_inputs(sampling, n, cfg.seed)?;
    let train = add_noise(&clean, NoiseSpec { nsr, seed: cfg.seed })?;
    let (test_x, test_f) = test_set(cfg.seed, cfg.test_size)?;

    let columns: Vec<Vec<Exp1Row>> = (0..grid.kernel_params.len())
        .into_par_iter()
        .map(|j| -> Result<Vec<Exp1Row>> {
            let spec = grid.spec_at(j)?;
            let gram = gram_matrix(&spec, &train.x)?;
            let cross = cross_kernel(&spec, &test_x, &train.x)?;
            grid.alphas
                .iter()
                .map(|&alpha| {
                    let ctx = ScoringContext::new(gram.values(), &train.y, alpha)?;
                    let r = ctx.kic();
                    Ok(Exp1Row {
                        sigma: grid.kernel_params[j],
                        alpha,
                        complexity: r.complexity_term,
                        gof: r.gof_term,
                        kic: r.score,
                        test_mse: mse(&cross.matvec(&ctx.solution().theta), &test_f),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Exp1Row> = columns.into_iter().flatten().collect();
    let records = rows
        .iter()
        .map(|r| TrialRecord {
            setting: format!("{}{}", param_name(family), r.sigma),
            method: Criterion::Kic.name().into(),
            trial: 0,
            alpha: r.alpha,
            kernel_param: r.sigma,
            score: r.kic,
            test_mse: r.test_mse,
        })
        .collect::<Vec<_>>();

    let dir = ensure_dir(&cfg.out_dir)?;
    let mut meta = cfg.metadata("exp1");
    meta.push("sampling", describe_sampling(sampling))
        .push("n", n)
        .push("nsr", nsr)
        .push("kernel", family)
        .push_list("alphas", &grid.alphas)
        .push_list("kernel_params", &grid.kernel_params)
        .push("test_set", format!("{} clean points, uniform", cfg.test_size));
    write_results(&dir, &meta, &records)?;
    let curve_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.sigma.to_string(),
                r.alpha.to_string(),
                r.complexity.to_string(),
                r.gof.to_string(),
                r.kic.to_string(),
                r.test_mse.to_string(),
            ]
        })
        .collect();
    output::write_csv(
        &dir.join("curves.csv"),
        &meta,
        &["kernel_param", "alpha", "complexity", "gof", "kic", "test_mse"],
        &curve_rows,
    )?;
    for (name, label, pick) in [
        ("exp1_complexity.svg", "complexity", (|r: &Exp1Row| r.complexity) as fn(&Exp1Row) -> f64),
        ("exp1_gof.svg", "-2 PLL", |r: &Exp1Row| r.gof),
        ("exp1_kic.svg", "KIC", |r: &Exp1Row| r.kic),
    ] {
        let plot = LinePlot {
            title: format!("{label} vs alpha"),
            x_label: "alpha".into(),
            y_label: label.into(),
            series: grid
                .kernel_params
                .iter()
                .map(|&s| Series {
                    label: format!("{} = {s}", param_name(family)),
                    points: rows.iter().filter(|r| r.sigma == s).map(|r| (r.alpha, pick(r))).collect(),
                    dashed: false,
                })
                .collect(),
        };
        write_text(&dir.join(name), &plot.to_svg())?;
    }
    write_metadata_json(
        &dir,
        &meta,
        json!({ "dataset": { "name": train.name, "n": train.len(), "p": train.dims() } }),
    )?;
    Ok(Exp1Outcome { rows, records })
}

fn param_name(family: FamilyKind) -> &'static str {
    match family {
        FamilyKind::Gaussian => "sigma",
        FamilyKind::Cauchy => "eta",
    }
}

// ---------------------------------------------------------------- exp2

/// Mean and spread of KIC and test MSE at one `(setting, α)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub setting: Setting,
    pub alpha: f64,
    pub mean_kic: f64,
    pub std_kic: f64,
    pub mean_mse: f64,
    pub std_mse: f64,
    pub mse: Quantiles,
}

#[derive(Debug, Clone)]
pub struct Exp2Outcome {
    pub records: Vec<TrialRecord>,
    pub curves: Vec<CurvePoint>,
}

impl Exp2Outcome {
    pub fn curve(&self, setting: Setting) -> Vec<&CurvePoint> {
        self.curves.iter().filter(|c| c.setting == setting).collect()
    }
}

/// KIC and test MSE over α at fixed kernel parameter, per `(n, NSR)`.
pub fn run_exp2(cfg: &RunConfig) -> Result<Exp2Outcome> {
    cfg.validate()?;
    let family = cfg.family();
    let spec = cfg.spec(family)?;
    let alphas = cfg.alphas_or(&SWEEP_ALPHAS);
    let grid = cfg.grid(alphas.clone(), vec![spec.family.param()], family)?;
    let settings = cfg.settings();
    let per: Vec<Vec<TrialRecord>> = per_trial(cfg, &settings, |s, t| {
        let d = sinc_trial(cfg, s, t)?;
        let gram = gram_matrix(&spec, &d.train.x)?;
        let cross = cross_kernel(&spec, &d.test_x, &d.train.x)?;
        grid.alphas
            .iter()
            .map(|&alpha| {
                let ctx = ScoringContext::new(gram.values(), &d.train.y, alpha)?;
                Ok(TrialRecord {
                    setting: s.label(),
                    method: Criterion::Kic.name().into(),
                    trial: t,
                    alpha,
                    kernel_param: spec.family.param(),
                    score: ctx.kic().score,
                    test_mse: mse(&cross.matvec(&ctx.solution().theta), &d.test_f),
                })
            })
            .collect()
    })?;
    let records: Vec<TrialRecord> = per.into_iter().flatten().collect();

    let mut curves = Vec::new();
    for &s in &settings {
        for &alpha in &alphas {
            let sel: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.setting == s.label() && r.alpha == alpha)
                .collect();
            let kic: Vec<f64> = sel.iter().map(|r| r.score).collect();
            let m: Vec<f64> = sel.iter().map(|r| r.test_mse).collect();
            curves.push(CurvePoint {
                setting: s,
                alpha,
                mean_kic: mean(&kic),
                std_kic: std_dev(&kic),
                mean_mse: mean(&m),
                std_mse: std_dev(&m),
                mse: Quantiles::of(&m),
            });
        }
    }

    let dir = ensure_dir(&cfg.out_dir)?;
    let mut meta = cfg.metadata("exp2");
    meta.push("trials", cfg.trials)
        .push("sampling", describe_sampling(cfg.sampling_or(Sampling::Uniform)))
        .push("kernel", format!("{family} {}", spec.family.param()))
        .push_list("alphas", &alphas)
        .push("test_set", format!("{} clean points, uniform", cfg.test_size));
    settings_meta(&mut meta, &settings);
    write_results(&dir, &meta, &records)?;
    let curve_rows: Vec<Vec<String>> = curves
        .iter()
        .map(|c| {
            vec![
                c.setting.label(),
                c.setting.n.to_string(),
                c.setting.nsr.to_string(),
                c.alpha.to_string(),
                c.mean_kic.to_string(),
                c.std_kic.to_string(),
                c.mean_mse.to_string(),
                c.std_mse.to_string(),
            ]
        })
        .collect();
    output::write_csv(
        &dir.join("curves.csv"),
        &meta,
        &["setting", "n", "nsr", "alpha", "mean_kic", "std_kic", "mean_mse", "std_mse"],
        &curve_rows,
    )?;
    let mut header = vec!["setting", "method", "alpha"];
    header.extend(QUANTILE_HEADER);
    let summary_rows: Vec<Vec<String>> = curves
        .iter()
        .map(|c| {
            let mut row = vec![c.setting.label(), Criterion::Kic.name().into(), c.alpha.to_string()];
            row.extend(super::quantile_cells(&c.mse));
            row
        })
        .collect();
    output::write_csv(&dir.join("summary.csv"), &meta, &header, &summary_rows)?;

    let mut sizes: Vec<usize> = settings.iter().map(|s| s.n).collect();
    sizes.dedup();
    for n in sizes {
        for (what, pick) in [
            ("kic", (|c: &CurvePoint| c.mean_kic) as fn(&CurvePoint) -> f64),
            ("mse", |c: &CurvePoint| c.mean_mse),
        ] {
            let series = settings
                .iter()
                .filter(|s| s.n == n)
                .enumerate()
                .map(|(k, &s)| Series {
                    label: format!("NSR {}", s.nsr),
                    points: curves
                        .iter()
                        .filter(|c| c.setting == s)
                        .map(|c| (c.alpha, pick(c)))
                        .collect(),
                    dashed: k > 0,
                })
                .collect();
            let plot = LinePlot {
                title: format!("mean {what}, n = {n}"),
                x_label: "alpha".into(),
                y_label: what.into(),
                series,
            };
            write_text(&dir.join(format!("exp2_{what}_n{n}.svg")), &plot.to_svg())?;
        }
    }
    write_metadata_json(&dir, &meta, json!({}))?;
    Ok(Exp2Outcome { records, curves })
}

// ---------------------------------------------------------------- exp3

pub const ORACLE: &str = "oracle";

#[derive(Debug, Clone)]
pub struct Exp3Outcome {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl Exp3Outcome {
    pub fn mse_of(&self, setting: &str, method: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.setting == setting && r.method == method)
            .map(|r| r.test_mse)
            .collect()
    }
}

/// Selection records for every criterion plus the per-trial grid oracle.
fn selection_records(
    label: &str,
    trial: usize,
    results: &std::collections::BTreeMap<Criterion, SelectionResult<f64>>,
    criteria: &[Criterion],
    table: &[Vec<f64>],
    grid: &ParamGrid<f64>,
    with_oracle: bool,
) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    for c in criteria {
        let r = &results[c];
        out.push(TrialRecord {
            setting: label.to_string(),
            method: c.name().into(),
            trial,
            alpha: r.best.alpha,
            kernel_param: r.best.kernel_param,
            score: r.best.score,
            test_mse: table[r.best.alpha_index][r.best.kernel_index],
        });
    }
    if with_oracle {
        let (i, j, v) =
            oracle_cell(table).ok_or_else(|| anyhow!("no grid cell could be fitted"))?;
        out.push(TrialRecord {
            setting: label.to_string(),
            method: ORACLE.into(),
            trial,
            alpha: grid.alphas[i],
            kernel_param: grid.kernel_params[j],
            score: v,
            test_mse: v,
        });
    }
    Ok(out)
}

/// Per-method test-MSE distributions with α selected, Gaussian vs Cauchy.
pub fn run_exp3(cfg: &RunConfig) -> Result<Exp3Outcome> {
    cfg.validate()?;
    let families = match cfg.kernel {
        Some(f) => vec![f],
        None => vec![FamilyKind::Gaussian, FamilyKind::Cauchy],
    };
    let criteria = cfg.criteria_or(&[Criterion::Icomp, Criterion::Kic, Criterion::GprLml, Criterion::Loocv]);
    let alphas = cfg.alphas_or(&SWEEP_ALPHAS);
    let grids: Vec<ParamGrid<f64>> = families
        .iter()
        .map(|&f| cfg.grid(alphas.clone(), vec![cfg.kernel_param(f)], f))
        .collect::<Result<_>>()?;
    let settings = cfg.settings();
    let opts = cfg.score_options();
    let per: Vec<Vec<TrialRecord>> = per_trial(cfg, &settings, |s, t| {
        let d = sinc_trial(cfg, s, t)?;
        let mut out = Vec::new();
        for grid in &grids {
            let label = format!("{}_{}", grid.family, s.label());
            let eval = evaluate_grid(&d.train.x, &d.train.y, grid, &criteria, &opts)?;
            let table = cell_test_mse(grid, &d.train.x, &d.train.y, &d.test_x, &d.test_f)?;
            out.extend(selection_records(&label, t, &eval.results, &criteria, &table, grid, true)?);
        }
        Ok(out)
    })?;
    let mut records: Vec<TrialRecord> = per.into_iter().flatten().collect();
    // group by kernel first, then setting, then trial
    records.sort_by_key(|r| {
        families
            .iter()
            .position(|f| r.setting.starts_with(&f.to_string()))
    });
    let summary = summarize(&records);

    let dir = ensure_dir(&cfg.out_dir)?;
    let mut meta = cfg.metadata("exp3");
    meta.push("trials", cfg.trials)
        .push("sampling", describe_sampling(cfg.sampling_or(Sampling::Uniform)))
        .push(
            "kernels",
            grids
                .iter()
                .map(|g| format!("{} {}", g.family, g.kernel_params[0]))
                .collect::<Vec<_>>()
                .join(","),
        )
        .push_list("alphas", &alphas)
        .push(
            "criteria",
            criteria.iter().map(|c| c.name()).collect::<Vec<_>>().join(","),
        )
        .push("oracle", "per-trial minimum test MSE over the grid")
        .push("test_set", format!("{} clean points, uniform", cfg.test_size));
    settings_meta(&mut meta, &settings);
    write_results(&dir, &meta, &records)?;
    write_summary(&dir, &meta, &summary)?;
    write_box_plots(&dir, "exp3", &summary)?;
    write_metadata_json(&dir, &meta, json!({}))?;
    Ok(Exp3Outcome { records, summary })
}

pub(super) fn write_box_plots(dir: &std::path::Path, prefix: &str, summary: &[SummaryRow]) -> Result<()> {
    let mut settings: Vec<&str> = Vec::new();
    for s in summary {
        if !settings.contains(&s.setting.as_str()) {
            settings.push(&s.setting);
        }
    }
    for setting in settings {
        let boxes = summary
            .iter()
            .filter(|s| s.setting == setting)
            .map(|s| BoxItem {
                label: s.method.clone(),
                q: s.mse,
            })
            .collect();
        let plot = BoxPlot {
            title: format!("test MSE, {setting}"),
            y_label: "test MSE".into(),
            boxes,
        };
        write_text(&dir.join(format!("{prefix}_{setting}.svg")), &plot.to_svg())?;
    }
    Ok(())
}

// ---------------------------------------------------------------- exp4

/// Selection frequencies of one criterion in one setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyEntry {
    pub setting: Setting,
    pub criterion: Criterion,
    pub table: FrequencyTable<f64>,
}

#[derive(Debug, Clone)]
pub struct Exp4Outcome {
    pub records: Vec<TrialRecord>,
    pub frequencies: Vec<FrequencyEntry>,
}

impl Exp4Outcome {
    pub fn table(&self, setting: Setting, criterion: Criterion) -> Option<&FrequencyTable<f64>> {
        self.frequencies
            .iter()
            .find(|f| f.setting == setting && f.criterion == criterion)
            .map(|f| &f.table)
    }
}

/// Joint `(α, kernel parameter)` selection frequencies over trials.
pub fn run_exp4(cfg: &RunConfig) -> Result<Exp4Outcome> {
    cfg.validate()?;
    let family = cfg.family();
    let criteria = cfg.criteria_or(&[Criterion::Kic, Criterion::Loocv]);
    let grid = cfg.grid(
        cfg.alphas_or(&SELECT_ALPHAS),
        cfg.kernel_params_or(&SELECT_SIGMAS),
        family,
    )?;
    let settings = cfg.settings();
    let opts = cfg.score_options();
    type Trial = (Vec<TrialRecord>, Vec<SelectionResult<f64>>);
    let per: Vec<Trial> = per_trial(cfg, &settings, |s, t| {
        let d = sinc_trial(cfg, s, t)?;
        let eval = evaluate_grid(&d.train.x, &d.train.y, &grid, &criteria, &opts)?;
        let table = cell_test_mse(&grid, &d.train.x, &d.train.y, &d.test_x, &d.test_f)?;
        let recs = selection_records(&s.label(), t, &eval.results, &criteria, &table, &grid, false)?;
        let sels = criteria.iter().map(|c| eval.results[c].clone()).collect();
        Ok((recs, sels))
    })?;

    let mut frequencies = Vec::new();
    for (si, &s) in settings.iter().enumerate() {
        let trials = &per[si * cfg.trials..(si + 1) * cfg.trials];
        for (ci, &c) in criteria.iter().enumerate() {
            let sels: Vec<SelectionResult<f64>> = trials.iter().map(|(_, v)| v[ci].clone()).collect();
            frequencies.push(FrequencyEntry {
                setting: s,
                criterion: c,
                table: selection_frequency(&sels)?,
            });
        }
    }
    let records: Vec<TrialRecord> = per.into_iter().flat_map(|(r, _)| r).collect();
    let summary = summarize(&records);

    let dir = ensure_dir(&cfg.out_dir)?;
    let mut meta = cfg.metadata("exp4");
    meta.push("trials", cfg.trials)
        .push("sampling", describe_sampling(cfg.sampling_or(Sampling::Uniform)))
        .push("kernel", family)
        .push_list("alphas", &grid.alphas)
        .push_list("kernel_params", &grid.kernel_params)
        .push(
            "criteria",
            criteria.iter().map(|c| c.name()).collect::<Vec<_>>().join(","),
        )
        .push("selection", "joint argmin over (alpha, kernel_param)")
        .push("test_set", format!("{} clean points, uniform", cfg.test_size));
    settings_meta(&mut meta, &settings);
    write_results(&dir, &meta, &records)?;

    let mut header = vec!["setting", "method"];
    header.extend(QUANTILE_HEADER);
    header.extend(["modal_count", "modal_alpha", "modal_kernel_param"]);
    let rows: Vec<Vec<String>> = summary
        .iter()
        .map(|s| {
            let f = frequencies
                .iter()
                .find(|f| f.setting.label() == s.setting && f.criterion.name() == s.method)
                .expect("every summary group has a table");
            let (i, j) = f.table.modal_cell();
            let mut row = vec![s.setting.clone(), s.method.clone()];
            row.extend(super::quantile_cells(&s.mse));
            row.extend([
                f.table.modal_count().to_string(),
                f.table.alphas[i].to_string(),
                f.table.kernel_params[j].to_string(),
            ]);
            row
        })
        .collect();
    output::write_csv(&dir.join("summary.csv"), &meta, &header, &rows)?;

    for &c in &criteria {
        let mut rows = Vec::new();
        for f in frequencies.iter().filter(|f| f.criterion == c) {
            for (i, &a) in f.table.alphas.iter().enumerate() {
                for (j, &p) in f.table.kernel_params.iter().enumerate() {
                    rows.push(vec![
                        f.setting.label(),
                        a.to_string(),
                        p.to_string(),
                        f.table.counts[i][j].to_string(),
                    ]);
                }
            }
            let map = Heatmap {
                title: format!("{} selections, {}", c.name(), f.setting.label()),
                x_label: param_name(family).into(),
                y_label: "alpha".into(),
                x_ticks: f.table.kernel_params.iter().map(|v| v.to_string()).collect(),
                y_ticks: f.table.alphas.iter().map(|v| v.to_string()).collect(),
                values: f
                    .table
                    .counts
                    .iter()
                    .map(|r| r.iter().map(|&v| v as f64).collect())
                    .collect(),
            };
            write_text(
                &dir.join(format!("exp4_{}_{}.svg", c.name(), f.setting.label())),
                &map.to_svg(),
            )?;
        }
        output::write_csv(
            &dir.join(format!("frequency_{}.csv", c.name())),
            &meta,
            &["setting", "alpha", "kernel_param", "count"],
            &rows,
        )?;
    }
    write_metadata_json(&dir, &meta, json!({}))?;
    Ok(Exp4Outcome {
        records,
        frequencies,
    })
}
