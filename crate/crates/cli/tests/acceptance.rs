//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.
//!
//! `KIC_ABALONE_CSV` points criterion 11 at a real Abalone file; without it a
//! generated stand-in in the raw Abalone layout is used.

// `!(a <= b)` checks are intended: NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use kic_cli::experiments::{
    run_bench, run_exp1, run_exp2, run_exp3, run_exp4, Setting, ORACLE, SWEEP_ALPHAS, TEST_SIZE,
};
use kic_cli::output::CsvTable;
use kic_cli::stats::median;
use kic_cli::RunConfig;
use kic_core::criteria::{
    complexity_hs, complexity_trace, entropy_complexity, loocv_brute_force, loocv_score,
    maximal_complexity, penalized_log_likelihood,
};
use kic_core::datasets::{add_noise, gen_sinc_uniform, sinc, stream, uniform_inputs};
use kic_core::{
    component_grams, cross_kernel, gram_matrix, Criterion, DataMatrix64, FamilyKind, KernelSpec,
    Matrix64, NoiseSpec, ScoringContext,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn random_inputs(rng: &mut ChaCha8Rng, n: usize, p: usize, lo: f64, hi: f64) -> DataMatrix64 {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(lo..hi)).collect())
        .collect();
    DataMatrix64::from_rows(&rows).unwrap()
}

fn random_targets(rng: &mut ChaCha8Rng, x: &DataMatrix64) -> Vec<f64> {
    (0..x.rows())
        .map(|i| x.row(i).iter().map(|v| v.sin()).sum::<f64>() + rng.random_range(-0.3..0.3))
        .collect()
}

fn random_spec(rng: &mut ChaCha8Rng, cauchy: bool) -> KernelSpec<f64> {
    if cauchy {
        KernelSpec::cauchy(rng.random_range(1.0..3.0)).unwrap()
    } else {
        KernelSpec::gaussian(rng.random_range(0.5..2.0)).unwrap()
    }
}

fn err(e: impl std::fmt::Display) -> String {
    format!("{e:#}")
}

fn cfg_in(dir: &Path) -> RunConfig {
    RunConfig {
        out_dir: dir.to_path_buf(),
        ..RunConfig::default()
    }
}

fn ac1_loocv() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let alphas = [0.05, 0.5, 1.0];
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = rng.random_range(5..=25);
        let p = rng.random_range(1..=3);
        let cauchy = i % 2 == 1;
        // the Cauchy power map needs non-negative inputs
        let (lo, hi) = if cauchy { (0.0, 4.0) } else { (-3.0, 3.0) };
        let x = random_inputs(&mut rng, n, p, lo, hi);
        let y = random_targets(&mut rng, &x);
        let spec = random_spec(&mut rng, cauchy);
        let alpha = alphas[i % 3];
        let k = gram_matrix(&spec, &x).map_err(err)?;
        let closed = loocv_score(k.values(), &y, alpha).map_err(err)?.score;
        let brute = loocv_brute_force(&x, &y, &spec, alpha).map_err(err)?;
        let e = rel_err(closed, brute);
        if !(e <= 1e-8) {
            return Err(format!("instance {i} (n={n}, {}): rel err {e:e}", spec.family.kind()));
        }
        worst = worst.max(e);
    }
    Ok(format!("50 instances, max rel err {worst:.2e}"))
}

fn ac2_traces() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for i in 0..40 {
        let n = rng.random_range(2..=50);
        let r = rng.random_range(1..=n);
        let b = nalgebra::DMatrix::<f64>::from_fn(n, r, |_, _| rng.random_range(-1.0..1.0));
        let k = &b * b.transpose();
        let alpha = [0.01, 0.1, 1.0, 3.0][i % 4];
        let k_ours = Matrix64::from_fn(n, n, |a, c| k[(a, c)]);
        let eig = nalgebra::SymmetricEigen::new(k.clone()).eigenvalues;
        let lam: Vec<f64> = eig.iter().map(|&l| l.max(0.0)).collect();
        let hs_oracle: f64 = lam.iter().map(|l| l * l / (l + alpha).powi(4)).sum();
        let tr_oracle: f64 = lam.iter().map(|l| l / (l + alpha).powi(2)).sum();
        let hs = complexity_hs(&k_ours, alpha).map_err(err)?;
        let tr = complexity_trace(&k_ours, alpha).map_err(err)?;
        let y = vec![1.0; n];
        let ctx = ScoringContext::new(&k_ours, &y, alpha).map_err(err)?;
        for (name, got, want) in [
            ("hs", hs, hs_oracle),
            ("trace", tr, tr_oracle),
            ("context hs", ctx.complexity_hs(), hs_oracle),
            ("context trace", ctx.complexity_trace(), tr_oracle),
        ] {
            let e = rel_err(got, want);
            if !(e <= 1e-9) {
                return Err(format!("matrix {i} (n={n}, rank {r}): {name} rel err {e:e}"));
            }
            worst = worst.max(e);
        }
    }
    Ok(format!("40 PSD matrices, n <= 50, max rel err {worst:.2e}"))
}

fn ac3_sum_rule() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    let mut count = 0;
    for &p in &[1usize, 3, 8] {
        for _ in 0..10 {
            let x = random_inputs(&mut rng, 20, p, -2.0, 2.0);
            let y = random_targets(&mut rng, &x);
            let spec = random_spec(&mut rng, false).into_additive();
            let alpha = rng.random_range(0.05..1.0);
            let sigma2 = rng.random_range(0.01..2.0);
            let k = gram_matrix(&spec, &x).map_err(err)?;
            let parts = component_grams(&spec, &x).map_err(err)?;
            let ctx = ScoringContext::new(k.values(), &y, alpha).map_err(err)?;
            let vv = ctx.variable_variances(&parts, sigma2).map_err(err)?;
            if vv.v.len() != p {
                return Err(format!("p={p}: {} variances", vv.v.len()));
            }
            let sum: f64 = vv.v.iter().sum();
            let e = (sum - vv.total).abs() / vv.total.abs();
            if !(e <= 1e-10) {
                return Err(format!("p={p}: |sum V_j - total| / |total| = {e:e}"));
            }
            worst = worst.max(e);
            count += 1;
        }
    }
    Ok(format!("{count} instances, p in {{1,3,8}}, max rel dev {worst:.2e}"))
}

fn ac4_stationarity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst_res = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(10..=40);
        let x = random_inputs(&mut rng, n, 1, -6.0, 6.0);
        let y = random_targets(&mut rng, &x);
        let spec = random_spec(&mut rng, false);
        let alpha = rng.random_range(0.05..1.0);
        let k = gram_matrix(&spec, &x).map_err(err)?;
        let k = k.values();
        let ctx = ScoringContext::new(k, &y, alpha).map_err(err)?;
        let d = ctx.solution().diagnostics.d;
        let theta = &ctx.solution().theta;
        let nf = n as f64;
        let objective = |z: f64, penalty: f64| -> Result<f64, String> {
            Ok(-2.0 * penalized_log_likelihood(k, &y, theta, alpha, z).map_err(err)? + penalty)
        };
        let c1 = ctx.complexity_trace();
        let c2 = ctx.complexity_hs();
        let r1 = ctx.kic1().map_err(err)?;
        let r2 = ctx.kic2().map_err(err)?;
        let z1 = r1.sigma2_used;
        let z2 = r2.sigma2_used;
        let res1 = (c1 * z1 * z1 + nf * z1 - d).abs();
        let res2 = (2.0 * c2 * z2 * z2 * z2 + nf * z2 - d).abs();
        let bound = 1e-8 * d.max(1.0);
        if !(res1 <= bound && res2 <= bound) {
            return Err(format!("instance {i}: residuals {res1:e}, {res2:e} vs bound {bound:e}"));
        }
        worst_res = worst_res.max(res1 / d.max(1.0)).max(res2 / d.max(1.0));
        let f1 = |z: f64| objective(z, z * c1);
        let f2 = |z: f64| objective(z, z * z * c2);
        let at1 = f1(z1)?;
        let at2 = f2(z2)?;
        if rel_err(r1.score, at1) > 1e-12 || rel_err(r2.score, at2) > 1e-12 {
            return Err(format!("instance {i}: reported score differs from the objective at its root"));
        }
        for s in [0.99, 1.01] {
            if !(f1(s * z1)? > at1) {
                return Err(format!("instance {i}: KIC1 does not increase at {s} * sigma2"));
            }
            if !(f2(s * z2)? > at2) {
                return Err(format!("instance {i}: KIC2 does not increase at {s} * sigma2"));
            }
        }
    }
    Ok(format!("100 instances, max scaled residual {worst_res:.2e}, +-1% perturbations increase both"))
}

fn diag_dominant(rng: &mut ChaCha8Rng, p: usize) -> Matrix64 {
    let mut m = Matrix64::zeros(p, p);
    for a in 0..p {
        for b in 0..a {
            let v = rng.random_range(-1.0..1.0);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    for a in 0..p {
        let off: f64 = (0..p).filter(|&b| b != a).map(|b| m[(a, b)].abs()).sum();
        m[(a, a)] = off + rng.random_range(0.1..2.0);
    }
    m
}

fn ac5_icomp() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut min_c = f64::INFINITY;
    for _ in 0..60 {
        let n = rng.random_range(5..=40);
        let x = random_inputs(&mut rng, n, 2, -3.0, 3.0);
        let y = random_targets(&mut rng, &x);
        let k = gram_matrix(&random_spec(&mut rng, false), &x).map_err(err)?;
        let alpha = rng.random_range(0.01..2.0);
        let c = ScoringContext::new(k.values(), &y, alpha)
            .and_then(|ctx| ctx.icomp_complexity())
            .map_err(err)?;
        if !(c >= -1e-12) {
            return Err(format!("random instance: C = {c:e}"));
        }
        min_c = min_c.min(c);
    }
    let mut max_iso = f64::NEG_INFINITY;
    for _ in 0..20 {
        let n = rng.random_range(2..=40);
        let scale = rng.random_range(0.01..10.0);
        let k = Matrix64::identity(n).scaled(scale);
        let y = vec![0.5; n];
        let alpha = rng.random_range(0.01..2.0);
        let c = ScoringContext::new(&k, &y, alpha)
            .and_then(|ctx| ctx.icomp_complexity())
            .map_err(err)?;
        if !(c <= 1e-10) {
            return Err(format!("K = {scale} I: C = {c:e}"));
        }
        max_iso = max_iso.max(c);
    }
    let mut min_gap = f64::INFINITY;
    for _ in 0..100 {
        let p = rng.random_range(2..=10);
        let s = diag_dominant(&mut rng, p);
        let ent = entropy_complexity(&s).map_err(err)?;
        let max = maximal_complexity(&s).map_err(err)?;
        if !(ent <= max + 1e-10) {
            return Err(format!("p={p}: entropy {ent} > maximal {max}"));
        }
        min_gap = min_gap.min(max - ent);
    }
    Ok(format!(
        "min C {min_c:.3e}; max C for cI {max_iso:.1e}; min maximal-entropy gap {min_gap:.3e}"
    ))
}

fn ac6_exp1(dir: &Path) -> Check {
    let out = run_exp1(&cfg_in(dir)).map_err(err)?;
    let mut sigmas: Vec<f64> = out.rows.iter().map(|r| r.sigma).collect();
    sigmas.dedup();
    if sigmas != [0.3, 1.0, 4.0] {
        return Err(format!("unexpected sigma axis {sigmas:?}"));
    }
    for &s in &sigmas {
        let curve: Vec<_> = out.rows.iter().filter(|r| r.sigma == s).collect();
        if curve.len() != SWEEP_ALPHAS.len() || curve.windows(2).any(|w| !(w[0].alpha < w[1].alpha)) {
            return Err(format!("sigma {s}: alpha axis is not the increasing sweep"));
        }
        if let Some(w) = curve.windows(2).find(|w| !(w[1].complexity < w[0].complexity)) {
            return Err(format!(
                "sigma {s}: complexity {} at alpha {} then {} at {}",
                w[0].complexity, w[0].alpha, w[1].complexity, w[1].alpha
            ));
        }
        if s == 1.0 {
            if let Some(w) = curve.windows(2).find(|w| !(w[1].gof >= w[0].gof)) {
                return Err(format!(
                    "sigma 1: -2PLL {} at alpha {} then {} at {}",
                    w[0].gof, w[0].alpha, w[1].gof, w[1].alpha
                ));
            }
        }
    }
    Ok(format!("{} curve points over 3 sigmas", out.rows.len()))
}

fn ac7_exp2(dir: &Path) -> Check {
    let out = run_exp2(&cfg_in(dir)).map_err(err)?;
    let mut worst_ratio = f64::INFINITY;
    for n in [50, 100] {
        let low = out.curve(Setting { n, nsr: 0.05 });
        let high = out.curve(Setting { n, nsr: 0.4 });
        if low.len() != SWEEP_ALPHAS.len() || high.len() != SWEEP_ALPHAS.len() {
            return Err(format!("n={n}: missing curve points"));
        }
        for (l, h) in low.iter().zip(&high) {
            if l.alpha != h.alpha || l.mse.count != 100 || h.mse.count != 100 {
                return Err(format!("n={n}: curves misaligned at alpha {}", l.alpha));
            }
            if !(h.mean_mse > l.mean_mse) {
                return Err(format!(
                    "n={n}, alpha {}: mean MSE {} at NSR 0.4 vs {} at 0.05",
                    l.alpha, h.mean_mse, l.mean_mse
                ));
            }
            worst_ratio = worst_ratio.min(h.mean_mse / l.mean_mse);
        }
    }
    Ok(format!("100 trials, smallest MSE ratio NSR 0.4 / 0.05 = {worst_ratio:.2}"))
}

/// Rebuilds each trial independently and scans every α of the grid.
fn ac8_exp3(dir: &Path) -> Check {
    let setting = Setting { n: 100, nsr: 0.05 };
    let cfg = RunConfig {
        kernel: Some(FamilyKind::Gaussian),
        sigma: Some(1.0),
        n_train: Some(vec![setting.n]),
        nsr: Some(vec![setting.nsr]),
        criteria: Some(vec![Criterion::Kic]),
        ..cfg_in(dir)
    };
    let out = run_exp3(&cfg).map_err(err)?;
    let label = format!("gaussian_{}", setting.label());
    let spec = KernelSpec::gaussian(1.0).unwrap();
    let mut kic = Vec::new();
    let mut oracle = Vec::new();
    for t in 0..cfg.trials {
        let seed = cfg.seed + t as u64;
        let clean = gen_sinc_uniform(setting.n, -6.0, 6.0, seed).map_err(err)?;
        let train = add_noise(&clean, NoiseSpec { nsr: setting.nsr, seed }).map_err(err)?;
        let xs = uniform_inputs(TEST_SIZE, -6.0, 6.0, seed, stream::TEST_INPUTS).map_err(err)?;
        let truth: Vec<f64> = xs.iter().map(|&v| sinc(v)).collect();
        let test_x = DataMatrix64::from_column(&xs).map_err(err)?;
        let k = gram_matrix(&spec, &train.x).map_err(err)?;
        let cross = cross_kernel(&spec, &test_x, &train.x).map_err(err)?;
        let cell_mse: Vec<(f64, f64)> = SWEEP_ALPHAS
            .iter()
            .map(|&a| {
                let ctx = ScoringContext::new(k.values(), &train.y, a).map_err(err)?;
                let pred = cross.matvec(&ctx.solution().theta);
                let m = pred.iter().zip(&truth).map(|(p, f)| (p - f).powi(2)).sum::<f64>()
                    / truth.len() as f64;
                Ok((a, m))
            })
            .collect::<Result<_, String>>()?;
        let best = cell_mse.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let rec = out
            .records
            .iter()
            .find(|r| r.setting == label && r.method == "kic" && r.trial == t)
            .ok_or_else(|| format!("no kic record for trial {t}"))?;
        let at_pick = cell_mse
            .iter()
            .find(|c| c.0 == rec.alpha)
            .ok_or_else(|| format!("trial {t}: selected alpha {} not on the grid", rec.alpha))?
            .1;
        if rel_err(rec.test_mse, at_pick) > 1e-9 {
            return Err(format!("trial {t}: recorded MSE {} vs recomputed {at_pick}", rec.test_mse));
        }
        kic.push(rec.test_mse);
        oracle.push(best);
    }
    let mk = median(&kic);
    let mo = median(&oracle);
    let runner_oracle = median(&out.mse_of(&label, ORACLE));
    if rel_err(runner_oracle, mo) > 1e-9 {
        return Err(format!("runner oracle median {runner_oracle} vs harness {mo}"));
    }
    let ratio = mk / mo;
    let line = format!("median KIC MSE {mk:.4e}, oracle {mo:.4e}, ratio {ratio:.3}");
    if ratio <= 2.0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ac9_exp4(dir: &Path) -> Check {
    let out = run_exp4(&cfg_in(dir)).map_err(err)?;
    let mut wins = 0;
    let mut parts = Vec::new();
    for n in [50, 100] {
        for nsr in [0.05, 0.4] {
            let s = Setting { n, nsr };
            let get = |c| {
                out.table(s, c)
                    .map(|t| (t.modal_count(), t.trials))
                    .ok_or_else(|| format!("no {c} table for {}", s.label()))
            };
            let (kic, tk) = get(Criterion::Kic)?;
            let (loo, tl) = get(Criterion::Loocv)?;
            if tk != 100 || tl != 100 {
                return Err(format!("{}: {tk}/{tl} trials", s.label()));
            }
            if kic >= loo {
                wins += 1;
            }
            parts.push(format!("{} {kic} vs {loo}", s.label()));
        }
    }
    let line = format!("KIC >= LOOCV modal in {wins}/4 ({})", parts.join("; "));
    if wins >= 3 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn run_bin(args: &[&str], out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_kic"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(err)?;
    if !status.status.success() {
        return Err(format!(
            "kic {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&status.stderr)
        ));
    }
    std::fs::read(out.join("results.csv")).map_err(err)
}

fn ac10_determinism(dir: &Path) -> Check {
    let runs: [&[&str]; 5] = [
        &["exp1", "--seed", "7"],
        &["exp2", "--seed", "7", "--trials", "6"],
        &["exp3", "--seed", "7", "--trials", "6"],
        &["exp4", "--seed", "7", "--trials", "6"],
        &["bench", "--seed", "7", "--trials", "6", "--synthetic", "400"],
    ];
    let mut names = Vec::new();
    for args in runs {
        let mut outputs = Vec::new();
        for jobs in ["1", "3"] {
            let mut a = args.to_vec();
            a.extend(["--jobs", jobs]);
            outputs.push(run_bin(&a, &dir.join(format!("{}_j{jobs}", args[0])))?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{}: results.csv differs between --jobs 1 and --jobs 3", args[0]));
        }
        names.push(format!("{} ({} bytes)", args[0], outputs[0].len()));
    }
    Ok(format!("--jobs 1 == --jobs 3 for {}", names.join(", ")))
}

/// Raw Abalone layout: sex letter, seven measurements, integer rings.
fn abalone_stand_in(path: &Path) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4177);
    let mut text = String::new();
    for _ in 0..4177 {
        let sex = ["M", "F", "I"][rng.random_range(0..3)];
        let length: f64 = rng.random_range(0.075..0.815);
        let jitter = |rng: &mut ChaCha8Rng, s: f64| 1.0 + rng.random_range(-s..s);
        let diameter = 0.8 * length * jitter(&mut rng, 0.05);
        let height = 0.34 * length * jitter(&mut rng, 0.15);
        let whole = 2.2 * length.powi(3) * jitter(&mut rng, 0.1);
        let shucked = 0.43 * whole * jitter(&mut rng, 0.1);
        let viscera = 0.22 * whole * jitter(&mut rng, 0.1);
        let shell = 0.29 * whole * jitter(&mut rng, 0.1);
        let rings = (2.0 + 16.0 * length + 40.0 * (shell - 0.5 * shucked).max(0.0)
            + rng.random_range(-2.5..2.5))
        .round()
        .clamp(1.0, 29.0);
        text.push_str(&format!(
            "{sex},{length:.3},{diameter:.3},{height:.3},{whole:.4},{shucked:.4},{viscera:.4},{shell:.4},{rings}\n"
        ));
    }
    std::fs::write(path, text)
}

fn ac11_bench(dir: &Path) -> Check {
    std::fs::create_dir_all(dir).map_err(err)?;
    let (path, source) = match std::env::var_os("KIC_ABALONE_CSV") {
        Some(p) => (PathBuf::from(p), "KIC_ABALONE_CSV"),
        None => {
            let p = dir.join("abalone_stand_in.data");
            abalone_stand_in(&p).map_err(err)?;
            (p, "generated stand-in")
        }
    };
    let cfg = RunConfig {
        dataset: Some(path),
        n_train: Some(vec![100]),
        ..cfg_in(&dir.join("bench"))
    };
    let out = run_bench(&cfg).map_err(err)?;
    let table = CsvTable::read(&dir.join("bench").join("summary.csv")).map_err(err)?;
    let method = table.column("method").ok_or("summary.csv has no method column")?;
    let q50 = table.column("q50").ok_or("summary.csv has no q50 column")?;
    let count = table.column("count").ok_or("summary.csv has no count column")?;
    if table.rows.len() != 6 || out.methods().len() != 6 {
        return Err(format!("{} summary rows, expected 6 methods", table.rows.len()));
    }
    for row in &table.rows {
        let m: f64 = row[q50].parse().map_err(err)?;
        if !(m.is_finite() && m > 0.0) || row[count] != "100" {
            return Err(format!("{}: median {m}, count {}", row[method], row[count]));
        }
    }
    Ok(format!(
        "{source}: n={}, p={}, 6 methods x 100 trials, medians finite and positive",
        out.n, out.p
    ))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let root = tmp.path().to_path_buf();
    let sub = |name: &str| root.join(name);
    type Runner = Box<dyn FnOnce() -> Check>;
    let checks: Vec<(&str, &str, Option<u64>, Runner)> = vec![
        ("AC1", "loocv closed form vs brute force", Some(30), Box::new(ac1_loocv)),
        ("AC2", "trace identities vs eigenvalues", None, Box::new(ac2_traces)),
        ("AC3", "variable-wise sum rule", None, Box::new(ac3_sum_rule)),
        ("AC4", "kic1/kic2 sigma2 stationarity", None, Box::new(ac4_stationarity)),
        ("AC5", "icomp complexity bounds", None, Box::new(ac5_icomp)),
        ("AC6", "exp1 complexity and fit trends", Some(10), Box::new({
            let d = sub("exp1");
            move || ac6_exp1(&d)
        })),
        ("AC7", "exp2 noise raises test MSE", Some(120), Box::new({
            let d = sub("exp2");
            move || ac7_exp2(&d)
        })),
        ("AC8", "exp3 KIC within 2x of grid oracle", Some(180), Box::new({
            let d = sub("exp3");
            move || ac8_exp3(&d)
        })),
        ("AC9", "exp4 KIC selection consistency", Some(300), Box::new({
            let d = sub("exp4");
            move || ac9_exp4(&d)
        })),
        ("AC10", "determinism across --jobs", None, Box::new({
            let d = sub("determinism");
            move || ac10_determinism(&d)
        })),
        ("AC11", "bench protocol smoke", None, Box::new({
            let d = sub("abalone");
            move || ac11_bench(&d)
        })),
    ];
    let mut failed = 0;
    for (id, title, budget, run) in checks {
        let start = Instant::now();
        let mut result = run();
        let took = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&result, budget) {
            if took > Duration::from_secs(limit) {
                result = Err(format!("{detail}; over the {limit} s budget"));
            }
        }
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {id} {title}: {detail} [{:.2} s]", took.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
