//! Synthetic sinc data, CSV ingestion, [0, 1] feature scaling and seeded
//! train/test splits.
//!
//! All randomness comes from [`ChaCha8Rng`], which produces the same stream on
//! every platform. A trial's generator is `seed_from_u64(seed)` with the
//! ChaCha stream id selecting independent sub-streams (see [`rng_stream`]).

use std::f64::consts::PI;
use std::io::Read;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{KicError, Result};
use crate::kernel::DataMatrix;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// The noise definition applied by [`add_noise`], recorded in run metadata.
pub const NSR_DEFINITION: &str =
    "noise standard deviation = nsr * sample standard deviation (n-1) of the clean targets";

/// Sub-streams of a trial's generator.
pub mod stream {
    pub const TRAIN_INPUTS: u64 = 0;
    pub const NOISE: u64 = 1;
    pub const TEST_INPUTS: u64 = 2;
    pub const SPLIT: u64 = 3;
}

/// Generator for one `(seed, stream)` pair.
pub fn rng_stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

#[derive(Debug, Clone)]
pub struct Dataset<T> {
    pub x: DataMatrix<T>,
    pub y: Vec<T>,
    pub name: String,
    /// Noise-free targets, synthetic data only.
    pub clean_y: Option<Vec<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(x: DataMatrix<T>, y: Vec<T>, name: impl Into<String>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(KicError::DimensionMismatch {
                context: "dataset targets",
                expected: x.rows(),
                found: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(KicError::NonFinite("dataset targets"));
        }
        Ok(Self {
            x,
            y,
            name: name.into(),
            clean_y: None,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.x.cols()
    }

    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        Ok(Self {
            x: self.x.select_rows(idx)?,
            y: idx.iter().map(|&i| self.y[i]).collect(),
            name: self.name.clone(),
            clean_y: self
                .clean_y
                .as_ref()
                .map(|c| idx.iter().map(|&i| c[i]).collect()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub nsr: f64,
    pub seed: u64,
}

/// `sin(πx)/(πx)` with `sinc(0) = 1`.
pub fn sinc<T: Scalar>(x: T) -> T {
    if x == T::zero() {
        return T::one();
    }
    let px = T::lit(PI) * x;
    px.sin() / px
}

fn sinc_dataset<T: Scalar>(xs: Vec<T>, name: String) -> Result<Dataset<T>> {
    let y: Vec<T> = xs.iter().map(|&x| sinc(x)).collect();
    let mut d = Dataset::new(DataMatrix::from_column(&xs)?, y.clone(), name)?;
    d.clean_y = Some(y);
    Ok(d)
}

/// `n` equally spaced points on `[lo, hi]`, both endpoints included.
pub fn gen_sinc<T: Scalar>(n: usize, lo: T, hi: T) -> Result<Dataset<T>> {
    if n < 2 || !(lo < hi) {
        return Err(KicError::InvalidParameter(format!(
            "gen_sinc needs n >= 2 and lo < hi (n = {n}, lo = {lo}, hi = {hi})"
        )));
    }
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    let xs = (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + step * T::from_usize_lossy(i)
            }
        })
        .collect();
    sinc_dataset(xs, "sinc-grid".into())
}

/// `n` points drawn uniformly on `[lo, hi)`.
pub fn gen_sinc_uniform<T: Scalar>(n: usize, lo: T, hi: T, seed: u64) -> Result<Dataset<T>> {
    let xs = uniform_inputs(n, lo, hi, seed, stream::TRAIN_INPUTS)?;
    sinc_dataset(xs, "sinc-uniform".into())
}

/// `n` draws from `U[lo, hi)` on one sub-stream of `seed`.
pub fn uniform_inputs<T: Scalar>(n: usize, lo: T, hi: T, seed: u64, stream_id: u64) -> Result<Vec<T>> {
    if n < 1 || !(lo < hi) {
        return Err(KicError::InvalidParameter(format!(
            "uniform sampling needs n >= 1 and lo < hi (n = {n}, lo = {lo}, hi = {hi})"
        )));
    }
    let mut rng = rng_stream(seed, stream_id);
    let (l, h) = (lo.as_f64(), hi.as_f64());
    Ok((0..n).map(|_| T::lit(rng.random_range(l..h))).collect())
}

/// Smooth nonlinear regression problem on `[0, 1]^p` in the style of the
/// robot-arm benchmarks: `f(x) = Σⱼ wⱼ sin(π xⱼ) + cos(π Σⱼ xⱼ / p)` with
/// `wⱼ = 1/(j+1)`, plus noise at the given NSR.
pub fn gen_kin_like<T: Scalar>(n: usize, p: usize, nsr: f64, seed: u64) -> Result<Dataset<T>> {
    if n < 2 || p < 1 {
        return Err(KicError::InvalidParameter(format!(
            "gen_kin_like needs n >= 2 and p >= 1 (n = {n}, p = {p})"
        )));
    }
    let flat = uniform_inputs(n * p, T::zero(), T::one(), seed, stream::TRAIN_INPUTS)?;
    let x = Matrix::from_vec(n, p, flat).expect("n * p entries");
    let pi = T::lit(PI);
    let pf = T::from_usize_lossy(p);
    let clean: Vec<T> = (0..n)
        .map(|i| {
            let row = x.row(i);
            let additive: T = row
                .iter()
                .enumerate()
                .map(|(j, &v)| (pi * v).sin() / T::from_usize_lossy(j + 1))
                .sum();
            let total: T = row.iter().copied().sum();
            additive + (pi * total / pf).cos()
        })
        .collect();
    let mut d = Dataset::new(DataMatrix::new(x)?, clean.clone(), "kin-like")?;
    d.clean_y = Some(clean);
    add_noise(&d, NoiseSpec { nsr, seed })
}

fn sample_std<T: Scalar>(v: &[T]) -> T {
    let n = v.len();
    if n < 2 {
        return T::zero();
    }
    let nf = T::from_usize_lossy(n);
    let mean = v.iter().copied().sum::<T>() / nf;
    let ss: T = v.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (ss / T::from_usize_lossy(n - 1)).sqrt()
}

/// `Y = clean_Y + ε`, `ε ~ N(0, (nsr · std(clean_Y))²)` i.i.d.
pub fn add_noise<T: Scalar>(d: &Dataset<T>, spec: NoiseSpec) -> Result<Dataset<T>> {
    if !(spec.nsr >= 0.0) || !spec.nsr.is_finite() {
        return Err(KicError::InvalidParameter(format!(
            "noise-to-signal ratio must be non-negative, got {}",
            spec.nsr
        )));
    }
    let clean = d.clean_y.as_ref().ok_or_else(|| {
        KicError::InvalidParameter("add_noise needs a dataset with clean targets".into())
    })?;
    let mut out = d.clone();
    if spec.nsr == 0.0 {
        out.y = clean.clone();
        return Ok(out);
    }
    let sd = T::lit(spec.nsr) * sample_std(clean);
    let mut rng = rng_stream(spec.seed, stream::NOISE);
    out.y = clean
        .iter()
        .map(|&c| {
            let z: f64 = StandardNormal.sample(&mut rng);
            c + sd * T::lit(z)
        })
        .collect();
    Ok(out)
}

/// Which CSV column holds the response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetColumn {
    Last,
    Index(usize),
}

impl std::str::FromStr for TargetColumn {
    type Err = KicError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("last") {
            return Ok(TargetColumn::Last);
        }
        s.parse::<usize>().map(TargetColumn::Index).map_err(|_| {
            KicError::InvalidParameter(format!("target must be 'last' or a column index, got '{s}'"))
        })
    }
}

fn encode_sex(cell: &str) -> Option<f64> {
    match cell {
        "M" | "m" => Some(0.0),
        "F" | "f" => Some(1.0),
        "I" | "i" => Some(0.5),
        _ => None,
    }
}

/// Reads a comma-separated numeric file.
///
/// A first line with any non-numeric cell is taken as a header. The raw
/// Abalone layout is recognised: if every data row's first cell is one of
/// `M`, `F`, `I`, that column is encoded as `M → 0`, `F → 1`, `I → 0.5`.
pub fn load_csv<T: Scalar>(path: &Path, target: TargetColumn) -> Result<Dataset<T>> {
    let mut text = String::new();
    let io_err = |source| KicError::Io {
        path: path.to_path_buf(),
        source,
    };
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map_err(io_err)?;
    } else {
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(io_err)?;
    }
    let name = path
        .file_stem()
        .map_or_else(|| "stdin".to_string(), |s| s.to_string_lossy().into_owned());
    parse_csv(&text, path, target, name)
}

pub fn parse_csv<T: Scalar>(
    text: &str,
    path: &Path,
    target: TargetColumn,
    name: String,
) -> Result<Dataset<T>> {
    let err = |line: u64, message: String| KicError::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records: Vec<(u64, Vec<String>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((line, rec.iter().map(str::to_owned).collect()));
    }
    if records.is_empty() {
        return Err(err(1, "file contains no data".into()));
    }
    let is_numeric_row = |r: &[String]| r.iter().all(|c| c.parse::<f64>().is_ok());
    let sex_column = records.len() > 1
        && records[1..]
            .iter()
            .all(|(_, r)| r.first().and_then(|c| encode_sex(c)).is_some());
    let row_ok = |r: &[String]| {
        if sex_column {
            encode_sex(&r[0]).is_some() && is_numeric_row(&r[1..])
        } else {
            is_numeric_row(r)
        }
    };
    if !row_ok(&records[0].1) {
        records.remove(0);
    }
    if records.is_empty() {
        return Err(err(2, "file contains a header but no data rows".into()));
    }

    let width = records[0].1.len();
    if width < 2 {
        return Err(err(
            records[0].0,
            "need at least one feature column and one target column".into(),
        ));
    }
    let target_idx = match target {
        TargetColumn::Last => width - 1,
        TargetColumn::Index(i) if i < width => i,
        TargetColumn::Index(i) => {
            return Err(err(
                records[0].0,
                format!("target column {i} out of range for {width} columns"),
            ))
        }
    };

    let mut features = Vec::with_capacity(records.len() * (width - 1));
    let mut y = Vec::with_capacity(records.len());
    for (line, rec) in &records {
        if rec.len() != width {
            return Err(err(
                *line,
                format!("expected {width} columns, found {}", rec.len()),
            ));
        }
        for (j, cell) in rec.iter().enumerate() {
            let v = if sex_column && j == 0 {
                encode_sex(cell)
            } else {
                cell.parse::<f64>().ok()
            };
            let v = v
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(*line, format!("column {j}: '{cell}' is not a finite number")))?;
            if j == target_idx {
                y.push(T::lit(v));
            } else {
                features.push(T::lit(v));
            }
        }
    }
    let x = Matrix::from_vec(records.len(), width - 1, features).expect("rectangular by check");
    Dataset::new(DataMatrix::new(x)?, y, name)
}

/// Per-column affine map onto `[0, 1]`, fitted on one dataset and replayable
/// on another.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationRecord<T> {
    pub min: Vec<T>,
    pub max: Vec<T>,
}

impl<T: Scalar> NormalizationRecord<T> {
    pub fn fit(x: &DataMatrix<T>) -> Self {
        let p = x.cols();
        let mut min = vec![T::infinity(); p];
        let mut max = vec![T::neg_infinity(); p];
        for i in 0..x.rows() {
            for (j, &v) in x.row(i).iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Self { min, max }
    }

    /// Constant columns map to 0. Values outside the fitted range may leave
    /// `[0, 1]`.
    pub fn apply(&self, x: &DataMatrix<T>) -> Result<DataMatrix<T>> {
        if x.cols() != self.min.len() {
            return Err(KicError::DimensionMismatch {
                context: "normalization columns",
                expected: self.min.len(),
                found: x.cols(),
            });
        }
        DataMatrix::new(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
            let span = self.max[j] - self.min[j];
            if span > T::zero() {
                (x.row(i)[j] - self.min[j]) / span
            } else {
                T::zero()
            }
        }))
    }

    /// Inverse of [`apply`](Self::apply). Constant columns come back as their
    /// single value.
    pub fn invert(&self, x: &DataMatrix<T>) -> Result<DataMatrix<T>> {
        if x.cols() != self.min.len() {
            return Err(KicError::DimensionMismatch {
                context: "normalization columns",
                expected: self.min.len(),
                found: x.cols(),
            });
        }
        DataMatrix::new(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
            self.min[j] + x.row(i)[j] * (self.max[j] - self.min[j])
        }))
    }
}

/// Scales features to `[0, 1]` using this dataset's own min/max.
pub fn normalize_01<T: Scalar>(d: &Dataset<T>) -> Result<(Dataset<T>, NormalizationRecord<T>)> {
    let record = NormalizationRecord::fit(&d.x);
    let mut out = d.clone();
    out.x = record.apply(&d.x)?;
    Ok((out, record))
}

/// Uniform random training subset of size `n_train`; the rest is test.
/// Training indices keep the order the sampler returns them in.
pub fn split_train_test<T: Scalar>(
    d: &Dataset<T>,
    n_train: usize,
    seed: u64,
) -> Result<(Dataset<T>, Dataset<T>)> {
    let (train_idx, test_idx) = split_indices(d.len(), n_train, seed)?;
    Ok((d.subset(&train_idx)?, d.subset(&test_idx)?))
}

pub fn split_indices(n: usize, n_train: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n_train == 0 || n_train >= n {
        return Err(KicError::InvalidParameter(format!(
            "n_train must be in 1..{n}, got {n_train}"
        )));
    }
    let mut rng = rng_stream(seed, stream::SPLIT);
    let train = sample(&mut rng, n, n_train).into_vec();
    let mut in_train = vec![false; n];
    for &i in &train {
        in_train[i] = true;
    }
    let test = (0..n).filter(|&i| !in_train[i]).collect();
    Ok((train, test))
}
