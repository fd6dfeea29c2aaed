//! Kernel functions, Gram matrices and the additive per-variable split.
//!
//! Two families are supported:
//!
//! * Gaussian: `k(x, y) = exp(-‖x − y‖² / σ²)`
//! * Cauchy: `k(x, y) = 1 / (1 + ‖x^η − y^η‖² / η)`, with the power applied
//!   coordinate-wise before the distance is taken.
//!
//! An additive spec over `p` input dimensions evaluates the family formula on
//! each coordinate separately and sums the `p` scalar kernels, which is what
//! makes the variable-wise variance decomposition possible.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{KicError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelFamily<T> {
    /// Bandwidth `sigma` in input units.
    Gaussian { sigma: T },
    /// Dimensionless exponent/scale `eta`.
    Cauchy { eta: T },
}

/// Which family a grid sweeps over, without a parameter attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    Gaussian,
    Cauchy,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::Cauchy => "cauchy",
        })
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = KicError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "rbf" => Ok(FamilyKind::Gaussian),
            "cauchy" => Ok(FamilyKind::Cauchy),
            other => Err(KicError::InvalidParameter(format!(
                "unknown kernel family '{other}'"
            ))),
        }
    }
}

impl<T: Scalar> KernelFamily<T> {
    pub fn kind(&self) -> FamilyKind {
        match self {
            KernelFamily::Gaussian { .. } => FamilyKind::Gaussian,
            KernelFamily::Cauchy { .. } => FamilyKind::Cauchy,
        }
    }

    /// The sweepable parameter: σ for Gaussian, η for Cauchy.
    pub fn param(&self) -> T {
        match *self {
            KernelFamily::Gaussian { sigma } => sigma,
            KernelFamily::Cauchy { eta } => eta,
        }
    }

    pub fn with_param(kind: FamilyKind, value: T) -> Self {
        match kind {
            FamilyKind::Gaussian => KernelFamily::Gaussian { sigma: value },
            FamilyKind::Cauchy => KernelFamily::Cauchy { eta: value },
        }
    }
}

/// Declarative kernel description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec<T> {
    pub family: KernelFamily<T>,
    /// Sum of one single-variable kernel per input dimension.
    pub additive: bool,
}

impl<T: Scalar> KernelSpec<T> {
    pub fn gaussian(sigma: T) -> Result<Self> {
        Self::new(KernelFamily::Gaussian { sigma }, false)
    }

    pub fn cauchy(eta: T) -> Result<Self> {
        Self::new(KernelFamily::Cauchy { eta }, false)
    }

    pub fn new(family: KernelFamily<T>, additive: bool) -> Result<Self> {
        let spec = Self { family, additive };
        spec.validate()?;
        Ok(spec)
    }

    pub fn into_additive(self) -> Self {
        Self {
            additive: true,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (name, v) = match self.family {
            KernelFamily::Gaussian { sigma } => ("sigma", sigma),
            KernelFamily::Cauchy { eta } => ("eta", eta),
        };
        if !(v > T::zero()) || !v.is_finite() {
            return Err(KicError::InvalidParameter(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
        Ok(())
    }

    fn cauchy_power(eta: T, v: T) -> Result<T> {
        if v < T::zero() && eta.fract() != T::zero() {
            return Err(KicError::InvalidParameter(format!(
                "cauchy kernel with non-integer eta = {eta} is undefined for negative input {v}"
            )));
        }
        Ok(v.powf(eta))
    }

    /// Scalar kernel on one coordinate.
    fn eval_scalar(&self, a: T, b: T) -> Result<T> {
        Ok(match self.family {
            KernelFamily::Gaussian { sigma } => {
                let d = a - b;
                (-(d * d) / (sigma * sigma)).exp()
            }
            KernelFamily::Cauchy { eta } => {
                let d = Self::cauchy_power(eta, a)? - Self::cauchy_power(eta, b)?;
                T::one() / (T::one() + d * d / eta)
            }
        })
    }

    fn eval_unchecked(&self, x: &[T], y: &[T]) -> Result<T> {
        if self.additive {
            let mut acc = T::zero();
            for (&a, &b) in x.iter().zip(y) {
                acc = acc + self.eval_scalar(a, b)?;
            }
            return Ok(acc);
        }
        match self.family {
            KernelFamily::Gaussian { sigma } => {
                let mut d2 = T::zero();
                for (&a, &b) in x.iter().zip(y) {
                    let d = a - b;
                    d2 = d2 + d * d;
                }
                Ok((-d2 / (sigma * sigma)).exp())
            }
            KernelFamily::Cauchy { eta } => {
                let mut d2 = T::zero();
                for (&a, &b) in x.iter().zip(y) {
                    let d = Self::cauchy_power(eta, a)? - Self::cauchy_power(eta, b)?;
                    d2 = d2 + d * d;
                }
                Ok(T::one() / (T::one() + d2 / eta))
            }
        }
    }
}

/// `k(x, y)` for the given spec.
pub fn eval_kernel<T: Scalar>(spec: &KernelSpec<T>, x: &[T], y: &[T]) -> Result<T> {
    spec.validate()?;
    if x.len() != y.len() {
        return Err(KicError::DimensionMismatch {
            context: "eval_kernel",
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(KicError::NonFinite("eval_kernel input"));
    }
    spec.eval_unchecked(x, y)
}

/// Validated `n × p` input matrix (`n ≥ 1`, `p ≥ 1`, finite).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix<T> {
    values: Matrix<T>,
}

impl<T: Scalar> DataMatrix<T> {
    pub fn new(values: Matrix<T>) -> Result<Self> {
        if values.rows() == 0 || values.cols() == 0 {
            return Err(KicError::InvalidParameter(format!(
                "data matrix must be at least 1x1, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        if !values.is_finite() {
            return Err(KicError::NonFinite("data matrix"));
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let m = Matrix::from_rows(rows).ok_or_else(|| {
            KicError::InvalidParameter("data matrix rows have different lengths".into())
        })?;
        Self::new(m)
    }

    /// One-dimensional inputs, one row per value.
    pub fn from_column(xs: &[T]) -> Result<Self> {
        Self::new(Matrix::from_fn(xs.len(), 1, |i, _| xs[i]))
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.values.row(i)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.values
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let p = self.cols();
        let mut data = Vec::with_capacity(idx.len() * p);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self::new(Matrix::from_vec(idx.len(), p, data).expect("shape by construction"))
    }
}

/// Symmetric kernel evaluation over a set of inputs.
///
/// Grams built from data remember their kernel and the inputs so a fitted model
/// can predict. Precomputed grams (test fixtures, hand-built PSD matrices)
/// carry only the values.
#[derive(Debug, Clone)]
pub struct GramMatrix<T> {
    values: Matrix<T>,
    source: Option<(KernelSpec<T>, Arc<DataMatrix<T>>)>,
}

impl<T: Scalar> GramMatrix<T> {
    /// Wraps an already-computed symmetric matrix. The result is symmetrized.
    pub fn precomputed(mut values: Matrix<T>) -> Result<Self> {
        if !values.is_square() {
            return Err(KicError::DimensionMismatch {
                context: "precomputed gram",
                expected: values.rows(),
                found: values.cols(),
            });
        }
        if !values.is_finite() {
            return Err(KicError::NonFinite("precomputed gram"));
        }
        values.symmetrize();
        Ok(Self {
            values,
            source: None,
        })
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.rows()
    }

    pub fn spec(&self) -> Option<&KernelSpec<T>> {
        self.source.as_ref().map(|(s, _)| s)
    }

    pub fn inputs(&self) -> Option<&Arc<DataMatrix<T>>> {
        self.source.as_ref().map(|(_, x)| x)
    }
}

/// `K[i][j] = k(xᵢ, xⱼ)`, symmetrized.
pub fn gram_matrix<T: Scalar>(spec: &KernelSpec<T>, x: &DataMatrix<T>) -> Result<GramMatrix<T>> {
    spec.validate()?;
    let n = x.rows();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            k[(i, j)] = spec.eval_unchecked(x.row(i), x.row(j))?;
        }
    }
    k.symmetrize();
    if !k.is_finite() {
        return Err(KicError::NonFinite("gram matrix"));
    }
    Ok(GramMatrix {
        values: k,
        source: Some((*spec, Arc::new(x.clone()))),
    })
}

/// Per-dimension grams `K_1 … K_p` of an additive spec.
///
/// The sum `K_1 + … + K_p`, accumulated in index order, reproduces
/// [`gram_matrix`] bit for bit.
pub fn component_grams<T: Scalar>(
    spec: &KernelSpec<T>,
    x: &DataMatrix<T>,
) -> Result<Vec<GramMatrix<T>>> {
    if !spec.additive {
        return Err(KicError::NotAdditive);
    }
    spec.validate()?;
    let single = KernelSpec {
        additive: false,
        ..*spec
    };
    let n = x.rows();
    (0..x.cols())
        .map(|j| {
            let mut k = Matrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    k[(a, b)] = spec.eval_scalar(x.row(a)[j], x.row(b)[j])?;
                }
            }
            k.symmetrize();
            let xj = DataMatrix::from_column(&x.matrix().column(j))?;
            Ok(GramMatrix {
                values: k,
                source: Some((single, Arc::new(xj))),
            })
        })
        .collect()
}

/// Cross-kernel rows `k(x_newₐ, x_trainᵢ)`, shape `m × n`.
pub fn cross_kernel<T: Scalar>(
    spec: &KernelSpec<T>,
    x_new: &DataMatrix<T>,
    x_train: &DataMatrix<T>,
) -> Result<Matrix<T>> {
    if x_new.cols() != x_train.cols() {
        return Err(KicError::DimensionMismatch {
            context: "cross kernel columns",
            expected: x_train.cols(),
            found: x_new.cols(),
        });
    }
    let mut out = Matrix::zeros(x_new.rows(), x_train.rows());
    for a in 0..x_new.rows() {
        for i in 0..x_train.rows() {
            out[(a, i)] = spec.eval_unchecked(x_new.row(a), x_train.row(i))?;
        }
    }
    Ok(out)
}
