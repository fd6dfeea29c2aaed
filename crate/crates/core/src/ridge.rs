//! Kernel ridge regression: fit, predict, hat matrix and the three σ²
//! estimators (closed form, quadratic root, cubic root).

use std::sync::Arc;

use crate::error::{KicError, Result};
use crate::kernel::{cross_kernel, DataMatrix, GramMatrix, KernelSpec};
use crate::linalg::{dot, norm_sq, Cholesky, Matrix};
use crate::scalar::Scalar;

/// Relative jitter ladder, in units of `tr(K)/n`.
const JITTER_LADDER: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Cholesky factor of `K + αI`, with whatever diagonal jitter it took to
/// obtain one.
#[derive(Debug, Clone)]
pub struct RegularizedFactor<T> {
    chol: Cholesky<T>,
    alpha: T,
    jitter: T,
}

pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(KicError::InvalidParameter(format!(
            "ridge parameter alpha must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

impl<T: Scalar> RegularizedFactor<T> {
    /// Factors `K + αI`. On failure the diagonal is shifted by
    /// `1e-10·tr(K)/n`, escalating tenfold up to `1e-6·tr(K)/n`.
    pub fn new(k: &Matrix<T>, alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        if !k.is_square() {
            return Err(KicError::DimensionMismatch {
                context: "gram matrix must be square",
                expected: k.rows(),
                found: k.cols(),
            });
        }
        let n = k.rows();
        let mut shifted = k.clone();
        shifted.add_diagonal(alpha);
        let mut pivot = match Cholesky::factor(&shifted) {
            Ok(chol) => {
                return Ok(Self {
                    chol,
                    alpha,
                    jitter: T::zero(),
                })
            }
            Err(p) => p,
        };
        let mean_diag = k.trace() / T::from_usize_lossy(n.max(1));
        let scale = if mean_diag > T::zero() {
            mean_diag
        } else {
            T::one()
        };
        let mut jitter = T::zero();
        for rel in JITTER_LADDER {
            jitter = scale * T::lit(rel);
            let mut attempt = shifted.clone();
            attempt.add_diagonal(jitter);
            match Cholesky::factor(&attempt) {
                Ok(chol) => {
                    log::warn!("K + alpha*I needed diagonal jitter {jitter} (alpha = {alpha})");
                    return Ok(Self {
                        chol,
                        alpha,
                        jitter,
                    });
                }
                Err(p) => pivot = p,
            }
        }
        Err(KicError::Factorization {
            n,
            alpha: alpha.as_f64(),
            mean_diag: mean_diag.as_f64(),
            jitter: jitter.as_f64(),
            pivot,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Diagonal shift added on top of α (zero when none was needed).
    pub fn jitter(&self) -> T {
        self.jitter
    }

    pub fn cholesky(&self) -> &Cholesky<T> {
        &self.chol
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.chol.solve_vec(b)
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        self.chol.solve_matrix(b)
    }

    /// `log |K + αI|`.
    pub fn log_det(&self) -> T {
        self.chol.log_det()
    }

    /// `(K + αI)⁻¹`.
    pub fn inverse(&self) -> Matrix<T> {
        self.chol.inverse()
    }
}

/// Residual, penalty and their sum `D` at a coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics<T> {
    /// `(Y − Kθ)ᵀ(Y − Kθ)`
    pub rss: T,
    /// `α θᵀKθ`
    pub penalty: T,
    /// `rss + penalty`
    pub d: T,
}

impl<T: Scalar> FitDiagnostics<T> {
    pub fn compute(k: &Matrix<T>, y: &[T], theta: &[T], alpha: T) -> Self {
        let fitted = k.matvec(theta);
        let rss = y
            .iter()
            .zip(&fitted)
            .map(|(&yi, &fi)| (yi - fi) * (yi - fi))
            .sum::<T>();
        let penalty = alpha * dot(theta, &fitted);
        Self {
            rss,
            penalty,
            d: rss + penalty,
        }
    }
}

/// Dual coefficients `θ̂ = (K + αI)⁻¹ Y` and the diagnostics at `θ̂`.
#[derive(Debug, Clone)]
pub struct RidgeSolution<T> {
    pub alpha: T,
    pub theta: Vec<T>,
    pub diagnostics: FitDiagnostics<T>,
    pub jitter: T,
}

pub(crate) fn check_targets<T: Scalar>(k: &Matrix<T>, y: &[T]) -> Result<()> {
    if y.len() != k.rows() {
        return Err(KicError::DimensionMismatch {
            context: "response length vs gram size",
            expected: k.rows(),
            found: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(KicError::NonFinite("response vector"));
    }
    Ok(())
}

impl<T: Scalar> RidgeSolution<T> {
    pub fn solve(k: &Matrix<T>, y: &[T], alpha: T) -> Result<(Self, RegularizedFactor<T>)> {
        check_targets(k, y)?;
        let factor = RegularizedFactor::new(k, alpha)?;
        let sol = Self::with_factor(k, y, &factor);
        Ok((sol, factor))
    }

    pub fn with_factor(k: &Matrix<T>, y: &[T], factor: &RegularizedFactor<T>) -> Self {
        let theta = factor.solve(y);
        let diagnostics = FitDiagnostics::compute(k, y, &theta, factor.alpha());
        Self {
            alpha: factor.alpha(),
            theta,
            diagnostics,
            jitter: factor.jitter(),
        }
    }
}

/// A fitted kernel ridge regression model.
#[derive(Debug, Clone)]
pub struct RidgeModel<T> {
    pub alpha: T,
    pub theta: Vec<T>,
    /// Noise variance; unset until an estimator has been applied.
    pub sigma2: Option<T>,
    pub diagnostics: FitDiagnostics<T>,
    pub jitter: T,
    spec: Option<KernelSpec<T>>,
    train_x: Option<Arc<DataMatrix<T>>>,
}

/// Solves `(K + αI) θ = Y`.
pub fn fit<T: Scalar>(gram: &GramMatrix<T>, y: &[T], alpha: T) -> Result<RidgeModel<T>> {
    let (sol, _) = RidgeSolution::solve(gram.values(), y, alpha)?;
    Ok(RidgeModel {
        alpha,
        theta: sol.theta,
        sigma2: None,
        diagnostics: sol.diagnostics,
        jitter: sol.jitter,
        spec: gram.spec().copied(),
        train_x: gram.inputs().cloned(),
    })
}

impl<T: Scalar> RidgeModel<T> {
    pub fn spec(&self) -> Option<&KernelSpec<T>> {
        self.spec.as_ref()
    }

    pub fn train_x(&self) -> Option<&DataMatrix<T>> {
        self.train_x.as_deref()
    }

    pub fn with_sigma2(mut self, sigma2: T) -> Self {
        self.sigma2 = Some(sigma2);
        self
    }

    /// `f̂(x) = Σᵢ θᵢ k(x, Xᵢ)` at each row of `x_new`.
    pub fn predict(&self, x_new: &DataMatrix<T>) -> Result<Vec<T>> {
        let (spec, train) = match (&self.spec, &self.train_x) {
            (Some(s), Some(x)) => (s, x),
            _ => return Err(KicError::NoTrainingInputs),
        };
        Ok(cross_kernel(spec, x_new, train)?.matvec(&self.theta))
    }
}

pub fn predict<T: Scalar>(model: &RidgeModel<T>, x_new: &DataMatrix<T>) -> Result<Vec<T>> {
    model.predict(x_new)
}

/// `H = (K + αI)⁻¹ K`, symmetrized.
pub fn hat_matrix<T: Scalar>(k: &Matrix<T>, alpha: T) -> Result<Matrix<T>> {
    let factor = RegularizedFactor::new(k, alpha)?;
    Ok(hat_from_factor(k, &factor))
}

pub(crate) fn hat_from_factor<T: Scalar>(k: &Matrix<T>, factor: &RegularizedFactor<T>) -> Matrix<T> {
    let mut h = factor.solve_matrix(k);
    h.symmetrize();
    h
}

/// `σ̂² = D / n`.
pub fn sigma2_closed_form<T: Scalar>(diag: &FitDiagnostics<T>, n: usize) -> T {
    assert!(n >= 1, "sample count must be positive");
    diag.d / T::from_usize_lossy(n)
}

fn check_root_inputs<T: Scalar>(c: T, n: usize, d: T) -> Result<()> {
    if n == 0 {
        return Err(KicError::DegenerateRoot("sample count is zero".into()));
    }
    if !(c > T::zero()) || !c.is_finite() {
        return Err(KicError::DegenerateRoot(format!(
            "complexity coefficient must be positive, got {c}"
        )));
    }
    if !(d > T::zero()) || !d.is_finite() {
        return Err(KicError::DegenerateRoot(format!(
            "residual sum D must be positive, got {d}"
        )));
    }
    Ok(())
}

/// Positive root of `C Z² + n Z − D = 0`.
///
/// Evaluated as `2D / (n + √(n² + 4CD))`, which equals the textbook
/// `(−n + √(n² + 4CD)) / 2C` but stays accurate as `C → 0`.
pub fn sigma2_quadratic_root<T: Scalar>(c: T, n: usize, d: T) -> Result<T> {
    check_root_inputs(c, n, d)?;
    let nf = T::from_usize_lossy(n);
    let four = T::lit(4.0);
    let disc = (nf * nf + four * c * d).sqrt();
    Ok((d + d) / (nf + disc))
}

const CUBIC_MAX_ITER: usize = 200;

/// The real root of `2C Z³ + n Z − D = 0`.
///
/// `g` is strictly increasing with `g(0) = −D < 0` and `g(D/n) = 2C(D/n)³ > 0`,
/// so the root is bracketed by `[0, D/n]`. Newton starts at `D/n` and falls
/// back to bisection whenever a step leaves the bracket.
pub fn sigma2_cubic_root<T: Scalar>(c: T, n: usize, d: T) -> Result<T> {
    check_root_inputs(c, n, d)?;
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    let g = |z: T| two * c * z * z * z + nf * z - d;
    let dg = |z: T| T::lit(6.0) * c * z * z + nf;

    let (mut lo, mut hi) = (T::zero(), d / nf);
    let mut z = hi;
    let eps = T::epsilon();
    for _ in 0..CUBIC_MAX_ITER {
        let gz = g(z);
        if gz == T::zero() {
            return Ok(z);
        }
        if gz < T::zero() {
            lo = z;
        } else {
            hi = z;
        }
        let newton = z - gz / dg(z);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / two
        };
        if (next - z).abs() <= T::lit(4.0) * eps * z.abs() || hi - lo <= eps * hi {
            return Ok(next);
        }
        z = next;
    }
    Err(KicError::NonConvergence {
        routine: "sigma2_cubic_root",
        iterations: CUBIC_MAX_ITER,
    })
}

/// Euclidean norm of `(K + αI)θ − Y`, relative to `‖Y‖`.
pub fn relative_solve_residual<T: Scalar>(k: &Matrix<T>, y: &[T], theta: &[T], alpha: T) -> T {
    let kt = k.matvec(theta);
    let r: Vec<T> = kt
        .iter()
        .zip(theta)
        .zip(y)
        .map(|((&a, &t), &b)| a + alpha * t - b)
        .collect();
    let ny = norm_sq(y).sqrt();
    norm_sq(&r).sqrt() / if ny > T::zero() { ny } else { T::one() }
}
