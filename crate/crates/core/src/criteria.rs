//! Model-selection scores for kernel ridge regression.
//!
//! Every criterion is reported as a number to minimise, split into a
//! goodness-of-fit part and a complexity part:
//!
//! | criterion | goodness of fit | complexity |
//! |-----------|-----------------|------------|
//! | KIC   | −2·PLL(θ̂, D/n) | `tr[K(K+αI)⁻²K(K+αI)⁻²]` (HS norm of Σθ over σ⁴) |
//! | KIC1  | −2·PLL(θ̂, Z)   | `Z · tr[K(K+αI)⁻²]`, Z the quadratic root |
//! | KIC2  | −2·PLL(θ̂, Z)   | `Z² · tr[K(K+αI)⁻²K(K+αI)⁻²]`, Z the cubic root |
//! | ICOMP | −2·PLL(θ̂, D/n) | `2 · (n/2) log(AM/GM)` of Σθ* = σ²(K+αI)⁻² |
//! | GPR   | `½ yᵀΣ⁻¹y + (n/2) log 2π` | `½ log|Σ|`, Σ = K + noise²·I |
//! | LOOCV | closed-form leave-one-out MSE | 0 |
//!
//! A [`ScoringContext`] factors `K + αI` once and shares the factor, the
//! hat matrix and the inverse across criteria at one grid point.

use std::cell::OnceCell;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{KicError, Result};
use crate::kernel::{gram_matrix, DataMatrix, GramMatrix, KernelSpec};
use crate::linalg::{dot, Cholesky, Matrix};
use crate::ridge::{
    check_alpha, check_targets, fit, hat_from_factor, sigma2_closed_form, sigma2_cubic_root,
    sigma2_quadratic_root, RegularizedFactor, RidgeSolution,
};
use crate::scalar::Scalar;

/// Floor substituted for σ² before any `log σ²` when the data are fitted
/// exactly.
pub const SIGMA2_FLOOR: f64 = 1e-12;

/// Smallest admissible `1 − Hᵢᵢ` in the closed-form LOOCV.
pub const LEVERAGE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Criterion {
    Kic,
    Kic1,
    Kic2,
    Icomp,
    GprLml,
    Loocv,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Kic,
        Criterion::Kic1,
        Criterion::Kic2,
        Criterion::Icomp,
        Criterion::GprLml,
        Criterion::Loocv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Kic => "kic",
            Criterion::Kic1 => "kic1",
            Criterion::Kic2 => "kic2",
            Criterion::Icomp => "icomp",
            Criterion::GprLml => "gpr",
            Criterion::Loocv => "loocv",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = KicError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kic" => Ok(Criterion::Kic),
            "kic1" | "kic_1" => Ok(Criterion::Kic1),
            "kic2" | "kic_2" => Ok(Criterion::Kic2),
            "icomp" => Ok(Criterion::Icomp),
            "gpr" | "gpr_lml" => Ok(Criterion::GprLml),
            "loocv" => Ok(Criterion::Loocv),
            other => Err(KicError::InvalidParameter(format!(
                "unknown criterion '{other}' (expected kic, kic1, kic2, icomp, gpr, loocv)"
            ))),
        }
    }
}

/// One criterion evaluated at one grid point. Lower scores are better.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport<T> {
    pub criterion: Criterion,
    pub score: T,
    pub gof_term: T,
    pub complexity_term: T,
    /// σ² plugged into the likelihood (noise² for GPR, 0 for LOOCV).
    pub sigma2_used: T,
    pub alpha: T,
    pub kernel: Option<KernelSpec<T>>,
}

impl<T: Scalar> CriterionReport<T> {
    fn new(criterion: Criterion, gof: T, complexity: T, sigma2: T, alpha: T) -> Self {
        Self {
            criterion,
            score: gof + complexity,
            gof_term: gof,
            complexity_term: complexity,
            sigma2_used: sigma2,
            alpha,
            kernel: None,
        }
    }

    pub fn with_kernel(mut self, spec: KernelSpec<T>) -> Self {
        self.kernel = Some(spec);
        self
    }
}

/// Options that change how individual criteria are evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScoreOptions<T> {
    /// Noise variance added to K for the GPR evidence. Defaults to α.
    pub gpr_noise: Option<T>,
}

/// ```text
/// PLL = −n/2·log 2π − n/2·log σ² − (Y−Kθ)ᵀ(Y−Kθ)/(2σ²) − α θᵀKθ/(2σ²)
/// ```
pub fn penalized_log_likelihood<T: Scalar>(
    k: &Matrix<T>,
    y: &[T],
    theta: &[T],
    alpha: T,
    sigma2: T,
) -> Result<T> {
    check_alpha(alpha)?;
    check_targets(k, y)?;
    if theta.len() != y.len() {
        return Err(KicError::DimensionMismatch {
            context: "theta length",
            expected: y.len(),
            found: theta.len(),
        });
    }
    if !(sigma2 > T::zero()) || !sigma2.is_finite() {
        return Err(KicError::InvalidParameter(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    let fitted = k.matvec(theta);
    let rss: T = y
        .iter()
        .zip(&fitted)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    let penalty = alpha * dot(theta, &fitted);
    Ok(pll_terms(y.len(), rss, penalty, sigma2))
}

fn pll_terms<T: Scalar>(n: usize, rss: T, penalty: T, sigma2: T) -> T {
    let half_n = T::from_usize_lossy(n) * T::lit(0.5);
    let two = T::lit(2.0);
    -half_n * T::lit(2.0 * PI).ln() - half_n * sigma2.ln() - rss / (two * sigma2)
        - penalty / (two * sigma2)
}

fn floored<T: Scalar>(sigma2: T, what: &str) -> T {
    let floor = T::lit(SIGMA2_FLOOR);
    if sigma2 < floor || !sigma2.is_finite() {
        log::warn!("{what}: sigma2 = {sigma2} replaced by floor {floor}");
        floor
    } else {
        sigma2
    }
}

/// Per-variable conditional variances of an additive kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableVariances<T> {
    /// `V_j = σ² tr[K_j (K+αI)⁻²]`
    pub v: Vec<T>,
    /// `σ² tr[K (K+αI)⁻²]`
    pub total: T,
    /// `Σ_j V_j²`, reported alongside the HS complexity for comparison.
    pub sum_of_squares: T,
}

/// Shared state for scoring every criterion at one `(K, Y, α)`.
pub struct ScoringContext<'a, T: Scalar> {
    k: &'a Matrix<T>,
    y: &'a [T],
    factor: RegularizedFactor<T>,
    solution: RidgeSolution<T>,
    hat: OnceCell<Matrix<T>>,
    inverse: OnceCell<Matrix<T>>,
    shrunk: OnceCell<Matrix<T>>,
}

impl<'a, T: Scalar> ScoringContext<'a, T> {
    pub fn new(k: &'a Matrix<T>, y: &'a [T], alpha: T) -> Result<Self> {
        let (solution, factor) = RidgeSolution::solve(k, y, alpha)?;
        Ok(Self {
            k,
            y,
            factor,
            solution,
            hat: OnceCell::new(),
            inverse: OnceCell::new(),
            shrunk: OnceCell::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn alpha(&self) -> T {
        self.factor.alpha()
    }

    pub fn solution(&self) -> &RidgeSolution<T> {
        &self.solution
    }

    pub fn factor(&self) -> &RegularizedFactor<T> {
        &self.factor
    }

    /// `H = (K + αI)⁻¹ K`.
    pub fn hat(&self) -> &Matrix<T> {
        self.hat.get_or_init(|| hat_from_factor(self.k, &self.factor))
    }

    /// `A = (K + αI)⁻¹`.
    pub fn inverse(&self) -> &Matrix<T> {
        self.inverse.get_or_init(|| self.factor.inverse())
    }

    /// `M = (K + αI)⁻² K = A H`.
    pub fn shrunk_kernel(&self) -> &Matrix<T> {
        self.shrunk.get_or_init(|| shrunk_from_hat(self.hat(), &self.factor))
    }

    /// `tr[K(K+αI)⁻² K(K+αI)⁻²] = tr[M²]`.
    pub fn complexity_hs(&self) -> T {
        let m = self.shrunk_kernel();
        m.trace_of_product(m).max(T::zero())
    }

    /// `tr[K(K+αI)⁻²] = tr[M]`.
    pub fn complexity_trace(&self) -> T {
        self.shrunk_kernel().trace().max(T::zero())
    }

    fn pll(&self, sigma2: T) -> T {
        let d = &self.solution.diagnostics;
        pll_terms(self.n(), d.rss, d.penalty, sigma2)
    }

    fn closed_form_sigma2(&self, what: &str) -> T {
        floored(sigma2_closed_form(&self.solution.diagnostics, self.n()), what)
    }

    pub fn kic(&self) -> CriterionReport<T> {
        let s2 = self.closed_form_sigma2("kic");
        let gof = -T::lit(2.0) * self.pll(s2);
        CriterionReport::new(Criterion::Kic, gof, self.complexity_hs(), s2, self.alpha())
    }

    fn root_sigma2(
        &self,
        c: T,
        root: fn(T, usize, T) -> Result<T>,
        what: &str,
    ) -> Result<T> {
        let d = self.solution.diagnostics.d;
        if c == T::zero() {
            // the polynomial degenerates to n Z − D = 0
            return Ok(self.closed_form_sigma2(what));
        }
        match root(c, self.n(), d) {
            Ok(z) => Ok(floored(z, what)),
            Err(KicError::DegenerateRoot(_)) if d <= T::zero() => Ok(floored(T::zero(), what)),
            Err(e) => Err(e),
        }
    }

    pub fn kic1(&self) -> Result<CriterionReport<T>> {
        let c = self.complexity_trace();
        let z = self.root_sigma2(c, sigma2_quadratic_root, "kic1")?;
        let gof = -T::lit(2.0) * self.pll(z);
        Ok(CriterionReport::new(Criterion::Kic1, gof, z * c, z, self.alpha()))
    }

    pub fn kic2(&self) -> Result<CriterionReport<T>> {
        let c = self.complexity_hs();
        let z = self.root_sigma2(c, sigma2_cubic_root, "kic2")?;
        let gof = -T::lit(2.0) * self.pll(z);
        Ok(CriterionReport::new(Criterion::Kic2, gof, z * z * c, z, self.alpha()))
    }

    /// ICOMP maximal covariance complexity `(n/2) log(AM/GM)` of the
    /// eigenvalues of `σ²(K+αI)⁻²`. σ² cancels in the ratio.
    pub fn icomp_complexity(&self) -> Result<T> {
        let n = T::from_usize_lossy(self.n());
        let tr_a2 = self.inverse().frobenius_sq();
        let log_det = self.factor.log_det();
        if !(tr_a2 > T::zero()) || !tr_a2.is_finite() || !log_det.is_finite() {
            return Err(KicError::Numerical(format!(
                "covariance eigenvalues are not all positive (tr = {tr_a2}, log det = {log_det})"
            )));
        }
        // log AM = log σ² + log(tr A² / n),  log GM = log σ² − (2/n) log|K+αI|
        let two = T::lit(2.0);
        let c = n / two * ((tr_a2 / n).ln() + two / n * log_det);
        Ok(c)
    }

    pub fn icomp(&self) -> Result<CriterionReport<T>> {
        let s2 = self.closed_form_sigma2("icomp");
        let gof = -T::lit(2.0) * self.pll(s2);
        let c = self.icomp_complexity()?;
        Ok(CriterionReport::new(
            Criterion::Icomp,
            gof,
            T::lit(2.0) * c,
            s2,
            self.alpha(),
        ))
    }

    /// Negated GPR log marginal likelihood with `Σ = K + noise²·I`.
    pub fn gpr(&self, noise2: Option<T>) -> Result<CriterionReport<T>> {
        let noise2 = noise2.unwrap_or(self.alpha());
        let (quad, log_det) = if noise2 == self.alpha() {
            (dot(self.y, &self.solution.theta), self.factor.log_det())
        } else {
            let f = RegularizedFactor::new(self.k, noise2)?;
            (dot(self.y, &f.solve(self.y)), f.log_det())
        };
        let half = T::lit(0.5);
        let gof = half * quad + half * T::from_usize_lossy(self.n()) * T::lit(2.0 * PI).ln();
        Ok(CriterionReport::new(
            Criterion::GprLml,
            gof,
            half * log_det,
            noise2,
            self.alpha(),
        ))
    }

    /// `‖diag(I−H)⁻¹ (I−H) Y‖² / n`.
    pub fn loocv(&self) -> Result<CriterionReport<T>> {
        let h = self.hat();
        let n = self.n();
        let hy = h.matvec(self.y);
        let floor = T::lit(LEVERAGE_FLOOR);
        let mut sse = T::zero();
        for i in 0..n {
            let denom = T::one() - h[(i, i)];
            if !(denom > floor) {
                return Err(KicError::DegenerateLeverage {
                    index: i,
                    value: denom.as_f64(),
                });
            }
            let r = (self.y[i] - hy[i]) / denom;
            sse = sse + r * r;
        }
        let score = sse / T::from_usize_lossy(n);
        Ok(CriterionReport::new(
            Criterion::Loocv,
            score,
            T::zero(),
            T::zero(),
            self.alpha(),
        ))
    }

    pub fn score(&self, criterion: Criterion, opts: &ScoreOptions<T>) -> Result<CriterionReport<T>> {
        match criterion {
            Criterion::Kic => Ok(self.kic()),
            Criterion::Kic1 => self.kic1(),
            Criterion::Kic2 => self.kic2(),
            Criterion::Icomp => self.icomp(),
            Criterion::GprLml => self.gpr(opts.gpr_noise),
            Criterion::Loocv => self.loocv(),
        }
    }

    pub fn variable_variances(
        &self,
        components: &[GramMatrix<T>],
        sigma2: T,
    ) -> Result<VariableVariances<T>> {
        if components.is_empty() {
            return Err(KicError::InvalidParameter("no component grams".into()));
        }
        let n = self.n();
        let mut sum = Matrix::zeros(n, n);
        for c in components {
            if c.dim() != n {
                return Err(KicError::DimensionMismatch {
                    context: "component gram size",
                    expected: n,
                    found: c.dim(),
                });
            }
            sum = sum.add(c.values());
        }
        let dev = sum.max_abs_diff(self.k);
        if !(dev <= T::lit(1e-10)) {
            return Err(KicError::ComponentMismatch(dev.as_f64()));
        }
        if !(sigma2 >= T::zero()) {
            return Err(KicError::InvalidParameter(format!(
                "sigma2 must be non-negative, got {sigma2}"
            )));
        }
        let a = self.inverse();
        let a2 = a.matmul(a);
        let v: Vec<T> = components
            .iter()
            .map(|c| sigma2 * c.values().trace_of_product(&a2))
            .collect();
        let sum_of_squares = v.iter().map(|&x| x * x).sum();
        Ok(VariableVariances {
            v,
            total: sigma2 * self.complexity_trace(),
            sum_of_squares,
        })
    }
}

/// `tr[K(K+αI)⁻² K(K+αI)⁻²] = Σᵢ λᵢ² / (λᵢ+α)⁴`.
pub fn complexity_hs<T: Scalar>(k: &Matrix<T>, alpha: T) -> Result<T> {
    let factor = RegularizedFactor::new(k, alpha)?;
    let m = shrunk_from_hat(&hat_from_factor(k, &factor), &factor);
    Ok(m.trace_of_product(&m).max(T::zero()))
}

/// `tr[K(K+αI)⁻²] = Σᵢ λᵢ / (λᵢ+α)²`.
pub fn complexity_trace<T: Scalar>(k: &Matrix<T>, alpha: T) -> Result<T> {
    let factor = RegularizedFactor::new(k, alpha)?;
    let m = shrunk_from_hat(&hat_from_factor(k, &factor), &factor);
    Ok(m.trace().max(T::zero()))
}

fn shrunk_from_hat<T: Scalar>(h: &Matrix<T>, factor: &RegularizedFactor<T>) -> Matrix<T> {
    let mut m = factor.solve_matrix(h);
    m.symmetrize();
    m
}

/// Entropy complexity `½ Σⱼ log σⱼⱼ − ½ log|Σ|` of a covariance matrix.
/// Zero iff `Σ` is diagonal.
pub fn entropy_complexity<T: Scalar>(sigma: &Matrix<T>) -> Result<T> {
    let log_det = covariance_log_det(sigma)?;
    let half = T::lit(0.5);
    let diag: T = sigma.diagonal().into_iter().map(|s| s.ln()).sum();
    Ok(half * diag - half * log_det)
}

/// Maximal covariance complexity `(p/2) log(tr(Σ)/p) − ½ log|Σ|`, an
/// upper bound on [`entropy_complexity`].
pub fn maximal_complexity<T: Scalar>(sigma: &Matrix<T>) -> Result<T> {
    let log_det = covariance_log_det(sigma)?;
    let p = T::from_usize_lossy(sigma.rows());
    let half = T::lit(0.5);
    Ok(half * p * (sigma.trace() / p).ln() - half * log_det)
}

fn covariance_log_det<T: Scalar>(sigma: &Matrix<T>) -> Result<T> {
    if !sigma.is_square() || sigma.rows() == 0 {
        return Err(KicError::DimensionMismatch {
            context: "covariance",
            expected: sigma.rows(),
            found: sigma.cols(),
        });
    }
    if !sigma.is_finite() {
        return Err(KicError::NonFinite("covariance"));
    }
    let chol = Cholesky::factor(sigma).map_err(|pivot| {
        KicError::Numerical(format!("covariance is not positive definite (pivot {pivot})"))
    })?;
    Ok(chol.log_det())
}

pub fn variable_variances<T: Scalar>(
    components: &[GramMatrix<T>],
    k: &Matrix<T>,
    alpha: T,
    sigma2: T,
) -> Result<VariableVariances<T>> {
    let y = vec![T::zero(); k.rows()];
    ScoringContext::new(k, &y, alpha)?.variable_variances(components, sigma2)
}

pub fn kic_score<T: Scalar>(k: &Matrix<T>, y: &[T], alpha: T) -> Result<CriterionReport<T>> {
    Ok(ScoringContext::new(k, y, alpha)?.kic())
}

pub fn kic1_score<T: Scalar>(k: &Matrix<T>, y: &[T], alpha: T) -> Result<CriterionReport<T>> {
    ScoringContext::new(k, y, alpha)?.kic1()
}

pub fn kic2_score<T: Scalar>(k: &Matrix<T>, y: &[T], alpha: T) -> Result<CriterionReport<T>> {
    ScoringContext::new(k, y, alpha)?.kic2()
}

pub fn icomp_score<T: Scalar>(k: &Matrix<T>, y: &[T], alpha: T) -> Result<CriterionReport<T>> {
    ScoringContext::new(k, y, alpha)?.icomp()
}

pub fn gpr_lml_score<T: Scalar>(
    k: &Matrix<T>,
    y: &[T],
    alpha: T,
    noise2: T,
) -> Result<CriterionReport<T>> {
    if !(noise2 > T::zero()) {
        return Err(KicError::InvalidParameter(format!(
            "gpr noise variance must be positive, got {noise2}"
        )));
    }
    ScoringContext::new(k, y, alpha)?.gpr(Some(noise2))
}

pub fn loocv_score<T: Scalar>(k: &Matrix<T>, y: &[T], alpha: T) -> Result<CriterionReport<T>> {
    ScoringContext::new(k, y, alpha)?.loocv()
}

/// Leave-one-out error by refitting on each `n − 1` subset.
pub fn loocv_brute_force<T: Scalar>(
    x: &DataMatrix<T>,
    y: &[T],
    spec: &KernelSpec<T>,
    alpha: T,
) -> Result<T> {
    let n = x.rows();
    if n < 2 {
        return Err(KicError::InvalidParameter(
            "brute-force LOOCV needs at least two points".into(),
        ));
    }
    if y.len() != n {
        return Err(KicError::DimensionMismatch {
            context: "brute-force LOOCV targets",
            expected: n,
            found: y.len(),
        });
    }
    let mut sse = T::zero();
    for i in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let xs = x.select_rows(&keep)?;
        let ys: Vec<T> = keep.iter().map(|&j| y[j]).collect();
        let model = fit(&gram_matrix(spec, &xs)?, &ys, alpha)?;
        let held = x.select_rows(&[i])?;
        let r = y[i] - model.predict(&held)?[0];
        sse = sse + r * r;
    }
    Ok(sse / T::from_usize_lossy(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::component_grams;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    const LN_2PI: f64 = 1.8378770664093453;

    fn psd(buf: &[f64], n: usize) -> Matrix<f64> {
        let b = Matrix::<f64>::from_fn(n, n, |i, j| buf[i * n + j]);
        b.matmul(&b.transpose()).scaled(1.0 / n as f64)
    }

    fn eigenvalues(k: &Matrix<f64>) -> Vec<f64> {
        let n = k.rows();
        DMatrix::from_row_slice(n, n, k.as_slice())
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0))
            .collect()
    }

    fn one() -> Matrix<f64> {
        Matrix::<f64>::from_rows(&[vec![1.0]]).unwrap()
    }

    #[test]
    fn pll_examples() {
        let k = one();
        let v = penalized_log_likelihood(&k, &[0.0], &[0.0], 1.0, 1.0).unwrap();
        assert!((v + 0.5 * LN_2PI).abs() < 1e-15);
        assert!((v + 0.918939).abs() < 1e-6);

        let v = penalized_log_likelihood(&k, &[2.0], &[1.0], 1.0, 2.0).unwrap();
        let terms = -0.5 * LN_2PI - 0.5 * 2f64.ln() - 1.0 / 4.0 - 1.0 / 4.0;
        assert!((v - terms).abs() < 1e-15);
        assert!((v + 1.765512).abs() < 1e-6);

        assert!(penalized_log_likelihood(&k, &[0.0], &[0.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn pll_doubling_sigma2_with_zero_residual() {
        let k = Matrix::<f64>::identity(3);
        let y = [0.0; 3];
        let th = [0.0; 3];
        let a = penalized_log_likelihood(&k, &y, &th, 0.5, 0.7).unwrap();
        let b = penalized_log_likelihood(&k, &y, &th, 0.5, 1.4).unwrap();
        assert!((b - a + 1.5 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn complexities_on_identity() {
        let k = Matrix::<f64>::identity(5);
        assert!((complexity_hs(&k, 1.0).unwrap() - 5.0 / 16.0).abs() < 1e-14);
        assert!((complexity_trace(&k, 1.0).unwrap() - 5.0 / 4.0).abs() < 1e-14);
        assert!(complexity_hs(&k, 1e4).unwrap() <= 5.0 / 1e16);
        let lam = 3.0;
        let k1 = Matrix::<f64>::from_rows(&[vec![lam]]).unwrap();
        let want = lam / (lam + 0.2f64).powi(2);
        assert!((complexity_trace(&k1, 0.2).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn kic_scalar_oracle() {
        let r = kic_score(&one(), &[2.0], 1.0).unwrap();
        assert!((r.sigma2_used - 2.0).abs() < 1e-14);
        let want = 2.0 * (0.5 * LN_2PI + 0.5 * 2f64.ln() + 0.5) + 1.0 / 16.0;
        assert!((r.score - want).abs() < 1e-14);
        assert!((r.complexity_term - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn kic_complexity_ignores_response() {
        let k = Matrix::<f64>::identity(4);
        let a = kic_score(&k, &[1.0, 2.0, -1.0, 0.5], 1.0).unwrap();
        let b = kic_score(&k, &[10.0, 20.0, -10.0, 5.0], 1.0).unwrap();
        assert!((a.complexity_term - 4.0 / 16.0).abs() < 1e-14);
        assert_eq!(a.complexity_term, b.complexity_term);
        assert!(a.gof_term != b.gof_term);
    }

    #[test]
    fn kic1_scalar_oracle_and_limit() {
        let r = kic1_score(&one(), &[2.0], 1.0).unwrap();
        let want = (-1.0 + 3f64.sqrt()) / 0.5;
        assert!((r.sigma2_used - want).abs() < 1e-14);
        assert!((r.sigma2_used - 1.4641).abs() < 1e-4);

        let k = Matrix::<f64>::identity(3);
        let y = [1.0, -0.5, 2.0];
        let big = 1e6;
        let r1 = kic1_score(&k, &y, big).unwrap();
        let r0 = kic_score(&k, &y, big).unwrap();
        assert!((r1.sigma2_used - r0.sigma2_used).abs() < 1e-9 * r0.sigma2_used);
    }

    #[test]
    fn kic2_limit_matches_closed_form() {
        let k = Matrix::<f64>::identity(3);
        let y = [1.0, -0.5, 2.0];
        let r2 = kic2_score(&k, &y, 1e6).unwrap();
        let r0 = kic_score(&k, &y, 1e6).unwrap();
        assert!((r2.sigma2_used - r0.sigma2_used).abs() < 1e-9 * r0.sigma2_used);
    }

    #[test]
    fn icomp_examples() {
        let k = Matrix::<f64>::identity(4).scaled(2.5);
        let ctx_y = [1.0, 0.0, -1.0, 0.3];
        let ctx = ScoringContext::new(&k, &ctx_y, 0.4).unwrap();
        assert!(ctx.icomp_complexity().unwrap().abs() < 1e-12);

        let k = Matrix::<f64>::from_diagonal(&[1.0, 3.0]);
        let ctx_y = [1.0, 1.0];
        let ctx = ScoringContext::new(&k, &ctx_y, 1.0).unwrap();
        let c = ctx.icomp_complexity().unwrap();
        assert!((c - 1.25f64.ln()).abs() < 1e-14);
        assert!((c - 0.22314).abs() < 1e-5);
        let r = ctx.icomp().unwrap();
        assert!((r.complexity_term - 2.0 * c).abs() < 1e-15);
        // σ² cancels: scaling Y rescales σ̂² but not C
        let y10 = [10.0, 10.0];
        let ctx10 = ScoringContext::new(&k, &y10, 1.0).unwrap();
        assert!(ctx10.icomp().unwrap().complexity_term == r.complexity_term);
    }

    #[test]
    fn gpr_examples() {
        let zero = Matrix::<f64>::zeros(1, 1);
        let r = gpr_lml_score(&zero, &[0.0], 1.0, 1.0).unwrap();
        assert!((r.score - 0.5 * LN_2PI).abs() < 1e-15);

        let zero = Matrix::<f64>::zeros(3, 3);
        let y = [1.0, -2.0, 0.5];
        let r = gpr_lml_score(&zero, &y, 1.0, 1.0).unwrap();
        let lml = -0.5 * (1.0 + 4.0 + 0.25) - 1.5 * LN_2PI;
        assert!((r.score + lml).abs() < 1e-14);
        assert!(r.complexity_term.abs() < 1e-15);
    }

    #[test]
    fn loocv_examples() {
        let k = Matrix::<f64>::identity(2);
        let r = loocv_score(&k, &[2.0, 0.0], 1.0).unwrap();
        assert!((r.score - 2.0).abs() < 1e-14);
        assert_eq!(r.complexity_term, 0.0);
        let r = loocv_score(&k, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(r.score, 0.0);
    }

    #[test]
    fn loocv_flags_degenerate_leverage() {
        // α tiny relative to a huge eigenvalue pushes Hᵢᵢ to 1
        let k = Matrix::<f64>::from_rows(&[vec![1e16]]).unwrap();
        let err = loocv_score(&k, &[1.0], 1e-3).unwrap_err();
        assert!(matches!(err, KicError::DegenerateLeverage { index: 0, .. }));
    }

    #[test]
    fn brute_force_two_point_symmetry() {
        let x = DataMatrix::<f64>::from_column(&[-1.0, 1.0]).unwrap();
        let spec = KernelSpec::<f64>::gaussian(1.0).unwrap();
        let y = [0.5, 0.5];
        let e = loocv_brute_force(&x, &y, &spec, 0.3).unwrap();
        // each held-out point sees the mirror-image model
        let keep = DataMatrix::<f64>::from_column(&[1.0]).unwrap();
        let m = fit(&gram_matrix(&spec, &keep).unwrap(), &[0.5], 0.3).unwrap();
        let p = m.predict(&DataMatrix::<f64>::from_column(&[-1.0]).unwrap()).unwrap()[0];
        assert!((e - (0.5 - p).powi(2)).abs() < 1e-15);
        assert!(loocv_brute_force(&keep, &[0.5], &spec, 0.3).is_err());
    }

    #[test]
    fn brute_force_duplicate_point() {
        let x = DataMatrix::<f64>::from_column(&[0.0, 0.3, 0.3, 1.2, 2.0]).unwrap();
        let spec = KernelSpec::<f64>::gaussian(1.0).unwrap();
        let y = [0.1, 0.8, 0.8, -0.3, 0.4];
        let alpha = 0.05;
        // held-out error for index 2 equals the in-sample residual of the
        // fit on the remaining points at its twin's location
        let keep = [0usize, 1, 3, 4];
        let xs = x.select_rows(&keep).unwrap();
        let ys: Vec<f64> = keep.iter().map(|&j| y[j]).collect();
        let m = fit(&gram_matrix(&spec, &xs).unwrap(), &ys, alpha).unwrap();
        let in_sample = m.predict(&xs).unwrap()[1];
        let held = m.predict(&x.select_rows(&[2]).unwrap()).unwrap()[0];
        assert_eq!(in_sample, held);
        let loo = loocv_brute_force(&x, &y, &spec, alpha).unwrap();
        let closed = loocv_score(gram_matrix(&spec, &x).unwrap().values(), &y, alpha).unwrap();
        assert!((loo - closed.score).abs() <= 1e-8 * loo);
    }

    #[test]
    fn variable_variances_cases() {
        let x = DataMatrix::<f64>::from_rows(&[vec![0.0], vec![0.5], vec![1.5]]).unwrap();
        let spec = KernelSpec::<f64>::gaussian(1.0).unwrap().into_additive();
        let parts = component_grams(&spec, &x).unwrap();
        let k = gram_matrix(&spec, &x).unwrap();
        let vv = variable_variances(&parts, k.values(), 0.3, 2.0).unwrap();
        assert!((vv.v[0] - vv.total).abs() <= 1e-12 * vv.total);

        // exchangeable dimensions
        let x = DataMatrix::<f64>::from_rows(&[vec![0.0, 0.0], vec![0.5, 0.5], vec![1.5, 1.5]]).unwrap();
        let parts = component_grams(&spec, &x).unwrap();
        let k = gram_matrix(&spec, &x).unwrap();
        let vv = variable_variances(&parts, k.values(), 0.3, 2.0).unwrap();
        assert_eq!(vv.v[0], vv.v[1]);

        let wrong = Matrix::<f64>::identity(3);
        assert!(matches!(
            variable_variances(&parts, &wrong, 0.3, 1.0),
            Err(KicError::ComponentMismatch(_))
        ));
    }

    #[test]
    fn report_decomposes() {
        let k = Matrix::<f64>::from_rows(&[vec![1.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let y = [0.4, -0.2];
        let ctx = ScoringContext::new(&k, &y, 0.2).unwrap();
        for c in Criterion::ALL {
            let r = ctx.score(c, &ScoreOptions::default()).unwrap();
            assert_eq!(r.score, r.gof_term + r.complexity_term, "{c}");
            assert_eq!(r.criterion, c);
        }
    }

    #[test]
    fn criterion_names_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(c.name().parse::<Criterion>().unwrap(), c);
        }
        assert!("aic".parse::<Criterion>().is_err());
    }

    #[test]
    fn covariance_complexity_cases() {
        let d = Matrix::<f64>::from_diagonal(&[0.5, 2.0, 3.0]);
        assert!(entropy_complexity(&d).unwrap().abs() < 1e-14);
        let c = Matrix::<f64>::identity(4).scaled(1.7);
        assert!(maximal_complexity(&c).unwrap().abs() < 1e-14);
        // 2×2 with unit variances and correlation r: entropy = −½ log(1 − r²)
        let r = 0.6;
        let s2 = Matrix::<f64>::from_rows(&[vec![1.0, r], vec![r, 1.0]]).unwrap();
        let want = -0.5 * (1.0 - r * r).ln();
        assert!((entropy_complexity(&s2).unwrap() - want).abs() < 1e-14);
        assert!((maximal_complexity(&s2).unwrap() - want).abs() < 1e-14);
        assert!(entropy_complexity(&Matrix::<f64>::zeros(2, 2)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_complexities_match_eigen_oracle(
            buf in prop::collection::vec(-1.0..1.0f64, 400),
            alpha in prop::sample::select(vec![0.05, 0.1, 0.5, 1.0]),
        ) {
            let k = psd(&buf, 20);
            let lam = eigenvalues(&k);
            let hs: f64 = lam.iter().map(|l| l * l / (l + alpha).powi(4)).sum();
            let tr: f64 = lam.iter().map(|l| l / (l + alpha).powi(2)).sum();
            prop_assert!((complexity_hs(&k, alpha).unwrap() - hs).abs() <= 1e-9 * hs);
            prop_assert!((complexity_trace(&k, alpha).unwrap() - tr).abs() <= 1e-9 * tr);
        }

        #[test]
        fn entropy_complexity_bounded_by_maximal(
            buf in prop::collection::vec(-1.0..1.0f64, 64),
            ridge in 0.01..2.0f64,
        ) {
            let mut s = psd(&buf, 8);
            s.add_diagonal(ridge);
            let e = entropy_complexity(&s).unwrap();
            let m = maximal_complexity(&s).unwrap();
            prop_assert!(e >= -1e-12);
            prop_assert!(e <= m + 1e-10);
        }

        #[test]
        fn hs_complexity_strictly_decreasing_over_alpha_grid(
            buf in prop::collection::vec(-1.0..1.0f64, 100),
        ) {
            let k = psd(&buf, 10);
            let mut last = f64::INFINITY;
            for a in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
                let c = complexity_hs(&k, a).unwrap();
                prop_assert!(c < last);
                last = c;
            }
        }

        #[test]
        fn gpr_matches_explicit_inverse_and_determinant(
            buf in prop::collection::vec(-1.0..1.0f64, 144),
            y in prop::collection::vec(-2.0..2.0f64, 12),
            noise2 in 0.05..2.0f64,
        ) {
            let k = psd(&buf, 12);
            let r = gpr_lml_score(&k, &y, 0.5, noise2).unwrap();
            let mut s = DMatrix::from_row_slice(12, 12, k.as_slice());
            for i in 0..12 { s[(i, i)] += noise2; }
            let yv = nalgebra::DVector::from_column_slice(&y);
            let quad = (yv.transpose() * s.clone().try_inverse().unwrap() * &yv)[(0, 0)];
            let lml = -0.5 * quad - 0.5 * s.determinant().ln() - 6.0 * LN_2PI;
            prop_assert!((r.score + lml).abs() <= 1e-9 * lml.abs().max(1.0));
            let bigger = gpr_lml_score(&k, &y, 0.5, noise2 + 0.1).unwrap();
            prop_assert!(bigger.complexity_term > r.complexity_term);
        }

        #[test]
        fn kic_complexity_independent_of_y_scale(
            buf in prop::collection::vec(-1.0..1.0f64, 64),
            y in prop::collection::vec(-2.0..2.0f64, 8),
        ) {
            let k = psd(&buf, 8);
            let y10: Vec<f64> = y.iter().map(|v| v * 10.0).collect();
            let a = kic_score(&k, &y, 0.3).unwrap();
            let b = kic_score(&k, &y10, 0.3).unwrap();
            prop_assert_eq!(a.complexity_term, b.complexity_term);
        }

        #[test]
        fn icomp_complexity_non_negative(
            buf in prop::collection::vec(-1.0..1.0f64, 225),
            alpha in 0.05..1.0f64,
        ) {
            let k = psd(&buf, 15);
            let y = vec![1.0; 15];
            let ctx = ScoringContext::new(&k, &y, alpha).unwrap();
            prop_assert!(ctx.icomp_complexity().unwrap() >= -1e-12);
        }

        #[test]
        fn stationarity_of_root_sigma2(
            buf in prop::collection::vec(-1.0..1.0f64, 100),
            y in prop::collection::vec(-2.0..2.0f64, 10),
            alpha in 0.05..1.0f64,
        ) {
            let k = psd(&buf, 10);
            let ctx = ScoringContext::new(&k, &y, alpha).unwrap();
            let d = ctx.solution().diagnostics.d;
            prop_assume!(d > 1e-6);
            let r1 = ctx.kic1().unwrap();
            let c1 = ctx.complexity_trace();
            let z = r1.sigma2_used;
            prop_assert!((c1 * z * z + 10.0 * z - d).abs() <= 1e-8 * d.max(1.0));
            // derivative form: n/Z − D/Z² + C = 0
            prop_assert!((10.0 / z - d / (z * z) + c1).abs() * z * z <= 1e-8 * d.max(1.0));
            let r2 = ctx.kic2().unwrap();
            let c2 = ctx.complexity_hs();
            let z = r2.sigma2_used;
            prop_assert!((2.0 * c2 * z * z * z + 10.0 * z - d).abs() <= 1e-8 * d.max(1.0));
        }
    }
}
