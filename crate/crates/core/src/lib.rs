//! Kernel ridge regression with information-criterion model selection.
//!
//! The crate scores KRR fits with a family of criteria built on the
//! penalized log-likelihood and a Hilbert–Schmidt-norm complexity of the
//! parameter covariance (KIC, KIC1, KIC2), together with the usual
//! competitors (kernel ICOMP, GPR log marginal likelihood, closed-form
//! leave-one-out CV), and selects hyperparameters over a grid.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case.
//!
//! ```
//! use kic_core::{criteria, gram_matrix, DataMatrix, KernelSpec};
//!
//! let x = DataMatrix::from_column(&[-1.0, 0.0, 1.0]).unwrap();
//! let y = [0.1, 1.0, 0.1];
//! let k = gram_matrix(&KernelSpec::gaussian(1.0).unwrap(), &x).unwrap();
//! let report = criteria::kic_score(k.values(), &y, 0.1).unwrap();
//! assert_eq!(report.score, report.gof_term + report.complexity_term);
//! ```

// `!(x > 0)` style checks are intended: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod datasets;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod ridge;
pub mod scalar;
pub mod selection;

pub use criteria::{Criterion, CriterionReport, ScoreOptions, ScoringContext, VariableVariances};
pub use datasets::{Dataset, NoiseSpec, NormalizationRecord, TargetColumn};
pub use error::{KicError, Result};
pub use kernel::{
    component_grams, cross_kernel, eval_kernel, gram_matrix, DataMatrix, FamilyKind, GramMatrix, KernelFamily,
    KernelSpec,
};
pub use linalg::{Cholesky, Matrix};
pub use ridge::{
    fit, hat_matrix, predict, FitDiagnostics, RegularizedFactor, RidgeModel, RidgeSolution,
};
pub use scalar::Scalar;
pub use selection::{
    evaluate_grid, select_best, selection_frequency, FrequencyTable, GridEvaluation, ParamGrid,
    SelectionResult, Surface,
};

pub type Matrix64 = Matrix<f64>;
pub type DataMatrix64 = DataMatrix<f64>;
pub type GramMatrix64 = GramMatrix<f64>;
pub type KernelSpec64 = KernelSpec<f64>;
pub type RidgeModel64 = RidgeModel<f64>;
pub type CriterionReport64 = CriterionReport<f64>;
pub type ParamGrid64 = ParamGrid<f64>;
pub type SelectionResult64 = SelectionResult<f64>;
pub type Dataset64 = Dataset<f64>;

pub type Matrix32 = Matrix<f32>;
pub type DataMatrix32 = DataMatrix<f32>;
pub type GramMatrix32 = GramMatrix<f32>;
pub type KernelSpec32 = KernelSpec<f32>;
pub type RidgeModel32 = RidgeModel<f32>;
pub type Dataset32 = Dataset<f32>;
