//! Grid search over `(α, kernel parameter)` and selection-frequency tallies.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{Criterion, CriterionReport, ScoreOptions, ScoringContext};
use crate::error::{KicError, Result};
use crate::kernel::{gram_matrix, DataMatrix, FamilyKind, KernelFamily, KernelSpec};
use crate::scalar::Scalar;

/// Hyperparameter grid. Both lists are strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamGrid<T> {
    pub alphas: Vec<T>,
    /// σ for Gaussian, η for Cauchy.
    pub kernel_params: Vec<T>,
    pub family: FamilyKind,
    pub additive: bool,
}

fn check_axis<T: Scalar>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(KicError::InvalidParameter(format!("{name} grid is empty")));
    }
    if v.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
        return Err(KicError::InvalidParameter(format!(
            "{name} grid values must be positive and finite"
        )));
    }
    if v.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(KicError::InvalidParameter(format!(
            "{name} grid must be strictly increasing without duplicates"
        )));
    }
    Ok(())
}

impl<T: Scalar> ParamGrid<T> {
    pub fn new(alphas: Vec<T>, kernel_params: Vec<T>, family: FamilyKind) -> Result<Self> {
        check_axis("alpha", &alphas)?;
        check_axis("kernel parameter", &kernel_params)?;
        Ok(Self {
            alphas,
            kernel_params,
            family,
            additive: false,
        })
    }

    pub fn spec_at(&self, j: usize) -> Result<KernelSpec<T>> {
        KernelSpec::new(
            KernelFamily::with_param(self.family, self.kernel_params[j]),
            self.additive,
        )
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.alphas.len(), self.kernel_params.len())
    }
}

/// Criterion reports laid out as `alpha × kernel_param`. `None` marks an
/// invalid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Surface<T> {
    pub alphas: Vec<T>,
    pub kernel_params: Vec<T>,
    cells: Vec<Option<CriterionReport<T>>>,
}

impl<T: Scalar> Surface<T> {
    pub fn new(alphas: Vec<T>, kernel_params: Vec<T>) -> Self {
        let len = alphas.len() * kernel_params.len();
        Self {
            alphas,
            kernel_params,
            cells: vec![None; len],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.alphas.len(), self.kernel_params.len())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&CriterionReport<T>> {
        self.cells[i * self.kernel_params.len() + j].as_ref()
    }

    pub fn set(&mut self, i: usize, j: usize, report: Option<CriterionReport<T>>) {
        let w = self.kernel_params.len();
        self.cells[i * w + j] = report;
    }

    pub fn valid_cells(&self) -> impl Iterator<Item = (usize, usize, &CriterionReport<T>)> {
        let w = self.kernel_params.len();
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(idx, c)| c.as_ref().map(|r| (idx / w, idx % w, r)))
    }
}

/// The selected cell of a surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Best<T> {
    pub alpha_index: usize,
    pub kernel_index: usize,
    pub alpha: T,
    pub kernel_param: T,
    pub score: T,
}

/// Lexicographic argmin: smallest score, ties to the larger α, then the
/// larger kernel parameter. Non-finite scores never win.
pub fn select_best<T: Scalar>(surface: &Surface<T>) -> Result<Best<T>> {
    let mut best: Option<(usize, usize, T)> = None;
    for (i, j, r) in surface.valid_cells() {
        if !r.score.is_finite() {
            continue;
        }
        let better = match best {
            None => true,
            Some((bi, bj, bs)) => {
                r.score < bs || (r.score == bs && (i > bi || (i == bi && j > bj)))
            }
        };
        if better {
            best = Some((i, j, r.score));
        }
    }
    let (i, j, score) = best.ok_or_else(|| KicError::EmptySurface {
        criterion: surface
            .valid_cells()
            .next()
            .map_or_else(|| "unknown".into(), |(_, _, r)| r.criterion.to_string()),
    })?;
    Ok(Best {
        alpha_index: i,
        kernel_index: j,
        alpha: surface.alphas[i],
        kernel_param: surface.kernel_params[j],
        score,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult<T> {
    pub criterion: Criterion,
    pub best: Best<T>,
    pub full_surface: Surface<T>,
}

impl<T: Scalar> SelectionResult<T> {
    pub fn best_alpha(&self) -> T {
        self.best.alpha
    }

    pub fn best_kernel_param(&self) -> T {
        self.best.kernel_param
    }

    pub fn best_score(&self) -> T {
        self.best.score
    }
}

/// A grid cell that could not be scored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvalidCell {
    pub criterion: Criterion,
    pub alpha_index: usize,
    pub kernel_index: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct GridEvaluation<T> {
    pub results: BTreeMap<Criterion, SelectionResult<T>>,
    pub invalid: Vec<InvalidCell>,
}

type CellScores<T> = Vec<(Criterion, std::result::Result<CriterionReport<T>, String>)>;

fn score_column<T: Scalar>(
    x: &DataMatrix<T>,
    y: &[T],
    grid: &ParamGrid<T>,
    j: usize,
    criteria: &[Criterion],
    opts: &ScoreOptions<T>,
) -> Vec<CellScores<T>> {
    let spec = match grid.spec_at(j).and_then(|s| Ok((s, gram_matrix(&s, x)?))) {
        Ok(v) => v,
        Err(e) => {
            let msg = e.to_string();
            return grid
                .alphas
                .iter()
                .map(|_| criteria.iter().map(|&c| (c, Err(msg.clone()))).collect())
                .collect();
        }
    };
    let (spec, gram) = spec;
    grid.alphas
        .iter()
        .map(|&alpha| match ScoringContext::new(gram.values(), y, alpha) {
            Ok(ctx) => criteria
                .iter()
                .map(|&c| {
                    let r = ctx
                        .score(c, opts)
                        .map_err(|e| e.to_string())
                        .and_then(|r| {
                            if r.score.is_finite() {
                                Ok(r.with_kernel(spec))
                            } else {
                                Err(format!("non-finite score {}", r.score))
                            }
                        });
                    (c, r)
                })
                .collect(),
            Err(e) => {
                let msg = e.to_string();
                criteria.iter().map(|&c| (c, Err(msg.clone()))).collect()
            }
        })
        .collect()
}

/// Scores every `(α, kernel_param, criterion)` cell and selects per criterion.
///
/// One Gram matrix is built per kernel parameter and one factorization per
/// `(kernel_param, α)`, shared by all criteria. Kernel-parameter columns are
/// evaluated in parallel on the ambient rayon pool; each column writes its own
/// slots, so the result does not depend on scheduling.
pub fn evaluate_grid<T: Scalar>(
    x: &DataMatrix<T>,
    y: &[T],
    grid: &ParamGrid<T>,
    criteria: &[Criterion],
    opts: &ScoreOptions<T>,
) -> Result<GridEvaluation<T>> {
    check_axis("alpha", &grid.alphas)?;
    check_axis("kernel parameter", &grid.kernel_params)?;
    if criteria.is_empty() {
        return Err(KicError::InvalidParameter("no criteria requested".into()));
    }
    if y.len() != x.rows() {
        return Err(KicError::DimensionMismatch {
            context: "evaluate_grid targets",
            expected: x.rows(),
            found: y.len(),
        });
    }
    let columns: Vec<Vec<CellScores<T>>> = (0..grid.kernel_params.len())
        .into_par_iter()
        .map(|j| score_column(x, y, grid, j, criteria, opts))
        .collect();

    let mut surfaces: BTreeMap<Criterion, Surface<T>> = criteria
        .iter()
        .map(|&c| {
            (
                c,
                Surface::new(grid.alphas.clone(), grid.kernel_params.clone()),
            )
        })
        .collect();
    let mut invalid = Vec::new();
    for (j, column) in columns.into_iter().enumerate() {
        for (i, cell) in column.into_iter().enumerate() {
            for (c, r) in cell {
                match r {
                    Ok(rep) => surfaces.get_mut(&c).expect("known").set(i, j, Some(rep)),
                    Err(reason) => invalid.push(InvalidCell {
                        criterion: c,
                        alpha_index: i,
                        kernel_index: j,
                        reason,
                    }),
                }
            }
        }
    }
    invalid.sort_by_key(|c| (c.criterion, c.alpha_index, c.kernel_index));
    for cell in &invalid {
        log::debug!(
            "{} cell ({}, {}) invalid: {}",
            cell.criterion,
            cell.alpha_index,
            cell.kernel_index,
            cell.reason
        );
    }

    let mut results = BTreeMap::new();
    for (c, surface) in surfaces {
        let best = select_best(&surface).map_err(|_| KicError::EmptySurface {
            criterion: c.to_string(),
        })?;
        results.insert(
            c,
            SelectionResult {
                criterion: c,
                best,
                full_surface: surface,
            },
        );
    }
    Ok(GridEvaluation { results, invalid })
}

/// Counts of selected cells over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable<T> {
    pub alphas: Vec<T>,
    pub kernel_params: Vec<T>,
    /// `counts[i][j]` = trials whose best cell is `(alphas[i], kernel_params[j])`.
    pub counts: Vec<Vec<usize>>,
    pub trials: usize,
}

impl<T: Scalar> FrequencyTable<T> {
    /// Largest single-cell count.
    pub fn modal_count(&self) -> usize {
        self.counts.iter().flatten().copied().max().unwrap_or(0)
    }

    /// `(alpha_index, kernel_index)` of the modal cell, ties to the later cell.
    pub fn modal_cell(&self) -> (usize, usize) {
        let mut best = (0, 0, 0);
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c >= best.2 {
                    best = (i, j, c);
                }
            }
        }
        (best.0, best.1)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

pub fn selection_frequency<T: Scalar>(
    trial_results: &[SelectionResult<T>],
) -> Result<FrequencyTable<T>> {
    let first = trial_results.first().ok_or_else(|| {
        KicError::InvalidParameter("selection_frequency needs at least one trial".into())
    })?;
    let alphas = first.full_surface.alphas.clone();
    let kernel_params = first.full_surface.kernel_params.clone();
    let mut counts = vec![vec![0usize; kernel_params.len()]; alphas.len()];
    for r in trial_results {
        if r.full_surface.alphas != alphas || r.full_surface.kernel_params != kernel_params {
            return Err(KicError::GridMismatch);
        }
        counts[r.best.alpha_index][r.best.kernel_index] += 1;
    }
    Ok(FrequencyTable {
        alphas,
        kernel_params,
        counts,
        trials: trial_results.len(),
    })
}
