//! Least-squares core shared by every estimator.
//!
//! The solve is a Householder QR taken in column order. Before column `k` is
//! reflected, the norm of its part orthogonal to the columns already kept is
//! compared with `rtol · ‖x_k‖`; if it falls below, the column is an (almost)
//! exact combination of earlier ones and is dropped. Dropping therefore always
//! removes the later of two collinear columns, which keeps results
//! deterministic and lets callers order columns by priority.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::features::DesignMatrix;

/// Default relative rank tolerance.
pub const DEFAULT_RTOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("X has {x_rows} rows but y has {y_len} elements")]
    DimensionMismatch { x_rows: usize, y_len: usize },
    #[error("empty system")]
    Empty,
    #[error("every column was dropped for rank deficiency")]
    AllColumnsDropped,
    #[error("{n} observations cannot identify {p} parameters")]
    DegreesOfFreedomExhausted { n: usize, p: usize },
    #[error("transform length {got} does not match {expected} rows")]
    BadTransform { expected: usize, got: usize },
}

/// Result of a least-squares solve.
///
/// `beta` and `cov` are indexed by position in `retained`, not by original
/// column index; use [`LsqSolution::coef`] to look up by column.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub beta: DVector<f64>,
    /// σ² (XᵀX)⁻¹ over retained columns.
    pub cov: DMatrix<f64>,
    pub residuals: DVector<f64>,
    /// SSR / (n − p); zero when n = p.
    pub sigma2: f64,
    pub ssr: f64,
    pub retained: Vec<usize>,
    pub dropped_columns: Vec<usize>,
    pub n: usize,
    pub p: usize,
    /// (X_retainedᵀ X_retained)⁻¹, before scaling by σ².
    pub xtx_inv: DMatrix<f64>,
}

impl LsqSolution {
    pub fn position(&self, column: usize) -> Option<usize> {
        self.retained.iter().position(|&c| c == column)
    }

    pub fn coef(&self, column: usize) -> Option<f64> {
        self.position(column).map(|k| self.beta[k])
    }

    pub fn std_error(&self, column: usize) -> Option<f64> {
        self.position(column).map(|k| self.cov[(k, k)].max(0.0).sqrt())
    }

    pub fn fitted(&self, y: &DVector<f64>) -> DVector<f64> {
        y - &self.residuals
    }
}

/// Minimises ‖y − Xβ‖² with column-order rank detection.
pub fn solve_ols(x: &DMatrix<f64>, y: &DVector<f64>, rtol: f64) -> Result<LsqSolution, SolverError> {
    let (n, p) = x.shape();
    if n != y.len() {
        return Err(SolverError::DimensionMismatch { x_rows: n, y_len: y.len() });
    }
    if n == 0 || p == 0 {
        return Err(SolverError::Empty);
    }
    if n < p {
        return Err(SolverError::DegreesOfFreedomExhausted { n, p });
    }

    let col_norms: Vec<f64> = (0..p).map(|k| x.column(k).norm()).collect();
    let mut a = x.clone();
    let mut qty = y.clone();
    let mut retained = Vec::with_capacity(p);
    let mut dropped = Vec::new();
    let mut r = 0;
    for k in 0..p {
        let norm = if r < n { a.view((r, k), (n - r, 1)).norm() } else { 0.0 };
        if norm == 0.0 || norm <= rtol * col_norms[k] {
            dropped.push(k);
            continue;
        }
        let alpha = if a[(r, k)] > 0.0 { -norm } else { norm };
        let mut v: DVector<f64> = a.column(k).rows(r, n - r).into_owned();
        v[0] -= alpha;
        let vnorm2 = v.norm_squared();
        if vnorm2 > 0.0 {
            for c in k + 1..p {
                let mut col = a.column_mut(c);
                let mut col = col.rows_mut(r, n - r);
                let s = 2.0 * v.dot(&col) / vnorm2;
                col.axpy(-s, &v, 1.0);
            }
            let mut tail = qty.rows_mut(r, n - r);
            let s = 2.0 * v.dot(&tail) / vnorm2;
            tail.axpy(-s, &v, 1.0);
        }
        a[(r, k)] = alpha;
        a.view_mut((r + 1, k), (n - r - 1, 1)).fill(0.0);
        retained.push(k);
        r += 1;
    }
    if retained.is_empty() {
        return Err(SolverError::AllColumnsDropped);
    }

    let rr = DMatrix::from_fn(r, r, |row, c| a[(row, retained[c])]);
    let beta = rr.solve_upper_triangular(&qty.rows(0, r).clone_owned()).expect("retained diagonal is nonzero");
    let r_inv = rr.solve_upper_triangular(&DMatrix::identity(r, r)).expect("retained diagonal is nonzero");
    let xtx_inv = &r_inv * r_inv.transpose();

    let x_ret = x.select_columns(&retained);
    let residuals = y - &x_ret * &beta;
    let ssr = residuals.norm_squared();
    let sigma2 = if n > r { ssr / (n - r) as f64 } else { 0.0 };
    let mut cov = &xtx_inv * sigma2;
    // symmetrise away rounding
    for i in 0..r {
        for j in 0..i {
            let m = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = m;
            cov[(j, i)] = m;
        }
    }

    Ok(LsqSolution { beta, cov, residuals, sigma2, ssr, retained, dropped_columns: dropped, n, p: r, xtx_inv })
}

/// Per-row transform applied before an OLS solve.
#[derive(Debug, Clone, PartialEq)]
pub enum GlsTransform {
    Identity,
    /// Subtract `theta[u]` times the unit mean from every row of unit `u`.
    /// `unit_index` labels each row; rows of a unit need not be contiguous.
    QuasiDemean {
        unit_index: Vec<usize>,
        theta: Vec<f64>,
    },
}

impl GlsTransform {
    /// Same θ for every unit.
    pub fn common(unit_index: Vec<usize>, theta: f64) -> Self {
        let units = unit_index.iter().max().map_or(0, |u| u + 1);
        Self::QuasiDemean { unit_index, theta: vec![theta; units] }
    }

    pub fn apply(&self, x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DMatrix<f64>, DVector<f64>), SolverError> {
        match self {
            Self::Identity => Ok((x.clone(), y.clone())),
            Self::QuasiDemean { unit_index, theta } => {
                if unit_index.len() != x.nrows() {
                    return Err(SolverError::BadTransform { expected: x.nrows(), got: unit_index.len() });
                }
                let units = theta.len();
                if unit_index.iter().any(|&u| u >= units) {
                    return Err(SolverError::BadTransform {
                        expected: units,
                        got: unit_index.iter().max().unwrap() + 1,
                    });
                }
                let mut counts = vec![0usize; units];
                let mut x_sum = DMatrix::<f64>::zeros(units, x.ncols());
                let mut y_sum = DVector::<f64>::zeros(units);
                for (row, &u) in unit_index.iter().enumerate() {
                    counts[u] += 1;
                    y_sum[u] += y[row];
                    for c in 0..x.ncols() {
                        x_sum[(u, c)] += x[(row, c)];
                    }
                }
                let mut xt = x.clone();
                let mut yt = y.clone();
                for (row, &u) in unit_index.iter().enumerate() {
                    let w = theta[u] / counts[u] as f64;
                    yt[row] -= w * y_sum[u];
                    for c in 0..x.ncols() {
                        xt[(row, c)] -= w * x_sum[(u, c)];
                    }
                }
                Ok((xt, yt))
            }
        }
    }
}

/// OLS on the transformed system; GLS with a known row transform is exactly
/// this. Residuals and σ² refer to the transformed system.
pub fn solve_gls_transformed(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    transform: &GlsTransform,
    rtol: f64,
) -> Result<LsqSolution, SolverError> {
    let (xt, yt) = transform.apply(x, y)?;
    solve_ols(&xt, &yt, rtol)
}

/// Convenience: OLS on a design matrix with the default tolerance.
pub fn solve_design(design: &DesignMatrix) -> Result<LsqSolution, SolverError> {
    solve_ols(&design.x, &design.y, DEFAULT_RTOL)
}
